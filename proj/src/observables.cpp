#include "rotex/observables.hpp"

#include <algorithm>
#include <cmath>

#include "rotex/constants.hpp"
#include "rotex/kernels.hpp"

namespace rotex {

double CoherenceVector::magnitude_squared(int J) const {
  if (J < 0 || J >= size()) return 0.0;
  return std::norm(rho[static_cast<std::size_t>(J)]);
}

namespace {

// J_max + 1 slots so rho can be indexed by J directly.
std::size_t j_slots(const EnsembleState& ens) { return static_cast<std::size_t>(ens.basis->J_max() + 1); }

}  // namespace

CoherenceVector coherences(const EnsembleState& ens, MWeighting weighting) {
  CoherenceVector cv;
  cv.time = ens.time;
  cv.rho.assign(j_slots(ens), cplx{});
  const auto& k = kernels::active();
  std::vector<cplx> acc;
  std::vector<double> ones;
  for (const Member& m : ens.members) {
    const auto& e = ens.entry_of(m);
    const std::size_t n = e.block.size();
    if (n < 2) continue;
    const double* a = e.coupling.data();
    if (weighting == MWeighting::unweighted) {
      ones.assign(n - 1, 1.0);
      a = ones.data();
    }
    acc.assign(n - 1, cplx{});
    k.coherence_accumulate(acc.data(), a, m.amp.data(), n - 1, m.weight);
    for (std::size_t i = 0; i + 1 < n; ++i) cv.rho[static_cast<std::size_t>(e.block.J_list[i])] += acc[i];
  }
  return cv;
}

CoherenceVector coherences_from_lower(const EnsembleState& ens, MWeighting weighting) {
  CoherenceVector cv;
  cv.time = ens.time;
  cv.rho.assign(j_slots(ens), cplx{});
  for (const Member& m : ens.members) {
    const auto& e = ens.entry_of(m);
    for (std::size_t i = 0; i + 1 < e.block.size(); ++i) {
      const double a = weighting == MWeighting::coupling ? e.coupling[i] : 1.0;
      const cplx lower = std::conj(m.amp[i + 1]) * m.amp[i];  // rho_{J+2,J}
      cv.rho[static_cast<std::size_t>(e.block.J_list[i])] += m.weight * a * std::conj(lower);
    }
  }
  return cv;
}

double integrated_coherence(std::span<const double> coherence_sq, std::optional<int> J_min) {
  double s = 0.0;
  const std::size_t start = J_min ? static_cast<std::size_t>(std::max(0, *J_min)) : 0;
  for (std::size_t J = start; J < coherence_sq.size(); ++J) s += coherence_sq[J];
  return s;
}

double integrated_coherence(const CoherenceVector& cv, std::optional<int> J_min) {
  std::vector<double> sq(cv.rho.size());
  for (std::size_t J = 0; J < sq.size(); ++J) sq[J] = std::norm(cv.rho[J]);
  return integrated_coherence(sq, J_min);
}

std::vector<double> populations(const EnsembleState& ens) {
  std::vector<double> pop(j_slots(ens), 0.0);
  for (const Member& m : ens.members) {
    const auto& e = ens.entry_of(m);
    for (std::size_t i = 0; i < e.block.size(); ++i)
      pop[static_cast<std::size_t>(e.block.J_list[i])] += m.weight * std::norm(m.amp[i]);
  }
  return pop;
}

namespace {

double population_term(const EnsembleState& ens) {
  double s = 0.0;
  for (const Member& m : ens.members) {
    const auto& e = ens.entry_of(m);
    double t = 0.0;
    for (std::size_t i = 0; i < e.block.size(); ++i) t += e.diagonal[i] * std::norm(m.amp[i]);
    s += m.weight * t;
  }
  return s;
}

}  // namespace

double alignment(const EnsembleState& ens) {
  const CoherenceVector cv = coherences(ens, MWeighting::coupling);
  double s = population_term(ens);
  for (const cplx& r : cv.rho) s += 2.0 * r.real();
  return s;
}

int highest_above(std::span<const double> values, double threshold) {
  double mx = 0.0;
  for (double v : values) mx = std::max(mx, v);
  if (mx <= 0.0) return -1;
  for (std::size_t i = values.size(); i-- > 0;)
    if (values[i] >= threshold * mx) return static_cast<int>(i);
  return -1;
}

AngularMomentumStats angular_momentum_stats(const EnsembleState& ens, double threshold) {
  const std::vector<double> pop = populations(ens);
  AngularMomentumStats st;
  for (std::size_t J = 0; J < pop.size(); ++J) st.mean_J += pop[J] * static_cast<double>(J);
  st.max_populated_J = highest_above(pop, threshold);
  return st;
}

std::vector<double> alignment_trace(const EnsembleState& ens, double t0, double dt, std::size_t n) {
  const CoherenceVector cv = coherences(ens, MWeighting::coupling);
  const MoleculeSpec& mol = ens.molecule();
  std::vector<double> out(n, population_term(ens));
  std::vector<cplx> rho, step;
  std::vector<double> shifts;
  for (std::size_t J = 0; J < cv.rho.size(); ++J) {
    if (cv.rho[J] == cplx{}) continue;
    shifts.push_back(raman_shift(static_cast<int>(J), mol));
    rho.push_back(2.0 * cv.rho[J]);
  }
  step = free_phases(dt, shifts);
  // The recurrence is re-anchored every `chunk` samples so rounding does not
  // accumulate over long traces.
  constexpr std::size_t chunk = 256;
  const auto& k = kernels::active();
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t len = std::min(chunk, n - begin);
    const std::vector<cplx> start = free_phases(t0 + static_cast<double>(begin) * dt - ens.time, shifts);
    k.phasor_series(rho.data(), start.data(), step.data(), rho.size(), out.data() + begin, len);
  }
  return out;
}

void Observables::accumulate(const Observables& o, double weight) {
  if (coherence_sq.size() < o.coherence_sq.size()) coherence_sq.resize(o.coherence_sq.size(), 0.0);
  if (population.size() < o.population.size()) population.resize(o.population.size(), 0.0);
  for (std::size_t i = 0; i < o.coherence_sq.size(); ++i) coherence_sq[i] += weight * o.coherence_sq[i];
  for (std::size_t i = 0; i < o.population.size(); ++i) population[i] += weight * o.population[i];
  alignment += weight * o.alignment;
  mean_J += weight * o.mean_J;
}

Observables observe(const EnsembleState& ens, MWeighting weighting) {
  Observables o;
  const CoherenceVector cv = coherences(ens, weighting);
  o.coherence_sq.resize(cv.rho.size());
  for (std::size_t J = 0; J < cv.rho.size(); ++J) o.coherence_sq[J] = std::norm(cv.rho[J]);
  o.population = populations(ens);
  for (std::size_t J = 0; J < o.population.size(); ++J) o.mean_J += o.population[J] * static_cast<double>(J);
  o.alignment = alignment(ens);
  return o;
}

}  // namespace rotex
