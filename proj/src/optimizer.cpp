#include "rotex/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "rotex/error.hpp"
#include "rotex/parallel.hpp"

namespace rotex {

void Objective::validate(const MoleculeSpec& mol) const {
  if (kind == Kind::high_j) {
    if (J_min < 0) throw InvalidArgument("objective: J_min must be >= 0");
    if (!parity_allows(mol.parity, J_min))
      throw InvalidArgument(fmt::format("objective: J_min={} not allowed for {} parity", J_min, to_string(mol.parity)));
  }
}

double Objective::value(std::span<const double> coherence_sq) const {
  if (kind == Kind::total) return integrated_coherence(coherence_sq);
  return integrated_coherence(coherence_sq, J_min + 1);
}

std::string to_string(Objective::Kind k) { return k == Objective::Kind::total ? "total" : "high_j"; }

Objective::Kind objective_kind_from_string(const std::string& s) {
  if (s == "total") return Objective::Kind::total;
  if (s == "high_j") return Objective::Kind::high_j;
  throw InvalidArgument(fmt::format("unknown objective '{}' (expected total or high_j)", s));
}

std::string to_string(Delay d) {
  static const char* names[] = {"T1", "T2", "T3", "T4"};
  return names[static_cast<int>(d)];
}

Delay delay_from_string(const std::string& s) {
  for (Delay d : {Delay::T1, Delay::T2, Delay::T3, Delay::T4})
    if (to_string(d) == s) return d;
  throw InvalidArgument(fmt::format("unknown delay '{}' (expected T1..T4)", s));
}

double get_delay(const InterleaveTemplate& tpl, Delay d) {
  switch (d) {
    case Delay::T1: return tpl.T1;
    case Delay::T2: return tpl.T2;
    case Delay::T3: return tpl.constrain_T3 ? tpl.T1 + tpl.T2 : tpl.T3;
    case Delay::T4: return tpl.T4;
  }
  return 0.0;
}

void set_delay(InterleaveTemplate& tpl, Delay d, double value) {
  switch (d) {
    case Delay::T1: tpl.T1 = value; break;
    case Delay::T2: tpl.T2 = value; break;
    case Delay::T3:
      if (tpl.constrain_T3) throw InvalidArgument("T3 is fixed to T1 + T2 while constrain_T3 is set");
      tpl.T3 = value;
      break;
    case Delay::T4: tpl.T4 = value; break;
  }
}

SearchSpec SearchSpec::defaults(const MoleculeSpec& mol) {
  const double T = mol.revival_time();
  SearchSpec s;
  s.coarse_step = T / 200.0;
  s.fine_step = T / 2000.0;
  const double centers[4] = {0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 4; ++i) s.bounds[i] = {(centers[i] - 0.06) * T, (centers[i] + 0.06) * T};
  return s;
}

void SearchSpec::validate() const {
  if (!(coarse_step > 0.0) || !(fine_step > 0.0)) throw InvalidArgument("search: grid steps must be positive");
  if (fine_step > coarse_step) throw InvalidArgument("search: fine step exceeds coarse step");
  if (max_passes < 1) throw InvalidArgument("search: max_passes must be >= 1");
  for (int i = 0; i < 4; ++i) {
    if (!(bounds[i].lo >= 0.0) || !(bounds[i].hi >= bounds[i].lo))
      throw InvalidArgument(fmt::format("search: bounds for {} are not ordered", to_string(Delay(i))));
    if (i > 0 && bounds[i].lo < bounds[i - 1].lo)
      throw InvalidArgument("search: delay bounds must be ordered T1 <= T2 <= T3 <= T4");
  }
}

double evaluate_objective(const InterleaveTemplate& tpl, const Objective& obj, const Simulator& sim, bool averaged,
                          int threads) {
  tpl.validate();
  const PulseTrain train = interleaved_train(tpl);
  const Observables o = averaged ? sim.averaged(train, threads) : sim.single(train, 1.0, threads);
  return obj.value(o.coherence_sq);
}

namespace {

std::vector<double> grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw InvalidArgument("scan: need step > 0 and hi >= lo");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + static_cast<double>(i) * step;
  return g;
}

// 0 < T1 < T2 < T3 < T4 over the delays in use.
bool strictly_ordered(const InterleaveTemplate& tpl) {
  const std::vector<double> off = tpl.offsets();
  for (std::size_t i = 1; i < off.size(); ++i)
    if (!(off[i] > off[i - 1])) return false;
  return off.back() < tpl.T4;
}

std::vector<Delay> free_delays(const InterleaveTemplate& tpl) {
  if (tpl.copies == 2) return {Delay::T1, Delay::T4};
  if (tpl.constrain_T3) return {Delay::T1, Delay::T2, Delay::T4};
  return {Delay::T1, Delay::T2, Delay::T3, Delay::T4};
}

}  // namespace

std::vector<std::size_t> ScanCurve::local_maxima() const {
  std::vector<std::size_t> out;
  const std::size_t n = objective.size();
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (objective[i] > objective[i - 1] && objective[i] >= objective[i + 1]) out.push_back(i);
  if (n >= 2 && objective[n - 1] > objective[n - 2]) out.push_back(n - 1);
  return out;
}

std::vector<std::size_t> ScanCurve::local_minima() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < objective.size(); ++i)
    if (objective[i] < objective[i - 1] && objective[i] <= objective[i + 1]) out.push_back(i);
  return out;
}

SpectrogramGrid ScanCurve::spectrogram(const ProbeSpec& probe, const MoleculeSpec& mol, double step_nm) const {
  SpectrogramGrid g;
  g.parameter = to_string(parameter);
  g.scan = delay;
  g.coherence_sq = coherence_sq;
  double reach = 0.0;
  for (const auto& col : coherence_sq) {
    const RamanSpectrum s = synth_spectrum(col, probe, mol, step_nm);
    if (!s.shift_nm.empty()) reach = std::max({reach, std::abs(s.shift_nm.front()), std::abs(s.shift_nm.back())});
  }
  for (std::size_t i = 0; i < coherence_sq.size(); ++i) {
    RamanSpectrum s = synth_spectrum(coherence_sq[i], probe, mol, step_nm, reach);
    if (i == 0) g.shift_nm = s.shift_nm;
    g.intensity.push_back(std::move(s.intensity));
  }
  return g;
}

ScanCurve scan_delay(const InterleaveTemplate& tpl, Delay which, double lo, double hi, double step,
                     const Objective& obj, const Simulator& sim, bool averaged, int threads) {
  obj.validate(sim.scenario().molecule);
  if (lo < 0.0) throw InvalidArgument("scan_delay: range must start at or after 0");
  if (which != Delay::T4 && hi > tpl.T4 * (1.0 + 1e-12))
    throw InvalidArgument("scan_delay: range must lie within [0, T4]");
  ScanCurve c;
  c.parameter = which;
  c.delay = grid(lo, hi, step);
  c.objective.resize(c.delay.size());
  c.coherence_sq.resize(c.delay.size());
  parallel_for(c.delay.size(), threads, [&](std::size_t i) {
    InterleaveTemplate t = tpl;
    set_delay(t, which, c.delay[i]);
    const PulseTrain train = interleaved_train(t);
    const Observables o = averaged ? sim.averaged(train, 1) : sim.single(train, 1.0, 1);
    c.coherence_sq[i] = o.coherence_sq;
    c.objective[i] = obj.value(o.coherence_sq);
  });
  return c;
}

OptimizeResult optimize_delays(const InterleaveTemplate& start, const Objective& obj, const SearchSpec& search,
                               const Simulator& sim, int threads) {
  search.validate();
  obj.validate(sim.scenario().molecule);
  InterleaveTemplate cur = start;
  cur.constrain_T3 = search.constrain_T3;
  if (cur.copies == 4 && !cur.constrain_T3 && start.constrain_T3) cur.T3 = start.T1 + start.T2;
  cur.validate();
  if (!strictly_ordered(cur)) throw InvalidArgument("optimize_delays: start must satisfy 0 < T1 < T2 < T3 < T4");
  for (Delay d : free_delays(cur)) {
    const Bounds& b = search.bounds[static_cast<int>(d)];
    const double v = get_delay(cur, d);
    if (v < b.lo || v > b.hi)
      throw InvalidArgument(fmt::format("optimize_delays: start {} outside its bounds", to_string(d)));
  }

  const bool avg = search.averaged_search;
  OptimizeResult r;
  double best = evaluate_objective(cur, obj, sim, avg, threads);
  r.initial_objective = best;
  r.evaluations = 1;

  // Evaluates `candidates` for delay d in parallel and moves to the first
  // strict improvement maximum (ascending order breaks ties low).
  auto sweep = [&](Delay d, const std::vector<double>& candidates) {
    std::vector<double> vals(candidates.size(), -1.0);
    std::vector<char> ok(candidates.size(), 0);
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
      InterleaveTemplate t = cur;
      set_delay(t, d, candidates[i]);
      if (!strictly_ordered(t)) return;
      ok[i] = 1;
      vals[i] = evaluate_objective(t, obj, sim, avg, 1);
    });
    const double before = get_delay(cur, d);
    double top = best;
    std::optional<double> pick;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!ok[i]) continue;
      ++r.evaluations;
      if (vals[i] > top) {
        top = vals[i];
        pick = candidates[i];
      }
    }
    if (pick) {
      set_delay(cur, d, *pick);
      best = top;
    }
    return std::abs(get_delay(cur, d) - before);
  };

  for (Delay d : free_delays(cur)) {
    const Bounds& b = search.bounds[static_cast<int>(d)];
    const double moved = sweep(d, grid(b.lo, b.hi, search.coarse_step));
    r.trace.push_back({0, d, get_delay(cur, d), best, moved > 0.0});
  }

  const int half = static_cast<int>(std::lround(search.coarse_step / search.fine_step));
  for (int pass = 1; pass <= search.max_passes; ++pass) {
    double largest = 0.0;
    for (Delay d : free_delays(cur)) {
      const Bounds& b = search.bounds[static_cast<int>(d)];
      const double c0 = get_delay(cur, d);
      std::vector<double> cand;
      for (int k = -half; k <= half; ++k) {
        const double v = c0 + k * search.fine_step;
        if (k != 0 && v >= b.lo && v <= b.hi) cand.push_back(v);
      }
      const double moved = sweep(d, cand);
      largest = std::max(largest, moved);
      r.trace.push_back({pass, d, get_delay(cur, d), best, moved > 0.0});
    }
    r.passes = pass;
    if (largest <= search.fine_step * (1.0 + 1e-9)) break;
  }

  r.best = cur;
  r.objective = best;
  r.final_averaged = evaluate_objective(cur, obj, sim, true, threads);
  ++r.evaluations;
  return r;
}

}  // namespace rotex
