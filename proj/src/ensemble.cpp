#include "rotex/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <set>

#include "rotex/error.hpp"
#include "rotex/kernels.hpp"
#include "rotex/parallel.hpp"

namespace rotex {

RotorBasis::RotorBasis(MoleculeSpec mol, int J_max, const std::vector<std::pair<int, int>>& keys)
    : mol_(std::move(mol)), J_max_(J_max) {
  for (const auto& [absM, parity] : keys) {
    if (entries_.count({absM, parity})) continue;
    Entry e;
    e.block = make_block(absM, parity, J_max);
    e.kick = std::make_shared<const KickFactor>(e.block);
    e.energies.resize(e.block.size());
    e.diagonal.resize(e.block.size());
    for (std::size_t i = 0; i < e.block.size(); ++i) {
      e.energies[i] = rotational_energy(e.block.J_list[i], mol_);
      e.diagonal[i] = cos2_diagonal(e.block.J_list[i], absM);
    }
    for (std::size_t i = 0; i + 1 < e.block.size(); ++i)
      e.coupling.push_back(cos2_offdiagonal(e.block.J_list[i], absM));
    entries_.emplace(std::make_pair(absM, parity), std::move(e));
  }
}

const RotorBasis::Entry& RotorBasis::entry(int M, int parity_bit) const {
  const auto it = entries_.find({std::abs(M), parity_bit});
  if (it == entries_.end())
    throw InvalidArgument(fmt::format("no basis block for M = {}, parity {}", M, parity_bit));
  return it->second;
}

std::vector<std::pair<int, int>> RotorBasis::keys() const {
  std::vector<std::pair<int, int>> k;
  for (const auto& [key, _] : entries_) k.push_back(key);
  return k;
}

double EnsembleState::total_population() const {
  double s = 0.0;
  for (const Member& m : members) {
    double p = 0.0;
    for (const cplx& c : m.amp) p += std::norm(c);
    s += m.weight * p;
  }
  return s;
}

namespace {

std::vector<std::pair<int, int>> keys_of(const std::vector<Member>& members) {
  std::set<std::pair<int, int>> k;
  for (const Member& m : members) k.insert({std::abs(m.M), m.J0 % 2});
  return {k.begin(), k.end()};
}

}  // namespace

EnsembleState init_ensemble(const MoleculeSpec& mol, const ThermalSpec& spec, int J_max) {
  const int limit = thermal_j_limit(mol, spec);
  const int basis_j_max = J_max > 0 ? J_max : limit + 16;
  const auto weights = thermal_weights(mol, spec, std::min(limit, basis_j_max));
  EnsembleState ens;
  ens.members.reserve(weights.size());
  for (const ThermalWeight& w : weights) ens.members.push_back({w.weight, w.J, w.M, {}});
  ens.basis = std::make_shared<const RotorBasis>(mol, basis_j_max, keys_of(ens.members));
  for (Member& m : ens.members) {
    const auto& e = ens.entry_of(m);
    m.amp.assign(e.block.size(), cplx{});
    m.amp[static_cast<std::size_t>(e.block.index_of(m.J0))] = 1.0;
  }
  return ens;
}

EnsembleState with_j_max(const EnsembleState& ens, int J_max) {
  EnsembleState out;
  out.time = ens.time;
  out.members = ens.members;
  out.basis = std::make_shared<const RotorBasis>(ens.molecule(), J_max, keys_of(ens.members));
  for (std::size_t i = 0; i < out.members.size(); ++i) {
    const auto& old_block = ens.entry_of(ens.members[i]).block;
    const auto& new_block = out.entry_of(out.members[i]).block;
    std::vector<cplx> amp(new_block.size(), cplx{});
    for (std::size_t k = 0; k < old_block.size(); ++k) {
      const int idx = new_block.index_of(old_block.J_list[k]);
      if (idx >= 0) amp[static_cast<std::size_t>(idx)] = ens.members[i].amp[k];
    }
    out.members[i].amp = std::move(amp);
  }
  return out;
}

EnsembleState propagate_free(const EnsembleState& ens, double t) {
  EnsembleState out = ens;
  out.time = t;
  const double dt = t - ens.time;
  if (dt == 0.0) return out;
  std::map<std::pair<int, int>, std::vector<cplx>> phases;
  for (const auto& key : ens.basis->keys())
    phases.emplace(key, free_phases(dt, ens.basis->entry(key.first, key.second).energies));
  const auto& k = kernels::active();
  for (Member& m : out.members) {
    const auto& p = phases.at({std::abs(m.M), m.J0 % 2});
    k.cmul_inplace(m.amp.data(), p.data(), m.amp.size());
  }
  return out;
}

namespace {

struct BlockPlan {
  std::vector<std::vector<cplx>> gap;    // free phases before pulse i
  std::vector<std::vector<cplx>> kick;   // eigenphases of pulse i
};

struct RunOutcome {
  bool truncation_ok = true;
};

RunOutcome run_once(const EnsembleState& ens, const PulseTrain& train, const EvolveOptions& opts,
                    Trajectory& traj) {
  const auto& kern = kernels::active();
  const std::size_t n_pulses = train.pulses.size();
  std::map<std::pair<int, int>, BlockPlan> plans;
  for (const auto& key : ens.basis->keys()) {
    const auto& e = ens.basis->entry(key.first, key.second);
    BlockPlan plan;
    double t_prev = ens.time;
    for (const Pulse& p : train.pulses) {
      plan.gap.push_back(free_phases(p.time - t_prev, e.energies));
      plan.kick.push_back(e.kick->eigenphases(p.P));
      t_prev = p.time;
    }
    plans.emplace(key, std::move(plan));
  }

  traj.after_pulse.clear();
  if (opts.record_each_pulse) {
    traj.after_pulse.resize(n_pulses);
    for (std::size_t i = 0; i < n_pulses; ++i) {
      traj.after_pulse[i].basis = ens.basis;
      traj.after_pulse[i].time = train.pulses[i].time;
      traj.after_pulse[i].members = ens.members;
    }
  }
  traj.final_state = ens;
  if (n_pulses > 0) traj.final_state.time = train.pulses.back().time;

  std::atomic<bool> violated{false};
  parallel_for(ens.members.size(), opts.threads, [&](std::size_t m) {
    if (violated.load(std::memory_order_relaxed)) return;
    const Member& mem = ens.members[m];
    const auto& e = ens.entry_of(mem);
    const BlockPlan& plan = plans.at({std::abs(mem.M), mem.J0 % 2});
    std::vector<cplx> amp = mem.amp;
    std::vector<cplx> scratch(amp.size());
    const std::size_t n = amp.size();
    for (std::size_t i = 0; i < n_pulses; ++i) {
      kern.cmul_inplace(amp.data(), plan.gap[i].data(), n);
      e.kick->apply(plan.kick[i], amp, scratch);
      if (opts.auto_truncation) {
        double top = std::norm(amp[n - 1]);
        if (n >= 2) top += std::norm(amp[n - 2]);
        if (top >= opts.truncation_tolerance) {
          violated.store(true, std::memory_order_relaxed);
          return;
        }
      }
      if (opts.record_each_pulse) traj.after_pulse[i].members[m].amp = amp;
    }
    traj.final_state.members[m].amp = std::move(amp);
  });
  return {!violated.load()};
}

}  // namespace

Trajectory evolve_ensemble(const EnsembleState& ens, const PulseTrain& train, const EvolveOptions& opts) {
  train.validate();
  if (!train.pulses.empty() && train.pulses.front().time < ens.time)
    throw InvalidArgument(fmt::format("evolve_ensemble: first pulse at {} s precedes the ensemble time {} s",
                                      train.pulses.front().time, ens.time));
  Trajectory traj;
  EnsembleState start = ens;
  while (true) {
    const RunOutcome out = run_once(start, train, opts, traj);
    if (out.truncation_ok) break;
    const int J_max = start.basis->J_max();
    const int grown = J_max + std::max(16, J_max / 2);
    if (grown > opts.j_max_limit)
      throw TruncationFailure(fmt::format(
          "evolve_ensemble: basis truncation still violated at J_max = {} (limit {})", J_max,
          opts.j_max_limit));
    start = with_j_max(ens, grown);
    ++traj.truncation_retries;
  }
  traj.J_max = start.basis->J_max();
  return traj;
}

EnsembleState Trajectory::state_at(double t, const EnsembleState& initial) const {
  std::size_t i = after_pulse.size();
  while (i > 0 && after_pulse[i - 1].time > t) --i;
  if (i == 0) return propagate_free(initial.basis == final_state.basis ? initial : with_j_max(initial, J_max), t);
  return propagate_free(after_pulse[i - 1], t);
}

IntensityProfile IntensityProfile::delta() { return {}; }

IntensityProfile IntensityProfile::gaussian_beam(int n, double s_min) {
  if (n < 1 || !(s_min > 0.0 && s_min <= 1.0))
    throw InvalidArgument("gaussian_beam profile: need n >= 1 and s_min in (0, 1]");
  IntensityProfile p;
  p.kind = Kind::gaussian_beam;
  p.samples.clear();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = n == 1 ? 1.0 : s_min + (1.0 - s_min) * i / (n - 1);
    p.samples.push_back({s, 1.0 / s});
    total += 1.0 / s;
  }
  for (auto& smp : p.samples) smp.weight /= total;
  return p;
}

void IntensityProfile::validate() const {
  if (samples.empty()) throw InvalidArgument("intensity profile: no samples");
  double total = 0.0;
  for (const auto& s : samples) {
    if (!(s.scale > 0.0 && s.scale <= 1.0))
      throw InvalidArgument(fmt::format("intensity profile: scale {} outside (0, 1]", s.scale));
    if (!(s.weight > 0.0)) throw InvalidArgument("intensity profile: weights must be positive");
    total += s.weight;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw InvalidArgument(fmt::format("intensity profile: weights sum to {}, not 1", total));
}

}  // namespace rotex
