#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "rotex/rotor.hpp"
#include "rotex/trains.hpp"

namespace rotex {

struct ThermalSpec {
  double temperature = 294.0;      // K
  double population_cutoff = 1e-3; // relative to the largest (J, M) weight

  void validate() const;
};

struct ThermalWeight {
  int J;
  int M;
  double weight;
};

/// Boltzmann weights per (J, M) for allowed J <= J_max, uniform in M. Pairs
/// below population_cutoff times the largest pair weight are dropped and the
/// rest renormalized.
std::vector<ThermalWeight> thermal_weights(const MoleculeSpec& mol, const ThermalSpec& spec, int J_max);

/// Largest J whose (J, M) weight can pass the cutoff.
int thermal_j_limit(const MoleculeSpec& mol, const ThermalSpec& spec);

/// Every (|M|, parity) block needed by an ensemble, with its kick
/// factorization and level energies. Immutable after construction, shared by
/// all states built on it.
class RotorBasis {
 public:
  struct Entry {
    BasisBlock block;
    std::shared_ptr<const KickFactor> kick;
    std::vector<double> energies;  // cm^-1, aligned with block.J_list
    std::vector<double> coupling;  // <J|cos^2|J+2>, aligned with J_list (size n-1)
    std::vector<double> diagonal;  // <J|cos^2|J>
  };

  RotorBasis(MoleculeSpec mol, int J_max, const std::vector<std::pair<int, int>>& keys);

  const Entry& entry(int M, int parity_bit) const;
  int J_max() const { return J_max_; }
  const MoleculeSpec& molecule() const { return mol_; }
  std::vector<std::pair<int, int>> keys() const;

 private:
  MoleculeSpec mol_;
  int J_max_;
  std::map<std::pair<int, int>, Entry> entries_;  // keyed by (|M|, parity bit)
};

struct Member {
  double weight;
  int J0;
  int M;
  std::vector<cplx> amp;  // aligned with the block's J_list
};

struct EnsembleState {
  std::shared_ptr<const RotorBasis> basis;
  std::vector<Member> members;
  double time = 0.0;  // s

  const RotorBasis::Entry& entry_of(const Member& m) const {
    return basis->entry(m.M, m.J0 % 2);
  }
  const MoleculeSpec& molecule() const { return basis->molecule(); }
  double total_population() const;
};

/// One member per retained (J0, M), each in its basis state. J_max <= 0 picks
/// the thermal limit plus a margin.
EnsembleState init_ensemble(const MoleculeSpec& mol, const ThermalSpec& spec, int J_max = 0);

/// Same members embedded in a basis with a different truncation. Amplitudes
/// above the new J_max are discarded.
EnsembleState with_j_max(const EnsembleState& ens, int J_max);

/// Free evolution of every member to absolute time t.
EnsembleState propagate_free(const EnsembleState& ens, double t);

struct EvolveOptions {
  int threads = 1;
  bool record_each_pulse = true;
  bool auto_truncation = true;
  double truncation_tolerance = 1e-8;  // allowed population in the top two J levels
  int j_max_limit = 480;
};

struct Trajectory {
  std::vector<EnsembleState> after_pulse;  // empty unless record_each_pulse
  EnsembleState final_state;
  int J_max = 0;
  int truncation_retries = 0;

  /// Ensemble at absolute time t: latest pulse <= t, then free evolution.
  /// Requires record_each_pulse.
  EnsembleState state_at(double t, const EnsembleState& initial) const;
};

/// Alternates free evolution over the gaps and impulsive kicks. Member
/// weights are untouched. With auto_truncation the basis grows until the top
/// two J levels of every member stay below truncation_tolerance after every
/// kick.
Trajectory evolve_ensemble(const EnsembleState& ens, const PulseTrain& train, const EvolveOptions& opts = {});

/// Focal-volume sampling of the pump intensity: every kick strength in the
/// train is multiplied by `scale`, results are combined with `weight`.
struct IntensitySample {
  double scale;
  double weight;
};

struct IntensityProfile {
  enum class Kind { delta, gaussian_beam };
  Kind kind = Kind::delta;
  std::vector<IntensitySample> samples{{1.0, 1.0}};

  static IntensityProfile delta();
  /// n scales uniform on [s_min, 1], weights proportional to 1/s.
  static IntensityProfile gaussian_beam(int n = 12, double s_min = 0.2);
  void validate() const;
};

/// Runs `run(scale)` once per sample and returns the weighted sum. T needs
/// `void accumulate(const T&, double weight)` and must be default
/// constructible as the zero element.
template <class T, class Run>
T intensity_average(const IntensityProfile& profile, Run&& run) {
  profile.validate();
  T acc{};
  for (const IntensitySample& s : profile.samples) acc.accumulate(run(s.scale), s.weight);
  return acc;
}

}  // namespace rotex
