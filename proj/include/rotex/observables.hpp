#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rotex/ensemble.hpp"

namespace rotex {

/// How members with different M combine into one coherence per J.
enum class MWeighting {
  coupling,    // each member's c_J* c_{J+2} scaled by <J,M|cos^2|J+2,M>
  unweighted,  // plain weighted sum of c_J* c_{J+2}
};

/// Ensemble-aggregated rho_{J,J+2}, indexed by J (entries at disallowed J
/// stay zero).
struct CoherenceVector {
  std::vector<cplx> rho;
  double time = 0.0;

  double magnitude_squared(int J) const;
  int size() const { return static_cast<int>(rho.size()); }
};

CoherenceVector coherences(const EnsembleState& ens, MWeighting weighting = MWeighting::coupling);

/// Same aggregation computed from rho_{J+2,J} = c_{J+2}* c_J and conjugated;
/// equal to `coherences` for a Hermitian density matrix.
CoherenceVector coherences_from_lower(const EnsembleState& ens, MWeighting weighting = MWeighting::coupling);

/// Sum of |rho_J|^2 over J >= J_min (all J when absent).
double integrated_coherence(const CoherenceVector& cv, std::optional<int> J_min = std::nullopt);
double integrated_coherence(std::span<const double> coherence_sq, std::optional<int> J_min = std::nullopt);

/// <cos^2 theta> over the ensemble.
double alignment(const EnsembleState& ens);

/// Population per J (summed over members and M), indexed by J.
std::vector<double> populations(const EnsembleState& ens);

struct AngularMomentumStats {
  double mean_J = 0.0;
  int max_populated_J = 0;  // largest J with population >= threshold * max
};

AngularMomentumStats angular_momentum_stats(const EnsembleState& ens, double threshold = 0.05);

/// Largest index whose value is >= threshold * max(values); -1 if all zero.
int highest_above(std::span<const double> values, double threshold);

/// Alignment at arbitrary times after the ensemble's time, from the
/// populations and coherences (no further kicks). Uses the phasor kernel on
/// uniform grids.
std::vector<double> alignment_trace(const EnsembleState& ens, double t0, double dt, std::size_t n);

/// Intensity-combinable observables of one run: squared coherence
/// magnitudes and populations per J, alignment and mean J.
struct Observables {
  std::vector<double> coherence_sq;
  std::vector<double> population;
  double alignment = 0.0;
  double mean_J = 0.0;

  void accumulate(const Observables& o, double weight);
  /// Largest J with |rho_J|^2 >= threshold * max_J |rho_J|^2.
  int raman_reach(double threshold = 0.05) const { return highest_above(coherence_sq, threshold); }
  int max_populated_J(double threshold = 0.05) const { return highest_above(population, threshold); }
};

Observables observe(const EnsembleState& ens, MWeighting weighting = MWeighting::coupling);

}  // namespace rotex
