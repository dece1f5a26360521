#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rotex/ensemble.hpp"
#include "rotex/observables.hpp"
#include "rotex/spectrum.hpp"

namespace rotex {

/// Everything except the pulse train that defines a simulated measurement.
struct Scenario {
  MoleculeSpec molecule;
  ThermalSpec thermal;
  IntensityProfile profile;
  ProbeSpec probe;
  MWeighting weighting = MWeighting::coupling;
  double truncation_tolerance = 1e-8;
  int threads = 1;
};

/// Thermal ensemble built once, then evolved under any number of trains.
/// Const member functions are safe to call concurrently.
class Simulator {
 public:
  explicit Simulator(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  const EnsembleState& initial() const { return initial_; }

  /// Trajectory at one intensity scale.
  Trajectory run(const PulseTrain& train, double scale, int threads, bool record_each_pulse) const;

  /// Observables right after the last pulse at one intensity scale.
  Observables single(const PulseTrain& train, double scale, int threads) const;

  /// Observables right after the last pulse, averaged over the intensity
  /// profile (squared magnitudes and populations, never amplitudes).
  Observables averaged(const PulseTrain& train, int threads) const;

  /// Observables after each pulse, averaged over the profile.
  std::vector<Observables> per_pulse(const PulseTrain& train, int threads) const;

  /// Same, at a single intensity scale.
  std::vector<Observables> per_pulse_single(const PulseTrain& train, double scale, int threads) const;

 private:
  Scenario scenario_;
  EnsembleState initial_;
};

/// One synthesized Raman spectrum per scan value. Columns are independent
/// and computed in parallel; assembly is in scan order.
SpectrogramGrid spectrogram(const Simulator& sim, const std::string& parameter, std::span<const double> scan,
                            const std::function<PulseTrain(double)>& make_train, int threads,
                            double step_nm = 0.01);

}  // namespace rotex
