#include "rotex/scenario.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "rotex/error.hpp"
#include "rotex/parallel.hpp"

namespace rotex {

Simulator::Simulator(Scenario scenario) : scenario_(std::move(scenario)) {
  scenario_.molecule.validate();
  scenario_.profile.validate();
  scenario_.probe.validate();
  initial_ = init_ensemble(scenario_.molecule, scenario_.thermal);
}

Trajectory Simulator::run(const PulseTrain& train, double scale, int threads, bool record_each_pulse) const {
  EvolveOptions opts;
  opts.threads = threads;
  opts.record_each_pulse = record_each_pulse;
  opts.truncation_tolerance = scenario_.truncation_tolerance;
  return evolve_ensemble(initial_, scale == 1.0 ? train : train.scaled(scale), opts);
}

Observables Simulator::single(const PulseTrain& train, double scale, int threads) const {
  return observe(run(train, scale, threads, false).final_state, scenario_.weighting);
}

Observables Simulator::averaged(const PulseTrain& train, int threads) const {
  return intensity_average<Observables>(scenario_.profile,
                                        [&](double s) { return single(train, s, threads); });
}

std::vector<Observables> Simulator::per_pulse_single(const PulseTrain& train, double scale, int threads) const {
  const Trajectory traj = run(train, scale, threads, true);
  std::vector<Observables> out;
  out.reserve(traj.after_pulse.size());
  for (const EnsembleState& s : traj.after_pulse) out.push_back(observe(s, scenario_.weighting));
  return out;
}

std::vector<Observables> Simulator::per_pulse(const PulseTrain& train, int threads) const {
  scenario_.profile.validate();
  std::vector<Observables> acc(train.size());
  for (const IntensitySample& smp : scenario_.profile.samples) {
    const auto one = per_pulse_single(train, smp.scale, threads);
    for (std::size_t i = 0; i < one.size(); ++i) acc[i].accumulate(one[i], smp.weight);
  }
  return acc;
}

SpectrogramGrid spectrogram(const Simulator& sim, const std::string& parameter, std::span<const double> scan,
                            const std::function<PulseTrain(double)>& make_train, int threads, double step_nm) {
  for (std::size_t i = 1; i < scan.size(); ++i)
    if (!(scan[i] > scan[i - 1])) throw InvalidArgument("spectrogram: scan axis must be strictly ascending");
  SpectrogramGrid g;
  g.parameter = parameter;
  g.scan.assign(scan.begin(), scan.end());
  g.coherence_sq.resize(scan.size());
  parallel_for(scan.size(), threads, [&](std::size_t i) {
    g.coherence_sq[i] = sim.averaged(make_train(scan[i]), 1).coherence_sq;
  });

  // Common wavelength axis sized from the widest column.
  const ProbeSpec& probe = sim.scenario().probe;
  const MoleculeSpec& mol = sim.scenario().molecule;
  double reach = 0.0;
  for (const auto& col : g.coherence_sq) {
    const RamanSpectrum s = synth_spectrum(col, probe, mol, step_nm);
    if (!s.shift_nm.empty()) reach = std::max({reach, std::abs(s.shift_nm.front()), std::abs(s.shift_nm.back())});
  }
  g.intensity.resize(scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const RamanSpectrum s = synth_spectrum(g.coherence_sq[i], probe, mol, step_nm, reach);
    if (i == 0) g.shift_nm = s.shift_nm;
    g.intensity[i] = s.intensity;
  }
  return g;
}

}  // namespace rotex
