#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "rotex/ensemble.hpp"

namespace rotex {

/// Broadband probe for phase-modulation spectra.
struct ProbePulse {
  enum class Shape { gaussian, flat };
  double center_wavelength_nm = 400.8;
  double fwhm = 120e-15;  // s; full duration for the flat shape
  double delay = 0.0;     // s, probe center relative to the first train pulse
  Shape shape = Shape::gaussian;

  void validate() const;
};

struct MediumSpec {
  double phi0_per_atm = 58.0;  // rad/atm
  double pressure = 1.0;      // atm

  double phi0() const { return phi0_per_atm * pressure; }
  void validate() const;
};

/// Sampled phase phi(t_0 + k dt).
struct PhaseTrace {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> phi;

  double t_end() const { return t0 + dt * static_cast<double>(phi.empty() ? 0 : phi.size() - 1); }
  /// Linear interpolation; t must lie inside the sampled span.
  double at(double t) const;
};

inline constexpr double kMaxPhaseStep = 5e-15;

/// phi = phi0 (a - 1/3). Rejects dt > kMaxPhaseStep.
PhaseTrace phase_trace(const std::vector<double>& alignment, double t0, double dt, const MediumSpec& medium);

/// Alignment of a driven ensemble on a uniform grid, switching to the state
/// after each kick as the grid crosses it. Requires a trajectory recorded
/// pulse by pulse.
std::vector<double> driven_alignment(const Trajectory& traj, const EnsembleState& initial, double t0, double dt,
                                     std::size_t n);

struct ProbeGrid {
  double dt = 2e-15;
  double window_fwhm = 10.0;  // half-window in probe FWHMs (gaussian shape)
  int zero_pad = 4;
};

/// Time samples used by modulated_probe_spectrum for this probe.
struct ProbeWindow {
  double t0;
  double dt;
  std::size_t n;
};
ProbeWindow probe_window(const ProbePulse& probe, const ProbeGrid& grid = {});

struct ProbeSpectrum {
  double center_wavelength_nm = 0.0;
  std::vector<double> offset_cm;   // ascending wavenumber offset from the carrier
  std::vector<double> intensity;   // |E(nu)|^2, arbitrary units
  double d_offset_cm = 0.0;

  std::vector<double> wavelength_nm() const;
  /// sum(intensity) * d_offset
  double energy() const;
};

/// |FFT|^2 of the probe envelope times exp(i phi). Positive dphi/dt shifts
/// the spectrum to the red (negative offset).
ProbeSpectrum modulated_probe_spectrum(const ProbePulse& probe, const PhaseTrace& phi, const ProbeGrid& grid = {});

/// Spectrum of the unmodulated probe.
ProbeSpectrum transform_limited_spectrum(const ProbePulse& probe, const ProbeGrid& grid = {});

struct SpectralWidth {
  double fwhm_nm = 0.0;      // between the outermost half-maximum crossings
  double centroid_nm = 0.0;  // intensity-weighted mean wavelength minus center
};
SpectralWidth spectral_width(const ProbeSpectrum& s);

struct CascadeReport {
  int peak_count = 0;
  double delta_cm = 0.0;             // order unit
  std::map<int, double> band;        // signed order -> integrated intensity
  std::map<int, double> band_by_order;  // |order| -> both sides combined
  double mean_spacing_cm = 0.0;      // regression of band centroids on order
};

/// Local maxima >= threshold * max; bands of width delta around m * delta.
CascadeReport cascade_report(const ProbeSpectrum& s, double threshold, double delta_cm);

/// Raman shift of the most populated J in the thermal distribution.
double thermal_peak_shift(const MoleculeSpec& mol, const ThermalSpec& thermal);
int thermal_peak_j(const MoleculeSpec& mol, const ThermalSpec& thermal);

struct BroadeningRow {
  double delay;  // s
  double fwhm_nm;
  double centroid_nm;
};

/// Probe spectrum at each delay, driven by the alignment of the ensemble
/// under `train`. Delays are independent and evaluated in parallel.
std::vector<BroadeningRow> broadening_scan(const EnsembleState& initial, const PulseTrain& train,
                                           const ProbePulse& probe, const MediumSpec& medium,
                                           const std::vector<double>& delays, int threads = 1,
                                           const ProbeGrid& grid = {});

/// Probe spectrum of one delay (same construction as broadening_scan).
ProbeSpectrum driven_probe_spectrum(const EnsembleState& initial, const Trajectory& traj, const ProbePulse& probe,
                                    const MediumSpec& medium, const ProbeGrid& grid = {});

void write_probe_spectrum_csv(std::ostream& os, const ProbeSpectrum& s);
void write_broadening_csv(std::ostream& os, const std::vector<BroadeningRow>& rows);

}  // namespace rotex
