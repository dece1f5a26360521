#pragma once

#include <cstddef>

#include "rotex/rotor.hpp"

namespace rotex {

/// Gaussian intensity envelope I(t) = I0 exp(-4 ln2 (t - t_c)^2 / fwhm^2).
struct PulseEnvelope {
  double fwhm = 100e-15;        // s, intensity FWHM
  double peak_intensity = 0.0;  // W/cm^2
  double center_time = 0.0;     // s

  void validate() const;
  /// Square of the field envelope at t, V^2/m^2 (linear polarization).
  double field_squared(double t) const;
  /// Time integral of field_squared, V^2 s / m^2.
  double field_squared_integral() const;
};

/// Instantaneous coupling delta_alpha E^2(t) / (4 hbar), in rad/s. Its time
/// integral over the pulse is the kick strength.
double coupling_rate(const PulseEnvelope& pulse, const MoleculeSpec& mol, double t);

/// Kick strength of a Gaussian envelope, delta_alpha/(4 hbar) int E^2 dt.
double envelope_kick_strength(const PulseEnvelope& pulse, const MoleculeSpec& mol);

/// Peak intensity (W/cm^2) giving kick strength P at the given FWHM.
double intensity_for_kick_strength(double P, double fwhm, const MoleculeSpec& mol);

struct TdseOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  double half_window_fwhm = 6.0;  // integration span is center +- this many FWHM
  double min_step = 1e-24;        // s; smaller steps are reported as failure
  std::size_t max_steps = 2'000'000;
};

struct TdseResult {
  RotorBlockState state;
  double t_start = 0.0;
  double t_end = 0.0;
  double coupling_integral = 0.0;  // integral of coupling_rate over the span
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Integrates i d/dt c = [2 pi c E_J - kappa(t) cos^2 theta] c from
/// center - w to center + w with an embedded Dormand-Prince 5(4) pair in the
/// interaction picture of the field-free Hamiltonian. The input state is
/// taken at t_start. Used to validate the impulsive kick, not for production.
TdseResult tdse_reference_propagate(const RotorBlockState& state, const PulseEnvelope& pulse,
                                    const MoleculeSpec& mol, const TdseOptions& opts = {});

}  // namespace rotex
