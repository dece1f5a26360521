#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rotex/molecule.hpp"
#include "rotex/observables.hpp"

namespace rotex {

enum class ProbeSide { stokes, antistokes, both };

std::string to_string(ProbeSide s);
ProbeSide probe_side_from_string(const std::string& s);

/// Narrowband probe used for state-resolved Raman detection.
struct ProbeSpec {
  double center_wavelength_nm = 400.8;
  double fwhm_wavelength_nm = 0.15;
  ProbeSide side = ProbeSide::stokes;

  void validate() const;
};

/// lambda0^2 * raman_shift(J), in nm. Positive (red) for Stokes, negative for
/// anti-Stokes; `both` reports the Stokes sign.
double wavelength_shift_of(int J, const ProbeSpec& probe, const MoleculeSpec& mol);

struct RamanSpectrum {
  std::vector<double> shift_nm;   // ascending, uniform
  std::vector<double> intensity;  // >= 0, arbitrary units
  std::vector<int> nearest_J;     // line closest to each grid point

  double step() const { return shift_nm.size() > 1 ? shift_nm[1] - shift_nm[0] : 0.0; }
};

/// Sum of Gaussian lines of height |rho_J|^2 and FWHM probe.fwhm_wavelength
/// at wavelength_shift_of(J). `max_shift_nm <= 0` sizes the grid from the
/// highest line present.
RamanSpectrum synth_spectrum(std::span<const double> coherence_sq, const ProbeSpec& probe,
                             const MoleculeSpec& mol, double step_nm = 0.01, double max_shift_nm = 0.0);
RamanSpectrum synth_spectrum(const CoherenceVector& cv, const ProbeSpec& probe, const MoleculeSpec& mol,
                             double step_nm = 0.01, double max_shift_nm = 0.0);

/// Area of one line of unit height.
double line_area(const ProbeSpec& probe);

/// Raman spectra stacked over a scanned train parameter.
struct SpectrogramGrid {
  std::string parameter;                         // e.g. "period", "T1"
  std::vector<double> scan;                      // s, ascending
  std::vector<double> shift_nm;                  // ascending
  std::vector<std::vector<double>> intensity;    // [scan][shift]
  std::vector<std::vector<double>> coherence_sq; // [scan][J]
};

void write_spectrum_csv(std::ostream& os, const RamanSpectrum& s);
/// First row: "scan_ps\\shift_nm" then the shift axis; each following row
/// starts with the scan value in ps.
void write_spectrogram_csv(std::ostream& os, const SpectrogramGrid& g);

}  // namespace rotex
