#include "rotex/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "rotex/constants.hpp"
#include "rotex/csv.hpp"
#include "rotex/error.hpp"

namespace rotex {

std::string to_string(ProbeSide s) {
  switch (s) {
    case ProbeSide::stokes: return "stokes";
    case ProbeSide::antistokes: return "antistokes";
    case ProbeSide::both: return "both";
  }
  return "?";
}

ProbeSide probe_side_from_string(const std::string& s) {
  if (s == "stokes") return ProbeSide::stokes;
  if (s == "antistokes") return ProbeSide::antistokes;
  if (s == "both") return ProbeSide::both;
  throw InvalidArgument(fmt::format("unknown probe side '{}' (expected stokes, antistokes or both)", s));
}

void ProbeSpec::validate() const {
  if (!(center_wavelength_nm > 0.0) || !(fwhm_wavelength_nm > 0.0))
    throw InvalidArgument("probe: wavelength and width must be positive");
}

double wavelength_shift_of(int J, const ProbeSpec& probe, const MoleculeSpec& mol) {
  const double lambda_cm = probe.center_wavelength_nm * 1e-7;
  const double shift_nm = lambda_cm * lambda_cm * raman_shift(J, mol) * 1e7;
  return probe.side == ProbeSide::antistokes ? -shift_nm : shift_nm;
}

double line_area(const ProbeSpec& probe) {
  return probe.fwhm_wavelength_nm * std::sqrt(phys::pi / (4.0 * std::log(2.0)));
}

RamanSpectrum synth_spectrum(std::span<const double> coherence_sq, const ProbeSpec& probe,
                             const MoleculeSpec& mol, double step_nm, double max_shift_nm) {
  probe.validate();
  if (!(step_nm > 0.0)) throw InvalidArgument("synth_spectrum: step must be positive");
  ProbeSpec stokes = probe;
  stokes.side = ProbeSide::stokes;

  double peak = 0.0;
  for (double v : coherence_sq) peak = std::max(peak, v);
  struct Line {
    int J;
    double center;
    double height;
  };
  std::vector<Line> lines;
  double extent = 0.0;
  for (std::size_t J = 0; J < coherence_sq.size(); ++J) {
    if (!parity_allows(mol.parity, static_cast<int>(J))) continue;
    const double c = wavelength_shift_of(static_cast<int>(J), stokes, mol);
    lines.push_back({static_cast<int>(J), c, coherence_sq[J]});
    if (coherence_sq[J] > 1e-14 * peak) extent = std::max(extent, c);
  }
  const double width = probe.fwhm_wavelength_nm;
  const double reach = max_shift_nm > 0.0 ? max_shift_nm : extent + 4.0 * width;
  const auto K = static_cast<long>(std::ceil(reach / step_nm));

  RamanSpectrum s;
  const long lo = probe.side == ProbeSide::stokes ? 0 : -K;
  const long hi = probe.side == ProbeSide::antistokes ? 0 : K;
  const double inv_two_sigma2 = 4.0 * std::log(2.0) / (width * width);
  for (long k = lo; k <= hi; ++k) {
    const double x = static_cast<double>(k) * step_nm;
    const double ax = std::abs(x);
    double v = 0.0;
    int nearest = -1;
    double best = INFINITY;
    for (const Line& l : lines) {
      const double d = ax - l.center;
      if (l.height > 0.0) v += l.height * std::exp(-inv_two_sigma2 * d * d);
      if (std::abs(d) < best) {
        best = std::abs(d);
        nearest = l.J;
      }
    }
    s.shift_nm.push_back(x);
    s.intensity.push_back(v);
    s.nearest_J.push_back(nearest);
  }
  return s;
}

RamanSpectrum synth_spectrum(const CoherenceVector& cv, const ProbeSpec& probe, const MoleculeSpec& mol,
                             double step_nm, double max_shift_nm) {
  std::vector<double> sq(cv.rho.size());
  for (std::size_t J = 0; J < sq.size(); ++J) sq[J] = std::norm(cv.rho[J]);
  return synth_spectrum(sq, probe, mol, step_nm, max_shift_nm);
}

void write_spectrum_csv(std::ostream& os, const RamanSpectrum& s) {
  os << "wavelength_shift_nm,intensity,nearest_J\n";
  for (std::size_t i = 0; i < s.shift_nm.size(); ++i)
    os << csv::num(s.shift_nm[i]) << ',' << csv::num(s.intensity[i]) << ',' << s.nearest_J[i] << '\n';
}

void write_spectrogram_csv(std::ostream& os, const SpectrogramGrid& g) {
  os << "scan_ps\\shift_nm";
  for (double x : g.shift_nm) os << ',' << csv::num(x);
  os << '\n';
  for (std::size_t r = 0; r < g.scan.size(); ++r) {
    os << csv::num(g.scan[r] / phys::ps);
    for (double v : g.intensity[r]) os << ',' << csv::num(v);
    os << '\n';
  }
}

}  // namespace rotex
