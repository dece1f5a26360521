#include <doctest.h>

#include <cmath>

#include "rotex/constants.hpp"
#include "rotex/error.hpp"
#include "rotex/mpm.hpp"
#include "rotex/scenario.hpp"

using namespace rotex;

namespace {

PhaseTrace sampled(const ProbeWindow& w, double (*f)(double)) {
  PhaseTrace tr{w.t0, w.dt, std::vector<double>(w.n)};
  for (std::size_t k = 0; k < w.n; ++k) tr.phi[k] = f(w.t0 + static_cast<double>(k) * w.dt);
  return tr;
}

double centroid_cm(const ProbeSpectrum& s) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.intensity.size(); ++i) {
    num += s.intensity[i] * s.offset_cm[i];
    den += s.intensity[i];
  }
  return num / den;
}

}  // namespace

TEST_CASE("flat probe with sinusoidal phase gives Bessel sidebands") {
  ProbeGrid grid;
  ProbePulse p;
  p.shape = ProbePulse::Shape::flat;
  p.fwhm = 512 * grid.dt;  // 16 periods of 32 samples
  const ProbeWindow w = probe_window(p, grid);
  CHECK(w.n == 512);
  const double phi0 = 2.4;
  PhaseTrace tr{w.t0, w.dt, std::vector<double>(w.n)};
  const double omega = 2.0 * phys::pi / (32 * grid.dt);
  for (std::size_t k = 0; k < w.n; ++k) tr.phi[k] = phi0 * std::sin(omega * static_cast<double>(k) * w.dt);
  const ProbeSpectrum s = modulated_probe_spectrum(p, tr, grid);
  const double norm = std::pow(static_cast<double>(w.n) * w.dt, 2);
  const double line = omega / (2.0 * phys::pi) / phys::c_cm;
  for (int m = -4; m <= 4; ++m) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.offset_cm.size(); ++i)
      if (std::abs(s.offset_cm[i] - m * line) < std::abs(s.offset_cm[best] - m * line)) best = i;
    CHECK(s.intensity[best] / norm == doctest::Approx(std::pow(std::cyl_bessel_j(std::abs(m), phi0), 2)).epsilon(1e-9));
  }
}

TEST_CASE("phase modulation conserves energy and rising phase shifts to the red") {
  const ProbePulse p;
  const ProbeWindow w = probe_window(p);
  const ProbeSpectrum tl = transform_limited_spectrum(p);
  const ProbeSpectrum up = modulated_probe_spectrum(p, sampled(w, [](double t) { return 3e13 * t; }));
  const ProbeSpectrum down = modulated_probe_spectrum(p, sampled(w, [](double t) { return -3e13 * t; }));
  CHECK(up.energy() == doctest::Approx(tl.energy()).epsilon(1e-10));
  CHECK(std::abs(centroid_cm(tl)) < 1e-6);
  const double expected = -3e13 / (2.0 * phys::pi) / phys::c_cm;
  CHECK(centroid_cm(up) == doctest::Approx(expected).epsilon(1e-3));
  CHECK(centroid_cm(down) == doctest::Approx(-expected).epsilon(1e-3));
  // Pure time reversal of a symmetric phase leaves the spectrum mirrored.
  const ProbeSpectrum q = modulated_probe_spectrum(p, sampled(w, [](double t) { return 2.0 * std::cos(4e13 * t); }));
  CHECK(std::abs(centroid_cm(q)) < 1e-6 * std::abs(expected));
}

TEST_CASE("transform-limited width matches the time-bandwidth product") {
  ProbePulse p;
  p.fwhm = 120e-15;
  const SpectralWidth sw = spectral_width(transform_limited_spectrum(p));
  const double dnu = 4.0 * std::log(2.0) / (2.0 * phys::pi * p.fwhm);  // Hz, Gaussian intensity
  const double dlambda = p.center_wavelength_nm * p.center_wavelength_nm * 1e-9 * dnu / phys::c_si;
  CHECK(sw.fwhm_nm == doctest::Approx(dlambda).epsilon(2e-3));
}

TEST_CASE("driven broadening is grid independent") {
  Scenario sc;
  const Simulator sim(sc);
  const double Tr = sc.molecule.revival_time();
  const PulseTrain train = periodic_train(3, Tr, 4.0);
  EvolveOptions o;
  const Trajectory traj = evolve_ensemble(sim.initial(), train, o);
  ProbePulse p;
  p.delay = 3.0 * Tr + 0.05e-12;
  const MediumSpec m;
  ProbeGrid fine;
  fine.dt = 1e-15;
  fine.zero_pad = 8;
  const double a = spectral_width(driven_probe_spectrum(sim.initial(), traj, p, m)).fwhm_nm;
  const double b = spectral_width(driven_probe_spectrum(sim.initial(), traj, p, m, fine)).fwhm_nm;
  CHECK(a > 1.5 * spectral_width(transform_limited_spectrum(p)).fwhm_nm);
  CHECK(a == doctest::Approx(b).epsilon(0.01));
}

TEST_CASE("phase trace guards") {
  CHECK_THROWS_AS(phase_trace({0.3, 0.4}, 0.0, 10e-15, MediumSpec{}), InvalidArgument);
  const PhaseTrace t = phase_trace({1.0 / 3.0, 1.0}, 0.0, 1e-15, MediumSpec{3.0, 2.0});
  CHECK(t.phi[0] == doctest::Approx(0.0));
  CHECK(t.phi[1] == doctest::Approx(6.0 * 2.0 / 3.0));
  CHECK(t.at(0.5e-15) == doctest::Approx(2.0));
  ProbePulse p;
  const PhaseTrace shortt = phase_trace({0.3, 0.3}, 0.0, 1e-15, MediumSpec{});
  CHECK_THROWS_AS(modulated_probe_spectrum(p, shortt), InvalidArgument);
}

TEST_CASE("cascade report counts bands at multiples of the shift") {
  // Synthetic comb: lines at m * 50 cm^-1 with decreasing heights.
  ProbeSpectrum s;
  s.center_wavelength_nm = 400.0;
  s.d_offset_cm = 0.5;
  for (int i = -1000; i <= 1000; ++i) {
    const double x = i * s.d_offset_cm;
    double v = 0.0;
    for (int m = -3; m <= 3; ++m) v += std::exp(-std::abs(m)) * std::exp(-std::pow((x - 50.0 * m) / 2.0, 2));
    s.offset_cm.push_back(x);
    s.intensity.push_back(v);
  }
  const CascadeReport r = cascade_report(s, 0.01, 50.0);
  CHECK(r.peak_count == 7);
  CHECK(r.mean_spacing_cm == doctest::Approx(50.0).epsilon(1e-3));
  CHECK(r.band_by_order.at(1) > r.band_by_order.at(2));
  CHECK(thermal_peak_j(MoleculeSpec{}, ThermalSpec{}) == 7);
}
