#include "rotex/mpm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fftw3.h>
#include <fmt/format.h>
#include <mutex>
#include <ostream>

#include "rotex/constants.hpp"
#include "rotex/csv.hpp"
#include "rotex/error.hpp"
#include "rotex/observables.hpp"
#include "rotex/parallel.hpp"

namespace rotex {

void ProbePulse::validate() const {
  if (!(center_wavelength_nm > 0.0)) throw InvalidArgument("probe pulse: center wavelength must be positive");
  if (!(fwhm > 0.0)) throw InvalidArgument("probe pulse: width must be positive");
  if (!std::isfinite(delay)) throw InvalidArgument("probe pulse: delay must be finite");
}

void MediumSpec::validate() const {
  if (!(phi0_per_atm >= 0.0) || !std::isfinite(phi0_per_atm))
    throw InvalidArgument("medium: phi0_per_atm must be finite and >= 0");
  if (!(pressure >= 0.0) || !std::isfinite(pressure)) throw InvalidArgument("medium: pressure must be finite and >= 0");
}

double PhaseTrace::at(double t) const {
  if (phi.empty()) throw InvalidArgument("phase trace is empty");
  const double x = (t - t0) / dt;
  const double last = static_cast<double>(phi.size() - 1);
  // A millionth of a step of slack absorbs grid rounding.
  if (x < -1e-6 || x > last + 1e-6)
    throw InvalidArgument(fmt::format("phase trace: t = {} s outside sampled span [{}, {}]", t, t0, t_end()));
  const double xc = std::clamp(x, 0.0, last);
  const auto i = std::min(static_cast<std::size_t>(xc), phi.size() - 1);
  if (i + 1 >= phi.size()) return phi.back();
  const double f = xc - static_cast<double>(i);
  return phi[i] + f * (phi[i + 1] - phi[i]);
}

PhaseTrace phase_trace(const std::vector<double>& alignment, double t0, double dt, const MediumSpec& medium) {
  medium.validate();
  if (!(dt > 0.0)) throw InvalidArgument("phase trace: step must be positive");
  if (dt > kMaxPhaseStep * (1.0 + 1e-12))
    throw InvalidArgument(fmt::format("phase trace: step {} fs exceeds {} fs", dt / phys::fs, kMaxPhaseStep / phys::fs));
  PhaseTrace p{t0, dt, std::vector<double>(alignment.size())};
  const double phi0 = medium.phi0();
  for (std::size_t i = 0; i < alignment.size(); ++i) p.phi[i] = phi0 * (alignment[i] - 1.0 / 3.0);
  return p;
}

std::vector<double> driven_alignment(const Trajectory& traj, const EnsembleState& initial, double t0, double dt,
                                     std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  std::size_t k = 0;
  while (k < n) {
    const double t = t0 + static_cast<double>(k) * dt;
    // Latest recorded kick at or before t, and the next one after it.
    std::size_t i = 0;
    while (i < traj.after_pulse.size() && traj.after_pulse[i].time <= t) ++i;
    const EnsembleState& s = i == 0 ? initial : traj.after_pulse[i - 1];
    std::size_t end = n;
    if (i < traj.after_pulse.size()) {
      const double next = traj.after_pulse[i].time;
      end = std::min(n, static_cast<std::size_t>(std::max(0.0, std::ceil((next - t0) / dt))));
      // Grid points landing exactly on the kick belong to the next segment.
      while (end > k && t0 + static_cast<double>(end - 1) * dt >= next) --end;
      end = std::max(end, k + 1);
    }
    const std::vector<double> seg = alignment_trace(s, t, dt, end - k);
    out.insert(out.end(), seg.begin(), seg.end());
    k = end;
  }
  return out;
}

ProbeWindow probe_window(const ProbePulse& probe, const ProbeGrid& grid) {
  probe.validate();
  if (!(grid.dt > 0.0) || !(grid.window_fwhm > 0.0) || grid.zero_pad < 1)
    throw InvalidArgument("probe grid: need dt > 0, window > 0, zero_pad >= 1");
  if (probe.shape == ProbePulse::Shape::flat) {
    const auto n = static_cast<std::size_t>(std::llround(probe.fwhm / grid.dt));
    if (n < 2) throw InvalidArgument("flat probe shorter than two samples");
    return {probe.delay - 0.5 * static_cast<double>(n) * grid.dt, grid.dt, n};
  }
  const double half = grid.window_fwhm * probe.fwhm;
  const auto m = static_cast<std::size_t>(std::ceil(half / grid.dt));
  return {probe.delay - static_cast<double>(m) * grid.dt, grid.dt, 2 * m + 1};
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double envelope(const ProbePulse& probe, double t) {
  if (probe.shape == ProbePulse::Shape::flat) return 1.0;
  const double x = (t - probe.delay) / probe.fwhm;
  // Intensity FWHM equals probe.fwhm.
  return std::exp(-2.0 * std::log(2.0) * x * x);
}

template <class PhaseAt>
ProbeSpectrum spectrum_impl(const ProbePulse& probe, const ProbeGrid& grid, PhaseAt&& phase_at) {
  const ProbeWindow w = probe_window(probe, grid);
  const std::size_t N = next_pow2(w.n) * static_cast<std::size_t>(grid.zero_pad);
  std::vector<std::complex<double>> in(N), out(N);
  for (std::size_t k = 0; k < w.n; ++k) {
    const double t = w.t0 + static_cast<double>(k) * w.dt;
    in[k] = std::polar(envelope(probe, t), phase_at(t));
  }
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    // exp(+i nu t) kernel: for a field E(t) exp(-i w0 t) the transform
    // index maps directly to the offset from w0.
    plan = fftw_plan_dft_1d(static_cast<int>(N), reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  ProbeSpectrum s;
  s.center_wavelength_nm = probe.center_wavelength_nm;
  const double dnu = 1.0 / (static_cast<double>(N) * w.dt);  // Hz
  s.d_offset_cm = dnu / phys::c_cm;
  s.offset_cm.resize(N);
  s.intensity.resize(N);
  const std::size_t half = N / 2;
  for (std::size_t i = 0; i < N; ++i) {
    // Reorder so that index 0 holds the most negative frequency.
    const std::size_t src = (i + half) % N;
    const double k = static_cast<double>(i) - static_cast<double>(half);
    s.offset_cm[i] = k * s.d_offset_cm;
    s.intensity[i] = std::norm(out[src]) * w.dt * w.dt;
  }
  return s;
}

}  // namespace

std::vector<double> ProbeSpectrum::wavelength_nm() const {
  const double sigma0 = 1e7 / center_wavelength_nm;
  std::vector<double> w(offset_cm.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1e7 / (sigma0 + offset_cm[i]);
  return w;
}

double ProbeSpectrum::energy() const {
  double e = 0.0;
  for (double v : intensity) e += v;
  return e * d_offset_cm;
}

ProbeSpectrum modulated_probe_spectrum(const ProbePulse& probe, const PhaseTrace& phi, const ProbeGrid& grid) {
  const ProbeWindow w = probe_window(probe, grid);
  const double t_last = w.t0 + static_cast<double>(w.n - 1) * w.dt;
  const double slack = 1e-6 * phi.dt;
  if (w.t0 < phi.t0 - slack || t_last > phi.t_end() + slack)
    throw InvalidArgument(fmt::format("probe window [{}, {}] s not inside the phase trace [{}, {}] s", w.t0, t_last,
                                      phi.t0, phi.t_end()));
  return spectrum_impl(probe, grid, [&](double t) { return phi.at(t); });
}

ProbeSpectrum transform_limited_spectrum(const ProbePulse& probe, const ProbeGrid& grid) {
  return spectrum_impl(probe, grid, [](double) { return 0.0; });
}

SpectralWidth spectral_width(const ProbeSpectrum& s) {
  SpectralWidth r;
  if (s.intensity.empty()) return r;
  const auto imax = static_cast<std::size_t>(std::max_element(s.intensity.begin(), s.intensity.end()) - s.intensity.begin());
  const double half = 0.5 * s.intensity[imax];
  if (!(half > 0.0)) return r;
  std::size_t lo = 0, hi = s.intensity.size() - 1;
  while (s.intensity[lo] < half) ++lo;
  while (s.intensity[hi] < half) --hi;
  // Interpolated crossings on the offset axis.
  auto cross = [&](std::size_t inside, std::size_t outside) {
    if (inside == outside) return s.offset_cm[inside];
    const double a = s.intensity[outside], b = s.intensity[inside];
    const double f = (half - a) / (b - a);
    return s.offset_cm[outside] + f * (s.offset_cm[inside] - s.offset_cm[outside]);
  };
  const double o_lo = cross(lo, lo == 0 ? 0 : lo - 1);
  const double o_hi = cross(hi, hi + 1 < s.intensity.size() ? hi + 1 : hi);
  const double sigma0 = 1e7 / s.center_wavelength_nm;
  r.fwhm_nm = 1e7 / (sigma0 + o_lo) - 1e7 / (sigma0 + o_hi);

  const std::vector<double> wl = s.wavelength_nm();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < wl.size(); ++i) {
    num += s.intensity[i] * wl[i];
    den += s.intensity[i];
  }
  r.centroid_nm = num / den - s.center_wavelength_nm;
  return r;
}

CascadeReport cascade_report(const ProbeSpectrum& s, double threshold, double delta_cm) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("cascade_report: threshold must be in (0, 1)");
  if (!(delta_cm > 0.0)) throw InvalidArgument("cascade_report: band unit must be positive");
  CascadeReport r;
  r.delta_cm = delta_cm;
  const auto& I = s.intensity;
  if (I.size() < 3) return r;
  const double top = *std::max_element(I.begin(), I.end());
  for (std::size_t i = 1; i + 1 < I.size(); ++i)
    if (I[i] >= threshold * top && I[i] > I[i - 1] && I[i] >= I[i + 1]) ++r.peak_count;

  std::map<int, double> centroid_num;
  for (std::size_t i = 0; i < I.size(); ++i) {
    const int m = static_cast<int>(std::lround(s.offset_cm[i] / delta_cm));
    r.band[m] += I[i] * s.d_offset_cm;
    centroid_num[m] += I[i] * s.d_offset_cm * s.offset_cm[i];
  }
  for (const auto& [m, v] : r.band) r.band_by_order[std::abs(m)] += v;

  // Least-squares slope of band centroid against order, over bands holding
  // at least threshold of the strongest band.
  double bmax = 0.0;
  for (const auto& [m, v] : r.band) bmax = std::max(bmax, v);
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [m, v] : r.band) {
    if (v < threshold * bmax) continue;
    const double x = m, y = centroid_num[m] / v;
    sw += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = sw * sxx - sx * sx;
  if (sw >= 2 && den > 0) r.mean_spacing_cm = (sw * sxy - sx * sy) / den;
  return r;
}

int thermal_peak_j(const MoleculeSpec& mol, const ThermalSpec& thermal) {
  const int J_max = thermal_j_limit(mol, thermal);
  std::vector<double> pop(static_cast<std::size_t>(J_max) + 1, 0.0);
  for (const ThermalWeight& w : thermal_weights(mol, thermal, J_max)) pop[static_cast<std::size_t>(w.J)] += w.weight;
  return static_cast<int>(std::max_element(pop.begin(), pop.end()) - pop.begin());
}

double thermal_peak_shift(const MoleculeSpec& mol, const ThermalSpec& thermal) {
  return raman_shift(thermal_peak_j(mol, thermal), mol);
}

ProbeSpectrum driven_probe_spectrum(const EnsembleState& initial, const Trajectory& traj, const ProbePulse& probe,
                                    const MediumSpec& medium, const ProbeGrid& grid) {
  const ProbeWindow w = probe_window(probe, grid);
  const PhaseTrace phi = phase_trace(driven_alignment(traj, initial, w.t0, w.dt, w.n), w.t0, w.dt, medium);
  return modulated_probe_spectrum(probe, phi, grid);
}

std::vector<BroadeningRow> broadening_scan(const EnsembleState& initial, const PulseTrain& train,
                                           const ProbePulse& probe, const MediumSpec& medium,
                                           const std::vector<double>& delays, int threads, const ProbeGrid& grid) {
  medium.validate();
  EvolveOptions opts;
  opts.threads = threads;
  opts.record_each_pulse = true;
  const Trajectory traj = evolve_ensemble(initial, train, opts);
  std::vector<BroadeningRow> rows(delays.size());
  parallel_for(delays.size(), threads, [&](std::size_t i) {
    ProbePulse p = probe;
    p.delay = delays[i];
    const SpectralWidth sw = spectral_width(driven_probe_spectrum(initial, traj, p, medium, grid));
    rows[i] = {delays[i], sw.fwhm_nm, sw.centroid_nm};
  });
  return rows;
}

void write_probe_spectrum_csv(std::ostream& os, const ProbeSpectrum& s) {
  os << "wavelength_nm,offset_cm,intensity\n";
  const std::vector<double> wl = s.wavelength_nm();
  for (std::size_t i = 0; i < wl.size(); ++i)
    os << csv::num(wl[i]) << ',' << csv::num(s.offset_cm[i]) << ',' << csv::num(s.intensity[i]) << '\n';
}

void write_broadening_csv(std::ostream& os, const std::vector<BroadeningRow>& rows) {
  os << "delay_ps,fwhm_nm,centroid_nm\n";
  for (const BroadeningRow& r : rows)
    os << csv::num(r.delay / phys::ps) << ',' << csv::num(r.fwhm_nm) << ',' << csv::num(r.centroid_nm) << '\n';
}

}  // namespace rotex
