#include "rotex/tdse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>

#include "rotex/constants.hpp"
#include "rotex/error.hpp"

namespace rotex {

namespace {
const double kFourLn2 = 4.0 * std::log(2.0);
}

void PulseEnvelope::validate() const {
  if (!(fwhm > 0.0) || !std::isfinite(fwhm))
    throw InvalidArgument(fmt::format("pulse envelope: fwhm must be positive, got {}", fwhm));
  if (!(peak_intensity >= 0.0) || !std::isfinite(peak_intensity))
    throw InvalidArgument("pulse envelope: intensity must be non-negative");
}

double PulseEnvelope::field_squared(double t) const {
  const double x = (t - center_time) / fwhm;
  const double intensity_si = peak_intensity * 1e4 * std::exp(-kFourLn2 * x * x);
  return 2.0 * intensity_si / (phys::c_si * phys::eps0);
}

double PulseEnvelope::field_squared_integral() const {
  const double area = fwhm * std::sqrt(phys::pi / kFourLn2);
  return 2.0 * peak_intensity * 1e4 * area / (phys::c_si * phys::eps0);
}

double coupling_rate(const PulseEnvelope& pulse, const MoleculeSpec& mol, double t) {
  return mol.delta_alpha * pulse.field_squared(t) / (4.0 * phys::hbar);
}

double envelope_kick_strength(const PulseEnvelope& pulse, const MoleculeSpec& mol) {
  return mol.delta_alpha * pulse.field_squared_integral() / (4.0 * phys::hbar);
}

double intensity_for_kick_strength(double P, double fwhm, const MoleculeSpec& mol) {
  PulseEnvelope unit{fwhm, 1.0, 0.0};
  return P / envelope_kick_strength(unit, mol);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Interaction-picture state: amplitudes plus the running coupling integral.
struct Y {
  std::vector<cplx> b;
  double q = 0.0;
};

class Rhs {
 public:
  Rhs(const BasisBlock& block, const PulseEnvelope& pulse, const MoleculeSpec& mol, double t0)
      : a_(cos2_matrix(block)), pulse_(pulse), mol_(mol), t0_(t0) {
    energies_.resize(block.size());
    for (std::size_t i = 0; i < block.size(); ++i)
      energies_[i] = rotational_energy(block.J_list[i], mol);
    u_.resize(block.size());
  }

  void operator()(double t, const Y& y, Y& dy) {
    const double kappa = coupling_rate(pulse_, mol_, t);
    const std::vector<cplx> back = free_phases(t - t0_, energies_);  // e^{-i w tau}
    const std::size_t n = y.b.size();
    for (std::size_t i = 0; i < n; ++i) u_[i] = back[i] * y.b[i];
    for (std::size_t i = 0; i < n; ++i) {
      cplx v = a_.diag[i] * u_[i];
      if (i > 0) v += a_.off[i - 1] * u_[i - 1];
      if (i + 1 < n) v += a_.off[i] * u_[i + 1];
      dy.b[i] = cplx(0.0, kappa) * std::conj(back[i]) * v;
    }
    dy.q = kappa;
  }

  std::span<const double> energies() const { return energies_; }

 private:
  Cos2Matrix a_;
  PulseEnvelope pulse_;
  MoleculeSpec mol_;
  double t0_;
  std::vector<double> energies_;
  std::vector<cplx> u_;
};

void axpy_into(Y& out, const Y& y, double h, std::initializer_list<std::pair<double, const Y*>> terms) {
  const std::size_t n = y.b.size();
  for (std::size_t i = 0; i < n; ++i) {
    cplx s{};
    for (const auto& [c, k] : terms) s += c * k->b[i];
    out.b[i] = y.b[i] + h * s;
  }
  double sq = 0.0;
  for (const auto& [c, k] : terms) sq += c * k->q;
  out.q = y.q + h * sq;
}

}  // namespace

TdseResult tdse_reference_propagate(const RotorBlockState& state, const PulseEnvelope& pulse,
                                    const MoleculeSpec& mol, const TdseOptions& opts) {
  pulse.validate();
  const double norm = state.norm_squared();
  if (std::abs(norm - 1.0) > 1e-10)
    throw InvalidArgument(fmt::format("tdse: input state not normalized (|c|^2 = {})", norm));

  const double t0 = pulse.center_time - opts.half_window_fwhm * pulse.fwhm;
  const double t1 = pulse.center_time + opts.half_window_fwhm * pulse.fwhm;
  const std::size_t n = state.amplitudes.size();

  Rhs rhs(state.block, pulse, mol, t0);
  Y y{state.amplitudes, 0.0};
  Y k1{std::vector<cplx>(n)}, k2 = k1, k3 = k1, k4 = k1, k5 = k1, k6 = k1, k7 = k1, tmp = k1,
      ynew = k1;

  TdseResult res{state, t0, t1};
  const double h_max = pulse.fwhm / 5.0;
  double h = pulse.fwhm / 50.0;
  double t = t0;
  rhs(t, y, k1);

  while (t < t1) {
    if (res.accepted_steps + res.rejected_steps > opts.max_steps)
      throw IntegrationFailure("tdse: step budget exhausted");
    h = std::min({h, h_max, t1 - t});

    axpy_into(tmp, y, h, {{a21, &k1}});
    rhs(t + c2 * h, tmp, k2);
    axpy_into(tmp, y, h, {{a31, &k1}, {a32, &k2}});
    rhs(t + c3 * h, tmp, k3);
    axpy_into(tmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    rhs(t + c4 * h, tmp, k4);
    axpy_into(tmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    rhs(t + c5 * h, tmp, k5);
    axpy_into(tmp, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    rhs(t + h, tmp, k6);
    axpy_into(ynew, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    rhs(t + h, ynew, k7);

    // Error estimate; the coupling integral is scaled by its final value's
    // magnitude so it does not dominate the amplitude tolerance.
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx e = h * (e1 * k1.b[i] + e3 * k3.b[i] + e4 * k4.b[i] + e5 * k5.b[i] +
                          e6 * k6.b[i] + e7 * k7.b[i]);
      const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y.b[i]), std::abs(ynew.b[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    {
      const double e = h * (e1 * k1.q + e3 * k3.q + e4 * k4.q + e5 * k5.q + e6 * k6.q + e7 * k7.q);
      const double sc = opts.abs_tol + opts.rel_tol * std::max({std::abs(y.q), std::abs(ynew.q), 1.0});
      err = std::max(err, std::abs(e) / sc);
    }

    if (err <= 1.0) {
      t += h;
      std::swap(y, ynew);
      std::swap(k1, k7);  // first-same-as-last
      ++res.accepted_steps;
    } else {
      ++res.rejected_steps;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < opts.min_step && t < t1)
      throw IntegrationFailure(fmt::format("tdse: step size underflow at t = {} s", t));
  }

  const std::vector<cplx> out_phase = free_phases(t1 - t0, rhs.energies());
  for (std::size_t i = 0; i < n; ++i) res.state.amplitudes[i] = out_phase[i] * y.b[i];
  res.coupling_integral = y.q;
  return res;
}

}  // namespace rotex
