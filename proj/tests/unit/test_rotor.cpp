#include <doctest.h>

#include <cmath>
#include <random>

#include "rotex/basis.hpp"
#include "rotex/constants.hpp"
#include "rotex/error.hpp"
#include "rotex/rotor.hpp"
#include "rotex/tdse.hpp"

using namespace rotex;

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(phys::pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Normalized theta part of Y_JM (no Condon-Shortley phase; it cancels in
// products at fixed M).
double theta_part(int J, int M, double x) {
  const double lognorm = 0.5 * (std::log((2.0 * J + 1.0) / 2.0) + std::lgamma(J - M + 1.0) - std::lgamma(J + M + 1.0));
  return std::exp(lognorm) * std::assoc_legendre(J, M, x);
}

double quad_cos2(int J1, int J2, int M) {
  std::vector<double> x, w;
  gauss_legendre(96, x, w);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * theta_part(J1, M, x[i]) * x[i] * x[i] * theta_part(J2, M, x[i]);
  return s;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("cos^2 matrix elements match spherical-harmonic quadrature") {
  for (int M : {0, 1, 3, 10}) {
    for (int J = M; J <= 40; ++J) {
      CHECK(cos2_diagonal(J, M) == doctest::Approx(quad_cos2(J, J, M)).epsilon(1e-10));
      CHECK(std::abs(cos2_offdiagonal(J, M) - quad_cos2(J + 2, J, M)) < 1e-10);
    }
  }
  CHECK(cos2_diagonal(0, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("blocks hold one parity and start at |M|") {
  const BasisBlock b = make_block(2, 1, 15);
  CHECK(b.J_list.front() == 3);
  CHECK(b.J_list.back() == 15);
  CHECK(b.index_of(7) == 2);
  CHECK(b.index_of(8) == -1);
  CHECK_THROWS_AS(make_block(20, 0, 10), InvalidArgument);
  const Cos2Matrix c = cos2_matrix(b);
  CHECK(c.diag.size() == b.size());
  CHECK(c.off.size() == b.size() - 1);
  const Eigen::MatrixXd d = c.dense();
  CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kick is unitary and strengths compose") {
  const BasisBlock b = make_block(1, 1, 61);
  const Eigen::MatrixXcd U = kick_operator(3.7, b).unitary();
  const auto I = Eigen::MatrixXcd::Identity(U.rows(), U.cols());
  CHECK(max_abs(U * U.adjoint() - I) < 1e-12);
  const Eigen::MatrixXcd Ua = kick_operator(1.2, b).unitary(), Ub = kick_operator(2.5, b).unitary();
  CHECK(max_abs(Ua * Ub - U) < 1e-12);
  CHECK(max_abs(kick_operator(0.0, b).unitary() - I) < 1e-14);
  CHECK_THROWS_AS(kick_operator(std::nan(""), b), InvalidArgument);
}

TEST_CASE("kick agrees with a Taylor series of exp(i P A)") {
  const BasisBlock b = make_block(0, 0, 30);
  const double P = 0.8;
  const Eigen::MatrixXcd A = cos2_matrix(b).dense().cast<cplx>();
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(A.rows(), A.cols()), sum = term;
  for (int k = 1; k < 60; ++k) {
    term = term * A * cplx(0.0, P) / static_cast<double>(k);
    sum += term;
  }
  CHECK(max_abs(kick_operator(P, b).unitary() - sum) < 1e-13);

  // apply() on a vector matches the dense unitary.
  std::vector<cplx> v(b.size());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::VectorXcd ev(b.size());
  for (std::size_t i = 0; i < v.size(); ++i) ev[i] = v[i] = {g(rng), g(rng)};
  kick_operator(P, b).apply(v);
  const Eigen::VectorXcd ref = sum * ev;
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(v[i] - ref[i]) < 1e-12);
}

TEST_CASE("free phases: rigid rotor rephases at T_rev, quarter revival phases") {
  MoleculeSpec rigid = MoleculeSpec{}.rigid();
  const double Tr = rigid.revival_time();
  const BasisBlock b = make_block(0, 1, 401);
  const auto full = free_propagator(19.0 * Tr, b, rigid);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double J = b.J_list[i];
    // Two ulps of the 19 J(J+1)/2 cycles, in radians.
    const double cycles = 19.0 * J * (J + 1.0) / 2.0;
    CHECK(std::abs(full[i] - 1.0) < 1e-13 + 4.0 * phys::pi * cycles * 2.2e-16);
  }
  const auto q = free_propagator(0.25 * Tr, b, rigid);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double J = b.J_list[i];
    const double phase = -phys::pi * std::fmod(J * (J + 1.0) / 4.0, 2.0);
    // About J(J+1)/4 cycles are reduced in double precision.
    CHECK(std::abs(q[i] - std::polar(1.0, phase)) < 1e-13 + 1e-15 * J * (J + 1.0));
  }
  // Centrifugal term shifts the phase at T_rev by -2 pi (-D J^2 (J+1)^2)/(2B).
  const MoleculeSpec o2;
  const auto p = free_propagator(o2.revival_time(), make_block(0, 1, 21), o2);
  const double J = 21.0;
  const double expected = 2.0 * phys::pi * o2.D * J * J * (J + 1) * (J + 1) / (2.0 * o2.B);
  CHECK(std::arg(p.back()) == doctest::Approx(std::remainder(expected, 2.0 * phys::pi)).epsilon(1e-9));
}

TEST_CASE("energies and shifts") {
  const MoleculeSpec o2;
  CHECK(rotational_energy(1, o2) == doctest::Approx(2.0 * o2.B - 4.0 * o2.D));
  CHECK(raman_shift(7, o2) == doctest::Approx(rotational_energy(9, o2) - rotational_energy(7, o2)));
  CHECK(o2.revival_time() == doctest::Approx(11.6006e-12).epsilon(1e-5));
  MoleculeSpec bad;
  bad.B = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("TDSE oracle: zero field is free evolution, short pulses match the kick") {
  const MoleculeSpec o2;
  const BasisBlock b = make_block(0, 1, 41);
  PulseEnvelope env;
  env.fwhm = 100e-15;
  env.peak_intensity = 0.0;
  const RotorBlockState s0 = RotorBlockState::basis_state(b, 5);
  const TdseResult free = tdse_reference_propagate(s0, env, o2);
  CHECK(free.state.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::norm(free.state.amplitudes[static_cast<std::size_t>(b.index_of(5))]) == doctest::Approx(1.0).epsilon(1e-12));

  for (double fwhm : {10e-15, 100e-15}) {
    env.fwhm = fwhm;
    env.peak_intensity = intensity_for_kick_strength(1.0, fwhm, o2);
    CHECK(envelope_kick_strength(env, o2) == doctest::Approx(1.0).epsilon(1e-12));
    const TdseResult r = tdse_reference_propagate(s0, env, o2);
    CHECK(r.coupling_integral == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.state.norm_squared() == doctest::Approx(1.0).epsilon(1e-9));
    std::vector<cplx> k = s0.amplitudes;
    kick_operator(1.0, b).apply(k);
    double worst = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) worst = std::max(worst, std::abs(std::norm(k[i]) - std::norm(r.state.amplitudes[i])));
    CHECK(worst < (fwhm < 50e-15 ? 1e-4 : 0.05));
  }
}
