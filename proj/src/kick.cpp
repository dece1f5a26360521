#include <cmath>
#include <fmt/format.h>

#include "rotex/constants.hpp"
#include "rotex/error.hpp"
#include "rotex/kernels.hpp"
#include "rotex/rotor.hpp"

namespace rotex {

double RotorBlockState::norm_squared() const {
  double s = 0.0;
  for (const cplx& c : amplitudes) s += std::norm(c);
  return s;
}

RotorBlockState RotorBlockState::basis_state(const BasisBlock& block, int J0) {
  const int idx = block.index_of(J0);
  if (idx < 0)
    throw InvalidArgument(fmt::format("J0 = {} is not part of the M = {} block", J0, block.M));
  RotorBlockState s{block, std::vector<cplx>(block.size(), cplx{})};
  s.amplitudes[static_cast<std::size_t>(idx)] = 1.0;
  return s;
}

KickFactor::KickFactor(BasisBlock block) : block_(std::move(block)) {
  const Cos2Matrix a = cos2_matrix(block_);
  const auto n = static_cast<Eigen::Index>(a.diag.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(a.diag.data(), n);
  Eigen::VectorXd off = n > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(a.off.data(), n - 1))
                              : Eigen::VectorXd(0);
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw Error(fmt::format("cos^2 eigendecomposition failed for M = {}", block_.M));
  lambda_.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  const Eigen::MatrixXd& V = solver.eigenvectors();
  v_.resize(static_cast<std::size_t>(n * n));
  vt_.resize(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) {
      v_[static_cast<std::size_t>(i * n + k)] = V(i, k);
      vt_[static_cast<std::size_t>(k * n + i)] = V(i, k);
    }
}

std::vector<cplx> KickFactor::eigenphases(double P) const {
  std::vector<cplx> p(lambda_.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::polar(1.0, P * lambda_[k]);
  return p;
}

void KickFactor::apply(std::span<const cplx> phases, std::span<cplx> state,
                       std::span<cplx> scratch) const {
  const auto& k = kernels::active();
  const std::size_t n = size();
  k.real_matvec(vt_.data(), n, n, state.data(), scratch.data());
  k.cmul_inplace(scratch.data(), phases.data(), n);
  k.real_matvec(v_.data(), n, n, scratch.data(), state.data());
}

Eigen::MatrixXcd KickFactor::unitary(double P) const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd V(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) V(i, k) = v_[static_cast<std::size_t>(i * n + k)];
  Eigen::VectorXcd d(n);
  for (Eigen::Index k = 0; k < n; ++k) d(k) = std::polar(1.0, P * lambda_[static_cast<std::size_t>(k)]);
  return V.cast<cplx>() * d.asDiagonal() * V.transpose().cast<cplx>();
}

void KickOperator::apply(std::span<cplx> state) const {
  std::vector<cplx> scratch(factor->size());
  factor->apply(factor->eigenphases(P), state, scratch);
}

KickOperator kick_operator(double P, std::shared_ptr<const KickFactor> factor) {
  if (!std::isfinite(P)) throw InvalidArgument("kick_operator: kick strength must be finite");
  return KickOperator{std::move(factor), P};
}

KickOperator kick_operator(double P, const BasisBlock& block) {
  if (!std::isfinite(P)) throw InvalidArgument("kick_operator: kick strength must be finite");
  return KickOperator{std::make_shared<const KickFactor>(block), P};
}

std::vector<cplx> free_phases(double dt, std::span<const double> energies) {
  if (!std::isfinite(dt)) throw InvalidArgument("free propagation: dt must be finite");
  std::vector<cplx> out(energies.size());
  const double c_dt = phys::c_cm * dt;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    const double cycles = c_dt * energies[i];
    const double frac = cycles - std::nearbyint(cycles);
    out[i] = std::polar(1.0, -2.0 * phys::pi * frac);
  }
  return out;
}

std::vector<cplx> free_propagator(double dt, const BasisBlock& block, const MoleculeSpec& mol) {
  std::vector<double> e(block.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = rotational_energy(block.J_list[i], mol);
  return free_phases(dt, e);
}

}  // namespace rotex
