#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rotex/basis.hpp"
#include "rotex/molecule.hpp"

namespace rotex {

using cplx = std::complex<double>;

struct RotorBlockState {
  BasisBlock block;
  std::vector<cplx> amplitudes;

  double norm_squared() const;
  /// |J0, M> inside `block`.
  static RotorBlockState basis_state(const BasisBlock& block, int J0);
};

/// Eigendecomposition of the cos^2 block, A = V diag(lambda) V^T. Kicks of any
/// strength are then V diag(exp(i P lambda)) V^T, so one factor serves every
/// pulse acting on the block.
class KickFactor {
 public:
  explicit KickFactor(BasisBlock block);

  const BasisBlock& block() const { return block_; }
  std::size_t size() const { return block_.size(); }
  std::span<const double> eigenvalues() const { return lambda_; }

  /// exp(i P lambda_k), the diagonal of the kick in the eigenbasis.
  std::vector<cplx> eigenphases(double P) const;

  /// state <- exp(i P A) state. `scratch` must hold size() elements.
  void apply(std::span<const cplx> eigenphases, std::span<cplx> state,
             std::span<cplx> scratch) const;

  Eigen::MatrixXcd unitary(double P) const;

 private:
  BasisBlock block_;
  std::vector<double> lambda_;
  std::vector<double> v_;   // row-major, v_[i*n + k] = V(i, k)
  std::vector<double> vt_;  // row-major transpose
};

/// Impulsive kick exp(i P cos^2 theta) on one block.
struct KickOperator {
  std::shared_ptr<const KickFactor> factor;
  double P = 0.0;

  Eigen::MatrixXcd unitary() const { return factor->unitary(P); }
  void apply(std::span<cplx> state) const;
};

/// Throws InvalidArgument for non-finite P.
KickOperator kick_operator(double P, const BasisBlock& block);
KickOperator kick_operator(double P, std::shared_ptr<const KickFactor> factor);

/// exp(-i 2 pi c E_J dt) per J in the block. The phase is reduced modulo a
/// full cycle before the trigonometric call so that dt = T_rev stays exact
/// to rounding for large J.
std::vector<cplx> free_propagator(double dt, const BasisBlock& block, const MoleculeSpec& mol);

/// Same as free_propagator for a precomputed energy list (cm^-1).
std::vector<cplx> free_phases(double dt, std::span<const double> energies);

}  // namespace rotex
