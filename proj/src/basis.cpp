#include "rotex/basis.hpp"

#include <cmath>
#include <cstdlib>
#include <fmt/format.h>

#include "rotex/error.hpp"

namespace rotex {

int BasisBlock::index_of(int J) const {
  if (J_list.empty() || J < J_list.front() || J > J_list.back()) return -1;
  if ((J - J_list.front()) % 2 != 0) return -1;
  return (J - J_list.front()) / 2;
}

BasisBlock make_block(int M, int parity_bit, int J_max) {
  if (parity_bit != 0 && parity_bit != 1)
    throw InvalidArgument(fmt::format("make_block: parity bit must be 0 or 1, got {}", parity_bit));
  BasisBlock b;
  b.M = M;
  b.parity_bit = parity_bit;
  b.J_max = J_max;
  int J = std::abs(M);
  if (J % 2 != parity_bit) ++J;
  for (; J <= J_max; J += 2) b.J_list.push_back(J);
  if (b.J_list.empty())
    throw InvalidArgument(
        fmt::format("make_block: no J with parity {} in [{}, {}]", parity_bit, std::abs(M), J_max));
  return b;
}

double cos2_diagonal(int J, int M) {
  const double j = J;
  const double m2 = static_cast<double>(M) * M;
  return 1.0 / 3.0 + (2.0 / 3.0) * (j * (j + 1.0) - 3.0 * m2) / ((2.0 * j - 1.0) * (2.0 * j + 3.0));
}

double cos2_offdiagonal(int J, int M) {
  const double j = J;
  const double m2 = static_cast<double>(M) * M;
  const double num = ((j + 1.0) * (j + 1.0) - m2) * ((j + 2.0) * (j + 2.0) - m2);
  if (num <= 0.0) return 0.0;
  return std::sqrt(num) / ((2.0 * j + 3.0) * std::sqrt((2.0 * j + 1.0) * (2.0 * j + 5.0)));
}

Cos2Matrix cos2_matrix(const BasisBlock& block) {
  Cos2Matrix a;
  const std::size_t n = block.size();
  a.diag.resize(n);
  a.off.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) a.diag[i] = cos2_diagonal(block.J_list[i], block.M);
  for (std::size_t i = 0; i + 1 < n; ++i) a.off[i] = cos2_offdiagonal(block.J_list[i], block.M);
  return a;
}

Eigen::MatrixXd Cos2Matrix::dense() const {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag[i];
  for (Eigen::Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = off[i];
  return m;
}

}  // namespace rotex
