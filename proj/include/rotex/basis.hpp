#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rotex {

/// Fixed-M, fixed-parity slice of the |J, M> basis. Linearly polarized kicks
/// couple J to J and J +- 2 only, so each block evolves on its own.
struct BasisBlock {
  int M = 0;
  int parity_bit = 1;  // J % 2 for every entry
  int J_max = 0;
  std::vector<int> J_list;

  std::size_t size() const { return J_list.size(); }
  /// Position of J in J_list, or -1.
  int index_of(int J) const;
  bool operator==(const BasisBlock& o) const {
    return M == o.M && parity_bit == o.parity_bit && J_max == o.J_max;
  }
};

/// J runs from the first value >= |M| with the requested parity up to J_max.
/// Throws InvalidArgument when the block would be empty.
BasisBlock make_block(int M, int parity_bit, int J_max);

/// <J,M| cos^2 theta |J,M>
double cos2_diagonal(int J, int M);
/// <J+2,M| cos^2 theta |J,M>
double cos2_offdiagonal(int J, int M);

/// cos^2 theta restricted to a block. Tridiagonal in the block index.
struct Cos2Matrix {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples J_list[i] and J_list[i+1]

  Eigen::MatrixXd dense() const;
};

Cos2Matrix cos2_matrix(const BasisBlock& block);

}  // namespace rotex
