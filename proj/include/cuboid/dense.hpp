#pragma once

// Small dense exact-rational matrices: local DOF matrices, bubble systems and
// their inverses/nullspaces.

#include "cuboid/rational.hpp"

#include <vector>

namespace cuboid {

class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const Rational& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::vector<Rational> multiply(const std::vector<Rational>& x) const;
  RationalMatrix operator*(const RationalMatrix& other) const;

  bool is_identity() const;
  bool is_zero() const;

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> data_;
};

/// Independent row/column groups of the nonzero pattern. A matrix that is
/// block diagonal up to permutation splits into one group per block.
struct BlockPartition {
  std::vector<std::vector<int>> row_groups;
  std::vector<std::vector<int>> col_groups;
};
BlockPartition block_partition(const RationalMatrix& m);

/// Exact rank by Gaussian elimination, block by block.
int exact_rank(const RationalMatrix& m);

/// Exact inverse; throws std::domain_error when singular or non-square.
RationalMatrix inverse(const RationalMatrix& m);

/// Basis of the right nullspace from the reduced row echelon form; one vector
/// per free column, with a 1 in that column.
std::vector<std::vector<Rational>> nullspace(const RationalMatrix& m);

}  // namespace cuboid
