#include "cuboid/dense.hpp"

#include <numeric>
#include <stdexcept>

namespace cuboid {

std::vector<Rational> RationalMatrix::multiply(const std::vector<Rational>& x) const {
  if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("dimension mismatch");
  std::vector<Rational> y(static_cast<std::size_t>(rows_));
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) {
      const Rational& a = (*this)(r, c);
      if (a != 0 && x[c] != 0) y[r] += a * x[c];
    }
  return y;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("dimension mismatch");
  RationalMatrix out(rows_, other.cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(r, k);
      if (a == 0) continue;
      for (int c = 0; c < other.cols_; ++c)
        if (other(k, c) != 0) out(r, c) += a * other(k, c);
    }
  return out;
}

bool RationalMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if ((*this)(r, c) != (r == c ? 1 : 0)) return false;
  return true;
}

bool RationalMatrix::is_zero() const {
  for (const auto& v : data_)
    if (v != 0) return false;
  return true;
}

BlockPartition block_partition(const RationalMatrix& m) {
  // Union-find over rows [0, R) and columns [R, R + C).
  const int n = m.rows() + m.cols();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (m(r, c) != 0) parent[find(r)] = find(m.rows() + c);

  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  BlockPartition p;
  auto group_of = [&](int v) {
    const int root = find(v);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(p.row_groups.size());
      p.row_groups.emplace_back();
      p.col_groups.emplace_back();
    }
    return slot[root];
  };
  for (int r = 0; r < m.rows(); ++r) p.row_groups[group_of(r)].push_back(r);
  for (int c = 0; c < m.cols(); ++c) p.col_groups[group_of(m.rows() + c)].push_back(c);
  return p;
}

namespace {

RationalMatrix extract(const RationalMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  RationalMatrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(static_cast<int>(i), static_cast<int>(j)) = m(rows[i], cols[j]);
  return out;
}

// In-place reduced row echelon form; returns pivot columns.
std::vector<int> rref(RationalMatrix& a) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < a.cols() && row < a.rows(); ++col) {
    int pr = -1;
    for (int r = row; r < a.rows(); ++r)
      if (a(r, col) != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    if (pr != row)
      for (int c = 0; c < a.cols(); ++c) std::swap(a(pr, c), a(row, c));
    const Rational inv = 1 / a(row, col);
    for (int c = col; c < a.cols(); ++c)
      if (a(row, c) != 0) a(row, c) *= inv;
    for (int r = 0; r < a.rows(); ++r) {
      if (r == row || a(r, col) == 0) continue;
      const Rational f = a(r, col);
      for (int c = col; c < a.cols(); ++c)
        if (a(row, c) != 0) a(r, c) -= f * a(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

int dense_rank(RationalMatrix a) {
  int rank = 0;
  for (int col = 0; col < a.cols() && rank < a.rows(); ++col) {
    int pr = -1;
    for (int r = rank; r < a.rows(); ++r)
      if (a(r, col) != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    if (pr != rank)
      for (int c = col; c < a.cols(); ++c) std::swap(a(pr, c), a(rank, c));
    for (int r = rank + 1; r < a.rows(); ++r) {
      if (a(r, col) == 0) continue;
      const Rational f = a(r, col) / a(rank, col);
      for (int c = col; c < a.cols(); ++c)
        if (a(rank, c) != 0) a(r, c) -= f * a(rank, c);
    }
    ++rank;
  }
  return rank;
}

}  // namespace

int exact_rank(const RationalMatrix& m) {
  const auto p = block_partition(m);
  int rank = 0;
  for (std::size_t g = 0; g < p.row_groups.size(); ++g) {
    if (p.row_groups[g].empty() || p.col_groups[g].empty()) continue;
    rank += dense_rank(extract(m, p.row_groups[g], p.col_groups[g]));
  }
  return rank;
}

RationalMatrix inverse(const RationalMatrix& m) {
  if (m.rows() != m.cols()) throw std::domain_error("inverse of a non-square matrix");
  const auto p = block_partition(m);
  RationalMatrix out(m.rows(), m.cols());
  for (std::size_t g = 0; g < p.row_groups.size(); ++g) {
    const auto& rows = p.row_groups[g];
    const auto& cols = p.col_groups[g];
    if (rows.size() != cols.size()) throw std::domain_error("singular matrix");
    const int n = static_cast<int>(rows.size());
    RationalMatrix aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) aug(i, j) = m(rows[i], cols[j]);
      aug(i, n + i) = 1;
    }
    const auto pivots = rref(aug);
    if (static_cast<int>(pivots.size()) < n || pivots.back() >= n) throw std::domain_error("singular matrix");
    // Block inverse maps row-space indices back to column indices.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(cols[i], rows[j]) = aug(i, n + j);
  }
  return out;
}

std::vector<std::vector<Rational>> nullspace(const RationalMatrix& m) {
  RationalMatrix a = m;
  const auto pivots = rref(a);
  std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols()), false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(static_cast<std::size_t>(m.cols()));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a(static_cast<int>(r), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace cuboid
