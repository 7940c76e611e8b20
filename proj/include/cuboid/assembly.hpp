#pragma once

// Global spaces by entity-based DOF identification, local reconstruction,
// sparse operator matrices and face-jump conformity checks.

#include "cuboid/elements.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>

namespace cuboid {

struct DofKey {
  EntityId entity;
  int component = 0;
  Exponents derivative{0, 0, 0};
  Exponents weight{0, 0, 0};
  DofKind kind = DofKind::point_eval;
  int bubble = -1;

  std::string describe(FieldKind field_kind) const;
  friend auto operator<=>(const DofKey&, const DofKey&) = default;
};

/// Raised when cells disagree on the value of a shared DOF.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GlobalSpace {
 public:
  GlobalSpace(const FamilyId& family, const CuboidMesh& mesh);

  const FamilyId& family() const { return family_; }
  const CuboidMesh& mesh() const { return mesh_; }
  const LocalElement& element() const { return *element_; }
  int ndofs() const { return static_cast<int>(keys_.size()); }

  const std::vector<int>& local_to_global(int cell) const { return l2g_[cell]; }
  const DofKey& key(int global) const { return keys_[global]; }
  /// -1 when absent.
  int index_of(const DofKey& key) const;
  /// Number of cells that carry global DOF `g`.
  int multiplicity(int global) const { return multiplicity_[global]; }
  std::string describe(int global) const;

  std::vector<Rational> local_values(std::span<const Rational> global, int cell) const;

 private:
  FamilyId family_;
  CuboidMesh mesh_;
  const LocalElement* element_;
  std::vector<DofKey> keys_;
  std::map<DofKey, int> index_;
  std::vector<std::vector<int>> l2g_;
  std::vector<int> multiplicity_;
};

GlobalSpace assemble_space(const FamilyId& family, const CuboidMesh& mesh);

/// The unique shape-space field on `cell` with the given global DOF values.
PolyField reconstruct_local(const GlobalSpace& space, std::span<const Rational> global, int cell);

/// Global DOF vector of a piecewise field given cell by cell. Shared DOFs
/// must agree exactly across cells; throws ConsistencyError otherwise.
std::vector<Rational> interpolate(const GlobalSpace& space,
                                  const std::function<PolyField(int cell, const CellFrame&)>& field);

struct Triplet {
  int row = 0;
  int col = 0;
  Rational value;
};

/// Sparse exact matrix with entries sorted by (row, col) and no explicit zeros.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}
  /// Duplicate positions are summed.
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<Triplet>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }
  Rational at(int row, int col) const;

  std::vector<Rational> multiply(std::span<const Rational> x) const;
  SparseMatrix operator*(const SparseMatrix& other) const;
  SparseMatrix transposed() const;

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Triplet> entries_;
};

/// Matrix Market coordinate format; values as "p/q" rationals, or as doubles
/// when `as_float` is set.
void write_matrix_market(std::ostream& os, const SparseMatrix& m, bool as_float = false);

enum class Operator { gradgrad, curl, div, sym_grad, curl_curlT };

std::string_view operator_name(Operator op);
Operator parse_operator(std::string_view name);
PolyField apply_operator(Operator op, const PolyField& field);
/// True when (src, op, dst) is an edge of one of the four complexes.
bool is_sanctioned_edge(const FamilyId& src, Operator op, const FamilyId& dst);

/// Column j holds the dst DOFs of op applied to the j-th src basis function.
/// Rows of shared dst DOFs must agree across every cell carrying them;
/// throws ConsistencyError naming the DofKey otherwise.
SparseMatrix operator_matrix(const GlobalSpace& src, Operator op, const GlobalSpace& dst);

struct TraceSpec {
  int component = 0;
  Exponents derivative{0, 0, 0};
};

/// Differences (high side minus low side) of d^alpha(component) on the 4x4
/// sample grid (2i+1)/8 of an interior face. Throws std::invalid_argument on
/// boundary faces.
std::vector<Rational> face_jump(const GlobalSpace& space, std::span<const Rational> global,
                                const EntityId& face, const TraceSpec& trace);

}  // namespace cuboid
