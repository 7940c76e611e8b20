#pragma once

#include "cuboid/polytensor.hpp"

#include <vector>

namespace cuboid {

enum class FieldKind { scalar, vector3, matrix33 };
enum class Structure { none, symmetric, traceless };

/// Component index: 0 for scalars, the axis for vectors, 3*row+col for
/// matrices.
constexpr int matrix_component(int row, int col) { return 3 * row + col; }

/// A scalar, vector or 3x3 matrix of TensorPolys on one cell. Matrices store
/// all nine entries; symmetric fields keep (a,b) and (b,a) identical.
class PolyField {
 public:
  PolyField() = default;
  PolyField(FieldKind kind, Structure structure, const CellFrame& frame);

  FieldKind kind() const { return kind_; }
  Structure structure() const { return structure_; }
  const CellFrame& frame() const { return frame_; }
  void set_structure(Structure s) { structure_ = s; }

  int size() const { return static_cast<int>(components_.size()); }
  TensorPoly& operator[](int c) { return components_[c]; }
  const TensorPoly& operator[](int c) const { return components_[c]; }
  TensorPoly& at(int row, int col) { return components_[matrix_component(row, col)]; }
  const TensorPoly& at(int row, int col) const { return components_[matrix_component(row, col)]; }

  bool is_zero() const;
  /// Exact check of the structural invariant (symmetry or zero trace).
  bool satisfies_structure() const;

  PolyField transposed() const;

  PolyField& operator+=(const PolyField& other);
  PolyField& operator-=(const PolyField& other);
  PolyField& operator*=(const Rational& s);
  friend PolyField operator+(PolyField a, const PolyField& b) { return a += b; }
  friend PolyField operator-(PolyField a, const PolyField& b) { return a -= b; }
  friend PolyField operator*(const Rational& s, PolyField a) { return a *= s; }

  friend bool operator==(const PolyField& a, const PolyField& b);

 private:
  FieldKind kind_ = FieldKind::scalar;
  Structure structure_ = Structure::none;
  CellFrame frame_;
  std::vector<TensorPoly> components_;
};

int component_count(FieldKind kind);

}  // namespace cuboid
