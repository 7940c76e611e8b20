#pragma once

// Tensor-product polynomials Q_{kx,ky,kz} with exact rational coefficients.
//
// A TensorPoly always stores its coefficients in the reference coordinates of
// the cell it lives on: x_ref = (x - origin) / size per axis. The frame
// records that affine map so physical derivatives, antiderivatives and
// moments pick up the exact chain-rule factors.

#include "cuboid/rational.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace cuboid {

enum class Axis : int { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

constexpr int index(Axis a) { return static_cast<int>(a); }
constexpr Axis axis_of(int i) { return static_cast<Axis>(i); }
char axis_name(int axis);

using Exponents = std::array<int, 3>;
using Point3 = std::array<Rational, 3>;

/// Per-axis degree caps. Any negative cap collapses to the empty space.
class Degree3 {
 public:
  Degree3() = default;
  Degree3(int kx, int ky, int kz);

  static Degree3 empty();

  bool is_empty() const { return caps_[0] < 0; }
  int operator[](int axis) const { return caps_[axis]; }
  int dim() const;

  Degree3 with_cap(int axis, int cap) const;
  Degree3 shifted(int axis, int delta) const { return with_cap(axis, caps_[axis] + delta); }
  /// True when every monomial of `other` is a monomial of *this.
  bool contains(const Degree3& other) const;
  Degree3 max_with(const Degree3& other) const;

  std::string to_string() const;

  friend bool operator==(const Degree3&, const Degree3&) = default;

 private:
  std::array<int, 3> caps_{0, 0, 0};
};

/// Affine map between the reference cube [0,1]^3 and an axis-aligned cell.
struct CellFrame {
  Point3 origin{Rational(0), Rational(0), Rational(0)};
  Point3 size{Rational(1), Rational(1), Rational(1)};

  bool is_reference() const;
  Rational to_physical(int axis, const Rational& ref) const { return origin[axis] + size[axis] * ref; }
  Rational to_reference(int axis, const Rational& phys) const { return (phys - origin[axis]) / size[axis]; }
  Rational volume() const { return size[0] * size[1] * size[2]; }

  friend bool operator==(const CellFrame&, const CellFrame&) = default;
};

enum class EntityKind : int { vertex = 0, edge = 1, face = 2, cell = 3 };

/// A geometric mesh entity given by its physical bounding corners. Free axes
/// are those where lo < hi.
struct EntityRef {
  EntityKind kind = EntityKind::cell;
  Point3 lo{Rational(0), Rational(0), Rational(0)};
  Point3 hi{Rational(1), Rational(1), Rational(1)};

  bool is_free(int axis) const { return lo[axis] != hi[axis]; }
  int free_count() const;
  /// Edges: the parallel axis. Faces: the normal axis. Otherwise -1.
  int tag_axis() const;
  /// "v", "e_x", "F_yz", "T".
  std::string tag_name() const;

  /// Throws std::invalid_argument unless the free-axis count matches kind.
  void validate() const;
};

class TensorPoly {
 public:
  TensorPoly() : degree_(Degree3::empty()) {}
  explicit TensorPoly(const Degree3& degree, const CellFrame& frame = {});

  static TensorPoly constant(const Rational& c, const CellFrame& frame = {});
  static TensorPoly monomial(const Exponents& e, const Rational& c = Rational(1),
                             const CellFrame& frame = {});
  /// The physical coordinate function x_axis expressed on `frame`.
  static TensorPoly coordinate(int axis, const CellFrame& frame);

  const Degree3& degree() const { return degree_; }
  const CellFrame& frame() const { return frame_; }
  void set_frame(const CellFrame& frame) { frame_ = frame; }

  std::span<const Rational> coeffs() const { return coeffs_; }
  std::size_t flat_index(const Exponents& e) const;
  bool in_range(const Exponents& e) const;
  Rational& coeff(const Exponents& e) { return coeffs_[flat_index(e)]; }
  const Rational& coeff(const Exponents& e) const { return coeffs_[flat_index(e)]; }
  /// Zero outside the stored degree grid.
  Rational coeff_or_zero(const Exponents& e) const;
  Exponents exponents_at(std::size_t flat) const;

  bool is_zero() const;
  /// The smallest Degree3 containing every nonzero monomial (empty for 0).
  Degree3 effective_degree() const;

  /// Evaluates at a point given in reference coordinates.
  Rational evaluate(const Point3& ref_point) const;
  /// Evaluates at a point given in physical coordinates.
  Rational evaluate_physical(const Point3& point) const;

  /// Same polynomial on a different degree grid. Throws std::domain_error if
  /// a nonzero coefficient would be dropped.
  TensorPoly resized(const Degree3& degree) const;

  TensorPoly& operator+=(const TensorPoly& other);
  TensorPoly& operator-=(const TensorPoly& other);
  TensorPoly& operator*=(const Rational& s);
  TensorPoly operator-() const;

  friend TensorPoly operator+(TensorPoly a, const TensorPoly& b) { return a += b; }
  friend TensorPoly operator-(TensorPoly a, const TensorPoly& b) { return a -= b; }
  friend TensorPoly operator*(TensorPoly a, const Rational& s) { return a *= s; }
  friend TensorPoly operator*(const Rational& s, TensorPoly a) { return a *= s; }
  friend TensorPoly operator*(const TensorPoly& a, const TensorPoly& b);

  /// Mathematical equality: degree grids may differ, frames must agree.
  friend bool operator==(const TensorPoly& a, const TensorPoly& b);

  std::string to_string() const;

 private:
  Degree3 degree_;
  CellFrame frame_;
  std::vector<Rational> coeffs_;
};

/// Physical partial derivative d/d(axis). The cap on `axis` drops by one.
TensorPoly differentiate(const TensorPoly& p, Axis axis);
/// Applies d^alpha, alpha a multi-index of orders per axis.
TensorPoly differentiate(const TensorPoly& p, const Exponents& alpha);

/// Physical antiderivative with lower limit at the cell's minimal coordinate.
TensorPoly antiderivative(const TensorPoly& p, Axis axis);

/// Restriction to an entity of p's cell. Fixed axes collapse to cap 0; free
/// axes keep the cell reference coordinate, which is the entity-normalized
/// coordinate (minimal corner -> 0). Throws std::invalid_argument when the
/// entity is not on p's cell.
TensorPoly trace(const TensorPoly& p, const EntityRef& entity);

/// Exact integral of trace(p, entity) * weight over the entity. The weight is
/// a polynomial in the entity-normalized coordinates of its free axes.
Rational moment(const TensorPoly& p, const TensorPoly& weight, const EntityRef& entity);

}  // namespace cuboid
