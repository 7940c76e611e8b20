#pragma once

// Element catalog: shape spaces and DOF functionals of the thirteen element
// families, local unisolvence and the traceless diagonal bubble space.

#include "cuboid/dense.hpp"
#include "cuboid/field.hpp"
#include "cuboid/mesh.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cuboid {

enum class Family {
  U,
  Sigma,
  Xi,
  Q,
  SigmaRed,
  XiRed,
  QRed,
  X,
  Phi,
  Gamma,
  GammaRed,
  Z,
  ZRed,
};

inline constexpr std::array<Family, 13> kAllFamilies{
    Family::U,     Family::Sigma, Family::Xi,       Family::Q, Family::SigmaRed,
    Family::XiRed, Family::QRed,  Family::X,        Family::Phi, Family::Gamma,
    Family::GammaRed, Family::Z,  Family::ZRed};

/// CLI name: u, sigma, xi, q, sigma-red, xi-red, q-red, x, phi, gamma,
/// gamma-red, z, z-red.
std::string_view family_name(Family f);
/// Inverse of family_name; throws std::invalid_argument for unknown names.
Family parse_family(std::string_view name);
/// 3 for the gradgrad families, 2 for the elasticity ones.
int min_order(Family f);

struct FamilyId {
  Family family = Family::U;
  int k = 3;

  std::string to_string() const;
  /// Throws std::invalid_argument naming the family's minimum order.
  void require_admissible() const;

  friend auto operator<=>(const FamilyId&, const FamilyId&) = default;
};

/// Per-component polynomial grids of a family. Matrix fields store nine
/// components; for symmetric fields (a,b) and (b,a) share one coordinate
/// block, for traceless fields zz is derived as -(xx + yy).
struct ShapeSpaceSpec {
  FieldKind kind = FieldKind::scalar;
  Structure structure = Structure::none;
  std::vector<Degree3> grid;     // one per stored component
  std::vector<int> independent;  // stored components carrying coordinates
  std::string constraint;

  int dimension() const;
  /// Offset of component `c` in the coordinate vector, or -1.
  int offset_of(int component) const;
};

ShapeSpaceSpec shape_space(const FamilyId& family);

/// Field on `frame` whose reference-coordinate coefficients are `coords`.
PolyField field_from_coordinates(const ShapeSpaceSpec& space, std::span<const Rational> coords,
                                 const CellFrame& frame);
/// Coordinates of a field in the space; throws std::domain_error when the
/// field is not a member.
std::vector<Rational> coordinates_of(const ShapeSpaceSpec& space, const PolyField& field);

/// Pointwise sum-to-zero diagonal triples, each vanishing on its own pair of
/// normal faces.
struct BubbleBasis {
  int k = 3;
  std::vector<std::array<TensorPoly, 3>> triples;
};

/// Exact nullspace basis of the bubble constraints in (Q_{k-1})^3.
BubbleBasis bubble_basis_divT(int k);
/// Cached shared copy.
std::shared_ptr<const BubbleBasis> shared_bubble_basis(int k);

enum class DofKind { point_eval, edge_moment, face_moment, cell_moment, coupled_cell_moment };

std::string_view dof_kind_name(DofKind kind);

struct DofFunctional {
  DofKind kind = DofKind::point_eval;
  FieldKind field_kind = FieldKind::scalar;
  LocalEntity local;
  EntityRef entity;
  int component = 0;           // canonical: (a,b) with a <= b for symmetric fields
  Exponents derivative{0, 0, 0};
  Exponents weight{0, 0, 0};   // monomial in entity-normalized coordinates
  int bubble = -1;
  std::shared_ptr<const BubbleBasis> bubbles;

  std::string describe() const;
};

/// Position of a component in the (x,y,z) / (xx,yy,zz,xy,xz,yz,...) order.
int component_rank(FieldKind kind, int component);
std::string component_name(FieldKind kind, int component);

/// DOFs on the reference cell [0,1]^3.
std::vector<DofFunctional> local_dofs(const FamilyId& family);
/// DOFs on a mesh cell; entity extents are physical.
std::vector<DofFunctional> local_dofs(const FamilyId& family, int cell, const CuboidMesh& mesh);

/// Literal evaluation: component, derivative, then point value or moment.
Rational apply_dof(const DofFunctional& dof, const PolyField& field);

/// Per-family reference data: DOF list, the reference DOF matrix and its
/// inverse. DOF values on a cell of size h are diag(s(h)) times the
/// reference values, so one inverse serves every cell.
class LocalElement {
 public:
  explicit LocalElement(const FamilyId& family);

  const FamilyId& family() const { return family_; }
  const ShapeSpaceSpec& space() const { return space_; }
  const std::vector<DofFunctional>& dofs() const { return dofs_; }
  int dimension() const { return space_.dimension(); }
  bool invertible() const { return inverse_.has_value(); }

  const RationalMatrix& reference_matrix() const { return matrix_; }

  /// Factorized evaluation of every DOF on the field's own cell.
  std::vector<Rational> dof_values(const PolyField& field) const;
  /// Evaluates one DOF (index into dofs()).
  Rational dof_value(int i, const PolyField& field) const;
  /// Unique field on `frame` with the given DOF values. Throws
  /// std::domain_error when the DOF matrix is singular.
  PolyField reconstruct(std::span<const Rational> values, const CellFrame& frame) const;
  /// s_i(frame): ratio of DOF values on `frame` to reference values.
  Rational scale(int i, const CellFrame& frame) const;

 private:
  Rational reference_value(int i, int component, const Exponents& e) const;

  FamilyId family_;
  ShapeSpaceSpec space_;
  std::vector<DofFunctional> dofs_;
  RationalMatrix matrix_;
  std::optional<std::vector<std::vector<std::pair<int, Rational>>>> inverse_;
};

/// Cached per family; thread-safe.
const LocalElement& local_element(const FamilyId& family);

RationalMatrix local_dof_matrix(const FamilyId& family);

struct UnisolvenceReport {
  bool square = false;
  bool nonsingular = false;
  int rank = 0;
  int dimension = 0;
  int dof_count = 0;
};
UnisolvenceReport check_unisolvence(const FamilyId& family);

}  // namespace cuboid
