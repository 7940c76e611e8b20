#pragma once

// Structured axis-aligned cuboid meshes of a box.
//
// Every entity is addressed by a "free-axis mask" (bit a set when the entity
// extends along axis a) and a grid index. Numbering is lexicographic with z
// fastest, then y, then x. Edges are listed e_x, e_y, e_z; faces F_yz, F_xz,
// F_xy (normal x, y, z).

#include "cuboid/polytensor.hpp"

#include <array>
#include <vector>

namespace cuboid {

using Mask = unsigned;

inline constexpr Mask kFreeX = 1u, kFreeY = 2u, kFreeZ = 4u;

constexpr int free_count(Mask m) { return ((m >> 0) & 1u) + ((m >> 1) & 1u) + ((m >> 2) & 1u); }
constexpr bool is_free(Mask m, int axis) { return ((m >> axis) & 1u) != 0; }

/// Position of an entity relative to one cell: which axes are free and, for
/// fixed axes, whether the entity sits at the low (0) or high (1) side.
struct LocalEntity {
  Mask mask = 0;
  std::array<int, 3> side{0, 0, 0};  // ignored on free axes

  EntityKind kind() const { return static_cast<EntityKind>(free_count(mask)); }
  /// Ordering key: vertices, e_x, e_y, e_z, F_yz, F_xz, F_xy, cell; then side.
  int order() const;

  friend bool operator==(const LocalEntity&, const LocalEntity&) = default;
};

/// The 27 local entities of a cell in canonical order (8 + 12 + 6 + 1).
const std::vector<LocalEntity>& local_entities();
/// All local entities with the given mask, sides in lexicographic order.
std::vector<LocalEntity> local_entities_with_mask(Mask mask);

struct EntityId {
  EntityKind kind = EntityKind::vertex;
  int index = 0;

  friend auto operator<=>(const EntityId&, const EntityId&) = default;
};

class CuboidMesh {
 public:
  /// Each breakpoint list must be strictly increasing with at least two
  /// entries; throws std::invalid_argument otherwise.
  CuboidMesh(std::vector<Rational> bx, std::vector<Rational> by, std::vector<Rational> bz);

  /// Uniform nx x ny x nz subdivision of the unit box.
  static CuboidMesh uniform(int nx, int ny, int nz);

  const std::vector<Rational>& breakpoints(int axis) const { return breaks_[axis]; }
  int cells_along(int axis) const { return n_[axis]; }

  int num_vertices() const { return count(EntityKind::vertex); }
  int num_edges() const { return count(EntityKind::edge); }
  int num_faces() const { return count(EntityKind::face); }
  int num_cells() const { return count(EntityKind::cell); }
  int count(EntityKind kind) const;

  /// Global id of the entity with free-axis mask `mask` at grid index `at`.
  EntityId entity_id(Mask mask, const std::array<int, 3>& at) const;
  /// Inverse of entity_id.
  std::pair<Mask, std::array<int, 3>> entity_address(const EntityId& id) const;
  EntityRef entity_ref(const EntityId& id) const;

  std::array<int, 3> cell_index(int cell) const;
  CellFrame cell_frame(int cell) const;
  EntityId global_entity(int cell, const LocalEntity& local) const;

  /// Cells containing the entity, ascending.
  std::vector<int> cells_of(const EntityId& id) const;
  /// For a face, the cells on its low and high side (-1 at the boundary).
  std::array<int, 2> face_neighbors(const EntityId& face) const;
  bool is_boundary(const EntityId& id) const;

  std::vector<EntityId> interior_faces() const;

 private:
  std::array<int, 3> extent(Mask mask) const;
  int mask_offset(Mask mask) const;

  std::array<std::vector<Rational>, 3> breaks_;
  std::array<int, 3> n_{};
};

/// V - E + F - T.
int euler_characteristic(const CuboidMesh& mesh);

/// Mask order used in entity numbering within a kind.
const std::vector<Mask>& masks_of_kind(EntityKind kind);

}  // namespace cuboid
