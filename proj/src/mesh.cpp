#include "cuboid/mesh.hpp"

#include <algorithm>
#include <stdexcept>

namespace cuboid {

const std::vector<Mask>& masks_of_kind(EntityKind kind) {
  static const std::vector<Mask> vertex{0};
  static const std::vector<Mask> edge{kFreeX, kFreeY, kFreeZ};
  static const std::vector<Mask> face{kFreeY | kFreeZ, kFreeX | kFreeZ, kFreeX | kFreeY};
  static const std::vector<Mask> cell{kFreeX | kFreeY | kFreeZ};
  switch (kind) {
    case EntityKind::vertex:
      return vertex;
    case EntityKind::edge:
      return edge;
    case EntityKind::face:
      return face;
    case EntityKind::cell:
      return cell;
  }
  return vertex;
}

int LocalEntity::order() const {
  const auto& masks = masks_of_kind(kind());
  const int slot = static_cast<int>(std::find(masks.begin(), masks.end(), mask) - masks.begin());
  static constexpr int kKindBase[] = {0, 8, 20, 26};
  int within = 0;
  for (int a = 0; a < 3; ++a)
    if (!is_free(mask, a)) within = within * 2 + side[a];
  const int per_mask = 1 << (3 - free_count(mask));
  return kKindBase[static_cast<int>(kind())] + slot * per_mask + within;
}

std::vector<LocalEntity> local_entities_with_mask(Mask mask) {
  std::vector<LocalEntity> out;
  std::vector<int> fixed;
  for (int a = 0; a < 3; ++a)
    if (!is_free(mask, a)) fixed.push_back(a);
  const int n = 1 << fixed.size();
  for (int bits = 0; bits < n; ++bits) {
    LocalEntity le;
    le.mask = mask;
    for (std::size_t i = 0; i < fixed.size(); ++i)
      le.side[fixed[i]] = (bits >> (fixed.size() - 1 - i)) & 1;
    out.push_back(le);
  }
  return out;
}

const std::vector<LocalEntity>& local_entities() {
  static const std::vector<LocalEntity> all = [] {
    std::vector<LocalEntity> v;
    for (auto kind : {EntityKind::vertex, EntityKind::edge, EntityKind::face, EntityKind::cell})
      for (Mask m : masks_of_kind(kind))
        for (const auto& le : local_entities_with_mask(m)) v.push_back(le);
    return v;
  }();
  return all;
}

// ---------------------------------------------------------------------------

CuboidMesh::CuboidMesh(std::vector<Rational> bx, std::vector<Rational> by, std::vector<Rational> bz)
    : breaks_{std::move(bx), std::move(by), std::move(bz)} {
  for (int a = 0; a < 3; ++a) {
    const auto& b = breaks_[a];
    if (b.size() < 2)
      throw std::invalid_argument(std::string("need at least two breakpoints along ") +
                                  axis_name(a));
    for (std::size_t i = 1; i < b.size(); ++i)
      if (!(b[i - 1] < b[i]))
        throw std::invalid_argument(std::string("breakpoints along ") + axis_name(a) +
                                    " are not strictly increasing");
    n_[a] = static_cast<int>(b.size()) - 1;
  }
}

CuboidMesh CuboidMesh::uniform(int nx, int ny, int nz) {
  auto line = [](int n) {
    if (n < 1) throw std::invalid_argument("cell counts must be positive");
    std::vector<Rational> b;
    for (int i = 0; i <= n; ++i) b.push_back(make_rational(i, n));
    return b;
  };
  return CuboidMesh(line(nx), line(ny), line(nz));
}

std::array<int, 3> CuboidMesh::extent(Mask mask) const {
  std::array<int, 3> e{};
  for (int a = 0; a < 3; ++a) e[a] = is_free(mask, a) ? n_[a] : n_[a] + 1;
  return e;
}

int CuboidMesh::mask_offset(Mask mask) const {
  const auto kind = static_cast<EntityKind>(free_count(mask));
  int offset = 0;
  for (Mask m : masks_of_kind(kind)) {
    if (m == mask) return offset;
    const auto e = extent(m);
    offset += e[0] * e[1] * e[2];
  }
  throw std::logic_error("unknown mask");
}

int CuboidMesh::count(EntityKind kind) const {
  int total = 0;
  for (Mask m : masks_of_kind(kind)) {
    const auto e = extent(m);
    total += e[0] * e[1] * e[2];
  }
  return total;
}

EntityId CuboidMesh::entity_id(Mask mask, const std::array<int, 3>& at) const {
  const auto e = extent(mask);
  for (int a = 0; a < 3; ++a)
    if (at[a] < 0 || at[a] >= e[a]) throw std::out_of_range("entity grid index out of range");
  return {static_cast<EntityKind>(free_count(mask)),
          mask_offset(mask) + (at[0] * e[1] + at[1]) * e[2] + at[2]};
}

std::pair<Mask, std::array<int, 3>> CuboidMesh::entity_address(const EntityId& id) const {
  int rest = id.index;
  for (Mask m : masks_of_kind(id.kind)) {
    const auto e = extent(m);
    const int n = e[0] * e[1] * e[2];
    if (rest < n) return {m, {rest / (e[1] * e[2]), (rest / e[2]) % e[1], rest % e[2]}};
    rest -= n;
  }
  throw std::out_of_range("entity id out of range");
}

EntityRef CuboidMesh::entity_ref(const EntityId& id) const {
  const auto [mask, at] = entity_address(id);
  EntityRef ref;
  ref.kind = id.kind;
  for (int a = 0; a < 3; ++a) {
    ref.lo[a] = breaks_[a][at[a]];
    ref.hi[a] = is_free(mask, a) ? breaks_[a][at[a] + 1] : breaks_[a][at[a]];
  }
  return ref;
}

std::array<int, 3> CuboidMesh::cell_index(int cell) const {
  if (cell < 0 || cell >= num_cells()) throw std::out_of_range("cell index out of range");
  return {cell / (n_[1] * n_[2]), (cell / n_[2]) % n_[1], cell % n_[2]};
}

CellFrame CuboidMesh::cell_frame(int cell) const {
  const auto at = cell_index(cell);
  CellFrame f;
  for (int a = 0; a < 3; ++a) {
    f.origin[a] = breaks_[a][at[a]];
    f.size[a] = breaks_[a][at[a] + 1] - breaks_[a][at[a]];
  }
  return f;
}

EntityId CuboidMesh::global_entity(int cell, const LocalEntity& local) const {
  auto at = cell_index(cell);
  for (int a = 0; a < 3; ++a)
    if (!is_free(local.mask, a)) at[a] += local.side[a];
  return entity_id(local.mask, at);
}

std::vector<int> CuboidMesh::cells_of(const EntityId& id) const {
  const auto [mask, at] = entity_address(id);
  std::vector<std::array<int, 3>> candidates{at};
  for (int a = 0; a < 3; ++a) {
    if (is_free(mask, a)) continue;
    std::vector<std::array<int, 3>> next;
    for (auto c : candidates) {
      // Fixed coordinate index i touches cells i-1 (entity on their high side) and i.
      for (int d : {-1, 0}) {
        auto cc = c;
        cc[a] += d;
        if (cc[a] >= 0 && cc[a] < n_[a]) next.push_back(cc);
      }
    }
    candidates = std::move(next);
  }
  std::vector<int> cells;
  for (const auto& c : candidates) cells.push_back((c[0] * n_[1] + c[1]) * n_[2] + c[2]);
  std::sort(cells.begin(), cells.end());
  return cells;
}

std::array<int, 2> CuboidMesh::face_neighbors(const EntityId& face) const {
  if (face.kind != EntityKind::face) throw std::invalid_argument("not a face");
  const auto [mask, at] = entity_address(face);
  int normal = 0;
  while (is_free(mask, normal)) ++normal;
  std::array<int, 2> out{-1, -1};
  auto to_cell = [&](std::array<int, 3> c) { return (c[0] * n_[1] + c[1]) * n_[2] + c[2]; };
  if (at[normal] > 0) {
    auto c = at;
    c[normal] -= 1;
    out[0] = to_cell(c);
  }
  if (at[normal] < n_[normal]) out[1] = to_cell(at);
  return out;
}

bool CuboidMesh::is_boundary(const EntityId& id) const {
  const auto [mask, at] = entity_address(id);
  for (int a = 0; a < 3; ++a)
    if (!is_free(mask, a) && (at[a] == 0 || at[a] == n_[a])) return true;
  return false;
}

std::vector<EntityId> CuboidMesh::interior_faces() const {
  std::vector<EntityId> out;
  for (int i = 0; i < num_faces(); ++i) {
    EntityId id{EntityKind::face, i};
    if (!is_boundary(id)) out.push_back(id);
  }
  return out;
}

int euler_characteristic(const CuboidMesh& mesh) {
  return mesh.num_vertices() - mesh.num_edges() + mesh.num_faces() - mesh.num_cells();
}

}  // namespace cuboid
