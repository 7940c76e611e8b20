#include "cuboid/mesh.hpp"

#include <doctest.h>

#include <map>

using namespace cuboid;

namespace {

// Entity counts of an nx x ny x nz grid, summed over the three directions.
std::array<int, 4> counts(int nx, int ny, int nz) {
  const int V = (nx + 1) * (ny + 1) * (nz + 1);
  const int E = nx * (ny + 1) * (nz + 1) + (nx + 1) * ny * (nz + 1) + (nx + 1) * (ny + 1) * nz;
  const int F = (nx + 1) * ny * nz + nx * (ny + 1) * nz + nx * ny * (nz + 1);
  return {V, E, F, nx * ny * nz};
}

}  // namespace

TEST_CASE("entity counts") {
  const auto unit = CuboidMesh::uniform(1, 1, 1);
  CHECK(unit.num_vertices() == 8);
  CHECK(unit.num_edges() == 12);
  CHECK(unit.num_faces() == 6);
  CHECK(unit.num_cells() == 1);
  const auto m222 = CuboidMesh::uniform(2, 2, 2);
  CHECK(m222.num_vertices() == 27);
  CHECK(m222.num_edges() == 54);
  CHECK(m222.num_faces() == 36);
  CHECK(m222.num_cells() == 8);
  const auto m211 = CuboidMesh::uniform(2, 1, 1);
  CHECK(m211.num_vertices() == 12);
  CHECK(m211.num_edges() == 20);
  CHECK(m211.num_faces() == 11);
  CHECK(m211.num_cells() == 2);
  for (int nx = 1; nx <= 3; ++nx)
    for (int ny = 1; ny <= 3; ++ny)
      for (int nz = 1; nz <= 2; ++nz) {
        const auto m = CuboidMesh::uniform(nx, ny, nz);
        const auto c = counts(nx, ny, nz);
        CHECK(m.num_vertices() == c[0]);
        CHECK(m.num_edges() == c[1]);
        CHECK(m.num_faces() == c[2]);
        CHECK(m.num_cells() == c[3]);
      }
}

TEST_CASE("euler characteristic") {
  CHECK(euler_characteristic(CuboidMesh::uniform(1, 1, 1)) == 1);
  CHECK(euler_characteristic(CuboidMesh::uniform(2, 2, 2)) == 1);
  CHECK(euler_characteristic(CuboidMesh::uniform(3, 2, 1)) == 1);
}

TEST_CASE("breakpoint validation") {
  CHECK_THROWS_AS(CuboidMesh({0, 1}, {0, 1}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(CuboidMesh({0, 1, 1}, {0, 1}, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(CuboidMesh({0, 2, 1}, {0, 1}, {0, 1}), std::invalid_argument);
  const CuboidMesh m({0, make_rational(1, 3), 1}, {0, 1}, {-1, 0, 2});
  CHECK(m.num_cells() == 4);
  CHECK(m.cell_frame(1).size[2] == 2);
}

TEST_CASE("sharing multiplicities") {
  const auto m = CuboidMesh::uniform(3, 2, 2);
  for (auto kind : {EntityKind::vertex, EntityKind::edge, EntityKind::face}) {
    const int limit = kind == EntityKind::vertex ? 8 : kind == EntityKind::edge ? 4 : 2;
    for (int i = 0; i < m.count(kind); ++i) {
      const EntityId id{kind, i};
      const auto cells = m.cells_of(id);
      CHECK(!cells.empty());
      CHECK(static_cast<int>(cells.size()) <= limit);
      if (kind == EntityKind::face) CHECK((cells.size() == 2) == !m.is_boundary(id));
    }
  }
  // Interior faces: exactly two neighbours, low before high.
  for (const auto& f : m.interior_faces()) {
    const auto nb = m.face_neighbors(f);
    CHECK(nb[0] >= 0);
    CHECK(nb[1] >= 0);
    CHECK(m.cells_of(f) == std::vector<int>{std::min(nb[0], nb[1]), std::max(nb[0], nb[1])});
  }
}

TEST_CASE("local to global entity maps are consistent") {
  const auto m = CuboidMesh::uniform(2, 2, 1);
  std::map<EntityId, int> seen;
  for (int c = 0; c < m.num_cells(); ++c) {
    const CellFrame f = m.cell_frame(c);
    for (const auto& local : local_entities()) {
      const EntityId id = m.global_entity(c, local);
      CHECK(id.kind == local.kind());
      ++seen[id];
      // The global extent sits on the cell at the local position.
      const EntityRef ref = m.entity_ref(id);
      for (int a = 0; a < 3; ++a) {
        if (is_free(local.mask, a)) {
          CHECK(ref.lo[a] == f.origin[a]);
          CHECK(ref.hi[a] == f.origin[a] + f.size[a]);
        } else {
          CHECK(ref.lo[a] == f.origin[a] + local.side[a] * f.size[a]);
        }
      }
      const auto [mask, at] = m.entity_address(id);
      CHECK(m.entity_id(mask, at) == id);
    }
  }
  CHECK(static_cast<int>(seen.size()) == m.num_vertices() + m.num_edges() + m.num_faces() + m.num_cells());
  CHECK(local_entities().size() == 27);
}

TEST_CASE("numbering is lexicographic with z fastest") {
  const auto m = CuboidMesh::uniform(2, 3, 4);
  CHECK(m.cell_index(0) == std::array<int, 3>{0, 0, 0});
  CHECK(m.cell_index(1) == std::array<int, 3>{0, 0, 1});
  CHECK(m.cell_index(4) == std::array<int, 3>{0, 1, 0});
  CHECK(m.cell_index(12) == std::array<int, 3>{1, 0, 0});
  // Edges: all e_x first, then e_y, then e_z.
  const EntityRef first = m.entity_ref({EntityKind::edge, 0});
  CHECK(first.tag_name() == "e_x");
  const EntityRef last = m.entity_ref({EntityKind::edge, m.num_edges() - 1});
  CHECK(last.tag_name() == "e_z");
  CHECK(m.entity_ref({EntityKind::face, 0}).tag_name() == "F_yz");
  CHECK(m.entity_ref({EntityKind::face, m.num_faces() - 1}).tag_name() == "F_xy");
}
