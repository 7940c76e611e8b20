#include "support.hpp"

#include <doctest.h>

using namespace cuboid;
using testing::modular_rank;

namespace {

std::vector<CuboidMesh> audit_meshes() {
  return {CuboidMesh::uniform(1, 1, 1), CuboidMesh::uniform(2, 1, 1), CuboidMesh::uniform(2, 2, 1),
          CuboidMesh::uniform(2, 2, 2)};
}

// Sum of grid dims over the independent components.
int count_dims(const ShapeSpaceSpec& s) {
  int n = 0;
  for (int c : s.independent) n += s.grid[static_cast<std::size_t>(c)].dim();
  return n;
}

}  // namespace

TEST_CASE("rank examples") {
  CHECK(exact_rank(SparseMatrix(5, 7)) == 0);
  CHECK(exact_rank(SparseMatrix::identity(10)) == 10);
  CHECK(exact_rank(SparseMatrix::identity(10), RankMode::floating) == 10);
  const auto unit = CuboidMesh::uniform(1, 1, 1);
  const SparseMatrix gg =
      operator_matrix(assemble_space({Family::U, 3}, unit), Operator::gradgrad, assemble_space({Family::Sigma, 3}, unit));
  CHECK(exact_rank(gg) == 60);
  CHECK(exact_rank(gg, RankMode::floating) == 60);
  CHECK(modular_rank(gg) == 60);
}

TEST_CASE("rational, float and modular ranks agree on operator matrices") {
  const auto mesh = CuboidMesh::uniform(2, 1, 1);
  for (const auto& name : complex_names()) {
    const ComplexSpec spec = complex_spec(name, name.starts_with("gradgrad") ? 3 : 2);
    for (int e = 0; e < 3; ++e) {
      INFO(name, " edge ", e);
      const SparseMatrix m = operator_matrix(assemble_space(spec.spaces[static_cast<std::size_t>(e)], mesh),
                                             spec.ops[static_cast<std::size_t>(e)],
                                             assemble_space(spec.spaces[static_cast<std::size_t>(e + 1)], mesh));
      const int r = exact_rank(m);
      CHECK(r == exact_rank(m, RankMode::floating));
      CHECK(r == modular_rank(m));
    }
  }
}

TEST_CASE("rank of random sparse matrices matches the modular oracle") {
  std::bernoulli_distribution keep(0.15);
  for (int t = 0; t < 10; ++t) {
    std::vector<Triplet> trip;
    for (int r = 0; r < 40; ++r)
      for (int c = 0; c < 30; ++c)
        if (keep(testing::rng())) trip.push_back({r, c, testing::random_rational(testing::rng())});
    // Append dependent rows.
    auto m = SparseMatrix::from_triplets(40, 30, trip);
    for (const auto& x : m.entries())
      if (x.row < 5) trip.push_back({40 + x.row, x.col, 3 * x.value});
    m = SparseMatrix::from_triplets(45, 30, trip);
    CHECK(exact_rank(m) == modular_rank(m));
    CHECK(exact_rank(m) == exact_rank(to_dense(m)));
  }
}

TEST_CASE("unit cell complexes") {
  const auto unit = CuboidMesh::uniform(1, 1, 1);
  const ExactnessReport gg = verify_complex(complex_spec("gradgrad", 3), unit);
  CHECK(gg.dims == std::array<int, 4>{64, 204, 198, 54});
  CHECK(gg.ranks == std::array<int, 3>{60, 144, 54});
  CHECK(gg.cohomology_dim == 4);
  CHECK(gg.all_exact());
  const ExactnessReport el = verify_complex(complex_spec("elasticity", 2), unit);
  CHECK(el.dims == std::array<int, 4>{144, 204, 102, 36});
  CHECK(el.ranks == std::array<int, 3>{138, 66, 36});
  CHECK(el.cohomology_dim == 6);
  CHECK(el.all_exact());
  const ExactnessReport ggr = verify_complex(complex_spec("gradgrad-reduced", 3), unit);
  CHECK(ggr.dims == std::array<int, 4>{64, 204, 198, 54});
  CHECK(ggr.cohomology_dim == 4);
  CHECK(ggr.all_exact());
  const ExactnessReport elr = verify_complex(complex_spec("elasticity-reduced", 2), unit);
  CHECK(elr.cohomology_dim == 6);
  CHECK(elr.all_exact());
}

TEST_CASE("exactness ladder on two cells, both arithmetic modes") {
  const auto mesh = CuboidMesh::uniform(2, 1, 1);
  for (const auto& name : complex_names()) {
    const int k = name.starts_with("gradgrad") ? 3 : 2;
    const ExactnessReport r = verify_complex(complex_spec(name, k), mesh);
    const ExactnessReport f = verify_complex(complex_spec(name, k), mesh, RankMode::floating);
    CAPTURE(name);
    CHECK(r.all_exact());
    CHECK(r.composition_zero == std::array<bool, 2>{true, true});
    CHECK(r.ranks == f.ranks);
    // Rank-nullity bookkeeping done by hand.
    CHECK(r.dims[0] - r.ranks[0] == r.cohomology_dim);
    CHECK(r.dims[1] - r.ranks[1] == r.ranks[0]);
    CHECK(r.dims[2] - r.ranks[2] == r.ranks[1]);
    CHECK(r.ranks[2] == r.dims[3]);
  }
  const ExactnessReport el = verify_complex(complex_spec("elasticity", 2), mesh);
  CHECK(el.cohomology_dim == 6);
}

TEST_CASE("report json carries the schema keys") {
  const ExactnessReport r = verify_complex(complex_spec("gradgrad", 3), CuboidMesh::uniform(1, 1, 1), RankMode::rational, 7);
  const nlohmann::json j = r.to_json();
  for (const char* key : {"complex", "k", "mesh", "dims", "ranks", "composition_zero", "exact", "cohomology_dim",
                          "elapsed_ms", "arithmetic_mode", "seed"})
    CHECK(j.contains(key));
  CHECK(j["arithmetic_mode"] == "rational");
  CHECK(j["seed"] == 7);
  CHECK(j["mesh"] == nlohmann::json::array({1, 1, 1}));
  CHECK(j["dims"].size() == 4);
}

TEST_CASE("complex_spec rejects unknown names and low orders") {
  CHECK_THROWS_AS(complex_spec("stokes", 3), std::invalid_argument);
  CHECK_THROWS_AS(complex_spec("gradgrad", 2), std::invalid_argument);
  CHECK(complex_spec("elasticity", 2).kernel_dim == 6);
}

TEST_CASE("dimension examples") {
  const auto unit = CuboidMesh::uniform(1, 1, 1);
  CHECK(verify_dimensions({Family::Xi, 3}, unit).formula == 198);
  CHECK(verify_dimensions({Family::XiRed, 3}, unit).formula == 198);
  CHECK(verify_dimensions({Family::Gamma, 2}, unit).formula == 102);
  const auto m = CuboidMesh::uniform(2, 2, 2);
  CHECK(verify_dimensions({Family::U, 3}, m).assembled == 216);
  CHECK(verify_dimensions({Family::Sigma, 3}, m).assembled == 882);
  CHECK(verify_dimensions({Family::Xi, 3}, m).assembled == 970);
  CHECK(verify_dimensions({Family::Q, 3}, m).assembled == 300);
  CHECK(4 - 216 + 882 - 970 + 300 == 0);
}

TEST_CASE("dimension audit on the test meshes") {
  for (const auto& mesh : audit_meshes())
    for (Family f : kAllFamilies)
      for (int k = min_order(f); k <= min_order(f) + 1; ++k) {
        INFO(family_name(f), " k=", k, " cells=", mesh.num_cells());
        const DimensionCheck d = verify_dimensions({f, k}, mesh);
        CHECK(d.match);
        CHECK(d.formula == d.assembled);
      }
}

TEST_CASE("alternating sums vanish up to the kernel") {
  // Independent of the closed forms: kappa - dims alternating = 0 on a box.
  for (const auto& mesh : audit_meshes())
    for (const auto& name : complex_names()) {
      const int k0 = name.starts_with("gradgrad") ? 3 : 2;
      for (int k = k0; k <= k0 + 1; ++k) {
        const ComplexSpec s = complex_spec(name, k);
        long sum = s.kernel_dim;
        for (int i = 0; i < 4; ++i)
          sum += (i % 2 ? 1 : -1) * assemble_space(s.spaces[static_cast<std::size_t>(i)], mesh).ndofs();
        INFO(name, " k=", k);
        CHECK(sum == 0);
      }
    }
}

TEST_CASE("local complexes") {
  const LocalComplexReport gg = verify_local_complex("gradgrad", 3);
  CHECK(gg.dims == std::array<int, 4>{64, 204, 198, 54});
  CHECK(gg.alternating_sum == 4);
  CHECK(gg.exact);
  const LocalComplexReport el = verify_local_complex("elasticity", 2);
  CHECK(el.dims == std::array<int, 4>{144, 204, 102, 36});
  CHECK(el.alternating_sum == 6);
  CHECK(el.exact);
  CHECK(verify_local_complex("gradgrad", 4).exact);
  // Local dims straight from the degree grids.
  CHECK(gg.dims[1] == count_dims(shape_space({Family::Sigma, 3})));
}

TEST_CASE("div preimage examples") {
  const auto unit = CuboidMesh::uniform(1, 1, 1);
  const GlobalSpace q = assemble_space({Family::Q, 3}, unit), xi = assemble_space({Family::Xi, 3}, unit);
  const std::vector<Rational> zero(static_cast<std::size_t>(q.ndofs()), 0);
  for (const auto& t : div_preimage_gradgrad(q, zero, xi)) CHECK(t == 0);

  const auto ex = interpolate(q, [](int, const CellFrame& f) {
    PolyField v(FieldKind::vector3, Structure::none, f);
    v[0] = TensorPoly::constant(1, f);
    return v;
  });
  const PolyField tau = reconstruct_local(xi, div_preimage_gradgrad(q, ex, xi), 0);
  PolyField expect(FieldKind::matrix33, Structure::traceless, {});
  expect.at(0, 1) = TensorPoly::coordinate(1, {});
  CHECK(tau == expect);

  const GlobalSpace z = assemble_space({Family::Z, 2}, unit), gamma = assemble_space({Family::Gamma, 2}, unit);
  const auto qx = interpolate(z, [](int, const CellFrame& f) {
    PolyField v(FieldKind::vector3, Structure::none, f);
    v[0] = TensorPoly::coordinate(0, f);
    return v;
  });
  const PolyField sigma = reconstruct_local(gamma, div_preimage_elasticity(z, qx, gamma), 0);
  PolyField want(FieldKind::matrix33, Structure::symmetric, {});
  want.at(0, 0) = TensorPoly::monomial({2, 0, 0}, make_rational(1, 2));
  CHECK(sigma == want);
}

TEST_CASE("div preimages round trip on random loads") {
  struct Case {
    const char* complex;
    int k;
    CuboidMesh mesh;
  };
  const std::vector<Case> cases{{"gradgrad", 3, CuboidMesh::uniform(2, 2, 2)},
                                {"gradgrad-reduced", 3, CuboidMesh::uniform(2, 1, 1)},
                                {"elasticity", 2, CuboidMesh::uniform(2, 1, 1)},
                                {"elasticity-reduced", 2, CuboidMesh::uniform(2, 2, 1)}};
  for (const auto& c : cases) {
    CAPTURE(c.complex);
    const ComplexSpec s = complex_spec(c.complex, c.k);
    const GlobalSpace src = assemble_space(s.spaces[2], c.mesh), dst = assemble_space(s.spaces[3], c.mesh);
    const SparseMatrix div = operator_matrix(src, Operator::div, dst);
    const bool gradgrad = s.kernel_dim == 4;
    for (int t = 0; t < 10; ++t) {
      const auto q = random_vector(dst.ndofs(), testing::rng());
      const auto p = gradgrad ? div_preimage_gradgrad(dst, q, src) : div_preimage_elasticity(dst, q, src);
      CHECK(div.multiply(p) == q);
    }
  }
}

TEST_CASE("kernel identification") {
  const auto mesh = CuboidMesh::uniform(2, 1, 1);
  for (const char* name : {"gradgrad", "elasticity"}) {
    const KernelCheck k = identify_kernel(complex_spec(name, std::string_view(name) == "gradgrad" ? 3 : 2), mesh);
    CAPTURE(name);
    CHECK(k.interpolants_in_kernel);
    CHECK(k.interpolant_rank == k.expected);
    CHECK(k.nullity == k.expected);
    CHECK(k.combined_rank == k.expected);
    CHECK(k.match);
  }
}

TEST_CASE("random vectors are reproducible and bounded") {
  std::mt19937_64 a(99), b(99);
  const auto x = random_vector(200, a), y = random_vector(200, b);
  CHECK(x == y);
  for (const auto& v : x) {
    CHECK(v >= -9);
    CHECK(v <= 9);
    CHECK(v.get_den() == 1);
  }
}
