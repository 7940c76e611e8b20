// Runs the nine acceptance criteria and prints one PASS/FAIL line each.
// Exit status is nonzero when any criterion fails.

#include "support.hpp"

#include "cuboid/operators.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace cuboid;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

int order_of(const std::string& complex) { return complex.starts_with("gradgrad") ? 3 : 2; }

std::string mesh_name(const CuboidMesh& m) {
  return std::to_string(m.cells_along(0)) + "x" + std::to_string(m.cells_along(1)) + "x" +
         std::to_string(m.cells_along(2));
}

// Ranks forced by exactness: the first operator loses kappa, every later
// one loses exactly the previous image, the last is onto.
std::array<int, 3> forced_ranks(const std::array<int, 4>& dims, int kappa) {
  const int r0 = dims[0] - kappa;
  const int r1 = dims[1] - r0;
  const int r2 = dims[2] - r1;
  return {r0, r1, r2};
}

std::array<int, 4> formula_dims(const ComplexSpec& spec, const CuboidMesh& mesh) {
  std::array<int, 4> d{};
  for (int i = 0; i < 4; ++i) d[static_cast<std::size_t>(i)] = static_cast<int>(dimension_formula(spec.spaces[static_cast<std::size_t>(i)], mesh));
  return d;
}

// Reports reused by criteria 3 and 4.
std::map<std::pair<std::string, std::string>, ExactnessReport> g_rational;
std::map<std::pair<std::string, std::string>, ExactnessReport> g_float;

const ExactnessReport& report(const std::string& complex, const CuboidMesh& mesh, RankMode mode) {
  auto& cache = mode == RankMode::rational ? g_rational : g_float;
  const auto key = std::make_pair(complex, mesh_name(mesh));
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, verify_complex(complex_spec(complex, order_of(complex)), mesh, mode, 20240601)).first;
  return it->second;
}

void criterion_unisolvence(Outcome& o) {
  const auto t0 = Clock::now();
  int pass = 0, total = 0;
  for (Family f : kAllFamilies)
    for (int k = min_order(f); k <= min_order(f) + 1; ++k) {
      ++total;
      const UnisolvenceReport r = check_unisolvence({f, k});
      const bool ok = r.square && r.nonsingular && r.rank == shape_space({f, k}).dimension();
      pass += ok;
      o.require(ok, FamilyId{f, k}.to_string());
    }
  const double s = seconds_since(t0);
  o.require(total == 26, "26 cases");
  o.require(s < 60, "runtime under 60 s");
  o.detail << pass << "/" << total << " nonsingular in " << s << " s";
}

void criterion_dimensions(Outcome& o) {
  const std::vector<CuboidMesh> meshes{CuboidMesh::uniform(1, 1, 1), CuboidMesh::uniform(2, 1, 1),
                                       CuboidMesh::uniform(2, 2, 1), CuboidMesh::uniform(2, 2, 2)};
  int checks = 0;
  for (const auto& mesh : meshes)
    for (Family f : kAllFamilies)
      for (int k = min_order(f); k <= min_order(f) + 1; ++k) {
        const DimensionCheck d = verify_dimensions({f, k}, mesh);
        o.require(d.match && d.formula == d.assembled,
                  FamilyId{f, k}.to_string() + " on " + mesh_name(mesh) + ": formula " + std::to_string(d.formula) +
                      " vs assembled " + std::to_string(d.assembled));
        ++checks;
      }
  const auto m = CuboidMesh::uniform(2, 2, 2);
  const int u = assemble_space({Family::U, 3}, m).ndofs(), s = assemble_space({Family::Sigma, 3}, m).ndofs(),
            x = assemble_space({Family::Xi, 3}, m).ndofs(), q = assemble_space({Family::Q, 3}, m).ndofs();
  o.require(u == 216 && s == 882 && x == 970 && q == 300, "spot values on 2x2x2");
  o.require(4 - u + s - x + q == 0, "alternating sum");
  o.detail << checks << " family/order/mesh audits; 2x2x2 k=3: " << u << ", " << s << ", " << x << ", " << q
           << "; 4 - " << u << " + " << s << " - " << x << " + " << q << " = " << 4 - u + s - x + q;
}

void criterion_compositions(Outcome& o) {
  const std::vector<CuboidMesh> meshes{CuboidMesh::uniform(1, 1, 1), CuboidMesh::uniform(2, 1, 1),
                                       CuboidMesh::uniform(2, 2, 1), CuboidMesh::uniform(2, 2, 2)};
  int n = 0;
  for (const auto& mesh : meshes)
    for (const auto& name : complex_names()) {
      const ExactnessReport& r = report(name, mesh, RankMode::rational);
      o.require(r.composition_zero[0] && r.composition_zero[1], name + " on " + mesh_name(mesh));
      n += 2;
    }
  o.detail << n << " composed matrices exactly zero";
}

void criterion_exactness(Outcome& o) {
  const auto unit = CuboidMesh::uniform(1, 1, 1);
  const ExactnessReport& gg = report("gradgrad", unit, RankMode::rational);
  o.require(gg.ranks == std::array<int, 3>{60, 144, 54} && gg.cohomology_dim == 4, "gradgrad unit ranks");
  const ExactnessReport& el = report("elasticity", unit, RankMode::rational);
  o.require(el.ranks == std::array<int, 3>{138, 66, 36} && el.cohomology_dim == 6, "elasticity unit ranks");
  const auto t0 = Clock::now();
  int ladders = 0;
  for (const auto& mesh : {unit, CuboidMesh::uniform(2, 1, 1), CuboidMesh::uniform(2, 2, 2)})
    for (const auto& name : complex_names()) {
      const ComplexSpec spec = complex_spec(name, order_of(name));
      const ExactnessReport& r = report(name, mesh, RankMode::rational);
      const ExactnessReport& f = report(name, mesh, RankMode::floating);
      const std::string where = name + " on " + mesh_name(mesh);
      o.require(r.all_exact(), where + " exact");
      o.require(r.cohomology_dim == spec.kernel_dim, where + " cohomology");
      o.require(r.ranks == forced_ranks(formula_dims(spec, mesh), spec.kernel_dim), where + " forced ranks");
      o.require(r.ranks == f.ranks, where + " float ranks agree");
      ++ladders;
    }
  o.detail << ladders << " ladders exact, float agrees; gradgrad unit ranks (" << gg.ranks[0] << "," << gg.ranks[1]
           << "," << gg.ranks[2] << "), elasticity unit ranks (" << el.ranks[0] << "," << el.ranks[1] << ","
           << el.ranks[2] << "); " << seconds_since(t0) << " s";
}

void criterion_kernel(Outcome& o) {
  int n = 0;
  for (const auto& mesh : {CuboidMesh::uniform(1, 1, 1), CuboidMesh::uniform(2, 1, 1), CuboidMesh::uniform(2, 2, 2)})
    for (const auto& name : complex_names()) {
      const KernelCheck k = identify_kernel(complex_spec(name, order_of(name)), mesh);
      const bool ok = k.interpolants_in_kernel && k.interpolant_rank == k.expected && k.nullity == k.expected &&
                      k.combined_rank == k.expected;
      o.require(ok, name + " on " + mesh_name(mesh));
      ++n;
    }
  o.detail << n << " kernels equal the interpolated affine / rigid motion span";
}

void criterion_surjectivity(Outcome& o) {
  std::mt19937_64 rng(20240601);
  int n = 0;
  for (const auto& mesh : {CuboidMesh::uniform(1, 1, 1), CuboidMesh::uniform(2, 1, 1), CuboidMesh::uniform(2, 2, 2)})
    for (const auto& name : complex_names()) {
      const ComplexSpec s = complex_spec(name, order_of(name));
      const GlobalSpace src = assemble_space(s.spaces[2], mesh), dst = assemble_space(s.spaces[3], mesh);
      const SparseMatrix div = operator_matrix(src, Operator::div, dst);
      for (int t = 0; t < 10; ++t) {
        const auto q = random_vector(dst.ndofs(), rng);
        try {
          const auto p = s.kernel_dim == 4 ? div_preimage_gradgrad(dst, q, src) : div_preimage_elasticity(dst, q, src);
          o.require(div.multiply(p) == q, name + " on " + mesh_name(mesh) + " round trip");
        } catch (const ConsistencyError& e) {
          o.require(false, name + " on " + mesh_name(mesh) + ": " + e.what());
        }
        ++n;
      }
    }
  o.detail << n << " preimages, div(preimage) = q exactly";
}

void criterion_conformity(Outcome& o) {
  const auto mesh = CuboidMesh::uniform(2, 2, 2);
  std::mt19937_64 rng(20240601);
  int quantities = 0;
  for (Family f : kAllFamilies) {
    const GlobalSpace s = assemble_space({f, min_order(f)}, mesh);
    for (int t = 0; t < 5; ++t) {
      const auto v = random_vector(s.ndofs(), rng);
      for (const auto& q : testing::conformity(f)) {
        o.require(testing::jumps_vanish(s, v, q), std::string(family_name(f)) + " component " +
                                                      component_name(s.element().space().kind, q.component));
        ++quantities;
      }
    }
  }
  const GlobalSpace red = assemble_space({Family::SigmaRed, 3}, mesh);
  bool nonzero = false;
  for (int t = 0; t < 5 && !nonzero; ++t)
    nonzero = !testing::jumps_vanish(red, random_vector(red.ndofs(), rng), {matrix_component(0, 0), {0, 0, 0}, {0}});
  o.require(nonzero, "negative control");
  o.detail << quantities << " traced quantities continuous; sigma-red xx jumps across F_yz: "
           << (nonzero ? "yes" : "no");
}

void criterion_bubbles(Outcome& o) {
  for (int k = 3; k <= 5; ++k) {
    const BubbleBasis b = bubble_basis_divT(k);
    o.require(static_cast<int>(b.triples.size()) == 2 * (k - 2) * (k - 2) * (k + 1), "count at k=" + std::to_string(k));
    for (const auto& t : b.triples) {
      o.require((t[0] + t[1] + t[2]).is_zero(), "sum to zero");
      for (int a = 0; a < 3; ++a)
        for (int side = 0; side < 2; ++side) {
          EntityRef face;
          face.kind = EntityKind::face;
          face.lo = {0, 0, 0};
          face.hi = {1, 1, 1};
          face.lo[a] = face.hi[a] = side;
          o.require(trace(t[static_cast<std::size_t>(a)], face).is_zero(), "face trace");
        }
    }
    o.detail << "k=" << k << ": " << b.triples.size() << (k < 5 ? ", " : "");
  }
}

void criterion_identities(Outcome& o) {
  std::mt19937_64 rng(20240601);
  for (int k = 2; k <= 3; ++k) {
    int zero = 0;
    for (int i = 0; i < 50; ++i) {
      const auto [a, b] = check_identity_curl_symgrad(random_vector_field(k, rng));
      zero += a.is_zero() && b.is_zero();
    }
    o.require(zero == 50, "k=" + std::to_string(k));
    o.detail << "k=" << k << ": " << zero << "/50 exact" << (k == 2 ? ", " : "");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"unisolvence sweep", criterion_unisolvence},
      {"dimension audit", criterion_dimensions},
      {"complex property", criterion_compositions},
      {"exactness ladders", criterion_exactness},
      {"kernel identification", criterion_kernel},
      {"constructive surjectivity", criterion_surjectivity},
      {"conformity and jumps", criterion_conformity},
      {"bubble space", criterion_bubbles},
      {"curl sym grad identity", criterion_identities},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail.str()
              << " (" << seconds_since(t0) << " s)" << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
