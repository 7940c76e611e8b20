// cuboid-complex: verification reports and matrix exports for the cuboid
// gradgrad and elasticity finite element complexes.
//
// JSON goes to stdout, a short summary to stderr. Exit codes: 0 pass,
// 1 verification failure, 2 usage error.

#include "cuboid/operators.hpp"
#include "cuboid/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace cuboid;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

struct MeshOptions {
  std::string cells = "1,1,1";
  std::array<std::string, 3> breakpoints;

  CuboidMesh build() const {
    const auto parts = split(cells);
    if (parts.size() != 3) throw UsageError("--mesh expects nx,ny,nz");
    std::array<std::vector<Rational>, 3> breaks;
    for (int a = 0; a < 3; ++a) {
      if (!breakpoints[a].empty()) {
        for (const auto& p : split(breakpoints[a])) breaks[a].push_back(parse_rational(p));
        continue;
      }
      int n = 0;
      try {
        n = std::stoi(parts[a]);
      } catch (const std::exception&) {
        throw UsageError("--mesh entry '" + parts[a] + "' is not an integer");
      }
      if (n < 1) throw UsageError("--mesh counts must be positive");
      for (int i = 0; i <= n; ++i) breaks[a].push_back(Rational(i, n));
    }
    return CuboidMesh(breaks[0], breaks[1], breaks[2]);
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--mesh", cells, "Cells per axis, nx,ny,nz")->capture_default_str();
    cmd->add_option("--breakpoints-x", breakpoints[0], "Explicit x breakpoints a,b,c (p/q allowed)");
    cmd->add_option("--breakpoints-y", breakpoints[1], "Explicit y breakpoints");
    cmd->add_option("--breakpoints-z", breakpoints[2], "Explicit z breakpoints");
  }
};

json mesh_json(const CuboidMesh& m) { return {m.cells_along(0), m.cells_along(1), m.cells_along(2)}; }

Family family_arg(const std::string& name) {
  try {
    return parse_family(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

ComplexSpec complex_arg(const std::string& name, int k) {
  try {
    return complex_spec(name, k);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

FamilyId family_id(const std::string& name, int k) {
  FamilyId id{family_arg(name), k};
  try {
    id.require_admissible();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return id;
}

int emit(const json& j, bool ok) {
  std::cout << j.dump(2) << '\n';
  return ok ? kPass : kFail;
}

int cmd_unisolvence(const std::string& family, int k) {
  const FamilyId id = family_id(family, k);
  const UnisolvenceReport r = check_unisolvence(id);
  std::cerr << id.to_string() << ": " << r.dof_count << " DOFs, dimension " << r.dimension << ", rank " << r.rank
            << (r.nonsingular ? " -> unisolvent\n" : " -> NOT unisolvent\n");
  return emit({{"family", family},
               {"k", k},
               {"square", r.square},
               {"nonsingular", r.nonsingular},
               {"rank", r.rank},
               {"dimension", r.dimension},
               {"dof_count", r.dof_count}},
              r.nonsingular);
}

int cmd_complex(const std::string& name, int k, const MeshOptions& mo, bool use_float, std::uint64_t seed) {
  const ComplexSpec spec = complex_arg(name, k);
  const CuboidMesh mesh = mo.build();
  const ExactnessReport r = verify_complex(spec, mesh, use_float ? RankMode::floating : RankMode::rational, seed);
  std::cerr << name << " k=" << k << " dims (" << r.dims[0] << ", " << r.dims[1] << ", " << r.dims[2] << ", "
            << r.dims[3] << ") ranks (" << r.ranks[0] << ", " << r.ranks[1] << ", " << r.ranks[2]
            << ") cohomology " << r.cohomology_dim << (r.all_exact() ? " -> exact\n" : " -> NOT exact\n");
  json j = r.to_json();
  j["mesh"] = mesh_json(mesh);
  return emit(j, r.all_exact());
}

int cmd_dims(const std::string& family, int k, const MeshOptions& mo) {
  const FamilyId id = family_id(family, k);
  const CuboidMesh mesh = mo.build();
  const DimensionCheck d = verify_dimensions(id, mesh);
  std::cerr << id.to_string() << ": formula " << d.formula << ", assembled " << d.assembled
            << (d.match ? "" : "  MISMATCH") << '\n';
  return emit({{"family", family},
               {"k", k},
               {"mesh", mesh_json(mesh)},
               {"formula", d.formula},
               {"assembled", d.assembled},
               {"match", d.match}},
              d.match);
}

int cmd_export(const std::string& name, const std::string& edge, int k, const MeshOptions& mo, bool use_float,
               const std::string& out) {
  const ComplexSpec spec = complex_arg(name, k);
  int which = -1;
  for (int i = 0; i < 3; ++i)
    if (operator_name(spec.ops[i]) == edge) which = i;
  if (which < 0) {
    std::string names;
    for (auto op : spec.ops) names += " " + std::string(operator_name(op));
    throw UsageError("edge '" + edge + "' is not in " + name + "; choose one of" + names);
  }
  const CuboidMesh mesh = mo.build();
  const GlobalSpace src = assemble_space(spec.spaces[which], mesh);
  const GlobalSpace dst = assemble_space(spec.spaces[which + 1], mesh);
  const SparseMatrix m = operator_matrix(src, spec.ops[which], dst);
  if (out.empty() || out == "-") {
    write_matrix_market(std::cout, m, use_float);
  } else {
    std::ofstream f(out);
    if (!f) throw UsageError("cannot open '" + out + "' for writing");
    write_matrix_market(f, m, use_float);
  }
  std::cerr << name << " " << edge << ": " << m.rows() << "x" << m.cols() << ", " << m.nnz() << " nonzeros\n";
  if (out.empty() || out == "-") return kPass;
  return emit({{"complex", name},
               {"edge", edge},
               {"k", k},
               {"mesh", mesh_json(mesh)},
               {"rows", m.rows()},
               {"cols", m.cols()},
               {"nnz", m.nnz()},
               {"format", use_float ? "float" : "rational"},
               {"path", out}},
              true);
}

int cmd_identities(int k, int count, std::uint64_t seed) {
  if (k < 1) throw UsageError("--k must be positive");
  std::mt19937_64 rng(seed);
  int failures = 0;
  for (int i = 0; i < count; ++i) {
    const auto [r1, r2] = check_identity_curl_symgrad(random_vector_field(k, rng));
    if (!r1.is_zero() || !r2.is_zero()) ++failures;
  }
  std::cerr << "curl sym grad identities, k=" << k << ": " << count - failures << "/" << count << " exact\n";
  return emit({{"k", k}, {"fields", count}, {"failures", failures}, {"all_zero", failures == 0}, {"seed", seed}},
              failures == 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification of cuboid gradgrad and elasticity finite element complexes"};
  app.require_subcommand(1);

  std::string family, complex_name, edge, out;
  int k = 0, count = 50;
  bool use_float = false;
  std::uint64_t seed = 20240601;
  MeshOptions mesh;

  auto* uni = app.add_subcommand("unisolvence", "Check local unisolvence of one element family");
  uni->add_option("--family", family, "u, sigma, xi, q, sigma-red, xi-red, q-red, x, phi, gamma, gamma-red, z, z-red")
      ->required();
  uni->add_option("--k", k, "Polynomial order")->required();

  auto* cpx = app.add_subcommand("complex", "Verify exactness of a discrete complex");
  cpx->add_option("--complex", complex_name, "gradgrad, gradgrad-reduced, elasticity, elasticity-reduced")->required();
  cpx->add_option("--k", k, "Polynomial order")->required();
  mesh.attach(cpx);
  cpx->add_flag("--float", use_float, "Floating-point SVD ranks instead of exact ones");
  cpx->add_option("--seed", seed, "Seed recorded in the report")->capture_default_str();

  auto* dims = app.add_subcommand("dims", "Compare assembled dimension with the closed form");
  dims->add_option("--family", family)->required();
  dims->add_option("--k", k)->required();
  mesh.attach(dims);

  auto* exp = app.add_subcommand("export", "Write one operator matrix in Matrix Market format");
  exp->add_option("--complex", complex_name)->required();
  exp->add_option("--edge", edge, "gradgrad, curl, div, symgrad, curlcurlT")->required();
  exp->add_option("--k", k)->required();
  mesh.attach(exp);
  exp->add_flag("--float", use_float, "Write doubles instead of p/q rationals");
  exp->add_option("-o,--output", out, "Output path (stdout when omitted)");

  auto* ids = app.add_subcommand("identities", "Check curl sym grad identities on random fields");
  ids->add_option("--k", k)->required();
  ids->add_option("--count", count)->capture_default_str();
  ids->add_option("--seed", seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*uni) return cmd_unisolvence(family, k);
    if (*cpx) return cmd_complex(complex_name, k, mesh, use_float, seed);
    if (*dims) return cmd_dims(family, k, mesh);
    if (*exp) return cmd_export(complex_name, edge, k, mesh, use_float, out);
    if (*ids) return cmd_identities(k, count, seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConsistencyError& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kFail;
  } catch (const std::invalid_argument& e) {
    // Malformed rationals or breakpoints.
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
