#include "cuboid/verify.hpp"

#include "cuboid/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <numeric>

namespace cuboid {

std::string_view rank_mode_name(RankMode mode) { return mode == RankMode::rational ? "rational" : "float"; }

namespace {

using IntRow = std::vector<std::pair<int, Integer>>;

void remove_content(IntRow& row) {
  Integer g = 0;
  for (const auto& [c, v] : row) {
    g = gcd(g, v);
    if (g == 1) return;
  }
  if (g > 1)
    for (auto& [c, v] : row) v /= g;
}

const Integer* find_in(const IntRow& row, int col) {
  const auto it = std::lower_bound(row.begin(), row.end(), col,
                                   [](const std::pair<int, Integer>& e, int c) { return e.first < c; });
  return it != row.end() && it->first == col ? &it->second : nullptr;
}

int rational_rank(const SparseMatrix& m) {
  std::vector<IntRow> rows(static_cast<std::size_t>(m.rows()));
  {
    std::vector<std::vector<const Triplet*>> by_row(static_cast<std::size_t>(m.rows()));
    for (const auto& t : m.entries()) by_row[t.row].push_back(&t);
    for (int r = 0; r < m.rows(); ++r) {
      Integer l = 1;
      for (const Triplet* t : by_row[r]) l = lcm(l, Integer(t->value.get_den()));
      for (const Triplet* t : by_row[r]) rows[r].emplace_back(t->col, Integer(t->value.get_num() * (l / t->value.get_den())));
      remove_content(rows[r]);
    }
  }

  const int ncols = m.cols();
  std::vector<int> count(static_cast<std::size_t>(ncols), 0);
  std::vector<std::vector<int>> col_rows(static_cast<std::size_t>(ncols));
  std::vector<bool> active(rows.size(), true);
  for (int r = 0; r < m.rows(); ++r)
    for (const auto& [c, v] : rows[r]) {
      ++count[c];
      col_rows[c].push_back(r);
    }

  std::vector<int> stamp(rows.size(), -1);
  int rank = 0;
  for (;;) {
    int col = -1;
    for (int c = 0; c < ncols; ++c)
      if (count[c] > 0 && (col < 0 || count[c] < count[col])) col = c;
    if (col < 0) break;

    std::vector<int> holders;
    for (int r : col_rows[col])
      if (active[r] && stamp[r] != col && find_in(rows[r], col)) {
        stamp[r] = col;
        holders.push_back(r);
      }
    col_rows[col].clear();
    const int pivot = *std::min_element(holders.begin(), holders.end(),
                                        [&](int a, int b) { return rows[a].size() < rows[b].size(); });
    active[pivot] = false;
    for (const auto& [c, v] : rows[pivot]) --count[c];
    const IntRow& p = rows[pivot];
    const Integer b = *find_in(p, col);

    for (int r : holders) {
      if (r == pivot) continue;
      IntRow& old = rows[r];
      const Integer a = *find_in(old, col);
      for (const auto& [c, v] : old) --count[c];
      IntRow merged;
      merged.reserve(old.size() + p.size());
      std::size_t i = 0, j = 0;
      while (i < old.size() || j < p.size()) {
        if (j == p.size() || (i < old.size() && old[i].first < p[j].first)) {
          merged.emplace_back(old[i].first, b * old[i].second);
          ++i;
        } else if (i == old.size() || p[j].first < old[i].first) {
          merged.emplace_back(p[j].first, -a * p[j].second);
          col_rows[p[j].first].push_back(r);
          ++j;
        } else {
          Integer v = b * old[i].second - a * p[j].second;
          if (v != 0) merged.emplace_back(old[i].first, std::move(v));
          ++i;
          ++j;
        }
      }
      remove_content(merged);
      for (const auto& [c, v] : merged) ++count[c];
      old = std::move(merged);
    }
    ++rank;
  }
  return rank;
}

int float_rank(const SparseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (const auto& t : m.entries()) a(t.row, t.col) = t.value.get_d();
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = 1e-9 * s(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++rank;
  return rank;
}

long pow_l(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

int exact_rank(const SparseMatrix& m, RankMode mode) {
  return mode == RankMode::rational ? rational_rank(m) : float_rank(m);
}

RationalMatrix to_dense(const SparseMatrix& m) {
  RationalMatrix d(m.rows(), m.cols());
  for (const auto& t : m.entries()) d(t.row, t.col) = t.value;
  return d;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& complex_names() {
  static const std::vector<std::string> names{"gradgrad", "gradgrad-reduced", "elasticity", "elasticity-reduced"};
  return names;
}

ComplexSpec complex_spec(std::string_view name, int k) {
  ComplexSpec s;
  s.name = std::string(name);
  s.k = k;
  if (name == "gradgrad" || name == "gradgrad-reduced") {
    const bool red = name == "gradgrad-reduced";
    s.spaces = {FamilyId{Family::U, k}, FamilyId{red ? Family::SigmaRed : Family::Sigma, k},
                FamilyId{red ? Family::XiRed : Family::Xi, k}, FamilyId{red ? Family::QRed : Family::Q, k}};
    s.ops = {Operator::gradgrad, Operator::curl, Operator::div};
    s.kernel_dim = 4;
  } else if (name == "elasticity" || name == "elasticity-reduced") {
    const bool red = name == "elasticity-reduced";
    s.spaces = {FamilyId{Family::X, k}, FamilyId{Family::Phi, k}, FamilyId{red ? Family::GammaRed : Family::Gamma, k},
                FamilyId{red ? Family::ZRed : Family::Z, k}};
    s.ops = {Operator::sym_grad, Operator::curl_curlT, Operator::div};
    s.kernel_dim = 6;
  } else {
    throw std::invalid_argument("unknown complex '" + std::string(name) + "'");
  }
  for (const auto& f : s.spaces) f.require_admissible();
  return s;
}

bool ExactnessReport::all_exact() const {
  return composition_zero[0] && composition_zero[1] && std::all_of(exact.begin(), exact.end(), [](bool b) { return b; });
}

nlohmann::json ExactnessReport::to_json() const {
  return {{"complex", complex},
          {"k", k},
          {"mesh", mesh},
          {"dims", dims},
          {"ranks", ranks},
          {"composition_zero", composition_zero},
          {"exact", exact},
          {"cohomology_dim", cohomology_dim},
          {"elapsed_ms", elapsed_ms},
          {"arithmetic_mode", rank_mode_name(mode)},
          {"seed", seed}};
}

ExactnessReport verify_complex(const ComplexSpec& spec, const CuboidMesh& mesh, RankMode mode, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  ExactnessReport r;
  r.complex = spec.name;
  r.k = spec.k;
  r.mesh = {mesh.cells_along(0), mesh.cells_along(1), mesh.cells_along(2)};
  r.mode = mode;
  r.seed = seed;

  std::vector<GlobalSpace> spaces;
  for (const auto& f : spec.spaces) spaces.push_back(assemble_space(f, mesh));
  std::vector<SparseMatrix> d;
  for (int i = 0; i < 3; ++i) d.push_back(operator_matrix(spaces[i], spec.ops[i], spaces[i + 1]));
  for (int i = 0; i < 4; ++i) r.dims[i] = spaces[i].ndofs();
  for (int i = 0; i < 2; ++i) r.composition_zero[i] = (d[i + 1] * d[i]).is_zero();

  parallel_for(3, [&](int i) { r.ranks[i] = exact_rank(d[i], mode); });
  for (int i = 0; i < 3; ++i) r.nullities[i] = r.dims[i] - r.ranks[i];

  r.exact[0] = r.nullities[0] == spec.kernel_dim;
  r.exact[1] = r.nullities[1] == r.ranks[0];
  r.exact[2] = r.nullities[2] == r.ranks[1];
  r.exact[3] = r.ranks[2] == r.dims[3];
  r.cohomology_dim = r.nullities[0];
  r.surjective = r.exact[3];
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------

long dimension_formula(const FamilyId& id, const CuboidMesh& mesh) {
  id.require_admissible();
  const long V = mesh.num_vertices(), E = mesh.num_edges(), F = mesh.num_faces(), T = mesh.num_cells();
  const long k = id.k;
  switch (id.family) {
    case Family::U:
      return 8 * V + 4 * (k - 3) * E + 2 * pow_l(k - 3, 2) * F + pow_l(k - 3, 3) * T;
    case Family::Sigma:
      return (4 * (k - 1) * E + 4 * (k - 1) * (k - 3) * F + 3 * (k - 1) * pow_l(k - 3, 2) * T) +
             (6 * V + 4 * (k - 2) * E + (k - 3) * E + 2 * (k - 2) * (2 * k - 5) * F + 3 * pow_l(k - 2, 2) * (k - 3) * T);
    case Family::Xi:
      return (2 * V + 2 * (k - 2) * E + 2 * pow_l(k - 2, 2) * F + 2 * pow_l(k - 2, 3) * T) +
             (4 * (k - 1) * E + 2 * (k - 1) * (k - 3) * F + 4 * (k - 1) * (k - 2) * F +
              6 * (k - 1) * (k - 2) * (k - 3) * T);
    case Family::Q:
      return (k - 1) * E + 2 * (k - 1) * (k - 2) * F + 3 * (k - 1) * pow_l(k - 2, 2) * T;
    case Family::SigmaRed:
      return ((k - 1) * E + 2 * pow_l(k - 1, 2) * F + 3 * pow_l(k - 1, 3) * T) +
             (6 * V + 4 * (k - 2) * E + (k - 3) * E + pow_l(k - 2, 2) * F + 2 * (k - 2) * (k - 3) * F +
              3 * pow_l(k - 2, 2) * (k - 1) * T);
    case Family::XiRed:
      return (2 * V + 2 * (k - 2) * E + pow_l(k - 2, 2) * F + 2 * pow_l(k - 2, 2) * (k + 1) * T) +
             (2 * (k - 1) * k * F + 6 * pow_l(k - 1, 2) * k * T);
    case Family::QRed:
      return 3 * (k - 1) * k * k * T;
    case Family::X:
      return 12 * V + (4 * (k - 1) + 4 * (k - 2)) * E + (pow_l(k - 2, 2) + 4 * (k - 1) * (k - 2)) * F +
             3 * (k - 1) * pow_l(k - 2, 2) * T;
    case Family::Phi:
      return (4 * k * E + 4 * k * (k - 2) * F + 3 * k * pow_l(k - 2, 2) * T) +
             (6 * V + 4 * (k - 1) * E + (k - 2) * E + 2 * pow_l(k - 1, 2) * F + 2 * (k - 1) * (k - 2) * F +
              3 * pow_l(k - 1, 2) * (k - 2) * T);
    case Family::Gamma:
      return k * E + (2 * k * k + 2 * k * (k - 1)) * F + (3 * k * k * (k - 2) + 3 * k * pow_l(k - 1, 2)) * T;
    case Family::GammaRed:
      return k * E + (k * k + 2 * k * (k - 1)) * F + (3 * pow_l(k, 3) + 3 * k * pow_l(k - 1, 2)) * T;
    case Family::Z:
      return k * k * F + 3 * (k - 1) * k * k * T;
    case Family::ZRed:
      return 3 * (k + 1) * k * k * T;
  }
  return -1;
}

DimensionCheck verify_dimensions(const FamilyId& family, const CuboidMesh& mesh) {
  DimensionCheck c;
  c.formula = dimension_formula(family, mesh);
  c.assembled = assemble_space(family, mesh).ndofs();
  c.match = c.formula == c.assembled;
  return c;
}

// ---------------------------------------------------------------------------

namespace {

// Piecewise antiderivative of component `comp` of q along `axis`, with the
// lower limit at the box minimum.
std::vector<TensorPoly> column_integral(const CuboidMesh& mesh, const std::vector<PolyField>& q, int comp, int axis) {
  const int cells = mesh.num_cells();
  std::vector<int> order(static_cast<std::size_t>(cells));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return mesh.cell_index(a)[axis] < mesh.cell_index(b)[axis]; });
  std::vector<TensorPoly> out(static_cast<std::size_t>(cells));
  for (int c : order) {
    const CellFrame frame = mesh.cell_frame(c);
    TensorPoly p = antiderivative(q[c][comp], axis_of(axis));
    p.set_frame(frame);
    auto idx = mesh.cell_index(c);
    if (idx[axis] > 0) {
      --idx[axis];
      const int prev = mesh.entity_id(7u, idx).index;
      const CellFrame pf = mesh.cell_frame(prev);
      EntityRef top;
      top.kind = EntityKind::face;
      for (int a = 0; a < 3; ++a) {
        top.lo[a] = pf.origin[a];
        top.hi[a] = pf.origin[a] + pf.size[a];
      }
      top.lo[axis] = top.hi[axis];
      TensorPoly offset = trace(out[prev], top);
      offset.set_frame(frame);
      p += offset;
    }
    out[c] = std::move(p);
  }
  return out;
}

std::vector<PolyField> reconstruct_all(const GlobalSpace& space, std::span<const Rational> v) {
  std::vector<PolyField> out(static_cast<std::size_t>(space.mesh().num_cells()));
  parallel_for(space.mesh().num_cells(), [&](int c) { out[c] = reconstruct_local(space, v, c); });
  return out;
}

}  // namespace

std::vector<Rational> div_preimage_gradgrad(const GlobalSpace& q_space, std::span<const Rational> q,
                                            const GlobalSpace& tau_space) {
  const CuboidMesh& mesh = q_space.mesh();
  const auto qf = reconstruct_all(q_space, q);
  // tau_xy = int q_x dy, tau_yz = int q_y dz, tau_zx = int q_z dx.
  const auto xy = column_integral(mesh, qf, 0, 1);
  const auto yz = column_integral(mesh, qf, 1, 2);
  const auto zx = column_integral(mesh, qf, 2, 0);
  return interpolate(tau_space, [&](int c, const CellFrame& frame) {
    PolyField tau(FieldKind::matrix33, Structure::traceless, frame);
    tau.at(0, 1) = xy[c];
    tau.at(1, 2) = yz[c];
    tau.at(2, 0) = zx[c];
    return tau;
  });
}

std::vector<Rational> div_preimage_elasticity(const GlobalSpace& q_space, std::span<const Rational> q,
                                              const GlobalSpace& sigma_space) {
  const CuboidMesh& mesh = q_space.mesh();
  const auto qf = reconstruct_all(q_space, q);
  std::array<std::vector<TensorPoly>, 3> diag;
  for (int a = 0; a < 3; ++a) diag[a] = column_integral(mesh, qf, a, a);
  return interpolate(sigma_space, [&](int c, const CellFrame& frame) {
    PolyField sigma(FieldKind::matrix33, Structure::symmetric, frame);
    for (int a = 0; a < 3; ++a) sigma.at(a, a) = diag[a][c];
    return sigma;
  });
}

// ---------------------------------------------------------------------------

SparseMatrix local_operator_matrix(const FamilyId& src, Operator op, const FamilyId& dst) {
  const ShapeSpaceSpec s = shape_space(src), d = shape_space(dst);
  const int n = s.dimension();
  std::vector<std::vector<Triplet>> columns(static_cast<std::size_t>(n));
  parallel_for(n, [&](int j) {
    std::vector<Rational> unit(static_cast<std::size_t>(n));
    unit[j] = 1;
    const auto image = coordinates_of(d, apply_operator(op, field_from_coordinates(s, unit, CellFrame{})));
    for (int i = 0; i < static_cast<int>(image.size()); ++i)
      if (image[i] != 0) columns[j].push_back({i, j, image[i]});
  });
  std::vector<Triplet> all;
  for (auto& c : columns) all.insert(all.end(), c.begin(), c.end());
  return SparseMatrix::from_triplets(d.dimension(), n, std::move(all));
}

LocalComplexReport verify_local_complex(std::string_view name, int k) {
  if (name != "gradgrad" && name != "elasticity")
    throw std::invalid_argument("local complex must be gradgrad or elasticity");
  const ComplexSpec spec = complex_spec(name, k);
  LocalComplexReport r;
  r.complex = std::string(name);
  r.k = k;
  std::vector<SparseMatrix> d;
  for (int i = 0; i < 3; ++i) d.push_back(local_operator_matrix(spec.spaces[i], spec.ops[i], spec.spaces[i + 1]));
  for (int i = 0; i < 4; ++i) r.dims[i] = shape_space(spec.spaces[i]).dimension();
  for (int i = 0; i < 2; ++i) r.composition_zero[i] = (d[i + 1] * d[i]).is_zero();
  for (int i = 0; i < 3; ++i) r.ranks[i] = exact_rank(d[i]);
  r.alternating_sum = r.dims[0] - r.dims[1] + r.dims[2] - r.dims[3];
  r.exact = r.composition_zero[0] && r.composition_zero[1] && r.dims[0] - r.ranks[0] == spec.kernel_dim &&
            r.ranks[0] + r.ranks[1] == r.dims[1] && r.ranks[1] + r.ranks[2] == r.dims[2] && r.ranks[2] == r.dims[3];
  return r;
}

// ---------------------------------------------------------------------------

KernelCheck identify_kernel(const ComplexSpec& spec, const CuboidMesh& mesh) {
  const GlobalSpace s0 = assemble_space(spec.spaces[0], mesh);
  const GlobalSpace s1 = assemble_space(spec.spaces[1], mesh);
  const SparseMatrix d0 = operator_matrix(s0, spec.ops[0], s1);

  std::vector<std::function<PolyField(int, const CellFrame&)>> fields;
  if (spec.kernel_dim == 4) {
    fields.push_back([](int, const CellFrame& f) {
      PolyField u(FieldKind::scalar, Structure::none, f);
      u[0] = TensorPoly::constant(1, f);
      return u;
    });
    for (int a = 0; a < 3; ++a)
      fields.push_back([a](int, const CellFrame& f) {
        PolyField u(FieldKind::scalar, Structure::none, f);
        u[0] = TensorPoly::coordinate(a, f);
        return u;
      });
  } else {
    for (int a = 0; a < 3; ++a)
      fields.push_back([a](int, const CellFrame& f) {
        PolyField v(FieldKind::vector3, Structure::none, f);
        v[a] = TensorPoly::constant(1, f);
        return v;
      });
    // e_a x (x, y, z)
    for (int a = 0; a < 3; ++a)
      fields.push_back([a](int, const CellFrame& f) {
        PolyField v(FieldKind::vector3, Structure::none, f);
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        v[c] = TensorPoly::coordinate(b, f);
        v[b] = -TensorPoly::coordinate(c, f);
        return v;
      });
  }

  KernelCheck kc;
  kc.expected = spec.kernel_dim;
  std::vector<std::vector<Rational>> interp;
  kc.interpolants_in_kernel = true;
  for (const auto& f : fields) {
    interp.push_back(interpolate(s0, f));
    for (const auto& v : d0.multiply(interp.back()))
      if (v != 0) kc.interpolants_in_kernel = false;
  }

  const int n = s0.ndofs();
  std::vector<Triplet> t;
  for (int j = 0; j < static_cast<int>(interp.size()); ++j)
    for (int i = 0; i < n; ++i)
      if (interp[j][i] != 0) t.push_back({i, j, interp[j][i]});
  const SparseMatrix imat = SparseMatrix::from_triplets(n, static_cast<int>(interp.size()), t);
  kc.interpolant_rank = exact_rank(imat);

  const auto null = nullspace(to_dense(d0));
  kc.nullity = static_cast<int>(null.size());
  const int base = static_cast<int>(interp.size());
  for (int j = 0; j < kc.nullity; ++j)
    for (int i = 0; i < n; ++i)
      if (null[j][i] != 0) t.push_back({i, base + j, null[j][i]});
  kc.combined_rank = exact_rank(SparseMatrix::from_triplets(n, base + kc.nullity, std::move(t)));

  kc.match = kc.interpolants_in_kernel && kc.interpolant_rank == kc.expected && kc.nullity == kc.expected &&
             kc.combined_rank == kc.expected;
  return kc;
}

std::vector<Rational> random_vector(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(-9, 9);
  std::vector<Rational> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = dist(rng);
  return v;
}

PolyField random_vector_field(int k, std::mt19937_64& rng, const CellFrame& frame) {
  PolyField v(FieldKind::vector3, Structure::none, frame);
  const Degree3 q(k, k, k);
  for (int a = 0; a < 3; ++a) {
    const auto coeffs = random_vector(q.dim(), rng);
    TensorPoly p(q, frame);
    for (int t = 0; t < q.dim(); ++t) p.coeff(p.exponents_at(t)) = coeffs[t];
    v[a] = std::move(p);
  }
  return v;
}

}  // namespace cuboid
