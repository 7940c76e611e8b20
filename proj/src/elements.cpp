#include "cuboid/elements.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace cuboid {

namespace {

struct NameEntry {
  Family family;
  std::string_view name;
};

constexpr std::array<NameEntry, 13> kNames{{
    {Family::U, "u"},
    {Family::Sigma, "sigma"},
    {Family::Xi, "xi"},
    {Family::Q, "q"},
    {Family::SigmaRed, "sigma-red"},
    {Family::XiRed, "xi-red"},
    {Family::QRed, "q-red"},
    {Family::X, "x"},
    {Family::Phi, "phi"},
    {Family::Gamma, "gamma"},
    {Family::GammaRed, "gamma-red"},
    {Family::Z, "z"},
    {Family::ZRed, "z-red"},
}};

int next(int a, int shift) { return (a + shift) % 3; }

// Degree grid or cap triple given per role: axis a gets ca, b gets cb, c gets cc.
std::array<int, 3> roles(int a, int ca, int b, int cb, int c, int cc) {
  std::array<int, 3> out{};
  out[a] = ca;
  out[b] = cb;
  out[c] = cc;
  return out;
}

Degree3 grid_of(const std::array<int, 3>& caps) { return Degree3(caps[0], caps[1], caps[2]); }

Exponents unit(int a) {
  Exponents e{0, 0, 0};
  e[a] = 1;
  return e;
}

Exponents unit(int a, int b) {
  Exponents e = unit(a);
  e[b] += 1;
  return e;
}

constexpr Exponents kNone{0, 0, 0};
constexpr Mask kCellMask = 7u;

Mask mask_of(int a) { return Mask(1u) << a; }
Mask mask_of(int a, int b) { return mask_of(a) | mask_of(b); }

int sym(int a, int b) { return matrix_component(std::min(a, b), std::max(a, b)); }

EntityRef reference_entity(const LocalEntity& local) {
  EntityRef ref;
  ref.kind = local.kind();
  for (int a = 0; a < 3; ++a) {
    if (is_free(local.mask, a)) {
      ref.lo[a] = 0;
      ref.hi[a] = 1;
    } else {
      ref.lo[a] = local.side[a];
      ref.hi[a] = local.side[a];
    }
  }
  return ref;
}

DofKind kind_for(Mask mask) {
  switch (free_count(mask)) {
    case 0:
      return DofKind::point_eval;
    case 1:
      return DofKind::edge_moment;
    case 2:
      return DofKind::face_moment;
    default:
      return DofKind::cell_moment;
  }
}

class Catalog {
 public:
  explicit Catalog(FieldKind kind) : kind_(kind) {}

  // Moments (or point values) of d^alpha(component) for every alpha in
  // `derivs`, on every local entity with `mask`, against all weight
  // monomials with exponent <= caps on the free axes.
  void add(Mask mask, int component, const std::vector<Exponents>& derivs, const std::array<int, 3>& caps) {
    Exponents hi{0, 0, 0};
    for (int a = 0; a < 3; ++a) {
      if (!is_free(mask, a)) continue;
      if (caps[a] < 0) return;
      hi[a] = caps[a];
    }
    for (const auto& local : local_entities_with_mask(mask))
      for (const auto& d : derivs)
        for (int wx = 0; wx <= hi[0]; ++wx)
          for (int wy = 0; wy <= hi[1]; ++wy)
            for (int wz = 0; wz <= hi[2]; ++wz) {
              DofFunctional f;
              f.kind = kind_for(mask);
              f.field_kind = kind_;
              f.local = local;
              f.entity = reference_entity(local);
              f.component = component;
              f.derivative = d;
              f.weight = {wx, wy, wz};
              out_.push_back(std::move(f));
            }
  }

  void vertices(int component, const std::vector<Exponents>& derivs) { add(0, component, derivs, {0, 0, 0}); }

  void coupled(std::shared_ptr<const BubbleBasis> bubbles) {
    LocalEntity cell{kCellMask, {0, 0, 0}};
    for (int i = 0; i < static_cast<int>(bubbles->triples.size()); ++i) {
      DofFunctional f;
      f.kind = DofKind::coupled_cell_moment;
      f.field_kind = kind_;
      f.local = cell;
      f.entity = reference_entity(cell);
      f.component = matrix_component(0, 0);
      f.bubble = i;
      f.bubbles = bubbles;
      out_.push_back(std::move(f));
    }
  }

  std::vector<DofFunctional> take() {
    auto key = [](const DofFunctional& f) {
      return std::make_tuple(f.local.order(), component_rank(f.field_kind, f.component), f.derivative, f.weight,
                             f.bubble);
    };
    std::stable_sort(out_.begin(), out_.end(), [&](const auto& l, const auto& r) { return key(l) < key(r); });
    return std::move(out_);
  }

 private:
  FieldKind kind_;
  std::vector<DofFunctional> out_;
};

void u_dofs(int k, Catalog& c) {
  std::vector<Exponents> all;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) all.push_back({i, j, l});
  c.vertices(0, all);
  for (int a = 0; a < 3; ++a) {
    const int b = next(a, 1), cc = next(a, 2);
    c.add(mask_of(a), 0, {kNone, unit(b), unit(cc), unit(b, cc)}, roles(a, k - 4, b, 0, cc, 0));
    c.add(mask_of(b, cc), 0, {kNone, unit(a)}, roles(a, 0, b, k - 4, cc, k - 4));
  }
  c.add(kCellMask, 0, {kNone}, {k - 4, k - 4, k - 4});
}

void sigma_dofs(int k, bool reduced, Catalog& c) {
  for (int a = 0; a < 3; ++a) {
    const int b = next(a, 1), cc = next(a, 2);
    const int aa = sym(a, a);
    if (!reduced) {
      c.add(mask_of(a), aa, {kNone, unit(b), unit(cc), unit(b, cc)}, roles(a, k - 2, b, 0, cc, 0));
      c.add(mask_of(a, b), aa, {kNone, unit(cc)}, roles(a, k - 2, b, k - 4, cc, 0));
      c.add(mask_of(a, cc), aa, {kNone, unit(b)}, roles(a, k - 2, b, 0, cc, k - 4));
      c.add(kCellMask, aa, {kNone}, roles(a, k - 2, b, k - 4, cc, k - 4));
    } else {
      c.add(mask_of(a), aa, {kNone}, roles(a, k - 2, b, 0, cc, 0));
      c.add(mask_of(a, b), aa, {kNone}, roles(a, k - 2, b, k - 2, cc, 0));
      c.add(mask_of(a, cc), aa, {kNone}, roles(a, k - 2, b, 0, cc, k - 2));
      c.add(kCellMask, aa, {kNone}, {k - 2, k - 2, k - 2});
    }

    // Off-diagonal sigma_ab with c the remaining axis.
    const int ab = sym(a, b);
    c.vertices(ab, {kNone, unit(cc)});
    c.add(mask_of(a), ab, {kNone, unit(cc)}, roles(a, k - 3, b, 0, cc, 0));
    c.add(mask_of(b), ab, {kNone, unit(cc)}, roles(a, 0, b, k - 3, cc, 0));
    c.add(mask_of(cc), ab, {kNone}, roles(a, 0, b, 0, cc, k - 4));
    if (!reduced) {
      c.add(mask_of(a, b), ab, {kNone, unit(cc)}, roles(a, k - 3, b, k - 3, cc, 0));
      c.add(kCellMask, ab, {kNone}, roles(a, k - 3, b, k - 3, cc, k - 4));
    } else {
      c.add(mask_of(a, b), ab, {kNone}, roles(a, k - 3, b, k - 3, cc, 0));
      c.add(kCellMask, ab, {kNone}, roles(a, k - 3, b, k - 3, cc, k - 2));
    }
    c.add(mask_of(a, cc), ab, {kNone}, roles(a, k - 3, b, 0, cc, k - 4));
    c.add(mask_of(b, cc), ab, {kNone}, roles(a, 0, b, k - 3, cc, k - 4));
  }
}

void xi_dofs(int k, bool reduced, Catalog& c) {
  // Diagonal: Lagrange-type values of xx and yy; zz = -(xx + yy).
  for (int a = 0; a < 2; ++a) {
    const int aa = matrix_component(a, a);
    c.vertices(aa, {kNone});
    for (int e = 0; e < 3; ++e) c.add(mask_of(e), aa, {kNone}, {k - 3, k - 3, k - 3});
    if (!reduced) {
      for (int n = 0; n < 3; ++n) c.add(mask_of(next(n, 1), next(n, 2)), aa, {kNone}, {k - 3, k - 3, k - 3});
      c.add(kCellMask, aa, {kNone}, {k - 3, k - 3, k - 3});
    }
  }
  if (reduced) {
    for (int n = 0; n < 3; ++n)
      c.add(mask_of(next(n, 1), next(n, 2)), matrix_component(n, n), {kNone}, {k - 3, k - 3, k - 3});
    c.coupled(shared_bubble_basis(k));
  }

  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      const int cc = 3 - a - b;
      const int ab = matrix_component(a, b);
      if (!reduced) {
        c.add(mask_of(a), ab, {kNone, unit(b)}, roles(a, k - 2, b, 0, cc, 0));
        c.add(mask_of(a, b), ab, {kNone}, roles(a, k - 2, b, k - 4, cc, 0));
        c.add(mask_of(a, cc), ab, {kNone, unit(b)}, roles(a, k - 2, b, 0, cc, k - 3));
        c.add(kCellMask, ab, {kNone}, roles(a, k - 2, b, k - 4, cc, k - 3));
      } else {
        c.add(mask_of(a, cc), ab, {kNone}, roles(a, k - 2, b, 0, cc, k - 1));
        c.add(kCellMask, ab, {kNone}, roles(a, k - 2, b, k - 2, cc, k - 1));
      }
    }
}

void q_dofs(int k, bool reduced, Catalog& c) {
  for (int a = 0; a < 3; ++a) {
    const int b = next(a, 1), cc = next(a, 2);
    if (reduced) {
      c.add(kCellMask, a, {kNone}, roles(a, k - 2, b, k - 1, cc, k - 1));
      continue;
    }
    c.add(mask_of(a), a, {kNone}, roles(a, k - 2, b, 0, cc, 0));
    c.add(mask_of(a, b), a, {kNone}, roles(a, k - 2, b, k - 3, cc, 0));
    c.add(mask_of(a, cc), a, {kNone}, roles(a, k - 2, b, 0, cc, k - 3));
    c.add(kCellMask, a, {kNone}, roles(a, k - 2, b, k - 3, cc, k - 3));
  }
}

void x_dofs(int k, Catalog& c) {
  for (int a = 0; a < 3; ++a) {
    const int b = next(a, 1), cc = next(a, 2);
    const std::vector<Exponents> four{kNone, unit(b), unit(cc), unit(b, cc)};
    c.vertices(a, four);
    c.add(mask_of(a), a, four, roles(a, k - 2, b, 0, cc, 0));
    c.add(mask_of(b), a, {kNone, unit(cc)}, roles(a, 0, b, k - 3, cc, 0));
    c.add(mask_of(cc), a, {kNone, unit(b)}, roles(a, 0, b, 0, cc, k - 3));
    c.add(mask_of(b, cc), a, {kNone}, roles(a, 0, b, k - 3, cc, k - 3));
    c.add(mask_of(a, b), a, {kNone, unit(cc)}, roles(a, k - 2, b, k - 3, cc, 0));
    c.add(mask_of(a, cc), a, {kNone, unit(b)}, roles(a, k - 2, b, 0, cc, k - 3));
    c.add(kCellMask, a, {kNone}, roles(a, k - 2, b, k - 3, cc, k - 3));
  }
}

void gamma_dofs(int k, bool reduced, Catalog& c) {
  for (int a = 0; a < 3; ++a) {
    const int b = next(a, 1), cc = next(a, 2);
    const int aa = sym(a, a);
    if (!reduced) {
      c.add(mask_of(b, cc), aa, {kNone, unit(a)}, roles(a, 0, b, k - 1, cc, k - 1));
      c.add(kCellMask, aa, {kNone}, roles(a, k - 3, b, k - 1, cc, k - 1));
    } else {
      c.add(mask_of(b, cc), aa, {kNone}, roles(a, 0, b, k - 1, cc, k - 1));
      c.add(kCellMask, aa, {kNone}, {k - 1, k - 1, k - 1});
    }
    const int ab = sym(a, b);
    c.add(mask_of(cc), ab, {kNone}, roles(a, 0, b, 0, cc, k - 1));
    c.add(mask_of(a, cc), ab, {kNone}, roles(a, k - 2, b, 0, cc, k - 1));
    c.add(mask_of(b, cc), ab, {kNone}, roles(a, 0, b, k - 2, cc, k - 1));
    c.add(kCellMask, ab, {kNone}, roles(a, k - 2, b, k - 2, cc, k - 1));
  }
}

void z_dofs(int k, bool reduced, Catalog& c) {
  for (int a = 0; a < 3; ++a) {
    const int b = next(a, 1), cc = next(a, 2);
    if (reduced) {
      c.add(kCellMask, a, {kNone}, roles(a, k, b, k - 1, cc, k - 1));
      continue;
    }
    c.add(mask_of(b, cc), a, {kNone}, roles(a, 0, b, k - 1, cc, k - 1));
    c.add(kCellMask, a, {kNone}, roles(a, k - 2, b, k - 1, cc, k - 1));
  }
}

FieldKind field_kind_of(Family f) {
  switch (f) {
    case Family::U:
      return FieldKind::scalar;
    case Family::Q:
    case Family::QRed:
    case Family::X:
    case Family::Z:
    case Family::ZRed:
      return FieldKind::vector3;
    default:
      return FieldKind::matrix33;
  }
}

// Stored components that a coordinate of component `c` writes to, with sign.
std::vector<std::pair<int, int>> coordinate_images(const ShapeSpaceSpec& space, int c) {
  if (space.kind != FieldKind::matrix33) return {{c, 1}};
  const int r = c / 3, col = c % 3;
  if (space.structure == Structure::symmetric && r != col) return {{c, 1}, {matrix_component(col, r), 1}};
  if (space.structure == Structure::traceless && r == col) return {{c, 1}, {matrix_component(2, 2), -1}};
  return {{c, 1}};
}

}  // namespace

std::string_view family_name(Family f) {
  for (const auto& e : kNames)
    if (e.family == f) return e.name;
  throw std::invalid_argument("unknown family");
}

Family parse_family(std::string_view name) {
  for (const auto& e : kNames)
    if (e.name == name) return e.family;
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

int min_order(Family f) {
  switch (f) {
    case Family::U:
    case Family::Sigma:
    case Family::Xi:
    case Family::Q:
    case Family::SigmaRed:
    case Family::XiRed:
    case Family::QRed:
      return 3;
    default:
      return 2;
  }
}

std::string FamilyId::to_string() const { return std::string(family_name(family)) + "(k=" + std::to_string(k) + ")"; }

void FamilyId::require_admissible() const {
  if (k < min_order(family))
    throw std::invalid_argument("family '" + std::string(family_name(family)) + "' needs k >= " +
                                std::to_string(min_order(family)) + ", got k = " + std::to_string(k));
}

// ---------------------------------------------------------------------------

int ShapeSpaceSpec::dimension() const {
  int d = 0;
  for (int c : independent) d += grid[c].dim();
  return d;
}

int ShapeSpaceSpec::offset_of(int component) const {
  int off = 0;
  for (int c : independent) {
    if (c == component) return off;
    off += grid[c].dim();
  }
  return -1;
}

ShapeSpaceSpec shape_space(const FamilyId& id) {
  id.require_admissible();
  if (id.family == Family::Phi) return shape_space({Family::Sigma, id.k + 1});

  const int k = id.k;
  ShapeSpaceSpec s;
  s.kind = field_kind_of(id.family);
  switch (s.kind) {
    case FieldKind::scalar:
      s.grid = {Degree3(k, k, k)};
      s.independent = {0};
      return s;
    case FieldKind::vector3: {
      s.grid.resize(3);
      s.independent = {0, 1, 2};
      for (int a = 0; a < 3; ++a) {
        const int b = next(a, 1), c = next(a, 2);
        switch (id.family) {
          case Family::Q:
          case Family::QRed:
            s.grid[a] = grid_of(roles(a, k - 2, b, k - 1, c, k - 1));
            break;
          case Family::X:
            s.grid[a] = grid_of(roles(a, k, b, k + 1, c, k + 1));
            break;
          default:  // Z, ZRed
            s.grid[a] = grid_of(roles(a, k, b, k - 1, c, k - 1));
            break;
        }
      }
      return s;
    }
    case FieldKind::matrix33:
      break;
  }

  s.grid.assign(9, Degree3::empty());
  const bool traceless = id.family == Family::Xi || id.family == Family::XiRed;
  if (traceless) {
    s.structure = Structure::traceless;
    s.constraint = "zz = -(xx + yy)";
    for (int a = 0; a < 3; ++a) s.grid[matrix_component(a, a)] = Degree3(k - 1, k - 1, k - 1);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (a != b) s.grid[matrix_component(a, b)] = grid_of(roles(a, k - 2, b, k, 3 - a - b, k - 1));
    s.independent = {0, 4, 1, 2, 3, 5, 6, 7};
    return s;
  }

  s.structure = Structure::symmetric;
  s.constraint = "ab = ba";
  const bool gamma = id.family == Family::Gamma || id.family == Family::GammaRed;
  for (int a = 0; a < 3; ++a) {
    const int b = next(a, 1), c = next(a, 2);
    s.grid[matrix_component(a, a)] =
        gamma ? grid_of(roles(a, k + 1, b, k - 1, c, k - 1)) : grid_of(roles(a, k - 2, b, k, c, k));
    const Degree3 off = gamma ? grid_of(roles(a, k, b, k, c, k - 1)) : grid_of(roles(a, k - 1, b, k - 1, c, k));
    s.grid[matrix_component(a, b)] = off;
    s.grid[matrix_component(b, a)] = off;
  }
  s.independent = {0, 4, 8, 1, 2, 5};
  return s;
}

PolyField field_from_coordinates(const ShapeSpaceSpec& space, std::span<const Rational> coords,
                                 const CellFrame& frame) {
  if (static_cast<int>(coords.size()) != space.dimension())
    throw std::invalid_argument("coordinate vector has the wrong length");
  PolyField field(space.kind, space.structure, frame);
  std::size_t pos = 0;
  for (int c : space.independent) {
    TensorPoly p(space.grid[c], frame);
    const int n = space.grid[c].dim();
    for (int t = 0; t < n; ++t) {
      const Rational& v = coords[pos + t];
      if (v != 0) p.coeff(p.exponents_at(t)) = v;
    }
    pos += n;
    for (const auto& [s, sign] : coordinate_images(space, c)) {
      if (sign > 0)
        field[s] += p;
      else
        field[s] -= p;
    }
  }
  return field;
}

std::vector<Rational> coordinates_of(const ShapeSpaceSpec& space, const PolyField& field) {
  if (field.kind() != space.kind) throw std::domain_error("field kind does not match the shape space");
  PolyField check = field;
  check.set_structure(space.structure);
  if (!check.satisfies_structure()) throw std::domain_error("field violates the shape space structure");
  for (int c = 0; c < field.size(); ++c)
    if (!space.grid[c].contains(field[c].effective_degree()))
      throw std::domain_error("component " + component_name(space.kind, c) + " of degree " +
                              field[c].effective_degree().to_string() + " is outside " +
                              space.grid[c].to_string());
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(space.dimension()));
  for (int c : space.independent) {
    const TensorPoly p = field[c].resized(space.grid[c]);
    out.insert(out.end(), p.coeffs().begin(), p.coeffs().end());
  }
  return out;
}

// ---------------------------------------------------------------------------

BubbleBasis bubble_basis_divT(int k) {
  if (k < 3) throw std::invalid_argument("bubble space needs k >= 3");
  const Degree3 q(k - 1, k - 1, k - 1);
  const int m = q.dim();
  TensorPoly probe(q);
  auto unknown = [&](int comp, const Exponents& e) { return comp * m + static_cast<int>(probe.flat_index(e)); };

  std::vector<std::vector<std::pair<int, int>>> rows;
  for (int a = 0; a < 3; ++a) {
    const int b = next(a, 1), c = next(a, 2);
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l) {
        Exponents e{};
        e[b] = j;
        e[c] = l;
        e[a] = 0;
        rows.push_back({{unknown(a, e), 1}});  // vanishes on the low face
        std::vector<std::pair<int, int>> sum;
        for (int i = 0; i < k; ++i) {
          e[a] = i;
          sum.push_back({unknown(a, e), 1});
        }
        rows.push_back(std::move(sum));  // vanishes on the high face
      }
  }
  for (int t = 0; t < m; ++t) rows.push_back({{t, 1}, {m + t, 1}, {2 * m + t, 1}});

  RationalMatrix system(static_cast<int>(rows.size()), 3 * m);
  for (int r = 0; r < static_cast<int>(rows.size()); ++r)
    for (const auto& [col, v] : rows[r]) system(r, col) = v;

  BubbleBasis basis;
  basis.k = k;
  for (const auto& v : nullspace(system)) {
    std::array<TensorPoly, 3> triple{TensorPoly(q), TensorPoly(q), TensorPoly(q)};
    for (int comp = 0; comp < 3; ++comp)
      for (int t = 0; t < m; ++t)
        if (v[comp * m + t] != 0) triple[comp].coeff(probe.exponents_at(t)) = v[comp * m + t];
    basis.triples.push_back(std::move(triple));
  }
  return basis;
}

std::shared_ptr<const BubbleBasis> shared_bubble_basis(int k) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const BubbleBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[k];
  if (!slot) slot = std::make_shared<const BubbleBasis>(bubble_basis_divT(k));
  return slot;
}

// ---------------------------------------------------------------------------

std::string_view dof_kind_name(DofKind kind) {
  switch (kind) {
    case DofKind::point_eval:
      return "point-eval";
    case DofKind::edge_moment:
      return "edge-moment";
    case DofKind::face_moment:
      return "face-moment";
    case DofKind::cell_moment:
      return "cell-moment";
    case DofKind::coupled_cell_moment:
      return "coupled-cell-moment";
  }
  return "?";
}

int component_rank(FieldKind kind, int component) {
  if (kind != FieldKind::matrix33) return component;
  const int r = component / 3, c = component % 3;
  if (r == c) return r;
  static constexpr std::array<int, 9> off{-1, 3, 4, 5, -1, 6, 7, 8, -1};
  // Symmetric canonical components (xy, xz, yz) keep their relative order.
  return off[component];
}

std::string component_name(FieldKind kind, int component) {
  if (kind == FieldKind::scalar) return "u";
  if (kind == FieldKind::vector3) return std::string(1, axis_name(component));
  return {axis_name(component / 3), axis_name(component % 3)};
}

std::string DofFunctional::describe() const {
  std::ostringstream os;
  os << dof_kind_name(kind) << ' ' << entity.tag_name() << "[";
  for (int a = 0; a < 3; ++a) os << (is_free(local.mask, a) ? '*' : char('0' + local.side[a]));
  os << "] ";
  if (kind == DofKind::coupled_cell_moment) {
    os << "bubble " << bubble;
    return os.str();
  }
  os << component_name(field_kind, component) << " d=(" << derivative[0] << ',' << derivative[1] << ','
     << derivative[2] << ") w=(" << weight[0] << ',' << weight[1] << ',' << weight[2] << ')';
  return os.str();
}

std::vector<DofFunctional> local_dofs(const FamilyId& id) {
  id.require_admissible();
  const int k = id.k;
  Catalog c(field_kind_of(id.family));
  switch (id.family) {
    case Family::U:
      u_dofs(k, c);
      break;
    case Family::Sigma:
      sigma_dofs(k, false, c);
      break;
    case Family::Phi:
      sigma_dofs(k + 1, false, c);
      break;
    case Family::SigmaRed:
      sigma_dofs(k, true, c);
      break;
    case Family::Xi:
      xi_dofs(k, false, c);
      break;
    case Family::XiRed:
      xi_dofs(k, true, c);
      break;
    case Family::Q:
      q_dofs(k, false, c);
      break;
    case Family::QRed:
      q_dofs(k, true, c);
      break;
    case Family::X:
      x_dofs(k, c);
      break;
    case Family::Gamma:
      gamma_dofs(k, false, c);
      break;
    case Family::GammaRed:
      gamma_dofs(k, true, c);
      break;
    case Family::Z:
      z_dofs(k, false, c);
      break;
    case Family::ZRed:
      z_dofs(k, true, c);
      break;
  }
  return c.take();
}

std::vector<DofFunctional> local_dofs(const FamilyId& id, int cell, const CuboidMesh& mesh) {
  auto dofs = local_dofs(id);
  for (auto& f : dofs) f.entity = mesh.entity_ref(mesh.global_entity(cell, f.local));
  return dofs;
}

Rational apply_dof(const DofFunctional& dof, const PolyField& field) {
  if (field.kind() != dof.field_kind) throw std::invalid_argument("DOF applied to a field of the wrong kind");
  if (dof.kind == DofKind::coupled_cell_moment) {
    if (!dof.bubbles || dof.bubble < 0 || dof.bubble >= static_cast<int>(dof.bubbles->triples.size()))
      throw std::invalid_argument("coupled DOF without a bubble");
    const auto& xi = dof.bubbles->triples[dof.bubble];
    Rational total(0);
    for (int a = 0; a < 3; ++a) total += moment(field.at(a, a), xi[a], dof.entity);
    return total;
  }
  if (dof.component < 0 || dof.component >= field.size()) throw std::invalid_argument("DOF component out of range");
  const TensorPoly p = differentiate(field[dof.component], dof.derivative);
  if (dof.kind == DofKind::point_eval) return p.evaluate_physical(dof.entity.lo);
  return moment(p, TensorPoly::monomial(dof.weight, Rational(1), field.frame()), dof.entity);
}

// ---------------------------------------------------------------------------

LocalElement::LocalElement(const FamilyId& family)
    : family_(family), space_(shape_space(family)), dofs_(local_dofs(family)) {
  const int n = static_cast<int>(dofs_.size());
  const int d = space_.dimension();
  matrix_ = RationalMatrix(n, d);

  int col = 0;
  for (int c : space_.independent) {
    const auto images = coordinate_images(space_, c);
    const TensorPoly probe(space_.grid[c]);
    for (int t = 0; t < space_.grid[c].dim(); ++t, ++col) {
      const Exponents e = probe.exponents_at(t);
      for (int i = 0; i < n; ++i) {
        Rational v(0);
        for (const auto& [s, sign] : images) {
          const Rational r = reference_value(i, s, e);
          if (sign > 0)
            v += r;
          else
            v -= r;
        }
        matrix_(i, col) = v;
      }
    }
  }

  if (n != d) return;
  try {
    const RationalMatrix inv = inverse(matrix_);
    std::vector<std::vector<std::pair<int, Rational>>> rows(static_cast<std::size_t>(d));
    for (int r = 0; r < d; ++r)
      for (int i = 0; i < n; ++i)
        if (inv(r, i) != 0) rows[r].emplace_back(i, inv(r, i));
    inverse_ = std::move(rows);
  } catch (const std::domain_error&) {
  }
}

Rational LocalElement::reference_value(int i, int component, const Exponents& e) const {
  const DofFunctional& f = dofs_[i];
  if (f.kind == DofKind::coupled_cell_moment) {
    const int r = component / 3;
    if (component % 3 != r) return Rational(0);
    const TensorPoly& xi = f.bubbles->triples[f.bubble][r];
    Rational total(0);
    for (std::size_t j = 0; j < xi.coeffs().size(); ++j) {
      const Rational& w = xi.coeffs()[j];
      if (w == 0) continue;
      const Exponents g = xi.exponents_at(j);
      total += w / ((e[0] + g[0] + 1) * (e[1] + g[1] + 1) * (e[2] + g[2] + 1));
    }
    return total;
  }
  if (component != f.component) return Rational(0);
  long num = 1, den = 1;
  for (int a = 0; a < 3; ++a) {
    const int n = e[a], alpha = f.derivative[a];
    if (n < alpha) return Rational(0);
    for (int t = 0; t < alpha; ++t) num *= n - t;
    const int m = n - alpha;
    if (is_free(f.local.mask, a))
      den *= m + f.weight[a] + 1;
    else if (f.local.side[a] == 0 && m != 0)
      return Rational(0);
  }
  return make_rational(num, den);
}

Rational LocalElement::scale(int i, const CellFrame& frame) const {
  const DofFunctional& f = dofs_[i];
  Rational s(1);
  for (int a = 0; a < 3; ++a) {
    for (int t = 0; t < f.derivative[a]; ++t) s /= frame.size[a];
    if (is_free(f.local.mask, a)) s *= frame.size[a];
  }
  return s;
}

Rational LocalElement::dof_value(int i, const PolyField& field) const {
  const DofFunctional& f = dofs_[i];
  if (field.kind() != f.field_kind) throw std::invalid_argument("DOF applied to a field of the wrong kind");
  Rational total(0);
  auto accumulate = [&](int component) {
    const TensorPoly& p = field[component];
    for (std::size_t j = 0; j < p.coeffs().size(); ++j) {
      const Rational& c = p.coeffs()[j];
      if (c != 0) total += c * reference_value(i, component, p.exponents_at(j));
    }
  };
  if (f.kind == DofKind::coupled_cell_moment)
    for (int a = 0; a < 3; ++a) accumulate(matrix_component(a, a));
  else
    accumulate(f.component);
  if (total == 0) return total;
  return total * scale(i, field.frame());
}

std::vector<Rational> LocalElement::dof_values(const PolyField& field) const {
  std::vector<Rational> out(dofs_.size());
  for (int i = 0; i < static_cast<int>(dofs_.size()); ++i) out[i] = dof_value(i, field);
  return out;
}

PolyField LocalElement::reconstruct(std::span<const Rational> values, const CellFrame& frame) const {
  if (!inverse_) throw std::domain_error("local DOF matrix of " + family_.to_string() + " is singular");
  if (values.size() != dofs_.size()) throw std::invalid_argument("wrong number of local DOF values");
  std::vector<Rational> ref(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != 0) ref[i] = values[i] / scale(static_cast<int>(i), frame);
  std::vector<Rational> coords(static_cast<std::size_t>(dimension()));
  for (std::size_t r = 0; r < coords.size(); ++r)
    for (const auto& [i, v] : (*inverse_)[r])
      if (ref[i] != 0) coords[r] += v * ref[i];
  return field_from_coordinates(space_, coords, frame);
}

const LocalElement& local_element(const FamilyId& family) {
  static std::mutex mutex;
  static std::map<FamilyId, std::unique_ptr<LocalElement>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[family];
  if (!slot) slot = std::make_unique<LocalElement>(family);
  return *slot;
}

RationalMatrix local_dof_matrix(const FamilyId& family) { return local_element(family).reference_matrix(); }

UnisolvenceReport check_unisolvence(const FamilyId& family) {
  const LocalElement& el = local_element(family);
  UnisolvenceReport r;
  r.dimension = el.dimension();
  r.dof_count = static_cast<int>(el.dofs().size());
  r.square = r.dimension == r.dof_count;
  r.rank = exact_rank(el.reference_matrix());
  r.nonsingular = r.square && r.rank == r.dimension;
  return r;
}

}  // namespace cuboid
