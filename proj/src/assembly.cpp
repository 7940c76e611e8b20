#include "cuboid/assembly.hpp"

#include "cuboid/operators.hpp"
#include "cuboid/parallel.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace cuboid {

std::string DofKey::describe(FieldKind field_kind) const {
  static constexpr std::array<const char*, 4> kinds{"vertex", "edge", "face", "cell"};
  std::ostringstream os;
  os << kinds[static_cast<int>(entity.kind)] << ' ' << entity.index << ' ' << dof_kind_name(kind) << ' ';
  if (kind == DofKind::coupled_cell_moment) {
    os << "bubble " << bubble;
  } else {
    os << component_name(field_kind, component) << " d=(" << derivative[0] << ',' << derivative[1] << ','
       << derivative[2] << ") w=(" << weight[0] << ',' << weight[1] << ',' << weight[2] << ')';
  }
  return os.str();
}

GlobalSpace::GlobalSpace(const FamilyId& family, const CuboidMesh& mesh)
    : family_(family), mesh_(mesh), element_(&local_element(family)) {
  const auto& dofs = element_->dofs();
  const int cells = mesh_.num_cells();
  std::vector<std::vector<DofKey>> cell_keys(static_cast<std::size_t>(cells));
  for (int c = 0; c < cells; ++c) {
    cell_keys[c].reserve(dofs.size());
    for (const auto& f : dofs)
      cell_keys[c].push_back(
          {mesh_.global_entity(c, f.local), f.component, f.derivative, f.weight, f.kind, f.bubble});
    for (const auto& key : cell_keys[c]) index_.emplace(key, 0);
  }
  keys_.reserve(index_.size());
  for (auto& [key, idx] : index_) {
    idx = static_cast<int>(keys_.size());
    keys_.push_back(key);
  }
  multiplicity_.assign(keys_.size(), 0);
  l2g_.resize(static_cast<std::size_t>(cells));
  for (int c = 0; c < cells; ++c) {
    l2g_[c].reserve(dofs.size());
    for (const auto& key : cell_keys[c]) {
      const int g = index_.at(key);
      l2g_[c].push_back(g);
      ++multiplicity_[g];
    }
  }
}

int GlobalSpace::index_of(const DofKey& key) const {
  const auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

std::string GlobalSpace::describe(int global) const {
  return family_.to_string() + " " + keys_[global].describe(element_->space().kind);
}

std::vector<Rational> GlobalSpace::local_values(std::span<const Rational> global, int cell) const {
  if (static_cast<int>(global.size()) != ndofs()) throw std::invalid_argument("global vector has the wrong length");
  std::vector<Rational> out;
  out.reserve(l2g_[cell].size());
  for (int g : l2g_[cell]) out.push_back(global[g]);
  return out;
}

GlobalSpace assemble_space(const FamilyId& family, const CuboidMesh& mesh) { return GlobalSpace(family, mesh); }

PolyField reconstruct_local(const GlobalSpace& space, std::span<const Rational> global, int cell) {
  const auto values = space.local_values(global, cell);
  return space.element().reconstruct(values, space.mesh().cell_frame(cell));
}

std::vector<Rational> interpolate(const GlobalSpace& space,
                                  const std::function<PolyField(int cell, const CellFrame&)>& field) {
  const CuboidMesh& mesh = space.mesh();
  std::vector<std::vector<Rational>> per_cell(static_cast<std::size_t>(mesh.num_cells()));
  parallel_for(mesh.num_cells(), [&](int c) {
    const CellFrame frame = mesh.cell_frame(c);
    per_cell[c] = space.element().dof_values(field(c, frame));
  });
  std::vector<Rational> out(static_cast<std::size_t>(space.ndofs()));
  std::vector<bool> written(out.size(), false);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& l2g = space.local_to_global(c);
    for (std::size_t i = 0; i < l2g.size(); ++i) {
      const int g = l2g[i];
      if (!written[g]) {
        out[g] = per_cell[c][i];
        written[g] = true;
      } else if (out[g] != per_cell[c][i]) {
        throw ConsistencyError("inconsistent shared DOF " + space.describe(g) + ": " + to_string(out[g]) +
                               " vs " + to_string(per_cell[c][i]) + " on cell " + std::to_string(c));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
  SparseMatrix m(rows, cols);
  for (auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::out_of_range("triplet outside the matrix");
    if (!m.entries_.empty() && m.entries_.back().row == t.row && m.entries_.back().col == t.col)
      m.entries_.back().value += t.value;
    else
      m.entries_.push_back(std::move(t));
  }
  std::erase_if(m.entries_, [](const Triplet& t) { return t.value == 0; });
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) t.push_back({i, i, Rational(1)});
  return from_triplets(n, n, std::move(t));
}

Rational SparseMatrix::at(int row, int col) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(row, col),
                                   [](const Triplet& t, const std::pair<int, int>& rc) {
                                     return std::tie(t.row, t.col) < std::tie(rc.first, rc.second);
                                   });
  if (it != entries_.end() && it->row == row && it->col == col) return it->value;
  return Rational(0);
}

std::vector<Rational> SparseMatrix::multiply(std::span<const Rational> x) const {
  if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("dimension mismatch");
  std::vector<Rational> y(static_cast<std::size_t>(rows_));
  for (const auto& t : entries_)
    if (x[t.col] != 0) y[t.row] += t.value * x[t.col];
  return y;
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("dimension mismatch");
  std::vector<std::size_t> start(static_cast<std::size_t>(other.rows_) + 1, 0);
  for (const auto& t : other.entries_) ++start[t.row + 1];
  for (int r = 0; r < other.rows_; ++r) start[r + 1] += start[r];
  std::vector<Triplet> out;
  for (const auto& t : entries_)
    for (std::size_t p = start[t.col]; p < start[t.col + 1]; ++p) {
      const auto& u = other.entries_[p];
      out.push_back({t.row, u.col, t.value * u.value});
    }
  return from_triplets(rows_, other.cols_, std::move(out));
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Triplet> out;
  out.reserve(entries_.size());
  for (const auto& t : entries_) out.push_back({t.col, t.row, t.value});
  return from_triplets(cols_, rows_, std::move(out));
}

bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    const auto &x = a.entries_[i], &y = b.entries_[i];
    if (x.row != y.row || x.col != y.col || x.value != y.value) return false;
  }
  return true;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& m, bool as_float) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  if (!as_float) os << "% exact rational entries written as p/q\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  if (as_float) os << std::setprecision(17);
  for (const auto& t : m.entries()) {
    os << t.row + 1 << ' ' << t.col + 1 << ' ';
    if (as_float)
      os << t.value.get_d();
    else
      os << to_string(t.value);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------

std::string_view operator_name(Operator op) {
  switch (op) {
    case Operator::gradgrad:
      return "gradgrad";
    case Operator::curl:
      return "curl";
    case Operator::div:
      return "div";
    case Operator::sym_grad:
      return "symgrad";
    case Operator::curl_curlT:
      return "curlcurlT";
  }
  return "?";
}

Operator parse_operator(std::string_view name) {
  for (Operator op : {Operator::gradgrad, Operator::curl, Operator::div, Operator::sym_grad, Operator::curl_curlT})
    if (operator_name(op) == name) return op;
  throw std::invalid_argument("unknown operator '" + std::string(name) + "'");
}

PolyField apply_operator(Operator op, const PolyField& field) {
  switch (op) {
    case Operator::gradgrad:
      return gradgrad(field);
    case Operator::curl: {
      PolyField out = curl_rows(field);
      out.set_structure(Structure::traceless);
      return out;
    }
    case Operator::div:
      return div_rows(field);
    case Operator::sym_grad:
      return sym_grad(field);
    case Operator::curl_curlT:
      return curl_curlT(field);
  }
  throw std::invalid_argument("unknown operator");
}

bool is_sanctioned_edge(const FamilyId& src, Operator op, const FamilyId& dst) {
  if (src.k != dst.k) return false;
  const Family s = src.family, d = dst.family;
  switch (op) {
    case Operator::gradgrad:
      return s == Family::U && (d == Family::Sigma || d == Family::SigmaRed);
    case Operator::curl:
      return (s == Family::Sigma && d == Family::Xi) || (s == Family::SigmaRed && d == Family::XiRed);
    case Operator::div:
      return (s == Family::Xi && d == Family::Q) || (s == Family::XiRed && d == Family::QRed) ||
             (s == Family::Gamma && d == Family::Z) || (s == Family::GammaRed && d == Family::ZRed);
    case Operator::sym_grad:
      return s == Family::X && d == Family::Phi;
    case Operator::curl_curlT:
      return s == Family::Phi && (d == Family::Gamma || d == Family::GammaRed);
  }
  return false;
}

namespace {

void require_in_space(const PolyField& image, const ShapeSpaceSpec& space, const std::string& context) {
  if (image.kind() != space.kind) throw ConsistencyError(context + ": image has the wrong field kind");
  for (int c = 0; c < image.size(); ++c)
    if (!space.grid[c].contains(image[c].effective_degree()))
      throw ConsistencyError(context + ": image component " + component_name(space.kind, c) + " of degree " +
                             image[c].effective_degree().to_string() + " leaves " + space.grid[c].to_string());
  PolyField check = image;
  check.set_structure(space.structure);
  if (!check.satisfies_structure()) throw ConsistencyError(context + ": image violates the target structure");
}

}  // namespace

SparseMatrix operator_matrix(const GlobalSpace& src, Operator op, const GlobalSpace& dst) {
  if (!is_sanctioned_edge(src.family(), op, dst.family()))
    throw std::invalid_argument(std::string(operator_name(op)) + " is not an edge from " + src.family().to_string() +
                                " to " + dst.family().to_string());
  const CuboidMesh& mesh = src.mesh();
  const LocalElement& se = src.element();
  const LocalElement& de = dst.element();
  const int ns = static_cast<int>(se.dofs().size());
  const int nd = static_cast<int>(de.dofs().size());

  // Local matrices depend only on the cell size.
  std::vector<Point3> sizes;
  std::vector<int> size_of_cell(static_cast<std::size_t>(mesh.num_cells()));
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Point3 s = mesh.cell_frame(c).size;
    auto it = std::find(sizes.begin(), sizes.end(), s);
    if (it == sizes.end()) it = sizes.insert(sizes.end(), s);
    size_of_cell[c] = static_cast<int>(it - sizes.begin());
  }
  // local[s][j] = sparse column j: (dst local index, value).
  std::vector<std::vector<std::vector<std::pair<int, Rational>>>> local(
      sizes.size(), std::vector<std::vector<std::pair<int, Rational>>>(static_cast<std::size_t>(ns)));
  parallel_for(static_cast<int>(sizes.size()) * ns, [&](int task) {
    const int s = task / ns, j = task % ns;
    CellFrame frame;
    frame.size = sizes[s];
    std::vector<Rational> unit(static_cast<std::size_t>(ns));
    unit[j] = 1;
    const PolyField image = apply_operator(op, se.reconstruct(unit, frame));
    require_in_space(image, de.space(),
                     std::string(operator_name(op)) + " of " + src.family().to_string() + " basis " +
                         se.dofs()[j].describe());
    auto& column = local[s][j];
    for (int i = 0; i < nd; ++i) {
      Rational v = de.dof_value(i, image);
      if (v != 0) column.emplace_back(i, std::move(v));
    }
  });

  struct Contribution {
    int row, col, cell;
    Rational value;
  };
  std::vector<Contribution> all;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& sg = src.local_to_global(c);
    const auto& dg = dst.local_to_global(c);
    for (int j = 0; j < ns; ++j)
      for (const auto& [i, v] : local[size_of_cell[c]][j]) all.push_back({dg[i], sg[j], c, v});
  }
  std::sort(all.begin(), all.end(),
            [](const Contribution& a, const Contribution& b) { return std::tie(a.row, a.col, a.cell) < std::tie(b.row, b.col, b.cell); });

  std::vector<Triplet> triplets;
  for (std::size_t p = 0; p < all.size();) {
    std::size_t q = p;
    while (q < all.size() && all[q].row == all[p].row && all[q].col == all[p].col) {
      if (all[q].value != all[p].value)
        throw ConsistencyError("cells " + std::to_string(all[p].cell) + " and " + std::to_string(all[q].cell) +
                               " disagree on shared DOF " + dst.describe(all[p].row) + ": " +
                               to_string(all[p].value) + " vs " + to_string(all[q].value));
      ++q;
    }
    const int count = static_cast<int>(q - p);
    if (count != dst.multiplicity(all[p].row))
      throw ConsistencyError("shared DOF " + dst.describe(all[p].row) + " gets " + to_string(all[p].value) +
                             " from cell " + std::to_string(all[p].cell) + " but 0 from another cell");
    triplets.push_back({all[p].row, all[p].col, all[p].value});
    p = q;
  }
  return SparseMatrix::from_triplets(dst.ndofs(), src.ndofs(), std::move(triplets));
}

// ---------------------------------------------------------------------------

std::vector<Rational> face_jump(const GlobalSpace& space, std::span<const Rational> global, const EntityId& face,
                                const TraceSpec& trace) {
  if (face.kind != EntityKind::face) throw std::invalid_argument("face_jump needs a face");
  const CuboidMesh& mesh = space.mesh();
  const auto [low, high] = mesh.face_neighbors(face);
  if (low < 0 || high < 0) throw std::invalid_argument("face_jump on a boundary face");
  const EntityRef ref = mesh.entity_ref(face);
  const int normal = ref.tag_axis();
  const int f1 = (normal + 1) % 3, f2 = (normal + 2) % 3;

  auto traced = [&](int cell) {
    const PolyField field = reconstruct_local(space, global, cell);
    if (trace.component < 0 || trace.component >= field.size())
      throw std::invalid_argument("trace component out of range");
    return differentiate(field[trace.component], trace.derivative);
  };
  const TensorPoly lo = traced(low), hi = traced(high);

  std::vector<Rational> out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Point3 p;
      p[normal] = ref.lo[normal];
      p[f1] = ref.lo[f1] + Rational(2 * i + 1, 8) * (ref.hi[f1] - ref.lo[f1]);
      p[f2] = ref.lo[f2] + Rational(2 * j + 1, 8) * (ref.hi[f2] - ref.lo[f2]);
      out.push_back(hi.evaluate_physical(p) - lo.evaluate_physical(p));
    }
  return out;
}

}  // namespace cuboid
