#include "cuboid/polytensor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cuboid {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto trim = [](std::string& v) {
    v.erase(0, v.find_first_not_of(" \t"));
    v.erase(v.find_last_not_of(" \t") + 1);
  };
  trim(s);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = s.find('/');
  auto valid_int = [](const std::string& v) {
    std::size_t i = (!v.empty() && (v[0] == '-' || v[0] == '+')) ? 1 : 0;
    if (i >= v.size()) return false;
    return std::all_of(v.begin() + static_cast<long>(i), v.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  };
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  trim(num);
  trim(den);
  if (!valid_int(num) || !valid_int(den))
    throw std::invalid_argument("malformed rational literal '" + s + "'");
  if (num[0] == '+') num.erase(0, 1);
  if (den[0] == '+') den.erase(0, 1);
  Integer n(num), d(den);
  if (d == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

char axis_name(int axis) { return "xyz"[axis]; }

// ---------------------------------------------------------------------------
// Degree3

Degree3::Degree3(int kx, int ky, int kz) : caps_{kx, ky, kz} {
  if (kx < 0 || ky < 0 || kz < 0) caps_ = {-1, -1, -1};
}

Degree3 Degree3::empty() { return Degree3(-1, -1, -1); }

int Degree3::dim() const {
  if (is_empty()) return 0;
  return (caps_[0] + 1) * (caps_[1] + 1) * (caps_[2] + 1);
}

Degree3 Degree3::with_cap(int axis, int cap) const {
  if (is_empty()) return *this;
  auto c = caps_;
  c[axis] = cap;
  return Degree3(c[0], c[1], c[2]);
}

bool Degree3::contains(const Degree3& other) const {
  if (other.is_empty()) return true;
  if (is_empty()) return false;
  for (int a = 0; a < 3; ++a)
    if (other.caps_[a] > caps_[a]) return false;
  return true;
}

Degree3 Degree3::max_with(const Degree3& other) const {
  if (is_empty()) return other;
  if (other.is_empty()) return *this;
  return Degree3(std::max(caps_[0], other.caps_[0]), std::max(caps_[1], other.caps_[1]),
                 std::max(caps_[2], other.caps_[2]));
}

std::string Degree3::to_string() const {
  if (is_empty()) return "Q_{empty}";
  std::ostringstream os;
  os << "Q_{" << caps_[0] << "," << caps_[1] << "," << caps_[2] << "}";
  return os.str();
}

// ---------------------------------------------------------------------------
// CellFrame / EntityRef

bool CellFrame::is_reference() const {
  for (int a = 0; a < 3; ++a)
    if (origin[a] != 0 || size[a] != 1) return false;
  return true;
}

int EntityRef::free_count() const {
  int n = 0;
  for (int a = 0; a < 3; ++a) n += is_free(a) ? 1 : 0;
  return n;
}

int EntityRef::tag_axis() const {
  if (kind == EntityKind::edge) {
    for (int a = 0; a < 3; ++a)
      if (is_free(a)) return a;
  }
  if (kind == EntityKind::face) {
    for (int a = 0; a < 3; ++a)
      if (!is_free(a)) return a;
  }
  return -1;
}

std::string EntityRef::tag_name() const {
  switch (kind) {
    case EntityKind::vertex:
      return "v";
    case EntityKind::edge:
      return std::string("e_") + axis_name(tag_axis());
    case EntityKind::face: {
      std::string s = "F_";
      for (int a = 0; a < 3; ++a)
        if (is_free(a)) s += axis_name(a);
      return s;
    }
    case EntityKind::cell:
      return "T";
  }
  return "?";
}

void EntityRef::validate() const {
  for (int a = 0; a < 3; ++a)
    if (hi[a] < lo[a]) throw std::invalid_argument("entity corners out of order");
  if (free_count() != static_cast<int>(kind))
    throw std::invalid_argument("entity extent does not match its kind");
}

// ---------------------------------------------------------------------------
// TensorPoly

TensorPoly::TensorPoly(const Degree3& degree, const CellFrame& frame)
    : degree_(degree), frame_(frame), coeffs_(static_cast<std::size_t>(degree.dim())) {}

TensorPoly TensorPoly::constant(const Rational& c, const CellFrame& frame) {
  TensorPoly p(Degree3(0, 0, 0), frame);
  p.coeffs_[0] = c;
  return p;
}

TensorPoly TensorPoly::monomial(const Exponents& e, const Rational& c, const CellFrame& frame) {
  TensorPoly p(Degree3(e[0], e[1], e[2]), frame);
  p.coeff(e) = c;
  return p;
}

TensorPoly TensorPoly::coordinate(int axis, const CellFrame& frame) {
  Exponents e{0, 0, 0};
  e[axis] = 1;
  TensorPoly p(Degree3(e[0], e[1], e[2]), frame);
  p.coeff({0, 0, 0}) = frame.origin[axis];
  p.coeff(e) = frame.size[axis];
  return p;
}

bool TensorPoly::in_range(const Exponents& e) const {
  if (degree_.is_empty()) return false;
  for (int a = 0; a < 3; ++a)
    if (e[a] < 0 || e[a] > degree_[a]) return false;
  return true;
}

std::size_t TensorPoly::flat_index(const Exponents& e) const {
  if (!in_range(e)) throw std::out_of_range("monomial outside degree grid");
  return static_cast<std::size_t>((e[0] * (degree_[1] + 1) + e[1]) * (degree_[2] + 1) + e[2]);
}

Exponents TensorPoly::exponents_at(std::size_t flat) const {
  const int nz = degree_[2] + 1;
  const int ny = degree_[1] + 1;
  const int f = static_cast<int>(flat);
  return {f / (ny * nz), (f / nz) % ny, f % nz};
}

Rational TensorPoly::coeff_or_zero(const Exponents& e) const {
  return in_range(e) ? coeffs_[flat_index(e)] : Rational(0);
}

bool TensorPoly::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c == 0; });
}

Degree3 TensorPoly::effective_degree() const {
  std::array<int, 3> top{-1, -1, -1};
  bool any = false;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    any = true;
    const auto e = exponents_at(i);
    for (int a = 0; a < 3; ++a) top[a] = std::max(top[a], e[a]);
  }
  if (!any) return Degree3::empty();
  return Degree3(top[0], top[1], top[2]);
}

Rational TensorPoly::evaluate(const Point3& pt) const {
  if (degree_.is_empty()) return Rational(0);
  // Horner in z, then y, then x.
  Rational result(0);
  for (int i = degree_[0]; i >= 0; --i) {
    Rational yz(0);
    for (int j = degree_[1]; j >= 0; --j) {
      Rational zs(0);
      for (int l = degree_[2]; l >= 0; --l) zs = zs * pt[2] + coeff({i, j, l});
      yz = yz * pt[1] + zs;
    }
    result = result * pt[0] + yz;
  }
  return result;
}

Rational TensorPoly::evaluate_physical(const Point3& point) const {
  Point3 ref;
  for (int a = 0; a < 3; ++a) ref[a] = frame_.to_reference(a, point[a]);
  return evaluate(ref);
}

TensorPoly TensorPoly::resized(const Degree3& degree) const {
  TensorPoly out(degree, frame_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    const auto e = exponents_at(i);
    if (!out.in_range(e))
      throw std::domain_error("polynomial does not fit in " + degree.to_string());
    out.coeff(e) = coeffs_[i];
  }
  return out;
}

namespace {

void require_same_frame(const TensorPoly& a, const TensorPoly& b) {
  if (!(a.frame() == b.frame())) throw std::invalid_argument("polynomials live on different cells");
}

}  // namespace

TensorPoly& TensorPoly::operator+=(const TensorPoly& other) {
  if (other.degree_.is_empty()) return *this;
  if (degree_.is_empty() && coeffs_.empty()) {
    *this = other;
    return *this;
  }
  require_same_frame(*this, other);
  if (!degree_.contains(other.degree_)) *this = resized(degree_.max_with(other.degree_));
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i)
    if (other.coeffs_[i] != 0) coeff(other.exponents_at(i)) += other.coeffs_[i];
  return *this;
}

TensorPoly& TensorPoly::operator-=(const TensorPoly& other) { return *this += -other; }

TensorPoly& TensorPoly::operator*=(const Rational& s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

TensorPoly TensorPoly::operator-() const {
  TensorPoly out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

TensorPoly operator*(const TensorPoly& a, const TensorPoly& b) {
  if (a.degree().is_empty() || b.degree().is_empty()) {
    TensorPoly z;
    z.set_frame(a.degree().is_empty() ? b.frame() : a.frame());
    return z;
  }
  require_same_frame(a, b);
  TensorPoly out(Degree3(a.degree()[0] + b.degree()[0], a.degree()[1] + b.degree()[1],
                         a.degree()[2] + b.degree()[2]),
                 a.frame());
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    const auto ea = a.exponents_at(i);
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
      if (b.coeffs_[j] == 0) continue;
      const auto eb = b.exponents_at(j);
      out.coeff({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}) += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  return out;
}

bool operator==(const TensorPoly& a, const TensorPoly& b) {
  const bool az = a.is_zero(), bz = b.is_zero();
  if (az || bz) return az && bz;
  if (!(a.frame_ == b.frame_)) return false;
  const Degree3 grid = a.degree_.max_with(b.degree_);
  for (int i = 0; i <= grid[0]; ++i)
    for (int j = 0; j <= grid[1]; ++j)
      for (int l = 0; l <= grid[2]; ++l)
        if (a.coeff_or_zero({i, j, l}) != b.coeff_or_zero({i, j, l})) return false;
  return true;
}

std::string TensorPoly::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    const auto e = exponents_at(i);
    if (!first) os << " + ";
    first = false;
    os << cuboid::to_string(coeffs_[i]);
    for (int a = 0; a < 3; ++a) {
      if (e[a] == 0) continue;
      os << "*" << axis_name(a);
      if (e[a] > 1) os << "^" << e[a];
    }
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------------------
// Calculus

TensorPoly differentiate(const TensorPoly& p, Axis axis) {
  const int a = index(axis);
  const Degree3 out_degree = p.degree().shifted(a, -1);
  TensorPoly out(out_degree, p.frame());
  if (out_degree.is_empty()) return out;
  const Rational chain = 1 / p.frame().size[a];
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
    const Rational& c = p.coeffs()[i];
    if (c == 0) continue;
    auto e = p.exponents_at(i);
    if (e[a] == 0) continue;
    const int n = e[a];
    e[a] -= 1;
    out.coeff(e) = c * n * chain;
  }
  return out;
}

TensorPoly differentiate(const TensorPoly& p, const Exponents& alpha) {
  TensorPoly out = p;
  for (int a = 0; a < 3; ++a)
    for (int n = 0; n < alpha[a]; ++n) out = differentiate(out, axis_of(a));
  return out;
}

TensorPoly antiderivative(const TensorPoly& p, Axis axis) {
  const int a = index(axis);
  if (p.degree().is_empty()) return p;
  TensorPoly out(p.degree().shifted(a, 1), p.frame());
  const Rational& h = p.frame().size[a];
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
    const Rational& c = p.coeffs()[i];
    if (c == 0) continue;
    auto e = p.exponents_at(i);
    e[a] += 1;
    out.coeff(e) = c * h / e[a];
  }
  return out;
}

namespace {

// Reference coordinate of each fixed entity axis (0 or 1), -1 for free axes.
std::array<int, 3> locate_on_cell(const CellFrame& frame, const EntityRef& entity) {
  std::array<int, 3> fixed{-1, -1, -1};
  for (int a = 0; a < 3; ++a) {
    const Rational lo = frame.origin[a];
    const Rational hi = frame.origin[a] + frame.size[a];
    if (entity.is_free(a)) {
      if (entity.lo[a] != lo || entity.hi[a] != hi)
        throw std::invalid_argument("entity " + entity.tag_name() + " is not on the cell");
    } else if (entity.lo[a] == lo) {
      fixed[a] = 0;
    } else if (entity.lo[a] == hi) {
      fixed[a] = 1;
    } else {
      throw std::invalid_argument("entity " + entity.tag_name() + " is not on the cell");
    }
  }
  return fixed;
}

}  // namespace

TensorPoly trace(const TensorPoly& p, const EntityRef& entity) {
  entity.validate();
  const auto fixed = locate_on_cell(p.frame(), entity);
  if (p.degree().is_empty()) return p;
  Degree3 out_degree = p.degree();
  for (int a = 0; a < 3; ++a)
    if (fixed[a] >= 0) out_degree = out_degree.with_cap(a, 0);
  TensorPoly out(out_degree, p.frame());
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) {
    const Rational& c = p.coeffs()[i];
    if (c == 0) continue;
    auto e = p.exponents_at(i);
    bool vanishes = false;
    for (int a = 0; a < 3; ++a) {
      if (fixed[a] < 0) continue;
      if (fixed[a] == 0 && e[a] > 0) vanishes = true;
      e[a] = 0;
    }
    if (!vanishes) out.coeff(e) += c;
  }
  return out;
}

Rational moment(const TensorPoly& p, const TensorPoly& weight, const EntityRef& entity) {
  const TensorPoly restricted = trace(p, entity);
  if (restricted.degree().is_empty() || weight.degree().is_empty()) return Rational(0);
  for (std::size_t j = 0; j < weight.coeffs().size(); ++j) {
    if (weight.coeffs()[j] == 0) continue;
    const auto e = weight.exponents_at(j);
    for (int a = 0; a < 3; ++a)
      if (!entity.is_free(a) && e[a] != 0)
        throw std::invalid_argument("moment weight depends on a fixed axis of " +
                                    entity.tag_name());
  }
  Rational total(0);
  for (std::size_t i = 0; i < restricted.coeffs().size(); ++i) {
    const Rational& c = restricted.coeffs()[i];
    if (c == 0) continue;
    const auto ei = restricted.exponents_at(i);
    for (std::size_t j = 0; j < weight.coeffs().size(); ++j) {
      const Rational& w = weight.coeffs()[j];
      if (w == 0) continue;
      const auto ej = weight.exponents_at(j);
      Rational term = c * w;
      for (int a = 0; a < 3; ++a)
        if (entity.is_free(a)) term /= ei[a] + ej[a] + 1;
      total += term;
    }
  }
  for (int a = 0; a < 3; ++a)
    if (entity.is_free(a)) total *= p.frame().size[a];
  return total;
}

}  // namespace cuboid
