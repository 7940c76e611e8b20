#include "cuboid/operators.hpp"

#include <stdexcept>

namespace cuboid {

int component_count(FieldKind kind) {
  switch (kind) {
    case FieldKind::scalar:
      return 1;
    case FieldKind::vector3:
      return 3;
    case FieldKind::matrix33:
      return 9;
  }
  return 0;
}

PolyField::PolyField(FieldKind kind, Structure structure, const CellFrame& frame)
    : kind_(kind), structure_(structure), frame_(frame) {
  components_.assign(static_cast<std::size_t>(component_count(kind)),
                     TensorPoly(Degree3::empty(), frame));
}

bool PolyField::is_zero() const {
  for (const auto& c : components_)
    if (!c.is_zero()) return false;
  return true;
}

bool PolyField::satisfies_structure() const {
  if (kind_ != FieldKind::matrix33) return true;
  if (structure_ == Structure::symmetric) {
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        if (!(at(a, b) == at(b, a))) return false;
  }
  if (structure_ == Structure::traceless) {
    if (!(at(0, 0) + at(1, 1) + at(2, 2)).is_zero()) return false;
  }
  return true;
}

PolyField PolyField::transposed() const {
  if (kind_ != FieldKind::matrix33) throw std::invalid_argument("transpose needs a matrix field");
  PolyField out = *this;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) out.at(a, b) = at(b, a);
  return out;
}

PolyField& PolyField::operator+=(const PolyField& other) {
  if (kind_ != other.kind_) throw std::invalid_argument("field kind mismatch");
  for (int c = 0; c < size(); ++c) components_[c] += other.components_[c];
  if (structure_ != other.structure_) structure_ = Structure::none;
  return *this;
}

PolyField& PolyField::operator-=(const PolyField& other) {
  if (kind_ != other.kind_) throw std::invalid_argument("field kind mismatch");
  for (int c = 0; c < size(); ++c) components_[c] -= other.components_[c];
  if (structure_ != other.structure_) structure_ = Structure::none;
  return *this;
}

PolyField& PolyField::operator*=(const Rational& s) {
  for (auto& c : components_) c *= s;
  return *this;
}

bool operator==(const PolyField& a, const PolyField& b) {
  if (a.kind_ != b.kind_) return false;
  for (int c = 0; c < a.size(); ++c)
    if (!(a.components_[c] == b.components_[c])) return false;
  return true;
}

// ---------------------------------------------------------------------------

namespace {

void require(const PolyField& f, FieldKind kind, const char* op) {
  if (f.kind() != kind) throw std::invalid_argument(std::string(op) + ": wrong field kind");
}

TensorPoly d(const TensorPoly& p, int axis) { return differentiate(p, axis_of(axis)); }

// Curl of the vector (p0, p1, p2).
std::array<TensorPoly, 3> curl3(const TensorPoly& p0, const TensorPoly& p1, const TensorPoly& p2) {
  return {d(p2, 1) - d(p1, 2), d(p0, 2) - d(p2, 0), d(p1, 0) - d(p0, 1)};
}

}  // namespace

PolyField grad(const PolyField& field) {
  if (field.kind() == FieldKind::scalar) {
    PolyField out(FieldKind::vector3, Structure::none, field.frame());
    for (int a = 0; a < 3; ++a) out[a] = d(field[0], a);
    return out;
  }
  require(field, FieldKind::vector3, "grad");
  PolyField out(FieldKind::matrix33, Structure::none, field.frame());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.at(i, j) = d(field[i], j);
  return out;
}

PolyField curl(const PolyField& v) {
  require(v, FieldKind::vector3, "curl");
  PolyField out(FieldKind::vector3, Structure::none, v.frame());
  auto c = curl3(v[0], v[1], v[2]);
  for (int a = 0; a < 3; ++a) out[a] = std::move(c[a]);
  return out;
}

PolyField gradgrad(const PolyField& u) {
  require(u, FieldKind::scalar, "gradgrad");
  PolyField out(FieldKind::matrix33, Structure::symmetric, u.frame());
  for (int a = 0; a < 3; ++a) {
    const TensorPoly da = d(u[0], a);
    for (int b = a; b < 3; ++b) {
      out.at(a, b) = d(da, b);
      out.at(b, a) = out.at(a, b);
    }
  }
  return out;
}

PolyField curl_rows(const PolyField& sigma) {
  require(sigma, FieldKind::matrix33, "curl_rows");
  PolyField out(FieldKind::matrix33, Structure::none, sigma.frame());
  for (int i = 0; i < 3; ++i) {
    auto row = curl3(sigma.at(i, 0), sigma.at(i, 1), sigma.at(i, 2));
    for (int j = 0; j < 3; ++j) out.at(i, j) = std::move(row[j]);
  }
  return out;
}

PolyField curlT(const PolyField& sigma) {
  require(sigma, FieldKind::matrix33, "curlT");
  return curl_rows(sigma.transposed()).transposed();
}

PolyField div_rows(const PolyField& tau) {
  require(tau, FieldKind::matrix33, "div_rows");
  PolyField out(FieldKind::vector3, Structure::none, tau.frame());
  for (int i = 0; i < 3; ++i) out[i] = d(tau.at(i, 0), 0) + d(tau.at(i, 1), 1) + d(tau.at(i, 2), 2);
  return out;
}

PolyField sym_grad(const PolyField& v) {
  require(v, FieldKind::vector3, "sym_grad");
  PolyField out(FieldKind::matrix33, Structure::symmetric, v.frame());
  const Rational half(1, 2);
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      out.at(a, b) = a == b ? d(v[a], a) : (d(v[a], b) + d(v[b], a)) * half;
      out.at(b, a) = out.at(a, b);
    }
  return out;
}

PolyField curl_curlT(const PolyField& sigma) {
  PolyField out = curl_rows(curlT(sigma));
  out.set_structure(Structure::symmetric);
  if (sigma.structure() == Structure::symmetric && !out.satisfies_structure())
    throw std::logic_error("curl curlT of a symmetric field is not symmetric");
  if (sigma.structure() != Structure::symmetric) out.set_structure(Structure::none);
  return out;
}

PolyField trace_of(const PolyField& sigma) {
  require(sigma, FieldKind::matrix33, "trace_of");
  PolyField out(FieldKind::scalar, Structure::none, sigma.frame());
  out[0] = sigma.at(0, 0) + sigma.at(1, 1) + sigma.at(2, 2);
  return out;
}

std::pair<PolyField, PolyField> check_identity_curl_symgrad(const PolyField& v) {
  require(v, FieldKind::vector3, "check_identity_curl_symgrad");
  const PolyField e = sym_grad(v);
  const PolyField gc = grad(curl(v));
  const Rational half(1, 2);
  PolyField r1 = curl_rows(e) - half * gc.transposed();
  PolyField r2 = curlT(e) - half * gc;
  return {std::move(r1), std::move(r2)};
}

}  // namespace cuboid
