#pragma once

#include "cuboid/verify.hpp"

#include <cstdint>
#include <random>

namespace testing {

using namespace cuboid;

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(12345);
  return engine;
}

inline Rational small_int(std::mt19937_64& g) { return std::uniform_int_distribution<int>(-9, 9)(g); }

inline TensorPoly random_poly(const Degree3& d, const CellFrame& frame = {}) {
  TensorPoly p(d, frame);
  for (int t = 0; t < d.dim(); ++t) p.coeff(p.exponents_at(t)) = small_int(rng());
  return p;
}

inline Rational random_rational(std::mt19937_64& g) {
  return make_rational(std::uniform_int_distribution<int>(-20, 20)(g), std::uniform_int_distribution<int>(1, 7)(g));
}

inline Point3 random_point() {
  return {random_rational(rng()), random_rational(rng()), random_rational(rng())};
}

inline PolyField random_member(const ShapeSpaceSpec& space, const CellFrame& frame = {}) {
  return field_from_coordinates(space, random_vector(space.dimension(), rng()), frame);
}

// Rank over GF(p), p = 2^61 - 1, after clearing denominators row by row.
// A lower bound on the rational rank that is equal unless p divides a
// minor; independent of the library's elimination code.
inline int modular_rank(const SparseMatrix& m) {
  using u128 = unsigned __int128;
  const std::uint64_t p = (std::uint64_t(1) << 61) - 1;
  auto reduce = [&](const Integer& z) {
    Integer r = z % Integer(std::to_string(p));
    if (r < 0) r += Integer(std::to_string(p));
    return std::stoull(r.get_str());
  };
  auto mul = [&](std::uint64_t a, std::uint64_t b) { return static_cast<std::uint64_t>((u128(a) * b) % p); };
  auto power = [&](std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  };
  std::vector<std::vector<std::uint64_t>> a(static_cast<std::size_t>(m.rows()),
                                            std::vector<std::uint64_t>(static_cast<std::size_t>(m.cols()), 0));
  for (const auto& t : m.entries()) {
    const std::uint64_t num = reduce(t.value.get_num());
    const std::uint64_t den = reduce(t.value.get_den());
    a[t.row][t.col] = mul(num, power(den, p - 2));
  }
  int rank = 0;
  for (int c = 0; c < m.cols() && rank < m.rows(); ++c) {
    int piv = -1;
    for (int r = rank; r < m.rows(); ++r)
      if (a[r][c]) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    const std::uint64_t inv = power(a[rank][c], p - 2);
    for (int r = rank + 1; r < m.rows(); ++r) {
      if (!a[r][c]) continue;
      const std::uint64_t f = mul(a[r][c], inv);
      for (int j = c; j < m.cols(); ++j)
        if (a[rank][j]) a[r][j] = (a[r][j] + p - mul(f, a[rank][j])) % p;
    }
    ++rank;
  }
  return rank;
}

inline SparseMatrix sparse_of(const RationalMatrix& d) {
  std::vector<Triplet> t;
  for (int r = 0; r < d.rows(); ++r)
    for (int c = 0; c < d.cols(); ++c)
      if (d(r, c) != 0) t.push_back({r, c, d(r, c)});
  return SparseMatrix::from_triplets(d.rows(), d.cols(), std::move(t));
}

// Traced quantities each family keeps single-valued, by face normal.
struct Quantity {
  int component = 0;
  Exponents derivative{0, 0, 0};
  std::vector<int> normals;
};

inline Exponents unit(int a) {
  Exponents e{0, 0, 0};
  e[a] = 1;
  return e;
}

inline std::vector<Quantity> conformity(Family f) {
  std::vector<Quantity> q;
  const auto mc = [](int a, int b) { return matrix_component(std::min(a, b), std::max(a, b)); };
  switch (f) {
    case Family::U:
      q.push_back({0, {0, 0, 0}, {0, 1, 2}});
      for (int a = 0; a < 3; ++a) q.push_back({0, unit(a), {0, 1, 2}});
      break;
    case Family::Sigma:
    case Family::Phi:
    case Family::SigmaRed:
      for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        q.push_back({mc(a, a), {0, 0, 0}, {b, c}});
        q.push_back({mc(a, b), {0, 0, 0}, {0, 1, 2}});
        if (f != Family::SigmaRed) {
          q.push_back({mc(a, a), unit(b), {b}});
          q.push_back({mc(a, a), unit(c), {c}});
          q.push_back({mc(a, b), unit(c), {c}});
        }
      }
      break;
    case Family::Xi:
      for (int a = 0; a < 3; ++a) {
        q.push_back({matrix_component(a, a), {0, 0, 0}, {0, 1, 2}});
        for (int b = 0; b < 3; ++b)
          if (a != b) q.push_back({matrix_component(a, b), {0, 0, 0}, {b, 3 - a - b}});
      }
      break;
    case Family::XiRed:
      for (int a = 0; a < 3; ++a) {
        q.push_back({matrix_component(a, a), {0, 0, 0}, {a}});
        for (int b = 0; b < 3; ++b)
          if (a != b) q.push_back({matrix_component(a, b), {0, 0, 0}, {b}});
      }
      break;
    case Family::X:
      for (int a = 0; a < 3; ++a) q.push_back({a, {0, 0, 0}, {0, 1, 2}});
      break;
    case Family::Gamma:
    case Family::GammaRed:
      for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3;
        q.push_back({mc(a, b), {0, 0, 0}, {a, b}});
        q.push_back({mc(a, a), {0, 0, 0}, {a}});
        if (f == Family::Gamma) q.push_back({mc(a, a), unit(a), {a}});
      }
      break;
    default:
      break;
  }
  return q;
}

// Largest |jump| over every interior face with a listed normal; true when
// all sampled jumps vanish.
inline bool jumps_vanish(const GlobalSpace& space, std::span<const Rational> v, const Quantity& q) {
  const CuboidMesh& mesh = space.mesh();
  for (const auto& face : mesh.interior_faces()) {
    const int normal = mesh.entity_ref(face).tag_axis();
    if (std::find(q.normals.begin(), q.normals.end(), normal) == q.normals.end()) continue;
    for (const auto& j : face_jump(space, v, face, {q.component, q.derivative}))
      if (j != 0) return false;
  }
  return true;
}

}  // namespace testing
