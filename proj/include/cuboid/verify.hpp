#pragma once

// Verification engine: exact ranks, exactness ladders, dimension audits,
// constructive preimages of div and the single-cell polynomial complexes.

#include "cuboid/assembly.hpp"

#include <json.hpp>

#include <cstdint>
#include <random>

namespace cuboid {

enum class RankMode { rational, floating };

std::string_view rank_mode_name(RankMode mode);

/// Rational: fraction-free sparse elimination with Markowitz pivoting.
/// Floating: singular values above 1e-9 times the largest.
int exact_rank(const SparseMatrix& m, RankMode mode = RankMode::rational);

RationalMatrix to_dense(const SparseMatrix& m);

struct ComplexSpec {
  std::string name;  // gradgrad, gradgrad-reduced, elasticity, elasticity-reduced
  int k = 3;
  std::array<FamilyId, 4> spaces;
  std::array<Operator, 3> ops;
  int kernel_dim = 0;  // 4 (affine functions) or 6 (rigid motions)
};

/// Throws std::invalid_argument for unknown names or inadmissible k.
ComplexSpec complex_spec(std::string_view name, int k);
const std::vector<std::string>& complex_names();

struct ExactnessReport {
  std::string complex;
  int k = 0;
  std::array<int, 3> mesh{1, 1, 1};
  std::array<int, 4> dims{};
  std::array<int, 3> ranks{};
  std::array<int, 3> nullities{};
  std::array<bool, 2> composition_zero{};
  std::array<bool, 4> exact{};
  int cohomology_dim = 0;
  bool surjective = false;
  double elapsed_ms = 0;
  RankMode mode = RankMode::rational;
  std::uint64_t seed = 0;

  bool all_exact() const;
  nlohmann::json to_json() const;
};

ExactnessReport verify_complex(const ComplexSpec& spec, const CuboidMesh& mesh,
                               RankMode mode = RankMode::rational, std::uint64_t seed = 0);

/// The closed-form global dimension of a family at the mesh's entity counts.
long dimension_formula(const FamilyId& family, const CuboidMesh& mesh);

struct DimensionCheck {
  long formula = 0;
  long assembled = 0;
  bool match = false;
};
DimensionCheck verify_dimensions(const FamilyId& family, const CuboidMesh& mesh);

/// Global Xi / XiRed vector whose row-wise div is the Q / QRed field q.
std::vector<Rational> div_preimage_gradgrad(const GlobalSpace& q_space, std::span<const Rational> q,
                                            const GlobalSpace& tau_space);
/// Global Gamma / GammaRed vector whose row-wise div is the Z / ZRed field q.
std::vector<Rational> div_preimage_elasticity(const GlobalSpace& q_space, std::span<const Rational> q,
                                              const GlobalSpace& sigma_space);

struct LocalComplexReport {
  std::string complex;
  int k = 0;
  std::array<int, 4> dims{};
  std::array<int, 3> ranks{};
  std::array<bool, 2> composition_zero{};
  int alternating_sum = 0;
  bool exact = false;
};

/// Reference-cell complex on the raw shape spaces in monomial coordinates.
LocalComplexReport verify_local_complex(std::string_view name, int k);

/// Coordinate matrix of an operator between two shape spaces on the
/// reference cell.
SparseMatrix local_operator_matrix(const FamilyId& src, Operator op, const FamilyId& dst);

struct KernelCheck {
  int expected = 0;
  bool interpolants_in_kernel = false;
  int interpolant_rank = 0;
  int nullity = 0;
  int combined_rank = 0;  // rank of [nullspace basis | interpolants]
  bool match = false;
};

/// Compares the nullspace of the first operator with the interpolants of
/// {1, x, y, z} (gradgrad) or of the rigid motions (elasticity).
KernelCheck identify_kernel(const ComplexSpec& spec, const CuboidMesh& mesh);

/// Integers drawn uniformly from [-9, 9].
std::vector<Rational> random_vector(int n, std::mt19937_64& rng);
/// Vector field with Q_{k,k,k} components and coefficients in [-9, 9].
PolyField random_vector_field(int k, std::mt19937_64& rng, const CellFrame& frame = {});

}  // namespace cuboid
