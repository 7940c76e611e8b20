#include "support.hpp"

#include <doctest.h>

using namespace cuboid;

namespace {

RationalMatrix random_matrix(int r, int c, double density = 0.3) {
  std::bernoulli_distribution keep(density);
  RationalMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      if (keep(testing::rng())) m(i, j) = testing::random_rational(testing::rng());
  return m;
}

}  // namespace

TEST_CASE("rank of simple matrices") {
  CHECK(exact_rank(RationalMatrix(4, 5)) == 0);
  RationalMatrix id(10, 10);
  for (int i = 0; i < 10; ++i) id(i, i) = 1;
  CHECK(exact_rank(id) == 10);
  CHECK(inverse(id).is_identity());
  RationalMatrix dup(3, 3);
  for (int j = 0; j < 3; ++j) {
    dup(0, j) = j + 1;
    dup(1, j) = 2 * (j + 1);
    dup(2, j) = j * j;
  }
  CHECK(exact_rank(dup) == 2);
  CHECK_THROWS_AS(inverse(dup), std::domain_error);
}

TEST_CASE("block partition splits independent blocks") {
  RationalMatrix m(4, 4);
  m(0, 2) = 1;
  m(2, 2) = 3;
  m(1, 1) = 5;
  m(3, 3) = 1;
  m(3, 1) = 2;
  const auto p = block_partition(m);
  // Column 0 is empty and forms a group with no rows.
  int with_rows = 0;
  for (const auto& g : p.row_groups) with_rows += !g.empty();
  CHECK(with_rows == 2);
  CHECK(p.row_groups.size() == 3);
}

TEST_CASE("inverse and nullspace on random matrices") {
  for (int t = 0; t < 10; ++t) {
    RationalMatrix m = random_matrix(12, 12, 0.5);
    const int r = exact_rank(m);
    CHECK(r == testing::modular_rank(testing::sparse_of(m)));
    const auto null = nullspace(m);
    CHECK(static_cast<int>(null.size()) == 12 - r);
    for (const auto& v : null)
      for (const auto& y : m.multiply(v)) CHECK(y == 0);
    if (r == 12) CHECK((m * inverse(m)).is_identity());
  }
}
