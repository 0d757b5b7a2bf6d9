#include <doctest.h>

#include <cmath>

#include "cvxproj/examples.hpp"

using namespace cvx;

namespace {

Vec zero_sum(std::initializer_list<double> entries) {
  Vec v(static_cast<int>(entries.size()));
  int i = 0;
  for (double e : entries) v(i++) = e;
  return v;
}

}  // namespace

TEST_CASE("standard_simplex_with_lattice") {
  SUBCASE("generators preserve the simplex and its metric") {
    std::vector<Vec> basis{zero_sum({1, 0, -1}), zero_sum({0, 1, -1})};
    auto [dom, group] = standard_simplex_with_lattice(3, basis);
    CHECK(dom.is_polytope());
    CHECK(dom.ambient() == 3);
    CHECK(group.rank() == 2);
    // the constructor already validates preservation via the domain hint
    CHECK(group.domain_hint().has_value());
    for (const auto& g : group.generators())
      CHECK(contains(dom, g.apply(dom.center())) == Location::Interior);
  }
  SUBCASE("the degenerate interval case d = 2 works") {
    std::vector<Vec> basis{zero_sum({2, -2})};
    auto [dom, group] = standard_simplex_with_lattice(2, basis);
    CHECK(dom.ambient() == 2);
    double len = hilbert_distance(dom, dom.center(),
                                  group.generators()[0].apply(dom.center()));
    CHECK(len > 0.5);
  }
  SUBCASE("invalid exponent data is rejected") {
    CHECK_THROWS_AS(standard_simplex_with_lattice(
                        3, {zero_sum({1, 0, -1})}),
                    std::invalid_argument);  // wrong count
    CHECK_THROWS_AS(standard_simplex_with_lattice(
                        3, {zero_sum({1, 0, -1}), zero_sum({2, 0, -2})}),
                    std::invalid_argument);  // dependent basis
    CHECK_THROWS_AS(standard_simplex_with_lattice(
                        3, {zero_sum({1, 0, 0}), zero_sum({0, 1, -1})}),
                    std::invalid_argument);  // not zero-sum
    CHECK_THROWS_AS(standard_simplex_with_lattice(
                        3, {zero_sum({1.5, 0, -1.5}), zero_sum({0, 1, -1})}),
                    std::invalid_argument);  // not integral
  }
}

TEST_CASE("klein_model") {
  ConvexDomain ball = klein_model(4);
  CHECK(ball.is_ellipsoid());
  CHECK(ball.ambient() == 4);
  // chart-unit vectors sit on the boundary quadric
  Vec b(4);
  b << std::sqrt(0.5), 0, std::sqrt(0.5), 1;
  CHECK(contains(ball, ProjPoint(b)) == Location::Boundary);
  CHECK(contains(ball, ball.center()) == Location::Interior);
  CHECK_THROWS_AS(klein_model(1), std::invalid_argument);
}

TEST_CASE("triangle_group") {
  SUBCASE("(3,3,4) reflections preserve the disk") {
    MatrixGroup g = triangle_group(3, 3, 4);
    ConvexDomain disk = klein_model(3);
    Mat form = disk.ellipsoid_rep().form;
    for (const auto& r : g.generators()) {
      CHECK(g.involutive(0));
      CHECK((r.mat().transpose() * form * r.mat() - form).norm() < 1e-8);
      CHECK(contains(disk, r.apply(disk.center())) == Location::Interior);
    }
    // rotation orders: (ab)^3 = (bc)^3 = (ac)^4 = 1
    CHECK(g.evaluate_word("a b a b a b")
              .distance_to(ProjectiveMap::identity(3)) < 1e-8);
    CHECK(g.evaluate_word("a c a c a c a c")
              .distance_to(ProjectiveMap::identity(3)) < 1e-8);
  }
  SUBCASE("non-hyperbolic triples are rejected") {
    CHECK_THROWS_AS(triangle_group(2, 3, 6), std::invalid_argument);  // euclidean
    CHECK_THROWS_AS(triangle_group(2, 3, 5), std::invalid_argument);  // spherical
    CHECK_THROWS_AS(triangle_group(1, 7, 7), std::invalid_argument);
  }
}

TEST_CASE("schottky_group") {
  SUBCASE("long translations certify ping-pong") {
    MatrixGroup g = schottky_group(4.0, 4.0, std::acos(-1.0) / 2);
    CHECK(g.rank() == 2);
    CHECK(g.generators()[0].label() == "s");
    CHECK_FALSE(g.involutive(0));
  }
  SUBCASE("short translations fail the certificate") {
    CHECK_THROWS_AS(schottky_group(0.1, 0.1, std::acos(-1.0) / 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(schottky_group(-1.0, 4.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(schottky_group(4.0, 4.0, 0.0),
                    std::invalid_argument);  // coinciding axes
  }
  SUBCASE("the group is free: reduced words stay distinct") {
    MatrixGroup g = schottky_group(4.0, 4.0, std::acos(-1.0) / 2);
    ConvexDomain disk = klein_model(3);
    OrbitCloud cloud = orbit(g, disk, {disk.center()}, 5);
    // free of rank 2: 1 + 4 * (3^5 - 1) / 2 reduced words up to length 5
    // (longer words collapse numerically toward common rank-1 limits)
    CHECK(cloud.entries.size() == 485);
  }
}

TEST_CASE("make_example presets") {
  SUBCASE("every listed preset builds") {
    for (const std::string& name : example_names()) {
      ExampleInstance inst = make_example(name);
      CHECK(inst.spec.name == name);
      CHECK(inst.domain.ambient() == inst.spec.dimension);
      if (inst.group) CHECK(inst.group->ambient() == inst.spec.dimension);
    }
  }
  SUBCASE("preset metadata matches the construction") {
    ExampleInstance z2 = make_example("simplex-z2");
    CHECK(z2.spec.dimension == 3);
    REQUIRE(z2.group.has_value());
    CHECK(z2.group->rank() == 2);
    ExampleInstance k4 = make_example("klein4");
    CHECK(k4.domain.is_ellipsoid());
    CHECK_FALSE(k4.group.has_value());
    ExampleInstance tri = make_example("triangle-2-3-7");
    CHECK(tri.spec.triangle == std::array<int, 3>{2, 3, 7});
    REQUIRE(tri.group.has_value());
    CHECK(tri.group->rank() == 3);
  }
  SUBCASE("unknown names are rejected with the available list") {
    CHECK_THROWS_WITH_AS(make_example("doughnut"),
                         doctest::Contains("simplex-z2"),
                         std::invalid_argument);
  }
}
