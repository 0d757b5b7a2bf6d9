#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "cvxproj/domspace.hpp"
#include "cvxproj/examples.hpp"
#include "cvxproj/groupdyn.hpp"

using namespace cvx;

namespace {

Vec lift3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Mat diag3(double a, double b, double c) {
  Vec v = lift3(a, b, c);
  return Mat(v.asDiagonal());
}

ConvexDomain simplex(int d) {
  return ConvexDomain::polytope_from_vertices(Mat::Identity(d, d));
}

// The Z^2 lattice of positive diagonal matrices acting on the triangle.
std::pair<ConvexDomain, MatrixGroup> simplex_z2() {
  std::vector<Vec> basis{lift3(1, 0, -1), lift3(0, 1, -1)};
  return standard_simplex_with_lattice(3, basis);
}

}  // namespace

TEST_CASE("MatrixGroup construction and word evaluation") {
  SUBCASE("default labels, inverses, and alphabet") {
    auto [dom, group] = simplex_z2();
    CHECK(group.rank() == 2);
    CHECK(group.ambient() == 3);
    CHECK(group.alphabet_size() == 4);
    CHECK(group.generators()[0].label() == "g1");
    CHECK(group.inverses()[1].label() == "g2'");
    CHECK_FALSE(group.involutive(0));
    CHECK(group.inverse_symbol(0) == 2);
    CHECK(group.inverse_symbol(3) == 1);
    ProjectiveMap prod = group.evaluate_word("g1 g2'");
    ProjectiveMap expect(diag3(std::exp(1.0), std::exp(-1.0), 1.0));
    CHECK(prod.distance_to(expect) < 1e-12);
    CHECK(group.evaluate_word("").distance_to(ProjectiveMap::identity(3)) <
          1e-15);
    CHECK_THROWS_AS(group.evaluate_word("g3"), std::invalid_argument);
  }
  SUBCASE("involutions share their inverse symbol") {
    MatrixGroup tri = triangle_group(2, 3, 7);
    CHECK(tri.rank() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(tri.involutive(i));
      CHECK(tri.inverse_symbol(i) == i);
      CHECK(tri.symbol(i).distance_to(tri.symbol(i + 3)) < 1e-12);
    }
    CHECK(tri.generators()[0].label() == "a");
    ProjectiveMap sq = tri.evaluate_word("b b");
    CHECK(sq.distance_to(ProjectiveMap::identity(3)) < 1e-9);
  }
  SUBCASE("duplicate labels are rejected") {
    std::vector<ProjectiveMap> gens;
    gens.emplace_back(diag3(2, 1, 0.5), "a");
    gens.emplace_back(diag3(1, 2, 0.5), "a");
    CHECK_THROWS_AS(MatrixGroup(std::move(gens)), std::invalid_argument);
  }
  SUBCASE("domain hint rejects non-preserving generators") {
    Mat rot = Mat::Zero(3, 3);
    rot(0, 1) = -1;
    rot(1, 0) = 1;
    rot(2, 2) = 1;
    std::vector<ProjectiveMap> gens;
    gens.emplace_back(rot);
    CHECK_THROWS_AS(MatrixGroup(std::move(gens), simplex(3)),
                    std::invalid_argument);
  }
}

TEST_CASE("orbit enumeration") {
  auto [dom, group] = simplex_z2();
  SUBCASE("the Z^2 lattice ball has the expected count") {
    OrbitCloud cloud = orbit(group, dom, {dom.center()}, 3);
    // reduced words in Z^2 up to length 3 <-> lattice points with
    // |i| + |j| <= 3, of which there are 2*3*(3+1) + 1 = 25
    CHECK(cloud.entries.size() == 25);
    CHECK(cloud.entries[0].word.empty());
    CHECK(cloud.entries[0].word_length == 0);
    // BFS order: lengths are nondecreasing
    for (size_t i = 0; i + 1 < cloud.entries.size(); ++i)
      CHECK(cloud.entries[i].word_length <=
            cloud.entries[i + 1].word_length);
    // dedup: all maps pairwise distinct
    for (size_t i = 0; i < cloud.entries.size(); ++i)
      for (size_t j = i + 1; j < cloud.entries.size(); ++j)
        CHECK(cloud.entries[i].map.distance_to(cloud.entries[j].map) > 1e-8);
    // orbit points stay interior (the lattice preserves the simplex)
    for (const auto& e : cloud.entries)
      CHECK(contains(dom, e.points[0]) == Location::Interior);
  }
  SUBCASE("the trivial group has a one-point orbit") {
    std::vector<ProjectiveMap> gens{ProjectiveMap::identity(3)};
    MatrixGroup triv(std::move(gens));
    OrbitCloud cloud = orbit(triv, dom, {dom.center()}, 5);
    CHECK(cloud.entries.size() == 1);
  }
  SUBCASE("exterior basepoints are rejected") {
    CHECK_THROWS_AS(orbit(group, dom, {ProjPoint(lift3(1, -1, 1))}, 2),
                    std::invalid_argument);
  }
}

TEST_CASE("limit_set_sample") {
  auto [dom, group] = simplex_z2();
  SUBCASE("lattice limit points lie on the triangle boundary") {
    LimitSetSample lam =
        limit_set_sample(group, dom, {dom.center()}, 12, 1e-3);
    REQUIRE(!lam.points.empty());
    std::set<std::vector<int>> carriers;
    for (const auto& lp : lam.points) {
      CHECK(contains(dom, lp.point) == Location::Boundary);
      CHECK(lp.face.dim <= 1);
      carriers.insert(lp.face.carrier);
    }
    // deep words accumulate on every edge and every vertex
    int edges = 0, vertices = 0;
    for (const auto& c : carriers) (c.size() == 1 ? edges : vertices)++;
    CHECK(edges == 3);
    CHECK(vertices == 3);
  }
  SUBCASE("a tight epsilon yields an empty sample with diagnostics") {
    LimitSetSample lam =
        limit_set_sample(group, dom, {dom.center()}, 2, 1e-8);
    CHECK(lam.points.empty());
    CHECK(lam.diagnostics.find("epsilon") != std::string::npos);
  }
  SUBCASE("triangle-group limit points sit on the circle at infinity") {
    ConvexDomain disk = klein_model(3);
    MatrixGroup tri = triangle_group(2, 3, 7);
    LimitSetSample lam =
        limit_set_sample(tri, disk, {disk.center()}, 10, 5e-2);
    REQUIRE(!lam.points.empty());
    Mat form = disk.ellipsoid_rep().form;
    for (const auto& lp : lam.points) {
      Vec x = lp.point.rep();
      CHECK(std::abs(x.dot(form * x)) < 1e-7);
      CHECK(lp.face.dim == 0);
    }
  }
}

TEST_CASE("convex_core_sample") {
  SUBCASE("the lattice core fills the whole triangle") {
    auto [dom, group] = simplex_z2();
    LimitSetSample lam =
        limit_set_sample(group, dom, {dom.center()}, 12, 1e-3);
    HullResult core = convex_core_sample(dom, lam);
    CHECK_FALSE(core.degenerate);
    CHECK(domain_distance(core.hull, dom) < 1e-2);
  }
  SUBCASE("a Schottky core stays well inside the disk") {
    ConvexDomain disk = klein_model(3);
    MatrixGroup sch = schottky_group(4.0, 4.0, std::acos(-1.0) / 2);
    LimitSetSample lam =
        limit_set_sample(sch, disk, {disk.center()}, 6, 1e-2);
    REQUIRE(lam.points.size() >= 4);
    HullResult core = convex_core_sample(disk, lam);
    CHECK_FALSE(core.degenerate);
    CHECK(domain_distance(core.hull, disk) > 0.05);
  }
  SUBCASE("two limit points give a degenerate segment hull") {
    ConvexDomain dom = simplex(3);
    LimitSetSample lam;
    for (double s : {1.0, -1.0}) {
      Vec v = lift3(0.5 + 0.3 * s, 0.5 - 0.3 * s, 0);
      lam.points.push_back(
          LimitPoint{ProjPoint(v), "", face_of(dom, ProjPoint(v)), 0});
    }
    HullResult core = convex_core_sample(dom, lam);
    CHECK(core.degenerate);
    REQUIRE(core.span.has_value());
    CHECK(core.span->dim() == 2);
  }
}

TEST_CASE("dual limit sets pair with the primal sample") {
  SUBCASE("lattice on the simplex") {
    auto [dom, group] = simplex_z2();
    LimitSetSample lam =
        limit_set_sample(group, dom, {dom.center()}, 12, 1e-3);
    LimitSetSample dual = dual_limit_set_sample(group, dom, 12, 1e-3);
    REQUIRE(!lam.points.empty());
    REQUIRE(!dual.points.empty());
    PairingReport rep = verify_limit_dual_pairing(lam, dual, 1e-2);
    CHECK(rep.pass);
    CHECK(rep.uncovered.empty());
  }
  SUBCASE("a mismatched dual sample is flagged") {
    auto [dom, group] = simplex_z2();
    LimitSetSample lam =
        limit_set_sample(group, dom, {dom.center()}, 8, 1e-2);
    REQUIRE(!lam.points.empty());
    LimitSetSample bogus;
    Vec w = lift3(1, 1, 1).normalized();  // pairs with no boundary point
    bogus.points.push_back(
        LimitPoint{ProjPoint(w), "", lam.points[0].face, 0});
    PairingReport rep = verify_limit_dual_pairing(lam, bogus, 1e-2);
    CHECK_FALSE(rep.pass);
    CHECK(!rep.uncovered.empty());
    CHECK(rep.max_residual > 0.1);
  }
}

TEST_CASE("cartan_trace and gap growth") {
  auto [dom, group] = simplex_z2();
  SUBCASE("diagonal powers grow every gap linearly") {
    std::vector<std::string> words;
    std::string w;
    for (int n = 1; n <= 8; ++n) {
      w = w.empty() ? "g1" : w + " g1";
      words.push_back(w);
    }
    auto trace = cartan_trace(words, group);
    // g1^n = diag(e^n, 1, e^-n): mu = (n, 0, -n)
    for (int n = 1; n <= 8; ++n) {
      CHECK(trace[n - 1].gap(1) == doctest::Approx(n).epsilon(1e-9));
      CHECK(trace[n - 1].gap(2) == doctest::Approx(n).epsilon(1e-9));
    }
    GapGrowthReport rep = check_gap_growth(trace, 1, 0.5);
    CHECK(rep.gap_growth);
    GapGrowthReport rep2 = check_gap_growth(trace, 2, 0.5);
    CHECK(rep2.gap_growth);
    CHECK(rep2.top_bound == doctest::Approx(8.0).epsilon(1e-9));
  }
  SUBCASE("a bounded trace does not certify growth") {
    std::vector<std::string> words{"g1", "g1 g1'", "g1", "g1 g1'", "g1"};
    GapGrowthReport rep = check_gap_growth(cartan_trace(words, group), 1);
    CHECK_FALSE(rep.gap_growth);
    CHECK_THROWS_AS(check_gap_growth({}, 1), std::invalid_argument);
  }
  SUBCASE("triangle-group axis slope matches the eigenvalue oracle") {
    MatrixGroup tri = triangle_group(2, 3, 7);
    ProjectiveMap h = tri.evaluate_word("a b c");
    Eigen::EigenSolver<Mat> eig(h.mat());
    double lmax = eig.eigenvalues().cwiseAbs().maxCoeff();
    double lmin = eig.eigenvalues().cwiseAbs().minCoeff();
    double slope = std::log(lmax / lmin);
    REQUIRE(slope > 0.1);  // the word is hyperbolic
    std::vector<std::string> words;
    std::string w;
    for (int n = 1; n <= 12; ++n) {
      w = w.empty() ? "a b c" : w + " a b c";
      words.push_back(w);
    }
    auto trace = cartan_trace(words, tri);
    double measured =
        (trace[11].mu(0) - trace[11].mu(2) -
         (trace[5].mu(0) - trace[5].mu(2))) / 6.0;
    CHECK(measured == doctest::Approx(slope).epsilon(1e-6));
    CHECK(check_gap_growth(trace, 1).gap_growth);
  }
}

TEST_CASE("detect_segments") {
  SUBCASE("the lattice limit set has one segment per edge") {
    auto [dom, group] = simplex_z2();
    LimitSetSample lam =
        limit_set_sample(group, dom, {dom.center()}, 12, 1e-3);
    auto segs = detect_segments(dom, lam);
    REQUIRE(segs.size() == 3);
    std::set<std::vector<int>> carriers;
    for (const auto& s : segs) {
      CHECK(s.point_ids.size() >= 2);
      carriers.insert(s.carrier);
    }
    CHECK(carriers.size() == 3);
  }
  SUBCASE("strictly convex boundaries carry no segments") {
    ConvexDomain disk = klein_model(3);
    MatrixGroup tri = triangle_group(2, 3, 7);
    LimitSetSample lam =
        limit_set_sample(tri, disk, {disk.center()}, 10, 5e-2);
    CHECK(detect_segments(disk, lam).empty());
    MatrixGroup sch = schottky_group(4.0, 4.0, std::acos(-1.0) / 2);
    LimitSetSample lam2 =
        limit_set_sample(sch, disk, {disk.center()}, 6, 1e-2);
    CHECK(detect_segments(disk, lam2).empty());
  }
  SUBCASE("synthetic collinear points form one cluster") {
    Mat v(4, 3);
    v << 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1;
    ConvexDomain sq = ConvexDomain::polytope_from_vertices(v);
    LimitSetSample lam;
    for (double t : {-0.5, 0.0, 0.5}) {
      ProjPoint p(lift3(t, 1, 1));  // top edge
      lam.points.push_back(LimitPoint{p, "", face_of(sq, p), 0});
    }
    ProjPoint q(lift3(1, 0.3, 1));  // lone point on the right edge
    lam.points.push_back(LimitPoint{q, "", face_of(sq, q), 0});
    auto segs = detect_segments(sq, lam);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].point_ids.size() == 3);
    double span = angle_distance(segs[0].end_a, segs[0].end_b);
    CHECK(span > 0.3);
  }
}

TEST_CASE("peripheral_checks") {
  SUBCASE("disjoint Schottky factors") {
    ConvexDomain disk = klein_model(3);
    MatrixGroup sch = schottky_group(4.0, 4.0, std::acos(-1.0) / 2);
    std::vector<ProjectiveMap> gs{sch.generators()[0]};
    std::vector<ProjectiveMap> gt{sch.generators()[1]};
    PeripheralFamily fam;
    fam.subgroups.emplace_back(gs, disk);
    fam.subgroups.emplace_back(gt, disk);
    for (const auto& sub : fam.subgroups)
      fam.limit_samples.push_back(
          limit_set_sample(sub, disk, {disk.center()}, 6, 1e-2));
    LimitSetSample lam =
        limit_set_sample(sch, disk, {disk.center()}, 6, 1e-2);
    PeripheralReport rep = peripheral_checks(disk, fam, lam);
    CHECK(rep.disjoint);
    CHECK(rep.segments_peripheral);  // no segments on a round boundary
    // the generator fixed points themselves are classified
    int matched = 0;
    for (int c : rep.classes) matched += (c >= 0);
    CHECK(matched > 0);
  }
  SUBCASE("overlapping cyclic factors produce a witness") {
    auto [dom, group] = simplex_z2();
    // <g1> limits on vertices [e1], [e3]; <g2> on [e2], [e3]
    PeripheralFamily fam;
    fam.subgroups.emplace_back(
        std::vector<ProjectiveMap>{group.generators()[0]}, dom);
    fam.subgroups.emplace_back(
        std::vector<ProjectiveMap>{group.generators()[1]}, dom);
    for (const auto& sub : fam.subgroups)
      fam.limit_samples.push_back(
          limit_set_sample(sub, dom, {dom.center()}, 14, 1e-3));
    LimitSetSample lam =
        limit_set_sample(group, dom, {dom.center()}, 10, 1e-2);
    PeripheralReport rep = peripheral_checks(dom, fam, lam);
    CHECK_FALSE(rep.disjoint);
    CHECK(rep.overlap_witness == std::pair<int, int>{0, 1});
  }
  SUBCASE("a family containing the full limit set covers all segments") {
    auto [dom, group] = simplex_z2();
    LimitSetSample lam =
        limit_set_sample(group, dom, {dom.center()}, 12, 1e-3);
    PeripheralFamily fam;
    fam.subgroups.push_back(group);
    fam.limit_samples.push_back(lam);
    PeripheralReport rep = peripheral_checks(dom, fam, lam);
    CHECK(rep.segments_peripheral);
    for (int c : rep.classes) CHECK(c == 0);
  }
}

TEST_CASE("north_south_check") {
  SUBCASE("diagonal powers contract the simplex boundary onto a vertex") {
    ConvexDomain dom = simplex(3);
    std::vector<ProjectiveMap> seq;
    Mat g = diag3(9, 3, 1);
    Mat acc = Mat::Identity(3, 3);
    for (int n = 0; n < 8; ++n) {
      acc = acc * g;
      seq.emplace_back(acc);
    }
    // repelling face: the edge [e2, e3]
    FaceDescriptor face = face_of(dom, ProjPoint(lift3(0, 0.5, 0.5)));
    std::vector<ProjPoint> ks{ProjPoint(lift3(0.5, 0.5, 0)),
                              ProjPoint(lift3(0.5, 0, 0.5)),
                              ProjPoint(lift3(0.8, 0, 0.2))};
    NorthSouthReport rep = north_south_check(seq, dom, ks, face);
    CHECK(rep.gap_index == 1);
    CHECK(rep.attracting.dim() == 1);
    CHECK(point_to_subspace_distance(ProjPoint(lift3(1, 0, 0)),
                                     rep.attracting) < 1e-12);
    CHECK(rep.supports_ok);
    CHECK(rep.decreasing);
    CHECK(rep.converged);
    CHECK(rep.repelling_final_dist < 1e-3);
  }
  SUBCASE("bounded sequences are rejected") {
    ConvexDomain disk = klein_model(3);
    Mat rot = Mat::Zero(3, 3);
    rot(0, 1) = -1;
    rot(1, 0) = 1;
    rot(2, 2) = 1;
    std::vector<ProjectiveMap> seq{ProjectiveMap(rot),
                                   ProjectiveMap(Mat(rot * rot))};
    FaceDescriptor face = face_of(disk, ProjPoint(lift3(0, 1, 1)));
    CHECK_THROWS_AS(
        north_south_check(seq, disk, {ProjPoint(lift3(1, 0, 1))}, face),
        NotDivergentError);
  }
  SUBCASE("interior sample points are rejected") {
    ConvexDomain dom = simplex(3);
    std::vector<ProjectiveMap> seq{ProjectiveMap(diag3(9, 3, 1))};
    FaceDescriptor face = face_of(dom, ProjPoint(lift3(0, 0.5, 0.5)));
    CHECK_THROWS_AS(north_south_check(seq, dom, {dom.center()}, face),
                    std::invalid_argument);
  }
  SUBCASE("a hyperbolic triangle-group element at high power") {
    ConvexDomain disk = klein_model(3);
    MatrixGroup tri = triangle_group(2, 3, 7);
    ProjectiveMap h = tri.evaluate_word("a b c");
    std::vector<ProjectiveMap> seq;
    ProjectiveMap acc = ProjectiveMap::identity(3);
    for (int n = 0; n < 30; ++n) {
      acc = acc * h;
      seq.push_back(acc);
    }
    DivergentSplit split = attracting_repelling_subspaces(seq, 0.5);
    // K: boundary points away from the repelling fixed point
    ProjPoint rep_fix(split.repelling.basis().row(0).transpose());
    std::vector<ProjPoint> ks;
    for (const auto& b : sample_boundary(disk, 16, 7))
      if (point_to_subspace_distance(b, split.repelling) > 0.3)
        ks.push_back(b);
    REQUIRE(ks.size() >= 8);
    FaceDescriptor face = face_of(disk, rep_fix);
    NorthSouthReport rep = north_south_check(seq, disk, ks, face, 1e-5);
    CHECK(rep.converged);
    CHECK(rep.final_max_dist < 1e-5);
    CHECK(rep.supports_ok);
    CHECK(rep.repelling_final_dist < 1e-3);
  }
}
