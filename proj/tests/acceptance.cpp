// Acceptance gate: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Target runtime well under five minutes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cvxproj/examples.hpp"
#include "cvxproj/expansion.hpp"
#include "cvxproj/render.hpp"
#include "cvxproj/serialize.hpp"

using namespace cvx;

namespace {

int failures = 0;

void report(int num, const std::string& name, bool pass,
            const std::string& detail) {
  std::cout << "criterion " << num << " " << name << ": "
            << (pass ? "PASS" : "FAIL");
  if (!pass && !detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++failures;
}

void run_criterion(int num, const std::string& name,
                   const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(num, name, pass, detail);
}

Vec lift3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

ConvexDomain simplex(int d) {
  return ConvexDomain::polytope_from_vertices(Mat::Identity(d, d));
}

ConvexDomain square_domain() {
  Mat v(4, 3);
  v << 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1;
  return ConvexDomain::polytope_from_vertices(v);
}

ProjPoint random_interior(const ConvexDomain& dom, std::mt19937_64& rng) {
  if (dom.is_polytope()) {
    const Mat& vl = dom.polytope().vertex_lifts;
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Vec x = Vec::Zero(dom.ambient());
    for (int i = 0; i < vl.rows(); ++i) x += unif(rng) * vl.row(i).transpose();
    return ProjPoint(x);
  }
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Chart& ch = dom.chart();
  int m = dom.ambient() - 1;
  for (;;) {
    Vec y(m);
    for (int i = 0; i < m; ++i) y(i) = gauss(rng);
    if (y.norm() < 1e-9) continue;
    y *= 0.95 * std::pow(unif(rng), 1.0 / m) / y.norm();
    ProjPoint p = ch.from_chart(y);
    if (contains(dom, p) == Location::Interior) return p;
  }
}

Mat random_invertible(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  for (;;) {
    Mat m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = gauss(rng);
    Eigen::JacobiSVD<Mat> svd(m);
    if (svd.singularValues()(d - 1) > 0.05 * svd.singularValues()(0)) return m;
  }
}

/// min over the boundary of the angle distance to x: directional grid
/// sweep in the chart plus golden-section refinement.
double boundary_distance(const ConvexDomain& dom, const ProjPoint& x) {
  const Chart& ch = dom.chart();
  const Vec xc = ch.to_chart(x);
  auto f = [&](double phi) {
    Vec dir(2);
    dir << std::cos(phi), std::sin(phi);
    ChordResult cr = chord(dom, x, ch.from_chart(xc + dir));
    return std::min(angle_distance(x, cr.backward),
                    angle_distance(x, cr.forward));
  };
  const double pi = std::acos(-1.0);
  const int grid = 360;
  double best = 1e300;
  int bi = 0;
  for (int i = 0; i < grid; ++i) {
    double v = f(pi * i / grid);
    if (v < best) {
      best = v;
      bi = i;
    }
  }
  double a = pi * (bi - 1) / grid, b = pi * (bi + 1) / grid;
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = f(c1), f2 = f(c2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = f(c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = f(c2);
    }
  }
  return std::min(best, std::min(f1, f2));
}

double fitted_slope(const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = i + 1;
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

bool criterion1(std::string& detail) {
  ConvexDomain ball = klein_model(3);
  for (double r : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    ProjPoint p = ball.chart().from_chart(lift3(r, 0, 0).head(2));
    double got = hilbert_distance(ball, ball.center(), p);
    double want = 0.5 * std::log((1 + r) / (1 - r));
    if (std::abs(got - want) > 1e-12) {
      detail = "ball r=" + std::to_string(r);
      return false;
    }
  }
  ConvexDomain tri = simplex(3);
  double e = std::exp(1.0);
  double got = hilbert_distance(tri, ProjPoint(lift3(1, 1, 1)),
                                ProjPoint(lift3(e, 1, 1 / e)));
  if (std::abs(got - 1.0) > 1e-9) {
    detail = "simplex distance " + std::to_string(got);
    return false;
  }
  return true;
}

bool criterion2(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(11);
  std::vector<ConvexDomain> doms;
  doms.push_back(simplex(3));
  doms.push_back(square_domain());
  doms.push_back(klein_model(3));
  for (const ConvexDomain& dom : doms) {
    for (int t = 0; t < 1000; ++t) {
      ProjPoint x = random_interior(dom, rng);
      ProjPoint y = random_interior(dom, rng);
      ProjPoint z = random_interior(dom, rng);
      double dxz = hilbert_distance(dom, x, z);
      double dxy = hilbert_distance(dom, x, y);
      double dyz = hilbert_distance(dom, y, z);
      if (dxz > dxy + dyz + 1e-9) {
        detail = "triangle inequality violated";
        return false;
      }
      ProjectiveMap g(random_invertible(3, rng));
      ConvexDomain gdom = dom.transformed(g);
      double dg = hilbert_distance(gdom, g.apply(x), g.apply(y));
      if (std::abs(dg - dxy) > 1e-9) {
        detail = "PGL invariance violated by " + std::to_string(dg - dxy);
        return false;
      }
    }
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  if (secs >= 5.0) {
    detail = "too slow: " + std::to_string(secs) + " s";
    return false;
  }
  return true;
}

bool criterion3(std::string& detail) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> dim_pick(2, 6);
  for (int t = 0; t < 1000; ++t) {
    int d = dim_pick(rng);
    int k = std::uniform_int_distribution<int>(1, d - 1)(rng);
    Vec x(d);
    for (int i = 0; i < d; ++i) x(i) = gauss(rng);
    Mat wb(k, d);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < d; ++j) wb(i, j) = gauss(rng);
    ProjPoint px(x);
    ProjSubspace w(wb);
    ProjSubspace v = nearest_containing_subspace(px, w);
    double dp = point_to_subspace_distance(px, w);
    double dh = grassmann_distance(v, w);
    if (std::abs(dh - dp) > 1e-9) {
      detail = "d_H mismatch " + std::to_string(dh - dp);
      return false;
    }
    if (point_to_subspace_distance(px, v) > 1e-7) {
      detail = "V does not contain x";
      return false;
    }
  }
  // sampled-Hausdorff oracle vs principal-angle distance on a subset
  for (int t = 0; t < 50; ++t) {
    int d = std::uniform_int_distribution<int>(2, 4)(rng);
    int k = std::uniform_int_distribution<int>(1, d - 1)(rng);
    auto random_sub = [&] {
      Mat b(k, d);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j) b(i, j) = gauss(rng);
      return ProjSubspace(b);
    };
    ProjSubspace a = random_sub(), b = random_sub();
    auto one_sided = [&](const ProjSubspace& from, const ProjSubspace& to) {
      double worst = 0.0;
      for (int s = 0; s < 4096; ++s) {
        Vec c(from.dim());
        for (int i = 0; i < from.dim(); ++i) c(i) = gauss(rng);
        if (c.norm() < 1e-9) continue;
        ProjPoint p(Vec(from.basis().transpose() * c));
        worst = std::max(worst, point_to_subspace_distance(p, to));
      }
      return worst;
    };
    double sampled = std::max(one_sided(a, b), one_sided(b, a));
    if (std::abs(sampled - grassmann_distance(a, b)) > 1e-3) {
      detail = "sampled Hausdorff off by " +
               std::to_string(sampled - grassmann_distance(a, b));
      return false;
    }
  }
  return true;
}

bool criterion4(std::string& detail) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss;
  std::vector<ConvexDomain> doms;
  doms.push_back(simplex(3));
  doms.push_back(square_domain());
  doms.push_back(klein_model(3));
  for (const ConvexDomain& dom : doms) {
    auto boundary = sample_boundary(dom, 64, 17);
    for (int t = 0; t < 1000; ++t) {
      ProjPoint x = random_interior(dom, rng);
      double d_bdry = boundary_distance(dom, x);
      const ProjPoint& b = boundary[t % boundary.size()];
      Covec f = supporting_functionals_at(dom, b).canonical;
      ProjSubspace w(null_space_rows(f));
      // every point of the supporting subspace is at least as far from
      // x as the boundary
      for (int s = 0; s < 4; ++s) {
        Vec c(w.dim());
        for (int i = 0; i < w.dim(); ++i) c(i) = gauss(rng);
        if (c.norm() < 1e-9) continue;
        ProjPoint y(Vec(w.basis().transpose() * c));
        if (angle_distance(x, y) < d_bdry - 1e-9) {
          detail = "supporting-subspace point below the boundary distance";
          return false;
        }
      }
    }
  }
  return true;
}

bool criterion5(std::string& detail) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> gauss;
  int built = 0;
  while (built < 50) {
    int d = std::uniform_int_distribution<int>(3, 5)(rng);
    int nv = d + std::uniform_int_distribution<int>(1, 4)(rng);
    Mat lifts(nv, d);
    for (int i = 0; i < nv; ++i) {
      for (int j = 0; j + 1 < d; ++j) lifts(i, j) = gauss(rng);
      lifts(i, d - 1) = 1.0;
    }
    ConvexDomain p = [&]() -> ConvexDomain {
      try {
        return ConvexDomain::polytope_from_vertices(lifts);
      } catch (const std::invalid_argument&) {
        return simplex(d);
      }
    }();
    ++built;
    ConvexDomain dd = dual_domain(dual_domain(p));
    const Mat& va = p.polytope().vertex_lifts;
    const Mat& vb = dd.polytope().vertex_lifts;
    if (va.rows() != vb.rows()) {
      detail = "vertex count changed under double duality";
      return false;
    }
    for (int i = 0; i < va.rows(); ++i) {
      // compare unit lifts directly: the angle metric cannot resolve
      // below ~1.5e-8
      double best = 1e300;
      for (int j = 0; j < vb.rows(); ++j)
        best = std::min(best, std::min((va.row(i) - vb.row(j)).norm(),
                                       (va.row(i) + vb.row(j)).norm()));
      if (best > 1e-8) {
        detail = "vertex match residual " + std::to_string(best);
        return false;
      }
    }
  }
  // projection/duality sampled report, strict and touching configurations
  {
    Mat a(2, 3), b(1, 3), v(3, 3);
    a << 1, 0, 0, 0, 1, 0;
    b << 0, 0, 1;
    v << 1, 0, 1, 2, 0, 1, 1.5, 1, 1;
    DirectSumSplit split{ProjSubspace(a), ProjSubspace(b)};
    DualityReport sharp = verify_projection_duality(
        ConvexDomain::polytope_from_vertices(v), split);
    DualityReport touching = verify_projection_duality(simplex(3), split);
    if (sharp.violations != 0 || touching.violations != 0) {
      detail = "duality report has violations";
      return false;
    }
    if (!sharp.equality_case || touching.equality_case) {
      detail = "equality-case classification wrong";
      return false;
    }
  }
  return true;
}

bool criterion6(std::string& detail) {
  ExampleInstance inst = make_example("simplex-z2");
  const MatrixGroup& group = *inst.group;
  std::vector<FaceDescriptor> faces = enumerate_faces(inst.domain);
  UniformExpansionReport rep = check_uniform_expansion_at_faces(
      group, inst.domain, faces, 2.0, 0.05, 4);
  if (!rep.all_pass) {
    detail = "uniform expansion with C=2, r=0.05 failed at a face";
    return false;
  }
  std::vector<ProjPoint> core =
      default_interior_points(inst.domain, 24, default_config().seed);
  OrbitCloud c6 = orbit(group, inst.domain, {inst.domain.center()}, 6);
  OrbitCloud c8 = orbit(group, inst.domain, {inst.domain.center()}, 8);
  double r6 = covering_radius(core, c6, inst.domain);
  double r8 = covering_radius(core, c8, inst.domain);
  if (std::abs(r6 - r8) > 0.05) {
    detail = "covering radius moved by " + std::to_string(r6 - r8);
    return false;
  }
  return true;
}

bool criterion7(std::string& detail) {
  ExampleInstance inst = make_example("simplex-z2");
  const MatrixGroup& group = *inst.group;
  auto powers_of = [&](const std::string& word, int count) {
    std::vector<std::string> words;
    std::string acc;
    for (int n = 1; n <= count; ++n) {
      if (!acc.empty()) acc += ' ';
      acc += word;
      words.push_back(acc);
    }
    return cartan_trace(words, group);
  };
  {  // g1^n = diag(e,1,1/e)^n, k = 1, eigenvalue slope log(e/1) = 1
    auto trace = powers_of("g1", 20);
    std::vector<double> gaps;
    for (const auto& cv : trace) gaps.push_back(cv.gap(1));
    if (std::abs(fitted_slope(gaps) - 1.0) > 1e-6) {
      detail = "g1 slope " + std::to_string(fitted_slope(gaps));
      return false;
    }
    // k = 1: mu_1 - mu_k vanishes identically
  }
  {  // (g1 g2)^n = diag(e,e,1/e^2)^n, k = 2, slope log(e/e^-2) = 3
    auto trace = powers_of("g1 g2", 20);
    std::vector<double> gaps;
    for (const auto& cv : trace) gaps.push_back(cv.gap(2));
    if (std::abs(fitted_slope(gaps) - 3.0) > 1e-6) {
      detail = "g1g2 slope " + std::to_string(fitted_slope(gaps));
      return false;
    }
    for (const auto& cv : trace)
      if (cv.mu(0) - cv.mu(1) > 1e-9) {
        detail = "mu1 - mu_k nonzero for the degenerate top block";
        return false;
      }
  }
  {  // triangle-group axis sequence vs the eigenvalue oracle
    MatrixGroup tri = triangle_group(2, 3, 7);
    ProjectiveMap h = tri.evaluate_word("a b c");
    Eigen::EigenSolver<Mat> eig(h.mat());
    double slope = std::log(eig.eigenvalues().cwiseAbs().maxCoeff() /
                            eig.eigenvalues().cwiseAbs().minCoeff());
    std::vector<std::string> words;
    std::string acc;
    for (int n = 1; n <= 30; ++n) {
      if (!acc.empty()) acc += ' ';
      acc += "a b c";
      words.push_back(acc);
    }
    auto trace = cartan_trace(words, tri);
    std::vector<double> tot;
    for (const auto& cv : trace) tot.push_back(cv.mu(0) - cv.mu(2));
    double measured = (tot[29] - tot[14]) / 15.0;
    if (std::abs(measured - slope) > 1e-4) {
      detail = "triangle axis slope " + std::to_string(measured) + " vs " +
               std::to_string(slope);
      return false;
    }
  }
  return true;
}

bool criterion8(std::string& detail) {
  struct Setup {
    std::string name;
    ConvexDomain dom;
    ProjPoint face_witness;
    ProjPoint x_plus;
  };
  std::vector<Setup> setups;
  setups.push_back({"square", square_domain(), ProjPoint(lift3(0, 1, 1)),
                    ProjPoint(lift3(1, -1, 1))});
  setups.push_back({"klein-ball", klein_model(3), ProjPoint(lift3(0, -1, 1)),
                    ProjPoint(lift3(0, 1, 1))});
  {
    Vec w(4), xp(4);
    w << 0, 1, 1, 1;
    xp << 1, 0, 0, 0;
    setups.push_back({"simplex", simplex(4), ProjPoint(w), ProjPoint(xp)});
  }
  // pull the target back along the line toward the face: a geometric
  // lambda schedule 2^1..2^8, capped so the fixed 0.02-ball stays inside
  // the expanding neighborhoods (which shrink as lambda grows)
  auto schedule_points = [](const ConvexDomain& dom, const ProjPoint& x_plus,
                            const ProjPoint& x_target) {
    ProjPoint xm = chord(dom, x_target, x_plus).backward;
    Mat a(dom.ambient(), 2);
    a.col(0) = x_plus.rep();
    a.col(1) = xm.rep();
    Vec ab = a.colPivHouseholderQr().solve(x_target.rep());
    std::vector<ProjPoint> out;
    for (int n = 1; n <= 8; ++n)
      out.emplace_back(Vec(std::ldexp(ab(0), -n) * x_plus.rep() +
                           ab(1) * xm.rep()));
    return out;
  };
  for (const Setup& s : setups) {
    FaceDescriptor f_minus = face_of(s.dom, s.face_witness);
    PseudoLoxSequence seq = make_general_pseudolox(
        s.dom, f_minus, s.x_plus,
        schedule_points(s.dom, s.x_plus, s.dom.center()), s.dom.center());
    double prev = 0.0;
    for (std::size_t n = 0; n < seq.maps.size(); ++n) {
      CartanVector cv = cartan_projection(seq.maps[n]);
      double ratio = std::exp(cv.gap(1));
      if (ratio <= prev) {
        detail = s.name + ": sv ratio not increasing at n=" +
                 std::to_string(n + 1);
        return false;
      }
      prev = ratio;
    }
    int n0 = -1;
    for (std::size_t n = 0; n < seq.maps.size(); ++n) {
      ExpansionSampleReport rep =
          is_expanding_on_ball(seq.maps[n], seq.v_minus, 0.02, 4.0);
      if (rep.pass) {
        if (n0 < 0) n0 = static_cast<int>(n) + 1;
      } else if (n0 >= 0) {
        detail = s.name + ": expansion lost after n0";
        return false;
      }
    }
    if (n0 < 0 || n0 > 10) {
      detail = s.name + ": n0 = " + std::to_string(n0);
      return false;
    }
  }
  return true;
}

bool criterion9(std::string& detail) {
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
  std::vector<ProjPoint> ks;
  for (const ProjPoint& b : sample_boundary(disk, 64, 7))
    if (point_to_subspace_distance(b, split.repelling) > 0.25) ks.push_back(b);
  // the repelling fixed point is the eigenvector of smallest modulus
  Eigen::EigenSolver<Mat> eig(h.mat());
  int imin = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(eig.eigenvalues()(i)) < std::abs(eig.eigenvalues()(imin)))
      imin = i;
  ProjPoint rep_fix(Vec(eig.eigenvectors().col(imin).real()));
  FaceDescriptor face = face_of(disk, rep_fix);
  NorthSouthReport rep = north_south_check(seq, disk, ks, face, 1e-5, 0.2);
  if (!rep.converged || rep.final_max_dist >= 1e-5) {
    detail = "not within 1e-5 by n=30: " + std::to_string(rep.final_max_dist);
    return false;
  }
  if (!rep.supports_ok) {
    detail = "E+/E- are not supporting subspaces";
    return false;
  }
  LimitSetSample lam = limit_set_sample(tri, disk, {disk.center()}, 10, 5e-2);
  double best_plus = 1e300, best_minus = 1e300;
  for (const auto& lp : lam.points) {
    best_plus = std::min(best_plus,
                         point_to_subspace_distance(lp.point, split.attracting));
    best_minus = std::min(best_minus,
                          point_to_subspace_distance(lp.point, split.repelling));
  }
  if (best_plus > 1e-2 || best_minus > 1e-2) {
    detail = "E+/E- miss the limit sample";
    return false;
  }
  return true;
}

bool criterion10(std::string& detail) {
  {
    ExampleInstance inst = make_example("simplex-z2");
    LimitSetSample lam = limit_set_sample(*inst.group, inst.domain,
                                          {inst.domain.center()}, 12, 1e-3);
    if (detect_segments(inst.domain, lam).size() != 3) {
      detail = "simplex-z2 segment count";
      return false;
    }
  }
  ConvexDomain disk = klein_model(3);
  {
    MatrixGroup tri = triangle_group(2, 3, 7);
    LimitSetSample lam =
        limit_set_sample(tri, disk, {disk.center()}, 10, 5e-2);
    if (!detect_segments(disk, lam).empty()) {
      detail = "triangle group has spurious segments";
      return false;
    }
  }
  MatrixGroup sch = schottky_group(4.0, 4.0, std::acos(-1.0) / 2);
  {
    LimitSetSample lam =
        limit_set_sample(sch, disk, {disk.center()}, 10, 1e-2);
    if (!detect_segments(disk, lam).empty()) {
      detail = "Schottky group has spurious segments";
      return false;
    }
  }
  // conjugate cyclic factors: <s> and <t> = r<s>r^-1 are disjoint;
  // duplicating a factor must produce the (0,1) overlap witness
  PeripheralFamily fam;
  fam.subgroups.emplace_back(
      std::vector<ProjectiveMap>{sch.generators()[0]}, disk);
  fam.subgroups.emplace_back(
      std::vector<ProjectiveMap>{sch.generators()[1]}, disk);
  for (const auto& sub : fam.subgroups)
    fam.limit_samples.push_back(
        limit_set_sample(sub, disk, {disk.center()}, 8, 1e-2));
  LimitSetSample lam = limit_set_sample(sch, disk, {disk.center()}, 6, 1e-2);
  PeripheralReport rep = peripheral_checks(disk, fam, lam);
  if (!rep.disjoint || rep.overlap_witness != std::pair<int, int>{-1, -1}) {
    detail = "conjugate factors misreported as overlapping";
    return false;
  }
  PeripheralFamily dup;
  dup.subgroups = {fam.subgroups[0], fam.subgroups[0]};
  dup.limit_samples = {fam.limit_samples[0], fam.limit_samples[0]};
  PeripheralReport rep2 = peripheral_checks(disk, dup, lam);
  if (rep2.disjoint || rep2.overlap_witness != std::pair<int, int>{0, 1}) {
    detail = "duplicated factor witness wrong";
    return false;
  }
  return true;
}

bool criterion11(std::string& detail) {
  Config cfg = default_config();
  cfg.boundary_samples = 256;
  std::mt19937_64 rng(15);
  std::normal_distribution<double> gauss;
  double env_inner_lo = 1e300, env_inner_hi = 0.0;
  double env_outer_lo = 1e300, env_outer_hi = 0.0;
  for (int c = 0; c < 100; ++c) {
    // pentagons only: bodies with a nontrivial rotational symmetry
    // (e.g. a hull collapsing to a triangle) have no canonical frame
    Mat lifts(5, 3);
    ConvexDomain dom = simplex(3);
    for (;;) {
      for (int i = 0; i < 5; ++i) {
        lifts(i, 0) = gauss(rng);
        lifts(i, 1) = gauss(rng);
        lifts(i, 2) = 1.0;
      }
      try {
        dom = ConvexDomain::polytope_from_vertices(lifts);
      } catch (const std::invalid_argument&) {
        continue;
      }
      if (dom.polytope().vertex_lifts.rows() == 5) break;
    }
    PointedDomain p(dom, dom.center());
    NormalizationResult ref = benzecri_normalize(p, cfg);
    env_inner_lo = std::min(env_inner_lo, ref.inner_radius);
    env_inner_hi = std::max(env_inner_hi, ref.inner_radius);
    env_outer_lo = std::min(env_outer_lo, ref.outer_radius);
    env_outer_hi = std::max(env_outer_hi, ref.outer_radius);
    for (int m = 0; m < 20; ++m) {
      ProjectiveMap g(random_invertible(3, rng));
      PointedDomain moved(dom.transformed(g), g.apply(p.base));
      NormalizationResult res = benzecri_normalize(moved, cfg);
      double dd = domain_distance(res.normalized.domain,
                                  ref.normalized.domain, cfg);
      if (dd > 1e-3) {
        detail = "equivariance residual " + std::to_string(dd) +
                 " at corpus " + std::to_string(c);
        return false;
      }
    }
  }
  // frozen first-run envelope of the normalized radii over the corpus
  const double kInnerLo = 0.70, kInnerHi = 0.91;
  const double kOuterLo = 1.15, kOuterHi = 1.43;
  if (env_inner_lo < kInnerLo || env_inner_hi > kInnerHi ||
      env_outer_lo < kOuterLo || env_outer_hi > kOuterHi) {
    std::ostringstream os;
    os << "radius envelope [" << env_inner_lo << ", " << env_inner_hi
       << "] x [" << env_outer_lo << ", " << env_outer_hi
       << "] left the frozen bounds";
    detail = os.str();
    return false;
  }
  return true;
}

#ifndef CVX_BIN
#define CVX_BIN "cvx"
#endif

bool criterion12(std::string& detail) {
  const std::string bin = CVX_BIN;
  const std::vector<std::pair<std::string, std::string>> pipelines = {
      {"example", "example simplex-z2"},
      {"limitset", "limitset --example simplex-z2 --len 12 --eps 1e-3"},
      {"expansion", "expansion-check --example simplex-z2 --face-list all "
                    "--C 2 --r 0.05 --max-len 6"},
      {"cartan", "cartan-trace --example simplex-z2 --word g1 --powers 20 "
                 "--k 1"},
      {"orbit", "orbit --example schottky --len 4"},
      {"core", "core --example simplex-z2 --len 10 --eps 1e-2"},
      {"pseudolox", "pseudolox --example klein3"},
      {"relhyp", "relhyp-check --example simplex-z2 --len 10 --eps 1e-2"},
      {"benzecri", "benzecri --example klein3"},
      {"render", "render --example triangle-2-3-7 --len 8 --eps 5e-2"},
  };
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  for (const auto& [name, args] : pipelines) {
    std::string out1 = "/tmp/cvx_acc_" + name + "_1";
    std::string out2 = "/tmp/cvx_acc_" + name + "_2";
    for (const std::string& out : {out1, out2}) {
      std::string cmd = bin + " " + args + " --out " + out + " 2>/dev/null";
      int rc = std::system(cmd.c_str());
      if (rc != 0) {
        detail = name + " exited with " + std::to_string(rc);
        return false;
      }
    }
    std::string b1 = slurp(out1), b2 = slurp(out2);
    std::remove(out1.c_str());
    std::remove(out2.c_str());
    if (b1.empty() || b1 != b2) {
      detail = name + " output differs between reruns";
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  auto start = std::chrono::steady_clock::now();
  run_criterion(1, "hilbert metric exactness", criterion1);
  run_criterion(2, "metric axioms and invariance", criterion2);
  run_criterion(3, "nearest containing subspace", criterion3);
  run_criterion(4, "supporting subspace boundary distance", criterion4);
  run_criterion(5, "polytope duality", criterion5);
  run_criterion(6, "uniform expansion and covering radius", criterion6);
  run_criterion(7, "cartan gap growth slopes", criterion7);
  run_criterion(8, "pseudo-loxodromic expansion", criterion8);
  run_criterion(9, "north-south dynamics", criterion9);
  run_criterion(10, "segments and peripheral structure", criterion10);
  run_criterion(11, "benzecri normalization regression", criterion11);
  run_criterion(12, "CLI determinism", criterion12);
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::cout << failures << " criterion(s) failed; total runtime "
            << static_cast<int>(secs) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
