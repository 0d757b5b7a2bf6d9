#include "cvxproj/domspace.hpp"

#include "cvxproj/chartgeom.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace cvx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec aligned_lift(const ConvexDomain& dom, const ProjPoint& p) {
  Vec v = p.rep();
  if (dom.chart().xi * v < 0) v = -v;
  return v;
}

// Closed-cone membership with explicit slack, on a unit representative.
bool inside_closure(const ConvexDomain& dom, const Vec& lift, double slack) {
  Vec v = lift / lift.norm();
  if (dom.is_polytope()) {
    if (dom.chart().xi * v < 0) v = -v;
    return (dom.polytope().facet_functionals * v).minCoeff() >= -slack;
  }
  return v.dot(dom.ellipsoid_rep().form * v) <= slack;
}

// Cone generators on the chart-positive side: polytope vertices, or a
// deterministic boundary sample for ellipsoids.
Mat cone_generators(const ConvexDomain& dom, int count, std::uint64_t seed) {
  if (dom.is_polytope()) return dom.polytope().vertex_lifts;
  auto bd = sample_boundary(dom, count, seed);
  Mat out(bd.size(), dom.ambient());
  for (size_t i = 0; i < bd.size(); ++i)
    out.row(i) = aligned_lift(dom, bd[i]).transpose();
  return out;
}

// Does the open domain meet P(span of basis_b)? Gordan's alternative on
// the restricted facet functionals; eigenvalue test for ellipsoids.
bool open_meets_subspace(const ConvexDomain& dom, const Mat& basis_b) {
  if (dom.is_ellipsoid()) {
    Mat m = basis_b * dom.ellipsoid_rep().form * basis_b.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    return es.eigenvalues().minCoeff() < -1e-10;
  }
  Mat g = dom.polytope().facet_functionals * basis_b.transpose();
  for (int i = 0; i < g.rows(); ++i) {
    if (g.row(i).norm() < 1e-11) return false;  // V_b inside a facet hyperplane
    g.row(i) /= g.row(i).norm();
  }
  return min_norm_in_hull(g).norm() > 1e-6;
}

// Does the closed cone meet the subspace outside the origin?
bool closure_meets_subspace(const ConvexDomain& dom, const Mat& basis_b) {
  int kb = static_cast<int>(basis_b.rows());
  if (dom.is_ellipsoid()) {
    Mat m = basis_b * dom.ellipsoid_rep().form * basis_b.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    return es.eigenvalues().minCoeff() <= 1e-10;
  }
  Mat g0 = dom.polytope().facet_functionals * basis_b.transpose();
  // Constraints vanishing identically on V_b impose nothing.
  std::vector<int> keep;
  for (int i = 0; i < g0.rows(); ++i)
    if (g0.row(i).norm() > 1e-11) keep.push_back(i);
  Mat g(keep.size(), kb);
  for (size_t i = 0; i < keep.size(); ++i)
    g.row(i) = g0.row(keep[i]) / g0.row(keep[i]).norm();
  int m = static_cast<int>(g.rows());
  if (m == 0) return true;  // V_b inside every active hyperplane
  if (null_space_rows(g).rows() > 0) return true;  // lineality

  auto nonneg = [&](const Vec& u) { return (g * u).minCoeff() >= -1e-9; };
  if (kb == 1) return nonneg(Vec::Ones(1)) || nonneg(-Vec::Ones(1));

  // Candidate extreme rays: null directions of (kb-1)-subsets.
  std::vector<int> comb(kb - 1);
  std::iota(comb.begin(), comb.end(), 0);
  auto advance = [&]() {
    int i = kb - 2;
    while (i >= 0 && comb[i] == m - (kb - 1) + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < kb - 1; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  if (m < kb - 1) return false;
  do {
    Mat sub(kb - 1, kb);
    for (int j = 0; j < kb - 1; ++j) sub.row(j) = g.row(comb[j]);
    Mat nb = null_space_rows(sub, 1e-9);
    if (nb.rows() != 1) continue;
    Vec u = nb.row(0).transpose();
    if (nonneg(u) || nonneg(-u)) return true;
  } while (advance());
  return false;
}

// Symmetric-positive-definite inverse square root.
Mat inv_sqrt_spd(const Mat& s, const char* what) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s + s.transpose()));
  if (es.eigenvalues().minCoeff() <= 1e-14)
    throw std::runtime_error(std::string(what) +
                             ": degenerate second-moment matrix");
  return es.eigenvectors() *
         es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

std::vector<Vec> chart_vertex_points(const ConvexDomain& dom) {
  const Mat& vl = dom.polytope().vertex_lifts;
  std::vector<Vec> pts;
  pts.reserve(vl.rows());
  for (int i = 0; i < vl.rows(); ++i)
    pts.push_back(dom.chart().to_chart(Vec(vl.row(i).transpose())));
  return pts;
}

}  // namespace

bool subspace_meets_domain(const ConvexDomain& dom, const ProjSubspace& v) {
  return open_meets_subspace(dom, v.basis());
}

bool subspace_meets_closure(const ConvexDomain& dom, const ProjSubspace& v) {
  return closure_meets_subspace(dom, v.basis());
}

DirectSumSplit::DirectSumSplit(ProjSubspace a, ProjSubspace b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.ambient() != b_.ambient() ||
      a_.dim() + b_.dim() != a_.ambient())
    throw std::invalid_argument(
        "DirectSumSplit: factor dimensions must sum to the ambient dimension");
  int d = a_.ambient(), ka = a_.dim(), kb = b_.dim();
  Mat s(d, d);
  s.leftCols(ka) = a_.basis().transpose();
  s.rightCols(kb) = b_.basis().transpose();
  Eigen::JacobiSVD<Mat> svd(s);
  if (svd.singularValues().minCoeff() <= 1e-8)
    throw std::invalid_argument("DirectSumSplit: factors are not transverse");
  Mat sinv = s.inverse();
  coords_a_ = sinv.topRows(ka);
  coords_b_ = sinv.bottomRows(kb);
}

double domain_distance(const ConvexDomain& d1, const ConvexDomain& d2,
                       const Config& cfg) {
  if (d1.ambient() != d2.ambient())
    throw std::invalid_argument("domain_distance: dimension mismatch");
  auto bd1 = sample_boundary(d1, cfg.boundary_samples, cfg.seed);
  auto bd2 = sample_boundary(d2, cfg.boundary_samples, cfg.seed + 1);
  Mat reps1(bd1.size(), d1.ambient()), reps2(bd2.size(), d2.ambient());
  for (size_t i = 0; i < bd1.size(); ++i) reps1.row(i) = bd1[i].rep().transpose();
  for (size_t i = 0; i < bd2.size(); ++i) reps2.row(i) = bd2[i].rep().transpose();

  auto one_sided = [&](const std::vector<ProjPoint>& bd,
                       const ConvexDomain& other, const Mat& reps) {
    double worst = 0.0;
    for (const auto& p : bd) {
      if (inside_closure(other, p.rep(), default_config().boundary_tol))
        continue;
      double best = kInf;
      try {
        ProjPoint q = chord(other, other.center(), p, cfg).forward;
        best = angle_distance(p, q);
      } catch (const std::exception&) {
        // fall back to the sampled minimum below
      }
      double c = (reps * p.rep()).cwiseAbs().maxCoeff();
      best = std::min(best, std::acos(std::clamp(c, -1.0, 1.0)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(bd1, d2, reps2), one_sided(bd2, d1, reps1));
}

ConvexDomain slice(const ConvexDomain& dom, const ProjSubspace& va) {
  if (va.ambient() != dom.ambient())
    throw std::invalid_argument("slice: dimension mismatch");
  if (va.dim() < 2)
    throw std::invalid_argument("slice: V_a must have projective dimension >= 1");
  const Mat& ba = va.basis();
  if (dom.is_ellipsoid()) {
    Mat ja = ba * dom.ellipsoid_rep().form * ba.transpose();
    try {
      return ConvexDomain::ellipsoid(ja);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("slice: P(V_a) misses the domain");
    }
  }
  Mat g0 = dom.polytope().facet_functionals * ba.transpose();
  // Facets containing V_a restrict to the zero functional; drop them so
  // that slices inside a boundary face (closure intersections with
  // nonempty relative interior) are still representable.
  std::vector<int> keep;
  for (int i = 0; i < g0.rows(); ++i)
    if (g0.row(i).norm() > 1e-11) keep.push_back(i);
  if (static_cast<int>(keep.size()) < va.dim())
    throw std::invalid_argument("slice: P(V_a) misses the domain");
  Mat g(keep.size(), va.dim());
  for (size_t i = 0; i < keep.size(); ++i)
    g.row(i) = g0.row(keep[i]) / g0.row(keep[i]).norm();
  if (min_norm_in_hull(g).norm() < 1e-6)
    throw std::invalid_argument("slice: P(V_a) misses the domain");
  try {
    return ConvexDomain::polytope_from_facets(g);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("slice: intersection with P(V_a) is degenerate");
  }
}

ProjectResult project(const ConvexDomain& dom, const DirectSumSplit& split) {
  if (split.a().ambient() != dom.ambient())
    throw std::invalid_argument("project: dimension mismatch");
  if (open_meets_subspace(dom, split.b().basis()))
    throw std::invalid_argument("project: domain meets P(V_b)");
  ProjectResult res;
  res.closure_warning = closure_meets_subspace(dom, split.b().basis());
  res.approximate = dom.is_ellipsoid();
  Config cfg = default_config();
  Mat gen = cone_generators(dom, cfg.boundary_samples, cfg.seed);
  Mat img0 = gen * split.coords_a().transpose();
  // Cone generators lying in V_b project to zero; drop them (they only
  // occur when the closure meets P(V_b), which is already flagged).
  std::vector<int> keep;
  for (int i = 0; i < img0.rows(); ++i)
    if (img0.row(i).norm() > 1e-9 * gen.row(i).norm()) keep.push_back(i);
  Mat img(keep.size(), img0.cols());
  for (size_t i = 0; i < keep.size(); ++i) img.row(i) = img0.row(keep[i]);
  try {
    res.image = ConvexDomain::polytope_from_vertices(img);
    res.properly_convex = true;
  } catch (const std::invalid_argument&) {
    res.properly_convex = false;
  }
  return res;
}

DualityReport verify_projection_duality(const ConvexDomain& cone,
                                        const DirectSumSplit& split,
                                        const Config& cfg) {
  DualityReport rep;
  rep.equality_case = !closure_meets_subspace(cone, split.b().basis());
  Mat gen = cone_generators(cone, cfg.boundary_samples, cfg.seed);
  for (int i = 0; i < gen.rows(); ++i) gen.row(i) /= gen.row(i).norm();

  // Generators of the projected cone, independently canonicalized when
  // the projection succeeds.
  Mat img;
  try {
    ProjectResult pr = project(cone, split);
    if (pr.image && pr.image->is_polytope())
      img = pr.image->polytope().vertex_lifts;
  } catch (const std::invalid_argument&) {
  }
  if (img.rows() == 0) img = gen * split.coords_a().transpose();
  for (int i = 0; i < img.rows(); ++i) img.row(i) /= img.row(i).norm();

  int ka = split.a().dim();
  std::mt19937_64 rng(cfg.seed + 7);
  std::normal_distribution<double> gauss;
  const int n_samples = 1000;
  const double tol = 1e-9;
  for (int n = 0; n < n_samples; ++n) {
    Covec phi(ka);
    for (int j = 0; j < ka; ++j) phi(j) = gauss(rng);
    if (phi.norm() < 1e-12) continue;
    phi /= phi.norm();
    bool in_proj_dual = (img * phi.transpose()).minCoeff() >= -tol;
    Covec psi = phi * split.coords_a();
    bool in_cone_dual =
        (gen * psi.transpose()).minCoeff() >= -tol * psi.norm();
    ++rep.samples;
    if (rep.equality_case) {
      if (in_proj_dual != in_cone_dual) ++rep.violations;
    } else {
      // only the inclusion pi(C)* subset C* is demanded
      if (in_proj_dual && !in_cone_dual) ++rep.violations;
    }
  }
  return rep;
}

ConvexDomain hull_pair(const ConvexDomain& d1, const ConvexDomain& d2,
                       std::optional<Covec> w, const Config& cfg) {
  if (d1.ambient() != d2.ambient())
    throw std::invalid_argument("hull_pair: dimension mismatch");
  Mat g1 = cone_generators(d1, cfg.boundary_samples, cfg.seed);
  Mat g2 = cone_generators(d2, cfg.boundary_samples, cfg.seed + 1);

  // Orient a generator block consistently against a covector; empty on
  // failure (covector not strictly one-sided on the block).
  auto orient = [](const Mat& g, const Covec& xi) -> Mat {
    Vec vals = g * xi.transpose();
    double s = vals(0) > 0 ? 1.0 : -1.0;
    for (int i = 0; i < vals.size(); ++i)
      if (s * vals(i) < 1e-10 * g.row(i).norm()) return Mat();
    return s * g;
  };

  Covec xi;
  if (w) {
    xi = *w / w->norm();
  } else {
    // Spec'd auto mode: the domains must overlap.
    bool overlap = inside_closure(d1, d2.center().rep(), 1e-9) ||
                   inside_closure(d2, d1.center().rep(), 1e-9);
    if (!overlap) {
      for (int i = 0; i < g2.rows() && !overlap; ++i)
        overlap = inside_closure(d1, Vec(g2.row(i).transpose()), -1e-9);
      for (int i = 0; i < g1.rows() && !overlap; ++i)
        overlap = inside_closure(d2, Vec(g1.row(i).transpose()), -1e-9);
    }
    if (!overlap)
      throw std::invalid_argument("hull_pair: domains are disjoint (auto mode)");
    bool found = false;
    for (double s : {1.0, -1.0}) {
      Mat all(g1.rows() + g2.rows(), d1.ambient());
      all.topRows(g1.rows()) = g1;
      all.bottomRows(g2.rows()) = s * g2;
      for (int i = 0; i < all.rows(); ++i) all.row(i) /= all.row(i).norm();
      Vec cand = min_norm_in_hull(all);
      if (cand.norm() > 1e-6) {
        xi = cand.transpose() / cand.norm();
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("hull_pair: no common dual hyperplane found");
  }

  Mat o1 = orient(g1, xi), o2 = orient(g2, xi);
  if (o1.rows() == 0 || o2.rows() == 0)
    throw std::invalid_argument(
        "hull_pair: hyperplane is not disjoint from both closures");
  Mat all(o1.rows() + o2.rows(), d1.ambient());
  all.topRows(o1.rows()) = o1;
  all.bottomRows(o2.rows()) = o2;
  return ConvexDomain::polytope_from_vertices(all);
}

Mat chart_inertia(const ConvexDomain& dom, const Chart& chart,
                  const ProjPoint& base) {
  int m = dom.ambient() - 1;
  Vec cb = chart.to_chart(base);
  if (dom.is_polytope()) {
    const Mat& vl = dom.polytope().vertex_lifts;
    std::vector<Vec> pts;
    pts.reserve(vl.rows());
    for (int i = 0; i < vl.rows(); ++i)
      pts.push_back(chart.to_chart(Vec(vl.row(i).transpose())));
    auto simplices = triangulate_hull(pts);
    ChartMoments mom = chart_moments(pts, simplices);
    if (mom.volume <= 0)
      throw std::runtime_error("chart_inertia: empty chart domain");
    Vec c = mom.first / mom.volume;
    return mom.second / mom.volume - c * cb.transpose() - cb * c.transpose() +
           cb * cb.transpose();
  }
  const Mat& j = dom.ellipsoid_rep().form;
  Mat mm = chart.basis * j * chart.basis.transpose();
  Vec bj = chart.basis * j * chart.origin;
  Eigen::LDLT<Mat> ldlt(mm);
  Vec y0 = -ldlt.solve(bj);
  double r2 = bj.dot(ldlt.solve(bj)) - chart.origin.dot(j * chart.origin);
  if (r2 <= 0)
    throw std::runtime_error("chart_inertia: chart does not contain the domain");
  Mat sigma_c = r2 * mm.inverse() / (m + 2);
  Vec off = y0 - cb;
  return sigma_c + off * off.transpose();
}

namespace {

NormalizationResult benzecri_normalize_impl(const PointedDomain& p,
                                            const Config& cfg, int depth);

// Affine preconditioner for ill-conditioned inputs: whiten the chart
// inertia about the base in the canonical chart, then retry the
// centroid iteration on the rounder domain. The final representative is
// the fixed point of the iteration and does not depend on this step.
NormalizationResult benzecri_preconditioned_retry(const PointedDomain& p,
                                                  const Config& cfg,
                                                  int depth) {
  const ConvexDomain& dom = p.domain;
  int d = dom.ambient(), m = d - 1;
  Vec xb = aligned_lift(dom, p.base);
  Covec xi = dom.chart().xi / (dom.chart().xi * xb);
  Mat b = dom.chart().basis;
  Chart pre_chart{xi, xb, b};
  Mat sigma = chart_inertia(dom, pre_chart, p.base);
  Mat wmat = inv_sqrt_spd((m + 2) * sigma, "benzecri_normalize");
  Mat amat = b.transpose() * wmat * b * (Mat::Identity(d, d) - xb * xi) +
             xb * xi;
  ProjectiveMap pre(amat);
  PointedDomain moved(dom.transformed(pre), pre.apply(p.base));
  NormalizationResult rec = benzecri_normalize_impl(moved, cfg, depth + 1);
  ProjectiveMap total = rec.map * pre;
  PointedDomain normalized(dom.transformed(total), total.apply(p.base));
  return NormalizationResult{std::move(total), std::move(normalized),
                             rec.inner_radius, rec.outer_radius};
}

NormalizationResult benzecri_normalize_impl(const PointedDomain& p,
                                            const Config& cfg, int depth) {
  const ConvexDomain& dom = p.domain;
  int d = dom.ambient(), m = d - 1;
  Vec xb = aligned_lift(dom, p.base);

  Covec xi;
  std::vector<std::vector<int>> simplices;
  Mat verts;  // chart-positive vertex lifts (polytope only)
  if (dom.is_ellipsoid()) {
    // The chart centroid of an ellipsoid is its affine center; the base
    // is the center exactly when the polar hyperplane of the base is
    // the hyperplane at infinity.
    xi = (-(dom.ellipsoid_rep().form * xb)).transpose();
  } else {
    verts = dom.polytope().vertex_lifts;
    auto pts0 = chart_vertex_points(dom);
    simplices = triangulate_hull(pts0);

    Mat bbase = null_space_rows(Mat(xb.transpose()));
    Covec xi0 = dom.chart().xi / (dom.chart().xi * xb);

    // Residual: chart centroid of the domain in the chart of xi(t),
    // measured against the base point in a fixed frame.
    auto eval = [&](const Vec& t, Vec* err) -> bool {
      Covec x = xi0 + t.transpose() * bbase;
      Vec vals = verts * x.transpose();
      if (vals.minCoeff() < 1e-10) return false;  // chart swallows a vertex
      Mat b = null_space_rows(Mat(x));
      std::vector<Vec> ys;
      ys.reserve(verts.rows());
      for (int i = 0; i < verts.rows(); ++i)
        ys.push_back(b * (verts.row(i).transpose() / vals(i) - xb));
      ChartMoments mom = chart_moments(ys, simplices);
      if (mom.volume <= 0) return false;
      Vec chat = xb + b.transpose() * (mom.first / mom.volume);
      *err = bbase * (chat / xb.dot(chat));
      return true;
    };

    Vec t = Vec::Zero(m), e(m);
    if (!eval(t, &e))
      throw std::runtime_error("benzecri_normalize: invalid initial chart");
    int it = 0;
    for (; it < cfg.centroid_max_iters && e.norm() > 1e-12; ++it) {
      Mat jac(m, m);
      const double h = 1e-7;
      for (int j = 0; j < m; ++j) {
        Vec tj = t, ej(m);
        tj(j) += h;
        if (!eval(tj, &ej)) {
          tj(j) -= 2 * h;
          if (!eval(tj, &ej))
            throw std::runtime_error(
                "benzecri_normalize: centroid iteration left the chart cone");
          jac.col(j) = (e - ej) / h;
        } else {
          jac.col(j) = (ej - e) / h;
        }
      }
      Vec step = jac.colPivHouseholderQr().solve(-e);
      bool ok = false;
      double alpha = 1.0;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        Vec tn = t + alpha * step, etry(m);
        if (eval(tn, &etry) && etry.norm() < e.norm()) {
          t = tn;
          e = etry;
          ok = true;
          break;
        }
      }
      if (!ok) {
        if (depth < 3) return benzecri_preconditioned_retry(p, cfg, depth);
        throw std::runtime_error("benzecri_normalize: centroid iteration stalled");
      }
    }
    if (e.norm() > 1e-9) {
      if (depth < 3) return benzecri_preconditioned_retry(p, cfg, depth);
      throw std::runtime_error(
          "benzecri_normalize: centroid iteration did not converge");
    }
    xi = xi0 + t.transpose() * bbase;
  }

  xi /= xi * xb;
  Mat b = null_space_rows(Mat(xi));
  Chart inertia_chart{xi, xb, b};  // xi * xb = 1, so the base is the origin

  Mat sigma = chart_inertia(dom, inertia_chart, p.base);
  Mat wmat = inv_sqrt_spd((m + 2) * sigma, "benzecri_normalize");

  double inner = 1.0, outer = 1.0;
  Mat rot = Mat::Identity(m, m);
  if (dom.is_polytope()) {
    // Rotation canonicalization from higher chart moments, so that the
    // normalized representative does not depend on the ambient frame.
    std::vector<Vec> wpts;
    wpts.reserve(verts.rows());
    for (int i = 0; i < verts.rows(); ++i) {
      Vec lift = verts.row(i).transpose();
      wpts.push_back(wmat * (b * (lift / (xi * lift) - xb)));
    }
    Vec zero = Vec::Zero(m);
    Mat t4 = contracted_fourth_moment(wpts, simplices, zero);
    Eigen::SelfAdjointEigenSolver<Mat> es(t4);
    double scale = t4.norm() + 1e-30;
    for (int k = 0; k < m; ++k) {
      Vec v = es.eigenvectors().col(k);
      double m3 = third_moment_along(wpts, simplices, zero, v);
      if (std::abs(m3) > 1e-9 * scale) {
        if (m3 < 0) v = -v;
      } else {
        for (int i = 0; i < m; ++i) {
          if (std::abs(v(i)) > 1e-9) {
            if (v(i) < 0) v = -v;
            break;
          }
        }
      }
      rot.row(k) = v.transpose();
    }
    std::vector<Vec> zpts;
    zpts.reserve(wpts.size());
    for (const auto& y : wpts) zpts.push_back(rot * y);
    auto facets = hull_facets(zpts);
    inner = kInf;
    for (const auto& f : facets) inner = std::min(inner, f.offset);
    outer = 0.0;
    for (const auto& z : zpts) outer = std::max(outer, z.norm());
  }

  // Homogeneous assembly: chart coordinates about the base, whitened and
  // rotated, land in the standard chart {v_d = 1} with the base at e_d.
  Mat gmat(d, d);
  gmat.topRows(m) = rot * wmat * (b - (b * xb) * xi);
  gmat.row(m) = xi;
  ProjectiveMap map(gmat);
  PointedDomain normalized(dom.transformed(map), map.apply(p.base));
  return NormalizationResult{std::move(map), std::move(normalized), inner,
                             outer};
}

}  // namespace

NormalizationResult benzecri_normalize(const PointedDomain& p,
                                       const Config& cfg) {
  return benzecri_normalize_impl(p, cfg, 0);
}

ProjectiveMap relative_benzecri_normalize(const PointedDomain& p,
                                          const DirectSumSplit& split,
                                          const ConvexDomain* slice_reference,
                                          double family_radius,
                                          const Config& cfg) {
  const ConvexDomain& dom = p.domain;
  int d = dom.ambient(), ka = split.a().dim(), kb = split.b().dim();
  const Mat& bb = split.b().basis();
  if (open_meets_subspace(dom, bb))
    throw std::invalid_argument(
        "relative_benzecri_normalize: domain meets P(V_b)");
  if (slice_reference) {
    ConvexDomain sa = slice(dom, split.a());
    if (domain_distance(sa, *slice_reference, cfg) > family_radius)
      throw std::invalid_argument(
          "relative_benzecri_normalize: V_a slice leaves the declared family");
  }

  Vec xb = aligned_lift(dom, p.base);
  // Coordinates on V_b + x: first coordinate along the base lift, the
  // rest along the V_b basis. The slice chart is {first coord = 1}.
  Mat emb(d, kb + 1);
  emb.col(0) = xb;
  emb.rightCols(kb) = bb.transpose();

  Mat sigma0(kb, kb);
  if (dom.is_polytope()) {
    Mat gs = dom.polytope().facet_functionals * emb;
    ConvexDomain sdom = [&] {
      try {
        return ConvexDomain::polytope_from_facets(gs);
      } catch (const std::invalid_argument&) {
        throw std::runtime_error(
            "relative_benzecri_normalize: degenerate slice through the base");
      }
    }();
    const Mat& sv = sdom.polytope().vertex_lifts;
    std::vector<Vec> pts;
    pts.reserve(sv.rows());
    for (int i = 0; i < sv.rows(); ++i) {
      Vec u = sv.row(i).transpose();
      if (u(0) < 0) u = -u;
      if (u(0) < 1e-9)
        throw std::invalid_argument(
            "relative_benzecri_normalize: slice closure meets P(V_b)");
      pts.push_back(u.tail(kb) / u(0));
    }
    auto simplices = triangulate_hull(pts);
    ChartMoments mom = chart_moments(pts, simplices);
    if (mom.volume <= 0)
      throw std::runtime_error("relative_benzecri_normalize: empty slice");
    sigma0 = mom.second / mom.volume;  // second moment about the base
  } else {
    Mat js = emb.transpose() * dom.ellipsoid_rep().form * emb;
    Mat mm = js.block(1, 1, kb, kb);
    Eigen::SelfAdjointEigenSolver<Mat> es(mm);
    if (es.eigenvalues().minCoeff() <= 1e-10)
      throw std::invalid_argument(
          "relative_benzecri_normalize: slice closure meets P(V_b)");
    Vec bvec = js.col(0).tail(kb);
    Eigen::LDLT<Mat> ldlt(mm);
    Vec y0 = -ldlt.solve(bvec);
    double r2 = bvec.dot(ldlt.solve(bvec)) - js(0, 0);
    sigma0 = r2 * mm.inverse() / (kb + 2) + y0 * y0.transpose();
  }

  Mat hb = inv_sqrt_spd((kb + 2) * sigma0, "relative_benzecri_normalize");
  Mat sm(d, d);
  sm.leftCols(ka) = split.a().basis().transpose();
  sm.rightCols(kb) = bb.transpose();
  Mat blk = Mat::Identity(d, d);
  blk.bottomRightCorner(kb, kb) = hb;
  return ProjectiveMap(sm * blk * sm.inverse());
}

EuclideanSandwich euclidean_projection_bound(const ConvexDomain& dom,
                                             const ProjPoint& origin,
                                             const ProjSubspace& w_chart_dirs,
                                             double r1, double r2,
                                             const Config& cfg) {
  if (contains(dom, origin, cfg) != Location::Interior)
    throw std::invalid_argument(
        "euclidean_projection_bound: origin must be interior");
  int m = dom.ambient() - 1;
  if (w_chart_dirs.ambient() != m)
    throw std::invalid_argument(
        "euclidean_projection_bound: W must live in chart coordinates");
  const Chart& ch = dom.chart();
  Vec c0 = ch.to_chart(origin);
  const Mat& wd = w_chart_dirs.basis();
  Mat pw = wd.transpose() * wd;
  Mat nperp = null_space_rows(wd);
  Mat pperp = nperp.transpose() * nperp;

  EuclideanSandwich out;
  out.r3 = (r1 + r2) / r1;

  // Hypothesis 1: the W-perp chart ball of radius r1 sits inside.
  std::mt19937_64 rng(cfg.seed + 13);
  std::normal_distribution<double> gauss;
  out.ball_hypothesis = true;
  int kp = static_cast<int>(nperp.rows());
  int ndir = std::max(64, cfg.expansion_samples);
  for (int i = 0; i < ndir && out.ball_hypothesis; ++i) {
    Vec u(kp);
    for (int j = 0; j < kp; ++j) u(j) = gauss(rng);
    if (u.norm() < 1e-12) continue;
    Vec dir = nperp.transpose() * (u / u.norm());
    Vec y = c0 + r1 * (1.0 - 1e-7) * dir;
    if (!inside_closure(dom, ch.lift(y), 1e-7)) out.ball_hypothesis = false;
  }

  auto bd = sample_boundary(dom, std::min(cfg.boundary_samples, 1024),
                            cfg.seed + 17);
  out.proj_hypothesis = true;
  out.conclusion = true;
  for (const auto& pnt : bd) {
    Vec z = ch.to_chart(pnt) - c0;
    if ((pperp * z).norm() > r2 * (1.0 + 1e-7)) out.proj_hypothesis = false;
    Vec q = (pw * z) / out.r3;
    if (!inside_closure(dom, ch.lift(c0 + q * (1.0 - 1e-9)), 1e-7))
      out.conclusion = false;
  }
  return out;
}

SandwichReport verify_sandwich(const ConvexDomain& omega, const ProjPoint& x,
                               const ProjSubspace& wa, const ProjSubspace& vb,
                               const ConvexDomain& omega_a,
                               const ConvexDomain& omega_a_prime,
                               const ConvexDomain& omega_b,
                               const ConvexDomain& omega_b_prime,
                               const Config& cfg) {
  int d = omega.ambient();
  int ka = wa.dim(), kb = vb.dim();
  if (ka + kb + 1 != d)
    throw std::invalid_argument("verify_sandwich: W_a + V_b + x must span");
  if (omega_a.ambient() != ka + 1 || omega_a_prime.ambient() != ka + 1 ||
      omega_b.ambient() != kb + 1 || omega_b_prime.ambient() != kb + 1)
    throw std::invalid_argument("verify_sandwich: bound dimensions mismatch");

  SandwichReport rep;
  Vec xb = aligned_lift(omega, x);
  Mat ea(d, ka + 1), eb(d, kb + 1);
  ea.leftCols(ka) = wa.basis().transpose();
  ea.col(ka) = xb;
  eb.leftCols(kb) = vb.basis().transpose();
  eb.col(kb) = xb;

  Mat sm(d, d);
  sm.leftCols(ka) = wa.basis().transpose();
  sm.middleCols(ka, kb) = vb.basis().transpose();
  sm.col(d - 1) = xb;
  Mat sinv = sm.inverse();
  Mat pa(ka + 1, d), pb(kb + 1, d);
  pa.topRows(ka) = sinv.topRows(ka);
  pa.row(ka) = sinv.row(d - 1);
  pb.topRows(kb) = sinv.middleRows(ka, kb);
  pb.row(kb) = sinv.row(d - 1);

  const int nb = 1000;
  const double slack = 1e-7;
  auto check = [&](bool ok, const char* what) {
    if (!ok && rep.failed_hypothesis.empty()) rep.failed_hypothesis = what;
    return ok;
  };

  bool hyp = true;
  hyp &= check(!open_meets_subspace(omega, wa.basis()),
               "domain meets P(W_a)");
  hyp &= check(!open_meets_subspace(omega, vb.basis()),
               "domain meets P(V_b)");
  Vec ex_a = Vec::Unit(ka + 1, ka), ex_b = Vec::Unit(kb + 1, kb);
  hyp &= check(contains(omega_a, ProjPoint(ex_a), cfg) == Location::Interior,
               "x not interior to Omega_a");
  hyp &= check(contains(omega_b, ProjPoint(ex_b), cfg) == Location::Interior,
               "x not interior to Omega_b");

  auto subset_samples = [&](const ConvexDomain& inner, const Mat& map,
                            const ConvexDomain& outer, std::uint64_t seed) {
    auto bd = sample_boundary(inner, nb, seed);
    for (const auto& pnt : bd) {
      Vec img = map * pnt.rep();
      if (!inside_closure(outer, img, slack)) return false;
    }
    return true;
  };
  hyp &= check(subset_samples(omega_a, Mat::Identity(ka + 1, ka + 1),
                              omega_a_prime, cfg.seed + 21),
               "Omega_a not inside Omega_a'");
  hyp &= check(subset_samples(omega_b, Mat::Identity(kb + 1, kb + 1),
                              omega_b_prime, cfg.seed + 22),
               "Omega_b not inside Omega_b'");
  // (2), (4): intersections contain the declared lower bounds.
  hyp &= check(subset_samples(omega_a, ea, omega, cfg.seed + 23),
               "hypothesis 2: Omega_a not inside Omega");
  hyp &= check(subset_samples(omega_b, eb, omega, cfg.seed + 24),
               "hypothesis 4: Omega_b not inside Omega");
  // (1), (3): projections stay inside the declared upper bounds.
  hyp &= check(subset_samples(omega, pa, omega_a_prime, cfg.seed + 25),
               "hypothesis 1: projection leaves Omega_a'");
  hyp &= check(subset_samples(omega, pb, omega_b_prime, cfg.seed + 26),
               "hypothesis 3: projection leaves Omega_b'");
  rep.hypotheses_ok = hyp;

  try {
    // Lower bound: hull of the embedded bounds.
    Mat ga = cone_generators(omega_a, 256, cfg.seed + 31) * ea.transpose();
    Mat gb = cone_generators(omega_b, 256, cfg.seed + 32) * eb.transpose();
    Mat gens(ga.rows() + gb.rows(), d);
    gens.topRows(ga.rows()) = ga;
    gens.bottomRows(gb.rows()) = gb;
    for (int i = 0; i < gens.rows(); ++i) {
      if (omega.chart().xi * gens.row(i).transpose() < 0)
        gens.row(i) = -gens.row(i);
    }
    ConvexDomain omega1 = ConvexDomain::polytope_from_vertices(gens);

    // Upper bound: dual of the hull of the extended relative duals.
    ConvexDomain da = dual_domain(omega_a_prime);
    ConvexDomain db = dual_domain(omega_b_prime);
    Mat fa = cone_generators(da, 256, cfg.seed + 33) * pa;
    Mat fb = cone_generators(db, 256, cfg.seed + 34) * pb;
    Mat duals(fa.rows() + fb.rows(), d);
    duals.topRows(fa.rows()) = fa;
    duals.bottomRows(fb.rows()) = fb;
    for (int i = 0; i < duals.rows(); ++i) {
      if (duals.row(i) * xb < 0) duals.row(i) = -duals.row(i);
    }
    ConvexDomain omega2 =
        dual_domain(ConvexDomain::polytope_from_vertices(duals));

    bool ok = contains(omega1, x, cfg) == Location::Interior;
    auto bd1 = sample_boundary(omega1, nb, cfg.seed + 35);
    for (const auto& pnt : bd1)
      if (!inside_closure(omega, pnt.rep(), slack)) ok = false;
    auto bdo = sample_boundary(omega, nb, cfg.seed + 36);
    for (const auto& pnt : bdo)
      if (!inside_closure(omega2, pnt.rep(), slack)) ok = false;
    rep.containment_ok = ok;
  } catch (const std::exception&) {
    rep.containment_ok = false;
  }

  // Independent Euclidean scaling bound in the chart of Omega about x,
  // with internally measured radii.
  try {
    const Chart& ch = omega.chart();
    Vec c0 = ch.to_chart(x);
    // chart directions of W_a + x through x
    Mat wdir(ka, d - 1);
    const double h = 1e-6;
    for (int i = 0; i < ka; ++i) {
      Vec v = xb + h * wa.basis().row(i).transpose();
      wdir.row(i) = ((ch.to_chart(v) - c0) / h).transpose();
    }
    ProjSubspace wsub{wdir};
    Mat nperp = null_space_rows(wsub.basis());
    // inner radius of the W-perp slice, outer radius of the projection
    std::mt19937_64 rng(cfg.seed + 41);
    std::normal_distribution<double> gauss;
    double r1 = kInf;
    int kp = static_cast<int>(nperp.rows());
    for (int i = 0; i < std::max(64, cfg.expansion_samples); ++i) {
      Vec u(kp);
      for (int j = 0; j < kp; ++j) u(j) = gauss(rng);
      if (u.norm() < 1e-12) continue;
      Vec dir = nperp.transpose() * (u / u.norm());
      ChordResult cr = chord(omega, x, ch.from_chart(c0 + dir), cfg);
      r1 = std::min(r1, (ch.to_chart(cr.backward) - c0).norm());
      r1 = std::min(r1, (ch.to_chart(cr.forward) - c0).norm());
    }
    Mat pperp = nperp.transpose() * nperp;
    double r2 = 0.0;
    auto bdo = sample_boundary(omega, std::min(cfg.boundary_samples, 1024),
                               cfg.seed + 17);
    for (const auto& pnt : bdo)
      r2 = std::max(r2, (pperp * (ch.to_chart(pnt) - c0)).norm());
    EuclideanSandwich eu =
        euclidean_projection_bound(omega, x, wsub, r1, r2, cfg);
    rep.r3 = eu.r3;
    rep.r3_ok = eu.ball_hypothesis && eu.proj_hypothesis && eu.conclusion;
  } catch (const std::exception&) {
    rep.r3_ok = false;
  }
  return rep;
}

}  // namespace cvx
