#include "cvxproj/convexdom.hpp"

#include "cvxproj/chartgeom.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace cvx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lexicographic row sort for deterministic representations.
Mat sort_rows(const Mat& m) {
  std::vector<int> idx(m.rows());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m(a, j) - m(b, j)) > 1e-12) return m(a, j) < m(b, j);
    }
    return false;
  });
  Mat out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) out.row(i) = m.row(idx[i]);
  return out;
}

Vec unit_row_sign(Vec v) {
  v /= v.norm();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      break;
    }
  }
  return v;
}

Chart make_chart(const Covec& xi_in, const Vec& some_interior_lift) {
  Chart ch;
  ch.xi = xi_in / xi_in.norm();
  if (ch.xi * some_interior_lift < 0) ch.xi = -ch.xi;
  ch.basis = null_space_rows(ch.xi);
  ch.origin = some_interior_lift / (ch.xi * some_interior_lift);
  return ch;
}

}  // namespace

Vec Chart::to_chart(const Vec& lift_v) const {
  double s = xi * lift_v;
  if (std::abs(s) < 1e-13 * lift_v.norm())
    throw std::invalid_argument("Chart: point at chart infinity");
  return basis * (lift_v / s - origin);
}

ProjPoint Chart::from_chart(const Vec& y) const { return ProjPoint(lift(y)); }

bool FaceDescriptor::same_face(const FaceDescriptor& other) const {
  if (!carrier.empty() || !other.carrier.empty()) return carrier == other.carrier;
  return witness.approx_equal(other.witness, 1e-8);
}

ConvexDomain ConvexDomain::polytope_from_vertices(const Mat& vertex_lifts) {
  if (vertex_lifts.rows() < vertex_lifts.cols())
    throw std::invalid_argument("polytope: need at least d vertices");
  int d = static_cast<int>(vertex_lifts.cols());
  Mat lifts = vertex_lifts;
  for (int i = 0; i < lifts.rows(); ++i) lifts.row(i) /= lifts.row(i).norm();

  // Sharpness: a covector strictly positive on all generators exists iff
  // the origin is not in the convex hull of the normalized lifts.
  Vec w = min_norm_in_hull(lifts);
  if (w.norm() < 1e-7)
    throw std::invalid_argument("polytope: cone is not sharp");
  Covec xi0 = w.transpose() / w.norm();

  // First pass in the provisional chart.
  std::vector<Vec> chart_pts;
  Chart ch0 = make_chart(xi0, lifts.colwise().mean().transpose());
  for (int i = 0; i < lifts.rows(); ++i)
    chart_pts.push_back(ch0.to_chart(Vec(lifts.row(i).transpose())));
  auto facets0 = hull_facets(chart_pts);
  auto extremes = extreme_point_indices(chart_pts, facets0);
  if (extremes.empty())
    throw std::invalid_argument("polytope: no extreme points (degenerate)");

  // Facet functionals on the cone: normal . y <= offset pulled back
  // through the chart.
  Mat functionals(facets0.size(), d);
  for (size_t k = 0; k < facets0.size(); ++k) {
    // normal.y <= c pulls back to (c xi + (normal.B origin) xi - normal.B).v >= 0
    double c = facets0[k].offset + facets0[k].normal.dot(ch0.basis * ch0.origin);
    Covec f = c * ch0.xi - facets0[k].normal.transpose() * ch0.basis;
    // Orientation: f is nonnegative on the cone by construction; keep it
    // so that the canonical chart covector (sum of facets) is strictly
    // positive on the closure.
    functionals.row(k) = f / f.norm();
  }

  Mat verts(extremes.size(), d);
  for (size_t k = 0; k < extremes.size(); ++k) {
    Vec v = lifts.row(extremes[k]).transpose();
    if (xi0 * v < 0) v = -v;
    verts.row(k) = v.transpose() / v.norm();
  }

  ConvexDomain dom;
  dom.d_ = d;
  Polytope p;
  p.vertex_lifts = sort_rows(verts);
  p.facet_functionals = sort_rows(functionals);

  // Canonical chart: normalized sum of facet functionals, strictly
  // positive on the closed cone minus the origin.
  Covec xi = p.facet_functionals.colwise().sum();
  Vec mean_dir = Vec::Zero(d);
  for (int i = 0; i < p.vertex_lifts.rows(); ++i) {
    Vec v = p.vertex_lifts.row(i).transpose();
    if (xi * v < 0) v = -v;
    mean_dir += v;
  }
  dom.chart_ = make_chart(xi, mean_dir);
  // Align stored vertex signs with the canonical chart.
  for (int i = 0; i < p.vertex_lifts.rows(); ++i) {
    if (dom.chart_.xi * p.vertex_lifts.row(i).transpose() < 0)
      p.vertex_lifts.row(i) = -p.vertex_lifts.row(i);
  }
  // Facet signs: nonnegative on the vertices.
  for (int k = 0; k < p.facet_functionals.rows(); ++k) {
    double s = (p.vertex_lifts * p.facet_functionals.row(k).transpose()).sum();
    if (s < 0) p.facet_functionals.row(k) = -p.facet_functionals.row(k);
  }
  dom.rep_ = p;

  Vec csum = Vec::Zero(d - 1);
  for (int i = 0; i < p.vertex_lifts.rows(); ++i)
    csum += dom.chart_.to_chart(Vec(p.vertex_lifts.row(i).transpose()));
  dom.center_ = dom.chart_.from_chart(csum / p.vertex_lifts.rows());
  return dom;
}

ConvexDomain ConvexDomain::polytope_from_facets(const Mat& facet_functionals) {
  int d = static_cast<int>(facet_functionals.cols());
  int m = static_cast<int>(facet_functionals.rows());
  if (m < d) throw std::invalid_argument("polytope: need at least d facets");
  Mat fns = facet_functionals;
  for (int i = 0; i < m; ++i) fns.row(i) /= fns.row(i).norm();

  // Candidate rays: null directions of (d-1)-subsets of functionals that
  // are nonnegative against every functional.
  std::vector<Vec> rays;
  std::vector<int> comb(d - 1);
  std::iota(comb.begin(), comb.end(), 0);
  auto advance = [&]() {
    int i = d - 2;
    while (i >= 0 && comb[i] == m - (d - 1) + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < d - 1; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  do {
    Mat sub(d - 1, d);
    for (int j = 0; j < d - 1; ++j) sub.row(j) = fns.row(comb[j]);
    Mat nb = null_space_rows(sub, 1e-9);
    if (nb.rows() != 1) continue;
    Vec r = nb.row(0).transpose();
    double lo_pos = (fns * r).minCoeff();
    double lo_neg = (fns * (-r)).minCoeff();
    double tol = -1e-9;
    Vec keep;
    if (lo_pos > tol)
      keep = r;
    else if (lo_neg > tol)
      keep = -r;
    else
      continue;
    bool dup = false;
    for (const auto& q : rays)
      if (std::abs(q.dot(keep)) > 1.0 - 1e-10) {
        dup = true;
        break;
      }
    if (!dup) rays.push_back(keep);
  } while (advance());

  if (static_cast<int>(rays.size()) < d)
    throw std::invalid_argument("polytope_from_facets: vertex enumeration found < d rays");
  Mat verts(rays.size(), d);
  for (size_t i = 0; i < rays.size(); ++i) verts.row(i) = rays[i].transpose();
  return polytope_from_vertices(verts);
}

ConvexDomain ConvexDomain::ellipsoid(const Mat& form) {
  int d = static_cast<int>(form.rows());
  if (form.cols() != d || d < 2)
    throw std::invalid_argument("ellipsoid: need square form, d >= 2");
  Mat j = 0.5 * (form + form.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(j);
  int neg = 0;
  for (int i = 0; i < d; ++i)
    if (es.eigenvalues()(i) < 0) ++neg;
  if (neg == d - 1) {
    j = -j;
    es.compute(j);
    neg = 1;
  }
  if (neg != 1)
    throw std::invalid_argument("ellipsoid: form must have signature (d-1,1)");
  double det = std::abs(j.determinant());
  j /= std::pow(det, 1.0 / d);
  es.compute(j);

  ConvexDomain dom;
  dom.d_ = d;
  dom.rep_ = Ellipsoid{j};
  Vec u = es.eigenvectors().col(0);  // negative eigenvalue is smallest
  dom.chart_ = make_chart(u.transpose(), u);
  dom.center_ = ProjPoint(u);
  return dom;
}

ConvexDomain ConvexDomain::transformed(const ProjectiveMap& g) const {
  if (g.ambient() != d_)
    throw std::invalid_argument("transformed: dimension mismatch");
  if (is_polytope()) {
    Mat v = polytope().vertex_lifts * g.mat().transpose();
    return polytope_from_vertices(v);
  }
  Mat gi = g.mat().inverse();
  return ellipsoid(gi.transpose() * ellipsoid_rep().form * gi);
}

PointedDomain::PointedDomain(ConvexDomain dom, ProjPoint b)
    : domain(std::move(dom)), base(std::move(b)) {
  if (contains(domain, base) != Location::Interior)
    throw std::invalid_argument("PointedDomain: base point not interior");
}

Location contains(const ConvexDomain& dom, const ProjPoint& x,
                  const Config& cfg) {
  if (x.ambient() != dom.ambient())
    throw std::invalid_argument("contains: dimension mismatch");
  double val;
  if (dom.is_polytope()) {
    Vec margins = dom.polytope().facet_functionals * x.rep();
    val = std::max(margins.minCoeff(), (-margins).minCoeff());
  } else {
    // interior iff v^T J v < 0 on the unit representative
    val = -x.rep().dot(dom.ellipsoid_rep().form * x.rep());
  }
  if (val > cfg.boundary_tol) return Location::Interior;
  if (val < -cfg.boundary_tol) return Location::Exterior;
  return Location::Boundary;
}

namespace {

// Intersection of the line s -> [x + s z] with the domain: the open
// interval (lo, hi) around s = 0 for interior x. Works for any second
// point z, including points outside the chart of the domain.
std::pair<double, double> line_interval(const ConvexDomain& dom, const Vec& x,
                                        const Vec& z) {
  double lo = -kInf, hi = kInf;
  if (dom.is_polytope()) {
    Vec fx = dom.polytope().facet_functionals * x;
    Vec fz = dom.polytope().facet_functionals * z;
    for (Eigen::Index i = 0; i < fx.size(); ++i) {
      // need fx(i) + s fz(i) > 0
      if (std::abs(fz(i)) < 1e-14) continue;
      double bound = -fx(i) / fz(i);
      if (fz(i) > 0)
        lo = std::max(lo, bound);
      else
        hi = std::min(hi, bound);
    }
  } else {
    const Mat& j = dom.ellipsoid_rep().form;
    double a = z.dot(j * z);
    double b = 2.0 * x.dot(j * z);
    double c = x.dot(j * x);  // negative for interior x
    // need a s^2 + b s + c < 0
    if (std::abs(a) < 1e-14) {
      if (std::abs(b) > 1e-14) {
        double bound = -c / b;
        if (b > 0)
          hi = bound;
        else
          lo = bound;
      }
    } else {
      double disc = b * b - 4 * a * c;
      if (disc <= 0)
        throw std::logic_error("line_interval: line misses the ellipsoid");
      double sq = std::sqrt(disc);
      double r1 = (-b - sq) / (2 * a), r2 = (-b + sq) / (2 * a);
      if (a > 0) {
        lo = std::min(r1, r2);
        hi = std::max(r1, r2);
      } else {
        // interval is the complement; interior near s=0 picks one side
        double rl = std::min(r1, r2), rh = std::max(r1, r2);
        if (0 < rl)
          hi = rl;
        else
          lo = rh;
      }
    }
  }
  if (!(lo < 0.0 && hi > 0.0) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::logic_error("line_interval: base point not interior to the chord");
  return {lo, hi};
}

// Sign-aligned lift of x with the domain chart.
Vec aligned_lift(const ConvexDomain& dom, const ProjPoint& p) {
  Vec v = p.rep();
  if (dom.chart().xi * v < 0) v = -v;
  return v;
}

}  // namespace

ChordResult chord(const ConvexDomain& dom, const ProjPoint& x,
                  const ProjPoint& y, const Config& cfg) {
  if (contains(dom, x, cfg) != Location::Interior)
    throw std::invalid_argument("chord: x must be interior");
  if (x.approx_equal(y, 1e-12))
    throw std::invalid_argument("chord: x and y coincide");
  // Parameterize along the chart segment so that y sits at s = 1.
  Vec xl = aligned_lift(dom, x), yl = aligned_lift(dom, y);
  Vec xc = xl / (dom.chart().xi * xl), yc = yl / (dom.chart().xi * yl);
  Vec dir = yc - xc;
  auto [lo, hi] = line_interval(dom, xc, dir);
  return ChordResult{ProjPoint(xc + lo * dir), ProjPoint(xc + hi * dir)};
}

double hilbert_distance(const ConvexDomain& dom, const ProjPoint& x,
                        const ProjPoint& y, const Config& cfg) {
  if (contains(dom, x, cfg) != Location::Interior ||
      contains(dom, y, cfg) != Location::Interior)
    throw std::invalid_argument("hilbert_distance: points must be interior");
  if (x.approx_equal(y, 1e-14)) return 0.0;
  Vec xl = aligned_lift(dom, x), yl = aligned_lift(dom, y);
  Vec xc = xl / (dom.chart().xi * xl), yc = yl / (dom.chart().xi * yl);
  Vec dir = yc - xc;
  if (dir.norm() < 1e-15) return 0.0;
  auto [lo, hi] = line_interval(dom, xc, dir);
  // cross ratio [a, x; y, b] with coordinates lo, 0, 1, hi
  double cr = ((1.0 - lo) * hi) / ((-lo) * (hi - 1.0));
  return 0.5 * std::log(cr);
}

SupportingFunctionals supporting_functionals_at(const ConvexDomain& dom,
                                                const ProjPoint& b,
                                                const Config& cfg) {
  if (contains(dom, b, cfg) != Location::Boundary)
    throw std::invalid_argument("supporting_functionals_at: not a boundary point");
  SupportingFunctionals out;
  if (dom.is_polytope()) {
    const Mat& fns = dom.polytope().facet_functionals;
    Vec vals = fns * aligned_lift(dom, b);
    for (Eigen::Index i = 0; i < vals.size(); ++i)
      if (std::abs(vals(i)) < cfg.face_saturation_tol)
        out.extreme.push_back(fns.row(i));
  } else {
    Covec f = (dom.ellipsoid_rep().form * b.rep()).transpose();
    if (f * aligned_lift(dom, dom.center()) < 0) f = -f;
    out.extreme.push_back(f / f.norm());
  }
  if (out.extreme.empty())
    throw std::logic_error("supporting_functionals_at: no saturated facet");
  Covec avg = Covec::Zero(dom.ambient());
  for (const auto& f : out.extreme) avg += f;
  out.canonical = avg / avg.norm();
  return out;
}

FaceDescriptor face_of(const ConvexDomain& dom, const ProjPoint& b,
                       const Config& cfg) {
  if (contains(dom, b, cfg) != Location::Boundary)
    throw std::invalid_argument("face_of: not a boundary point");
  if (dom.is_ellipsoid()) {
    return FaceDescriptor{0, ProjSubspace::from_point(b), {}, {}, b};
  }
  const auto& poly = dom.polytope();
  Vec vals = poly.facet_functionals * aligned_lift(dom, b);
  std::vector<int> carrier;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (std::abs(vals(i)) < cfg.face_saturation_tol)
      carrier.push_back(static_cast<int>(i));
  std::vector<int> vertex_ids;
  for (int v = 0; v < poly.vertex_lifts.rows(); ++v) {
    bool in_face = true;
    for (int i : carrier) {
      if (std::abs(poly.facet_functionals.row(i).dot(poly.vertex_lifts.row(v))) >
          cfg.face_saturation_tol) {
        in_face = false;
        break;
      }
    }
    if (in_face) vertex_ids.push_back(v);
  }
  if (vertex_ids.empty())
    throw std::logic_error("face_of: carrier has no vertices");
  Mat span(vertex_ids.size(), dom.ambient());
  for (size_t k = 0; k < vertex_ids.size(); ++k)
    span.row(k) = poly.vertex_lifts.row(vertex_ids[k]);
  Eigen::JacobiSVD<Mat> svd(span, Eigen::ComputeThinV);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9 * svd.singularValues()(0)) ++rank;
  ProjSubspace support(Mat(svd.matrixV().leftCols(rank).transpose()));
  return FaceDescriptor{rank - 1, support, carrier, vertex_ids, b};
}

std::vector<FaceDescriptor> enumerate_faces(const ConvexDomain& dom) {
  if (!dom.is_polytope())
    throw std::invalid_argument("enumerate_faces: polytope domains only");
  const auto& poly = dom.polytope();
  int nv = static_cast<int>(poly.vertex_lifts.rows());
  int nf = static_cast<int>(poly.facet_functionals.rows());
  double tol = default_config().face_saturation_tol;

  // saturation incidence
  std::vector<std::set<int>> vert_sat(nv);
  for (int v = 0; v < nv; ++v)
    for (int f = 0; f < nf; ++f)
      if (std::abs(poly.facet_functionals.row(f).dot(poly.vertex_lifts.row(v))) < tol)
        vert_sat[v].insert(f);

  auto face_vertices = [&](const std::set<int>& carrier) {
    std::vector<int> vs;
    for (int v = 0; v < nv; ++v) {
      bool ok = true;
      for (int f : carrier)
        if (!vert_sat[v].count(f)) {
          ok = false;
          break;
        }
      if (ok) vs.push_back(v);
    }
    return vs;
  };
  auto canonical_carrier = [&](const std::vector<int>& vs) {
    std::set<int> c;
    for (int f = 0; f < nf; ++f) {
      bool all = true;
      for (int v : vs)
        if (!vert_sat[v].count(f)) {
          all = false;
          break;
        }
      if (all) c.insert(f);
    }
    return c;
  };

  std::set<std::set<int>> seen;
  std::vector<std::set<int>> queue;
  for (int v = 0; v < nv; ++v) queue.push_back(vert_sat[v]);
  for (int f = 0; f < nf; ++f) queue.push_back({f});

  std::vector<FaceDescriptor> faces;
  while (!queue.empty()) {
    std::set<int> carrier = queue.back();
    queue.pop_back();
    if (carrier.empty()) continue;
    auto vs = face_vertices(carrier);
    if (vs.empty()) continue;
    auto canon = canonical_carrier(vs);
    if (canon.empty() || seen.count(canon)) continue;
    seen.insert(canon);
    // barycenter of the face is a relative-interior witness
    Vec bary = Vec::Zero(dom.ambient());
    Mat span(vs.size(), dom.ambient());
    for (size_t k = 0; k < vs.size(); ++k) {
      Vec v = poly.vertex_lifts.row(vs[k]).transpose();
      if (dom.chart().xi * v < 0) v = -v;
      bary += v / (dom.chart().xi * v);
      span.row(k) = poly.vertex_lifts.row(vs[k]);
    }
    Eigen::JacobiSVD<Mat> svd(span, Eigen::ComputeThinV);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-9 * svd.singularValues()(0)) ++rank;
    ProjSubspace support(Mat(svd.matrixV().leftCols(rank).transpose()));
    faces.push_back(FaceDescriptor{rank - 1, support,
                                   std::vector<int>(canon.begin(), canon.end()),
                                   vs, ProjPoint(bary)});
    // generate intersections with vertex carriers
    for (int v = 0; v < nv; ++v) {
      std::set<int> inter;
      std::set_intersection(canon.begin(), canon.end(), vert_sat[v].begin(),
                            vert_sat[v].end(),
                            std::inserter(inter, inter.begin()));
      if (!inter.empty() && !seen.count(inter)) queue.push_back(inter);
    }
  }
  std::sort(faces.begin(), faces.end(),
            [](const FaceDescriptor& a, const FaceDescriptor& b) {
              if (a.dim != b.dim) return a.dim < b.dim;
              return a.carrier < b.carrier;
            });
  return faces;
}

ProjPoint hilbert_ray_point(const ConvexDomain& dom, const ProjPoint& p,
                            const ProjPoint& b, double t, const Config& cfg) {
  if (contains(dom, p, cfg) != Location::Interior)
    throw std::invalid_argument("hilbert_ray_point: p must be interior");
  Vec pl = aligned_lift(dom, p), bl = aligned_lift(dom, b);
  Vec pc = pl / (dom.chart().xi * pl), bc = bl / (dom.chart().xi * bl);
  Vec dir = bc - pc;
  auto [lo, hi] = line_interval(dom, pc, dir);
  double k = std::exp(2.0 * t);
  double c = lo * (1.0 - k) / (1.0 - k * lo / hi);
  return ProjPoint(pc + c * dir);
}

namespace {

using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Long-double chord interval; at Hilbert times near 20 the ray points
// sit within ~1e-18 of the boundary, beyond double resolution.
std::pair<long double, long double> line_interval_l(const ConvexDomain& dom,
                                                    const LMat& fns,
                                                    const LMat& form,
                                                    const LVec& x,
                                                    const LVec& z) {
  long double lo = -std::numeric_limits<long double>::infinity();
  long double hi = std::numeric_limits<long double>::infinity();
  if (dom.is_polytope()) {
    LVec fx = fns * x, fz = fns * z;
    for (Eigen::Index i = 0; i < fx.size(); ++i) {
      if (std::abs((double)fz(i)) < 1e-16) continue;
      long double bound = -fx(i) / fz(i);
      if (fz(i) > 0)
        lo = std::max(lo, bound);
      else
        hi = std::min(hi, bound);
    }
  } else {
    long double a = z.dot(form * z);
    long double b = 2.0L * x.dot(form * z);
    long double c = x.dot(form * x);
    long double disc = b * b - 4 * a * c;
    if (disc <= 0)
      throw std::logic_error("ray_distance_profile: line misses the ellipsoid");
    long double sq = sqrtl(disc);
    long double r1 = (-b - sq) / (2 * a), r2 = (-b + sq) / (2 * a);
    lo = std::min(r1, r2);
    hi = std::max(r1, r2);
  }
  if (!(lo < 0.0L && hi > 0.0L))
    throw std::logic_error("ray_distance_profile: base point left the domain");
  return {lo, hi};
}

}  // namespace

std::vector<double> ray_distance_profile(const ConvexDomain& dom,
                                         const ProjPoint& p1,
                                         const ProjPoint& b1,
                                         const ProjPoint& p2,
                                         const ProjPoint& b2, double horizon,
                                         int samples, const Config& cfg) {
  if (contains(dom, b1, cfg) != Location::Boundary ||
      contains(dom, b2, cfg) != Location::Boundary)
    throw std::invalid_argument("ray_distance_profile: endpoints must be on the boundary");
  if (contains(dom, p1, cfg) != Location::Interior ||
      contains(dom, p2, cfg) != Location::Interior)
    throw std::invalid_argument("ray_distance_profile: base points must be interior");

  LMat fns(0, 0), form(0, 0);
  if (dom.is_polytope())
    fns = dom.polytope().facet_functionals.cast<long double>();
  else
    form = dom.ellipsoid_rep().form.cast<long double>();

  Covec xi = dom.chart().xi;
  auto chart_lift = [&](const ProjPoint& p) {
    Vec v = aligned_lift(dom, p);
    return LVec((v / (xi * v)).cast<long double>());
  };
  LVec pc1 = chart_lift(p1), pc2 = chart_lift(p2);
  LVec d1 = LVec(chart_lift(b1) - pc1), d2 = LVec(chart_lift(b2) - pc2);
  auto [lo1, hi1] = line_interval_l(dom, fns, form, pc1, d1);
  auto [lo2, hi2] = line_interval_l(dom, fns, form, pc2, d2);

  auto ray_point = [](const LVec& p, const LVec& dir, long double lo,
                      long double hi, long double t) {
    long double k = expl(2.0L * t);
    long double c = lo * (1.0L - k) / (1.0L - k * lo / hi);
    return LVec(p + c * dir);
  };

  std::vector<double> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    long double t = horizon * i / std::max(1, samples - 1);
    LVec q1 = ray_point(pc1, d1, lo1, hi1, t);
    LVec q2 = ray_point(pc2, d2, lo2, hi2, t);
    LVec dir = q2 - q1;
    if ((double)dir.norm() < 1e-25) {
      out.push_back(0.0);
      continue;
    }
    auto [lo, hi] = line_interval_l(dom, fns, form, q1, dir);
    long double cr = ((1.0L - lo) * hi) / ((-lo) * (hi - 1.0L));
    out.push_back(0.5 * (double)logl(cr));
  }
  return out;
}

ConvexDomain dual_domain(const ConvexDomain& dom) {
  if (dom.is_polytope())
    return ConvexDomain::polytope_from_vertices(dom.polytope().facet_functionals);
  return ConvexDomain::ellipsoid(dom.ellipsoid_rep().form.inverse());
}

HullResult hull_of_boundary_set(const ConvexDomain& dom,
                                const std::vector<ProjPoint>& points,
                                const Config& cfg) {
  if (points.empty())
    throw std::invalid_argument("hull_of_boundary_set: empty input");
  int d = dom.ambient();
  Mat lifts(points.size(), d);
  for (size_t i = 0; i < points.size(); ++i)
    lifts.row(i) = aligned_lift(dom, points[i]).transpose();

  Eigen::JacobiSVD<Mat> svd(lifts, Eigen::ComputeThinV);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-8 * svd.singularValues()(0)) ++rank;

  std::optional<ProjSubspace> span;
  Mat hull_input;
  if (rank >= d) {
    hull_input = lifts;
  } else {
    if (rank < 2)
      throw std::invalid_argument("hull_of_boundary_set: input spans a single point");
    span = ProjSubspace(Mat(svd.matrixV().leftCols(rank).transpose()));
    hull_input = lifts * span->basis().transpose();  // coords in the span
  }
  HullResult res{ConvexDomain::polytope_from_vertices(hull_input),
                 std::move(span), rank < d, {}};

  // match hull vertices back to input indices
  const Mat& hv = res.hull.polytope().vertex_lifts;
  for (int k = 0; k < hv.rows(); ++k) {
    for (size_t i = 0; i < points.size(); ++i) {
      Vec cand = hull_input.row(i).transpose();
      cand /= cand.norm();
      if (std::abs(cand.dot(hv.row(k).transpose())) > 1.0 - 1e-8) {
        if (contains(dom, points[i], cfg) == Location::Boundary)
          res.ideal_vertex_ids.push_back(static_cast<int>(i));
        break;
      }
    }
  }
  std::sort(res.ideal_vertex_ids.begin(), res.ideal_vertex_ids.end());
  res.ideal_vertex_ids.erase(
      std::unique(res.ideal_vertex_ids.begin(), res.ideal_vertex_ids.end()),
      res.ideal_vertex_ids.end());
  return res;
}

BoundaryCheckReport boundary_subset_checks(const ConvexDomain& dom,
                                           const BoundarySubset& lambda,
                                           const Config& cfg) {
  BoundaryCheckReport rep;
  for (const auto& s : lambda.samples)
    if (contains(dom, s, cfg) != Location::Boundary)
      throw std::invalid_argument("boundary_subset_checks: sample not on the boundary");

  if (dom.is_ellipsoid()) {
    // strictly convex boundary: every face is a point, so the face and
    // convexity conditions are automatic for point sets
    return rep;
  }

  auto declared = lambda.faces;
  // contains_faces: the open face of every sample must be declared
  for (const auto& s : lambda.samples) {
    FaceDescriptor f = face_of(dom, s, cfg);
    bool found = false;
    for (const auto& df : declared)
      if (df.same_face(f)) {
        found = true;
        break;
      }
    if (!found) {
      rep.contains_faces = false;
      rep.face_violations.push_back(s);
    }
  }

  // boundary_convex: for each facet hyperplane, the union of declared
  // faces inside it must be the face set of its own convex hull.
  auto all_faces = enumerate_faces(dom);
  const auto& poly = dom.polytope();
  int nf = static_cast<int>(poly.facet_functionals.rows());
  for (int fi = 0; fi < nf; ++fi) {
    // declared faces inside facet fi
    std::vector<const FaceDescriptor*> inside;
    std::set<int> verts;
    for (const auto& df : declared)
      if (std::find(df.carrier.begin(), df.carrier.end(), fi) != df.carrier.end()) {
        inside.push_back(&df);
        for (int v : df.vertex_ids) verts.insert(v);
      }
    if (verts.size() < 2) continue;
    // hull of the declared vertices within the facet
    std::vector<ProjPoint> pts;
    for (int v : verts) pts.push_back(ProjPoint(Vec(poly.vertex_lifts.row(v).transpose())));
    HullResult hull = hull_of_boundary_set(dom, pts, cfg);
    // every face of the polytope inside this facet whose barycenter lies
    // in the hull must be declared
    for (const auto& face : all_faces) {
      if (std::find(face.carrier.begin(), face.carrier.end(), fi) ==
          face.carrier.end())
        continue;
      // barycenter in hull?
      ProjPoint bary = face.witness;
      Location loc;
      if (hull.degenerate) {
        Vec coords = hull.span->basis() * aligned_lift(dom, bary);
        double residual =
            (aligned_lift(dom, bary).normalized() -
             (hull.span->basis().transpose() * coords).normalized())
                .norm();
        if (residual > 1e-7) continue;  // not even in the span
        loc = contains(hull.hull, ProjPoint(coords), cfg);
      } else {
        loc = contains(hull.hull, bary, cfg);
      }
      if (loc == Location::Exterior) continue;
      bool found = false;
      for (const auto* df : inside)
        if (df->same_face(face)) {
          found = true;
          break;
        }
      if (!found) {
        rep.boundary_convex = false;
        rep.nonconvex_facets.push_back(fi);
        break;
      }
    }
  }
  return rep;
}

DeltaResult delta_invariant(const ConvexDomain& dom, const ProjPoint& x,
                            const ProjSubspace& w, const Config& cfg) {
  if (w.dim() != dom.ambient() - 1)
    throw std::invalid_argument("delta_invariant: W must be a hyperplane");
  if (contains(dom, x, cfg) != Location::Interior)
    throw std::invalid_argument("delta_invariant: x must be interior");
  int wd = w.dim();
  Vec xl = aligned_lift(dom, x);

  // Reject hyperplanes that meet the domain: sample chords toward W.
  auto eval_dir = [&](const Vec& t) {
    Vec z = w.basis().transpose() * t;
    if (dom.is_polytope()) {
      // z on the boundary or inside would make the chord unbounded
      if (contains(dom, ProjPoint(z), cfg) != Location::Exterior)
        throw std::invalid_argument("delta_invariant: W meets the closure of the domain");
    } else {
      if (z.dot(dom.ellipsoid_rep().form * z) < cfg.boundary_tol)
        throw std::invalid_argument("delta_invariant: W meets the closure of the domain");
    }
    auto [lo, hi] = line_interval(dom, xl, z);
    // z sits at s = +/- infinity of the affine parameterization, so the
    // two cross-ratios collapse to chord-length ratios.
    return std::min((hi - lo) / (-lo), (hi - lo) / hi);
  };

  // Deterministic direction grid on the unit sphere of W.
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss;
  std::vector<Vec> dirs;
  if (wd == 1) {
    dirs.push_back(Vec::Ones(1));
  } else if (wd == 2) {
    for (int i = 0; i < cfg.grid_per_dim; ++i) {
      double th = M_PI * i / cfg.grid_per_dim;
      Vec t(2);
      t << std::cos(th), std::sin(th);
      dirs.push_back(t);
    }
  } else {
    int n = std::min(4096, cfg.grid_per_dim * cfg.grid_per_dim);
    for (int i = 0; i < n; ++i) {
      Vec t(wd);
      for (int j = 0; j < wd; ++j) t(j) = gauss(rng);
      dirs.push_back(t.normalized());
    }
  }

  double best = kInf;
  Vec best_dir = dirs[0];
  for (const auto& t : dirs) {
    double v = eval_dir(t);
    if (v < best) {
      best = v;
      best_dir = t;
    }
  }

  // Local refinement: shrinking coordinate-wise golden-section steps in
  // the tangent directions at the best grid point.
  double radius = (wd == 1) ? 0.0 : M_PI / cfg.grid_per_dim;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int round = 0; round < 60 && radius > 1e-10; ++round) {
    bool improved = false;
    for (int j = 0; j < wd && wd > 1; ++j) {
      Vec tang = Vec::Zero(wd);
      tang(j) = 1.0;
      tang -= tang.dot(best_dir) * best_dir;
      if (tang.norm() < 1e-12) continue;
      tang.normalize();
      for (double s : {-radius, radius}) {
        Vec cand = (best_dir + s * tang).normalized();
        double v = eval_dir(cand);
        if (v < best) {
          best = v;
          best_dir = cand;
          improved = true;
        }
      }
    }
    if (!improved) radius *= golden;
  }
  return DeltaResult{best, radius};
}

std::vector<ProjPoint> sample_boundary(const ConvexDomain& dom, int count,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<ProjPoint> out;
  out.reserve(count);
  Vec c = dom.chart().to_chart(dom.center());
  int m = dom.ambient() - 1;
  while (static_cast<int>(out.size()) < count) {
    Vec dir(m);
    for (int j = 0; j < m; ++j) dir(j) = gauss(rng);
    if (dir.norm() < 1e-12) continue;
    Vec base = dom.chart().lift(c);
    Vec z = dom.chart().basis.transpose() * dir;
    auto [lo, hi] = line_interval(dom, base, z);
    out.push_back(ProjPoint(base + hi * z));
    if (static_cast<int>(out.size()) < count)
      out.push_back(ProjPoint(base + lo * z));
  }
  return out;
}

ProjPoint project_to_boundary(const ConvexDomain& dom, const ProjPoint& anchor,
                              const ProjPoint& x, const Config& cfg) {
  if (anchor.approx_equal(x, 1e-12))
    throw std::invalid_argument("project_to_boundary: x coincides with the anchor");
  return chord(dom, anchor, x, cfg).forward;
}

}  // namespace cvx
