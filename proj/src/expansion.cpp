#include "cvxproj/expansion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cvx {

namespace {

// Random subspace at a prescribed Grassmannian distance from v: the
// graph of a linear map v -> v^perp whose largest singular value is
// tan(dist), so the largest principal angle is exactly dist.
ProjSubspace perturb_subspace(const ProjSubspace& v, double dist,
                              std::mt19937_64& rng) {
  if (dist <= 0.0) return v;
  const int k = v.dim();
  const int d = v.ambient();
  const Mat nbasis = v.complement().basis();  // (d-k) x d
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat t(k, d - k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d - k; ++j) t(i, j) = gauss(rng);
  Eigen::JacobiSVD<Mat> svd(t);
  const double smax = svd.singularValues()(0);
  if (smax < 1e-14) return v;
  t *= std::tan(dist) / smax;
  return ProjSubspace(v.basis() + t * nbasis);
}

std::optional<ExpansionCertificate> search_expanding(
    const OrbitCloud& cloud, const FaceDescriptor& face, double c, double r,
    const Config& cfg) {
  for (const OrbitEntry& entry : cloud.entries) {
    ExpansionSampleReport rep =
        is_expanding_on_ball(entry.map, face.support, r, c, cfg);
    if (rep.pass)
      return ExpansionCertificate{face,
                                  entry.word,
                                  entry.map,
                                  std::min(rep.measured_min_ratio,
                                           rep.center_ratio),
                                  c,
                                  r,
                                  "sampled",
                                  "grassmann_angle",
                                  rep.seed,
                                  rep.samples};
  }
  return std::nullopt;
}

Config cheap_distance_config(const Config& cfg) {
  Config cheap = cfg;
  cheap.boundary_samples = std::min(cfg.boundary_samples, 256);
  return cheap;
}

// Measured clustering radius of the transformed domains around the last
// one, which anchors the reference pointed domain.
double measure_k_radius(const ConvexDomain& dom,
                        const std::vector<ProjectiveMap>& maps,
                        const ConvexDomain& reference, const Config& cfg) {
  const Config cheap = cheap_distance_config(cfg);
  double radius = 0.0;
  for (const ProjectiveMap& g : maps)
    radius = std::max(radius, domain_distance(dom.transformed(g), reference,
                                              cheap));
  return radius;
}

struct LineCoords {
  double a = 0.0;  // coefficient along x_plus
  double b = 0.0;  // coefficient along the V_minus direction of the line
};

// Coordinates of a lift in the (x_plus, line-exit-direction) frame, sign
// normalized so the x_plus coefficient is positive. `sinv` maps lifts to
// frame coordinates with the x_plus axis at `axis` and the V_minus block
// occupying `vm_index` entries starting at `vm_start`; `wdir` is the
// unit V_minus-block direction of the target point.
LineCoords line_coords(const Mat& sinv, const Vec& lift, int axis,
                       int vm_start, int vm_len, const Vec& wdir,
                       const char* what) {
  Vec c = sinv * lift;
  if (c(axis) < 0) c = -c;
  const double a = c(axis);
  if (a < 1e-12)
    throw std::invalid_argument(std::string(what) +
                                ": point lies in the face hyperplane");
  const Vec w = c.segment(vm_start, vm_len);
  const double b = w.dot(wdir);
  const double off = (w - b * wdir).norm();
  Vec resid = c;
  resid(axis) = 0.0;
  resid.segment(vm_start, vm_len).setZero();
  if (off > 1e-7 * c.norm() || resid.norm() > 1e-7 * c.norm())
    throw std::invalid_argument(std::string(what) +
                                ": point is not on the reference line");
  if (b <= 1e-12)
    throw std::invalid_argument(std::string(what) +
                                ": point is on the wrong side of x_plus");
  return {a, b};
}

}  // namespace

ExpansionSampleReport is_expanding_on_ball(const ProjectiveMap& g,
                                           const ProjSubspace& v, double r,
                                           double c, const Config& cfg) {
  if (g.ambient() != v.ambient())
    throw std::invalid_argument("is_expanding_on_ball: dimension mismatch");
  if (!(r > 0.0) || r >= std::acos(-1.0) / 4)
    throw std::invalid_argument(
        "is_expanding_on_ball: radius must lie in (0, pi/4)");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  ExpansionSampleReport rep;
  rep.samples = cfg.expansion_samples;
  rep.seed = cfg.seed;
  rep.measured_min_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.expansion_samples; ++i) {
    double ratio = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      const ProjSubspace w1 = perturb_subspace(v, r * unif(rng), rng);
      const ProjSubspace w2 = perturb_subspace(v, r * unif(rng), rng);
      const double sep = grassmann_distance(w1, w2);
      if (sep < 1e-9) continue;  // degenerate pair, resample
      ratio = grassmann_distance(g.apply(w1), g.apply(w2)) / sep;
      ok = true;
    }
    if (!ok)
      throw std::runtime_error(
          "is_expanding_on_ball: could not sample a separated pair");
    rep.measured_min_ratio = std::min(rep.measured_min_ratio, ratio);
  }

  // Derivative proxy: ratio against a point at separation 1e-5 from the
  // center of the ball.
  const ProjSubspace w = perturb_subspace(v, 1e-5, rng);
  const double sep = grassmann_distance(v, w);
  rep.center_ratio =
      sep < 1e-12 ? 0.0
                  : grassmann_distance(g.apply(v), g.apply(w)) / sep;

  rep.pass = rep.measured_min_ratio >= c && rep.center_ratio >= c;
  return rep;
}

double sv_expansion_bound(const ProjectiveMap& g, const ProjSubspace& v_minus,
                          const ProjSubspace& e_plus) {
  const int d = g.ambient();
  if (v_minus.ambient() != d || e_plus.ambient() != d)
    throw std::invalid_argument("sv_expansion_bound: dimension mismatch");
  if (v_minus.dim() + e_plus.dim() != d)
    throw std::invalid_argument(
        "sv_expansion_bound: subspaces are not complementary in dimension");
  Mat stacked(d, d);
  stacked.topRows(v_minus.dim()) = v_minus.basis();
  stacked.bottomRows(e_plus.dim()) = e_plus.basis();
  Eigen::JacobiSVD<Mat> svd(stacked);
  if (svd.singularValues()(d - 1) < 1e-8)
    throw std::invalid_argument(
        "sv_expansion_bound: subspaces are not transverse");
  // Invariance via the projection residual of the image, which resolves
  // to machine precision (the Grassmann angle bottoms out near 1.5e-8).
  const auto invariance_residual = [&](const ProjSubspace& v) {
    const Mat img = g.mat() * v.basis().transpose();
    const Mat off = img - v.basis().transpose() * (v.basis() * img);
    return off.norm() / img.norm();
  };
  if (invariance_residual(v_minus) > 1e-8 || invariance_residual(e_plus) > 1e-8)
    throw std::invalid_argument(
        "sv_expansion_bound: subspaces are not invariant under the map");
  const auto [norm_minus, conorm_minus] =
      norm_conorm_on_subspace(g.mat(), v_minus);
  const auto [norm_plus, conorm_plus] = norm_conorm_on_subspace(g.mat(), e_plus);
  (void)conorm_minus;
  (void)norm_plus;
  return conorm_plus / norm_minus;
}

std::optional<ExpansionCertificate> find_expanding_element(
    const MatrixGroup& group, const ConvexDomain& dom,
    const FaceDescriptor& face, double c, double r, int max_word_len,
    const Config& cfg) {
  const OrbitCloud cloud = orbit(group, dom, {dom.center()}, max_word_len, cfg);
  return search_expanding(cloud, face, c, r, cfg);
}

UniformExpansionReport check_uniform_expansion_at_faces(
    const MatrixGroup& group, const ConvexDomain& dom,
    const std::vector<FaceDescriptor>& faces, double c, double r,
    int max_word_len, const Config& cfg) {
  const OrbitCloud cloud = orbit(group, dom, {dom.center()}, max_word_len, cfg);
  UniformExpansionReport report;
  report.all_pass = true;
  report.certificates.reserve(faces.size());
  for (const FaceDescriptor& face : faces) {
    auto cert = search_expanding(cloud, face, c, r, cfg);
    if (!cert) report.all_pass = false;
    report.certificates.push_back(std::move(cert));
  }
  return report;
}

double covering_radius(const std::vector<ProjPoint>& core_sample,
                       const OrbitCloud& cloud, const ConvexDomain& dom,
                       const Config& cfg) {
  if (cloud.entries.empty())
    throw std::invalid_argument("covering_radius: empty orbit");
  double radius = 0.0;
  for (const ProjPoint& x : core_sample) {
    if (contains(dom, x, cfg) != Location::Interior)
      throw std::invalid_argument(
          "covering_radius: core sample point is not interior");
    double best = std::numeric_limits<double>::infinity();
    for (const OrbitEntry& entry : cloud.entries)
      for (const ProjPoint& p : entry.points)
        best = std::min(best, hilbert_distance(dom, x, p, cfg));
    radius = std::max(radius, best);
  }
  return radius;
}

// ---------------------------------------------------------------------------
// Pseudo-loxodromic sequences

double splitting_residual(const PseudoLoxSequence& seq) {
  const int d = seq.v_minus.ambient();
  const int km = seq.v_minus.dim();
  const int k0 = seq.h0 ? seq.h0->dim() : 0;
  const int kp = seq.v_plus.dim();
  if (km + k0 + kp != d)
    throw std::invalid_argument("splitting_residual: blocks do not fill R^d");
  Mat frame(d, d);
  frame.leftCols(km) = seq.v_minus.basis().transpose();
  if (k0 > 0) frame.middleCols(km, k0) = seq.h0->basis().transpose();
  frame.rightCols(kp) = seq.v_plus.basis().transpose();
  const Mat frame_inv = frame.inverse();
  const int starts[3] = {0, km, km + k0};
  const int sizes[3] = {km, k0, kp};
  double worst = 0.0;
  for (const ProjectiveMap& g : seq.maps) {
    Mat c = frame_inv * g.mat() * frame;
    for (int bi = 0; bi < 3; ++bi)
      if (sizes[bi] > 0)
        c.block(starts[bi], starts[bi], sizes[bi], sizes[bi]).setZero();
    worst = std::max(worst, c.norm());
  }
  return worst;
}

namespace {

// Shared core for the codim-1 and general constructions: builds the
// scaling maps in a frame whose `axis` column is the x_plus direction,
// solving lambda_n from the line coordinates of x_n and x_target (or
// generating x_n from the geometric schedule when none are given).
struct ScalingFamily {
  std::vector<double> lambdas;
  std::vector<ProjPoint> points;
  std::vector<Mat> scalings;  // in ambient coordinates
};

ScalingFamily build_scalings(const ConvexDomain& dom, const Mat& s,
                             const Mat& sinv, int axis, int vm_start,
                             int vm_len, std::vector<ProjPoint> x_n,
                             const ProjPoint& x_target, const Config& cfg) {
  const int d = dom.ambient();
  if (contains(dom, x_target, cfg) != Location::Interior)
    throw std::invalid_argument("pseudolox: x_target must be interior");
  Vec ct = sinv * x_target.rep();
  if (ct(axis) < 0) ct = -ct;
  Vec wt = ct.segment(vm_start, vm_len);
  if (wt.norm() < 1e-12)
    throw std::invalid_argument("pseudolox: x_target must differ from x_plus");
  const Vec wdir = wt / wt.norm();
  const LineCoords target =
      line_coords(sinv, x_target.rep(), axis, vm_start, vm_len, wdir,
                  "pseudolox target");

  ScalingFamily fam;
  if (x_n.empty()) {
    // Geometric schedule: lambda_n = 2^n, points pulled back from the
    // target along the line.
    for (int n = 1; n <= 12; ++n) {
      const double lam = std::ldexp(1.0, n);
      Vec dn = Vec::Ones(d);
      dn(axis) = 1.0 / lam;
      x_n.emplace_back(s * dn.asDiagonal() * sinv * x_target.rep());
    }
  }
  for (const ProjPoint& xn : x_n) {
    if (contains(dom, xn, cfg) != Location::Interior)
      throw std::invalid_argument("pseudolox: x_n must be interior points");
    const LineCoords cn =
        line_coords(sinv, xn.rep(), axis, vm_start, vm_len, wdir, "pseudolox");
    const double lam = (target.a / target.b) * (cn.b / cn.a);
    if (!(lam > 0) || !std::isfinite(lam))
      throw std::invalid_argument("pseudolox: degenerate scaling factor");
    Vec dn = Vec::Ones(d);
    dn(axis) = lam;
    fam.lambdas.push_back(lam);
    fam.scalings.push_back(s * dn.asDiagonal() * sinv);
  }
  fam.points = std::move(x_n);
  return fam;
}

}  // namespace

PseudoLoxSequence make_codim1_pseudolox(const ConvexDomain& dom,
                                        const FaceDescriptor& f_minus,
                                        const ProjPoint& x_plus,
                                        std::vector<ProjPoint> x_n,
                                        const ProjPoint& x_target,
                                        const Config& cfg) {
  const int d = dom.ambient();
  if (f_minus.dim != d - 2)
    throw std::invalid_argument(
        "make_codim1_pseudolox: the face must have codimension one");
  const ProjSubspace& v_minus = f_minus.support;
  if (v_minus.contains(x_plus, 1e-8))
    throw std::invalid_argument(
        "make_codim1_pseudolox: x_plus lies in the face hyperplane");
  if (contains(dom, x_plus, cfg) != Location::Boundary)
    throw std::invalid_argument(
        "make_codim1_pseudolox: x_plus must be a boundary point");

  Mat s(d, d);
  s.col(0) = x_plus.rep();
  s.rightCols(d - 1) = v_minus.basis().transpose();
  const Mat sinv = s.inverse();
  ScalingFamily fam =
      build_scalings(dom, s, sinv, 0, 1, d - 1, std::move(x_n), x_target, cfg);

  std::vector<ProjectiveMap> maps;
  maps.reserve(fam.scalings.size());
  for (const Mat& m : fam.scalings) maps.emplace_back(m);

  PointedDomain reference(dom.transformed(maps.back()), x_target);
  const double k_radius =
      measure_k_radius(dom, maps, reference.domain, cfg);
  return PseudoLoxSequence{ProjSubspace::from_point(x_plus),
                           v_minus,
                           std::nullopt,
                           std::move(maps),
                           std::move(fam.lambdas),
                           std::move(reference),
                           k_radius};
}

std::optional<ProjSubspace> projection_subspace(
    const ConvexDomain& dom, const ProjPoint& x_minus, const ProjPoint& x_plus,
    const ProjSubspace& h_plus, const ProjSubspace& h_minus,
    const Config& cfg) {
  const int d = dom.ambient();
  if (h_plus.dim() != d - 1 || h_minus.dim() != d - 1)
    throw std::invalid_argument(
        "projection_subspace: supporting subspaces must be hyperplanes");
  if (!h_plus.contains(x_plus, 1e-8))
    throw std::invalid_argument("projection_subspace: H+ must pass through x+");
  if (subspace_meets_domain(dom, h_plus) || subspace_meets_domain(dom, h_minus))
    throw std::invalid_argument(
        "projection_subspace: supporting hyperplanes meet the open domain");

  const FaceDescriptor f_minus = face_of(dom, x_minus, cfg);
  const ProjSubspace& v_minus = f_minus.support;
  const int km = v_minus.dim();
  if ((v_minus.basis() -
       v_minus.basis() * h_minus.basis().transpose() * h_minus.basis())
          .norm() > 1e-7)
    throw std::invalid_argument(
        "projection_subspace: H- does not contain the face span");

  // The open segment between the anchors must lie in the domain.
  {
    const Chart& ch = dom.chart();
    const Vec y1 = ch.to_chart(x_minus);
    const Vec y2 = ch.to_chart(x_plus);
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9})
      if (contains(dom, ch.from_chart((1 - t) * y1 + t * y2), cfg) !=
          Location::Interior)
        throw std::invalid_argument(
            "projection_subspace: the segment (x-, x+) leaves the domain");
  }

  const int k0 = d - 1 - km;
  if (k0 == 0) return std::nullopt;

  // Candidates live in H+ cap H-.
  Mat normals(2, d);
  normals.row(0) = h_plus.complement().basis();
  normals.row(1) = h_minus.complement().basis();
  const Mat inter = null_space_rows(normals, 1e-10);
  if (inter.rows() < k0)
    throw std::invalid_argument(
        "projection_subspace: H+ and H- are in degenerate position");

  // Base candidate: the part of the intersection orthogonal to V-.
  const Mat overlap = v_minus.basis() * inter.transpose();  // km x rows(inter)
  Mat base = null_space_rows(overlap, 1e-10);
  if (base.rows() < k0)
    base = Mat::Identity(static_cast<int>(inter.rows()),
                         static_cast<int>(inter.rows()))
               .topRows(k0);
  base = base.topRows(k0);

  const ProjSubspace w(
      [&] {
        Mat rows(km + 1, d);
        rows.topRows(km) = v_minus.basis();
        rows.row(km) = x_plus.rep().transpose();
        return rows;
      }());

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int budget = 64;
  for (int attempt = 0; attempt < budget; ++attempt) {
    Mat coords = base;
    if (attempt > 0) {
      Mat noise(k0, inter.rows());
      for (int i = 0; i < noise.rows(); ++i)
        for (int j = 0; j < noise.cols(); ++j) noise(i, j) = gauss(rng);
      coords += 0.05 * attempt * noise;
    }
    Mat rows = coords * inter;
    Eigen::JacobiSVD<Mat> rank_check(rows);
    if (rank_check.singularValues()(k0 - 1) < 1e-8) continue;
    const ProjSubspace h0(rows);

    // Transverse to V- inside H-.
    Mat stacked(km + k0, d);
    stacked.topRows(km) = v_minus.basis();
    stacked.bottomRows(k0) = h0.basis();
    Eigen::JacobiSVD<Mat> svd(stacked);
    if (svd.singularValues()(km + k0 - 1) < 1e-8) continue;
    if (subspace_meets_closure(dom, h0)) continue;
    try {
      const DirectSumSplit split(w, h0);
      const ProjectResult res = project(dom, split);
      if (!res.properly_convex) continue;
    } catch (const std::exception&) {
      continue;
    }
    return h0;
  }
  std::ostringstream msg;
  msg << "projection_subspace: no valid neutral subspace in " << budget
      << " seeded attempts (seed " << cfg.seed << ")";
  throw std::runtime_error(msg.str());
}

PseudoLoxSequence make_general_pseudolox(const ConvexDomain& dom,
                                         const FaceDescriptor& f_minus,
                                         const ProjPoint& x_plus,
                                         std::vector<ProjPoint> x_n,
                                         const ProjPoint& x_target,
                                         const Config& cfg) {
  const int d = dom.ambient();
  if (f_minus.dim == d - 2)
    return make_codim1_pseudolox(dom, f_minus, x_plus, std::move(x_n), x_target,
                                 cfg);
  const ProjSubspace& v_minus = f_minus.support;
  const int km = v_minus.dim();
  if (v_minus.contains(x_plus, 1e-8))
    throw std::invalid_argument(
        "make_general_pseudolox: x_plus lies in the face span");
  if (contains(dom, x_plus, cfg) != Location::Boundary)
    throw std::invalid_argument(
        "make_general_pseudolox: x_plus must be a boundary point");
  if (contains(dom, x_target, cfg) != Location::Interior)
    throw std::invalid_argument(
        "make_general_pseudolox: x_target must be interior");

  // The line through x+ and the target exits the domain inside the face.
  const ProjPoint x_minus = chord(dom, x_target, x_plus, cfg).backward;
  if (!v_minus.contains(x_minus, 1e-6))
    throw std::invalid_argument(
        "make_general_pseudolox: the ray from x_plus through x_target does "
        "not land in the given face");

  const Covec f_plus = supporting_functionals_at(dom, x_plus, cfg).canonical;
  const Covec f_min = supporting_functionals_at(dom, x_minus, cfg).canonical;
  const ProjSubspace h_plus(null_space_rows(f_plus));
  const ProjSubspace h_min(null_space_rows(f_min));

  const std::optional<ProjSubspace> h0 =
      projection_subspace(dom, x_minus, x_plus, h_plus, h_min, cfg);
  if (!h0)
    return make_codim1_pseudolox(dom, f_minus, x_plus, std::move(x_n), x_target,
                                 cfg);
  const int k0 = h0->dim();

  // Orthonormal frame for W = V- + x+, with the x+ direction last.
  Vec xp = x_plus.rep();
  xp -= v_minus.basis().transpose() * (v_minus.basis() * xp);
  if (xp.norm() < 1e-10)
    throw std::invalid_argument("make_general_pseudolox: degenerate frame");
  xp.normalize();
  Mat wbasis(km + 1, d);
  wbasis.topRows(km) = v_minus.basis();
  wbasis.row(km) = xp.transpose();
  const ProjSubspace w(wbasis);

  Mat s(d, d);
  s.leftCols(km + 1) = wbasis.transpose();
  s.rightCols(k0) = h0->basis().transpose();
  // Put the x+ direction itself on its axis so the scalings fix [x+].
  s.col(km) = x_plus.rep();
  const Mat sinv = s.inverse();
  ScalingFamily fam =
      build_scalings(dom, s, sinv, km, 0, km, std::move(x_n), x_target, cfg);

  const DirectSumSplit split(w, *h0);
  std::vector<ProjectiveMap> maps;
  maps.reserve(fam.scalings.size());
  for (const Mat& m : fam.scalings) {
    const ProjectiveMap sn(m);
    const PointedDomain pn(dom.transformed(sn), x_target);
    const ProjectiveMap hn =
        relative_benzecri_normalize(pn, split, nullptr, 1.0, cfg);
    maps.push_back(hn * sn);
  }

  PointedDomain reference(dom.transformed(maps.back()), x_target);
  const double k_radius = measure_k_radius(dom, maps, reference.domain, cfg);
  return PseudoLoxSequence{ProjSubspace::from_point(x_plus),
                           v_minus,
                           h0,
                           std::move(maps),
                           std::move(fam.lambdas),
                           std::move(reference),
                           k_radius};
}

KgDecomposition decompose_kg(const std::vector<ProjectiveMap>& gammas,
                             const PseudoLoxSequence& pseudolox) {
  if (gammas.size() != pseudolox.maps.size())
    throw std::invalid_argument(
        "decompose_kg: sequence lengths do not match");
  KgDecomposition out;
  out.k.reserve(gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    ProjectiveMap k = gammas[i] * pseudolox.maps[i].inverse();
    const double n1 = Eigen::JacobiSVD<Mat>(k.mat()).singularValues()(0);
    const double n2 =
        Eigen::JacobiSVD<Mat>(k.inverse().mat()).singularValues()(0);
    out.max_norm = std::max({out.max_norm, n1, n2});
    out.k.push_back(std::move(k));
  }
  return out;
}

}  // namespace cvx
