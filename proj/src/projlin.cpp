#include "cvxproj/projlin.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace cvx {

namespace {

// Deterministic sign rule: first entry with |x| > 1e-12 made positive.
void normalize_sign(Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

void normalize_sign(Mat& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double x = m.reshaped()(i);
    if (std::abs(x) > 1e-12) {
      if (x < 0) m = -m;
      return;
    }
  }
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

ProjPoint::ProjPoint(const Vec& lift) : rep_(lift) {
  double n = rep_.norm();
  if (!(n > 1e-14)) throw std::invalid_argument("ProjPoint: zero lift");
  rep_ /= n;
  normalize_sign(rep_);
}

bool ProjPoint::approx_equal(const ProjPoint& other, double tol) const {
  if (other.ambient() != ambient())
    throw std::invalid_argument("ProjPoint: dimension mismatch");
  return std::abs(std::abs(rep_.dot(other.rep_)) - 1.0) < tol;
}

Mat orthonormalize_rows(const Mat& rows) {
  Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  double thresh = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  if (rank < rows.rows())
    throw std::invalid_argument("orthonormalize_rows: rank deficient input");
  Mat b = svd.matrixV().leftCols(rank).transpose();
  normalize_sign(b);
  return b;
}

Mat null_space_rows(const Mat& m, double tol) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double thresh = tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  Mat null_basis =
      svd.matrixV().rightCols(m.cols() - rank).transpose();
  normalize_sign(null_basis);
  return null_basis;
}

ProjSubspace::ProjSubspace(const Mat& spanning_rows)
    : basis_(orthonormalize_rows(spanning_rows)) {
  if (basis_.rows() < 1 || basis_.rows() > basis_.cols() - 1)
    throw std::invalid_argument("ProjSubspace: dimension out of range");
}

ProjSubspace ProjSubspace::from_point(const ProjPoint& p) {
  return ProjSubspace(p.rep().transpose());
}

bool ProjSubspace::contains(const ProjPoint& p, double tol) const {
  if (p.ambient() != ambient())
    throw std::invalid_argument("ProjSubspace: dimension mismatch");
  return (basis_ * p.rep()).norm() > 1.0 - tol;
}

ProjSubspace ProjSubspace::complement() const {
  return ProjSubspace(null_space_rows(basis_), true);
}

ProjectiveMap::ProjectiveMap(const Mat& mat, std::string label)
    : mat_(mat), label_(std::move(label)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 2)
    throw std::invalid_argument("ProjectiveMap: need square matrix, d >= 2");
  int d = static_cast<int>(mat_.rows());
  const double scale = mat_.norm();
  if (!(scale > 1e-300) || !std::isfinite(scale))
    throw std::invalid_argument("ProjectiveMap: singular matrix");
  Mat b = mat_ / scale;
  const double mag = std::abs(Eigen::FullPivLU<Mat>(b).determinant());
  if (std::isfinite(mag) && mag > 1e-13) {
    mat_ = b / std::pow(mag, 1.0 / d);
  } else {
    // The determinant of the scaled matrix is below the double-precision
    // noise floor (either singular input or a very ill conditioned
    // element, e.g. a deep word in a hyperbolic group). The two cases
    // cannot be told apart numerically; fall back to the
    // Frobenius-normalized representative, which supports the same
    // projective action on generic points. Singular input surfaces
    // downstream (inverse() yields non-finite entries and throws).
    mat_ = b * std::sqrt(static_cast<double>(d));
  }
  normalize_sign(mat_);
}

ProjectiveMap ProjectiveMap::identity(int d) {
  return ProjectiveMap(Mat::Identity(d, d));
}

ProjectiveMap ProjectiveMap::inverse() const {
  std::string lbl = label_.empty() ? "" : label_ + "^-1";
  return ProjectiveMap(mat_.inverse(), std::move(lbl));
}

ProjectiveMap ProjectiveMap::operator*(const ProjectiveMap& rhs) const {
  return ProjectiveMap(mat_ * rhs.mat_, label_ + rhs.label_);
}

ProjPoint ProjectiveMap::apply(const ProjPoint& p) const {
  return ProjPoint(mat_ * p.rep());
}

ProjSubspace ProjectiveMap::apply(const ProjSubspace& s) const {
  return ProjSubspace(s.basis() * mat_.transpose());
}

double ProjectiveMap::distance_to(const ProjectiveMap& other) const {
  return std::min((mat_ - other.mat_).norm(), (mat_ + other.mat_).norm());
}

double angle_distance(const ProjPoint& p, const ProjPoint& q) {
  if (p.ambient() != q.ambient())
    throw std::invalid_argument("angle_distance: dimension mismatch");
  return std::acos(clamp_unit(std::abs(p.rep().dot(q.rep()))));
}

double grassmann_distance(const ProjSubspace& v, const ProjSubspace& w) {
  if (v.ambient() != w.ambient() || v.dim() != w.dim())
    throw std::invalid_argument("grassmann_distance: dimension mismatch");
  Mat overlap = v.basis() * w.basis().transpose();
  Eigen::JacobiSVD<Mat> svd(overlap);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  return std::acos(clamp_unit(smin));
}

double point_to_subspace_distance(const ProjPoint& x, const ProjSubspace& w) {
  if (x.ambient() != w.ambient())
    throw std::invalid_argument("point_to_subspace_distance: dimension mismatch");
  return std::acos(clamp_unit((w.basis() * x.rep()).norm()));
}

double cross_ratio(const ProjPoint& a, const ProjPoint& b, const ProjPoint& c,
                   const ProjPoint& d) {
  int n = a.ambient();
  if (b.ambient() != n || c.ambient() != n || d.ambient() != n)
    throw std::invalid_argument("cross_ratio: dimension mismatch");
  Mat stacked(4, n);
  stacked.row(0) = a.rep();
  stacked.row(1) = b.rep();
  stacked.row(2) = c.rep();
  stacked.row(3) = d.rep();
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() > 2 && sv(2) > 1e-9 * sv(0))
    throw std::invalid_argument("cross_ratio: points not collinear");
  // Coordinates on the common line; chart factors cancel in the ratio.
  Mat coords = stacked * svd.matrixV().leftCols(2);
  auto det2 = [&](int i, int j) {
    return coords(i, 0) * coords(j, 1) - coords(i, 1) * coords(j, 0);
  };
  double num = std::abs(det2(0, 2) * det2(1, 3));  // |c-a| |d-b|
  double den = std::abs(det2(0, 1) * det2(2, 3));  // |b-a| |d-c|
  if (den < 1e-300) {
    if (num < 1e-300)
      throw std::invalid_argument("cross_ratio: degenerate configuration");
    return std::numeric_limits<double>::infinity();
  }
  return num / den;
}

ProjSubspace nearest_containing_subspace(const ProjPoint& x,
                                         const ProjSubspace& w) {
  if (x.ambient() != w.ambient())
    throw std::invalid_argument("nearest_containing_subspace: dimension mismatch");
  int k = w.dim();
  int d = w.ambient();
  Vec coords = w.basis() * x.rep();  // coordinates of the projection in W
  double cosang = coords.norm();
  if (cosang > 1.0 - 1e-12) return w;  // x already in W
  Mat result(k, d);
  if (cosang < 1e-12) {
    // x is orthogonal to W: any k-subspace through x attains the
    // diameter pi/2; drop the last basis row.
    result.topRows(k - 1) = w.basis().topRows(k - 1);
  } else {
    // W' = x^perp intersect W, in W-coordinates the complement of the
    // projection direction.
    Mat wprime_coords = null_space_rows(coords.transpose() / cosang);
    result.topRows(k - 1) = wprime_coords * w.basis();
  }
  result.row(k - 1) = x.rep();
  return ProjSubspace(result);
}

CartanVector cartan_projection(const ProjectiveMap& m) {
  Eigen::JacobiSVD<Mat> svd(m.mat());
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-300)
    throw std::invalid_argument("cartan_projection: numerically singular");
  Vec mu(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) mu(i) = std::log(sv(i));
  // Recenter to sum zero: the Cartan vector of PGL is defined up to a
  // common shift, and this makes the result independent of the scale of
  // the stored representative.
  mu.array() -= mu.mean();
  return CartanVector{mu};
}

std::pair<double, double> norm_conorm_on_subspace(const Mat& lift,
                                                  const ProjSubspace& v) {
  Mat restricted = lift * v.basis().transpose();  // d x k, orthonormal domain
  Eigen::JacobiSVD<Mat> svd(restricted);
  const auto& sv = svd.singularValues();
  return {sv(0), sv(sv.size() - 1)};
}

DivergentSplit attracting_repelling_subspaces(
    std::span<const ProjectiveMap> seq, double gap_floor) {
  if (seq.empty())
    throw std::invalid_argument("attracting_repelling_subspaces: empty sequence");
  const ProjectiveMap& last = seq.back();
  int d = last.ambient();
  Eigen::JacobiSVD<Mat> svd(last.mat(),
                            Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double total_gap = std::log(sv(0)) - std::log(sv(d - 1));
  if (!(total_gap > gap_floor))
    throw NotDivergentError("sequence not divergent: total gap " +
                            std::to_string(total_gap));
  double best = -1.0;
  for (int i = 0; i < d - 1; ++i)
    best = std::max(best, std::log(sv(i)) - std::log(sv(i + 1)));
  int p = 0;
  for (int i = 0; i < d - 1; ++i) {
    double g = std::log(sv(i)) - std::log(sv(i + 1));
    if (g >= best - 1e-9 * std::max(1.0, best)) {
      p = i + 1;
      break;
    }
  }
  ProjSubspace eplus(svd.matrixU().leftCols(p).transpose());
  ProjSubspace eminus(svd.matrixV().rightCols(d - p).transpose());
  return DivergentSplit{eplus, eminus, p};
}

}  // namespace cvx
