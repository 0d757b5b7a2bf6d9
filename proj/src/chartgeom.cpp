#include "cvxproj/chartgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cvx {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double point_scale(const std::vector<Vec>& pts) {
  double s = 1e-12;
  for (const auto& p : pts) s = std::max(s, p.lpNorm<Eigen::Infinity>());
  return s;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double simplex_volume(const std::vector<Vec>& pts,
                      const std::vector<int>& simplex) {
  int m = static_cast<int>(pts[0].size());
  Mat edges(m, m);
  for (int i = 1; i <= m; ++i)
    edges.col(i - 1) = pts[simplex[i]] - pts[simplex[0]];
  return std::abs(edges.determinant()) / factorial(m);
}

}  // namespace

std::vector<ChartFacet> hull_facets(const std::vector<Vec>& pts) {
  int m = static_cast<int>(pts[0].size());
  int n = static_cast<int>(pts.size());
  double scale = point_scale(pts);
  double tol = 1e-9 * std::max(1.0, scale);

  std::vector<ChartFacet> facets;
  auto push_unique = [&](Vec n_, double c_) {
    for (const auto& f : facets)
      if ((f.normal - n_).norm() < 1e-7 &&
          std::abs(f.offset - c_) < 1e-7 * std::max(1.0, scale))
        return;
    facets.push_back({std::move(n_), c_});
  };

  if (m == 1) {
    double lo = kInf, hi = -kInf;
    for (const auto& p : pts) {
      lo = std::min(lo, p(0));
      hi = std::max(hi, p(0));
    }
    if (hi - lo < tol)
      throw std::invalid_argument("hull_facets: degenerate interval");
    push_unique(Vec::Ones(1), hi);
    push_unique(-Vec::Ones(1), -lo);
    return facets;
  }
  if (n < m + 1) throw std::invalid_argument("hull_facets: too few points");

  std::vector<int> comb(m);
  std::iota(comb.begin(), comb.end(), 0);
  auto advance = [&]() {
    int i = m - 1;
    while (i >= 0 && comb[i] == n - m + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < m; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };

  do {
    Mat diffs(m - 1, m);
    for (int j = 1; j < m; ++j)
      diffs.row(j - 1) = (pts[comb[j]] - pts[comb[0]]).transpose();
    Mat null_basis = null_space_rows(diffs, 1e-9);
    if (null_basis.rows() != 1) continue;  // affinely degenerate subset
    Vec normal = null_basis.row(0).transpose();
    double c = normal.dot(pts[comb[0]]);
    bool below = true, above = true;
    for (const auto& p : pts) {
      double v = normal.dot(p);
      if (v > c + tol) below = false;
      if (v < c - tol) above = false;
      if (!below && !above) break;
    }
    if (below)
      push_unique(normal, c);
    else if (above)
      push_unique(-normal, -c);
  } while (advance());

  if (facets.empty())
    throw std::invalid_argument("hull_facets: no facets (degenerate point set)");
  return facets;
}

std::vector<int> extreme_point_indices(const std::vector<Vec>& pts,
                                       const std::vector<ChartFacet>& facets) {
  int m = static_cast<int>(pts[0].size());
  double tol = 1e-7 * std::max(1.0, point_scale(pts));
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    std::vector<Vec> sat;
    for (const auto& f : facets)
      if (std::abs(f.normal.dot(pts[i]) - f.offset) < tol)
        sat.push_back(f.normal);
    if (static_cast<int>(sat.size()) < m) continue;
    Mat stacked(sat.size(), m);
    for (size_t k = 0; k < sat.size(); ++k) stacked.row(k) = sat[k].transpose();
    Eigen::JacobiSVD<Mat> svd(stacked);
    if (svd.singularValues()(m - 1) > 1e-7) out.push_back(i);
  }
  return out;
}

Vec min_norm_in_hull(const Mat& rows) {
  // Wolfe's min-norm-point algorithm: finite and exact up to roundoff,
  // which matters when 0 sits on the hull boundary (a first-order
  // iteration would approach it only at rate O(1/iters)).
  const int n = static_cast<int>(rows.cols());
  const int m = static_cast<int>(rows.rows());
  const double scale = std::max(1.0, rows.norm());
  const double tol = 1e-12 * scale * scale;

  // Min-norm point of the affine hull of the corral, with barycentric
  // coordinates, via the KKT system [S S^T, 1; 1^T, 0].
  auto affine_min = [&](const std::vector<int>& corral, Vec& lambda) {
    const int k = static_cast<int>(corral.size());
    Mat kkt = Mat::Zero(k + 1, k + 1);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        kkt(i, j) = rows.row(corral[i]).dot(rows.row(corral[j]));
    kkt.row(k).head(k).setOnes();
    kkt.col(k).head(k).setOnes();
    Vec rhs = Vec::Zero(k + 1);
    rhs(k) = 1.0;
    Vec sol = kkt.fullPivLu().solve(rhs);
    lambda = sol.head(k);
  };
  auto combine = [&](const std::vector<int>& corral, const Vec& lambda) {
    Vec w = Vec::Zero(n);
    for (size_t i = 0; i < corral.size(); ++i)
      w += lambda(static_cast<int>(i)) * rows.row(corral[i]).transpose();
    return w;
  };

  std::vector<int> corral;
  Eigen::Index first = 0;
  rows.rowwise().squaredNorm().minCoeff(&first);
  corral.push_back(static_cast<int>(first));
  Vec lambda = Vec::Ones(1);
  Vec w = rows.row(first).transpose();

  for (int major = 0; major < 16 * (m + n); ++major) {
    // optimality: no vertex strictly below the supporting level of w
    Eigen::Index best = 0;
    const double drop = (rows * w).minCoeff(&best);
    if (drop >= w.squaredNorm() - tol) break;
    if (std::find(corral.begin(), corral.end(), static_cast<int>(best)) !=
        corral.end())
      break;  // numerically stuck; w is as good as it gets
    corral.push_back(static_cast<int>(best));

    for (int minor = 0; minor <= m; ++minor) {
      Vec cand;
      affine_min(corral, cand);
      if (cand.minCoeff() > 1e-12) {
        lambda = cand;
        break;
      }
      // step from lambda toward cand until a coordinate hits zero
      Vec old = Vec::Zero(cand.size());
      old.head(lambda.size()) = lambda;
      double theta = 1.0;
      for (int i = 0; i < cand.size(); ++i)
        if (cand(i) < old(i))
          theta = std::min(theta, old(i) / (old(i) - cand(i)));
      Vec mixed = old + theta * (cand - old);
      std::vector<int> kept;
      std::vector<double> kept_l;
      for (int i = 0; i < mixed.size(); ++i)
        if (mixed(i) > 1e-12) {
          kept.push_back(corral[i]);
          kept_l.push_back(mixed(i));
        }
      if (kept.empty()) {
        kept.push_back(corral[0]);
        kept_l.push_back(1.0);
      }
      corral = std::move(kept);
      lambda = Eigen::Map<Vec>(kept_l.data(), kept_l.size());
      lambda /= lambda.sum();
      if (static_cast<int>(corral.size()) <= 1) break;
    }
    w = combine(corral, lambda);
  }
  return w;
}

std::vector<std::vector<int>> triangulate_hull(const std::vector<Vec>& pts) {
  int m = static_cast<int>(pts[0].size());
  if (m == 1) {
    int lo = 0, hi = 0;
    for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
      if (pts[i](0) < pts[lo](0)) lo = i;
      if (pts[i](0) > pts[hi](0)) hi = i;
    }
    return {{lo, hi}};
  }
  auto facets = hull_facets(pts);
  auto extremes = extreme_point_indices(pts, facets);
  if (extremes.empty())
    throw std::invalid_argument("triangulate_hull: degenerate point set");
  int apex = extremes.front();
  double tol = 1e-7 * std::max(1.0, point_scale(pts));

  std::vector<std::vector<int>> out;
  for (const auto& f : facets) {
    if (std::abs(f.normal.dot(pts[apex]) - f.offset) < tol) continue;
    // vertices of this facet
    std::vector<int> fverts;
    for (int i : extremes)
      if (std::abs(f.normal.dot(pts[i]) - f.offset) < tol) fverts.push_back(i);
    if (static_cast<int>(fverts.size()) < m) continue;
    // local coordinates inside the facet hyperplane
    Mat tang = null_space_rows(f.normal.transpose());  // (m-1) x m
    std::vector<Vec> local;
    local.reserve(fverts.size());
    for (int i : fverts) local.push_back(tang * (pts[i] - pts[fverts[0]]));
    auto sub = triangulate_hull(local);
    for (const auto& s : sub) {
      std::vector<int> simplex;
      simplex.push_back(apex);
      for (int li : s) simplex.push_back(fverts[li]);
      out.push_back(std::move(simplex));
    }
  }
  if (out.empty())
    throw std::invalid_argument("triangulate_hull: empty triangulation");
  return out;
}

ChartMoments chart_moments(const std::vector<Vec>& pts,
                           const std::vector<std::vector<int>>& simplices) {
  int m = static_cast<int>(pts[0].size());
  ChartMoments acc;
  acc.first = Vec::Zero(m);
  acc.second = Mat::Zero(m, m);
  for (const auto& s : simplices) {
    double vol = simplex_volume(pts, s);
    if (vol < 1e-300) continue;
    Vec sum = Vec::Zero(m);
    Mat sq = Mat::Zero(m, m);
    for (int idx : s) {
      sum += pts[idx];
      sq += pts[idx] * pts[idx].transpose();
    }
    acc.volume += vol;
    acc.first += vol * sum / (m + 1);
    acc.second += vol / double((m + 1) * (m + 2)) *
                  (sq + sum * sum.transpose());
  }
  return acc;
}

Mat contracted_fourth_moment(const std::vector<Vec>& pts,
                             const std::vector<std::vector<int>>& simplices,
                             const Vec& center) {
  int m = static_cast<int>(pts[0].size());
  Mat acc = Mat::Zero(m, m);
  for (const auto& s : simplices) {
    double vol = simplex_volume(pts, s);
    if (vol < 1e-300) continue;
    int nv = static_cast<int>(s.size());
    std::vector<Vec> v(nv);
    for (int i = 0; i < nv; ++i) v[i] = pts[s[i]] - center;
    // integral of lambda_p lambda_q lambda_r lambda_s over the simplex:
    // vol * m! * prod(mult!) / (m+4)!
    double base = vol * factorial(m) / factorial(m + 4);
    for (int p = 0; p < nv; ++p)
      for (int q = 0; q < nv; ++q)
        for (int r = 0; r < nv; ++r)
          for (int t = 0; t < nv; ++t) {
            int mult[4] = {p, q, r, t};
            std::sort(mult, mult + 4);
            double w = base;
            int run = 1;
            for (int i = 1; i < 4; ++i) {
              if (mult[i] == mult[i - 1]) {
                ++run;
                w *= run;  // accumulates prod of factorials
              } else {
                run = 1;
              }
            }
            acc += w * (v[r].dot(v[t])) * (v[p] * v[q].transpose());
          }
  }
  return acc;
}

double third_moment_along(const std::vector<Vec>& pts,
                          const std::vector<std::vector<int>>& simplices,
                          const Vec& center, const Vec& u) {
  int m = static_cast<int>(pts[0].size());
  double acc = 0.0;
  for (const auto& s : simplices) {
    double vol = simplex_volume(pts, s);
    if (vol < 1e-300) continue;
    int nv = static_cast<int>(s.size());
    std::vector<double> dots(nv);
    for (int i = 0; i < nv; ++i) dots[i] = u.dot(pts[s[i]] - center);
    double base = vol * factorial(m) / factorial(m + 3);
    for (int p = 0; p < nv; ++p)
      for (int q = 0; q < nv; ++q)
        for (int r = 0; r < nv; ++r) {
          int mult[3] = {p, q, r};
          std::sort(mult, mult + 3);
          double w = base;
          int run = 1;
          for (int i = 1; i < 3; ++i) {
            if (mult[i] == mult[i - 1]) {
              ++run;
              w *= run;
            } else {
              run = 1;
            }
          }
          acc += w * dots[p] * dots[q] * dots[r];
        }
  }
  return acc;
}

}  // namespace cvx
