#include "cvxproj/groupdyn.hpp"

#include "cvxproj/domspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace cvx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Margin of the best representative of [v] relative to the closed cone:
// positive inside, ~0 on the boundary, negative outside.
double cone_margin(const ConvexDomain& dom, const Vec& v_in) {
  Vec v = v_in / v_in.norm();
  if (dom.is_polytope()) {
    Vec m = dom.polytope().facet_functionals * v;
    return std::max(m.minCoeff(), (-m).minCoeff());
  }
  return -v.dot(dom.ellipsoid_rep().form * v);
}

// Largest cone margin over sampled directions of a subspace.
double subspace_support_margin(const ConvexDomain& dom, const ProjSubspace& e,
                               std::uint64_t seed) {
  double best = -kInf;
  const Mat& b = e.basis();
  for (int i = 0; i < e.dim(); ++i)
    best = std::max(best, cone_margin(dom, Vec(b.row(i).transpose())));
  if (e.dim() > 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < 512; ++i) {
      Vec t(e.dim());
      for (int j = 0; j < e.dim(); ++j) t(j) = gauss(rng);
      if (t.norm() < 1e-12) continue;
      best = std::max(best, cone_margin(dom, Vec(b.transpose() * t)));
    }
  }
  return best;
}

}  // namespace

MatrixGroup::MatrixGroup(std::vector<ProjectiveMap> generators,
                         std::optional<ConvexDomain> domain_hint,
                         const Config& cfg)
    : hint_(std::move(domain_hint)) {
  if (generators.empty())
    throw std::invalid_argument("MatrixGroup: need at least one generator");
  int d = generators[0].ambient();
  std::set<std::string> labels;
  for (size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].ambient() != d)
      throw std::invalid_argument("MatrixGroup: mixed ambient dimensions");
    std::string label = generators[i].label();
    if (label.empty()) label = "g" + std::to_string(i + 1);
    if (!labels.insert(label).second)
      throw std::invalid_argument("MatrixGroup: duplicate generator label '" +
                                  label + "'");
    ProjectiveMap g(generators[i].mat(), label);
    ProjectiveMap gi(g.mat().inverse(), label + "'");
    if ((g * gi).distance_to(ProjectiveMap::identity(d)) > 1e-9)
      throw std::invalid_argument("MatrixGroup: generator '" + label +
                                  "' is numerically singular");
    involutive_.push_back(g.distance_to(gi) < 1e-8);
    generators_.push_back(std::move(g));
    inverses_.push_back(std::move(gi));
  }

  if (hint_) {
    auto pts = default_interior_points(*hint_, 32, cfg.seed);
    for (const auto& g : generators_) {
      for (const auto& x : pts)
        if (contains(*hint_, g.apply(x), cfg) != Location::Interior)
          throw std::invalid_argument("MatrixGroup: generator '" + g.label() +
                                      "' does not preserve the domain");
      for (size_t i = 0; i + 1 < pts.size(); i += 2) {
        double before = hilbert_distance(*hint_, pts[i], pts[i + 1], cfg);
        double after =
            hilbert_distance(*hint_, g.apply(pts[i]), g.apply(pts[i + 1]), cfg);
        if (std::abs(before - after) > 1e-8)
          throw std::invalid_argument("MatrixGroup: generator '" + g.label() +
                                      "' does not preserve the Hilbert metric");
      }
    }
  }
}

int MatrixGroup::ambient() const { return generators_[0].ambient(); }

const ProjectiveMap& MatrixGroup::symbol(int s) const {
  int n = rank();
  if (s < 0 || s >= 2 * n)
    throw std::out_of_range("MatrixGroup::symbol: bad symbol index");
  return s < n ? generators_[s] : inverses_[s - n];
}

int MatrixGroup::inverse_symbol(int s) const {
  int n = rank();
  return involutive_[s % n] ? s : (s + n) % (2 * n);
}

ProjectiveMap MatrixGroup::evaluate_word(const std::string& word) const {
  ProjectiveMap out = ProjectiveMap::identity(ambient());
  std::istringstream in(word);
  std::string tok;
  while (in >> tok) {
    bool found = false;
    for (int i = 0; i < rank() && !found; ++i) {
      if (tok == generators_[i].label()) {
        out = out * generators_[i];
        found = true;
      } else if (tok == inverses_[i].label()) {
        out = out * inverses_[i];
        found = true;
      }
    }
    if (!found)
      throw std::invalid_argument("evaluate_word: unknown symbol '" + tok +
                                  "'");
  }
  return out;
}

std::vector<ProjPoint> default_interior_points(const ConvexDomain& dom,
                                               int count, std::uint64_t seed) {
  std::vector<ProjPoint> out;
  out.push_back(dom.center());
  if (count <= 1) return out;
  auto bd = sample_boundary(dom, count - 1, seed);
  Vec c = dom.chart().to_chart(dom.center());
  for (const auto& b : bd) {
    Vec y = c + 0.45 * (dom.chart().to_chart(b) - c);
    out.push_back(dom.chart().from_chart(y));
  }
  return out;
}

OrbitCloud orbit(const MatrixGroup& group, const ConvexDomain& dom,
                 const std::vector<ProjPoint>& basepoints, int max_word_len,
                 const Config& cfg) {
  if (basepoints.empty())
    throw std::invalid_argument("orbit: need at least one basepoint");
  for (const auto& b : basepoints)
    if (contains(dom, b, cfg) != Location::Interior)
      throw std::invalid_argument("orbit: basepoints must be interior");

  OrbitCloud cloud;
  cloud.basepoints = basepoints;

  // Dedup buckets keyed by quantized trace of the canonical representative.
  std::map<long long, std::vector<int>> buckets;
  auto trace_key = [](const ProjectiveMap& m) {
    return static_cast<long long>(std::llround(m.mat().trace() * 1e6));
  };
  auto known = [&](const ProjectiveMap& m) {
    long long key = trace_key(m);
    for (long long k = key - 1; k <= key + 1; ++k) {
      auto it = buckets.find(k);
      if (it == buckets.end()) continue;
      for (int idx : it->second)
        if (cloud.entries[idx].map.distance_to(m) < 1e-8) return true;
    }
    return false;
  };
  auto record = [&](std::string word, const ProjectiveMap& m, int len) {
    std::vector<ProjPoint> pts;
    pts.reserve(basepoints.size());
    for (const auto& b : basepoints) pts.push_back(m.apply(b));
    buckets[trace_key(m)].push_back(static_cast<int>(cloud.entries.size()));
    cloud.entries.push_back(
        OrbitEntry{std::move(word), m, std::move(pts), len});
  };

  record("", ProjectiveMap::identity(group.ambient()), 0);
  struct Node {
    int entry;
    int last_symbol;
  };
  std::vector<Node> frontier{{0, -1}};
  int nsym = group.alphabet_size(), n = group.rank();
  for (int len = 1; len <= max_word_len && !frontier.empty(); ++len) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      for (int s = 0; s < nsym; ++s) {
        if (s >= n && group.involutive(s - n)) continue;  // duplicate symbol
        if (node.last_symbol >= 0 &&
            s == group.inverse_symbol(node.last_symbol))
          continue;  // not reduced
        const OrbitEntry& e = cloud.entries[node.entry];
        ProjectiveMap m = e.map * group.symbol(s);
        if (known(m)) continue;
        std::string word =
            e.word.empty() ? group.symbol(s).label()
                           : e.word + " " + group.symbol(s).label();
        next.push_back(
            Node{static_cast<int>(cloud.entries.size()), s});
        record(std::move(word), m, len);
      }
    }
    frontier = std::move(next);
  }
  return cloud;
}

LimitSetSample limit_set_sample(const MatrixGroup& group,
                                const ConvexDomain& dom,
                                const std::vector<ProjPoint>& basepoints,
                                int max_word_len, double epsilon,
                                const Config& cfg) {
  OrbitCloud cloud = orbit(group, dom, basepoints, max_word_len, cfg);
  LimitSetSample out;
  out.epsilon = epsilon;
  out.basepoints = basepoints;
  ProjPoint anchor = dom.center();
  for (const auto& entry : cloud.entries) {
    for (size_t bi = 0; bi < entry.points.size(); ++bi) {
      const ProjPoint& x = entry.points[bi];
      if (x.approx_equal(anchor, 1e-12)) continue;
      ProjPoint b = project_to_boundary(dom, anchor, x, cfg);
      if (angle_distance(x, b) >= epsilon) continue;
      out.points.push_back(LimitPoint{b, entry.word, face_of(dom, b, cfg),
                                      static_cast<int>(bi)});
    }
  }
  std::ostringstream diag;
  diag << cloud.entries.size() << " orbit elements, "
       << basepoints.size() << " basepoint(s)";
  if (out.points.empty())
    diag << "; no orbit point within epsilon = " << epsilon
         << " of the boundary";
  out.diagnostics = diag.str();
  return out;
}

HullResult convex_core_sample(const ConvexDomain& dom,
                              const LimitSetSample& lam, const Config& cfg) {
  std::vector<ProjPoint> pts;
  pts.reserve(lam.points.size());
  for (const auto& lp : lam.points) pts.push_back(lp.point);
  return hull_of_boundary_set(dom, pts, cfg);
}

LimitSetSample dual_limit_set_sample(const MatrixGroup& group,
                                     const ConvexDomain& dom,
                                     int max_word_len, double epsilon,
                                     const Config& cfg) {
  ConvexDomain dual = dual_domain(dom);
  std::vector<ProjectiveMap> dual_gens;
  dual_gens.reserve(group.rank());
  for (const auto& g : group.generators())
    dual_gens.emplace_back(Mat(g.mat().inverse().transpose()), g.label());
  MatrixGroup dual_group(std::move(dual_gens), dual, cfg);
  auto basepoints = default_interior_points(dual, 5, cfg.seed + 3);
  return limit_set_sample(dual_group, dual, basepoints, max_word_len, epsilon,
                          cfg);
}

PairingReport verify_limit_dual_pairing(const LimitSetSample& lam,
                                        const LimitSetSample& dual_lam,
                                        double pairing_tol) {
  PairingReport rep;
  if (lam.points.empty() || dual_lam.points.empty()) return rep;
  for (size_t i = 0; i < lam.points.size(); ++i) {
    double best = kInf;
    for (const auto& w : dual_lam.points)
      best = std::min(best,
                      std::abs(w.point.rep().dot(lam.points[i].point.rep())));
    rep.max_residual = std::max(rep.max_residual, best);
    if (best >= pairing_tol) rep.uncovered.push_back(static_cast<int>(i));
  }
  rep.pass = rep.max_residual < pairing_tol;
  return rep;
}

std::vector<CartanVector> cartan_trace(const std::vector<std::string>& words,
                                       const MatrixGroup& group) {
  std::vector<CartanVector> out;
  out.reserve(words.size());
  for (const auto& w : words)
    out.push_back(cartan_projection(group.evaluate_word(w)));
  return out;
}

GapGrowthReport check_gap_growth(const std::vector<CartanVector>& trace,
                                 int k, double delta_min) {
  if (trace.empty())
    throw std::invalid_argument("check_gap_growth: empty trace");
  GapGrowthReport rep;
  for (const auto& cv : trace)
    rep.top_bound = std::max(rep.top_bound, cv.mu(0) - cv.mu(k - 1));
  size_t start = trace.size() / 2;
  rep.gap_growth = trace.size() - start >= 2;
  for (size_t i = start; i + 1 < trace.size(); ++i)
    if (trace[i + 1].gap(k) - trace[i].gap(k) < delta_min)
      rep.gap_growth = false;
  return rep;
}

std::vector<SegmentCluster> detect_segments(const ConvexDomain& dom,
                                            const LimitSetSample& lam,
                                            double collinearity_tol) {
  std::vector<SegmentCluster> out;
  if (dom.is_ellipsoid()) return out;  // strictly convex boundary

  std::map<std::vector<int>, std::vector<int>> by_carrier;
  for (size_t i = 0; i < lam.points.size(); ++i) {
    const auto& f = lam.points[i].face;
    if (f.dim >= 1) by_carrier[f.carrier].push_back(static_cast<int>(i));
  }

  const Chart& ch = dom.chart();
  auto make_cluster = [&](const std::vector<int>& ids,
                          const std::vector<int>& carrier) {
    std::vector<Vec> ys;
    ys.reserve(ids.size());
    for (int id : ids) ys.push_back(ch.to_chart(lam.points[id].point));
    // direction from the farthest pair
    int ia = 0, ib = 1;
    double best = -1;
    for (size_t i = 0; i < ys.size(); ++i)
      for (size_t j = i + 1; j < ys.size(); ++j) {
        double d = (ys[i] - ys[j]).norm();
        if (d > best) {
          best = d;
          ia = static_cast<int>(i);
          ib = static_cast<int>(j);
        }
      }
    Vec u = (ys[ib] - ys[ia]).normalized();
    int lo = ia, hi = ib;
    for (size_t i = 0; i < ys.size(); ++i) {
      double t = (ys[i] - ys[ia]).dot(u);
      if (t < (ys[lo] - ys[ia]).dot(u)) lo = static_cast<int>(i);
      if (t > (ys[hi] - ys[ia]).dot(u)) hi = static_cast<int>(i);
    }
    out.push_back(SegmentCluster{ids, lam.points[ids[lo]].point,
                                 lam.points[ids[hi]].point, carrier});
  };

  for (const auto& [carrier, ids] : by_carrier) {
    if (ids.size() < 2) continue;
    int fdim = lam.points[ids[0]].face.dim;
    if (fdim == 1) {
      make_cluster(ids, carrier);
      continue;
    }
    // collinearity clustering inside higher-dimensional faces
    std::vector<Vec> ys;
    for (int id : ids) ys.push_back(ch.to_chart(lam.points[id].point));
    std::set<std::vector<int>> seen;
    std::vector<std::vector<int>> clusters;
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t j = i + 1; j < ids.size(); ++j) {
        Vec dir = ys[j] - ys[i];
        if (dir.norm() < 1e-12) continue;
        dir.normalize();
        std::vector<int> cl;
        for (size_t k2 = 0; k2 < ids.size(); ++k2) {
          Vec off = ys[k2] - ys[i];
          if ((off - off.dot(dir) * dir).norm() < collinearity_tol)
            cl.push_back(static_cast<int>(k2));
        }
        if (cl.size() >= 3 && seen.insert(cl).second) clusters.push_back(cl);
      }
    // keep maximal clusters only
    for (size_t a = 0; a < clusters.size(); ++a) {
      bool maximal = true;
      for (size_t b2 = 0; b2 < clusters.size() && maximal; ++b2) {
        if (a == b2 || clusters[b2].size() <= clusters[a].size()) continue;
        maximal = !std::includes(clusters[b2].begin(), clusters[b2].end(),
                                 clusters[a].begin(), clusters[a].end());
      }
      if (!maximal) continue;
      std::vector<int> global;
      for (int li : clusters[a]) global.push_back(ids[li]);
      make_cluster(global, carrier);
    }
  }
  return out;
}

PeripheralReport peripheral_checks(const ConvexDomain& dom,
                                   const PeripheralFamily& fam,
                                   const LimitSetSample& lam,
                                   const Config& cfg) {
  PeripheralReport rep;
  size_t nh = fam.limit_samples.size();

  for (size_t i = 0; i < nh && rep.disjoint; ++i)
    for (size_t j = i + 1; j < nh && rep.disjoint; ++j)
      for (const auto& p : fam.limit_samples[i].points) {
        bool close = false;
        for (const auto& q : fam.limit_samples[j].points)
          if (angle_distance(p.point, q.point) <= cfg.separation) {
            close = true;
            break;
          }
        if (close) {
          rep.disjoint = false;
          rep.overlap_witness = {static_cast<int>(i), static_cast<int>(j)};
          break;
        }
      }

  auto class_of = [&](const ProjPoint& x) {
    for (size_t i = 0; i < nh; ++i)
      for (const auto& q : fam.limit_samples[i].points)
        if (angle_distance(x, q.point) < cfg.matching_dist)
          return static_cast<int>(i);
    return -1;
  };
  rep.classes.reserve(lam.points.size());
  for (const auto& lp : lam.points) rep.classes.push_back(class_of(lp.point));

  auto segs = detect_segments(dom, lam);
  for (const auto& seg : segs) {
    bool covered = false;
    for (size_t i = 0; i < nh && !covered; ++i) {
      bool all = true;
      for (int id : seg.point_ids) {
        bool near = false;
        for (const auto& q : fam.limit_samples[i].points)
          if (angle_distance(lam.points[id].point, q.point) <
              cfg.matching_dist) {
            near = true;
            break;
          }
        if (!near) {
          all = false;
          break;
        }
      }
      covered = all;
    }
    if (!covered) rep.segments_peripheral = false;
  }
  return rep;
}

NorthSouthReport north_south_check(const std::vector<ProjectiveMap>& seq,
                                   const ConvexDomain& dom,
                                   const std::vector<ProjPoint>& k_sample,
                                   const FaceDescriptor& face, double eps_ns,
                                   double margin, double gap_floor,
                                   const Config& cfg) {
  if (k_sample.empty())
    throw std::invalid_argument("north_south_check: empty boundary sample");
  DivergentSplit split = attracting_repelling_subspaces(seq, gap_floor);
  for (const auto& k : k_sample) {
    if (contains(dom, k, cfg) != Location::Boundary)
      throw std::invalid_argument("north_south_check: K must be on the boundary");
    if (point_to_subspace_distance(k, face.support) <= margin)
      throw std::invalid_argument(
          "north_south_check: K too close to the face closure");
  }

  NorthSouthReport rep{split.attracting, split.repelling};
  rep.gap_index = split.gap_index;
  const double support_tol = 1e-3;
  double ma = subspace_support_margin(dom, split.attracting, cfg.seed + 51);
  double mr = subspace_support_margin(dom, split.repelling, cfg.seed + 52);
  rep.supports_ok = std::abs(ma) < support_tol && std::abs(mr) < support_tol;

  rep.distances.reserve(seq.size());
  for (const auto& g : seq) {
    double worst = 0.0;
    for (const auto& k : k_sample)
      worst = std::max(
          worst, point_to_subspace_distance(g.apply(k), split.attracting));
    rep.distances.push_back(worst);
  }
  rep.decreasing = rep.distances.size() >= 2;
  for (size_t i = 0; i + 1 < rep.distances.size(); ++i)
    if (rep.distances[i + 1] > rep.distances[i] * 1.1 + 1e-12)
      rep.decreasing = false;
  rep.final_max_dist = rep.distances.back();
  rep.converged = rep.final_max_dist < eps_ns;

  std::vector<ProjPoint> fsamples{face.witness};
  if (dom.is_polytope())
    for (int vid : face.vertex_ids)
      fsamples.push_back(
          ProjPoint(Vec(dom.polytope().vertex_lifts.row(vid).transpose())));
  for (const auto& f : fsamples)
    rep.repelling_final_dist =
        std::max(rep.repelling_final_dist,
                 point_to_subspace_distance(seq.back().apply(f),
                                            split.repelling));
  return rep;
}

}  // namespace cvx
