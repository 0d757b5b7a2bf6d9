#pragma once

#include <optional>

#include "cvxproj/convexdom.hpp"

namespace cvx {

/// A direct sum decomposition R^d = V_a + V_b given by orthonormal bases
/// of each factor. The factors need not be mutually orthogonal; the
/// stacked bases must be invertible.
class DirectSumSplit {
 public:
  DirectSumSplit(ProjSubspace a, ProjSubspace b);

  const ProjSubspace& a() const { return a_; }
  const ProjSubspace& b() const { return b_; }

  /// Coordinates of the projection onto V_a along V_b, as a k_a x d map.
  const Mat& coords_a() const { return coords_a_; }
  const Mat& coords_b() const { return coords_b_; }

 private:
  ProjSubspace a_, b_;
  Mat coords_a_, coords_b_;
};

/// Does P(V) meet the open domain? (Gordan's alternative on restricted
/// facet functionals / signature test for ellipsoids.)
bool subspace_meets_domain(const ConvexDomain& dom, const ProjSubspace& v);
/// Does the closed cone over the domain meet V outside the origin?
bool subspace_meets_closure(const ConvexDomain& dom, const ProjSubspace& v);

/// Symmetric sampled Hausdorff distance between domain closures in the
/// angle metric.
double domain_distance(const ConvexDomain& d1, const ConvexDomain& d2,
                       const Config& cfg = default_config());

/// The domain intersected with P(V_a), in V_a coordinates. Throws when
/// the intersection is empty.
ConvexDomain slice(const ConvexDomain& dom, const ProjSubspace& va);

struct ProjectResult {
  std::optional<ConvexDomain> image;  // in V_a coordinates; absent when
                                      // proper convexity fails
  bool closure_warning = false;       // closure of the domain meets P(V_b)
  bool properly_convex = false;
  bool approximate = false;           // ellipsoid images are sampled hulls
};

/// Projectivized cone projection onto V_a along V_b. Throws when the
/// open domain meets P(V_b).
ProjectResult project(const ConvexDomain& dom, const DirectSumSplit& split);

struct DualityReport {
  int samples = 0;
  int violations = 0;
  bool equality_case = false;  // closure of the cone meets V_b trivially
};

/// Sampled check of the cone duality identity
/// pi_{V_a}(C)^* cap V_a^* = C^* cap V_a^* (equality when the closed
/// cone meets V_b only at the origin; inclusions otherwise).
DualityReport verify_projection_duality(const ConvexDomain& cone,
                                        const DirectSumSplit& split,
                                        const Config& cfg = default_config());

/// Minimal properly convex domain containing both inputs, built as the
/// chart hull for a chart covector positive on both closures. With no
/// explicit covector, searches averaged facet data and requires the
/// domains to overlap.
ConvexDomain hull_pair(const ConvexDomain& d1, const ConvexDomain& d2,
                       std::optional<Covec> w = std::nullopt,
                       const Config& cfg = default_config());

struct NormalizationResult {
  ProjectiveMap map;
  PointedDomain normalized;
  double inner_radius = 0.0;  // chart-ball radii around the base point
  double outer_radius = 0.0;
};

/// Benzecri-style normalization: move the base point to the centroid of
/// a deterministically chosen chart, whiten the chart inertia, and fix
/// the residual rotation by higher chart moments. The result is a
/// canonical representative of the PGL orbit of the pointed domain.
NormalizationResult benzecri_normalize(const PointedDomain& p,
                                       const Config& cfg = default_config());

/// Normalization relative to a direct sum: a map of block form
/// id_{V_a} (+) h_b whitening the slice of the domain through
/// base (+) V_b. Throws when the domain meets P(V_b) or, when a slice
/// reference is given, when the V_a data leaves the declared family.
ProjectiveMap relative_benzecri_normalize(
    const PointedDomain& p, const DirectSumSplit& split,
    const ConvexDomain* slice_reference = nullptr,
    double family_radius = 1.0, const Config& cfg = default_config());

struct SandwichReport {
  bool hypotheses_ok = false;
  std::string failed_hypothesis;
  bool containment_ok = false;  // Omega1 subset Omega subset Omega2
  double r3 = 0.0;
  bool r3_ok = false;
};

/// Verification harness for the projection/intersection sandwich:
/// given bounds Omega_a in Omega_a' (in W_a (+) x coordinates) and
/// Omega_b in Omega_b' (in V_b (+) x coordinates), checks the four
/// hypotheses on samples, builds Hull(Omega_a, Omega_b) and the dual
/// hull upper bound, and verifies the containment chain.
SandwichReport verify_sandwich(const ConvexDomain& omega, const ProjPoint& x,
                               const ProjSubspace& wa, const ProjSubspace& vb,
                               const ConvexDomain& omega_a,
                               const ConvexDomain& omega_a_prime,
                               const ConvexDomain& omega_b,
                               const ConvexDomain& omega_b_prime,
                               const Config& cfg = default_config());

struct EuclideanSandwich {
  bool ball_hypothesis = false;   // B(R1) cap W-perp inside the domain
  bool proj_hypothesis = false;   // proj_{W-perp}(domain) inside B(R2)
  bool conclusion = false;        // proj_W(domain) inside R3 (domain cap W)
  double r3 = 0.0;
};

/// The Euclidean scaling bound pi_W(Omega) in R3 (Omega cap W) with
/// R3 = (R1 + R2)/R1, checked on chart samples around the given
/// interior origin.
EuclideanSandwich euclidean_projection_bound(const ConvexDomain& dom,
                                             const ProjPoint& origin,
                                             const ProjSubspace& w_chart_dirs,
                                             double r1, double r2,
                                             const Config& cfg =
                                                 default_config());

/// Volume-normalized second moment of the chart domain about the chart
/// point of the given base (exact for polytopes, closed form for
/// ellipsoids). Exposed for tests of the normalization invariants.
Mat chart_inertia(const ConvexDomain& dom, const Chart& chart,
                  const ProjPoint& base);

}  // namespace cvx
