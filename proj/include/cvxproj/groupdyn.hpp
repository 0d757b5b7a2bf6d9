#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvxproj/convexdom.hpp"

namespace cvx {

/// A finitely generated subgroup of PGL(d,R), given by labeled
/// generators. Inverses are labeled with a trailing apostrophe;
/// involutive generators are detected and share a symbol with their
/// inverse.
class MatrixGroup {
 public:
  /// Validates generator invertibility and, when a domain hint is given,
  /// that each generator preserves the domain (sampled interior points
  /// stay interior, Hilbert distances are preserved within 1e-8).
  explicit MatrixGroup(std::vector<ProjectiveMap> generators,
                       std::optional<ConvexDomain> domain_hint = std::nullopt,
                       const Config& cfg = default_config());

  int ambient() const;
  int rank() const { return static_cast<int>(generators_.size()); }
  const std::vector<ProjectiveMap>& generators() const { return generators_; }
  const std::vector<ProjectiveMap>& inverses() const { return inverses_; }
  bool involutive(int i) const { return involutive_[i]; }
  const std::optional<ConvexDomain>& domain_hint() const { return hint_; }

  /// Alphabet of size 2*rank: symbol i < rank is generator i, symbol
  /// rank + i is its inverse. For involutions both symbols coincide.
  int alphabet_size() const { return 2 * rank(); }
  const ProjectiveMap& symbol(int s) const;
  int inverse_symbol(int s) const;

  /// Evaluates a whitespace-separated word in generator labels (inverse
  /// labels carry a trailing apostrophe). The empty word is the identity.
  ProjectiveMap evaluate_word(const std::string& word) const;

 private:
  std::vector<ProjectiveMap> generators_, inverses_;
  std::vector<bool> involutive_;
  std::optional<ConvexDomain> hint_;
};

// ---------------------------------------------------------------------------
// Orbits

struct OrbitEntry {
  std::string word;              // space-separated symbol labels
  ProjectiveMap map;
  std::vector<ProjPoint> points; // one per basepoint
  int word_length = 0;
};

struct OrbitCloud {
  std::vector<OrbitEntry> entries;  // BFS order: by length, then symbol
  std::vector<ProjPoint> basepoints;
};

/// Breadth-first enumeration of reduced words up to the given length,
/// deduplicated by projective-map distance.
OrbitCloud orbit(const MatrixGroup& group, const ConvexDomain& dom,
                 const std::vector<ProjPoint>& basepoints, int max_word_len,
                 const Config& cfg = default_config());

/// Deterministic interior points for orbit sampling: the canonical
/// center plus points partway toward sampled boundary directions.
std::vector<ProjPoint> default_interior_points(const ConvexDomain& dom,
                                               int count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Limit sets

struct LimitPoint {
  ProjPoint point;      // on the boundary
  std::string word;
  FaceDescriptor face;
  int basepoint = 0;
};

struct LimitSetSample {
  std::vector<LimitPoint> points;
  double epsilon = 0.0;
  std::vector<ProjPoint> basepoints;
  std::string diagnostics;
};

/// Orbit points within epsilon of the boundary, projected to the
/// boundary along the ray from the canonical center and tagged with
/// their open face.
LimitSetSample limit_set_sample(const MatrixGroup& group,
                                const ConvexDomain& dom,
                                const std::vector<ProjPoint>& basepoints,
                                int max_word_len, double epsilon,
                                const Config& cfg = default_config());

/// Hull of the sampled limit set with its ideal vertices.
HullResult convex_core_sample(const ConvexDomain& dom,
                              const LimitSetSample& lam,
                              const Config& cfg = default_config());

/// Limit set of the contragredient action on the dual domain.
LimitSetSample dual_limit_set_sample(const MatrixGroup& group,
                                     const ConvexDomain& dom,
                                     int max_word_len, double epsilon,
                                     const Config& cfg = default_config());

struct PairingReport {
  double max_residual = 0.0;
  std::vector<int> uncovered;  // indices into the primal sample
  bool pass = false;
};

/// For each primal limit point x, the minimum of |w(x)| over dual limit
/// points w (unit representatives); passes when the maximum residual is
/// below the pairing tolerance.
PairingReport verify_limit_dual_pairing(const LimitSetSample& lam,
                                        const LimitSetSample& dual_lam,
                                        double pairing_tol = 1e-2);

// ---------------------------------------------------------------------------
// Cartan traces

std::vector<CartanVector> cartan_trace(const std::vector<std::string>& words,
                                       const MatrixGroup& group);

struct GapGrowthReport {
  bool gap_growth = false;
  double top_bound = 0.0;  // max over the trace of mu_1 - mu_k
};

/// gap_growth iff mu_k - mu_{k+1} increases by at least delta_min per
/// step over the last half of the trace.
GapGrowthReport check_gap_growth(const std::vector<CartanVector>& trace, int k,
                                 double delta_min = 1e-3);

// ---------------------------------------------------------------------------
// Segments and peripheral structure

struct SegmentCluster {
  std::vector<int> point_ids;  // indices into the limit sample
  ProjPoint end_a, end_b;
  std::vector<int> carrier;    // facet carrier of the common face
};

/// Maximal segment clusters in a limit sample: exact face-carrier
/// grouping for polytopes (with collinearity clustering inside faces of
/// dimension >= 2), empty for strictly convex boundaries.
std::vector<SegmentCluster> detect_segments(const ConvexDomain& dom,
                                            const LimitSetSample& lam,
                                            double collinearity_tol = 1e-8);

struct PeripheralFamily {
  std::vector<MatrixGroup> subgroups;
  std::vector<LimitSetSample> limit_samples;  // parallel to subgroups
};

struct PeripheralReport {
  bool disjoint = true;
  std::pair<int, int> overlap_witness{-1, -1};  // subgroup indices
  bool segments_peripheral = true;
  std::vector<int> classes;  // per limit point: subgroup index or -1
};

PeripheralReport peripheral_checks(const ConvexDomain& dom,
                                   const PeripheralFamily& fam,
                                   const LimitSetSample& lam,
                                   const Config& cfg = default_config());

// ---------------------------------------------------------------------------
// North-south dynamics

struct NorthSouthReport {
  ProjSubspace attracting, repelling;
  int gap_index = 0;
  bool supports_ok = false;      // E+- touch the boundary, miss the interior
  std::vector<double> distances; // max over K of dist(g_n k, E+)
  bool decreasing = false;
  double final_max_dist = 0.0;
  double repelling_final_dist = 0.0;
  bool converged = false;
};

/// Checks uniform attraction of the boundary sample K toward E+ along
/// the sequence, and that samples of the face F approach E-.
NorthSouthReport north_south_check(const std::vector<ProjectiveMap>& seq,
                                   const ConvexDomain& dom,
                                   const std::vector<ProjPoint>& k_sample,
                                   const FaceDescriptor& face,
                                   double eps_ns = 1e-3, double margin = 0.05,
                                   double gap_floor = 0.5,
                                   const Config& cfg = default_config());

}  // namespace cvx
