#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "cvxproj/config.hpp"
#include "cvxproj/projlin.hpp"

namespace cvx {

enum class Location { Interior, Boundary, Exterior };

/// Affine chart {xi . v = 1} with orthonormal coordinates on xi^perp.
struct Chart {
  Covec xi;    // unit-norm chart covector, positive on the domain closure
  Vec origin;  // lift with xi . origin = 1
  Mat basis;   // (d-1) x d orthonormal rows spanning ker(xi)

  Vec to_chart(const Vec& lift) const;
  Vec to_chart(const ProjPoint& p) const { return to_chart(p.rep()); }
  ProjPoint from_chart(const Vec& y) const;
  Vec lift(const Vec& y) const { return origin + basis.transpose() * y; }
};

/// V- and H-representation of a sharp polyhedral cone, both stored and
/// kept consistent. Rows of vertex_lifts generate the cone; rows of
/// facet_functionals are nonnegative on its closure.
struct Polytope {
  Mat vertex_lifts;       // n x d, unit rows
  Mat facet_functionals;  // m x d, unit rows
};

/// {[v] : v^T form v < 0} for a symmetric form of signature (d-1, 1).
struct Ellipsoid {
  Mat form;
};

/// An open face of the boundary, carried by its saturated facet set
/// (polytope) or a single boundary point (ellipsoid).
struct FaceDescriptor {
  int dim = 0;                   // projective dimension of the open face
  ProjSubspace support;          // projective span, a (dim+1)-dim subspace
  std::vector<int> carrier;      // saturated facet indices, sorted (polytope)
  std::vector<int> vertex_ids;   // vertices of the closed face (polytope)
  ProjPoint witness;             // the defining boundary point

  bool same_face(const FaceDescriptor& other) const;
};

class ConvexDomain {
 public:
  /// Builds a polytope domain from cone generators; computes facets by
  /// chart convex hull and canonicalizes both representations.
  static ConvexDomain polytope_from_vertices(const Mat& vertex_lifts);
  /// Builds a polytope domain from facet functionals; vertex-enumerates.
  static ConvexDomain polytope_from_facets(const Mat& facet_functionals);
  static ConvexDomain ellipsoid(const Mat& form);

  int ambient() const { return d_; }
  bool is_polytope() const { return std::holds_alternative<Polytope>(rep_); }
  bool is_ellipsoid() const { return std::holds_alternative<Ellipsoid>(rep_); }
  const Polytope& polytope() const { return std::get<Polytope>(rep_); }
  const Ellipsoid& ellipsoid_rep() const { return std::get<Ellipsoid>(rep_); }

  /// Deterministic chart covector strictly positive on the closure.
  const Chart& chart() const { return chart_; }
  /// Deterministic interior point (chart vertex mean / form center).
  const ProjPoint& center() const { return center_; }

  ConvexDomain transformed(const ProjectiveMap& g) const;

 private:
  ConvexDomain() = default;
  std::variant<Polytope, Ellipsoid> rep_;
  int d_ = 0;
  Chart chart_;
  ProjPoint center_{Vec::Ones(2)};
};

struct PointedDomain {
  ConvexDomain domain;
  ProjPoint base;

  PointedDomain(ConvexDomain dom, ProjPoint b);
};

// ---------------------------------------------------------------------------
// Membership, chords, Hilbert metric

Location contains(const ConvexDomain& dom, const ProjPoint& x,
                  const Config& cfg = default_config());

struct ChordResult {
  ProjPoint backward;  // a: behind x
  ProjPoint forward;   // b: beyond y
};

/// Boundary endpoints of the line through interior x and y, ordered
/// a, x, y, b along the segment in the closure.
ChordResult chord(const ConvexDomain& dom, const ProjPoint& x,
                  const ProjPoint& y, const Config& cfg = default_config());

double hilbert_distance(const ConvexDomain& dom, const ProjPoint& x,
                        const ProjPoint& y,
                        const Config& cfg = default_config());

// ---------------------------------------------------------------------------
// Boundary structure

struct SupportingFunctionals {
  Covec canonical;            // normalized average of the extreme set
  std::vector<Covec> extreme; // saturated facets / tangent functional
};

SupportingFunctionals supporting_functionals_at(
    const ConvexDomain& dom, const ProjPoint& b,
    const Config& cfg = default_config());

FaceDescriptor face_of(const ConvexDomain& dom, const ProjPoint& b,
                       const Config& cfg = default_config());

/// All faces of a polytope boundary (dims 0 .. d-2), by carrier closure.
std::vector<FaceDescriptor> enumerate_faces(const ConvexDomain& dom);

/// Hilbert distances d(c1(t), c2(t)) along unit-speed parameterizations
/// of [p1, b1) and [p2, b2) at N samples of t in [0, T].
std::vector<double> ray_distance_profile(const ConvexDomain& dom,
                                         const ProjPoint& p1,
                                         const ProjPoint& b1,
                                         const ProjPoint& p2,
                                         const ProjPoint& b2, double horizon,
                                         int samples,
                                         const Config& cfg = default_config());

/// Point at Hilbert distance t from interior p along the ray toward
/// boundary point b.
ProjPoint hilbert_ray_point(const ConvexDomain& dom, const ProjPoint& p,
                            const ProjPoint& b, double t,
                            const Config& cfg = default_config());

// ---------------------------------------------------------------------------
// Duality and hulls

/// Dual domain: polytope role swap / inverse form. Involutive.
ConvexDomain dual_domain(const ConvexDomain& dom);

struct HullResult {
  ConvexDomain hull;                    // polytope, in span coordinates when
                                        // the input set is degenerate
  std::optional<ProjSubspace> span;     // proper projective span, if any
  bool degenerate = false;
  std::vector<int> ideal_vertex_ids;    // input indices that are hull vertices
};

/// Convex hull of a finite boundary set in the canonical chart.
HullResult hull_of_boundary_set(const ConvexDomain& dom,
                                const std::vector<ProjPoint>& points,
                                const Config& cfg = default_config());

// ---------------------------------------------------------------------------
// Structured boundary subsets

struct BoundarySubset {
  std::vector<FaceDescriptor> faces;  // declared open faces in Lambda
  std::vector<ProjPoint> samples;     // additional boundary samples
};

struct BoundaryCheckReport {
  bool boundary_convex = true;
  bool contains_faces = true;
  std::vector<ProjPoint> face_violations;     // samples with missing face
  std::vector<int> nonconvex_facets;          // facet indices witnessing
};

BoundaryCheckReport boundary_subset_checks(
    const ConvexDomain& dom, const BoundarySubset& lambda,
    const Config& cfg = default_config());

// ---------------------------------------------------------------------------
// The delta invariant

struct DeltaResult {
  double value = 0.0;
  double resolution = 0.0;  // grid spacing at the returned minimizer
};

/// inf over z in the hyperplane W of min([a_z,x;b_z,z], [b_z,x;a_z,z]),
/// by deterministic grid search with golden-section refinement.
DeltaResult delta_invariant(const ConvexDomain& dom, const ProjPoint& x,
                            const ProjSubspace& w,
                            const Config& cfg = default_config());

// ---------------------------------------------------------------------------
// Sampling helpers shared with the domain-space module

/// Deterministic boundary sample (2 chord endpoints per direction) of
/// the given size, shot from the canonical center.
std::vector<ProjPoint> sample_boundary(const ConvexDomain& dom, int count,
                                       std::uint64_t seed);

/// Nearest-along-ray boundary projection from the given anchor.
ProjPoint project_to_boundary(const ConvexDomain& dom, const ProjPoint& anchor,
                              const ProjPoint& x,
                              const Config& cfg = default_config());

}  // namespace cvx
