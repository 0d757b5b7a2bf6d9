#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvx {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Covec = Eigen::RowVectorXd;

struct NotDivergentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A point of RP^{d-1}, stored as a unit vector with deterministic sign
/// (first entry of magnitude > 1e-12 is positive).
class ProjPoint {
 public:
  explicit ProjPoint(const Vec& lift);

  const Vec& rep() const { return rep_; }
  int ambient() const { return static_cast<int>(rep_.size()); }

  bool approx_equal(const ProjPoint& other, double tol = 1e-9) const;

 private:
  Vec rep_;
};

/// A k-dimensional linear subspace of R^d, i.e. an element of Gr(k,d),
/// stored as a k x d matrix with orthonormal rows.
class ProjSubspace {
 public:
  /// Orthonormalizes the given spanning rows. Throws if they are rank
  /// deficient.
  explicit ProjSubspace(const Mat& spanning_rows);

  static ProjSubspace from_point(const ProjPoint& p);

  const Mat& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.rows()); }
  int ambient() const { return static_cast<int>(basis_.cols()); }

  bool contains(const ProjPoint& p, double tol = 1e-9) const;
  /// Orthogonal complement as a subspace.
  ProjSubspace complement() const;

 private:
  explicit ProjSubspace(Mat basis, bool /*already_orthonormal*/)
      : basis_(std::move(basis)) {}
  Mat basis_;
};

/// An element of PGL(d,R): a d x d invertible matrix normalized so
/// |det| = 1, with a deterministic sign rule. Carries an optional word
/// label in a generator alphabet.
class ProjectiveMap {
 public:
  explicit ProjectiveMap(const Mat& mat, std::string label = "");

  const Mat& mat() const { return mat_; }
  int ambient() const { return static_cast<int>(mat_.rows()); }
  const std::string& label() const { return label_; }

  ProjectiveMap inverse() const;
  ProjectiveMap operator*(const ProjectiveMap& rhs) const;

  ProjPoint apply(const ProjPoint& p) const;
  ProjSubspace apply(const ProjSubspace& s) const;

  static ProjectiveMap identity(int d);

  /// min over signs of the Frobenius distance between normalized reps.
  double distance_to(const ProjectiveMap& other) const;

 private:
  Mat mat_;
  std::string label_;
};

/// Log singular values of a |det| = 1 representative, nonincreasing,
/// summing to zero.
struct CartanVector {
  Vec mu;
  /// mu_i - mu_{i+1}, 1-based index, representative independent.
  double gap(int i) const { return mu(i - 1) - mu(i); }
};

// ---------------------------------------------------------------------------
// Metrics and cross-ratio

/// Angle metric on RP^{d-1}: arccos |<p,q>| for unit representatives.
double angle_distance(const ProjPoint& p, const ProjPoint& q);

/// Hausdorff distance of two equal-dimensional subspaces viewed as
/// closed subsets of (RP^{d-1}, angle metric). Equals the largest
/// principal angle: arccos of the smallest singular value of Bv * Bw^T.
double grassmann_distance(const ProjSubspace& v, const ProjSubspace& w);

/// min over w in W of angle_distance(x, w) = arccos ||B_W x||.
double point_to_subspace_distance(const ProjPoint& x, const ProjSubspace& w);

/// Cross-ratio [a,b;c,d] = (|c-a| |d-b|) / (|b-a| |d-c|) of four
/// collinear projective points, computed chart-free from 2x2
/// determinants in a basis of the common line. Throws on non-collinear
/// or fully degenerate input.
double cross_ratio(const ProjPoint& a, const ProjPoint& b, const ProjPoint& c,
                   const ProjPoint& d);

/// Subspace V through x with d_H(V, W) = d_P(x, W): x^perp-slice
/// construction when the distance is below pi/2, basis swap at the
/// diameter.
ProjSubspace nearest_containing_subspace(const ProjPoint& x,
                                         const ProjSubspace& w);

// ---------------------------------------------------------------------------
// Cartan projections and asymptotics

CartanVector cartan_projection(const ProjectiveMap& m);

/// Largest/smallest singular value of the lift restricted to V.
std::pair<double, double> norm_conorm_on_subspace(const Mat& lift,
                                                  const ProjSubspace& v);

struct DivergentSplit {
  ProjSubspace attracting;  // E+
  ProjSubspace repelling;   // E-
  int gap_index;            // p, 1-based
};

/// Attracting/repelling subspaces of a divergent sequence, read off the
/// singular value decomposition of its final element. The gap index
/// maximizes mu_i - mu_{i+1}, smallest index on ties. Throws
/// NotDivergentError when the total gap is at most gap_floor.
DivergentSplit attracting_repelling_subspaces(
    std::span<const ProjectiveMap> seq, double gap_floor);

// ---------------------------------------------------------------------------
// Small helpers shared across modules

/// Orthonormal rows spanning the same row space; throws if rank < rows.
Mat orthonormalize_rows(const Mat& rows);

/// Orthonormal basis (as rows) of the null space of the given matrix.
Mat null_space_rows(const Mat& m, double tol = 1e-10);

}  // namespace cvx
