#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvxproj/domspace.hpp"
#include "cvxproj/groupdyn.hpp"

namespace cvx {

// ---------------------------------------------------------------------------
// Expansion testing

struct ExpansionSampleReport {
  bool pass = false;
  double measured_min_ratio = 0.0;  // over sampled pairs in the ball
  double center_ratio = 0.0;        // derivative proxy at the center
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Is the map C-expanding (in the Grassmannian angle metric) on the ball
/// of radius r around V? Sampled pairs plus a derivative proxy at the
/// center; both ratios must reach C.
ExpansionSampleReport is_expanding_on_ball(const ProjectiveMap& g,
                                           const ProjSubspace& v, double r,
                                           double c,
                                           const Config& cfg = default_config());

/// m(g|E+)/|g|V-| on the |det|=1 lift; the subspaces must be invariant
/// and complementary.
double sv_expansion_bound(const ProjectiveMap& g, const ProjSubspace& v_minus,
                          const ProjSubspace& e_plus);

struct ExpansionCertificate {
  FaceDescriptor face;
  std::string word;
  ProjectiveMap element;
  double constant = 0.0;    // measured expansion ratio
  double required_c = 0.0;
  double radius = 0.0;
  std::string method;       // "sampled" | "sv_bound"
  std::string metric = "grassmann_angle";
  std::uint64_t seed = 0;
  int samples = 0;
};

/// First group element (BFS order over reduced words) that is
/// C-expanding on the r-ball around the face support.
std::optional<ExpansionCertificate> find_expanding_element(
    const MatrixGroup& group, const ConvexDomain& dom,
    const FaceDescriptor& face, double c, double r, int max_word_len,
    const Config& cfg = default_config());

struct UniformExpansionReport {
  bool all_pass = false;
  std::vector<std::optional<ExpansionCertificate>> certificates;
};

UniformExpansionReport check_uniform_expansion_at_faces(
    const MatrixGroup& group, const ConvexDomain& dom,
    const std::vector<FaceDescriptor>& faces, double c, double r,
    int max_word_len, const Config& cfg = default_config());

/// Cocompactness proxy: max over core samples of the Hilbert distance to
/// the nearest orbit point.
double covering_radius(const std::vector<ProjPoint>& core_sample,
                       const OrbitCloud& cloud, const ConvexDomain& dom,
                       const Config& cfg = default_config());

// ---------------------------------------------------------------------------
// Pseudo-loxodromic sequences

struct PseudoLoxSequence {
  ProjSubspace v_plus, v_minus;
  std::optional<ProjSubspace> h0;  // neutral subspace, absent when trivial
  std::vector<ProjectiveMap> maps;
  std::vector<double> lambda_schedule;
  PointedDomain reference;
  double k_radius = 0.0;  // measured domain-distance bound
};

/// Max cross-block residual of the maps against the V- / H0 / V+
/// splitting (Frobenius, on |det|=1 lifts).
double splitting_residual(const PseudoLoxSequence& seq);

/// Codimension-one construction: s_n = lambda_n on x+ and the identity
/// on the face hyperplane, with lambda_n solved so s_n x_n = x_target.
/// When x_n is empty, the points are generated from the geometric
/// schedule lambda_n = 2^n, n = 1..12.
PseudoLoxSequence make_codim1_pseudolox(const ConvexDomain& dom,
                                        const FaceDescriptor& f_minus,
                                        const ProjPoint& x_plus,
                                        std::vector<ProjPoint> x_n,
                                        const ProjPoint& x_target,
                                        const Config& cfg = default_config());

/// Neutral subspace H0 inside H+ cap H- with H- = H0 + V- and the
/// projection of the domain onto V- + x+ (kernel H0) properly convex.
/// Empty when V- is already a hyperplane. Seeded search, first verified
/// candidate wins.
std::optional<ProjSubspace> projection_subspace(
    const ConvexDomain& dom, const ProjPoint& x_minus, const ProjPoint& x_plus,
    const ProjSubspace& h_plus, const ProjSubspace& h_minus,
    const Config& cfg = default_config());

/// General construction g_n = s_n (+) h_n: codim-1 inside P(V- + x+)
/// with the slice renormalized on the neutral directions.
PseudoLoxSequence make_general_pseudolox(const ConvexDomain& dom,
                                         const FaceDescriptor& f_minus,
                                         const ProjPoint& x_plus,
                                         std::vector<ProjPoint> x_n,
                                         const ProjPoint& x_target,
                                         const Config& cfg = default_config());

struct KgDecomposition {
  std::vector<ProjectiveMap> k;
  double max_norm = 0.0;  // max operator norm of k_n, k_n^{-1}
};

KgDecomposition decompose_kg(const std::vector<ProjectiveMap>& gammas,
                             const PseudoLoxSequence& pseudolox);

}  // namespace cvx
