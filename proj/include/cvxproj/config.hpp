#pragma once

#include <cstdint>
#include <string>

namespace cvx {

// Numerical tolerances and sampling parameters used throughout.
// All thresholds live here so that reported results can cite one record.
struct Config {
  // classification / algebraic tolerances
  double boundary_tol = 1e-9;       // interior/boundary/exterior classification
  double face_saturation_tol = 1e-8; // facet saturation when assigning faces
  double subspace_tol = 1e-10;      // orthonormality, invariance checks
  double det_tol = 1e-9;            // |det| = 1 normalization check

  // sampling
  std::uint64_t seed = 20240817;
  int boundary_samples = 2048;      // per-domain samples for Hausdorff distance
  int expansion_samples = 256;      // pair samples for expansion ratio
  int grid_per_dim = 64;            // delta-invariant direction grid

  // group dynamics thresholds
  double limit_eps = 1e-3;          // boundary proximity for limit-set sampling
  double separation = 1e-2;         // peripheral disjointness threshold
  double matching_dist = 1e-2;      // segment/limit-set matching distance

  // normalization
  double inner_radius_floor = 1e-4; // r0: sanity floor on normalized domains
  int centroid_max_iters = 200;
};

inline const Config& default_config() {
  static const Config cfg{};
  return cfg;
}

}  // namespace cvx
