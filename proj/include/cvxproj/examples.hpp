#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cvxproj/groupdyn.hpp"

namespace cvx {

/// The standard open simplex on e_1..e_d together with the lattice of
/// projectivized positive diagonal matrices diag(exp(v_i)) for the given
/// zero-sum exponent vectors. The basis must consist of d-1 linearly
/// independent zero-sum vectors.
std::pair<ConvexDomain, MatrixGroup> standard_simplex_with_lattice(
    int d, const std::vector<Vec>& exponent_basis,
    const Config& cfg = default_config());

/// Projective model of hyperbolic (d-1)-space: the round ball cut out by
/// the form diag(1, ..., 1, -1) on R^d.
ConvexDomain klein_model(int d);

/// Hyperbolic triangle reflection group acting on klein_model(3), built
/// from the Gram matrix with off-diagonal entries -cos(pi/m) and
/// conjugated to preserve the standard form. Requires 1/p+1/q+1/r < 1;
/// the reflection and rotation-order relations are verified numerically.
MatrixGroup triangle_group(int p, int q, int r,
                           const Config& cfg = default_config());

/// Free rank-two Schottky group of hyperbolic translations along two
/// axes through the center of the Klein disk, at the given angle.
/// Translation lengths must be large enough that the ping-pong disks
/// around the four fixed points are disjoint and each generator maps the
/// allowed disks into its attracting disk (checked constructively).
MatrixGroup schottky_group(double t1, double t2, double axis_angle,
                           const Config& cfg = default_config());

// ---------------------------------------------------------------------------
// Named presets

struct ExampleSpec {
  std::string name;
  int dimension = 0;
  std::vector<Vec> exponent_basis;            // simplex lattices
  std::array<int, 3> triangle{0, 0, 0};       // reflection groups
  double t1 = 0, t2 = 0, axis_angle = 0;      // Schottky groups
};

struct ExampleInstance {
  ExampleSpec spec;
  ConvexDomain domain;
  std::optional<MatrixGroup> group;
};

/// Presets addressable by name: "simplex-z2", "simplex-z3", "klein<d>",
/// "triangle-p-q-r", "schottky". Throws on unknown names.
ExampleInstance make_example(const std::string& name,
                             const Config& cfg = default_config());

std::vector<std::string> example_names();

}  // namespace cvx
