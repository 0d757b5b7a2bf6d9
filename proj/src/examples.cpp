#include "cvxproj/examples.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cvx {

namespace {

Mat reflection_in_basis_vector(const Mat& gram, int i) {
  Mat r = Mat::Identity(3, 3);
  r.row(i) -= 2.0 * gram.row(i);
  return r;
}

Mat boost_x(double t) {
  Mat b = Mat::Identity(3, 3);
  b(0, 0) = std::cosh(t);
  b(0, 2) = std::sinh(t);
  b(2, 0) = std::sinh(t);
  b(2, 2) = std::cosh(t);
  return b;
}

Mat rot_xy(double theta) {
  Mat r = Mat::Identity(3, 3);
  r(0, 0) = std::cos(theta);
  r(0, 1) = -std::sin(theta);
  r(1, 0) = std::sin(theta);
  r(1, 1) = std::cos(theta);
  return r;
}

// Chart coordinates (x1/x3, x2/x3) of the Klein disk.
Eigen::Vector2d disk_chart(const Vec& lift) {
  if (std::abs(lift(2)) < 1e-12)
    throw std::runtime_error("schottky_group: image left the disk chart");
  return {lift(0) / lift(2), lift(1) / lift(2)};
}

}  // namespace

std::pair<ConvexDomain, MatrixGroup> standard_simplex_with_lattice(
    int d, const std::vector<Vec>& exponent_basis, const Config& cfg) {
  if (d < 2)
    throw std::invalid_argument("standard_simplex_with_lattice: d must be >= 2");
  if (static_cast<int>(exponent_basis.size()) != d - 1)
    throw std::invalid_argument(
        "standard_simplex_with_lattice: need d-1 exponent vectors");
  Mat stacked(d - 1, d);
  for (int i = 0; i < d - 1; ++i) {
    const Vec& v = exponent_basis[i];
    if (v.size() != d)
      throw std::invalid_argument(
          "standard_simplex_with_lattice: exponent vector of wrong length");
    if (std::abs(v.sum()) > 1e-9)
      throw std::invalid_argument(
          "standard_simplex_with_lattice: exponent vectors must be zero-sum");
    for (int j = 0; j < d; ++j)
      if (std::abs(v(j) - std::round(v(j))) > 1e-9)
        throw std::invalid_argument(
            "standard_simplex_with_lattice: exponent entries must be integers");
    stacked.row(i) = v.transpose();
  }
  Eigen::JacobiSVD<Mat> svd(stacked);
  if (svd.singularValues()(d - 2) < 1e-8)
    throw std::invalid_argument(
        "standard_simplex_with_lattice: dependent exponent basis");

  ConvexDomain dom = ConvexDomain::polytope_from_vertices(Mat::Identity(d, d));
  std::vector<ProjectiveMap> gens;
  gens.reserve(d - 1);
  for (const Vec& v : exponent_basis)
    gens.emplace_back(Mat(v.array().exp().matrix().asDiagonal()));
  MatrixGroup group(std::move(gens), dom, cfg);
  return {std::move(dom), std::move(group)};
}

ConvexDomain klein_model(int d) {
  if (d < 2) throw std::invalid_argument("klein_model: d must be >= 2");
  Vec diag = Vec::Ones(d);
  diag(d - 1) = -1.0;
  return ConvexDomain::ellipsoid(Mat(diag.asDiagonal()));
}

MatrixGroup triangle_group(int p, int q, int r, const Config& cfg) {
  if (p < 2 || q < 2 || r < 2)
    throw std::invalid_argument("triangle_group: orders must be >= 2");
  if (1.0 / p + 1.0 / q + 1.0 / r >= 1.0 - 1e-12)
    throw std::invalid_argument(
        "triangle_group: (p,q,r) is not a hyperbolic triple");

  const double pi = std::acos(-1.0);
  Mat gram = Mat::Identity(3, 3);
  gram(0, 1) = gram(1, 0) = -std::cos(pi / p);
  gram(1, 2) = gram(2, 1) = -std::cos(pi / q);
  gram(0, 2) = gram(2, 0) = -std::cos(pi / r);

  // Congruence taking the Gram form to diag(1, 1, -1): gram = S J S^T
  // with the negative eigendirection placed last.
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  const Vec lambda = eig.eigenvalues();  // ascending; lambda(0) < 0
  if (!(lambda(0) < 0 && lambda(1) > 0))
    throw std::runtime_error("triangle_group: unexpected Gram signature");
  Mat s(3, 3);
  s.col(0) = eig.eigenvectors().col(1) * std::sqrt(lambda(1));
  s.col(1) = eig.eigenvectors().col(2) * std::sqrt(lambda(2));
  s.col(2) = eig.eigenvectors().col(0) * std::sqrt(-lambda(0));
  const Mat st = s.transpose();
  const Mat st_inv = st.inverse();

  Mat form = Mat::Identity(3, 3);
  form(2, 2) = -1.0;

  std::vector<Mat> refl(3);
  for (int i = 0; i < 3; ++i) {
    refl[i] = st * reflection_in_basis_vector(gram, i) * st_inv;
    if ((refl[i] * refl[i] - Mat::Identity(3, 3)).norm() > 1e-10)
      throw std::runtime_error("triangle_group: reflection is not involutive");
    if ((refl[i].transpose() * form * refl[i] - form).norm() > 1e-9)
      throw std::runtime_error("triangle_group: form preservation failed");
  }
  const int orders[3] = {p, q, r};
  const std::pair<int, int> pairs[3] = {{0, 1}, {1, 2}, {0, 2}};
  for (int k = 0; k < 3; ++k) {
    Mat rot = refl[pairs[k].first] * refl[pairs[k].second];
    Mat pw = Mat::Identity(3, 3);
    for (int n = 0; n < orders[k]; ++n) pw = pw * rot;
    if ((pw - Mat::Identity(3, 3)).norm() > 1e-8)
      throw std::runtime_error("triangle_group: rotation order check failed");
  }

  std::vector<ProjectiveMap> gens;
  gens.emplace_back(refl[0], "a");
  gens.emplace_back(refl[1], "b");
  gens.emplace_back(refl[2], "c");
  return MatrixGroup(std::move(gens), klein_model(3), cfg);
}

MatrixGroup schottky_group(double t1, double t2, double axis_angle,
                           const Config& cfg) {
  if (!(t1 > 0) || !(t2 > 0))
    throw std::invalid_argument(
        "schottky_group: translation lengths must be positive");
  const Mat g1 = boost_x(t1);
  const Mat g2 = rot_xy(axis_angle) * boost_x(t2) * rot_xy(-axis_angle);

  // Fixed points of the translations on the circle at infinity, in the
  // disk chart.
  const Eigen::Vector2d f1p(1.0, 0.0), f1m(-1.0, 0.0);
  const Eigen::Vector2d f2p(std::cos(axis_angle), std::sin(axis_angle));
  const Eigen::Vector2d f2m = -f2p;
  const Eigen::Vector2d centers[4] = {f1p, f1m, f2p, f2m};

  double min_sep = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    for (int k = i + 1; k < 4; ++k)
      min_sep = std::min(min_sep, (centers[i] - centers[k]).norm());
  if (min_sep < 1e-6)
    throw std::invalid_argument("schottky_group: the axes coincide");
  const double rho = 0.4 * min_sep;

  // Ping-pong certificate: each generator must map every disk other
  // than its repelling one strictly inside its attracting disk.
  struct Move {
    Mat map;
    int target;     // attracting disk index
    int forbidden;  // repelling disk index
  };
  const Move moves[4] = {{g1, 0, 1},
                         {g1.inverse(), 1, 0},
                         {g2, 2, 3},
                         {g2.inverse(), 3, 2}};
  const double pi = std::acos(-1.0);
  for (const Move& mv : moves) {
    for (int disk = 0; disk < 4; ++disk) {
      if (disk == mv.forbidden) continue;
      for (int sample = 0; sample <= 32; ++sample) {
        Eigen::Vector2d y = centers[disk];
        if (sample < 32) {
          const double phi = 2 * pi * sample / 32;
          y += rho * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        }
        Vec lift(3);
        lift << y(0), y(1), 1.0;
        Eigen::Vector2d image;
        try {
          image = disk_chart(mv.map * lift);
        } catch (const std::runtime_error&) {
          throw std::invalid_argument(
              "schottky_group: ping-pong certificate failed (chart overflow); "
              "increase the translation lengths");
        }
        if ((image - centers[mv.target]).norm() >= rho)
          throw std::invalid_argument(
              "schottky_group: ping-pong certificate failed; increase the "
              "translation lengths");
      }
    }
  }

  std::vector<ProjectiveMap> gens;
  gens.emplace_back(g1, "s");
  gens.emplace_back(g2, "t");
  return MatrixGroup(std::move(gens), klein_model(3), cfg);
}

// ---------------------------------------------------------------------------

std::vector<std::string> example_names() {
  return {"simplex-z2",    "simplex-z3",    "klein3", "klein4",
          "triangle-2-3-7", "triangle-3-3-4", "schottky"};
}

ExampleInstance make_example(const std::string& name, const Config& cfg) {
  auto simplex_basis = [](int d) {
    std::vector<Vec> basis;
    for (int i = 0; i < d - 1; ++i) {
      Vec v = Vec::Zero(d);
      v(i) = 1.0;
      v(d - 1) = -1.0;
      basis.push_back(v);
    }
    return basis;
  };

  ExampleSpec spec;
  spec.name = name;
  if (name == "simplex-z2" || name == "simplex-z3") {
    const int d = name == "simplex-z2" ? 3 : 4;
    spec.dimension = d;
    spec.exponent_basis = simplex_basis(d);
    auto [dom, group] = standard_simplex_with_lattice(d, spec.exponent_basis,
                                                      cfg);
    return ExampleInstance{std::move(spec), std::move(dom), std::move(group)};
  }
  if (name.rfind("klein", 0) == 0) {
    const int d = std::atoi(name.c_str() + 5);
    if (d >= 2) {
      spec.dimension = d;
      return ExampleInstance{std::move(spec), klein_model(d), std::nullopt};
    }
  }
  if (name.rfind("triangle-", 0) == 0) {
    int p = 0, q = 0, r = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream in(name.substr(9));
    if (in >> p >> dash1 >> q >> dash2 >> r && dash1 == '-' && dash2 == '-') {
      spec.dimension = 3;
      spec.triangle = {p, q, r};
      return ExampleInstance{std::move(spec), klein_model(3),
                             triangle_group(p, q, r, cfg)};
    }
  }
  if (name == "schottky") {
    spec.dimension = 3;
    spec.t1 = spec.t2 = 4.0;
    spec.axis_angle = std::acos(-1.0) / 2;
    return ExampleInstance{std::move(spec), klein_model(3),
                           schottky_group(spec.t1, spec.t2, spec.axis_angle,
                                          cfg)};
  }
  std::ostringstream msg;
  msg << "unknown example \"" << name << "\"; available:";
  for (const std::string& n : example_names()) msg << ' ' << n;
  throw std::invalid_argument(msg.str());
}

}  // namespace cvx
