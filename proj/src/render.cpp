#include "cvxproj/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cvxproj/serialize.hpp"

namespace cvx {

namespace {

std::vector<Eigen::Vector2d> boundary_outline(const ConvexDomain& dom) {
  const Chart& ch = dom.chart();
  std::vector<Eigen::Vector2d> outline;
  if (dom.is_polytope()) {
    const Mat& lifts = dom.polytope().vertex_lifts;
    for (int i = 0; i < lifts.rows(); ++i) {
      const Vec y = ch.to_chart(Vec(lifts.row(i).transpose()));
      outline.emplace_back(y(0), y(1));
    }
    // Order the polygon by angle about the vertex centroid.
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& y : outline) c += y;
    c /= static_cast<double>(outline.size());
    std::sort(outline.begin(), outline.end(),
              [&](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
                return std::atan2(u(1) - c(1), u(0) - c(0)) <
                       std::atan2(v(1) - c(1), v(0) - c(0));
              });
  } else {
    const double pi = std::acos(-1.0);
    const Vec yc = ch.to_chart(dom.center());
    for (int k = 0; k < 256; ++k) {
      const double phi = 2 * pi * k / 256;
      Vec dir(2);
      dir << std::cos(phi), std::sin(phi);
      const ProjPoint target = ch.from_chart(yc + dir);
      const ProjPoint b = chord(dom, dom.center(), target).forward;
      const Vec y = ch.to_chart(b);
      outline.emplace_back(y(0), y(1));
    }
  }
  return outline;
}

}  // namespace

Eigen::Vector2d chart_point(const ConvexDomain& dom, const ProjPoint& p) {
  if (dom.ambient() != 3)
    throw std::invalid_argument("chart_point: rendering requires RP^2 data");
  const Vec y = dom.chart().to_chart(p);
  return {y(0), y(1)};
}

std::string render_chart_svg(const ConvexDomain& dom, const RenderData& data) {
  if (dom.ambient() != 3)
    throw std::invalid_argument(
        "render_chart_svg: rendering requires RP^2 data");
  const std::vector<Eigen::Vector2d> outline = boundary_outline(dom);

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto extend = [&](const Eigen::Vector2d& y) {
    xmin = std::min(xmin, y(0));
    xmax = std::max(xmax, y(0));
    ymin = std::min(ymin, y(1));
    ymax = std::max(ymax, y(1));
  };
  for (const auto& y : outline) extend(y);
  for (const auto& y : data.points) extend(y);
  for (const auto& [a, b] : data.segments) {
    extend(a);
    extend(b);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-6});
  const double margin = 0.05 * span;
  xmin -= margin;
  ymin -= margin;
  xmax += margin;
  ymax += margin;

  // SVG y axis points down; emit flipped y coordinates.
  auto px = [&](double v) { return format_double(v); };
  auto py = [&](double v) { return format_double(-v); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"640\" viewBox=\""
      << px(xmin) << ' ' << py(ymax) << ' ' << format_double(xmax - xmin)
      << ' ' << format_double(ymax - ymin) << "\">\n";

  svg << "<polygon points=\"";
  for (std::size_t i = 0; i < outline.size(); ++i) {
    if (i) svg << ' ';
    svg << px(outline[i](0)) << ',' << py(outline[i](1));
  }
  svg << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\""
      << format_double(0.004 * span) << "\"/>\n";

  for (const auto& [a, b] : data.segments)
    svg << "<line x1=\"" << px(a(0)) << "\" y1=\"" << py(a(1)) << "\" x2=\""
        << px(b(0)) << "\" y2=\"" << py(b(1))
        << "\" stroke=\"#d62728\" stroke-width=\""
        << format_double(0.006 * span) << "\"/>\n";

  for (const auto& y : data.points)
    svg << "<circle cx=\"" << px(y(0)) << "\" cy=\"" << py(y(1)) << "\" r=\""
        << format_double(0.006 * span) << "\" fill=\"#1f77b4\"/>\n";

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cvx
