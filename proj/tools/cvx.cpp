// Command-line front end: construct example domains/groups, run orbit,
// limit-set, Cartan, expansion and normalization computations, export
// CSV/JSON/SVG. Exit codes: 0 success, 1 check failed, 2 usage error.

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <span>

#include "cvxproj/examples.hpp"
#include "cvxproj/expansion.hpp"
#include "cvxproj/render.hpp"
#include "cvxproj/serialize.hpp"

namespace {

using namespace cvx;

void emit(const std::string& out_path, const std::string& bytes) {
  if (out_path.empty() || out_path == "-")
    std::cout << bytes;
  else
    write_file(out_path, bytes);
}

std::vector<std::string> point_cells(const Vec& v) {
  std::vector<std::string> cells;
  cells.reserve(v.size());
  for (int i = 0; i < v.size(); ++i) cells.push_back(format_double(v(i)));
  return cells;
}

struct Common {
  std::string example;
  std::string out;
  std::uint64_t seed = default_config().seed;
  double tol = default_config().boundary_tol;

  Config config() const {
    Config cfg;
    cfg.seed = seed;
    cfg.boundary_tol = tol;
    return cfg;
  }
  ExampleInstance instance() const { return make_example(example, config()); }
  void attach(CLI::App* app, bool needs_example = true) {
    auto* opt = app->add_option("--example", example, "example preset name");
    if (needs_example) opt->required();
    app->add_option("--out", out, "output path (default stdout)");
    app->add_option("--seed", seed, "sampling seed");
    app->add_option("--tol", tol, "boundary classification tolerance");
  }
};

const MatrixGroup& require_group(const ExampleInstance& inst) {
  if (!inst.group)
    throw CLI::ValidationError("--example",
                               "example \"" + inst.spec.name +
                                   "\" has no group");
  return *inst.group;
}

// Stable face identifiers by order of first appearance of the carrier.
struct FaceIds {
  std::map<std::vector<int>, int> by_carrier;
  int id(const FaceDescriptor& f) {
    auto [it, inserted] =
        by_carrier.try_emplace(f.carrier, static_cast<int>(by_carrier.size()));
    (void)inserted;
    return it->second;
  }
};

std::vector<std::string> limitset_header(int d) {
  std::vector<std::string> header;
  for (int i = 1; i <= d; ++i) header.push_back("x" + std::to_string(i));
  header.insert(header.end(), {"word", "face_dim", "face_id"});
  return header;
}

int cmd_example(const Common& common) {
  const ExampleInstance inst = common.instance();
  Json out;
  out["name"] = inst.spec.name;
  out["domain"] = domain_to_json(inst.domain);
  if (inst.group) out["group"] = group_to_json(*inst.group, inst.spec.name);
  emit(common.out, out.dump(2) + "\n");
  return 0;
}

int cmd_orbit(const Common& common, int len) {
  const ExampleInstance inst = common.instance();
  const OrbitCloud cloud = orbit(require_group(inst), inst.domain,
                                 {inst.domain.center()}, len, common.config());
  const int d = inst.domain.ambient();
  std::vector<std::string> header;
  for (int i = 1; i <= d; ++i) header.push_back("x" + std::to_string(i));
  header.insert(header.end(), {"word", "length"});
  CsvWriter csv(header);
  for (const OrbitEntry& e : cloud.entries) {
    std::vector<std::string> cells = point_cells(e.points[0].rep());
    cells.push_back(e.word);
    cells.push_back(std::to_string(e.word_length));
    csv.add_row(cells);
  }
  emit(common.out, csv.str());
  return 0;
}

LimitSetSample sample_for(const ExampleInstance& inst, int len, double eps,
                          const Config& cfg) {
  const std::vector<ProjPoint> basepoints =
      default_interior_points(inst.domain, 4, cfg.seed);
  return limit_set_sample(require_group(inst), inst.domain, basepoints, len,
                          eps, cfg);
}

int cmd_limitset(const Common& common, int len, double eps) {
  const ExampleInstance inst = common.instance();
  const LimitSetSample lam = sample_for(inst, len, eps, common.config());
  CsvWriter csv(limitset_header(inst.domain.ambient()));
  FaceIds ids;
  for (const LimitPoint& p : lam.points) {
    std::vector<std::string> cells = point_cells(p.point.rep());
    cells.push_back(p.word);
    cells.push_back(std::to_string(p.face.dim));
    cells.push_back(std::to_string(ids.id(p.face)));
    csv.add_row(cells);
  }
  emit(common.out, csv.str());
  return 0;
}

int cmd_core(const Common& common, int len, double eps) {
  const ExampleInstance inst = common.instance();
  const Config cfg = common.config();
  const LimitSetSample lam = sample_for(inst, len, eps, cfg);
  const HullResult core = convex_core_sample(inst.domain, lam, cfg);
  const Mat& lifts = core.hull.polytope().vertex_lifts;
  std::vector<std::string> header;
  for (int i = 1; i <= lifts.cols(); ++i)
    header.push_back("x" + std::to_string(i));
  header.push_back("ideal");
  CsvWriter csv(header);
  for (int i = 0; i < lifts.rows(); ++i) {
    std::vector<std::string> cells = point_cells(lifts.row(i).transpose());
    cells.push_back("1");
    csv.add_row(cells);
  }
  emit(common.out, csv.str());
  return 0;
}

int cmd_cartan_trace(const Common& common, const std::string& word, int powers,
                     int k) {
  const ExampleInstance inst = common.instance();
  const MatrixGroup& group = require_group(inst);
  std::vector<std::string> words;
  std::string acc;
  for (int n = 1; n <= powers; ++n) {
    if (!acc.empty()) acc += ' ';
    acc += word;
    words.push_back(acc);
  }
  const std::vector<CartanVector> trace = cartan_trace(words, group);
  const int d = inst.domain.ambient();
  std::vector<std::string> header{"n"};
  for (int i = 1; i <= d; ++i) header.push_back("mu" + std::to_string(i));
  header.push_back("gap_k");
  CsvWriter csv(header);
  for (std::size_t n = 0; n < trace.size(); ++n) {
    std::vector<std::string> cells{std::to_string(n + 1)};
    for (int i = 0; i < d; ++i)
      cells.push_back(format_double(trace[n].mu(i)));
    cells.push_back(format_double(trace[n].gap(k)));
    csv.add_row(cells);
  }
  emit(common.out, csv.str());
  const GapGrowthReport rep = check_gap_growth(trace, k);
  return rep.gap_growth ? 0 : 1;
}

int cmd_expansion_check(const Common& common, double c, double r,
                        int max_len) {
  const ExampleInstance inst = common.instance();
  const Config cfg = common.config();
  std::vector<FaceDescriptor> faces;
  if (inst.domain.is_polytope()) {
    faces = enumerate_faces(inst.domain);
  } else {
    for (const ProjPoint& b : sample_boundary(inst.domain, 8, cfg.seed))
      faces.push_back(face_of(inst.domain, b, cfg));
  }
  const UniformExpansionReport rep = check_uniform_expansion_at_faces(
      require_group(inst), inst.domain, faces, c, r, max_len, cfg);
  Json out = Json::array();
  for (std::size_t i = 0; i < faces.size(); ++i) {
    if (rep.certificates[i]) {
      out.push_back(certificate_to_json(*rep.certificates[i]));
    } else {
      Json missing;
      missing["face"]["dim"] = faces[i].dim;
      missing["face"]["carrier"] = faces[i].carrier;
      missing["status"] = "no expanding element found";
      out.push_back(std::move(missing));
    }
  }
  emit(common.out, out.dump(2) + "\n");
  return rep.all_pass ? 0 : 1;
}

int cmd_pseudolox(const Common& common) {
  const ExampleInstance inst = common.instance();
  const ConvexDomain& dom = inst.domain;
  const Config cfg = common.config();

  FaceDescriptor f_minus = [&] {
    if (dom.is_polytope()) {
      for (const FaceDescriptor& f : enumerate_faces(dom))
        if (f.dim == dom.ambient() - 2) return f;
      throw std::runtime_error("no codimension-one face found");
    }
    return face_of(dom, sample_boundary(dom, 1, cfg.seed)[0], cfg);
  }();
  const ProjPoint x_target = dom.center();
  const ProjPoint x_plus = chord(dom, x_target, f_minus.witness, cfg).backward;
  const PseudoLoxSequence seq =
      make_general_pseudolox(dom, f_minus, x_plus, {}, x_target, cfg);

  // Singular value expansion ratios along the sequence.
  Mat eplus_rows(seq.v_plus.dim() + (seq.h0 ? seq.h0->dim() : 0),
                 dom.ambient());
  eplus_rows.topRows(seq.v_plus.dim()) = seq.v_plus.basis();
  if (seq.h0) eplus_rows.bottomRows(seq.h0->dim()) = seq.h0->basis();
  const ProjSubspace e_plus(eplus_rows);
  Json ratios = Json::array();
  bool increasing = true;
  double prev = 0.0;
  for (const ProjectiveMap& g : seq.maps) {
    const double ratio = sv_expansion_bound(g, seq.v_minus, e_plus);
    if (ratio <= prev) increasing = false;
    prev = ratio;
    ratios.push_back(ratio);
  }

  Json out;
  out["lambda"] = seq.lambda_schedule;
  out["K_radius"] = seq.k_radius;
  out["splitting_residual"] = splitting_residual(seq);
  out["sv_ratios"] = std::move(ratios);
  out["sv_ratios_increasing"] = increasing;
  emit(common.out, out.dump(2) + "\n");
  return increasing ? 0 : 1;
}

int cmd_relhyp_check(const Common& common, int len, double eps) {
  const ExampleInstance inst = common.instance();
  const Config cfg = common.config();
  const LimitSetSample lam = sample_for(inst, len, eps, cfg);
  const std::vector<SegmentCluster> segments = detect_segments(inst.domain, lam);
  Json out;
  out["limit_points"] = lam.points.size();
  Json segs = Json::array();
  for (const SegmentCluster& s : segments) {
    Json entry;
    entry["size"] = s.point_ids.size();
    entry["carrier"] = s.carrier;
    segs.push_back(std::move(entry));
  }
  out["segments"] = std::move(segs);
  emit(common.out, out.dump(2) + "\n");
  return 0;
}

int cmd_benzecri(const Common& common) {
  const ExampleInstance inst = common.instance();
  const NormalizationResult res = benzecri_normalize(
      PointedDomain(inst.domain, inst.domain.center()), common.config());
  Json out;
  out["map"] = matrix_to_json(res.map.mat());
  out["inner_radius"] = res.inner_radius;
  out["outer_radius"] = res.outer_radius;
  out["normalized"] = domain_to_json(res.normalized.domain);
  emit(common.out, out.dump(2) + "\n");
  return 0;
}

int cmd_render(const Common& common, int len, double eps) {
  const ExampleInstance inst = common.instance();
  if (inst.domain.ambient() != 3)
    throw CLI::ValidationError("--example", "render requires RP^2 data");
  const Config cfg = common.config();
  RenderData data;
  if (inst.group) {
    const LimitSetSample lam = sample_for(inst, len, eps, cfg);
    for (const LimitPoint& p : lam.points)
      data.points.push_back(chart_point(inst.domain, p.point));
    for (const SegmentCluster& s : detect_segments(inst.domain, lam))
      data.segments.emplace_back(chart_point(inst.domain, s.end_a),
                                 chart_point(inst.domain, s.end_b));
  }
  emit(common.out, render_chart_svg(inst.domain, data));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical toolkit for convex projective domains and their "
               "discrete symmetry groups"};
  app.require_subcommand(1);

  Common common;
  int len = 8, powers = 20, k = 1, max_len = 4;
  double eps = 1e-3, cexp = 2.0, rexp = 0.05;
  std::string word;

  auto* c_example = app.add_subcommand("example", "emit domain+group JSON");
  std::string example_name;
  c_example->add_option("name", example_name, "preset name")->required();
  c_example->add_option("--out", common.out, "output path");

  auto* c_orbit = app.add_subcommand("orbit", "orbit CSV of the center");
  common.attach(c_orbit);
  c_orbit->add_option("--len", len, "max word length");

  auto* c_limit = app.add_subcommand("limitset", "limit-set sample CSV");
  common.attach(c_limit);
  c_limit->add_option("--len", len, "max word length");
  c_limit->add_option("--eps", eps, "boundary proximity threshold");

  auto* c_core = app.add_subcommand("core", "convex-core hull vertices CSV");
  common.attach(c_core);
  c_core->add_option("--len", len, "max word length");
  c_core->add_option("--eps", eps, "boundary proximity threshold");

  auto* c_cartan = app.add_subcommand("cartan-trace",
                                      "Cartan projection of powers, CSV");
  common.attach(c_cartan);
  c_cartan->add_option("--word", word, "word in generator labels")->required();
  c_cartan->add_option("--powers", powers, "number of powers");
  c_cartan->add_option("--k", k, "gap index");

  auto* c_exp = app.add_subcommand("expansion-check",
                                   "uniform expansion certificates, JSON");
  common.attach(c_exp);
  std::string face_list = "all";
  c_exp->add_option("--face-list", face_list, "which faces (only: all)");
  c_exp->add_option("--C", cexp, "required expansion constant");
  c_exp->add_option("--r", rexp, "Grassmannian ball radius");
  c_exp->add_option("--max-len", max_len, "max word length");

  auto* c_plox = app.add_subcommand("pseudolox",
                                    "pseudo-loxodromic sequence diagnostics");
  common.attach(c_plox);

  auto* c_rel = app.add_subcommand("relhyp-check",
                                   "segment/peripheral diagnostics, JSON");
  common.attach(c_rel);
  c_rel->add_option("--len", len, "max word length");
  c_rel->add_option("--eps", eps, "boundary proximity threshold");

  auto* c_ben = app.add_subcommand("benzecri", "normalize the pointed domain");
  common.attach(c_ben);

  auto* c_render = app.add_subcommand("render", "SVG chart plot");
  common.attach(c_render);
  c_render->add_option("--len", len, "max word length");
  c_render->add_option("--eps", eps, "boundary proximity threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(c_example)) {
      common.example = example_name;
      return cmd_example(common);
    }
    if (app.got_subcommand(c_orbit)) return cmd_orbit(common, len);
    if (app.got_subcommand(c_limit)) return cmd_limitset(common, len, eps);
    if (app.got_subcommand(c_core)) return cmd_core(common, len, eps);
    if (app.got_subcommand(c_cartan))
      return cmd_cartan_trace(common, word, powers, k);
    if (app.got_subcommand(c_exp)) {
      if (face_list != "all")
        throw CLI::ValidationError("--face-list", "only \"all\" is supported");
      return cmd_expansion_check(common, cexp, rexp, max_len);
    }
    if (app.got_subcommand(c_plox)) return cmd_pseudolox(common);
    if (app.got_subcommand(c_rel)) return cmd_relhyp_check(common, len, eps);
    if (app.got_subcommand(c_ben)) return cmd_benzecri(common);
    if (app.got_subcommand(c_render)) return cmd_render(common, len, eps);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
