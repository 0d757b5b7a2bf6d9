#include "cvxproj/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cvx {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("matrix_from_json: expected nested arrays");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw std::invalid_argument("matrix_from_json: ragged rows");
    for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Json domain_to_json(const ConvexDomain& dom) {
  Json out;
  out["kind"] = dom.is_polytope() ? "polytope" : "ellipsoid";
  out["d"] = dom.ambient();
  if (dom.is_polytope()) {
    out["vertices"] = matrix_to_json(dom.polytope().vertex_lifts);
    out["facets"] = matrix_to_json(dom.polytope().facet_functionals);
  } else {
    out["form"] = matrix_to_json(dom.ellipsoid_rep().form);
  }
  return out;
}

ConvexDomain domain_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "polytope")
    return ConvexDomain::polytope_from_vertices(
        matrix_from_json(j.at("vertices")));
  if (kind == "ellipsoid")
    return ConvexDomain::ellipsoid(matrix_from_json(j.at("form")));
  throw std::invalid_argument("domain_from_json: unknown kind \"" + kind +
                              "\"");
}

Json group_to_json(const MatrixGroup& group, const std::string& domain_ref) {
  Json out;
  out["d"] = group.ambient();
  Json gens = Json::array();
  for (const ProjectiveMap& g : group.generators()) {
    Json entry;
    entry["label"] = g.label();
    entry["matrix"] = matrix_to_json(g.mat());
    gens.push_back(std::move(entry));
  }
  out["generators"] = std::move(gens);
  out["domain_ref"] = domain_ref;
  return out;
}

MatrixGroup group_from_json(const Json& j, std::optional<ConvexDomain> hint,
                            const Config& cfg) {
  std::vector<ProjectiveMap> gens;
  for (const Json& entry : j.at("generators"))
    gens.emplace_back(matrix_from_json(entry.at("matrix")),
                      entry.value("label", std::string()));
  return MatrixGroup(std::move(gens), std::move(hint), cfg);
}

Json certificate_to_json(const ExpansionCertificate& cert) {
  Json face;
  face["dim"] = cert.face.dim;
  face["carrier"] = cert.face.carrier;
  face["witness"] = [&] {
    Json w = Json::array();
    for (int i = 0; i < cert.face.witness.rep().size(); ++i)
      w.push_back(cert.face.witness.rep()(i));
    return w;
  }();
  Json out;
  out["face"] = std::move(face);
  out["word"] = cert.word;
  out["C"] = cert.constant;
  out["r"] = cert.radius;
  out["method"] = cert.method;
  out["metric"] = cert.metric;
  out["seed"] = cert.seed;
  out["samples"] = cert.samples;
  out["measured"] = cert.constant;
  out["required_C"] = cert.required_c;
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header)
    : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::invalid_argument("CsvWriter: wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    out_ += cells[i];
  }
  out_ += '\n';
}

std::string CsvWriter::str() const { return out_; }

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace cvx
