#pragma once

#include <string>
#include <vector>

#include "cvxproj/examples.hpp"
#include "cvxproj/expansion.hpp"

#include <json.hpp>

namespace cvx {

using Json = nlohmann::ordered_json;

/// Full-precision (17 significant digits) decimal rendering, locale
/// independent; shared by the CSV and JSON writers.
std::string format_double(double x);

Json matrix_to_json(const Mat& m);  // row-major nested arrays
Mat matrix_from_json(const Json& j);

/// {kind, d, vertices|form, facets?}
Json domain_to_json(const ConvexDomain& dom);
ConvexDomain domain_from_json(const Json& j);

/// {d, generators: [{label, matrix}], domain_ref}
Json group_to_json(const MatrixGroup& group, const std::string& domain_ref);
MatrixGroup group_from_json(const Json& j, std::optional<ConvexDomain> hint,
                            const Config& cfg = default_config());

/// {face, word, C, r, method, seed, measured}
Json certificate_to_json(const ExpansionCertificate& cert);

/// CSV with LF line endings and full-precision numeric cells.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::string out_;
  std::size_t columns_ = 0;
};

/// Writes a UTF-8 file with the exact given bytes; throws on failure.
void write_file(const std::string& path, const std::string& bytes);

}  // namespace cvx
