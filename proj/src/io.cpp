#include "mvq/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace mvq {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, delim)) out.push_back(cur);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  if (b == e) return false;
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

}  // namespace

DataMatrix read_data_csv(const std::string& path, char delimiter) {
  std::ifstream f(path);
  if (!f) throw InvalidInputError("read_data_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split(line, delimiter);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& s : fields) {
      double v;
      if (!parse_double(s, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (lineno == 1 && rows.empty()) continue;  // header row
      throw InvalidInputError("read_data_csv: " + path + ":" +
                              std::to_string(lineno) + ": non-numeric field");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidInputError("read_data_csv: " + path + ":" +
                              std::to_string(lineno) + ": expected " +
                              std::to_string(rows.front().size()) + " fields, got " +
                              std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInputError("read_data_csv: " + path + ": no data rows");
  return DataMatrix::from_rows(rows);
}

SrsEnsemble read_srs_long_csv(const std::string& path, char delimiter) {
  std::ifstream f(path);
  if (!f) throw InvalidInputError("read_srs_long_csv: cannot open " + path);
  // frequency -> axis -> sample_id -> value
  std::map<double, std::map<std::string, std::map<long, double>>> table;
  std::vector<std::string> axis_order;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split(line, delimiter);
    if (fields.size() != 4)
      throw InvalidInputError("read_srs_long_csv: " + path + ":" +
                              std::to_string(lineno) + ": expected 4 fields");
    double freq, value;
    if (!parse_double(fields[0], freq)) {
      if (lineno == 1) continue;  // header
      throw InvalidInputError("read_srs_long_csv: " + path + ":" +
                              std::to_string(lineno) + ": bad frequency");
    }
    double sid_d;
    if (!parse_double(fields[1], sid_d) || !parse_double(fields[3], value))
      throw InvalidInputError("read_srs_long_csv: " + path + ":" +
                              std::to_string(lineno) + ": bad numeric field");
    std::string axis = fields[2];
    while (!axis.empty() && (axis.back() == '\r' || axis.back() == ' ')) axis.pop_back();
    if (std::find(axis_order.begin(), axis_order.end(), axis) == axis_order.end())
      axis_order.push_back(axis);
    table[freq][axis][static_cast<long>(sid_d)] = value;
  }
  if (table.empty())
    throw InvalidInputError("read_srs_long_csv: " + path + ": no data rows");

  SrsEnsemble out;
  out.axis_labels = axis_order;
  for (const auto& [freq, axes] : table) {
    if (axes.size() != axis_order.size())
      throw InvalidInputError("read_srs_long_csv: frequency " + std::to_string(freq) +
                              " is missing axes");
    std::size_t n = axes.begin()->second.size();
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(axis_order.size()));
    for (std::size_t a = 0; a < axis_order.size(); ++a) {
      const auto& samples = axes.at(axis_order[a]);
      if (samples.size() != n)
        throw InvalidInputError("read_srs_long_csv: ragged samples at frequency " +
                                std::to_string(freq));
      Eigen::Index r = 0;
      for (const auto& [sid, v] : samples)
        m(r++, static_cast<Eigen::Index>(a)) = v;
    }
    out.frequencies.push_back(freq);
    out.data.emplace_back(std::move(m));
  }
  return out;
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  std::ofstream f(path);
  if (!f) throw InvalidInputError("write_matrix_csv: cannot open " + path);
  f.precision(12);
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i)
      f << (i ? "," : "") << header[i];
    f << "\n";
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) f << (j ? "," : "") << m(i, j);
    f << "\n";
  }
}

}  // namespace mvq
