#include "wiplab/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wiplab/common.hpp"

namespace wiplab
{

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string & path, const std::vector<std::string> & comments,
               const std::vector<std::string> & columns, const Eigen::MatrixXd & rows)
{
  std::ofstream f(path);
  if (!f) {
    throw ConfigError("write_csv: cannot open " + path);
  }
  for (const auto & c : comments) {
    f << "# " << c << "\n";
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    f << (i ? "," : "") << columns[i];
  }
  f << "\n";
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      f << (c ? "," : "") << format_double(rows(r, c));
    }
    f << "\n";
  }
  if (!f) {
    throw ConfigError("write_csv: write failed for " + path);
  }
}

Eigen::MatrixXd read_csv(const std::string & path)
{
  std::ifstream f(path);
  if (!f) {
    throw ConfigError("read_csv: cannot open " + path);
  }
  std::vector<std::vector<double>> data;
  std::string line;
  bool header_skipped = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char * end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (header_skipped) {
        throw ConfigError("read_csv: malformed row in " + path);
      }
      header_skipped = true;
      continue;
    }
    if (!data.empty() && row.size() != data.front().size()) {
      throw ConfigError("read_csv: ragged rows in " + path);
    }
    data.push_back(std::move(row));
  }
  if (data.empty()) {
    return Eigen::MatrixXd(0, 0);
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(data.size()),
                    static_cast<Eigen::Index>(data.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = data[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  return m;
}

}  // namespace wiplab
