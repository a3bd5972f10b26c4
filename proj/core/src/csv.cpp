#include "esenc/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "esenc/types.hpp"

namespace esenc::csv {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

bool Table::has_column(const std::string& name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return columns[i];
  }
  throw data_error("missing column '" + name + "'");
}

Eigen::VectorXd Table::vector(const std::string& name) const {
  const auto& col = column(name);
  return Eigen::Map<const Eigen::VectorXd>(col.data(), col.size());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Table read_table(std::istream& is) {
  Table table;
  std::string line;
  if (!std::getline(is, line)) throw data_error("empty input file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line);
  if (table.header.empty()) throw data_error("empty header row");
  table.columns.resize(table.header.size());

  std::size_t row = 1;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != table.header.size()) {
      throw data_error("row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(table.header.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(fields[c].c_str(), &end);
      if (end == fields[c].c_str() || *end != '\0') {
        throw data_error("row " + std::to_string(row) + ", field '" +
                         table.header[c] + "': cannot parse '" + fields[c] +
                         "' as a number");
      }
      table.columns[c].push_back(v);
    }
    ++row;
  }
  return table;
}

Table read_table_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open '" + path + "'");
  try {
    return read_table(is);
  } catch (const data_error& ex) {
    throw data_error(path + ": " + ex.what());
  }
}

void write_forecast_csv(std::ostream& os, const Eigen::VectorXd& y,
                        const std::optional<Eigen::VectorXd>& q1,
                        const std::optional<Eigen::VectorXd>& q2,
                        const Eigen::VectorXd& e1, const Eigen::VectorXd& e2) {
  if (q1.has_value()) {
    os << "t,y,q1,e1,q2,e2\n";
  } else {
    os << "t,y,e1,e2\n";
  }
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    os << t << ',' << format_double(y[t]);
    if (q1.has_value()) {
      os << ',' << format_double((*q1)[t]) << ',' << format_double(e1[t]) << ','
         << format_double((*q2)[t]) << ',' << format_double(e2[t]);
    } else {
      os << ',' << format_double(e1[t]) << ',' << format_double(e2[t]);
    }
    os << '\n';
  }
}

void write_matrix_csv(std::ostream& os, const std::vector<std::string>& labels,
                      const Eigen::MatrixXd& values) {
  os << "model";
  for (const auto& l : labels) os << ',' << l;
  os << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    os << labels[i];
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      os << ',';
      if (!std::isnan(values(i, j))) os << format_double(values(i, j));
    }
    os << '\n';
  }
}

}  // namespace esenc::csv
