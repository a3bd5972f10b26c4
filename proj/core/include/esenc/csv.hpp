#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace esenc::csv {

//! Shortest representation that round-trips a double exactly (17 significant
//! digits).
std::string format_double(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  bool has_column(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
  Eigen::VectorXd vector(const std::string& name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
};

//! Parses a comma-separated file with a header row; every field must be
//! numeric.  Errors name the offending row and field.
Table read_table(std::istream& is);
Table read_table_file(const std::string& path);

void write_forecast_csv(std::ostream& os, const Eigen::VectorXd& y,
                        const std::optional<Eigen::VectorXd>& q1,
                        const std::optional<Eigen::VectorXd>& q2,
                        const Eigen::VectorXd& e1, const Eigen::VectorXd& e2);

void write_matrix_csv(std::ostream& os, const std::vector<std::string>& labels,
                      const Eigen::MatrixXd& values);

}  // namespace esenc::csv
