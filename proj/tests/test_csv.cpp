#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "esenc/csv.hpp"
#include "esenc/rng.hpp"
#include "esenc/types.hpp"

using namespace esenc;

TEST_CASE("doubles round-trip through the 17-digit format") {
  CounterRng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.next_normal() * std::pow(10.0, int(rng.next_uniform() * 20) - 10);
    const std::string s = csv::format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(csv::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("tables parse and expose columns") {
  std::istringstream is("t,y,e1\n0,1.5,-2\n1,-0.25,-3\n");
  const csv::Table table = csv::read_table(is);
  CHECK(table.rows() == 2);
  CHECK(table.has_column("y"));
  CHECK_FALSE(table.has_column("q1"));
  CHECK(table.vector("e1")[1] == -3.0);
  CHECK_THROWS_AS(table.column("nope"), data_error);
}

TEST_CASE("parse errors name the offending row and field") {
  std::istringstream bad_field("t,y\n0,abc\n");
  try {
    csv::read_table(bad_field);
    FAIL("expected a parse error");
  } catch (const data_error& ex) {
    const std::string msg = ex.what();
    CHECK(msg.find("row 1") != std::string::npos);
    CHECK(msg.find("'y'") != std::string::npos);
  }
  std::istringstream short_row("t,y\n0\n");
  CHECK_THROWS_AS(csv::read_table(short_row), data_error);
  std::istringstream empty("");
  CHECK_THROWS_AS(csv::read_table(empty), data_error);
}

TEST_CASE("windows line endings are tolerated") {
  std::istringstream is("t,y\r\n0,1.5\r\n");
  const csv::Table table = csv::read_table(is);
  CHECK(table.vector("y")[0] == 1.5);
}

TEST_CASE("forecast csv writes the documented headers") {
  Eigen::VectorXd y(2), e1(2), e2(2), q(2);
  y << 0.5, -1.0;
  e1 << -2.0, -2.1;
  e2 << -3.0, -3.1;
  q << -1.5, -1.6;
  std::ostringstream with_q;
  csv::write_forecast_csv(with_q, y, q, q, e1, e2);
  CHECK(with_q.str().rfind("t,y,q1,e1,q2,e2\n", 0) == 0);
  std::ostringstream es_only;
  csv::write_forecast_csv(es_only, y, std::nullopt, std::nullopt, e1, e2);
  CHECK(es_only.str().rfind("t,y,e1,e2\n", 0) == 0);

  // round-trip through the reader
  std::istringstream back(with_q.str());
  const csv::Table table = csv::read_table(back);
  CHECK(table.vector("q1")[1] == -1.6);
  CHECK(table.vector("y")[0] == 0.5);
}
