#include "doctest.h"

#include "hubbard/config.hpp"

#include <cmath>
#include <limits>

using namespace hubbard;

TEST_CASE("emit and parse round trip") {
  RunConfig c;
  c.command = "evolve";
  c.graph = "chain";
  c.sites = 6;
  c.j = 0.1 + 0.2;  // not exactly representable as a short decimal
  c.u = 1.0 / 3.0;
  c.omega = 2.718281828459045;
  c.phi_max = 1e-300;
  c.scan_list = "0.05,0.1";
  c.initial = "ud,0,u,d,u,d";
  c.threads = 7;
  const std::string text = c.emit();
  const RunConfig back = RunConfig::parse(text);
  CHECK(back == c);
  CHECK(back.j == c.j);
  CHECK(back.u == c.u);
  CHECK(back.phi_max == c.phi_max);
  CHECK(back.emit() == text);
  CHECK(text.find("threads") == std::string::npos);
  CHECK(back.threads == 0);
}

TEST_CASE("merge applies overrides and ignores comments") {
  RunConfig c;
  c.merge("# scan sweep\n  j = 0.25 \n\nsites=6\nstatistics = fermion\n");
  CHECK(c.j == 0.25);
  CHECK(c.sites == 6);
  CHECK(c.statistics == "fermion");
  c.merge("threads = 3");
  CHECK(c.threads == 3);
}

TEST_CASE("bad config text") {
  RunConfig c;
  CHECK_THROWS_AS(c.merge("nonsense"), ConfigError);
  CHECK_THROWS_AS(c.merge("colour = red"), ConfigError);
  CHECK_THROWS_AS(c.merge("sites = 4.5"), ConfigError);
  CHECK_THROWS_AS(c.merge("j = abc"), ConfigError);
  CHECK_THROWS_AS(c.merge("j ="), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(parse_double(format_double(M_PI)) == M_PI);
  CHECK(parse_int(" 42 ") == 42);
  const auto list = parse_double_list("0.05, 0.1,0.2");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 0.1);
  CHECK(parse_double_list("").empty());
  CHECK_THROWS_AS(parse_double_list("0.1,,0.2"), ConfigError);
}
