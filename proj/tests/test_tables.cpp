#include <doctest.h>

#include <cmath>
#include <limits>

#include "contagion/csv.hpp"
#include "contagion/svg.hpp"

using namespace contagion;

TEST_CASE("csv round trip with quoting") {
  Table t{{"name", "value"}, {}};
  t.add_row({"plain", "1"});
  t.add_row({"with,comma", "2"});
  t.add_row({"say \"hi\"", "3"});
  t.add_row({"two\nlines", ""});
  const std::string text = to_csv(t);
  Table back = parse_csv(text);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(to_csv(back) == text);
  CHECK_THROWS_AS(t.add_row({"short"}), std::logic_error);
}

TEST_CASE("csv numbers and formatting") {
  CHECK(fmt(0.1) == "0.1");
  CHECK(fmt(std::size_t(42)) == "42");
  CHECK(fmt(std::optional<double>{}) == "");
  CHECK(fmt(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(fmt(-std::numeric_limits<double>::infinity()) == "-inf");
  Table t = parse_csv("x,y\r\n1,2.5\r\n3,\r\n");
  auto y = t.numbers(t.column("y"));
  CHECK(y[0] == 2.5);
  CHECK(std::isnan(y[1]));
  CHECK_THROWS_AS(t.column("z"), std::out_of_range);
}

TEST_CASE("csv errors name the line") {
  try {
    parse_csv("a,b\n1,2\n3\n");
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.line() == 3);
  }
  try {
    parse_csv("a\n\"open\n");
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(std::string(e.what()).find("unterminated") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv(""), CsvError);
  Table t = parse_csv("a\nfoo\n");
  try {
    t.numbers(0);
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("svg output is deterministic and escaped") {
  Series s{"a<b", {0, 1, 2}, {1, 4, 9}};
  const std::string one = svg_line_plot({"t & u", "x", "y"}, {&s, 1});
  CHECK(one == svg_line_plot({"t & u", "x", "y"}, {&s, 1}));
  CHECK(one.rfind("<svg", 0) == 0);
  CHECK(one.find("t &amp; u") != std::string::npos);
  CHECK(one.find("a&lt;b") != std::string::npos);
  CHECK(one.find("<path") != std::string::npos);
}

TEST_CASE("svg with no data draws axes only") {
  const std::string empty = svg_line_plot({"empty", "x", "y"}, {});
  CHECK(empty.find("<line") != std::string::npos);
  CHECK(empty.find("<path") == std::string::npos);
  CHECK(empty.find("<circle") == std::string::npos);
  const std::string hist = svg_histogram({"empty", "x", "y"}, Histogram{});
  CHECK(hist.find("data-count") == std::string::npos);
}

TEST_CASE("svg histogram has one bar per bin") {
  Histogram h = histogram(std::vector<double>{1, 1, 2, 3, 3, 3}, 3);
  const std::string svg = svg_histogram({"h", "x", "n"}, h);
  CHECK(svg.find("data-count=\"2\"") != std::string::npos);
  CHECK(svg.find("data-count=\"1\"") != std::string::npos);
  CHECK(svg.find("data-count=\"3\"") != std::string::npos);
  std::size_t bars = 0;
  for (auto p = svg.find("data-count"); p != std::string::npos; p = svg.find("data-count", p + 1)) ++bars;
  CHECK(bars == 3);
}
