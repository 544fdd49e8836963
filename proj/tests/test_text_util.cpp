#include "doctest.h"

#include "geollm/error.hpp"
#include "geollm/text_util.hpp"
#include "support.hpp"

using namespace geollm;

TEST_CASE("format_compact trims binary noise and trailing zeros") {
  CHECK(format_compact(5.14 * 35.0 * 1.11) == "199.689");
  CHECK(format_compact(35.0) == "35");
  CHECK(format_compact(-0.0) == "0");
  CHECK(format_compact(0.1 + 0.2) == "0.3");
  CHECK(format_compact(1234.5678, 6) == "1234.57");
}

TEST_CASE("format_with_decimal keeps one decimal and round-trips") {
  CHECK(format_with_decimal(50.0) == "50.0");
  CHECK(format_with_decimal(11.9) == "11.9");
  CHECK(parse_double(format_with_decimal(0.1 + 0.2)).value() == 0.1 + 0.2);
  CHECK(format_shortest(0.1) == "0.1");
}

TEST_CASE("strict number parsing") {
  CHECK(parse_double(" 12.5 ").value() == 12.5);
  CHECK(parse_double("+3").value() == 3.0);
  CHECK_FALSE(parse_double("12kPa"));
  CHECK_FALSE(parse_double(""));
  CHECK(parse_integer("42").value() == 42);
  CHECK_FALSE(parse_integer("4.2"));
}

TEST_CASE("string helpers") {
  CHECK(trim("  a b \n") == "a b");
  CHECK(to_lower("ClAy") == "clay");
  CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  CHECK(starts_with("Action Tool:", "Action"));
  CHECK(utf8_length("φ = 20") == 6);
}

TEST_CASE("atomic write then read") {
  testing::TempDir dir("text");
  const auto p = dir / "x.txt";
  write_file_atomic(p, "one");
  write_file_atomic(p, "two");
  CHECK(read_file(p) == "two");
  CHECK_THROWS_AS(read_file(dir / "missing.txt"), IoError);
}
