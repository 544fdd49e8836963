#include "doctest.h"

#include "geollm/error.hpp"
#include "geollm/uscs.hpp"
#include "oracles/uscs_table_oracle.hpp"
#include "support.hpp"

using namespace geollm;

namespace {

SoilSample fines(double ll, double pl, double pass200 = 80) {
  SoilSample s;
  s.pass_sieve200 = pass200;
  s.liquid_limit = ll;
  s.plastic_limit = pl;
  return s;
}

SoilSample coarse(double pass4, double pass200, double d10, double d30, double d60) {
  SoilSample s;
  s.pass_sieve4 = pass4;
  s.pass_sieve200 = pass200;
  s.d10 = d10;
  s.d30 = d30;
  s.d60 = d60;
  return s;
}

std::string sym(const SoilSample& s) { return std::string(to_string(classify(s).symbol)); }

}  // namespace

TEST_CASE("worked fine-grained examples") {
  CHECK(sym(fines(60, 50)) == "MH");
  CHECK(sym(fines(30, 10, 60)) == "CL");
  CHECK(sym(fines(70, 20)) == "CH");
  CHECK(sym(fines(30, 25)) == "ML");
}

TEST_CASE("gravel branch") {
  CHECK(sym(coarse(30, 2, 0.5, 3, 10)) == "GW");
  CHECK(sym(coarse(30, 2, 0.5, 0.6, 10)) == "GP");   // Cc out of range
  auto dual = coarse(30, 8, 0.1, 1, 6);
  dual.liquid_limit = 25;
  dual.plastic_limit = 22;
  CHECK(sym(dual) == "GW-GM");
  dual.plastic_limit = 10;
  CHECK(sym(dual) == "GW-GC");
  auto dirty = coarse(30, 20, 0.1, 1, 6);
  dirty.liquid_limit = 40;
  dirty.plastic_limit = 30;
  CHECK(sym(dirty) == "GM");
}

TEST_CASE("boundaries") {
  // Cu must exceed the gate: 4 for gravel, 6 for sand.
  CHECK(sym(coarse(30, 2, 1, 2.1, 4)) == "GP");
  CHECK(sym(coarse(30, 2, 1, 2.3, 4.4)) == "GW");
  CHECK(sym(coarse(90, 2, 1, 2.5, 6)) == "SP");
  CHECK(sym(coarse(90, 2, 1, 2.7, 6.5)) == "SW");
  // 5% fines is already in the dual band; 50% is still coarse.
  auto five = coarse(30, 5, 0.5, 3, 10);
  CHECK_THROWS_AS(classify(five), ClassificationError);
  five.liquid_limit = 30;
  five.plastic_limit = 10;
  CHECK(sym(five) == "GW-GC");
  auto fifty = coarse(95, 50, 0.001, 0.01, 0.05);
  fifty.liquid_limit = 30;
  fifty.plastic_limit = 10;
  CHECK(sym(fifty) == "SC");
  // LL = 50 is high plasticity; PI exactly on the A-line is the dual symbol.
  CHECK(sym(fines(50, 10)) == "CH");
  CHECK(sym(fines(20, 20)) == "CL-ML");
  // Equal gravel and sand fractions classify as sand.
  CHECK(sym(coarse(50, 0, 1, 2.7, 6.5)) == "SW");
}

TEST_CASE("missing fields name the field") {
  auto s = fines(60, 50);
  s.plastic_limit.reset();
  try {
    classify(s);
    FAIL("expected ClassificationError");
  } catch (const ClassificationError& e) {
    CHECK(e.missing_field() == "plastic_limit");
  }
  auto c = coarse(30, 2, 0.5, 3, 10);
  c.d30.reset();
  CHECK_THROWS_AS(classify(c), ClassificationError);
}

TEST_CASE("symbol names round-trip") {
  for (std::size_t i = 0; i < kUscsSymbolCount; ++i) {
    const auto s = static_cast<UscsSymbol>(i);
    CHECK(parse_uscs_symbol(to_string(s)) == s);
  }
  CHECK_FALSE(parse_uscs_symbol("XX"));
}

TEST_CASE("classifier agrees with the table oracle on random samples") {
  const auto samples = testing::random_samples(20000, 7);
  std::size_t mismatches = 0;
  for (const auto& s : samples) {
    const auto expected = oracle::uscs_symbol(s);
    REQUIRE(expected.has_value());
    if (std::string(to_string(classify(s).symbol)) != *expected) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("parallel batch equals serial batch") {
  auto samples = testing::random_samples(3000, 11);
  samples[5].liquid_limit.reset();
  samples[9].pass_sieve200 = 101;
  const auto a = classify_batch(samples);
  const auto b = classify_batch_serial(samples);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ok() == b[i].ok());
    if (a[i].ok()) {
      CHECK(a[i].code->symbol == b[i].code->symbol);
      CHECK(a[i].code->rationale == b[i].code->rationale);
    }
    CHECK(a[i].error == b[i].error);
  }
  CHECK_FALSE(a[9].ok());
}
