#include "doctest.h"

#include "geollm/error.hpp"
#include "geollm/soil.hpp"
#include "geollm/soil_io.hpp"
#include "support.hpp"

using namespace geollm;

TEST_CASE("sample validation") {
  SoilSample s;
  s.pass_sieve4 = 40;
  s.pass_sieve200 = 50;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.pass_sieve200 = 10;
  s.validate();
  CHECK(s.gravel_percent() == doctest::Approx(60));
  CHECK(s.sand_percent() == doctest::Approx(30));
  s.d10 = 0.5;
  s.d30 = 0.2;
  s.d60 = 1.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.d30 = 0.6;
  s.liquid_limit = 20;
  s.plastic_limit = 25;
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("index properties") {
  SoilSample s;
  s.liquid_limit = 60;
  s.plastic_limit = 50;
  s.d10 = 0.1;
  s.d30 = 0.3;
  s.d60 = 0.6;
  const auto p = derive_index_properties(s);
  CHECK(*p.plasticity_index == doctest::Approx(10));
  CHECK(*p.cu == doctest::Approx(6));
  CHECK(*p.cc == doctest::Approx(1.5));
  CHECK(a_line(60) == doctest::Approx(29.2));
  s.d10 = 0.0;
  CHECK_THROWS_AS(derive_index_properties(s), ValidationError);
}

TEST_CASE("profile ordering and layer lookup") {
  SoilLayer a{0, -5, "Sandy silt", {}, 18.5, 28, {}};
  SoilLayer b{-5, -17.5, "Clay", 35.0, 17.5, {}, {}};
  SoilProfile p({b, a});
  CHECK(p.layers().front().material == "Sandy silt");
  CHECK(p.layer_at(-5)->material == "Clay");
  CHECK(p.layer_at(-17.5)->material == "Clay");
  CHECK(p.layer_at(-2)->material == "Sandy silt");
  CHECK(p.layer_at(1) == nullptr);
  CHECK(p.layer_at(-18) == nullptr);
  CHECK(p.find_layer("clay") != nullptr);
  CHECK(p.find_layer("gravel") == nullptr);

  SoilLayer gap{-6, -10, "Sand", {}, {}, {}, {}};
  CHECK_THROWS_AS(SoilProfile({a, gap}), ValidationError);
  SoilLayer overlap{-4, -10, "Sand", {}, {}, {}, {}};
  CHECK_THROWS_AS(SoilProfile({a, overlap}), ValidationError);
  SoilLayer inverted{-10, -5, "Sand", {}, {}, {}, {}};
  CHECK_THROWS_AS(SoilProfile({inverted}), ValidationError);
}

TEST_CASE("foundations") {
  CHECK(Foundation::circular(20).plan_area() == doctest::Approx(314.159265));
  CHECK(Foundation::rectangular(2, 3).plan_area() == doctest::Approx(6));
  CHECK_THROWS_AS(Foundation::rectangular(3, 2), ValidationError);
  CHECK(parse_shape("Circular") == FoundationShape::kCircular);
  CHECK_FALSE(parse_shape("hexagon"));
}

TEST_CASE("sample records in text and JSON") {
  const auto text = read_samples_text(
      "# comment\nid=a pass4=100 pass200=60 ll=30 pl=10\nid=\"b c\" pass_sieve4=30 pass_sieve200=2 "
      "d10=0.5 d30=3 d60=10\n");
  REQUIRE(text.size() == 2);
  CHECK(text[0].id == "a");
  CHECK(*text[0].sample.liquid_limit == 30);
  CHECK(text[1].id == "b c");
  CHECK(*text[1].sample.d60 == 10);
  CHECK_THROWS_AS(read_samples_text("pass4=abc"), ParseError);

  const auto js = read_samples_json(R"([{"id":"x","pass_sieve4":100,"pass_sieve200":70}])");
  REQUIRE(js.size() == 1);
  CHECK_FALSE(js[0].sample.liquid_limit);
  const auto lines = read_samples_json("{\"pass_sieve200\":1}\n{\"pass_sieve200\":2}\n");
  CHECK(lines.size() == 2);

  const auto round = sample_from_json(to_json(text[1].sample));
  CHECK(round == text[1].sample);
}

TEST_CASE("profile files") {
  const auto p = load_profile(testing::fixtures() / "reports" / "pisa_report.profile");
  REQUIRE(p.layers().size() == 3);
  CHECK(p.layers()[1].material == "Clay");
  CHECK(*p.layers()[1].undrained_strength == 35);
  const auto graded = load_profile(testing::fixtures() / "reports" / "graded_clay.profile");
  CHECK(graded.layers()[0].su_points.size() == 2);
  CHECK(read_profile_json(to_json(graded).dump()) == graded);
  CHECK_THROWS_AS(read_profile_text("point elevation=0 su=1\n"), ParseError);
}
