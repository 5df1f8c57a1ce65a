#include "elyte/optimizer.hpp"
#include "elyte/reference_tables.hpp"

#include <doctest.h>

#include "support.hpp"

using namespace elyte;

namespace {

PredictionSet predictions(std::initializer_list<std::pair<const char*, double>> values) {
  PredictionSet s;
  s.as_of = parse_date("2024-05-01");
  for (const auto& [a, v] : values) s.entries.push_back({a, v, s.as_of, add_days(s.as_of, 1)});
  return s;
}

std::vector<MandatoryNutrient> example_requirements() {
  return default_mandatory_nutrients("4-8y", reference::example_patient_overrides());
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("high potassium lowers its maximum by ten percent") {
    const auto base = example_requirements();
    const auto out = optimize(base, predictions({{"potassium", 5.6}}), default_mandatory_electrolytes());
    CHECK(out.find("potassium")->mi == 630.0);
    REQUIRE(out.provenance.size() == 1);
    const auto& adj = out.provenance[0];
    CHECK(adj.branch == AdjustmentBranch::High);
    CHECK(adj.bound == "MI");
    CHECK(adj.old_value == 700.0);
    CHECK(adj.new_value == 630.0);
    CHECK(adj.warning.empty());
  }

  TEST_CASE("low BUN raises the protein intake by ten percent") {
    const auto out = optimize(example_requirements(), predictions({{"bun", 8.0}}), default_mandatory_electrolytes());
    CHECK(*out.find("protein")->ai == doctest::Approx(41.8));
    CHECK(out.provenance[0].branch == AdjustmentBranch::Low);
    CHECK(out.provenance[0].bound == "AI");
  }

  TEST_CASE("in-range predictions leave every requirement bit-identical") {
    const auto base = example_requirements();
    const auto out = optimize(base, predictions({{"sodium", 140}, {"potassium", 4.0}, {"bun", 15}}),
                              default_mandatory_electrolytes());
    CHECK(out.nutrients == base);
    CHECK(out.provenance.size() == 3);
    for (const auto& a : out.provenance) {
      CHECK(a.branch == AdjustmentBranch::InRange);
      CHECK(a.bound.empty());
    }
    const auto edge = optimize(base, predictions({{"sodium", 135}, {"potassium", 5.0}}), default_mandatory_electrolytes());
    CHECK(edge.nutrients == base);
  }

  TEST_CASE("unlinked nutrients are untouched") {
    const auto base = default_mandatory_nutrients("4-8y");
    const auto out = optimize(base, predictions({{"sodium", 150}}), default_mandatory_electrolytes());
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (base[i].nutrient == "sodium") {
        CHECK(*out.nutrients[i].mi == doctest::Approx(1710));
        CHECK(out.nutrients[i].ai == base[i].ai);
      } else {
        CHECK(out.nutrients[i] == base[i]);
      }
    }
  }

  TEST_CASE("lowering MI below AI pulls AI down with it") {
    std::vector<MandatoryNutrient> req{{"sodium", 1000.0, 1050.0, "mg"}};
    const auto out = optimize(req, predictions({{"sodium", 150}}), default_mandatory_electrolytes());
    CHECK(*out.find("sodium")->mi == doctest::Approx(945));
    CHECK(*out.find("sodium")->ai == doctest::Approx(945));
    CHECK(out.provenance[0].clamped);
  }

  TEST_CASE("absent bound produces a warning and no change") {
    const auto base = example_requirements();  // sodium is not mandatory
    const auto out = optimize(base, predictions({{"sodium", 120}}), default_mandatory_electrolytes());
    CHECK(out.nutrients == base);
    CHECK_FALSE(out.provenance[0].warning.empty());
    CHECK(out.provenance[0].branch == AdjustmentBranch::Low);
  }

  TEST_CASE("errors leave nothing half-applied") {
    const auto base = example_requirements();
    CHECK_THROWS_CODE(optimize(base, predictions({{"calcium", 12}}), default_mandatory_electrolytes()),
                      ErrorCode::MissingRange);
    AnalyteNutrientLinks links{{"sodium", {"sodium"}}};
    CHECK_THROWS_CODE(optimize(base, predictions({{"sodium", 150}, {"bun", 30}}), default_mandatory_electrolytes(), links),
                      ErrorCode::MissingLink);
    AnalyteNutrientLinks dangling{{"sodium", {"magnesium"}}};
    CHECK_THROWS_CODE(optimize(base, predictions({{"sodium", 150}}), default_mandatory_electrolytes(), dangling),
                      ErrorCode::MissingLink);
    for (double rho : {0.0, 1.0, -0.1, 1.5}) {
      CHECK_THROWS_CODE(optimize(base, predictions({{"sodium", 150}}), default_mandatory_electrolytes(), default_links(), rho),
                        ErrorCode::InvalidRho);
    }
  }

  TEST_CASE("rho scales the step") {
    std::vector<MandatoryNutrient> req{{"potassium", 100.0, 1000.0, "mg"}};
    const auto out = optimize(req, predictions({{"potassium", 6.0}}), default_mandatory_electrolytes(), default_links(), 0.25);
    CHECK(*out.find("potassium")->mi == doctest::Approx(750));
    CHECK(out.rho == 0.25);
  }
}
