#include "elyte/food_catalog.hpp"
#include "elyte/forest.hpp"
#include "elyte/patient.hpp"
#include "elyte/reference_tables.hpp"

#include <doctest.h>

#include "support.hpp"

#include <random>

using namespace elyte;

namespace {

Date d(const char* s) { return parse_date(s); }

Catalog two_item_catalog() {
  std::vector<NutrientDef> defs{{"sodium", "Sodium", Unit::mg}, {"potassium", "Potassium", Unit::mg},
                                {"protein", "Protein", Unit::g}, {"water", "Water", Unit::L}};
  std::vector<FoodItemVector> items{
      {"A", "Alpha", {200, 100, 5, 0.05}, {0, 0, 0, 0}, 100},
      {"B", "Beta", {50, 400, 1, 0.08}, {0, 1, 0, 0}, 80},
  };
  return Catalog(defs, items);
}

const MandatoryNutrient& find(const std::vector<MandatoryNutrient>& v, const std::string& name) {
  for (const auto& n : v) {
    if (n.nutrient == name) return n;
  }
  FAIL("missing nutrient " << name);
  return v.front();
}

}  // namespace

TEST_SUITE("patient") {
  TEST_CASE("standard electrolyte ranges") {
    const auto& table = reference::standard_ranges();
    CHECK(table.size() == 9);
    const auto* na = reference::standard_range("sodium");
    REQUIRE(na);
    CHECK(na->min == 135);
    CHECK(na->max == 145);
    CHECK(reference::standard_range("potassium")->min == 3.5);
    CHECK(reference::standard_range("potassium")->max == 5.0);
    CHECK(reference::standard_range("bun")->min == 10);
    CHECK(reference::standard_range("bun")->max == 20);
    CHECK(reference::standard_range("creatinine")->max == 1.0);

    const auto base = default_mandatory_electrolytes();
    REQUIRE(base.size() == 3);
    CHECK(base[0].analyte == "sodium");
    CHECK(base[1].analyte == "potassium");
    CHECK(base[2].analyte == "bun");

    const auto ov = default_mandatory_electrolytes({{"potassium", std::nullopt, 4.5}});
    CHECK(ov[1].min == 3.5);
    CHECK(ov[1].max == 4.5);
    CHECK(ov[0] == base[0]);

    const auto added = default_mandatory_electrolytes({{"calcium", std::nullopt, std::nullopt}});
    CHECK(added.size() == 4);
    CHECK(added.back().min == 8.5);
    CHECK_THROWS_CODE(default_mandatory_electrolytes({{"mystery", 1.0, std::nullopt}}), ErrorCode::MissingRange);
    CHECK_THROWS_CODE(default_mandatory_electrolytes({{"sodium", 150.0, std::nullopt}}), ErrorCode::Validation);
  }

  TEST_CASE("reference intakes for 4-8 years") {
    const auto n = default_mandatory_nutrients("4-8y");
    CHECK(find(n, "potassium").ai == 3800);
    CHECK_FALSE(find(n, "potassium").mi.has_value());
    CHECK(find(n, "sodium").ai == 1200);
    CHECK(find(n, "sodium").mi == 1900);
    CHECK(find(n, "chloride").ai == 1900);
    CHECK(find(n, "chloride").mi == 2900);
    CHECK(find(n, "iron").ai == 10);
    CHECK(find(n, "iron").mi == 40);
    CHECK(find(n, "phosphorus").mi == 3000);
    CHECK(find(n, "water").ai == 1.7);
    CHECK_FALSE(find(n, "protein").mandatory());

    const auto weighed = default_mandatory_nutrients("4-8y", {}, 20.0);
    CHECK(*find(weighed, "protein").ai == doctest::Approx(0.95 * 20.0));

    const auto infant = default_mandatory_nutrients("0-6mo");
    CHECK(find(infant, "iron").ai == 0.27);
    CHECK(find(default_mandatory_nutrients("female-14-18y"), "iron").ai == 15);
    CHECK_THROWS_CODE(default_mandatory_nutrients("adult"), ErrorCode::UnknownAgeBand);
  }

  TEST_CASE("example patient overrides") {
    const auto n = default_mandatory_nutrients("4-8y", reference::example_patient_overrides());
    CHECK_FALSE(find(n, "chloride").mandatory());
    CHECK(find(n, "iron").ai == 8);
    CHECK_FALSE(find(n, "iron").mi.has_value());
    CHECK_FALSE(find(n, "phosphorus").ai.has_value());
    CHECK(find(n, "phosphorus").mi == 368);
    CHECK_FALSE(find(n, "potassium").ai.has_value());
    CHECK(find(n, "potassium").mi == 700);
    CHECK_FALSE(find(n, "sodium").mandatory());
    CHECK(find(n, "protein").ai == 38);
    CHECK(find(n, "water").ai == 1.3);
    CHECK(find(n, "water").mi == 1.5);
  }

  TEST_CASE("an override only ever touches the bound it names") {
    const auto base = default_mandatory_nutrients("1-3y");
    for (const auto& target : base) {
      const auto changed = default_mandatory_nutrients("1-3y", {{target.nutrient, BoundOverride::inherit(),
                                                                 BoundOverride::of(1e6), ""}});
      for (const auto& n : changed) {
        if (n.nutrient == target.nutrient) {
          CHECK(n.ai == target.ai);
          CHECK(n.mi == 1e6);
        } else {
          CHECK(n == find(base, n.nutrient));
        }
      }
    }
    CHECK_THROWS_CODE(default_mandatory_nutrients("4-8y", {{"sodium", BoundOverride::of(3000), BoundOverride::inherit(), ""}}),
                      ErrorCode::Validation);
  }

  TEST_CASE("consumption record replay") {
    auto rec = make_patient({"u1", "4-8y"});
    const Catalog empty = two_item_catalog();
    const Date day = d("2024-03-01");
    auto meal = [&](int idx, double iron, double phos, double k, double na, double protein, double water) {
      IntakeLogEntry e;
      e.date = day;
      e.meal_index = idx;
      for (auto [name, v] : {std::pair{"iron", iron}, {"phosphorus", phos}, {"potassium", k}, {"sodium", na},
                             {"protein", protein}}) {
        if (v != 0.0) e.nutrients[name] = v;
      }
      e.water_liters = water;
      return log_meal(rec, e, empty, SupplementRegistry::defaults(), day);
    };
    meal(1, 2.31, 187, 188, 522, 10.81, 0);
    meal(2, 0, 101, 150, 38, 3.28, 0.088);
    const auto after3 = meal(3, 2.66, 100, 215, 398, 9.51, 0);
    CHECK(after3.food_amount("sodium") == doctest::Approx(958));
    CHECK(after3.food_amount("protein") == doctest::Approx(23.60));
    CHECK(after3.food_amount("potassium") == doctest::Approx(553));
    CHECK(after3.food_amount("phosphorus") == doctest::Approx(388));
    CHECK(after3.food_amount("iron") == doctest::Approx(4.97));
    CHECK(after3.food_amount("water") == doctest::Approx(0.088));
    const auto after4 = meal(4, 0, 0, 0, 0, 0, 0.5);
    CHECK(after4.food_amount("water") == doctest::Approx(0.588));
    CHECK(after4.food_amount("sodium") == doctest::Approx(958));
    CHECK(rec.intake_log.size() == 4);
  }

  TEST_CASE("item entries scale per 100 g and skip missing values") {
    const auto cat = two_item_catalog();
    auto rec = make_patient({"p", "4-8y"});
    const Date day = d("2024-03-01");
    IntakeLogEntry e{day, 1, "B", 150.0, {}, 0.0};
    const auto t = log_meal(rec, e, cat, SupplementRegistry::defaults(), day);
    CHECK(t.food_amount("sodium") == doctest::Approx(75));
    CHECK(t.food_amount("potassium") == 0.0);
    CHECK(t.food_amount("water") == doctest::Approx(0.12));
  }

  TEST_CASE("supplements act through their effects") {
    const auto cat = two_item_catalog();
    auto rec = make_patient({"p", "4-8y"});
    const Date day = d("2024-03-01");
    IntakeLogEntry e{day, 1, "A", 100.0, {{"Kayexalate", 2.0}, {"beneprotein", 7.0}}, 0.0};
    const auto t = log_meal(rec, e, cat, SupplementRegistry::defaults(), day);
    CHECK(t.supplement_dose("sodium_polystyrene_sulfonate") == 2.0);
    CHECK(t.food_amount("potassium") == doctest::Approx(100));
    CHECK(t.effective_amount("potassium") == doctest::Approx(100 - 2 * 39.1));
    CHECK(t.effective_amount("protein") == doctest::Approx(5 + 6));
  }

  TEST_CASE("invalid intake entries") {
    const auto cat = two_item_catalog();
    auto rec = make_patient({"p", "4-8y"});
    const Date day = d("2024-03-01");
    CHECK_THROWS_CODE(log_meal(rec, {day, 1, "A", -1.0, {}, 0.0}, cat, SupplementRegistry::defaults(), day),
                      ErrorCode::NegativeAmount);
    CHECK_THROWS_CODE(log_meal(rec, {add_days(day, 1), 1, "A", 1.0, {}, 0.0}, cat, SupplementRegistry::defaults(), day),
                      ErrorCode::InvalidEntry);
    CHECK_THROWS_CODE(log_meal(rec, {day, 0, "A", 1.0, {}, 0.0}, cat, SupplementRegistry::defaults(), day),
                      ErrorCode::InvalidEntry);
    CHECK_THROWS_CODE(log_meal(rec, {day, 1, "Z", 1.0, {}, 0.0}, cat, SupplementRegistry::defaults(), day),
                      ErrorCode::UnknownItem);
    CHECK(rec.intake_log.empty());
  }

  TEST_CASE("day totals equal a brute-force sum over the log") {
    const auto cat = two_item_catalog();
    auto rec = make_patient({"p", "4-8y"});
    const Date start = d("2024-01-01");
    Rng rng(99);
    for (int i = 0; i < 300; ++i) {
      IntakeLogEntry e;
      e.date = add_days(start, static_cast<int>(rng.below(5)));
      e.meal_index = 1 + static_cast<int>(rng.below(4));
      if (rng.below(2)) {
        e.item_id = rng.below(2) ? "A" : "B";
        e.grams = 300 * rng.uniform();
      }
      if (rng.below(2) || !e.item_id) e.nutrients["sodium"] = 100 * rng.uniform();
      e.water_liters = rng.below(3) == 0 ? rng.uniform() : 0.0;
      log_meal(rec, e, cat, SupplementRegistry::defaults(), add_days(start, 10));
    }
    const auto all = all_day_totals(rec, cat);
    CHECK(all.size() == 5);
    for (int k = 0; k < 5; ++k) {
      const Date day = add_days(start, k);
      double sodium = 0, potassium = 0, water = 0;
      for (const auto& e : rec.intake_log) {
        if (e.date != day) continue;
        if (e.item_id == "A") {
          sodium += 2.0 * e.grams;
          potassium += 1.0 * e.grams;
          water += 0.0005 * e.grams;
        } else if (e.item_id == "B") {
          sodium += 0.5 * e.grams;
          water += 0.0008 * e.grams;
        }
        if (auto it = e.nutrients.find("sodium"); it != e.nutrients.end()) sodium += it->second;
        water += e.water_liters;
      }
      const auto t = day_totals(rec, cat, day);
      CHECK(t.food_amount("sodium") == doctest::Approx(sodium).epsilon(1e-12));
      CHECK(t.food_amount("potassium") == doctest::Approx(potassium).epsilon(1e-12));
      CHECK(t.food_amount("water") == doctest::Approx(water).epsilon(1e-12));
      CHECK(all.at(day).food == t.food);
    }
  }

  TEST_CASE("lab reports stay sorted; repeats are idempotent; conflicts are rejected") {
    auto rec = make_patient({"p", "4-8y"});
    record_lab(rec, {d("2024-01-05"), {{"Sodium", 138}}});
    record_lab(rec, {d("2024-01-01"), {{"sodium", 140}}});
    record_lab(rec, {d("2024-01-03"), {{"sodium", 139}}});
    REQUIRE(rec.labs.size() == 3);
    CHECK(rec.labs[0].date == d("2024-01-01"));
    CHECK(rec.labs[2].date == d("2024-01-05"));
    CHECK(rec.labs[2].results.at("sodium") == 138);

    record_lab(rec, {d("2024-01-03"), {{"sodium", 139}}});
    CHECK(rec.labs.size() == 3);
    CHECK_THROWS_CODE(record_lab(rec, {d("2024-01-03"), {{"sodium", 141}}}), ErrorCode::DuplicateDate);

    CHECK(most_recent_lab(rec, d("2023-12-31")) == nullptr);
    CHECK(most_recent_lab(rec, d("2024-01-04"))->date == d("2024-01-03"));
    CHECK(most_recent_lab(rec, d("2024-02-01"))->date == d("2024-01-05"));
  }

  TEST_CASE("canonical names") {
    CHECK(canonical_name(" Food-Sodium ") == "food_sodium");
    CHECK(canonical_name("A Gap") == "a_gap");
    CHECK(canonical_name("CO2") == "co2");
  }
}
