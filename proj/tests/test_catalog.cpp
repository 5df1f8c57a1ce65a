#include "elyte/error.hpp"
#include "elyte/food_catalog.hpp"
#include "elyte/serialize.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace elyte;

namespace {

FdcFiles three_item_fixture(const support::TempDir& dir) {
  support::write_file(dir / "food.csv",
                      "fdc_id,description,serving_size,basis\n"
                      "1,Broth,240,100g\n"
                      "2,Cracker,50,serving\n"
                      "3,Banana,118,100g\n");
  support::write_file(dir / "nutrient.csv",
                      "id,name,unit_name\n"
                      "1003,Protein,G\n"
                      "1008,Energy,KCAL\n"
                      "1092,\"Potassium, K\",MG\n"
                      "1093,\"Sodium, Na\",MG\n");
  support::write_file(dir / "food_nutrient.csv",
                      "fdc_id,nutrient_id,amount\n"
                      "1,1093,343\n1,1092,44\n1,1003,1.2\n"
                      "2,1093,300\n2,1092,60\n2,1003,4.5\n2,1008,250\n"
                      "3,1093,1\n3,1092,358\n3,1003,1.09\n");
  return {dir / "food.csv", dir / "nutrient.csv", dir / "food_nutrient.csv"};
}

}  // namespace

TEST_SUITE("catalog") {
  TEST_CASE("three-item fixture maps to three-entry vectors in whitelist order") {
    support::TempDir dir;
    const auto cat = ingest_fdc(three_item_fixture(dir), {"sodium", "potassium", "protein"});
    REQUIRE(cat.size() == 3);
    REQUIRE(cat.feature_count() == 3);
    CHECK(cat.nutrients()[0].id == "sodium");
    CHECK(cat.nutrients()[1].id == "potassium");
    CHECK(cat.nutrients()[2].id == "protein");
    const auto& broth = item_vector(cat, "1");
    CHECK(broth.values == std::vector<double>{343, 44, 1.2});
    CHECK(broth.serving_size == 240);
    for (const auto& it : cat.items()) CHECK(it.values.size() == 3);
  }

  TEST_CASE("serving basis is rescaled to per 100 g") {
    support::TempDir dir;
    const auto cat = ingest_fdc(three_item_fixture(dir), {"calories", "sodium"});
    const auto& cracker = item_vector(cat, "2");
    // 250 kcal in a 50 g serving
    CHECK(cracker.values[0] == doctest::Approx(500.0));
    CHECK(cracker.values[1] == doctest::Approx(600.0));
    CHECK(cracker.per_serving(0) == doctest::Approx(250.0));
  }

  TEST_CASE("absent whitelist nutrient becomes a flagged zero") {
    support::TempDir dir;
    const auto cat = ingest_fdc(three_item_fixture(dir), {"sodium", "iron"});
    REQUIRE(cat.feature_count() == 2);
    for (const auto& it : cat.items()) {
      CHECK(it.values[1] == 0.0);
      CHECK(it.is_missing(1));
      CHECK_FALSE(it.is_missing(0));
    }
  }

  TEST_CASE("item lookup") {
    support::TempDir dir;
    const auto cat = ingest_fdc(three_item_fixture(dir), {"sodium"});
    CHECK(item_vector(cat, "3") == item_vector(cat, "3"));
    try {
      item_vector(cat, "999");
      FAIL("expected UnknownItem");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownItem);
    }
  }

  TEST_CASE("schema errors") {
    support::TempDir dir;
    auto files = three_item_fixture(dir);
    support::write_file(dir / "bad_food.csv", "id,description\n1,x\n");
    files.food = dir / "bad_food.csv";
    try {
      ingest_fdc(files, {"sodium"});
      FAIL("expected MissingColumn");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingColumn);
    }

    auto files2 = three_item_fixture(dir);
    support::write_file(dir / "only_iron.csv", "fdc_id,nutrient_id,amount\n");
    files2.food_nutrient = dir / "only_iron.csv";
    try {
      ingest_fdc(files2, {"sodium"});
      FAIL("expected EmptyCatalog");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyCatalog);
    }

    auto files3 = three_item_fixture(dir);
    support::write_file(dir / "odd_unit.csv", "id,name,unit_name\n1093,\"Sodium, Na\",IU\n");
    files3.nutrient = dir / "odd_unit.csv";
    try {
      ingest_fdc(files3, {"sodium"});
      FAIL("expected UnitMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnitMismatch);
    }
  }

  TEST_CASE("sample export: units, missing flags and deterministic serialization") {
    const auto dir = support::sample_dir();
    const FdcFiles files{dir / "food.csv", dir / "nutrient.csv", dir / "food_nutrient.csv"};
    const auto a = ingest_fdc(files);
    const auto b = ingest_fdc(files);
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(a.size() == 14);
    const auto water = *a.feature_index("water");
    const auto chloride = *a.feature_index("chloride");
    const auto& milk = item_vector(a, "170903");
    CHECK(milk.values[water] == doctest::Approx(0.0892));  // 89.2 g -> L
    CHECK_FALSE(milk.is_missing(chloride));
    CHECK(item_vector(a, "170379").is_missing(chloride));
    // peanut butter is listed per 32 g serving
    const auto& pb = item_vector(a, "172185");
    CHECK(pb.values[*a.feature_index("calories")] == doctest::Approx(188.0 * 100.0 / 32.0));
    for (const auto& it : a.items()) {
      for (double v : it.values) CHECK(v >= 0.0);
    }
    CHECK(catalog_from_json(to_json(a)).items() == a.items());
  }

  TEST_CASE("search is case-insensitive and ordered") {
    const auto dir = support::sample_dir();
    const auto cat = ingest_fdc({dir / "food.csv", dir / "nutrient.csv", dir / "food_nutrient.csv"});
    const auto hits = cat.search("RAW");
    CHECK(hits.size() >= 5);
    CHECK(hits.front()->item_id == "170379");
    CHECK(cat.search("raw", 2).size() == 2);
  }
}
