#include "elyte/cohort.hpp"
#include "elyte/error.hpp"
#include "elyte/forecaster.hpp"
#include "elyte/optimizer.hpp"
#include "elyte/reference_tables.hpp"
#include "elyte/serialize.hpp"
#include "elyte/workspace.hpp"

#include <doctest.h>

#include "support.hpp"

using namespace elyte;

namespace {

PatientRecord sample_record() {
  PatientProfile p;
  p.patient_id = "u1";
  p.age_band = "4-8y";
  p.weight_kg = 18.5;
  p.nutrient_overrides = reference::example_patient_overrides();
  p.electrolyte_overrides = {{"potassium", std::nullopt, 4.5}};
  p.liked_items = {"F0001", "F0007"};
  auto rec = make_patient(p);
  record_lab(rec, {parse_date("2024-01-01"), {{"sodium", 139.5}, {"bun", 31}}, LabSource::Inpatient});
  record_lab(rec, {parse_date("2024-01-02"), {{"sodium", 0.1 + 0.2}}});
  rec.intake_log.push_back({parse_date("2024-01-01"), 1, "F0001", 123.456, {}, 0.0});
  rec.intake_log.push_back({parse_date("2024-01-01"), 2, std::nullopt, 0.0, {{"renvela", 0.8}}, 0.25});
  return rec;
}

ForestModel small_model() {
  const auto cat = fixture_catalog(40, 1);
  const auto cohort = generate_cohort(default_cohort_config(cat, 2, 1, 20), cat);
  const auto ds = patient_dataset(cohort.patients[0], cat, influence_sets("sodium"));
  ForestParams p;
  p.n_trees = 4;
  p.max_depth = 3;
  p.max_features = MaxFeatures::third();
  return fit_forest(ds, p, 1);
}

}  // namespace

TEST_SUITE("serialize") {
  TEST_CASE("patient record round trip") {
    const auto rec = sample_record();
    const auto doc = to_json(rec);
    CHECK(doc.at("schema_version") == kSchemaVersion);
    CHECK(record_from_json(doc) == rec);
    CHECK(record_from_json(Json::parse(doc.dump())) == rec);
    const auto prof = to_json(rec.profile);
    CHECK(profile_from_json(prof) == rec.profile);
  }

  TEST_CASE("not-mandatory bounds serialise as markers") {
    const auto prof = to_json(sample_record().profile);
    bool saw_nm = false;
    for (const auto& ov : prof.at("nutrient_overrides")) {
      if (ov.at("nutrient") == "chloride") {
        CHECK(ov.at("ai") == "NM");
        saw_nm = true;
      }
    }
    CHECK(saw_nm);
  }

  TEST_CASE("catalog round trip keeps missing flags") {
    const auto cat = fixture_catalog(25, 9);
    const auto back = catalog_from_json(to_json(cat));
    CHECK(back.nutrients() == cat.nutrients());
    CHECK(back.items() == cat.items());
  }

  TEST_CASE("model round trip predicts identically") {
    const auto m = small_model();
    const auto back = model_from_json(Json::parse(to_json(m).dump()));
    CHECK(back == m);
    std::vector<double> x(m.feature_names.size(), 1.0);
    CHECK(predict(back, x) == predict(m, x));
  }

  TEST_CASE("predictions and requirements round trip") {
    PredictionSet ps;
    ps.as_of = parse_date("2024-04-01");
    ps.entries = {{"sodium", 141.25, ps.as_of, add_days(ps.as_of, 1)}, {"bun", 8.5, ps.as_of, add_days(ps.as_of, 1)}};
    const auto back = predictions_from_json(to_json(ps));
    REQUIRE(back.entries.size() == 2);
    CHECK(back.find("bun")->value == 8.5);
    CHECK(back.entries[0].target_date == ps.entries[0].target_date);

    const auto req = optimize(default_mandatory_nutrients("4-8y", reference::example_patient_overrides()), ps,
                              default_mandatory_electrolytes());
    const auto rback = requirements_from_json(to_json(req));
    CHECK(rback.nutrients == req.nutrients);
    CHECK(rback.rho == req.rho);
    REQUIRE(rback.provenance.size() == req.provenance.size());
    CHECK(rback.provenance[1].branch == AdjustmentBranch::Low);
  }

  TEST_CASE("config round trip and validation") {
    WorkspaceConfig c;
    c.rho = 0.2;
    c.grid.n_trees = {10};
    c.grid.max_depth = {std::nullopt, 4};
    c.grid.max_features = {MaxFeatures::fraction(0.5)};
    const auto back = config_from_json(to_json(c));
    CHECK(back.rho == 0.2);
    CHECK(back.grid.n_trees == c.grid.n_trees);
    CHECK(back.grid.max_depth == c.grid.max_depth);
    CHECK(back.grid.max_features == c.grid.max_features);
    auto bad = to_json(c);
    bad["rho"] = 1.5;
    CHECK_THROWS_CODE(config_from_json(bad), ErrorCode::InvalidRho);
    bad = to_json(c);
    bad["k"] = 0;
    CHECK_THROWS_CODE(config_from_json(bad), ErrorCode::InvalidConfig);
  }

  TEST_CASE("unknown or missing schema versions are rejected") {
    auto doc = to_json(sample_record());
    doc["schema_version"] = 2;
    CHECK_THROWS_CODE(record_from_json(doc), ErrorCode::Validation);
    doc.erase("schema_version");
    CHECK_THROWS_CODE(record_from_json(doc), ErrorCode::Validation);
    auto cat = to_json(fixture_catalog(3, 1));
    cat["schema_version"] = 0;
    CHECK_THROWS_CODE(catalog_from_json(cat), ErrorCode::Validation);
  }

  TEST_CASE("interrupted writes leave the previous document intact") {
    support::TempDir dir;
    Workspace ws(dir.path());
    auto rec = sample_record();
    ws.save_patient(rec);
    const auto path = dir / "patients/u1.json";
    const auto before = support::read_file(path);

    // a writer that died before its rename leaves only a partial temp file
    support::write_file(dir / "patients/u1.json.4242-0.tmp", before.substr(0, before.size() / 2));
    CHECK(ws.patient_ids() == std::vector<std::string>{"u1"});
    CHECK(ws.load_patient("u1") == rec);

    rec.profile.liked_items.insert("F0100");
    ws.save_patient(rec);
    CHECK(ws.load_patient("u1") == rec);
    CHECK(support::read_file(path) != before);
  }

  TEST_CASE("workspace lookups") {
    support::TempDir dir;
    Workspace ws(dir.path());
    CHECK_THROWS_CODE(ws.load_patient("nobody"), ErrorCode::UnknownPatient);
    CHECK_THROWS_CODE(ws.load_patient("../etc"), ErrorCode::Validation);
    CHECK_THROWS_CODE(ws.load_catalog(), ErrorCode::EmptyCatalog);
    CHECK_THROWS_CODE(ws.load_model("sodium"), ErrorCode::UntrainedAnalyte);
    CHECK_FALSE(ws.load_cycle("u1").has_value());
    CHECK(ws.config().rho == 0.10);

    const auto m = small_model();
    ws.save_model(m);
    CHECK(ws.load_model("sodium") == m);
    CHECK(ws.load_models().size() == 1);

    support::write_file(dir / "catalog.json", "{not json");
    CHECK_THROWS_CODE(ws.load_catalog(), ErrorCode::Parse);
  }

  TEST_CASE("error documents") {
    const auto e = error_json("UnknownPatient", "unknown patient 'x'");
    CHECK(e.at("error") == "UnknownPatient");
    CHECK(e.at("message") == "unknown patient 'x'");
  }
}
