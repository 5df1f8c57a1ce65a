#include "elyte/csv.hpp"
#include "elyte/error.hpp"
#include "elyte/http_api.hpp"
#include "elyte/patient_io.hpp"
#include "elyte/reference_tables.hpp"
#include "elyte/serialize.hpp"
#include "elyte/service.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace elyte;

namespace {

std::optional<Date> opt_date(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_date(s);
}

std::pair<std::string, double> key_value(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) fail(ErrorCode::Parse, "expected name=value, got '" + kv + "'");
  return {canonical_name(kv.substr(0, eq)), csv::to_double(kv.substr(eq + 1), kv)};
}

std::vector<std::string> analytes_or_default(const std::vector<std::string>& given) {
  return given.empty() ? reference::predicted_analytes() : given;
}

void print(const Json& doc) { std::cout << doc.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electrolyte forecasting, nutrient requirement adjustment and food recommendation"};
  app.require_subcommand(1);
  std::string ws = ".";
  app.add_option("-w,--workspace", ws, "Workspace directory")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build the catalog from FoodData Central CSV files");
  FdcFiles fdc;
  std::vector<std::string> whitelist;
  ingest->add_option("--food", fdc.food, "food.csv")->required();
  ingest->add_option("--nutrient", fdc.nutrient, "nutrient.csv")->required();
  ingest->add_option("--food-nutrient", fdc.food_nutrient, "food_nutrient.csv")->required();
  ingest->add_option("--nutrients", whitelist, "Catalog features (default: the standard whitelist)");

  // catalog search
  auto* catalog = app.add_subcommand("catalog", "Catalog queries");
  auto* search = catalog->add_subcommand("search", "Find items by name");
  std::string query;
  std::size_t limit = 20;
  search->add_option("query", query)->required();
  search->add_option("--limit", limit)->capture_default_str();
  catalog->require_subcommand(1);

  // patient
  auto* patient = app.add_subcommand("patient", "Patient records");
  patient->require_subcommand(1);
  auto* patient_add = patient->add_subcommand("add", "Create a patient");
  std::string pid, age_band, profile_file;
  std::optional<double> weight;
  std::vector<std::string> likes;
  patient_add->add_option("--id", pid);
  patient_add->add_option("--age-band", age_band);
  patient_add->add_option("--weight", weight, "Body weight in kg");
  patient_add->add_option("--like", likes, "Liked catalog item ids");
  patient_add->add_option("--profile", profile_file, "Profile JSON (overrides the flags)");
  auto* patient_show = patient->add_subcommand("show", "Print a patient record");
  patient_show->add_option("--id", pid)->required();

  // lab add
  auto* lab = app.add_subcommand("lab", "Lab reports");
  lab->require_subcommand(1);
  auto* lab_add = lab->add_subcommand("add", "Record lab results");
  std::string lab_file, date_s, source = "outpatient";
  std::vector<std::string> results;
  lab_add->add_option("--patient", pid)->required();
  lab_add->add_option("--file", lab_file, "Labs CSV (date,analyte,value,source)");
  lab_add->add_option("--date", date_s);
  lab_add->add_option("--set", results, "analyte=value");
  lab_add->add_option("--source", source)->capture_default_str();

  // meal log
  auto* meal = app.add_subcommand("meal", "Intake log");
  meal->require_subcommand(1);
  auto* meal_log = meal->add_subcommand("log", "Log a meal or supplement");
  std::string intake_file, item, today_s;
  int meal_index = 1;
  double grams = 0.0, water = 0.0;
  std::vector<std::string> nutrients;
  meal_log->add_option("--patient", pid)->required();
  meal_log->add_option("--file", intake_file, "Intake CSV (date,meal_index,item_id,nutrient,amount,unit)");
  meal_log->add_option("--date", date_s);
  meal_log->add_option("--meal", meal_index)->capture_default_str();
  meal_log->add_option("--item", item);
  meal_log->add_option("--grams", grams);
  meal_log->add_option("--nutrient", nutrients, "name=amount (nutrient or supplement)");
  meal_log->add_option("--water", water, "Litres");
  meal_log->add_option("--today", today_s, "Reference date for the future-date check");

  // synth gen
  auto* synth = app.add_subcommand("synth", "Synthetic cohort");
  synth->require_subcommand(1);
  auto* synth_gen = synth->add_subcommand("gen", "Generate catalog and patients into the workspace");
  SynthOptions so;
  synth_gen->add_option("--seed", so.seed)->capture_default_str();
  synth_gen->add_option("--patients", so.patients)->capture_default_str();
  synth_gen->add_option("--days", so.days)->capture_default_str();
  synth_gen->add_option("--items", so.catalog_items)->capture_default_str();
  synth_gen->add_option("--noise", so.noise_fraction, "Noise sd as a fraction of the analyte range")->capture_default_str();
  synth_gen->add_option("--lab-every", so.lab_every_days)->capture_default_str();

  // train / evaluate
  std::vector<std::string> analytes;
  auto* train = app.add_subcommand("train", "Grid-search and store one model per analyte");
  train->add_option("--analyte", analytes, "Default: sodium, potassium, bun");
  auto* evaluate = app.add_subcommand("evaluate", "Holdout evaluation over all workspace patients");
  evaluate->add_option("--analyte", analytes, "Default: sodium, potassium, bun");

  // daily cycle
  auto* predict = app.add_subcommand("predict", "Next-day forecast for a patient");
  predict->add_option("--patient", pid)->required();
  predict->add_option("--date", date_s, "Last day of the input window (default: last logged day)");
  auto* optimize = app.add_subcommand("optimize", "Predict and adjust requirements (once per day)");
  optimize->add_option("--patient", pid)->required();
  optimize->add_option("--date", date_s);
  auto* requirements = app.add_subcommand("requirements", "Requirements currently in effect");
  requirements->add_option("--patient", pid)->required();
  auto* recommend = app.add_subcommand("recommend", "Recommend items for a meal");
  std::optional<std::size_t> k, top_classes;
  recommend->add_option("--patient", pid)->required();
  recommend->add_option("--meal", meal_index)->required();
  recommend->add_option("--k", k);
  recommend->add_option("--top-classes", top_classes);
  recommend->add_option("--date", date_s);

  // config
  auto* config = app.add_subcommand("config", "Workspace configuration");
  config->require_subcommand(1);
  auto* config_show = config->add_subcommand("show", "Print the effective configuration");
  auto* config_init = config->add_subcommand("init", "Write config.json with defaults");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string host = "127.0.0.1", static_dir;
  int port = 8080;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--static", static_dir, "Directory of the built UI");

  CLI11_PARSE(app, argc, argv);

  try {
    Service svc(ws);
    if (*ingest) {
      print(svc.ingest(fdc, whitelist.empty() ? default_feature_whitelist() : whitelist));
    } else if (*search) {
      print(svc.catalog_search(query, limit));
    } else if (*patient_add) {
      PatientProfile p;
      if (!profile_file.empty()) {
        p = profile_from_json(Json::parse(read_text(profile_file)));
      } else {
        if (pid.empty() || age_band.empty()) fail(ErrorCode::Validation, "--id and --age-band are required without --profile");
        p.patient_id = pid;
        p.age_band = age_band;
        p.weight_kg = weight;
        p.liked_items.insert(likes.begin(), likes.end());
      }
      print(svc.add_patient(p));
    } else if (*patient_show) {
      print(svc.show_patient(pid));
    } else if (*lab_add) {
      std::vector<LabReport> reports;
      if (!lab_file.empty()) reports = read_labs_file(lab_file);
      if (!results.empty()) {
        if (date_s.empty()) fail(ErrorCode::Validation, "--date is required with --set");
        LabReport r;
        r.date = parse_date(date_s);
        r.source = parse_lab_source(source);
        for (const auto& kv : results) r.results.insert(key_value(kv));
        reports.push_back(r);
      }
      if (reports.empty()) fail(ErrorCode::Validation, "give --file or --date with --set");
      print(svc.add_labs(pid, reports));
    } else if (*meal_log) {
      std::vector<IntakeLogEntry> entries;
      if (!intake_file.empty()) entries = read_intake_file(intake_file);
      if (!item.empty() || !nutrients.empty() || water != 0.0) {
        if (date_s.empty()) fail(ErrorCode::Validation, "--date is required");
        IntakeLogEntry e;
        e.date = parse_date(date_s);
        e.meal_index = meal_index;
        if (!item.empty()) {
          e.item_id = item;
          e.grams = grams;
        }
        for (const auto& kv : nutrients) e.nutrients.insert(key_value(kv));
        e.water_liters = water;
        entries.push_back(e);
      }
      print(svc.log_meals(pid, entries, opt_date(today_s)));
    } else if (*synth_gen) {
      print(svc.synth_gen(so));
    } else if (*train) {
      print(svc.train(analytes_or_default(analytes)));
    } else if (*evaluate) {
      print(svc.evaluate(analytes_or_default(analytes)));
    } else if (*predict) {
      print(svc.predict(pid, opt_date(date_s)));
    } else if (*optimize) {
      print(svc.run_cycle(pid, opt_date(date_s)));
    } else if (*requirements) {
      print(svc.requirements(pid));
    } else if (*recommend) {
      print(svc.recommend(pid, meal_index, k, opt_date(date_s), top_classes));
    } else if (*config_show) {
      print(to_json(svc.workspace().config()));
    } else if (*config_init) {
      svc.workspace().save_config(svc.workspace().config());
      print(to_json(svc.workspace().config()));
    } else if (*serve) {
      std::cerr << "listening on " << host << ":" << port << "\n";
      elyte::serve(svc, host, port, static_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(static_dir));
    }
  } catch (const Error& e) {
    std::cerr << error_json(to_string(e.code()), e.what()).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_json("Internal", e.what()).dump() << "\n";
    return 1;
  }
  return 0;
}
