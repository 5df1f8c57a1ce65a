#include "elyte/serialize.hpp"

#include "elyte/error.hpp"

#include <cmath>

namespace elyte {

namespace {

template <class F>
auto guarded(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string(what) + ": " + e.what());
  }
}

const Json& req(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::Parse, std::string("missing field '") + key + "'");
  return j.at(key);
}

Json opt_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_opt_number(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json versioned(Json body) {
  Json doc = {{"schema_version", kSchemaVersion}};
  doc.update(body);
  return doc;
}

Json bound_override_json(const BoundOverride& b) {
  switch (b.kind) {
    case BoundOverride::Kind::Inherit: return nullptr;
    case BoundOverride::Kind::NotMandatory: return "NM";
    case BoundOverride::Kind::Value: return b.value;
  }
  return nullptr;
}

BoundOverride bound_override_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return BoundOverride::inherit();
  const auto& v = j.at(key);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "NM" || s == "ND") return BoundOverride::not_mandatory();
    fail(ErrorCode::Parse, std::string("bound '") + key + "' must be a number, \"NM\" or null");
  }
  return BoundOverride::of(v.get<double>());
}

Json tree_json(const RegressionTree& tree) {
  Json feature = Json::array(), threshold = Json::array(), left = Json::array(), right = Json::array(),
       value = Json::array(), count = Json::array();
  for (const auto& n : tree.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
    count.push_back(n.count);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},
          {"right", right},     {"value", value},         {"count", count}};
}

RegressionTree tree_from_json(const Json& j) {
  const auto feature = req(j, "feature").get<std::vector<std::int32_t>>();
  const auto threshold = req(j, "threshold").get<std::vector<double>>();
  const auto left = req(j, "left").get<std::vector<std::int32_t>>();
  const auto right = req(j, "right").get<std::vector<std::int32_t>>();
  const auto value = req(j, "value").get<std::vector<double>>();
  const auto count = req(j, "count").get<std::vector<std::uint32_t>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n || count.size() != n) {
    fail(ErrorCode::Parse, "tree arrays differ in length");
  }
  std::vector<TreeNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i], count[i]};
    if (feature[i] >= 0) {
      const auto in_range = [&](std::int32_t c) { return c > static_cast<std::int32_t>(i) && c < static_cast<std::int32_t>(n); };
      if (!in_range(left[i]) || !in_range(right[i])) fail(ErrorCode::Parse, "tree child index out of range");
    }
  }
  return RegressionTree(std::move(nodes));
}

}  // namespace

void check_schema(const Json& doc, std::string_view what) {
  if (!doc.is_object() || !doc.contains("schema_version") || !doc.at("schema_version").is_number_integer()) {
    fail(ErrorCode::Validation, std::string(what) + ": missing schema_version");
  }
  const int v = doc.at("schema_version").get<int>();
  if (v != kSchemaVersion) {
    fail(ErrorCode::Validation, std::string(what) + ": unsupported schema_version " + std::to_string(v));
  }
}

Json error_json(std::string_view code, std::string_view message) {
  return versioned({{"error", code}, {"message", message}});
}

// ---------------------------------------------------------------------------
// catalog

Json to_json(const FoodItemVector& item, const Catalog& catalog) {
  Json values = Json::object();
  for (std::size_t k = 0; k < catalog.feature_count(); ++k) {
    values[catalog.nutrients()[k].id] = item.is_missing(k) ? Json(nullptr) : Json(item.values[k]);
  }
  return {{"item_id", item.item_id}, {"name", item.name}, {"serving_size", item.serving_size}, {"per_100g", values}};
}

Json to_json(const Catalog& catalog) {
  Json nutrients = Json::array();
  for (const auto& n : catalog.nutrients()) {
    nutrients.push_back({{"id", n.id}, {"name", n.name}, {"unit", to_string(n.unit)}, {"per_basis", n.per_basis}});
  }
  Json items = Json::array();
  for (const auto& it : catalog.items()) {
    Json values = Json::array();
    for (std::size_t k = 0; k < it.values.size(); ++k) {
      values.push_back(it.is_missing(k) ? Json(nullptr) : Json(it.values[k]));
    }
    items.push_back({{"item_id", it.item_id}, {"name", it.name}, {"serving_size", it.serving_size}, {"values", values}});
  }
  return versioned({{"nutrients", nutrients}, {"items", items}});
}

Catalog catalog_from_json(const Json& doc) {
  check_schema(doc, "catalog");
  return guarded("catalog", [&] {
    std::vector<NutrientDef> defs;
    for (const auto& n : req(doc, "nutrients")) {
      defs.push_back({req(n, "id").get<std::string>(), n.value("name", req(n, "id").get<std::string>()),
                      parse_unit(req(n, "unit").get<std::string>()), n.value("per_basis", std::string("per 100 g"))});
    }
    std::vector<FoodItemVector> items;
    for (const auto& j : req(doc, "items")) {
      FoodItemVector it;
      it.item_id = req(j, "item_id").get<std::string>();
      it.name = j.value("name", it.item_id);
      it.serving_size = j.value("serving_size", 100.0);
      for (const auto& v : req(j, "values")) {
        it.values.push_back(v.is_null() ? 0.0 : v.get<double>());
        it.missing.push_back(v.is_null() ? 1 : 0);
      }
      items.push_back(std::move(it));
    }
    return Catalog(std::move(defs), std::move(items));
  });
}

// ---------------------------------------------------------------------------
// patient

Json to_json(const MandatoryNutrient& n) {
  return {{"nutrient", n.nutrient}, {"ai", opt_number(n.ai)}, {"mi", opt_number(n.mi)}, {"unit", n.unit}};
}

MandatoryNutrient nutrient_from_json(const Json& j) {
  MandatoryNutrient n;
  n.nutrient = req(j, "nutrient").get<std::string>();
  n.ai = read_opt_number(j, "ai");
  n.mi = read_opt_number(j, "mi");
  n.unit = j.value("unit", std::string());
  return n;
}

Json to_json(const MandatoryElectrolyte& e) {
  return {{"analyte", e.analyte}, {"min", e.min}, {"max", e.max}, {"unit", e.unit}};
}

namespace {

MandatoryElectrolyte electrolyte_from_json(const Json& j) {
  return {req(j, "analyte").get<std::string>(), req(j, "min").get<double>(), req(j, "max").get<double>(),
          j.value("unit", std::string())};
}

Json profile_body(const PatientProfile& p) {
  Json eo = Json::array();
  for (const auto& o : p.electrolyte_overrides) {
    eo.push_back({{"analyte", o.analyte}, {"min", opt_number(o.min)}, {"max", opt_number(o.max)}});
  }
  Json no = Json::array();
  for (const auto& o : p.nutrient_overrides) {
    Json j = {{"nutrient", o.nutrient}, {"ai", bound_override_json(o.ai)}, {"mi", bound_override_json(o.mi)}};
    if (!o.unit.empty()) j["unit"] = o.unit;
    no.push_back(j);
  }
  return {{"patient_id", p.patient_id},
          {"age_band", p.age_band},
          {"weight_kg", opt_number(p.weight_kg)},
          {"electrolyte_overrides", eo},
          {"nutrient_overrides", no},
          {"liked_items", p.liked_items}};
}

PatientProfile profile_body_from(const Json& j) {
  PatientProfile p;
  p.patient_id = req(j, "patient_id").get<std::string>();
  p.age_band = req(j, "age_band").get<std::string>();
  p.weight_kg = read_opt_number(j, "weight_kg");
  if (j.contains("electrolyte_overrides")) {
    for (const auto& o : j.at("electrolyte_overrides")) {
      p.electrolyte_overrides.push_back(
          {canonical_name(req(o, "analyte").get<std::string>()), read_opt_number(o, "min"), read_opt_number(o, "max")});
    }
  }
  if (j.contains("nutrient_overrides")) {
    for (const auto& o : j.at("nutrient_overrides")) {
      p.nutrient_overrides.push_back({canonical_name(req(o, "nutrient").get<std::string>()), bound_override_from(o, "ai"),
                                      bound_override_from(o, "mi"), o.value("unit", std::string())});
    }
  }
  if (j.contains("liked_items")) p.liked_items = j.at("liked_items").get<std::set<std::string>>();
  if (p.patient_id.empty()) fail(ErrorCode::Validation, "patient_id must not be empty");
  return p;
}

}  // namespace

Json to_json(const PatientProfile& profile) { return versioned(profile_body(profile)); }

PatientProfile profile_from_json(const Json& doc) {
  check_schema(doc, "profile");
  return guarded("profile", [&] { return profile_body_from(doc); });
}

Json to_json(const LabReport& r) {
  return {{"date", format_date(r.date)}, {"source", to_string(r.source)}, {"results", r.results}};
}

LabReport lab_from_json(const Json& j) {
  return guarded("lab report", [&] {
    LabReport r;
    r.date = parse_date(req(j, "date").get<std::string>());
    if (j.contains("source")) r.source = parse_lab_source(j.at("source").get<std::string>());
    for (const auto& [k, v] : req(j, "results").items()) {
      const double x = v.get<double>();
      if (!std::isfinite(x)) fail(ErrorCode::Validation, "lab value for " + k + " is not finite");
      r.results[canonical_name(k)] = x;
    }
    if (r.results.empty()) fail(ErrorCode::Validation, "lab report has no results");
    return r;
  });
}

Json to_json(const IntakeLogEntry& e) {
  Json j = {{"date", format_date(e.date)}, {"meal_index", e.meal_index}};
  if (e.item_id) {
    j["item_id"] = *e.item_id;
    j["grams"] = e.grams;
  }
  if (!e.nutrients.empty()) j["nutrients"] = e.nutrients;
  if (e.water_liters != 0.0) j["water_liters"] = e.water_liters;
  return j;
}

IntakeLogEntry intake_entry_from_json(const Json& j) {
  return guarded("intake entry", [&] {
    IntakeLogEntry e;
    e.date = parse_date(req(j, "date").get<std::string>());
    e.meal_index = j.value("meal_index", 1);
    if (j.contains("item_id") && !j.at("item_id").is_null()) {
      e.item_id = j.at("item_id").get<std::string>();
      e.grams = req(j, "grams").get<double>();
    }
    if (j.contains("nutrients")) {
      for (const auto& [k, v] : j.at("nutrients").items()) e.nutrients[canonical_name(k)] = v.get<double>();
    }
    e.water_liters = j.value("water_liters", 0.0);
    return e;
  });
}

Json to_json(const DayTotals& t) {
  return versioned({{"date", format_date(t.date)},
                    {"food", t.food},
                    {"supplements", t.supplements},
                    {"effective", t.effective}});
}

Json to_json(const PatientRecord& r) {
  Json elec = Json::array();
  for (const auto& e : r.mandatory_electrolytes) elec.push_back(to_json(e));
  Json nut = Json::array();
  for (const auto& n : r.mandatory_nutrients) nut.push_back(to_json(n));
  Json labs = Json::array();
  for (const auto& l : r.labs) labs.push_back(to_json(l));
  Json log = Json::array();
  for (const auto& e : r.intake_log) log.push_back(to_json(e));
  return versioned({{"profile", profile_body(r.profile)},
                    {"mandatory_electrolytes", elec},
                    {"mandatory_nutrients", nut},
                    {"labs", labs},
                    {"intake_log", log}});
}

PatientRecord record_from_json(const Json& doc) {
  check_schema(doc, "patient record");
  return guarded("patient record", [&] {
    PatientRecord r;
    r.profile = profile_body_from(req(doc, "profile"));
    for (const auto& e : req(doc, "mandatory_electrolytes")) r.mandatory_electrolytes.push_back(electrolyte_from_json(e));
    for (const auto& n : req(doc, "mandatory_nutrients")) r.mandatory_nutrients.push_back(nutrient_from_json(n));
    for (const auto& l : req(doc, "labs")) r.labs.push_back(lab_from_json(l));
    for (const auto& e : req(doc, "intake_log")) r.intake_log.push_back(intake_entry_from_json(e));
    return r;
  });
}

// ---------------------------------------------------------------------------
// models

Json to_json(const ForestParams& p) {
  return {{"n_trees", p.n_trees},
          {"max_depth", p.max_depth ? Json(*p.max_depth) : Json(nullptr)},
          {"min_samples_leaf", p.min_samples_leaf},
          {"max_features", p.max_features.label()},
          {"seed", p.seed},
          {"bootstrap", p.bootstrap}};
}

ForestParams params_from_json(const Json& j) {
  return guarded("forest params", [&] {
    ForestParams p;
    p.n_trees = j.value("n_trees", p.n_trees);
    if (j.contains("max_depth") && !j.at("max_depth").is_null()) p.max_depth = j.at("max_depth").get<int>();
    p.min_samples_leaf = j.value("min_samples_leaf", p.min_samples_leaf);
    if (j.contains("max_features")) {
      const auto& mf = j.at("max_features");
      p.max_features = MaxFeatures::parse(mf.is_string() ? mf.get<std::string>() : mf.dump());
    }
    p.seed = j.value("seed", p.seed);
    p.bootstrap = j.value("bootstrap", true);
    p.validate();
    return p;
  });
}

Json to_json(const ForestModel& m) {
  Json trees = Json::array();
  for (const auto& t : m.trees) trees.push_back(tree_json(t));
  return versioned({{"target_analyte", m.target_analyte},
                    {"params", to_json(m.params)},
                    {"feature_names", m.feature_names},
                    {"target_range", {m.target_lo, m.target_hi}},
                    {"window_size", m.window_size},
                    {"target_offset", m.target_offset},
                    {"trees", trees}});
}

ForestModel model_from_json(const Json& doc) {
  check_schema(doc, "model");
  return guarded("model", [&] {
    ForestModel m;
    m.target_analyte = req(doc, "target_analyte").get<std::string>();
    m.params = params_from_json(req(doc, "params"));
    m.feature_names = req(doc, "feature_names").get<std::vector<std::string>>();
    const auto range = req(doc, "target_range").get<std::vector<double>>();
    if (range.size() != 2) fail(ErrorCode::Parse, "target_range must have two values");
    m.target_lo = range[0];
    m.target_hi = range[1];
    m.window_size = doc.value("window_size", 3);
    m.target_offset = doc.value("target_offset", 1);
    for (const auto& t : req(doc, "trees")) {
      auto tree = tree_from_json(t);
      for (const auto& n : tree.nodes()) {
        if (n.feature >= static_cast<std::int32_t>(m.feature_names.size())) fail(ErrorCode::Parse, "split feature out of range");
      }
      m.trees.push_back(std::move(tree));
    }
    return m;
  });
}

// ---------------------------------------------------------------------------
// cycle outputs

Json to_json(const PredictionSet& ps) {
  Json entries = Json::array();
  for (const auto& e : ps.entries) {
    entries.push_back({{"analyte", e.analyte},
                       {"value", e.value},
                       {"as_of", format_date(e.as_of)},
                       {"target_date", format_date(e.target_date)}});
  }
  return versioned({{"as_of", format_date(ps.as_of)}, {"predictions", entries}});
}

PredictionSet predictions_from_json(const Json& doc) {
  check_schema(doc, "predictions");
  return guarded("predictions", [&] {
    PredictionSet ps;
    ps.as_of = parse_date(req(doc, "as_of").get<std::string>());
    for (const auto& e : req(doc, "predictions")) {
      ps.entries.push_back({req(e, "analyte").get<std::string>(), req(e, "value").get<double>(),
                            parse_date(req(e, "as_of").get<std::string>()),
                            parse_date(req(e, "target_date").get<std::string>())});
    }
    return ps;
  });
}

Json to_json(const OptimizedRequirements& om) {
  Json nutrients = Json::array();
  for (const auto& n : om.nutrients) nutrients.push_back(to_json(n));
  Json prov = Json::array();
  for (const auto& a : om.provenance) {
    Json j = {{"analyte", a.analyte},
              {"predicted", a.predicted},
              {"branch", to_string(a.branch)},
              {"nutrient", a.nutrient},
              {"bound", a.bound},
              {"old_value", opt_number(a.old_value)},
              {"new_value", opt_number(a.new_value)},
              {"clamped", a.clamped}};
    if (!a.warning.empty()) j["warning"] = a.warning;
    prov.push_back(j);
  }
  return versioned({{"rho", om.rho}, {"nutrients", nutrients}, {"provenance", prov}});
}

OptimizedRequirements requirements_from_json(const Json& doc) {
  check_schema(doc, "requirements");
  return guarded("requirements", [&] {
    OptimizedRequirements om;
    om.rho = req(doc, "rho").get<double>();
    for (const auto& n : req(doc, "nutrients")) om.nutrients.push_back(nutrient_from_json(n));
    for (const auto& a : req(doc, "provenance")) {
      Adjustment adj;
      adj.analyte = req(a, "analyte").get<std::string>();
      adj.predicted = req(a, "predicted").get<double>();
      const auto branch = req(a, "branch").get<std::string>();
      adj.branch = branch == "high" ? AdjustmentBranch::High
                   : branch == "low" ? AdjustmentBranch::Low
                                     : AdjustmentBranch::InRange;
      adj.nutrient = req(a, "nutrient").get<std::string>();
      adj.bound = a.value("bound", std::string());
      adj.old_value = read_opt_number(a, "old_value");
      adj.new_value = read_opt_number(a, "new_value");
      adj.clamped = a.value("clamped", false);
      adj.warning = a.value("warning", std::string());
      om.provenance.push_back(std::move(adj));
    }
    return om;
  });
}

Json to_json(const Recommendation& rec) {
  Json items = Json::array();
  for (const auto& it : rec.items) {
    Json fit = Json::array();
    for (const auto& f : it.fit) {
      fit.push_back({{"nutrient", f.nutrient},
                     {"consumed", f.consumed},
                     {"remaining_lo", f.remaining_lo},
                     {"remaining_hi", finite_or_null(f.remaining_hi)},
                     {"item_amount", f.missing ? Json(nullptr) : Json(f.item_amount)},
                     {"pass", f.pass}});
    }
    items.push_back({{"item_id", it.item_id},
                     {"name", it.name},
                     {"serving_size", it.serving_size},
                     {"similarity", it.similarity},
                     {"satisfaction", it.satisfaction},
                     {"fit", fit}});
  }
  return versioned({{"date", format_date(rec.date)}, {"meal_index", rec.meal_index}, {"items", items}});
}

Json to_json(const MetricsReport& m) {
  return versioned({{"n", m.n},
                    {"mae", m.mae},
                    {"mape", m.mape},
                    {"mse", m.mse},
                    {"rmse", m.rmse},
                    {"r2", m.r2},
                    {"accuracy", m.accuracy}});
}

}  // namespace elyte
