#include "elyte/service.hpp"

#include "elyte/error.hpp"
#include "elyte/evaluation.hpp"
#include "elyte/reference_tables.hpp"
#include "elyte/serialize.hpp"

#include <sstream>

namespace elyte {

namespace {

Json with_version(Json body) {
  Json doc = {{"schema_version", kSchemaVersion}};
  doc.update(body);
  return doc;
}

Json totals_row(const DayTotals& t, int meal_index) {
  auto doc = to_json(t);
  doc["meal_index"] = meal_index;
  return doc;
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownPatient:
    case ErrorCode::UnknownItem:
      return 404;
    case ErrorCode::DuplicateDate:
      return 409;
    case ErrorCode::NoFeasibleItem:
      return 422;
    case ErrorCode::Io:
      return 500;
    default:
      return 400;
  }
}

Service::Service(std::filesystem::path root) : ws_(std::move(root)) {}

std::shared_ptr<std::mutex> Service::patient_lock(const std::string& id) {
  std::lock_guard g(locks_mutex_);
  auto& m = locks_[id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

std::shared_ptr<const Catalog> Service::catalog() {
  std::lock_guard g(cache_mutex_);
  if (!catalog_) catalog_ = std::make_shared<const Catalog>(ws_.load_catalog());
  return catalog_;
}

std::shared_ptr<const Recommender> Service::recommender() {
  auto cat = catalog();
  std::lock_guard g(cache_mutex_);
  if (!recommender_) {
    const auto cfg = ws_.config();
    struct Bundle {
      std::shared_ptr<const Catalog> catalog;
      Recommender rec;
    };
    const std::size_t classes = std::min(cfg.classes, cat->size());
    auto bundle = std::make_shared<Bundle>(Bundle{cat, Recommender(*cat, classes, cfg.cluster_seed)});
    recommender_ = std::shared_ptr<const Recommender>(bundle, &bundle->rec);
  }
  return recommender_;
}

Date Service::default_date(const PatientRecord& record) const {
  std::optional<Date> last;
  for (const auto& e : record.intake_log) {
    if (!last || e.date > *last) last = e.date;
  }
  return last ? *last : today_utc();
}

OptimizedRequirements Service::effective_requirements(const PatientRecord& record) {
  if (auto cycle = ws_.load_cycle(record.id())) return cycle->requirements;
  OptimizedRequirements base;
  base.nutrients = record.mandatory_nutrients;
  base.rho = ws_.config().rho;
  return base;
}

// ---------------------------------------------------------------------------
// catalog

Json Service::ingest(const FdcFiles& files, const std::vector<std::string>& whitelist) {
  auto cat = ingest_fdc(files, whitelist);
  ws_.save_catalog(cat);
  {
    std::lock_guard g(cache_mutex_);
    catalog_.reset();
    recommender_.reset();
  }
  Json nutrients = Json::array();
  for (const auto& n : cat.nutrients()) nutrients.push_back({{"id", n.id}, {"unit", to_string(n.unit)}});
  std::size_t missing = 0;
  for (const auto& it : cat.items()) {
    for (auto m : it.missing) missing += m;
  }
  return with_version({{"items", cat.size()}, {"nutrients", nutrients}, {"missing_values", missing}});
}

Json Service::catalog_search(const std::string& query, std::size_t limit) {
  auto cat = catalog();
  Json items = Json::array();
  for (const auto* it : cat->search(query, limit)) items.push_back(to_json(*it, *cat));
  return with_version({{"query", query}, {"items", items}});
}

// ---------------------------------------------------------------------------
// patients

Json Service::add_patient(const PatientProfile& profile) {
  auto lock = patient_lock(profile.patient_id);
  std::lock_guard g(*lock);
  if (ws_.has_patient(profile.patient_id)) fail(ErrorCode::Validation, "patient '" + profile.patient_id + "' already exists");
  if (ws_.has_catalog()) {
    const auto cat = catalog();
    for (const auto& id : profile.liked_items) {
      if (!cat->contains(id)) fail(ErrorCode::UnknownItem, "liked item '" + id + "' is not in the catalog");
    }
  }
  auto record = make_patient(profile);
  ws_.save_patient(record);
  return to_json(record);
}

Json Service::show_patient(const std::string& id) {
  auto lock = patient_lock(id);
  std::lock_guard g(*lock);
  return to_json(ws_.load_patient(id));
}

Json Service::add_lab(const std::string& id, const LabReport& report) { return add_labs(id, {report}); }

Json Service::add_labs(const std::string& id, const std::vector<LabReport>& reports) {
  auto lock = patient_lock(id);
  std::lock_guard g(*lock);
  auto record = ws_.load_patient(id);
  for (const auto& r : reports) record_lab(record, r);
  ws_.save_patient(record);
  Json labs = Json::array();
  for (const auto& r : record.labs) labs.push_back(to_json(r));
  return with_version({{"patient_id", id}, {"labs", labs}});
}

Json Service::log_meal(const std::string& id, const IntakeLogEntry& entry, std::optional<Date> today) {
  return log_meals(id, {entry}, today);
}

Json Service::log_meals(const std::string& id, const std::vector<IntakeLogEntry>& entries, std::optional<Date> today) {
  if (entries.empty()) fail(ErrorCode::InvalidEntry, "no intake entries given");
  auto cat = catalog();
  auto lock = patient_lock(id);
  std::lock_guard g(*lock);
  auto record = ws_.load_patient(id);
  DayTotals last;
  for (const auto& e : entries) last = elyte::log_meal(record, e, *cat, SupplementRegistry::defaults(), today);
  ws_.save_patient(record);
  return totals_row(last, entries.back().meal_index);
}

// ---------------------------------------------------------------------------
// cohort, training, evaluation

Json Service::synth_gen(const SynthOptions& o) {
  const auto cat = fixture_catalog(o.catalog_items, o.seed);
  auto config = default_cohort_config(cat, o.seed, o.patients, o.days, o.noise_fraction);
  config.lab_every_days = o.lab_every_days;
  const auto cohort = generate_cohort(config, cat);

  ws_.save_catalog(cat);
  {
    std::lock_guard g(cache_mutex_);
    catalog_.reset();
    recommender_.reset();
  }
  Json ids = Json::array();
  for (const auto& rec : cohort.patients) {
    auto lock = patient_lock(rec.id());
    std::lock_guard g(*lock);
    ws_.save_patient(rec);
    ids.push_back(rec.id());
  }
  write_cohort(cohort, ws_.root() / "cohort");

  Json dyn = Json::array();
  for (const auto& d : config.dynamics) {
    dyn.push_back({{"analyte", d.analyte},
                   {"intake_nutrient", d.intake_nutrient},
                   {"carryover", d.carryover},
                   {"gain", d.gain},
                   {"clearance", d.clearance},
                   {"baseline", d.baseline},
                   {"noise_sd", d.noise_sd},
                   {"clip", {d.lo, d.hi}}});
  }
  return with_version({{"seed", o.seed},
                       {"patients", ids},
                       {"days", o.days},
                       {"catalog_items", cat.size()},
                       {"start", format_date(config.start)},
                       {"dynamics", dyn}});
}

Json Service::train(const std::vector<std::string>& analytes) {
  auto cat = catalog();
  const auto cfg = ws_.config();
  std::vector<PatientRecord> cohort;
  for (const auto& id : ws_.patient_ids()) cohort.push_back(ws_.load_patient(id));
  if (cohort.empty()) fail(ErrorCode::EmptyDataset, "workspace has no patients");

  std::lock_guard g(models_mutex_);
  Json out = Json::array();
  for (const auto& raw : analytes) {
    const auto analyte = canonical_name(raw);
    const auto& sets = InfluenceRegistry::defaults().get(analyte);
    std::vector<WindowedDataset> parts;
    for (const auto& rec : cohort) {
      if (rec.labs.empty()) continue;
      parts.push_back(patient_dataset(rec, *cat, sets, cfg.window_size, cfg.target_offset));
    }
    const auto pooled = pool_chronological(parts);
    auto result = grid_search_cv(pooled, cfg.grid.expand(), cfg.cv);
    ws_.save_model(result.model);

    std::ostringstream cv;
    write_cv_csv(cv, result.cv_table);
    atomic_write(ws_.reports_dir() / (analyte + "_cv.csv"), cv.str());

    Json holdout = nullptr;
    if (result.holdout_size >= 2) {
      std::vector<double> actual, predicted;
      for (std::size_t i = result.development_size; i < pooled.size(); ++i) {
        actual.push_back(pooled.rows[i].target);
        predicted.push_back(elyte::predict(result.model, pooled.rows[i].features));
      }
      try {
        holdout = to_json(metrics(actual, predicted));
        holdout.erase("schema_version");
      } catch (const Error&) {
        holdout = nullptr;  // constant or zero actuals: metrics undefined
      }
    }
    double best_rmse = 0.0;
    for (const auto& row : result.cv_table) {
      if (row.params == result.best) best_rmse = row.mean_rmse;
    }
    out.push_back({{"analyte", analyte},
                   {"samples", pooled.size()},
                   {"development_size", result.development_size},
                   {"holdout_size", result.holdout_size},
                   {"best_params", to_json(result.best)},
                   {"cv_mean_rmse", best_rmse},
                   {"holdout", holdout}});
  }
  return with_version({{"models", out}});
}

Json Service::evaluate(const std::vector<std::string>& analytes) {
  auto cat = catalog();
  const auto cfg = ws_.config();
  std::vector<PatientRecord> cohort;
  for (const auto& id : ws_.patient_ids()) cohort.push_back(ws_.load_patient(id));
  EvaluationOptions opt;
  opt.grid = cfg.grid;
  opt.cv = cfg.cv;
  opt.window_size = cfg.window_size;
  opt.target_offset = cfg.target_offset;
  const auto report = evaluate_pipeline(cohort, *cat, analytes, opt);
  write_report(report, ws_.reports_dir());
  return to_json(report);
}

// ---------------------------------------------------------------------------
// daily cycle

Json Service::predict(const std::string& id, std::optional<Date> as_of) {
  auto cat = catalog();
  auto lock = patient_lock(id);
  std::lock_guard g(*lock);
  const auto record = ws_.load_patient(id);
  const Date d = as_of.value_or(default_date(record));
  std::lock_guard mg(models_mutex_);
  const auto models = ws_.load_models();
  return to_json(predict_all(record, *cat, models, reference::predicted_analytes(), d));
}

Json Service::run_cycle(const std::string& id, std::optional<Date> as_of) {
  auto cat = catalog();
  auto lock = patient_lock(id);
  std::lock_guard g(*lock);
  const auto record = ws_.load_patient(id);
  const Date d = as_of.value_or(default_date(record));

  auto cycle_json = [&](const CycleState& s, bool reused) {
    return with_version({{"patient_id", id},
                         {"date", format_date(s.date)},
                         {"reused", reused},
                         {"predictions", to_json(s.predictions)},
                         {"requirements", to_json(s.requirements)}});
  };
  if (auto prev = ws_.load_cycle(id); prev && prev->date == d) return cycle_json(*prev, true);

  CycleState s;
  s.date = d;
  {
    std::lock_guard mg(models_mutex_);
    const auto models = ws_.load_models();
    s.predictions = predict_all(record, *cat, models, reference::predicted_analytes(), d);
  }
  // each cycle starts from the base constraint set, so rho is applied once
  s.requirements = optimize(record.mandatory_nutrients, s.predictions, record.mandatory_electrolytes, default_links(),
                            ws_.config().rho);
  ws_.save_cycle(id, s);
  return cycle_json(s, false);
}

Json Service::requirements(const std::string& id) {
  auto lock = patient_lock(id);
  std::lock_guard g(*lock);
  const auto record = ws_.load_patient(id);
  const auto cycle = ws_.load_cycle(id);
  auto doc = to_json(effective_requirements(record));
  doc["patient_id"] = id;
  doc["cycle_date"] = cycle ? Json(format_date(cycle->date)) : Json(nullptr);
  Json ranges = Json::array();
  for (const auto& e : record.mandatory_electrolytes) ranges.push_back(to_json(e));
  doc["electrolyte_ranges"] = ranges;
  return doc;
}

Json Service::recommend(const std::string& id, int meal_index, std::optional<std::size_t> k, std::optional<Date> date,
                        std::optional<std::size_t> top_classes) {
  auto rec = recommender();
  const auto cfg = ws_.config();
  auto lock = patient_lock(id);
  std::lock_guard g(*lock);
  const auto record = ws_.load_patient(id);
  RecommendOptions opt;
  opt.k = k.value_or(cfg.k);
  opt.top_classes = top_classes.value_or(cfg.top_classes);
  opt.tau_days = cfg.tau_days;
  const Date d = date.value_or(default_date(record));
  auto doc = to_json(rec->recommend(record, effective_requirements(record), d, meal_index, opt));
  doc["patient_id"] = id;
  return doc;
}

}  // namespace elyte
