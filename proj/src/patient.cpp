#include "elyte/patient.hpp"

#include "elyte/error.hpp"
#include "elyte/food_catalog.hpp"
#include "elyte/reference_tables.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace elyte {

std::string canonical_name(std::string_view name) {
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.remove_prefix(1);
  while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.remove_suffix(1);
  std::string out;
  out.reserve(name.size());
  for (unsigned char c : name) {
    if (c == ' ' || c == '-') {
      if (out.empty() || out.back() != '_') out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<MandatoryElectrolyte> default_mandatory_electrolytes(const std::vector<ElectrolyteOverride>& overrides) {
  std::vector<MandatoryElectrolyte> out;
  for (const auto& analyte : reference::predicted_analytes()) out.push_back(*reference::standard_range(analyte));

  for (const auto& ov : overrides) {
    const std::string key = canonical_name(ov.analyte);
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.analyte == key; });
    if (it == out.end()) {
      if (const auto* std_range = reference::standard_range(key)) {
        out.push_back(*std_range);
      } else if (ov.min && ov.max) {
        out.push_back({key, *ov.min, *ov.max, ""});
      } else {
        fail(ErrorCode::MissingRange, "override for '" + key + "' has no reference range and is incomplete");
      }
      it = std::prev(out.end());
    }
    if (ov.min) it->min = *ov.min;
    if (ov.max) it->max = *ov.max;
    if (!(it->min < it->max)) fail(ErrorCode::Validation, "range for '" + key + "' must satisfy min < max");
  }
  return out;
}

namespace {

void apply_bound(std::optional<double>& bound, const BoundOverride& ov) {
  switch (ov.kind) {
    case BoundOverride::Kind::Inherit: break;
    case BoundOverride::Kind::NotMandatory: bound.reset(); break;
    case BoundOverride::Kind::Value: bound = ov.value; break;
  }
}

}  // namespace

std::vector<MandatoryNutrient> default_mandatory_nutrients(std::string_view age_band,
                                                           const std::vector<NutrientOverride>& overrides,
                                                           std::optional<double> weight_kg) {
  const auto* row = reference::intake_row(age_band);
  if (!row) fail(ErrorCode::UnknownAgeBand, "unknown age band '" + std::string(age_band) + "'");

  auto cell = [](const std::string& name, const reference::IntakeCell& c, const std::string& unit) {
    return MandatoryNutrient{name, c.ai, c.mi, unit};
  };
  std::vector<MandatoryNutrient> out{
      cell("chloride", row->chloride, "mg"),   cell("iron", row->iron, "mg"), cell("phosphorus", row->phosphorus, "mg"),
      cell("potassium", row->potassium, "mg"), cell("sodium", row->sodium, "mg"),
  };
  MandatoryNutrient protein{"protein", std::nullopt, std::nullopt, "g"};
  if (weight_kg) {
    if (!(*weight_kg > 0.0)) fail(ErrorCode::Validation, "weight must be positive");
    if (row->protein_per_kg.ai) protein.ai = *row->protein_per_kg.ai * *weight_kg;
    if (row->protein_per_kg.mi) protein.mi = *row->protein_per_kg.mi * *weight_kg;
  }
  out.push_back(protein);
  out.push_back(cell("water", row->water, "L"));

  for (const auto& ov : overrides) {
    const std::string key = canonical_name(ov.nutrient);
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& n) { return n.nutrient == key; });
    if (it == out.end()) {
      out.push_back({key, std::nullopt, std::nullopt,
                     ov.unit.empty() ? std::string(to_string(canonical_unit(key))) : ov.unit});
      it = std::prev(out.end());
    }
    apply_bound(it->ai, ov.ai);
    apply_bound(it->mi, ov.mi);
  }
  for (const auto& n : out) {
    if (n.ai && n.mi && *n.ai > *n.mi) fail(ErrorCode::Validation, "nutrient '" + n.nutrient + "' has AI > MI");
    if ((n.ai && *n.ai < 0.0) || (n.mi && *n.mi < 0.0)) fail(ErrorCode::Validation, "negative bound on " + n.nutrient);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(LabSource s) noexcept { return s == LabSource::Inpatient ? "inpatient" : "outpatient"; }

LabSource parse_lab_source(std::string_view text) {
  const std::string t = canonical_name(text);
  if (t == "inpatient") return LabSource::Inpatient;
  if (t == "outpatient" || t.empty()) return LabSource::Outpatient;
  fail(ErrorCode::Parse, "unknown lab source '" + std::string(text) + "'");
}

const SupplementRegistry& SupplementRegistry::defaults() {
  static const SupplementRegistry reg = [] {
    SupplementRegistry r;
    // 6 g protein per 7 g scoop
    r.add({"beneprotein", "g", {{"protein", 6.0 / 7.0}}}, {"beneprotein_powder"});
    // KCl is 52.4% potassium, 47.6% chloride by mass
    r.add({"potassium_chloride", "g", {{"potassium", 524.4}, {"chloride", 475.6}}}, {"kcl"});
    // ~1 mEq (39.1 mg) potassium bound per gram of resin
    r.add({"sodium_polystyrene_sulfonate", "g", {{"potassium", -39.1}}},
          {"sodium_polystyrene_sulfonate_powder", "kayexalate", "sps"});
    // phosphate binder; effective phosphorus removed per gram
    r.add({"renvela", "g", {{"phosphorus", -64.0}}}, {"sevelamer", "sevelamer_carbonate"});
    return r;
  }();
  return reg;
}

void SupplementRegistry::add(SupplementSpec spec, std::vector<std::string> aliases) {
  spec.name = canonical_name(spec.name);
  for (auto& a : aliases) aliases_[canonical_name(a)] = spec.name;
  specs_[spec.name] = std::move(spec);
}

const SupplementSpec* SupplementRegistry::find(std::string_view name) const {
  std::string key = canonical_name(name);
  if (auto a = aliases_.find(key); a != aliases_.end()) key = a->second;
  auto it = specs_.find(key);
  return it == specs_.end() ? nullptr : &it->second;
}

std::vector<std::string> SupplementRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : specs_) out.push_back(k);
  return out;
}

namespace {
double lookup(const std::map<std::string, double>& m, const std::string& key) {
  auto it = m.find(key);
  return it == m.end() ? 0.0 : it->second;
}
}  // namespace

double DayTotals::food_amount(const std::string& n) const { return lookup(food, n); }
double DayTotals::supplement_dose(const std::string& n) const { return lookup(supplements, n); }
double DayTotals::effective_amount(const std::string& n) const { return lookup(effective, n); }

namespace {

void accumulate(DayTotals& totals, const IntakeLogEntry& e, const Catalog& catalog, const SupplementRegistry& reg) {
  if (e.item_id) {
    const auto& item = item_vector(catalog, *e.item_id);
    const double scale = e.grams / 100.0;
    for (std::size_t k = 0; k < catalog.feature_count(); ++k) {
      if (item.is_missing(k)) continue;
      totals.food[catalog.nutrients()[k].id] += scale * item.values[k];
    }
  }
  for (const auto& [name, amount] : e.nutrients) {
    if (const auto* sup = reg.find(name)) {
      totals.supplements[sup->name] += amount;
    } else {
      totals.food[canonical_name(name)] += amount;
    }
  }
  if (e.water_liters != 0.0) totals.food["water"] += e.water_liters;
}

void finish(DayTotals& totals, const SupplementRegistry& reg) {
  totals.effective = totals.food;
  for (const auto& [name, dose] : totals.supplements) {
    const auto* sup = reg.find(name);
    for (const auto& [nutrient, per_unit] : sup->effects) totals.effective[nutrient] += per_unit * dose;
  }
}

void validate_entry(const IntakeLogEntry& e, const Catalog& catalog, Date today) {
  if (e.meal_index < 1) fail(ErrorCode::InvalidEntry, "meal_index must be >= 1");
  if (e.date > today) fail(ErrorCode::InvalidEntry, "entry dated " + format_date(e.date) + " is in the future");
  if (!std::isfinite(e.grams) || !std::isfinite(e.water_liters)) fail(ErrorCode::InvalidEntry, "non-finite amount");
  if (e.grams < 0.0 || e.water_liters < 0.0) fail(ErrorCode::NegativeAmount, "amounts must be >= 0");
  for (const auto& [name, amount] : e.nutrients) {
    if (!std::isfinite(amount)) fail(ErrorCode::InvalidEntry, "non-finite amount for " + name);
    if (amount < 0.0) fail(ErrorCode::NegativeAmount, "negative amount for " + name);
  }
  if (e.item_id) item_vector(catalog, *e.item_id);
  if (!e.item_id && e.nutrients.empty() && e.water_liters == 0.0) {
    fail(ErrorCode::InvalidEntry, "entry has no item, nutrient or water amount");
  }
}

}  // namespace

DayTotals log_meal(PatientRecord& record, IntakeLogEntry entry, const Catalog& catalog,
                   const SupplementRegistry& supplements, std::optional<Date> today) {
  validate_entry(entry, catalog, today.value_or(today_utc()));
  const Date day = entry.date;
  record.intake_log.push_back(std::move(entry));
  return day_totals(record, catalog, day, supplements);
}

DayTotals day_totals(const PatientRecord& record, const Catalog& catalog, Date date,
                     const SupplementRegistry& supplements) {
  DayTotals totals;
  totals.date = date;
  for (const auto& e : record.intake_log) {
    if (e.date == date) accumulate(totals, e, catalog, supplements);
  }
  finish(totals, supplements);
  return totals;
}

std::map<Date, DayTotals> all_day_totals(const PatientRecord& record, const Catalog& catalog,
                                         const SupplementRegistry& supplements) {
  std::map<Date, DayTotals> out;
  for (const auto& e : record.intake_log) {
    auto& t = out[e.date];
    t.date = e.date;
    accumulate(t, e, catalog, supplements);
  }
  for (auto& [d, t] : out) finish(t, supplements);
  return out;
}

void record_lab(PatientRecord& record, LabReport report) {
  std::map<std::string, double> results;
  for (const auto& [analyte, value] : report.results) {
    if (!std::isfinite(value)) fail(ErrorCode::Validation, "non-finite lab value for " + analyte);
    results[canonical_name(analyte)] = value;
  }
  report.results = std::move(results);

  auto it = std::lower_bound(record.labs.begin(), record.labs.end(), report.date,
                             [](const LabReport& r, Date d) { return r.date < d; });
  if (it != record.labs.end() && it->date == report.date) {
    if (it->results == report.results) return;
    fail(ErrorCode::DuplicateDate, "a different lab report already exists for " + format_date(report.date));
  }
  record.labs.insert(it, std::move(report));
}

const LabReport* most_recent_lab(const PatientRecord& record, Date date) {
  auto it = std::upper_bound(record.labs.begin(), record.labs.end(), date,
                             [](Date d, const LabReport& r) { return d < r.date; });
  if (it == record.labs.begin()) return nullptr;
  return &*std::prev(it);
}

PatientRecord make_patient(PatientProfile profile) {
  PatientRecord r;
  r.mandatory_electrolytes = default_mandatory_electrolytes(profile.electrolyte_overrides);
  r.mandatory_nutrients = default_mandatory_nutrients(profile.age_band, profile.nutrient_overrides, profile.weight_kg);
  r.profile = std::move(profile);
  return r;
}

}  // namespace elyte
