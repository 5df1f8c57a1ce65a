#include "elyte/features.hpp"

#include "elyte/csv.hpp"
#include "elyte/error.hpp"
#include "elyte/food_catalog.hpp"
#include "elyte/reference_tables.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

namespace elyte {

std::vector<std::string> InfluenceSets::combined() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto* list : {&food_features, &lab_features}) {
    for (const auto& f : *list) {
      if (seen.insert(f).second) out.push_back(f);
    }
  }
  return out;
}

const InfluenceRegistry& InfluenceRegistry::defaults() {
  static const InfluenceRegistry reg = [] {
    InfluenceRegistry r;
    const auto& labs = reference::lab_feature_set();
    r.add({"sodium", {"sodium_polystyrene_sulfonate", "potassium_chloride", "food_sodium", "water"}, labs});
    r.add({"potassium", {"sodium_polystyrene_sulfonate", "potassium_chloride", "food_potassium", "water"}, labs});
    r.add({"bun", {"beneprotein", "food_protein", "water"}, labs});
    return r;
  }();
  return reg;
}

void InfluenceRegistry::add(InfluenceSets sets) {
  sets.analyte = canonical_name(sets.analyte);
  for (auto* list : {&sets.food_features, &sets.lab_features}) {
    if (list->empty()) fail(ErrorCode::Validation, "influence sets for '" + sets.analyte + "' must be non-empty");
    for (auto& f : *list) f = canonical_name(f);
    std::set<std::string> uniq(list->begin(), list->end());
    if (uniq.size() != list->size()) fail(ErrorCode::Validation, "duplicate feature in influence sets of " + sets.analyte);
  }
  const std::string key = sets.analyte;
  sets_[key] = std::move(sets);
}

const InfluenceSets& InfluenceRegistry::get(std::string_view analyte) const {
  auto it = sets_.find(canonical_name(analyte));
  if (it == sets_.end()) fail(ErrorCode::UnsupportedAnalyte, "no influence sets for analyte '" + std::string(analyte) + "'");
  return it->second;
}

bool InfluenceRegistry::contains(std::string_view analyte) const { return sets_.count(canonical_name(analyte)) != 0; }

InfluenceSets influence_sets(std::string_view analyte, const InfluenceRegistry& registry) {
  return registry.get(analyte);
}

namespace {

double intake_feature(const std::string& feature, const DayTotals* totals, const SupplementRegistry& supplements) {
  if (!totals) return 0.0;
  if (feature.rfind("food_", 0) == 0) return totals->food_amount(feature.substr(5));
  if (feature == "water") return totals->food_amount("water");
  if (const auto* sup = supplements.find(feature)) return totals->supplement_dose(sup->name);
  return totals->effective_amount(feature);
}

}  // namespace

std::vector<InputRow> build_input_rows(const PatientRecord& record, const Catalog& catalog, const InfluenceSets& sets,
                                       DateRange range, const SupplementRegistry& supplements) {
  if (record.labs.empty() || range.first < record.labs.front().date) {
    fail(ErrorCode::NoLabHistory, "patient '" + record.id() + "' has no lab report at or before " + format_date(range.first));
  }
  if (range.last < range.first) return {};

  const auto totals = all_day_totals(record, catalog, supplements);
  const std::size_t n_food = sets.food_features.size();
  const auto columns = sets.combined();

  std::map<std::string, double> carried;  // per-analyte LOCF state
  auto lab_it = record.labs.begin();
  std::vector<InputRow> rows;
  rows.reserve(static_cast<std::size_t>(days_between(range.first, range.last) + 1));

  for (Date d = range.first; d <= range.last; d = add_days(d, 1)) {
    InputRow row;
    row.date = d;
    while (lab_it != record.labs.end() && lab_it->date <= d) {
      for (const auto& [a, v] : lab_it->results) carried[a] = v;
      if (lab_it->date == d) row.measured = lab_it->results;
      ++lab_it;
    }
    const auto t = totals.find(d);
    const DayTotals* day = t == totals.end() ? nullptr : &t->second;
    row.values.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c < n_food) {
        row.values.push_back(intake_feature(columns[c], day, supplements));
      } else {
        auto it = carried.find(columns[c]);
        row.values.push_back(it == carried.end() ? 0.0 : it->second);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> window_feature_names(const std::vector<std::string>& row_features, int w) {
  std::vector<std::string> names;
  names.reserve(row_features.size() * static_cast<std::size_t>(w));
  for (int lag = w - 1; lag >= 0; --lag) {
    const std::string suffix = lag == 0 ? "[t]" : "[t-" + std::to_string(lag) + "]";
    for (const auto& f : row_features) names.push_back(f + suffix);
  }
  return names;
}

WindowedDataset window(const std::vector<InputRow>& rows, const InfluenceSets& sets, int w, int target_offset,
                       std::string_view patient_id) {
  if (w < 1 || target_offset < 0) fail(ErrorCode::InvalidConfig, "window size must be >= 1 and target offset >= 0");
  const auto& labs = sets.lab_features;
  if (std::find(labs.begin(), labs.end(), sets.analyte) == labs.end()) {
    fail(ErrorCode::UnsupportedAnalyte, "target '" + sets.analyte + "' is not among its lab features");
  }
  // a window plus its target day must fit, and the target must follow the window
  const std::size_t span = static_cast<std::size_t>(w) + static_cast<std::size_t>(std::max(target_offset, 1));
  if (rows.size() < span) {
    fail(ErrorCode::InsufficientHistory, "need at least " + std::to_string(span) + " daily rows, have " +
                                              std::to_string(rows.size()));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date != add_days(rows[i - 1].date, 1)) fail(ErrorCode::Validation, "input rows must be consecutive days");
  }

  const auto columns = sets.combined();
  WindowedDataset ds;
  ds.analyte = sets.analyte;
  ds.window_size = w;
  ds.target_offset = target_offset;
  ds.feature_names = window_feature_names(columns, w);

  const std::size_t last_start = rows.size() - static_cast<std::size_t>(w) - static_cast<std::size_t>(target_offset) + 1;
  for (std::size_t i = 0; i < last_start; ++i) {
    const auto& target_row = rows[i + static_cast<std::size_t>(w) - 1 + static_cast<std::size_t>(target_offset)];
    auto m = target_row.measured.find(sets.analyte);
    if (m == target_row.measured.end()) continue;
    WindowSample s;
    s.features.reserve(ds.feature_names.size());
    for (int j = 0; j < w; ++j) {
      const auto& r = rows[i + static_cast<std::size_t>(j)];
      s.features.insert(s.features.end(), r.values.begin(), r.values.end());
    }
    s.target = m->second;
    s.first_feature_date = rows[i].date;
    s.last_feature_date = rows[i + static_cast<std::size_t>(w) - 1].date;
    s.target_date = target_row.date;
    s.patient_id = std::string(patient_id);
    ds.rows.push_back(std::move(s));
  }
  return ds;
}

std::vector<double> latest_window(const PatientRecord& record, const Catalog& catalog, const InfluenceSets& sets,
                                  Date as_of, int w, const SupplementRegistry& supplements) {
  const auto rows = build_input_rows(record, catalog, sets, {add_days(as_of, -(w - 1)), as_of}, supplements);
  std::vector<double> features;
  for (const auto& r : rows) features.insert(features.end(), r.values.begin(), r.values.end());
  return features;
}

WindowedDataset patient_dataset(const PatientRecord& record, const Catalog& catalog, const InfluenceSets& sets, int w,
                                int target_offset, const SupplementRegistry& supplements) {
  if (record.labs.empty()) fail(ErrorCode::NoLabHistory, "patient '" + record.id() + "' has no lab reports");
  Date last = record.labs.back().date;
  for (const auto& e : record.intake_log) last = std::max(last, e.date);
  const auto rows = build_input_rows(record, catalog, sets, {record.labs.front().date, last}, supplements);
  return window(rows, sets, w, target_offset, record.id());
}

WindowedDataset pool_chronological(const std::vector<WindowedDataset>& parts) {
  if (parts.empty()) fail(ErrorCode::EmptyDataset, "nothing to pool");
  WindowedDataset out;
  out.analyte = parts.front().analyte;
  out.window_size = parts.front().window_size;
  out.target_offset = parts.front().target_offset;
  out.feature_names = parts.front().feature_names;
  for (const auto& p : parts) {
    if (p.feature_names != out.feature_names || p.analyte != out.analyte) {
      fail(ErrorCode::DimensionMismatch, "cannot pool datasets with different feature layouts");
    }
    out.rows.insert(out.rows.end(), p.rows.begin(), p.rows.end());
  }
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const WindowSample& a, const WindowSample& b) {
    if (a.target_date != b.target_date) return a.target_date < b.target_date;
    return a.patient_id < b.patient_id;
  });
  return out;
}

namespace {
std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace

void write_csv(std::ostream& out, const WindowedDataset& ds) {
  auto header = ds.feature_names;
  header.push_back("target");
  csv::write_row(out, header);
  for (const auto& r : ds.rows) {
    std::vector<std::string> fields;
    fields.reserve(r.features.size() + 1);
    for (double v : r.features) fields.push_back(number(v));
    fields.push_back(number(r.target));
    csv::write_row(out, fields);
  }
}

}  // namespace elyte
