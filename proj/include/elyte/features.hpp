#pragma once

#include "elyte/dates.hpp"
#include "elyte/patient.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace elyte {

class Catalog;

/// Intake features (fi) and lab features (fl) that influence one analyte.
struct InfluenceSets {
  std::string analyte;
  std::vector<std::string> food_features;
  std::vector<std::string> lab_features;

  /// fi followed by fl, duplicates dropped; the column order of every InputRow.
  std::vector<std::string> combined() const;
};

class InfluenceRegistry {
public:
  /// Sodium, potassium and BUN.
  static const InfluenceRegistry& defaults();

  void add(InfluenceSets sets);  // throws Validation on empty or duplicated lists
  const InfluenceSets& get(std::string_view analyte) const;  // throws UnsupportedAnalyte
  bool contains(std::string_view analyte) const;

private:
  std::map<std::string, InfluenceSets> sets_;
};

InfluenceSets influence_sets(std::string_view analyte, const InfluenceRegistry& registry = InfluenceRegistry::defaults());

/// One day of model input over InfluenceSets::combined().
struct InputRow {
  Date date;
  std::vector<double> values;
  std::map<std::string, double> measured;  // lab values actually reported on this date
};

/// Daily rows for [range.first, range.last]. Lab features carry the most
/// recent value at or before the day; intake features are that day's totals.
/// Throws NoLabHistory when the range starts before the first lab report.
std::vector<InputRow> build_input_rows(const PatientRecord& record, const Catalog& catalog, const InfluenceSets& sets,
                                       DateRange range,
                                       const SupplementRegistry& supplements = SupplementRegistry::defaults());

struct WindowSample {
  std::vector<double> features;
  double target = 0.0;
  Date first_feature_date;
  Date last_feature_date;
  Date target_date;
  std::string patient_id;
};

struct WindowedDataset {
  std::string analyte;
  int window_size = 3;
  int target_offset = 1;
  std::vector<std::string> feature_names;
  std::vector<WindowSample> rows;

  std::size_t feature_count() const { return feature_names.size(); }
  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

/// Names "<feature>[t-2]", "<feature>[t-1]", "<feature>[t]" for w = 3.
std::vector<std::string> window_feature_names(const std::vector<std::string>& row_features, int w);

/// Sliding-window restructuring. Sample i concatenates rows i..i+w-1 and its
/// target is the analyte measured on row i+w-1+target_offset (default: the
/// next day). Days without a measurement yield no sample.
WindowedDataset window(const std::vector<InputRow>& rows, const InfluenceSets& sets, int w = 3, int target_offset = 1,
                       std::string_view patient_id = {});

/// Features of the w days ending at `as_of`, for predicting as_of + 1.
std::vector<double> latest_window(const PatientRecord& record, const Catalog& catalog, const InfluenceSets& sets,
                                  Date as_of, int w = 3,
                                  const SupplementRegistry& supplements = SupplementRegistry::defaults());

/// Windowed samples for one patient over every day from its first lab to its
/// last logged day.
WindowedDataset patient_dataset(const PatientRecord& record, const Catalog& catalog, const InfluenceSets& sets,
                                int w = 3, int target_offset = 1,
                                const SupplementRegistry& supplements = SupplementRegistry::defaults());

/// Merge per-patient datasets and order samples by target date (patient id
/// breaks ties) so that chronological splits stay chronological.
WindowedDataset pool_chronological(const std::vector<WindowedDataset>& parts);

/// header = feature_names + "target"
void write_csv(std::ostream& out, const WindowedDataset& ds);

}  // namespace elyte
