#pragma once

#include "elyte/features.hpp"
#include "elyte/forecaster.hpp"
#include "elyte/metrics.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace elyte {

struct EvaluationOptions {
  ParamGrid grid;
  CvOptions cv;
  int window_size = 3;
  int target_offset = 1;
};

struct AnalyteEvaluation {
  std::string analyte;
  GridSearchResult search;
  MetricsReport holdout;
  std::vector<double> actual;     // holdout targets, chronological
  std::vector<double> predicted;
  std::vector<Date> target_dates;
  std::vector<std::string> patient_ids;
};

struct EvaluationReport {
  std::vector<AnalyteEvaluation> analytes;

  const AnalyteEvaluation* find(std::string_view analyte) const;
};

/// Per analyte: pooled windows from every patient, chronological grid search,
/// then metrics of the refit model on the holdout samples.
EvaluationReport evaluate_pipeline(const std::vector<PatientRecord>& cohort, const Catalog& catalog,
                                   const std::vector<std::string>& analytes, const EvaluationOptions& options = {},
                                   const InfluenceRegistry& registry = InfluenceRegistry::defaults());

/// header "actual,predicted"
void write_actual_vs_predicted_csv(std::ostream& out, const AnalyteEvaluation& eval);

nlohmann::json to_json(const EvaluationReport& report);

/// report.json plus <analyte>_cv.csv and <analyte>_actual_vs_predicted.csv.
void write_report(const EvaluationReport& report, const std::filesystem::path& dir);

}  // namespace elyte
