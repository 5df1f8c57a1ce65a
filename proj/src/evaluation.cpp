#include "elyte/evaluation.hpp"

#include "elyte/csv.hpp"
#include "elyte/error.hpp"
#include "elyte/serialize.hpp"
#include "elyte/workspace.hpp"

#include <ostream>
#include <sstream>

namespace elyte {

const AnalyteEvaluation* EvaluationReport::find(std::string_view analyte) const {
  for (const auto& a : analytes) {
    if (a.analyte == analyte) return &a;
  }
  return nullptr;
}

EvaluationReport evaluate_pipeline(const std::vector<PatientRecord>& cohort, const Catalog& catalog,
                                   const std::vector<std::string>& analytes, const EvaluationOptions& options,
                                   const InfluenceRegistry& registry) {
  if (cohort.empty()) fail(ErrorCode::EmptyDataset, "cohort has no patients");
  EvaluationReport report;
  for (const auto& raw : analytes) {
    const auto analyte = canonical_name(raw);
    const auto& sets = registry.get(analyte);
    std::vector<WindowedDataset> parts;
    for (const auto& rec : cohort) {
      parts.push_back(patient_dataset(rec, catalog, sets, options.window_size, options.target_offset));
    }
    const auto pooled = pool_chronological(parts);

    AnalyteEvaluation ev;
    ev.analyte = analyte;
    ev.search = grid_search_cv(pooled, options.grid.expand(), options.cv);
    for (std::size_t i = ev.search.development_size; i < pooled.size(); ++i) {
      const auto& s = pooled.rows[i];
      ev.actual.push_back(s.target);
      ev.predicted.push_back(predict(ev.search.model, s.features));
      ev.target_dates.push_back(s.target_date);
      ev.patient_ids.push_back(s.patient_id);
    }
    ev.holdout = metrics(ev.actual, ev.predicted);
    report.analytes.push_back(std::move(ev));
  }
  return report;
}

void write_actual_vs_predicted_csv(std::ostream& out, const AnalyteEvaluation& eval) {
  csv::write_row(out, {"actual", "predicted"});
  for (std::size_t i = 0; i < eval.actual.size(); ++i) {
    csv::write_row(out, {csv::number(eval.actual[i]), csv::number(eval.predicted[i])});
  }
}

nlohmann::json to_json(const EvaluationReport& report) {
  Json analytes = Json::array();
  for (const auto& a : report.analytes) {
    auto m = to_json(a.holdout);
    m.erase("schema_version");
    analytes.push_back({{"analyte", a.analyte},
                        {"best_params", to_json(a.search.best)},
                        {"development_size", a.search.development_size},
                        {"holdout_size", a.search.holdout_size},
                        {"holdout", m}});
  }
  return {{"schema_version", kSchemaVersion}, {"analytes", analytes}};
}

void write_report(const EvaluationReport& report, const std::filesystem::path& dir) {
  atomic_write(dir / "report.json", to_json(report).dump(2) + "\n");
  for (const auto& a : report.analytes) {
    std::ostringstream cv;
    write_cv_csv(cv, a.search.cv_table);
    atomic_write(dir / (a.analyte + "_cv.csv"), cv.str());
    std::ostringstream avp;
    write_actual_vs_predicted_csv(avp, a);
    atomic_write(dir / (a.analyte + "_actual_vs_predicted.csv"), avp.str());
  }
}

}  // namespace elyte
