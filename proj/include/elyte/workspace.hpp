#pragma once

#include "elyte/dates.hpp"
#include "elyte/food_catalog.hpp"
#include "elyte/forecaster.hpp"
#include "elyte/forest.hpp"
#include "elyte/optimizer.hpp"
#include "elyte/patient.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace elyte {

/// Write `contents` to a sibling temp file, flush it, then rename over
/// `path`. Readers see the old file or the new one, never a partial write.
void atomic_write(const std::filesystem::path& path, const std::string& contents);
std::string read_text(const std::filesystem::path& path);  // throws Io

struct WorkspaceConfig {
  double rho = 0.10;
  int tau_days = 30;
  std::size_t classes = 8;
  std::size_t k = 5;
  std::size_t top_classes = 3;
  int window_size = 3;
  int target_offset = 1;
  std::uint64_t cluster_seed = 7;
  ParamGrid grid;
  CvOptions cv;
};

/// The last predict + optimize cycle run for a patient.
struct CycleState {
  Date date;
  PredictionSet predictions;
  OptimizedRequirements requirements;
};

/// Directory layout:
///   config.json  catalog.json  patients/<id>.json  cycles/<id>.json
///   models/<analyte>.json  reports/
/// Every file carries schema_version; every write is atomic. Leftover
/// "*.tmp" files from an interrupted write are ignored.
class Workspace {
public:
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  WorkspaceConfig config() const;  // defaults when config.json is absent
  void save_config(const WorkspaceConfig& config) const;

  bool has_catalog() const;
  Catalog load_catalog() const;  // throws EmptyCatalog when absent
  void save_catalog(const Catalog& catalog) const;

  bool has_patient(const std::string& id) const;
  PatientRecord load_patient(const std::string& id) const;  // throws UnknownPatient
  void save_patient(const PatientRecord& record) const;
  std::vector<std::string> patient_ids() const;

  std::optional<CycleState> load_cycle(const std::string& id) const;
  void save_cycle(const std::string& id, const CycleState& state) const;

  bool has_model(const std::string& analyte) const;
  ForestModel load_model(const std::string& analyte) const;  // throws UntrainedAnalyte
  void save_model(const ForestModel& model) const;
  std::map<std::string, ForestModel> load_models() const;

  std::filesystem::path reports_dir() const { return root_ / "reports"; }

private:
  std::filesystem::path root_;
};

nlohmann::json to_json(const WorkspaceConfig& config);
WorkspaceConfig config_from_json(const nlohmann::json& doc);

}  // namespace elyte
