#pragma once

// Operations behind both the command line and the HTTP API. Every call
// returns the JSON document the caller prints or sends, so the two surfaces
// cannot drift apart.

#include "elyte/cohort.hpp"
#include "elyte/error.hpp"
#include "elyte/food_catalog.hpp"
#include "elyte/recommender.hpp"
#include "elyte/workspace.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace elyte {

struct SynthOptions {
  std::uint64_t seed = 7;
  int patients = 5;
  int days = 120;
  std::size_t catalog_items = 200;
  double noise_fraction = 0.05;
  int lab_every_days = 1;
};

class Service {
public:
  explicit Service(std::filesystem::path root);

  Workspace& workspace() { return ws_; }

  nlohmann::json ingest(const FdcFiles& files, const std::vector<std::string>& whitelist = default_feature_whitelist());
  nlohmann::json catalog_search(const std::string& query, std::size_t limit = 20);

  nlohmann::json add_patient(const PatientProfile& profile);  // Validation when the id exists
  nlohmann::json show_patient(const std::string& id);
  nlohmann::json add_lab(const std::string& id, const LabReport& report);
  nlohmann::json add_labs(const std::string& id, const std::vector<LabReport>& reports);
  /// Logs one entry; returns the cumulative totals row of its day.
  nlohmann::json log_meal(const std::string& id, const IntakeLogEntry& entry, std::optional<Date> today = std::nullopt);
  nlohmann::json log_meals(const std::string& id, const std::vector<IntakeLogEntry>& entries,
                           std::optional<Date> today = std::nullopt);

  nlohmann::json synth_gen(const SynthOptions& options);
  nlohmann::json train(const std::vector<std::string>& analytes);
  nlohmann::json evaluate(const std::vector<std::string>& analytes);

  /// Forecast only; nothing is stored.
  nlohmann::json predict(const std::string& id, std::optional<Date> as_of = std::nullopt);
  /// Predict and optimize once per patient per day. A repeat on the same day
  /// returns the stored cycle with "reused": true.
  nlohmann::json run_cycle(const std::string& id, std::optional<Date> as_of = std::nullopt);
  /// Requirements in effect: the latest cycle's, or the base constraint set.
  nlohmann::json requirements(const std::string& id);
  nlohmann::json recommend(const std::string& id, int meal_index, std::optional<std::size_t> k = std::nullopt,
                           std::optional<Date> date = std::nullopt, std::optional<std::size_t> top_classes = std::nullopt);

private:
  std::shared_ptr<std::mutex> patient_lock(const std::string& id);
  std::shared_ptr<const Catalog> catalog();
  std::shared_ptr<const Recommender> recommender();
  Date default_date(const PatientRecord& record) const;
  OptimizedRequirements effective_requirements(const PatientRecord& record);

  Workspace ws_;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  std::mutex cache_mutex_;
  std::shared_ptr<const Catalog> catalog_;
  std::shared_ptr<const Recommender> recommender_;  // shares ownership of its catalog
  std::mutex models_mutex_;  // train and cycle must not interleave model reads and writes
};

/// Exit code / HTTP status for an error code.
int http_status(ErrorCode code) noexcept;

}  // namespace elyte
