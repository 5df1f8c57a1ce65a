#pragma once

// JSON forms of the persisted and exchanged types. Every top-level document
// carries "schema_version"; readers reject other versions.

#include "elyte/food_catalog.hpp"
#include "elyte/forecaster.hpp"
#include "elyte/forest.hpp"
#include "elyte/metrics.hpp"
#include "elyte/optimizer.hpp"
#include "elyte/patient.hpp"
#include "elyte/recommender.hpp"

#include <json.hpp>

namespace elyte {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Throws Validation unless doc["schema_version"] == kSchemaVersion.
void check_schema(const Json& doc, std::string_view what);

Json to_json(const Catalog& catalog);
Catalog catalog_from_json(const Json& doc);
Json to_json(const FoodItemVector& item, const Catalog& catalog);

Json to_json(const PatientProfile& profile);
PatientProfile profile_from_json(const Json& doc);
Json to_json(const PatientRecord& record);
PatientRecord record_from_json(const Json& doc);

Json to_json(const LabReport& report);
LabReport lab_from_json(const Json& doc);
Json to_json(const IntakeLogEntry& entry);
IntakeLogEntry intake_entry_from_json(const Json& doc);
Json to_json(const DayTotals& totals);

Json to_json(const MandatoryNutrient& n);
MandatoryNutrient nutrient_from_json(const Json& j);
Json to_json(const MandatoryElectrolyte& e);

Json to_json(const ForestParams& params);
ForestParams params_from_json(const Json& j);
Json to_json(const ForestModel& model);
ForestModel model_from_json(const Json& doc);

Json to_json(const PredictionSet& predictions);
PredictionSet predictions_from_json(const Json& doc);
Json to_json(const OptimizedRequirements& requirements);
OptimizedRequirements requirements_from_json(const Json& doc);

Json to_json(const Recommendation& recommendation);
Json to_json(const MetricsReport& report);

/// {"schema_version", "error": <code>, "message"}
Json error_json(std::string_view code, std::string_view message);

}  // namespace elyte
