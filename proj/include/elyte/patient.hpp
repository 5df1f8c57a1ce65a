#pragma once

#include "elyte/dates.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace elyte {

class Catalog;

/// Lowercase, trimmed, spaces and hyphens folded to '_' ("Food-Sodium" -> "food_sodium").
std::string canonical_name(std::string_view name);

// ---------------------------------------------------------------------------
// constraint sets

struct MandatoryElectrolyte {
  std::string analyte;
  double min = 0.0;
  double max = 0.0;
  std::string unit;

  bool contains(double v) const { return v >= min && v <= max; }
  bool operator==(const MandatoryElectrolyte&) const = default;
};

/// (nutrient, AI, MI) per day. An absent bound is "not mandatory" (ND/NM).
struct MandatoryNutrient {
  std::string nutrient;
  std::optional<double> ai;
  std::optional<double> mi;
  std::string unit;

  bool mandatory() const { return ai.has_value() || mi.has_value(); }
  bool operator==(const MandatoryNutrient&) const = default;
};

struct BoundOverride {
  enum class Kind { Inherit, NotMandatory, Value };
  Kind kind = Kind::Inherit;
  double value = 0.0;

  static BoundOverride inherit() { return {}; }
  static BoundOverride not_mandatory() { return {Kind::NotMandatory, 0.0}; }
  static BoundOverride of(double v) { return {Kind::Value, v}; }
  bool operator==(const BoundOverride&) const = default;
};

struct NutrientOverride {
  std::string nutrient;
  BoundOverride ai;
  BoundOverride mi;
  std::string unit;  // only used when the nutrient is not in the reference table
  bool operator==(const NutrientOverride&) const = default;
};

struct ElectrolyteOverride {
  std::string analyte;
  std::optional<double> min;
  std::optional<double> max;
  bool operator==(const ElectrolyteOverride&) const = default;
};

struct PatientProfile {
  std::string patient_id;
  std::string age_band;
  std::optional<double> weight_kg;
  std::vector<ElectrolyteOverride> electrolyte_overrides;
  std::vector<NutrientOverride> nutrient_overrides;
  std::set<std::string> liked_items;
  bool operator==(const PatientProfile&) const = default;
};

/// Table-1 standard ranges for sodium, potassium and BUN, with profile
/// overrides applied. An override naming another Table-1 analyte adds it.
std::vector<MandatoryElectrolyte> default_mandatory_electrolytes(const std::vector<ElectrolyteOverride>& overrides = {});

/// Reference intake row for `age_band` merged with per-patient overrides.
/// Protein in the reference table is per kg of body weight; it becomes an
/// absolute AI only when `weight_kg` is known.
std::vector<MandatoryNutrient> default_mandatory_nutrients(std::string_view age_band,
                                                           const std::vector<NutrientOverride>& overrides = {},
                                                           std::optional<double> weight_kg = std::nullopt);

// ---------------------------------------------------------------------------
// labs and intake

enum class LabSource { Inpatient, Outpatient };
std::string_view to_string(LabSource s) noexcept;
LabSource parse_lab_source(std::string_view text);

struct LabReport {
  Date date;
  std::map<std::string, double> results;  // canonical analyte -> value
  LabSource source = LabSource::Outpatient;
  bool operator==(const LabReport&) const = default;
};

/// One logged consumption event: a catalog item by grams, direct nutrient or
/// supplement amounts, and/or plain water.
struct IntakeLogEntry {
  Date date;
  int meal_index = 1;
  std::optional<std::string> item_id;
  double grams = 0.0;
  std::map<std::string, double> nutrients;
  double water_liters = 0.0;
  bool operator==(const IntakeLogEntry&) const = default;
};

/// A supplement or medication logged by dose. `effects` are signed nutrient
/// deltas per dose unit; binders carry negative deltas on the bound nutrient.
struct SupplementSpec {
  std::string name;
  std::string unit = "g";
  std::map<std::string, double> effects;
};

/// Registry of known supplements keyed by canonical name, with aliases.
class SupplementRegistry {
public:
  static const SupplementRegistry& defaults();

  void add(SupplementSpec spec, std::vector<std::string> aliases = {});
  const SupplementSpec* find(std::string_view name) const;
  std::vector<std::string> names() const;

private:
  std::map<std::string, SupplementSpec> specs_;
  std::map<std::string, std::string> aliases_;
};

/// Cumulative consumption for one day.
struct DayTotals {
  Date date;
  std::map<std::string, double> food;         // from catalog items, direct nutrients and water
  std::map<std::string, double> supplements;  // dose per supplement
  std::map<std::string, double> effective;    // food plus supplement deltas

  double food_amount(const std::string& n) const;
  double supplement_dose(const std::string& n) const;
  double effective_amount(const std::string& n) const;
};

struct PatientRecord {
  PatientProfile profile;
  std::vector<MandatoryElectrolyte> mandatory_electrolytes;
  std::vector<MandatoryNutrient> mandatory_nutrients;
  std::vector<LabReport> labs;  // ascending by date
  std::vector<IntakeLogEntry> intake_log;

  const std::string& id() const { return profile.patient_id; }
  bool operator==(const PatientRecord&) const = default;
};

/// Fresh record with constraint sets derived from the profile. Throws UnknownAgeBand.
PatientRecord make_patient(PatientProfile profile);

/// Append an intake entry and return the running totals for its day.
DayTotals log_meal(PatientRecord& record, IntakeLogEntry entry, const Catalog& catalog,
                   const SupplementRegistry& supplements = SupplementRegistry::defaults(),
                   std::optional<Date> today = std::nullopt);

/// Totals for `date` from everything logged so far.
DayTotals day_totals(const PatientRecord& record, const Catalog& catalog, Date date,
                     const SupplementRegistry& supplements = SupplementRegistry::defaults());

/// Totals for every logged day, keyed by date.
std::map<Date, DayTotals> all_day_totals(const PatientRecord& record, const Catalog& catalog,
                                         const SupplementRegistry& supplements = SupplementRegistry::defaults());

/// Insert keeping labs sorted. Same date and same values is a no-op; same date
/// with different values throws DuplicateDate.
void record_lab(PatientRecord& record, LabReport report);

/// Latest report dated at or before `date`, or nullptr.
const LabReport* most_recent_lab(const PatientRecord& record, Date date);

}  // namespace elyte
