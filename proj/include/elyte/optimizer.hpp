#pragma once

#include "elyte/forecaster.hpp"
#include "elyte/patient.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace elyte {

/// Which daily intake is adjusted when an analyte leaves its range.
using AnalyteNutrientLinks = std::map<std::string, std::vector<std::string>>;

/// sodium -> sodium, potassium -> potassium, bun -> protein.
const AnalyteNutrientLinks& default_links();

enum class AdjustmentBranch { High, Low, InRange };
std::string_view to_string(AdjustmentBranch b) noexcept;

struct Adjustment {
  std::string analyte;
  double predicted = 0.0;
  AdjustmentBranch branch = AdjustmentBranch::InRange;
  std::string nutrient;
  std::string bound;  // "AI", "MI" or "" when nothing moved
  std::optional<double> old_value;
  std::optional<double> new_value;
  bool clamped = false;  // AI pulled down to MI after the move
  std::string warning;
};

struct OptimizedRequirements {
  std::vector<MandatoryNutrient> nutrients;
  std::vector<Adjustment> provenance;
  double rho = 0.10;

  const MandatoryNutrient* find(std::string_view nutrient) const;
};

/// One application of the +/-rho rule: a prediction above its range lowers the
/// linked nutrients' MI by rho*MI, one below raises AI by rho*AI, otherwise
/// nothing changes. Unlinked nutrients are copied bit-for-bit.
/// Throws MissingRange, MissingLink, InvalidRho.
OptimizedRequirements optimize(const std::vector<MandatoryNutrient>& requirements, const PredictionSet& predictions,
                               const std::vector<MandatoryElectrolyte>& ranges,
                               const AnalyteNutrientLinks& links = default_links(), double rho = 0.10);

}  // namespace elyte
