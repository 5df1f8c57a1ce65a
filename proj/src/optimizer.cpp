#include "elyte/optimizer.hpp"

#include "elyte/error.hpp"

#include <algorithm>

namespace elyte {

const AnalyteNutrientLinks& default_links() {
  static const AnalyteNutrientLinks links{
      {"sodium", {"sodium"}},
      {"potassium", {"potassium"}},
      {"bun", {"protein"}},
  };
  return links;
}

std::string_view to_string(AdjustmentBranch b) noexcept {
  switch (b) {
    case AdjustmentBranch::High: return "high";
    case AdjustmentBranch::Low: return "low";
    case AdjustmentBranch::InRange: return "in_range";
  }
  return "?";
}

const MandatoryNutrient* OptimizedRequirements::find(std::string_view nutrient) const {
  for (const auto& n : nutrients) {
    if (n.nutrient == nutrient) return &n;
  }
  return nullptr;
}

OptimizedRequirements optimize(const std::vector<MandatoryNutrient>& requirements, const PredictionSet& predictions,
                               const std::vector<MandatoryElectrolyte>& ranges, const AnalyteNutrientLinks& links,
                               double rho) {
  if (!(rho > 0.0 && rho < 1.0)) fail(ErrorCode::InvalidRho, "rho must lie in (0, 1)");

  OptimizedRequirements out;
  out.nutrients = requirements;
  out.rho = rho;

  // validate everything before touching anything
  for (const auto& pe : predictions.entries) {
    const auto range = std::find_if(ranges.begin(), ranges.end(), [&](const auto& r) { return r.analyte == pe.analyte; });
    if (range == ranges.end()) fail(ErrorCode::MissingRange, "no safe range for analyte '" + pe.analyte + "'");
    const auto link = links.find(pe.analyte);
    if (link == links.end() || link->second.empty()) fail(ErrorCode::MissingLink, "no nutrient linked to '" + pe.analyte + "'");
    for (const auto& nutrient : link->second) {
      if (!out.find(nutrient)) {
        fail(ErrorCode::MissingLink, "nutrient '" + nutrient + "' linked to '" + pe.analyte + "' is not a requirement");
      }
    }
  }

  for (const auto& pe : predictions.entries) {
    const auto& range = *std::find_if(ranges.begin(), ranges.end(), [&](const auto& r) { return r.analyte == pe.analyte; });
    AdjustmentBranch branch = AdjustmentBranch::InRange;
    if (pe.value > range.max) branch = AdjustmentBranch::High;
    else if (pe.value < range.min) branch = AdjustmentBranch::Low;

    for (const auto& name : links.at(pe.analyte)) {
      auto& n = *std::find_if(out.nutrients.begin(), out.nutrients.end(), [&](const auto& m) { return m.nutrient == name; });
      Adjustment adj;
      adj.analyte = pe.analyte;
      adj.predicted = pe.value;
      adj.branch = branch;
      adj.nutrient = name;

      if (branch == AdjustmentBranch::High) {
        adj.bound = "MI";
        adj.old_value = n.mi;
        if (n.mi) {
          n.mi = *n.mi - *n.mi * rho;
        } else {
          adj.warning = "MI not mandatory; nothing to lower";
          adj.bound.clear();
        }
        adj.new_value = n.mi;
      } else if (branch == AdjustmentBranch::Low) {
        adj.bound = "AI";
        adj.old_value = n.ai;
        if (n.ai) {
          n.ai = *n.ai + *n.ai * rho;
        } else {
          adj.warning = "AI not mandatory; nothing to raise";
          adj.bound.clear();
        }
        adj.new_value = n.ai;
      }

      if (n.ai && n.mi && *n.ai > *n.mi) {
        n.ai = std::min(*n.ai, *n.mi);
        adj.clamped = true;
        if (adj.bound == "AI") adj.new_value = n.ai;
      }
      out.provenance.push_back(std::move(adj));
    }
  }
  return out;
}

}  // namespace elyte
