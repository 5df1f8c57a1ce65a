#include "elyte/patient_io.hpp"

#include "elyte/csv.hpp"
#include "elyte/error.hpp"

#include <fstream>
#include <map>
#include <ostream>

namespace elyte {

void write_labs_csv(std::ostream& out, const std::vector<LabReport>& labs) {
  csv::write_row(out, {"date", "analyte", "value", "source"});
  for (const auto& r : labs) {
    for (const auto& [analyte, value] : r.results) {
      csv::write_row(out, {format_date(r.date), analyte, csv::number(value), std::string(to_string(r.source))});
    }
  }
}

std::vector<LabReport> read_labs_csv(std::istream& in) {
  const auto t = csv::parse(in);
  const auto c_date = t.require("date", "labs");
  const auto c_analyte = t.require("analyte", "labs");
  const auto c_value = t.require("value", "labs");
  const auto c_source = t.column("source");

  std::map<Date, LabReport> by_date;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = "labs row " + std::to_string(i + 2);
    const Date d = parse_date(row[c_date]);
    auto& rep = by_date[d];
    rep.date = d;
    if (c_source && !row[*c_source].empty()) rep.source = parse_lab_source(row[*c_source]);
    const auto analyte = canonical_name(row[c_analyte]);
    if (analyte.empty()) fail(ErrorCode::Parse, where + ": empty analyte");
    const double v = csv::to_double(row[c_value], where);
    auto [it, inserted] = rep.results.emplace(analyte, v);
    if (!inserted && it->second != v) {
      fail(ErrorCode::DuplicateDate, where + ": conflicting " + analyte + " values on " + format_date(d));
    }
  }
  std::vector<LabReport> out;
  for (auto& [d, r] : by_date) out.push_back(std::move(r));
  return out;
}

void write_intake_csv(std::ostream& out, const std::vector<IntakeLogEntry>& log) {
  csv::write_row(out, {"date", "meal_index", "item_id", "nutrient", "amount", "unit"});
  for (const auto& e : log) {
    const auto date = format_date(e.date);
    const auto meal = std::to_string(e.meal_index);
    if (e.item_id) csv::write_row(out, {date, meal, *e.item_id, "", csv::number(e.grams), "g"});
    for (const auto& [name, amount] : e.nutrients) csv::write_row(out, {date, meal, "", name, csv::number(amount), ""});
    if (e.water_liters != 0.0) csv::write_row(out, {date, meal, "", "water", csv::number(e.water_liters), "L"});
  }
}

std::vector<IntakeLogEntry> read_intake_csv(std::istream& in) {
  const auto t = csv::parse(in);
  const auto c_date = t.require("date", "intake");
  const auto c_meal = t.require("meal_index", "intake");
  const auto c_item = t.require("item_id", "intake");
  const auto c_nutrient = t.require("nutrient", "intake");
  const auto c_amount = t.require("amount", "intake");
  const auto c_unit = t.column("unit");

  std::vector<IntakeLogEntry> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = "intake row " + std::to_string(i + 2);
    IntakeLogEntry e;
    e.date = parse_date(row[c_date]);
    e.meal_index = static_cast<int>(csv::to_double(row[c_meal], where));
    const double amount = csv::to_double(row[c_amount], where);
    const std::string unit = c_unit ? row[*c_unit] : std::string();
    const bool has_item = !row[c_item].empty();
    const bool has_nutrient = !row[c_nutrient].empty();
    if (has_item == has_nutrient) fail(ErrorCode::Parse, where + ": set exactly one of item_id and nutrient");
    if (has_item) {
      if (!unit.empty() && unit != "g") fail(ErrorCode::UnitMismatch, where + ": item amounts are in g");
      e.item_id = row[c_item];
      e.grams = amount;
    } else if (const auto n = canonical_name(row[c_nutrient]); n == "water" && (unit == "L" || unit.empty())) {
      e.water_liters = amount;
    } else {
      e.nutrients[n] = amount;
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<LabReport> read_labs_file(const std::filesystem::path& path) {
  auto in = open(path);
  return read_labs_csv(in);
}

std::vector<IntakeLogEntry> read_intake_file(const std::filesystem::path& path) {
  auto in = open(path);
  return read_intake_csv(in);
}

}  // namespace elyte
