#pragma once

// Flat-file formats for lab reports and intake logs.
//
// labs:   date,analyte,value,source          one row per result
// intake: date,meal_index,item_id,nutrient,amount,unit
//         item rows set item_id (amount in g); nutrient and supplement rows
//         set nutrient; plain water is nutrient "water" in L.

#include "elyte/patient.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace elyte {

void write_labs_csv(std::ostream& out, const std::vector<LabReport>& labs);
/// Rows sharing a date form one report. Throws Parse, MissingColumn.
std::vector<LabReport> read_labs_csv(std::istream& in);

/// Entries with several parts are written as several rows.
void write_intake_csv(std::ostream& out, const std::vector<IntakeLogEntry>& log);
/// One entry per row, in file order.
std::vector<IntakeLogEntry> read_intake_csv(std::istream& in);

std::vector<LabReport> read_labs_file(const std::filesystem::path& path);
std::vector<IntakeLogEntry> read_intake_file(const std::filesystem::path& path);

}  // namespace elyte
