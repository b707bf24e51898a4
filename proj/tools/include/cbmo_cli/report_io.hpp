#pragma once

#include <string>
#include <vector>

#include "cbmo/report.hpp"

namespace cbmo::cli {

/// JSON array of reports with the fields statement_id, pass,
/// empirical_constant, fitted_exponent, witnesses[{input, lhs, rhs}], notes.
/// Missing optionals are null; non-finite numbers are written as the strings
/// "inf", "-inf" or "nan". The output depends only on the reports.
std::string reports_to_json(const std::vector<CheckReport>& reports);
std::vector<CheckReport> reports_from_json(const std::string& text);

/// One row per witness: statement_id,pass,input,lhs,rhs.
std::string reports_to_csv(const std::vector<CheckReport>& reports);

/// RFC 4180 quoting for a single field.
std::string csv_field(const std::string& s);
/// Shortest text that reads back as the same double.
std::string exact_number(double v);

}  // namespace cbmo::cli
