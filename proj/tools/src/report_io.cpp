#include "cbmo_cli/report_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "cbmo/errors.hpp"

namespace cbmo::cli {

using ordered = nlohmann::ordered_json;

namespace {

ordered number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered optional_number(const std::optional<double>& v) { return v ? number(*v) : ordered(nullptr); }

double read_number(const ordered& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InvalidInput("report field '" + field + "': expected a number");
}

const ordered& at(const ordered& j, const std::string& field, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw InvalidInput("report field '" + field + "." + key + "': missing");
  return *it;
}

}  // namespace

std::string exact_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string reports_to_json(const std::vector<CheckReport>& reports) {
  ordered arr = ordered::array();
  for (const auto& r : reports) {
    ordered w = ordered::array();
    for (const auto& x : r.witnesses) w.push_back({{"input", x.input}, {"lhs", number(x.lhs)}, {"rhs", number(x.rhs)}});
    ordered o;
    o["statement_id"] = r.statement_id;
    o["pass"] = r.pass;
    o["empirical_constant"] = optional_number(r.empirical_constant);
    o["fitted_exponent"] = optional_number(r.fitted_exponent);
    o["witnesses"] = std::move(w);
    o["notes"] = r.notes;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<CheckReport> reports_from_json(const std::string& text) {
  ordered root;
  try {
    root = ordered::parse(text);
  } catch (const ordered::parse_error& e) {
    throw InvalidInput(std::string("report: malformed JSON: ") + e.what());
  }
  if (!root.is_array()) throw InvalidInput("report: expected an array of reports");
  std::vector<CheckReport> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string field = "[" + std::to_string(i) + "]";
    const ordered& o = root[i];
    if (!o.is_object()) throw InvalidInput("report field '" + field + "': expected an object");
    CheckReport r;
    const ordered& id = at(o, field, "statement_id");
    const ordered& pass = at(o, field, "pass");
    const ordered& notes = at(o, field, "notes");
    if (!id.is_string() || !pass.is_boolean() || !notes.is_string())
      throw InvalidInput("report field '" + field + "': wrong field types");
    r.statement_id = id.get<std::string>();
    r.pass = pass.get<bool>();
    r.notes = notes.get<std::string>();
    for (const char* key : {"empirical_constant", "fitted_exponent"}) {
      const ordered& v = at(o, field, key);
      if (v.is_null()) continue;
      (std::string(key) == "empirical_constant" ? r.empirical_constant : r.fitted_exponent) =
          read_number(v, field + "." + key);
    }
    const ordered& ws = at(o, field, "witnesses");
    if (!ws.is_array()) throw InvalidInput("report field '" + field + ".witnesses': expected an array");
    for (std::size_t k = 0; k < ws.size(); ++k) {
      const std::string wf = field + ".witnesses[" + std::to_string(k) + "]";
      const ordered& input = at(ws[k], wf, "input");
      if (!input.is_string()) throw InvalidInput("report field '" + wf + ".input': expected a string");
      r.witnesses.push_back({input.get<std::string>(), read_number(at(ws[k], wf, "lhs"), wf + ".lhs"),
                             read_number(at(ws[k], wf, "rhs"), wf + ".rhs")});
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string reports_to_csv(const std::vector<CheckReport>& reports) {
  std::string out = "statement_id,pass,input,lhs,rhs\n";
  for (const auto& r : reports)
    for (const auto& w : r.witnesses)
      out += csv_field(r.statement_id) + "," + (r.pass ? "true" : "false") + "," + csv_field(w.input) + "," +
             exact_number(w.lhs) + "," + exact_number(w.rhs) + "\n";
  return out;
}

}  // namespace cbmo::cli
