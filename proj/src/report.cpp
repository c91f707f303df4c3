#include "sgm/report.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace sgm {

Json interval_json(const Interval& v, int digits) {
  Json j;
  j["lo"] = dec_lo(v, digits);
  j["hi"] = dec_hi(v, digits);
  j["precision_bits"] = static_cast<std::int64_t>(v.prec());
  return j;
}

Json row_json(const CheckRow& r) {
  Json j;
  j["condition"] = r.condition;
  j["verdict"] = to_string(r.verdict);
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json rows_json(const std::vector<CheckRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) arr.push_back(row_json(r));
  return arr;
}

std::string render_report(const Json& j) {
  // nlohmann's default object type is std::map, so keys come out sorted and
  // the byte stream depends only on the content.
  return j.dump(2) + "\n";
}

void write_report(const Json& j, const std::string& path) {
  const std::string text = render_report(j);
  if (path == "-" || path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {
std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}
}  // namespace

std::string csv_rows(const std::vector<CheckRow>& rows) {
  std::ostringstream out;
  out << "condition,verdict,lhs,rhs,note\n";
  for (const auto& r : rows) {
    out << csv_quote(r.condition) << ',' << to_string(r.verdict) << ','
        << csv_quote(r.lhs) << ',' << csv_quote(r.rhs) << ','
        << csv_quote(r.note) << '\n';
  }
  return out.str();
}

}  // namespace sgm
