#pragma once
// Deterministic report assembly.  Reports are JSON objects with sorted keys,
// no timestamps and no machine-dependent fields: identical inputs produce
// identical bytes.  Enclosures are rendered as decimal strings with the lower
// endpoint rounded down and the upper endpoint rounded up, so a report line
// remains a sound statement about the underlying real.

#include "sgm/interval.hpp"
#include "sgm/params.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace sgm {

using Json = nlohmann::json;

// {"lo": decimal, "hi": decimal, "precision_bits": n}
Json interval_json(const Interval& v, int digits = 17);
// {"condition", "verdict", "lhs", "rhs", "note"?}
Json row_json(const CheckRow& r);
Json rows_json(const std::vector<CheckRow>& rows);

// stable serialization: 2-space indent, sorted keys, trailing newline
std::string render_report(const Json& j);
// write to a file, or to stdout when path is "-"
void write_report(const Json& j, const std::string& path);

// CSV export of verdict rows: header + one line per row, fields quoted
std::string csv_rows(const std::vector<CheckRow>& rows);

}  // namespace sgm
