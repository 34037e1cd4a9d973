#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace fracbound {

// Shortest round-trippable decimal form; deterministic across runs.
inline std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

// One CSV record; fields are pre-formatted, separator/terminator fixed.
inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

// One JSON object per line. Values arrive pre-formatted; `quoted` marks
// string-typed fields. Non-finite numbers must be mapped before this point.
inline std::string json_line(
    const std::vector<std::pair<std::string, std::string>>& fields,
    const std::vector<bool>& quoted) {
  std::string out = "{";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += '"';
    out += fields[i].first;
    out += "\":";
    if (quoted[i]) {
      out += '"';
      out += fields[i].second;
      out += '"';
    } else {
      out += fields[i].second;
    }
  }
  out += "}\n";
  return out;
}

// JSON-legal number token: finite values via g17, otherwise null.
inline std::string json_number(double x) {
  return std::isfinite(x) ? g17(x) : std::string("null");
}

}  // namespace fracbound
