#pragma once

// CSV + JSON sidecar serialization of measures.
//
// CSV columns are x,y,z,w with every number printed at 17 significant
// digits through std::to_chars (locale independent), which round-trips
// IEEE doubles exactly.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "arlab/measure.hpp"

namespace arlab {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r' || text.back() == '\t')) text.remove_suffix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error("cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

/// Writes a CSV row from already-formatted cells.
inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

inline void write_measure_csv(std::ostream& os, const DiscreteMeasure& m) {
  os << "x,y,z,w\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& p = m.points()[i];
    write_csv_row(os, {format_double(p.x), format_double(p.y), format_double(p.z), format_double(m.weights()[i])});
  }
}

inline nlohmann::json measure_meta_json(const DiscreteMeasure& m) {
  return {{"builder", m.meta().builder},
          {"params", m.meta().params},
          {"count", m.size()},
          {"mass", m.mass()},
          {"columns", {"x", "y", "z", "w"}}};
}

inline DiscreteMeasure read_measure_csv(std::istream& is, MeasureMeta meta = {}) {
  std::string line;
  if (!std::getline(is, line)) throw Error("measure CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,z,w") throw Error("measure CSV: expected header 'x,y,z,w', got '" + line + "'");
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> cells;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      try {
        cells.push_back(parse_double(rest.substr(0, comma)));
      } catch (const Error& e) {
        throw Error("measure CSV line " + std::to_string(line_no) + ": " + e.what());
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 4) throw Error("measure CSV line " + std::to_string(line_no) + ": expected 4 columns");
    points.push_back({cells[0], cells[1], cells[2]});
    weights.push_back(cells[3]);
  }
  return DiscreteMeasure(std::move(points), std::move(weights), std::move(meta));
}

/// Writes <stem>.csv and <stem>.json; returns the two paths.
inline std::vector<std::string> save_measure(const std::string& stem, const DiscreteMeasure& m) {
  const std::string csv = stem + ".csv";
  const std::string json = stem + ".json";
  std::ofstream c(csv);
  if (!c) throw Error("cannot write " + csv);
  write_measure_csv(c, m);
  std::ofstream j(json);
  if (!j) throw Error("cannot write " + json);
  j << measure_meta_json(m).dump(2) << '\n';
  return {csv, json};
}

inline DiscreteMeasure load_measure(const std::string& stem) {
  std::ifstream c(stem + ".csv");
  if (!c) throw Error("cannot read " + stem + ".csv");
  MeasureMeta meta;
  std::ifstream j(stem + ".json");
  if (j) {
    const auto doc = nlohmann::json::parse(j);
    meta.builder = doc.value("builder", "");
    meta.params = doc.value("params", nlohmann::json::object());
  }
  return read_measure_csv(c, std::move(meta));
}

}  // namespace arlab
