#pragma once

// File formats: features, diagrams, outlier reports, labels, sweep results,
// trajectory CSV, and atomic file replacement.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "looptrack/error.hpp"
#include "looptrack/features.hpp"
#include "looptrack/homology.hpp"
#include "looptrack/ingest.hpp"
#include "looptrack/pipeline.hpp"
#include "looptrack/sweep.hpp"
#include "looptrack/synth.hpp"
#include "looptrack/track.hpp"

namespace looptrack {

using ordered_json = nlohmann::ordered_json;

// Shortest text that parses back to the same double; "inf" for infinity.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("format_number: conversion failed");
  return std::string(buf, ptr);
}

// Epoch seconds in plain decimal, rounded to the microsecond.
inline std::string format_time(double t) {
  if (!std::isfinite(t)) return format_number(t);
  const double r = std::round(t * 1e6) / 1e6;
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), r == 0.0 ? 0.0 : r, std::chars_format::fixed);
  if (ec != std::errc()) throw Error("format_time: conversion failed");
  return std::string(buf, ptr);
}

inline std::string csv_field(std::string_view s, char delim = ',') {
  if (s.find_first_of(std::string("\"\r\n") + delim) == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Writes `content` to a temporary file beside `path`, then renames it over
// `path`, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw InputError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot replace '" + path.string() + "'");
  }
}

// ---- features -------------------------------------------------------------

inline void write_features_csv(std::ostream& out, const std::vector<FeatureRecord>& records) {
  out << "selector,n_points,n_h1,m1_km,m1_birth_km\n";
  for (const auto& r : records) {
    out << csv_field(r.selector) << ',' << r.n_points << ',' << r.n_h1 << ',' << format_number(r.m1)
        << ',' << format_number(r.m1_birth) << '\n';
  }
}

inline ordered_json record_json(const FeatureRecord& r) {
  return ordered_json{{"selector", r.selector},
                      {"n_points", r.n_points},
                      {"n_h1", r.n_h1},
                      {"m1_km", r.m1},
                      {"m1_birth_km", r.m1_birth}};
}

inline void write_features_json(std::ostream& out, const std::vector<FeatureRecord>& records) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : records) arr.push_back(record_json(r));
  out << arr.dump(2) << '\n';
}

namespace detail {

// Header lookup for the small CSV readers below.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
  }
};

inline CsvTable read_csv(std::istream& in, std::string_view what) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_record(line, ',');
    if (!fields) throw InputError(std::string(what) + ": malformed quoting on line " + std::to_string(line_no));
    if (table.header.empty()) {
      table.header = std::move(*fields);
    } else {
      table.rows.push_back(std::move(*fields));
      table.lines.push_back(line_no);
    }
  }
  if (table.header.empty()) throw InputError(std::string(what) + ": file is empty");
  return table;
}

inline std::vector<std::size_t> require_columns(const CsvTable& t, const std::vector<std::string>& names,
                                                std::string_view what) {
  std::vector<std::size_t> idx;
  std::string missing;
  for (const auto& n : names) {
    if (auto c = t.column(n)) {
      idx.push_back(*c);
    } else {
      missing += (missing.empty() ? "" : ", ") + n;
    }
  }
  if (!missing.empty()) throw InputError(std::string(what) + ": missing column(s): " + missing);
  return idx;
}

inline double number_field(const CsvTable& t, std::size_t row, std::size_t col, std::string_view what) {
  const auto& fields = t.rows[row];
  std::optional<double> v;
  if (col < fields.size()) {
    const std::string_view s = trim(fields[col]);
    if (s == "inf") {
      v = kInfinity;
    } else {
      v = parse_double(s);
    }
  }
  if (!v) {
    throw InputError(std::string(what) + ": line " + std::to_string(t.lines[row]) + ": column '" +
                     t.header[col] + "' is not a number");
  }
  return *v;
}

inline std::string text_field(const CsvTable& t, std::size_t row, std::size_t col) {
  const auto& fields = t.rows[row];
  return col < fields.size() ? std::string(trim(fields[col])) : std::string();
}

}  // namespace detail

inline std::vector<FeatureRecord> read_features_csv(std::istream& in) {
  const auto table = detail::read_csv(in, "features file");
  const auto c = detail::require_columns(table, {"selector", "m1_km", "m1_birth_km"}, "features file");
  const auto c_points = table.column("n_points");
  const auto c_h1 = table.column("n_h1");
  std::vector<FeatureRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    FeatureRecord rec;
    rec.selector = detail::text_field(table, r, c[0]);
    rec.m1 = detail::number_field(table, r, c[1], "features file");
    rec.m1_birth = detail::number_field(table, r, c[2], "features file");
    if (c_points) rec.n_points = static_cast<std::size_t>(detail::number_field(table, r, *c_points, "features file"));
    if (c_h1) rec.n_h1 = static_cast<std::size_t>(detail::number_field(table, r, *c_h1, "features file"));
    out.push_back(std::move(rec));
  }
  return out;
}

// ---- diagrams ---------------------------------------------------------------

inline void write_diagrams_csv(std::ostream& out, const std::vector<TrackAnalysis>& analyses) {
  out << "selector,dim,birth,death\n";
  for (const auto& a : analyses) {
    PersistenceDiagram d = a.diagram;
    d.canonicalize();
    const std::string sel = csv_field(a.selector);
    for (const auto& p : d.pairs) {
      out << sel << ',' << p.dim << ',' << format_number(p.birth) << ',' << format_number(p.death) << '\n';
    }
  }
}

// ---- outlier report ----------------------------------------------------------

inline ordered_json outlier_report_json(const OutlierReport& report) {
  ordered_json j;
  j["method"] = std::string(to_string(report.method));
  j["threshold_km"] = report.threshold;
  j["flagged"] = report.flagged;
  ordered_json records = ordered_json::array();
  for (const auto& r : report.records) records.push_back(record_json(r));
  j["records"] = std::move(records);
  return j;
}

// ---- error reports (JSON lines) ---------------------------------------------

inline void write_row_errors_jsonl(std::ostream& out, const std::vector<RowError>& errors,
                                   const std::vector<TrackFailure>& failures = {}) {
  for (const auto& e : errors) {
    out << ordered_json{{"line", e.line}, {"error", e.message}, {"text", e.text}}.dump() << '\n';
  }
  for (const auto& f : failures) {
    out << ordered_json{{"selector", f.selector}, {"error", f.message}}.dump() << '\n';
  }
}

// ---- trajectories -------------------------------------------------------------

// Writes tracks in the ingest layout; time as epoch seconds.
inline void write_tracks_csv(std::ostream& out, const std::vector<Track>& tracks,
                             const TrackSchema& schema = {}) {
  const char d = schema.delimiter;
  out << csv_field(schema.selector, d) << d << csv_field(schema.lat, d) << d << csv_field(schema.lon, d)
      << d << csv_field(schema.time, d) << '\n';
  for (const auto& t : tracks) {
    const std::string sel = csv_field(t.selector, d);
    for (const auto& p : t.points) {
      out << sel << d << format_number(p.lat) << d << format_number(p.lon) << d << format_time(p.t) << '\n';
    }
  }
}

// ---- labels ---------------------------------------------------------------------

struct LabelRow {
  std::string selector;
  Label label = Label::kClean;
  std::optional<Shape> shape;
  std::optional<double> radius_km;
  std::optional<std::uint64_t> seed;
};

inline void write_labels_csv(std::ostream& out, const std::vector<LabeledTrack>& dataset) {
  out << "selector,label,shape,radius_km,seed\n";
  for (const auto& t : dataset) {
    out << csv_field(t.track.selector) << ',' << to_string(t.label) << ',';
    if (t.spec) {
      out << to_string(t.spec->shape) << ',' << format_number(t.spec->radius_km) << ',' << t.seed;
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

inline Label parse_label(std::string_view s) {
  if (s == "clean") return Label::kClean;
  if (s == "augmented") return Label::kAugmented;
  throw InputError("unknown label '" + std::string(s) + "' (expected clean or augmented)");
}

inline std::vector<LabelRow> read_labels_csv(std::istream& in) {
  const auto table = detail::read_csv(in, "labels file");
  const auto c = detail::require_columns(table, {"selector", "label"}, "labels file");
  const auto c_shape = table.column("shape");
  const auto c_radius = table.column("radius_km");
  const auto c_seed = table.column("seed");
  std::vector<LabelRow> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    LabelRow row;
    row.selector = detail::text_field(table, r, c[0]);
    row.label = parse_label(detail::text_field(table, r, c[1]));
    if (c_shape) {
      const std::string s = detail::text_field(table, r, *c_shape);
      if (!s.empty()) row.shape = parse_shape(s);
    }
    if (c_radius && !detail::text_field(table, r, *c_radius).empty()) {
      row.radius_km = detail::number_field(table, r, *c_radius, "labels file");
    }
    if (c_seed) {
      const std::string s = detail::text_field(table, r, *c_seed);
      if (!s.empty()) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
          throw InputError("labels file line " + std::to_string(table.lines[r]) + ": bad seed '" + s + "'");
        }
        row.seed = v;
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

// ---- sweep results --------------------------------------------------------------

inline void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "k,label,count,min_m1_km,median_m1_km,max_m1_km,auc,gap_km\n";
  for (const auto& e : result.per_k) {
    for (const auto& [name, s] : {std::pair<const char*, const LabelSummary&>{"clean", e.clean},
                                  std::pair<const char*, const LabelSummary&>{"augmented", e.augmented}}) {
      out << format_number(e.k) << ',' << name << ',' << s.count << ',' << format_number(s.min) << ','
          << format_number(s.median) << ',' << format_number(s.max) << ',' << format_number(e.auc) << ','
          << format_number(e.gap) << '\n';
    }
  }
}

inline ordered_json summary_json(const LabelSummary& s) {
  return ordered_json{{"count", s.count}, {"min", s.min}, {"median", s.median}, {"max", s.max}};
}

inline ordered_json sweep_json(const SweepResult& result) {
  ordered_json j;
  j["grid"] = result.grid;
  ordered_json per_k = ordered_json::array();
  for (const auto& e : result.per_k) {
    per_k.push_back(ordered_json{{"k", e.k},
                                 {"auc", e.auc},
                                 {"gap_km", e.gap},
                                 {"clean", summary_json(e.clean)},
                                 {"augmented", summary_json(e.augmented)}});
  }
  j["per_k"] = std::move(per_k);
  j["chosen_k"] = result.chosen_k;
  return j;
}

}  // namespace looptrack
