#pragma once

// Reading delimiter-separated trajectory files, splitting tracks at long
// reporting gaps, and projecting to local planar kilometres.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "looptrack/error.hpp"
#include "looptrack/track.hpp"

namespace looptrack {

// Column names for the four fields the pipeline needs.
struct TrackSchema {
  std::string selector = "selector";
  std::string lat = "lat";
  std::string lon = "lon";
  std::string time = "time";
  char delimiter = ',';
};

// MarineCadastre AIS broadcast points (MMSI,BaseDateTime,LAT,LON,...).
inline TrackSchema marinecadastre_schema() { return {"MMSI", "LAT", "LON", "BaseDateTime", ','}; }

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
  std::string text;
};

struct ParseResult {
  std::vector<Track> tracks;  // sorted by selector
  std::vector<RowError> errors;
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::size_t duplicates_dropped = 0;
};

enum class TimeFormat { kEpochSeconds, kIso8601 };

namespace detail {

// Splits one record. Fields may be double-quoted; "" inside quotes is a
// literal quote. Returns nullopt on an unterminated quote or stray text
// after a closing quote.
inline std::optional<std::vector<std::string>> split_record(std::string_view line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (true) {
    cur.clear();
    if (i < n && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < n) {
        if (line[i] == '"') {
          if (i + 1 < n && line[i + 1] == '"') {
            cur.push_back('"');
            i += 2;
          } else {
            ++i;
            closed = true;
            break;
          }
        } else {
          cur.push_back(line[i++]);
        }
      }
      if (!closed) return std::nullopt;
      if (i < n && line[i] != delim) return std::nullopt;
    } else {
      while (i < n && line[i] != delim) cur.push_back(line[i++]);
    }
    fields.push_back(cur);
    if (i >= n) break;
    ++i;  // delimiter
  }
  return fields;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline bool parse_digits(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

// ISO-8601 date-time to seconds since the Unix epoch. Accepts
// YYYY-MM-DD[(T| )hh:mm[:ss[.fff]]][Z|(+|-)hh[:]mm]; no zone means UTC.
inline std::optional<double> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  s = detail::trim(s);
  int y = 0;
  int mo = 0;
  int d = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!detail::parse_digits(s, 0, 4, y) || !detail::parse_digits(s, 5, 2, mo) ||
      !detail::parse_digits(s, 8, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  double secs = static_cast<double>(sys_days{ymd}.time_since_epoch().count()) * 86400.0;
  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == 't' || s[pos] == ' ')) {
    ++pos;
    int hh = 0;
    int mm = 0;
    if (!detail::parse_digits(s, pos, 2, hh) || pos + 2 >= s.size() || s[pos + 2] != ':' ||
        !detail::parse_digits(s, pos + 3, 2, mm)) {
      return std::nullopt;
    }
    pos += 5;
    double ss = 0.0;
    if (pos < s.size() && s[pos] == ':') {
      int whole = 0;
      if (!detail::parse_digits(s, pos + 1, 2, whole)) return std::nullopt;
      pos += 3;
      ss = whole;
      if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        std::size_t end = pos + 1;
        while (end < s.size() && s[end] >= '0' && s[end] <= '9') ++end;
        if (end == pos + 1) return std::nullopt;
        std::string frac = "0." + std::string(s.substr(pos + 1, end - pos - 1));
        ss += std::stod(frac);
        pos = end;
      }
    }
    if (hh > 24 || mm > 59 || ss >= 61.0 || (hh == 24 && (mm > 0 || ss > 0.0))) {
      return std::nullopt;
    }
    secs += hh * 3600.0 + mm * 60.0 + ss;
  }
  if (pos < s.size()) {
    if ((s[pos] == 'Z' || s[pos] == 'z') && pos + 1 == s.size()) {
      pos = s.size();
    } else if (s[pos] == '+' || s[pos] == '-') {
      const double sign = s[pos] == '+' ? 1.0 : -1.0;
      int oh = 0;
      int om = 0;
      if (!detail::parse_digits(s, pos + 1, 2, oh)) return std::nullopt;
      std::size_t p = pos + 3;
      if (p < s.size() && s[p] == ':') ++p;
      if (p < s.size()) {
        if (!detail::parse_digits(s, p, 2, om)) return std::nullopt;
        p += 2;
      }
      if (p != s.size() || oh > 23 || om > 59) return std::nullopt;
      secs -= sign * (oh * 3600.0 + om * 60.0);
      pos = s.size();
    } else {
      return std::nullopt;
    }
  }
  return secs;
}

inline std::optional<double> parse_time(std::string_view s, TimeFormat format) {
  if (format == TimeFormat::kEpochSeconds) return detail::parse_double(s);
  return parse_iso8601(s);
}

// Epoch seconds if the value is a plain number, ISO-8601 otherwise.
inline TimeFormat detect_time_format(std::string_view sample) {
  return detail::parse_double(sample) ? TimeFormat::kEpochSeconds : TimeFormat::kIso8601;
}

// Reads a header row and records. Bad rows are skipped and reported; a
// mapped column that is absent from the header is a configuration error.
// The time format is fixed by the first non-empty time value.
inline ParseResult parse_tracks(std::istream& in, const TrackSchema& schema) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_record(line, schema.delimiter);
    if (!fields) throw InputError("header row is malformed (unterminated quote)");
    header = std::move(*fields);
    break;
  }
  if (header.empty()) return result;
  if (!header.front().empty() && header.front().rfind("\xEF\xBB\xBF", 0) == 0) {
    header.front().erase(0, 3);  // UTF-8 byte order mark
  }

  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (detail::trim(header[i]) == name) return i;
    }
    throw ConfigError("column '" + name + "' not found in header");
  };
  const std::size_t c_sel = column(schema.selector);
  const std::size_t c_lat = column(schema.lat);
  const std::size_t c_lon = column(schema.lon);
  const std::size_t c_time = column(schema.time);
  const std::size_t needed = std::max({c_sel, c_lat, c_lon, c_time}) + 1;

  struct Row {
    TrackPoint p;
    std::size_t order;
  };
  std::map<std::string, std::vector<Row>> groups;
  std::optional<TimeFormat> format;

  auto reject = [&](std::string message) {
    result.errors.push_back({line_no, std::move(message), line});
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    ++result.rows_read;
    auto fields = detail::split_record(line, schema.delimiter);
    if (!fields) {
      reject("malformed quoting");
      continue;
    }
    if (fields->size() < needed) {
      reject("expected at least " + std::to_string(needed) + " fields, found " +
             std::to_string(fields->size()));
      continue;
    }
    // The column's format comes from its first non-empty value, even if that row is rejected.
    const std::string_view time_text = detail::trim((*fields)[c_time]);
    if (!format && !time_text.empty()) format = detect_time_format(time_text);
    const std::string selector(detail::trim((*fields)[c_sel]));
    if (selector.empty()) {
      reject("empty selector");
      continue;
    }
    const auto lat = detail::parse_double((*fields)[c_lat]);
    const auto lon = detail::parse_double((*fields)[c_lon]);
    if (!lat || !std::isfinite(*lat)) {
      reject("latitude is not a number");
      continue;
    }
    if (!lon || !std::isfinite(*lon)) {
      reject("longitude is not a number");
      continue;
    }
    if (*lat < -90.0 || *lat > 90.0) {
      reject("latitude out of range [-90, 90]");
      continue;
    }
    if (*lon < -180.0 || *lon >= 180.0) {
      reject("longitude out of range [-180, 180)");
      continue;
    }
    if (time_text.empty()) {
      reject("empty time");
      continue;
    }
    const auto t = parse_time(time_text, *format);
    if (!t || !std::isfinite(*t)) {
      reject(*format == TimeFormat::kEpochSeconds ? "time is not epoch seconds"
                                                  : "time is not ISO-8601");
      continue;
    }
    auto& rows = groups[selector];
    rows.push_back({{*lon, *lat, *t}, rows.size()});
    ++result.rows_accepted;
  }

  result.tracks.reserve(groups.size());
  for (auto& [selector, rows] : groups) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.p.t < b.p.t;
    });
    Track track;
    track.selector = selector;
    track.points.reserve(rows.size());
    // Exact duplicates share t, so they are neighbours within a run of equal t.
    std::size_t run_start = 0;
    for (const auto& r : rows) {
      if (!track.points.empty() && track.points.back().t != r.p.t) run_start = track.points.size();
      bool dup = false;
      for (std::size_t j = run_start; j < track.points.size(); ++j) {
        if (track.points[j] == r.p) {
          dup = true;
          break;
        }
      }
      if (dup) {
        ++result.duplicates_dropped;
      } else {
        track.points.push_back(r.p);
      }
    }
    result.tracks.push_back(std::move(track));
  }
  return result;
}

// Splits after every point whose successor is more than `rest_gap_s` later.
// A track with no such gap is returned as is; otherwise segment i is named
// "<selector>#<i>".
inline std::vector<Track> segment_track(const Track& track, double rest_gap_s = 45.0 * 60.0) {
  if (!(rest_gap_s > 0.0)) throw ConfigError("rest gap must be positive");
  std::vector<std::size_t> cuts;  // index of the first point of each later segment
  for (std::size_t i = 1; i < track.points.size(); ++i) {
    if (track.points[i].t - track.points[i - 1].t > rest_gap_s) cuts.push_back(i);
  }
  if (cuts.empty()) return {track};
  cuts.push_back(track.points.size());
  std::vector<Track> out;
  out.reserve(cuts.size());
  std::size_t begin = 0;
  for (std::size_t s = 0; s < cuts.size(); ++s) {
    Track seg;
    seg.selector = track.selector + "#" + std::to_string(s);
    seg.points.assign(track.points.begin() + static_cast<std::ptrdiff_t>(begin),
                      track.points.begin() + static_cast<std::ptrdiff_t>(cuts[s]));
    out.push_back(std::move(seg));
    begin = cuts[s];
  }
  return out;
}

inline constexpr double kKmPerDegreeLon = 111.320;  // at the equator, times cos(lat)
inline constexpr double kKmPerDegreeLat = 110.574;

// Shifts longitudes by multiples of 360 so no consecutive step exceeds 180.
inline std::vector<double> unwrap_longitudes(const std::vector<TrackPoint>& points) {
  std::vector<double> lon;
  lon.reserve(points.size());
  double offset = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) {
      const double step = points[i].lon - points[i - 1].lon;
      if (step > 180.0) offset -= 360.0;
      if (step < -180.0) offset += 360.0;
    }
    lon.push_back(points[i].lon + offset);
  }
  return lon;
}

// Equirectangular projection about the track centroid; time in hours from
// the first point.
inline ProjectedTrack project_local(const Track& track) {
  if (track.points.empty()) throw InputError("project_local: track '" + track.selector + "' is empty");
  const std::vector<double> lon = unwrap_longitudes(track.points);
  const auto [lo, hi] = std::minmax_element(lon.begin(), lon.end());
  if (*hi - *lo >= 90.0) {
    throw InputError("project_local: track '" + track.selector + "' spans " +
                     std::to_string(*hi - *lo) +
                     " degrees of longitude; split it or unwrap longitudes (add or subtract 360) "
                     "so it spans less than 90");
  }
  double lon0 = 0.0;
  double lat0 = 0.0;
  for (std::size_t i = 0; i < lon.size(); ++i) {
    lon0 += lon[i];
    lat0 += track.points[i].lat;
  }
  lon0 /= static_cast<double>(lon.size());
  lat0 /= static_cast<double>(lon.size());
  const double t0 = track.points.front().t;
  const double kx = kKmPerDegreeLon * std::cos(lat0 * std::numbers::pi / 180.0);

  ProjectedTrack out;
  out.selector = track.selector;
  out.origin = {lon0, lat0, t0};
  out.points.reserve(lon.size());
  for (std::size_t i = 0; i < lon.size(); ++i) {
    out.points.push_back({(lon[i] - lon0) * kx, (track.points[i].lat - lat0) * kKmPerDegreeLat,
                          (track.points[i].t - t0) / 3600.0});
  }
  return out;
}

inline double normalize_longitude(double lon) {
  double v = std::fmod(lon + 180.0, 360.0);
  if (v < 0.0) v += 360.0;
  return v - 180.0;
}

// Inverse of project_local; longitudes are folded back into [-180, 180).
inline Track unproject(const ProjectedTrack& track) {
  const auto& o = track.origin;
  const double kx = kKmPerDegreeLon * std::cos(o.lat * std::numbers::pi / 180.0);
  Track out;
  out.selector = track.selector;
  out.points.reserve(track.points.size());
  for (const auto& p : track.points) {
    out.points.push_back({normalize_longitude(o.lon + p.x / kx), o.lat + p.y / kKmPerDegreeLat,
                          o.t + p.t * 3600.0});
  }
  return out;
}

// Keeps `max_points` evenly spaced samples (by index, first and last
// included) when the track is longer than that.
template <typename Point>
std::vector<Point> downsample(const std::vector<Point>& points, std::size_t max_points) {
  if (max_points == 0) throw ConfigError("max points must be positive");
  if (points.size() <= max_points) return points;
  std::vector<Point> out;
  out.reserve(max_points);
  if (max_points == 1) {
    out.push_back(points.front());
    return out;
  }
  const std::size_t n = points.size();
  for (std::size_t j = 0; j < max_points; ++j) out.push_back(points[j * (n - 1) / (max_points - 1)]);
  return out;
}

}  // namespace looptrack
