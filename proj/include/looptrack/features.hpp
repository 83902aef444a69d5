#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "looptrack/error.hpp"
#include "looptrack/homology.hpp"

namespace looptrack {

struct Lifespan {
  double lifespan = 0.0;
  double birth = 0.0;

  friend bool operator==(const Lifespan&, const Lifespan&) = default;
};

// Longest finite lifespan in one dimension, with its birth; ties go to the
// earlier birth. (0, 0) when the dimension has no finite pairs.
inline Lifespan max_lifespan(const PersistenceDiagram& diagram, int dim) {
  Lifespan best;
  bool found = false;
  for (const auto& p : diagram.pairs) {
    if (p.dim != dim || p.essential()) continue;
    const double life = p.lifespan();
    if (!found || life > best.lifespan || (life == best.lifespan && p.birth < best.birth)) {
      best = {life, p.birth};
      found = true;
    }
  }
  return best;
}

// Per-track summary; m1 is the longest H1 lifespan in km.
struct FeatureRecord {
  std::string selector;
  std::size_t n_points = 0;
  std::size_t n_h1 = 0;
  double m1 = 0.0;
  double m1_birth = 0.0;

  friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

inline FeatureRecord extract_features(std::string selector, const PersistenceDiagram& diagram) {
  FeatureRecord r;
  r.selector = std::move(selector);
  r.n_points = diagram.n_points;
  for (const auto& p : diagram.pairs) {
    if (p.dim == 1) ++r.n_h1;
  }
  const Lifespan m = max_lifespan(diagram, 1);
  r.m1 = m.lifespan;
  r.m1_birth = m.birth;
  return r;
}

enum class OutlierMethod { kAbsolute, kMad };

inline std::string_view to_string(OutlierMethod m) {
  return m == OutlierMethod::kAbsolute ? "absolute" : "mad";
}

inline OutlierMethod parse_outlier_method(std::string_view name) {
  if (name == "absolute") return OutlierMethod::kAbsolute;
  if (name == "mad") return OutlierMethod::kMad;
  throw ConfigError("unknown outlier method '" + std::string(name) + "' (expected absolute or mad)");
}

struct OutlierParams {
  OutlierMethod method = OutlierMethod::kMad;
  double threshold_km = 1.0;  // absolute rule
  double mad_c = 10.0;        // mad rule: median + c * MAD
  double mad_floor_km = 0.1;  // mad rule when MAD == 0: median + floor

  void validate() const {
    if (!(threshold_km >= 0.0)) throw ConfigError("outlier threshold must be >= 0");
    if (!(mad_c > 0.0)) throw ConfigError("MAD multiplier must be > 0");
    if (!(mad_floor_km >= 0.0)) throw ConfigError("MAD floor must be >= 0");
  }
};

struct OutlierReport {
  std::vector<FeatureRecord> records;
  double threshold = 0.0;
  OutlierMethod method = OutlierMethod::kMad;
  std::vector<std::string> flagged;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

// Flags records with m1 strictly above the method's threshold. Records keep
// their input order; `flagged` lists selectors in that order.
inline OutlierReport score_outliers(std::vector<FeatureRecord> records, const OutlierParams& params) {
  params.validate();
  if (records.empty()) throw InputError("score_outliers: no feature records");
  OutlierReport report;
  report.method = params.method;
  if (params.method == OutlierMethod::kAbsolute) {
    report.threshold = params.threshold_km;
  } else {
    std::vector<double> m1;
    m1.reserve(records.size());
    for (const auto& r : records) m1.push_back(r.m1);
    const double med = median_of(m1);
    std::vector<double> dev;
    dev.reserve(m1.size());
    for (double v : m1) dev.push_back(std::abs(v - med));
    const double mad = median_of(dev);
    report.threshold = mad > 0.0 ? med + params.mad_c * mad : med + params.mad_floor_km;
  }
  for (const auto& r : records) {
    if (r.m1 > report.threshold) report.flagged.push_back(r.selector);
  }
  report.records = std::move(records);
  return report;
}

}  // namespace looptrack
