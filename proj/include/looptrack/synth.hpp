#pragma once

// Labeled calibration data: smooth clean trajectories, and copies whose middle
// third is replaced by a loop (circle, square or ellipse).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "looptrack/error.hpp"
#include "looptrack/random.hpp"
#include "looptrack/track.hpp"

namespace looptrack {

enum class Shape { kCircle, kSquare, kEllipse };
enum class Direction { kCounterClockwise, kClockwise };

inline std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::kCircle:
      return "circle";
    case Shape::kSquare:
      return "square";
    case Shape::kEllipse:
      return "ellipse";
  }
  return "circle";
}

inline Shape parse_shape(std::string_view name) {
  if (name == "circle") return Shape::kCircle;
  if (name == "square") return Shape::kSquare;
  if (name == "ellipse") return Shape::kEllipse;
  throw ConfigError("unknown anomaly shape '" + std::string(name) + "'");
}

struct AnomalySpec {
  Shape shape = Shape::kCircle;
  double radius_km = 1.0;     // semi-major axis for ellipses, half side for squares
  double eccentricity = 0.0;  // ellipses only, in [0, 1)
  double orientation = 0.0;   // ellipses only, radians in [0, pi)
  double phase = 0.0;         // starting angle on the shape, radians
  std::size_t n_loops = 1;
  std::size_t n_points_per_loop = 30;
  Direction direction = Direction::kCounterClockwise;

  void validate() const {
    if (!(radius_km > 0.0) || !std::isfinite(radius_km)) {
      throw ConfigError("anomaly radius must be positive");
    }
    if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
      throw ConfigError("anomaly eccentricity must be in [0, 1)");
    }
    if (n_loops < 1) throw ConfigError("anomaly must have at least one loop");
    if (n_points_per_loop < 8) throw ConfigError("anomaly needs at least 8 points per loop");
  }
};

enum class Label { kClean, kAugmented };

inline std::string_view to_string(Label l) { return l == Label::kClean ? "clean" : "augmented"; }

struct LabeledTrack {
  ProjectedTrack track;
  Label label = Label::kClean;
  std::optional<AnomalySpec> spec;
  std::uint64_t seed = 0;
};

inline double path_length_km(const ProjectedTrack& track) {
  double total = 0.0;
  for (std::size_t i = 1; i < track.points.size(); ++i) {
    total += std::hypot(track.points[i].x - track.points[i - 1].x,
                        track.points[i].y - track.points[i - 1].y);
  }
  return total;
}

// Index range [first, last] of the middle third.
struct MiddleThird {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first + 1; }
};

inline MiddleThird middle_third(std::size_t n) { return {n / 3, (2 * n) / 3}; }

inline constexpr std::size_t kMinAugmentPoints = 9;

namespace detail {

// Point on the unit-parameter outline of the shape, before centering.
inline std::pair<double, double> shape_point(const AnomalySpec& spec, double angle) {
  const double r = spec.radius_km;
  switch (spec.shape) {
    case Shape::kCircle:
      return {r * std::cos(angle), r * std::sin(angle)};
    case Shape::kEllipse: {
      const double b = r * std::sqrt(1.0 - spec.eccentricity * spec.eccentricity);
      const double u = r * std::cos(angle);
      const double v = b * std::sin(angle);
      const double c = std::cos(spec.orientation);
      const double s = std::sin(spec.orientation);
      return {c * u - s * v, s * u + c * v};
    }
    case Shape::kSquare: {
      // Walk the perimeter of [-r, r]^2 at constant speed; angle 0 is (r, 0).
      double u = std::fmod(angle / (2.0 * std::numbers::pi), 1.0);
      if (u < 0.0) u += 1.0;
      double s = std::fmod(u * 8.0 + 1.0, 8.0);  // perimeter position in units of r
      if (s < 2.0) return {r, -r + s * r};
      s -= 2.0;
      if (s < 2.0) return {r - s * r, r};
      s -= 2.0;
      if (s < 2.0) return {-r, r - s * r};
      s -= 2.0;
      return {-r + s * r, -r};
    }
  }
  return {0.0, 0.0};
}

}  // namespace detail

// Replaces the middle third of `track` with `spec`, centered on the centroid
// of the replaced points. Timestamps are kept, so the shape is traced over
// the same time span as the replaced segment.
inline LabeledTrack augment_track(const ProjectedTrack& track, const AnomalySpec& spec,
                                  std::uint64_t seed) {
  spec.validate();
  const std::size_t n = track.points.size();
  if (n < kMinAugmentPoints) {
    throw ConfigError("augment_track: track '" + track.selector + "' has " + std::to_string(n) +
                      " points; at least " + std::to_string(kMinAugmentPoints) + " are required");
  }
  const double length = path_length_km(track);
  if (spec.radius_km > 0.5 * length) {
    throw ConfigError("augment_track: radius " + std::to_string(spec.radius_km) +
                      " km exceeds half the track path length (" + std::to_string(length) + " km)");
  }

  const MiddleThird mid = middle_third(n);
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = mid.first; i <= mid.last; ++i) {
    cx += track.points[i].x;
    cy += track.points[i].y;
  }
  cx /= static_cast<double>(mid.size());
  cy /= static_cast<double>(mid.size());

  LabeledTrack out;
  out.track = track;
  out.label = Label::kAugmented;
  out.spec = spec;
  out.seed = seed;

  // The outline is resampled to exactly the middle-third point count.
  const double sign = spec.direction == Direction::kCounterClockwise ? 1.0 : -1.0;
  const double total_angle = 2.0 * std::numbers::pi * static_cast<double>(spec.n_loops);
  for (std::size_t i = 0; i < mid.size(); ++i) {
    const double angle = spec.phase + sign * total_angle * static_cast<double>(i) /
                                          static_cast<double>(mid.size());
    const auto [dx, dy] = detail::shape_point(spec, angle);
    auto& p = out.track.points[mid.first + i];
    p.x = cx + dx;
    p.y = cy + dy;
  }
  return out;
}

// Draws anomaly specs for build_benchmark.
struct SpecSampler {
  std::vector<Shape> shapes{Shape::kCircle, Shape::kSquare, Shape::kEllipse};
  double radius_min_km = 1.0;
  double radius_max_km = 5.0;
  double eccentricity_max = 0.8;
  // Crop circles are usually traced several times over.
  std::size_t n_loops = 3;

  void validate() const {
    if (shapes.empty()) throw ConfigError("spec sampler needs at least one shape");
    if (!(radius_min_km > 0.0) || !(radius_max_km >= radius_min_km)) {
      throw ConfigError("spec sampler radius range must satisfy 0 < min <= max");
    }
    if (!(eccentricity_max >= 0.0 && eccentricity_max < 1.0)) {
      throw ConfigError("spec sampler eccentricity bound must be in [0, 1)");
    }
    if (n_loops < 1) throw ConfigError("spec sampler needs n_loops >= 1");
  }

  // A track is eligible when the smallest radius still fits.
  bool eligible(const ProjectedTrack& track) const {
    return track.points.size() >= kMinAugmentPoints &&
           radius_min_km <= 0.5 * path_length_km(track);
  }

  // Radius is uniform over [min, min(max, half the path length)].
  AnomalySpec draw(Rng& rng, const ProjectedTrack& track) const {
    AnomalySpec spec;
    spec.shape = shapes[uniform_index(rng, shapes.size())];
    const double hi = std::min(radius_max_km, 0.5 * path_length_km(track));
    spec.radius_km = uniform(rng, radius_min_km, hi);
    if (spec.shape == Shape::kEllipse) spec.eccentricity = uniform(rng, 0.0, eccentricity_max);
    spec.orientation = uniform(rng, 0.0, std::numbers::pi);
    spec.phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    spec.direction = (rng() & 1U) ? Direction::kClockwise : Direction::kCounterClockwise;
    spec.n_loops = n_loops;
    const std::size_t mid = middle_third(track.points.size()).size();
    spec.n_points_per_loop = std::max<std::size_t>(8, mid / n_loops);
    return spec;
  }
};

// Augments ceil(fraction * eligible) tracks chosen uniformly without
// replacement; everything else is labeled clean. Output order follows input.
inline std::vector<LabeledTrack> build_benchmark(const std::vector<ProjectedTrack>& tracks,
                                                 double augment_fraction,
                                                 const SpecSampler& sampler, std::uint64_t seed) {
  if (!(augment_fraction > 0.0 && augment_fraction < 1.0)) {
    throw ConfigError("augment fraction must be in (0, 1)");
  }
  sampler.validate();
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (sampler.eligible(tracks[i])) eligible.push_back(i);
  }
  if (eligible.empty()) throw InputError("build_benchmark: no track is eligible for augmentation");

  const auto count = static_cast<std::size_t>(
      std::ceil(augment_fraction * static_cast<double>(eligible.size()) - 1e-9));

  // Partial Fisher-Yates: the first `count` entries are the chosen tracks.
  Rng rng(mix_seed(seed, 0));
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_index(rng, eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }
  std::vector<bool> chosen(tracks.size(), false);
  for (std::size_t i = 0; i < count; ++i) chosen[eligible[i]] = true;

  std::vector<LabeledTrack> out;
  out.reserve(tracks.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (!chosen[i]) {
      out.push_back({tracks[i], Label::kClean, std::nullopt, 0});
      continue;
    }
    const std::uint64_t track_seed = mix_seed(seed, i + 1);
    Rng track_rng(track_seed);
    out.push_back(augment_track(tracks[i], sampler.draw(track_rng, tracks[i]), track_seed));
  }
  return out;
}

// Knobs for the clean-trajectory generator. Vehicles drive between random
// waypoints with bounded speed, acceleration and turn rate, sampled at a
// constant interval.
struct CleanTrackConfig {
  std::size_t n_tracks = 200;
  std::size_t n_points = 90;
  double region_km = 40.0;          // square box [0, region]^2
  double sample_interval_s = 20.0;
  double speed_min_kmh = 15.0;
  double speed_max_kmh = 40.0;
  double max_accel_kmh_per_s = 1.0;
  double max_turn_deg_per_s = 6.0;
  double leg_min_km = 1.0;
  double leg_max_km = 4.0;
  double max_bearing_change_deg = 100.0;  // between consecutive legs
  // Share of tracks driving a closed ring route that returns to its start
  // (circular bus lines, harbour tours); the rest follow open waypoint routes.
  double circuit_fraction = 0.3;
  double circuit_speed_min_kmh = 27.0;
  double circuit_speed_max_kmh = 29.0;
  double circuit_overlap_max = 0.02;  // distance covered beyond one lap, as a share of the lap

  void validate() const {
    if (n_points < kMinAugmentPoints) throw ConfigError("clean tracks need at least 9 points");
    if (!(sample_interval_s > 0.0)) throw ConfigError("sample interval must be positive");
    if (!(speed_min_kmh > 0.0 && speed_max_kmh >= speed_min_kmh)) {
      throw ConfigError("speed range must satisfy 0 < min <= max");
    }
    if (!(region_km > 0.0)) throw ConfigError("region must be positive");
    if (!(leg_min_km > 0.0 && leg_max_km >= leg_min_km)) {
      throw ConfigError("leg length range must satisfy 0 < min <= max");
    }
    if (!(circuit_fraction >= 0.0 && circuit_fraction <= 1.0)) {
      throw ConfigError("circuit fraction must be in [0, 1]");
    }
    if (!(circuit_speed_min_kmh > 0.0 && circuit_speed_max_kmh >= circuit_speed_min_kmh)) {
      throw ConfigError("circuit speed range must satisfy 0 < min <= max");
    }
    if (!(circuit_overlap_max >= 0.0)) throw ConfigError("circuit overlap must be >= 0");
  }
};

namespace detail {

inline double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a < -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

inline ProjectedTrack synthesize_one(const CleanTrackConfig& cfg, std::uint64_t seed,
                                     std::string selector) {
  Rng rng(seed);
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double dt_h = cfg.sample_interval_s / 3600.0;
  const double margin = 0.25 * cfg.region_km;

  double x = uniform(rng, margin, cfg.region_km - margin);
  double y = uniform(rng, margin, cfg.region_km - margin);
  double heading = uniform(rng, -std::numbers::pi, std::numbers::pi);
  double wx = x;
  double wy = y;
  double leg_bearing = heading;

  const bool circuit = uniform01(rng) < cfg.circuit_fraction;
  const double speed_lo = circuit ? cfg.circuit_speed_min_kmh : cfg.speed_min_kmh;
  const double speed_hi = circuit ? cfg.circuit_speed_max_kmh : cfg.speed_max_kmh;
  double speed = uniform(rng, speed_lo, speed_hi);
  double target_speed = speed;

  // Ring routes: waypoints on a circle whose circumference is about the
  // distance the vehicle covers, so the track closes on itself.
  std::vector<std::pair<double, double>> ring;
  std::size_t ring_next = 0;
  if (circuit) {
    constexpr std::size_t kRingWaypoints = 12;
    const double covered = speed * dt_h * static_cast<double>(cfg.n_points - 1);
    const double lap = covered / (1.0 + uniform(rng, 0.0, cfg.circuit_overlap_max));
    const double radius = lap / (2.0 * std::numbers::pi);
    const double turn = uniform01(rng) < 0.5 ? 1.0 : -1.0;
    const double cx = x - radius * std::cos(heading - turn * std::numbers::pi / 2);
    const double cy = y - radius * std::sin(heading - turn * std::numbers::pi / 2);
    const double start = std::atan2(y - cy, x - cx);
    for (std::size_t c = 1; c <= kRingWaypoints; ++c) {
      const double a = start + turn * 2.0 * std::numbers::pi * static_cast<double>(c) /
                                   static_cast<double>(kRingWaypoints);
      ring.emplace_back(cx + radius * std::cos(a), cy + radius * std::sin(a));
    }
  }

  auto next_waypoint = [&]() {
    if (circuit) {
      wx = ring[ring_next].first;
      wy = ring[ring_next].second;
      ring_next = (ring_next + 1) % ring.size();
      return;
    }
    const double max_change = cfg.max_bearing_change_deg * kDeg;
    const double previous = leg_bearing;
    leg_bearing += uniform(rng, -max_change, max_change);
    const double len = uniform(rng, cfg.leg_min_km, cfg.leg_max_km);
    double nx = wx + len * std::cos(leg_bearing);
    double ny = wy + len * std::sin(leg_bearing);
    if (nx < 0.0 || nx > cfg.region_km || ny < 0.0 || ny > cfg.region_km) {
      // Steer toward the middle of the region, within the usual turn limit.
      const double inward = std::atan2(0.5 * cfg.region_km - wy, 0.5 * cfg.region_km - wx);
      leg_bearing = previous + std::clamp(wrap_angle(inward - previous), -max_change, max_change);
      nx = wx + len * std::cos(leg_bearing);
      ny = wy + len * std::sin(leg_bearing);
    }
    wx = nx;
    wy = ny;
    target_speed = uniform(rng, speed_lo, speed_hi);
  };
  next_waypoint();

  ProjectedTrack track;
  track.selector = std::move(selector);
  track.points.reserve(cfg.n_points);
  const double max_turn = cfg.max_turn_deg_per_s * kDeg * cfg.sample_interval_s;
  const double max_dv = cfg.max_accel_kmh_per_s * cfg.sample_interval_s;
  for (std::size_t i = 0; i < cfg.n_points; ++i) {
    track.points.push_back({x, y, static_cast<double>(i) * dt_h});
    if (std::hypot(wx - x, wy - y) < std::max(0.3, 2.0 * speed * dt_h)) next_waypoint();
    const double desired = std::atan2(wy - y, wx - x);
    heading += std::clamp(wrap_angle(desired - heading), -max_turn, max_turn);
    speed += std::clamp(target_speed - speed, -max_dv, max_dv);
    speed = std::clamp(speed, speed_lo, speed_hi);
    x += speed * dt_h * std::cos(heading);
    y += speed * dt_h * std::sin(heading);
  }
  return track;
}

}  // namespace detail

inline std::vector<ProjectedTrack> synthesize_clean_tracks(const CleanTrackConfig& cfg,
                                                           std::uint64_t seed) {
  cfg.validate();
  std::vector<ProjectedTrack> out;
  out.reserve(cfg.n_tracks);
  for (std::size_t i = 0; i < cfg.n_tracks; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "synth-%04zu", i);
    out.push_back(detail::synthesize_one(cfg, mix_seed(seed, i), name));
  }
  return out;
}

}  // namespace looptrack
