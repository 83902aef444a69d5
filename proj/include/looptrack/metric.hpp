#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "looptrack/embedding.hpp"
#include "looptrack/error.hpp"
#include "looptrack/track.hpp"

namespace looptrack {

// Velocity parameter k in km/hr: one hour of separation counts as k km.
struct MetricConfig {
  double velocity_k = 10.0;

  void validate() const {
    if (!(velocity_k > 0.0) || !std::isfinite(velocity_k)) {
      throw ConfigError("velocity parameter k must be a finite positive number (km/hr)");
    }
  }
};

// Symmetric matrix with zero diagonal, stored as the strict lower triangle.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), lower_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return 0.0;
    return lower_[offset(i, j)];
  }

  void set(std::size_t i, std::size_t j, double value) {
    if (i == j) return;
    lower_[offset(i, j)] = value;
  }

  // Row i of the strict lower triangle: d(i, 0), ..., d(i, i-1).
  std::span<const double> row(std::size_t i) const noexcept {
    return {lower_.data() + (i == 0 ? 0 : i * (i - 1) / 2), i};
  }

  std::span<const double> lower() const noexcept { return lower_; }

  DistanceMatrix scaled(double c) const {
    DistanceMatrix out = *this;
    for (auto& v : out.lower_) v *= c;
    return out;
  }

 private:
  static std::size_t offset(std::size_t i, std::size_t j) noexcept {
    if (i < j) std::swap(i, j);
    return i * (i - 1) / 2 + j;
  }

  std::size_t n_ = 0;
  std::vector<double> lower_;
};

// sqrt(dx^2 + dy^2 + (k dt)^2), with x, y in km and t in hours.
inline double scaled_distance(const PlanarPoint& p, const PlanarPoint& q, const MetricConfig& config) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  const double dt = config.velocity_k * (p.t - q.t);
  return std::sqrt(dx * dx + dy * dy + dt * dt);
}

// Euclidean distances between the points of an already k-scaled cloud.
inline DistanceMatrix distance_matrix(const PointCloud& cloud) {
  if (cloud.empty()) throw ConfigError("distance_matrix: empty point cloud");
  const std::size_t n = cloud.size();
  DistanceMatrix m(n);
  for (std::size_t i = 1; i < n; ++i) {
    const auto pi = cloud[i];
    for (std::size_t j = 0; j < i; ++j) {
      const auto pj = cloud[j];
      double s = 0.0;
      for (std::size_t c = 0; c < pi.size(); ++c) {
        const double d = pi[c] - pj[c];
        s += d * d;
      }
      m.set(i, j, std::sqrt(s));
    }
  }
  return m;
}

// Symmetrizes a directional (quasi-metric) table by taking min(d(a,b), d(b,a)).
// `directional` is a dense row-major n x n table.
inline DistanceMatrix quasi_symmetrize(std::span<const double> directional, std::size_t n) {
  if (directional.size() != n * n) {
    throw ConfigError("quasi_symmetrize: table is not " + std::to_string(n) + "x" +
                      std::to_string(n));
  }
  DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = directional[i * n + j];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError("quasi_symmetrize: negative or non-finite entry at (" +
                          std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      if (i == j && v != 0.0) {
        throw ConfigError("quasi_symmetrize: non-zero diagonal entry at " + std::to_string(i));
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      m.set(i, j, std::min(directional[i * n + j], directional[j * n + i]));
    }
  }
  return m;
}

// min_i max_j d(i, j). Past this scale some vertex is adjacent to every other
// vertex, the complex is a cone, and no finite 1-cycles remain.
inline double enclosing_radius(const DistanceMatrix& m) {
  const std::size_t n = m.size();
  if (n <= 1) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double far = 0.0;
    for (std::size_t j = 0; j < n; ++j) far = std::max(far, m(i, j));
    best = std::min(best, far);
  }
  return best;
}

}  // namespace looptrack
