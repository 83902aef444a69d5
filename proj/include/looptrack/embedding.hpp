#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "looptrack/error.hpp"
#include "looptrack/track.hpp"

namespace looptrack {

// Sliding-window (time-delay) embedding parameters. All three are counted in
// samples of the auxiliary (flattened) series.
struct EmbeddingConfig {
  std::size_t window_length = 3;
  std::size_t stride = 3;
  std::size_t delay = 1;

  void validate() const {
    if (window_length < 1 || stride < 1 || delay < 1) {
      throw ConfigError("embedding window length, stride and delay must all be >= 1");
    }
  }

  // Smallest series length that admits a single window.
  std::size_t min_series_length() const { return (window_length - 1) * delay + 1; }

  // Number of windows over a series of the given length (0 if none fit).
  std::size_t window_count(std::size_t series_length) const {
    if (series_length < min_series_length()) return 0;
    return (series_length - min_series_length()) / stride + 1;
  }

  // True when windows do not line up with whole M-vectors, so one output axis
  // carries different source coordinates from window to window.
  bool mixes_coordinates(std::size_t vector_dim) const {
    return !(window_length == vector_dim && stride % vector_dim == 0 && delay == 1);
  }
};

// Row-major point storage; every point has `dim()` coordinates.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ConfigError("point cloud dimension must be >= 1");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }

  void push_back(std::span<const double> p) {
    if (p.size() != dim_) throw ConfigError("point dimension does not match cloud dimension");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }

  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  std::span<const double> data() const noexcept { return coords_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

// Flattens x_{0,1..M}, x_{1,1..M}, ... into one scalar series.
inline std::vector<double> auxiliary_series(const std::vector<std::vector<double>>& series) {
  if (series.empty()) throw ConfigError("auxiliary_series: empty vector series");
  const std::size_t m = series.front().size();
  if (m == 0) throw ConfigError("auxiliary_series: zero-dimensional vectors");
  std::vector<double> out;
  out.reserve(series.size() * m);
  for (const auto& v : series) {
    if (v.size() != m) throw ConfigError("auxiliary_series: ragged vector series");
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// Window starts 0, stride, 2*stride, ...; each window samples every `delay`-th
// value, L values in total.
inline PointCloud takens_embed(std::span<const double> series, const EmbeddingConfig& config) {
  config.validate();
  if (series.size() < config.min_series_length()) {
    throw ConfigError("takens_embed: series of length " + std::to_string(series.size()) +
                      " is shorter than the minimum " +
                      std::to_string(config.min_series_length()));
  }
  PointCloud cloud(config.window_length);
  const std::size_t count = config.window_count(series.size());
  cloud.reserve(count);
  std::vector<double> window(config.window_length);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t start = w * config.stride;
    for (std::size_t l = 0; l < config.window_length; ++l) {
      window[l] = series[start + l * config.delay];
    }
    cloud.push_back(window);
  }
  return cloud;
}

// Maps each projected point to (x, y, k*t) in km and embeds the flattened
// series. With the default config this reproduces the scaled points.
inline PointCloud embed_track(const ProjectedTrack& track, double velocity_k,
                              const EmbeddingConfig& config = {}) {
  if (track.points.empty()) throw ConfigError("embed_track: empty track");
  std::vector<double> aux;
  aux.reserve(track.points.size() * 3);
  for (const auto& p : track.points) {
    aux.push_back(p.x);
    aux.push_back(p.y);
    aux.push_back(velocity_k * p.t);
  }
  return takens_embed(aux, config);
}

}  // namespace looptrack
