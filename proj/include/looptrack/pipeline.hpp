#pragma once

// Per-track pipeline (segment, project, embed, distances, persistence,
// features) and a worker pool whose results do not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "looptrack/embedding.hpp"
#include "looptrack/error.hpp"
#include "looptrack/features.hpp"
#include "looptrack/homology.hpp"
#include "looptrack/ingest.hpp"
#include "looptrack/metric.hpp"
#include "looptrack/track.hpp"

namespace looptrack {

enum class CapMode { kEnclosingRadius, kFixed };

struct PipelineConfig {
  double velocity_k = 10.0;       // km/hr
  double rest_gap_minutes = 45.0;
  EmbeddingConfig embedding{};
  CapMode cap_mode = CapMode::kEnclosingRadius;
  double cap_km = 0.0;            // used when cap_mode == kFixed
  OutlierParams outlier{};
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::size_t max_points = 5000;

  void validate() const {
    MetricConfig{velocity_k}.validate();
    if (!(rest_gap_minutes > 0.0) || !std::isfinite(rest_gap_minutes)) {
      throw ConfigError("rest gap must be a positive number of minutes");
    }
    embedding.validate();
    if (cap_mode == CapMode::kFixed && (!(cap_km > 0.0) || !std::isfinite(cap_km))) {
      throw ConfigError("fixed filtration cap must be a positive number of km");
    }
    outlier.validate();
    if (workers < 1) throw ConfigError("worker count must be >= 1");
    if (max_points < 1) throw ConfigError("max points must be >= 1");
  }
};

// Runs fn(i) for i in [0, n) on up to `workers` threads and returns the
// results in index order. The first exception by index is rethrown.
template <typename Fn>
auto parallel_map(std::size_t n, std::size_t workers, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  std::vector<Result> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

struct TrackAnalysis {
  std::string selector;
  PersistenceDiagram diagram;
  FeatureRecord features;
};

// Persistence of an already computed distance matrix under the configured cap.
inline PersistenceDiagram persistence_for(const DistanceMatrix& m, const PipelineConfig& config) {
  if (config.cap_mode == CapMode::kFixed) return compute_persistence(m, config.cap_km);
  return compute_persistence(m);
}

// Embedding, distances, persistence and features for one projected track.
// Tracks too short for a single embedding window get an empty diagram.
inline TrackAnalysis analyze_projected(const ProjectedTrack& track, const PipelineConfig& config) {
  TrackAnalysis out;
  out.selector = track.selector;
  const ProjectedTrack* source = &track;
  ProjectedTrack reduced;
  if (track.points.size() > config.max_points) {
    reduced.selector = track.selector;
    reduced.origin = track.origin;
    reduced.points = downsample(track.points, config.max_points);
    source = &reduced;
  }
  if (source->points.size() * 3 < config.embedding.min_series_length()) {
    out.diagram.n_points = 0;
  } else {
    const PointCloud cloud = embed_track(*source, config.velocity_k, config.embedding);
    out.diagram = persistence_for(distance_matrix(cloud), config);
  }
  out.features = extract_features(track.selector, out.diagram);
  return out;
}

struct TrackFailure {
  std::string selector;
  std::string message;
};

struct DetectResult {
  std::vector<TrackAnalysis> analyses;  // sorted by selector
  std::vector<TrackFailure> failures;   // tracks that could not be processed
  std::optional<OutlierReport> report;  // absent when nothing was analysed
};

// Segments and projects every parsed track, analyses the segments in
// parallel and scores them together.
inline DetectResult run_detect(const std::vector<Track>& tracks, const PipelineConfig& config) {
  config.validate();
  std::vector<Track> segments;
  for (const auto& t : tracks) {
    for (auto& s : segment_track(t, config.rest_gap_minutes * 60.0)) segments.push_back(std::move(s));
  }
  std::sort(segments.begin(), segments.end(),
            [](const Track& a, const Track& b) { return a.selector < b.selector; });

  struct Outcome {
    std::optional<TrackAnalysis> analysis;
    std::string error;
  };
  auto outcomes = parallel_map(segments.size(), config.workers, [&](std::size_t i) {
    Outcome o;
    try {
      o.analysis = analyze_projected(project_local(segments[i]), config);
    } catch (const Error& e) {
      o.error = e.what();
    }
    return o;
  });

  DetectResult result;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].analysis) {
      result.analyses.push_back(std::move(*outcomes[i].analysis));
    } else {
      result.failures.push_back({segments[i].selector, outcomes[i].error});
    }
  }
  if (!result.analyses.empty()) {
    std::vector<FeatureRecord> records;
    records.reserve(result.analyses.size());
    for (const auto& a : result.analyses) records.push_back(a.features);
    result.report = score_outliers(std::move(records), config.outlier);
  }
  return result;
}

}  // namespace looptrack
