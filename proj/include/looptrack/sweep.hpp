#pragma once

// How well m1 separates augmented from clean tracks as the velocity
// parameter k varies.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "looptrack/error.hpp"
#include "looptrack/features.hpp"
#include "looptrack/pipeline.hpp"
#include "looptrack/synth.hpp"

namespace looptrack {

inline const std::vector<double>& default_k_grid() {
  static const std::vector<double> grid{0.5, 1, 2, 5, 10, 15, 20, 30, 50};
  return grid;
}

// Rank-based area under the ROC curve: the probability that a random
// positive scores above a random negative, ties counting one half.
inline double auc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw ConfigError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t r = i; r < j; ++r) {
      if (labels[order[r]] == Label::kAugmented) {
        pos_rank_sum += mid_rank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw InputError("auc: both labels are required");
  return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

struct LabelSummary {
  std::size_t count = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

inline LabelSummary summarize(std::vector<double> values) {
  LabelSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.median = median_of(std::move(values));
  return s;
}

struct KEvaluation {
  double k = 0.0;
  LabelSummary clean;
  LabelSummary augmented;
  double gap = 0.0;  // min augmented m1 - max clean m1
  double auc = 0.0;
  std::vector<double> m1;  // per track, dataset order
};

namespace detail {

inline void require_both_labels(const std::vector<LabeledTrack>& dataset) {
  bool clean = false;
  bool augmented = false;
  for (const auto& t : dataset) {
    (t.label == Label::kClean ? clean : augmented) = true;
  }
  if (!clean || !augmented) throw InputError("dataset needs both clean and augmented tracks");
}

inline KEvaluation summarize_k(const std::vector<LabeledTrack>& dataset, double k,
                               std::vector<double> m1) {
  KEvaluation e;
  e.k = k;
  std::vector<double> clean;
  std::vector<double> augmented;
  std::vector<Label> labels;
  labels.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (dataset[i].label == Label::kClean ? clean : augmented).push_back(m1[i]);
    labels.push_back(dataset[i].label);
  }
  e.auc = auc(m1, labels);
  e.clean = summarize(std::move(clean));
  e.augmented = summarize(std::move(augmented));
  e.gap = e.augmented.min - e.clean.max;
  e.m1 = std::move(m1);
  return e;
}

inline void validate_k(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("every k must be a finite positive number");
}

}  // namespace detail

// Runs the pipeline on every track at velocity parameter k.
inline KEvaluation evaluate_k(const std::vector<LabeledTrack>& dataset, double k,
                              const PipelineConfig& config) {
  detail::validate_k(k);
  detail::require_both_labels(dataset);
  PipelineConfig at_k = config;
  at_k.velocity_k = k;
  at_k.validate();
  auto m1 = parallel_map(dataset.size(), at_k.workers, [&](std::size_t i) {
    return analyze_projected(dataset[i].track, at_k).features.m1;
  });
  return detail::summarize_k(dataset, k, std::move(m1));
}

struct SweepResult {
  std::vector<double> grid;
  std::vector<KEvaluation> per_k;  // grid order
  double chosen_k = 0.0;
};

inline constexpr double kPlateauTolerance = 0.01;

// Smallest k whose AUC is within `tolerance` of the best AUC on the grid.
inline double plateau_choice(std::span<const double> grid, std::span<const double> aucs,
                             double tolerance = kPlateauTolerance) {
  if (grid.empty() || grid.size() != aucs.size()) throw ConfigError("plateau_choice: bad input");
  const double best = *std::max_element(aucs.begin(), aucs.end());
  double chosen = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (aucs[i] >= best - tolerance) chosen = std::min(chosen, grid[i]);
  }
  return chosen;
}

// evaluate_k over the grid; all (k, track) jobs share one worker pool.
inline SweepResult sweep_k(const std::vector<LabeledTrack>& dataset, const std::vector<double>& grid,
                           const PipelineConfig& config) {
  if (grid.empty()) throw ConfigError("k grid is empty");
  for (double k : grid) detail::validate_k(k);
  detail::require_both_labels(dataset);
  config.validate();
  const std::size_t n = dataset.size();
  auto m1 = parallel_map(grid.size() * n, config.workers, [&](std::size_t job) {
    PipelineConfig at_k = config;
    at_k.velocity_k = grid[job / n];
    return analyze_projected(dataset[job % n].track, at_k).features.m1;
  });
  SweepResult result;
  result.grid = grid;
  std::vector<double> aucs;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> slice(m1.begin() + static_cast<std::ptrdiff_t>(g * n),
                              m1.begin() + static_cast<std::ptrdiff_t>((g + 1) * n));
    result.per_k.push_back(detail::summarize_k(dataset, grid[g], std::move(slice)));
    aucs.push_back(result.per_k.back().auc);
  }
  result.chosen_k = plateau_choice(grid, aucs);
  return result;
}

}  // namespace looptrack
