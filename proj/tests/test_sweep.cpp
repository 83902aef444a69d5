#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "looptrack/sweep.hpp"

namespace looptrack {
namespace {

// Brute-force AUC over all (positive, negative) pairs.
double pairwise_auc(const std::vector<double>& s, const std::vector<Label>& l) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (l[i] != Label::kAugmented) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (l[j] != Label::kClean) continue;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      pairs += 1.0;
    }
  }
  return wins / pairs;
}

std::vector<LabeledTrack> small_benchmark(std::uint64_t seed) {
  CleanTrackConfig cfg;
  cfg.n_tracks = 20;
  cfg.n_points = 45;
  SpecSampler sampler;
  sampler.shapes = {Shape::kCircle};
  return build_benchmark(synthesize_clean_tracks(cfg, seed), 0.2, sampler, seed);
}

TEST(Auc, PerfectAndReversed) {
  const std::vector<double> s{0.1, 0.2, 3.0, 4.0};
  const std::vector<Label> l{Label::kClean, Label::kClean, Label::kAugmented, Label::kAugmented};
  EXPECT_EQ(auc(s, l), 1.0);
  const std::vector<double> r{4.0, 3.0, 0.2, 0.1};
  EXPECT_EQ(auc(r, l), 0.0);
}

TEST(Auc, TiesCountHalf) {
  const std::vector<double> s{1, 1, 1, 1};
  const std::vector<Label> l{Label::kClean, Label::kAugmented, Label::kClean, Label::kAugmented};
  EXPECT_EQ(auc(s, l), 0.5);
}

TEST(Auc, MatchesPairwiseOracle) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s;
    std::vector<Label> l;
    for (int i = 0; i < 40; ++i) {
      s.push_back(static_cast<double>(rng() % 7));  // plenty of ties
      l.push_back(i < 3 || rng() % 3 == 0 ? Label::kAugmented : Label::kClean);
    }
    l.back() = Label::kClean;
    EXPECT_DOUBLE_EQ(auc(s, l), pairwise_auc(s, l));
  }
}

TEST(Auc, RandomLabelsNearChance) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> s;
  std::vector<Label> l;
  for (int i = 0; i < 400; ++i) {
    s.push_back(u(rng));
    l.push_back(rng() % 2 ? Label::kAugmented : Label::kClean);
  }
  EXPECT_NEAR(auc(s, l), 0.5, 0.1);
}

TEST(Auc, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0, 3);
  std::vector<double> s;
  std::vector<Label> l;
  for (int i = 0; i < 60; ++i) {
    s.push_back(u(rng));
    l.push_back(i % 4 == 0 ? Label::kAugmented : Label::kClean);
  }
  std::vector<double> t;
  for (double v : s) t.push_back(std::exp(2 * v) + 5);
  EXPECT_EQ(auc(s, l), auc(t, l));
}

TEST(Auc, NeedsBothLabels) {
  const std::vector<double> s{1, 2};
  const std::vector<Label> l{Label::kClean, Label::kClean};
  EXPECT_THROW(auc(s, l), InputError);
}

TEST(PlateauChoice, Rules) {
  const std::vector<double> grid{0.5, 1, 5, 10, 20, 30};
  EXPECT_EQ(plateau_choice(grid, std::vector<double>{0.90, 0.92, 0.97, 1.0, 1.0, 0.995}), 10.0);
  EXPECT_EQ(plateau_choice(grid, std::vector<double>{0.9, 0.9, 0.991, 1.0, 1.0, 1.0}), 5.0);
  EXPECT_EQ(plateau_choice(std::vector<double>{10}, std::vector<double>{0.7}), 10.0);
  EXPECT_EQ(plateau_choice(grid, std::vector<double>{0.9, 0.8, 1.0, 0.9, 0.85, 0.7}), 5.0);
}

TEST(Summarize, Basic) {
  const auto s = summarize({3, 1, 2, 10});
  EXPECT_EQ(s.count, 4u);
  EXPECT_EQ(s.min, 1.0);
  EXPECT_EQ(s.median, 2.5);
  EXPECT_EQ(s.max, 10.0);
}

TEST(EvaluateK, SummariesAndGap) {
  const auto data = small_benchmark(3);
  const auto e = evaluate_k(data, 10.0, {});
  EXPECT_EQ(e.k, 10.0);
  EXPECT_EQ(e.clean.count + e.augmented.count, data.size());
  EXPECT_EQ(e.augmented.count, 4u);
  EXPECT_DOUBLE_EQ(e.gap, e.augmented.min - e.clean.max);
  EXPECT_EQ(e.m1.size(), data.size());
  std::vector<Label> labels;
  for (const auto& t : data) labels.push_back(t.label);
  EXPECT_EQ(e.auc, auc(e.m1, labels));
}

TEST(EvaluateK, SingleLabelRejected) {
  auto data = small_benchmark(3);
  for (auto& t : data) t.label = Label::kClean;
  EXPECT_THROW(evaluate_k(data, 10.0, {}), InputError);
}

TEST(SweepK, MatchesEvaluateKAndIsDeterministic) {
  const auto data = small_benchmark(5);
  PipelineConfig cfg;
  cfg.workers = 3;
  const std::vector<double> grid{1, 10};
  const auto a = sweep_k(data, grid, cfg);
  const auto b = sweep_k(data, grid, PipelineConfig{});
  ASSERT_EQ(a.per_k.size(), 2u);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    EXPECT_EQ(a.per_k[g].m1, b.per_k[g].m1);
    EXPECT_EQ(a.per_k[g].m1, evaluate_k(data, grid[g], cfg).m1);
  }
  EXPECT_EQ(a.chosen_k, b.chosen_k);
  EXPECT_TRUE(std::find(grid.begin(), grid.end(), a.chosen_k) != grid.end());
}

TEST(SweepK, Errors) {
  const auto data = small_benchmark(5);
  EXPECT_THROW(sweep_k(data, {}, {}), ConfigError);
  EXPECT_THROW(sweep_k(data, {1, -2}, {}), ConfigError);
  EXPECT_THROW(sweep_k(data, {0}, {}), ConfigError);
}

TEST(SweepK, SingleGridPoint) {
  EXPECT_EQ(sweep_k(small_benchmark(8), {10}, {}).chosen_k, 10.0);
}

}  // namespace
}  // namespace looptrack
