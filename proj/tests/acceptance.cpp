// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "looptrack/looptrack.hpp"
#include "oracles.hpp"

using namespace looptrack;

namespace {

// Tolerances and targets.
constexpr double kAnalyticTol = 1e-9;
constexpr double kPerturbDelta = 0.01;
constexpr double kMinAucAt10 = 0.95;
constexpr double kShapeMinM1 = 0.5;
constexpr double kCleanMaxM1 = 0.2;
constexpr double kOracleSeconds = 30.0;
constexpr double kCalibrationSeconds = 300.0;
constexpr std::uint64_t kDeskSeed = 42;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::vector<PersistencePair> sorted_pairs(PersistenceDiagram d) {
  d.canonicalize();
  return d.pairs;
}

std::vector<ProjectedTrack> desk_clean_tracks(std::uint64_t seed = kDeskSeed) {
  CleanTrackConfig cfg;
  cfg.n_tracks = 200;
  cfg.n_points = 90;
  return synthesize_clean_tracks(cfg, seed);
}

SpecSampler circle_sampler() {
  SpecSampler s;
  s.shapes = {Shape::kCircle};
  s.radius_min_km = 1.0;
  s.radius_max_km = 5.0;
  return s;
}

double m1_at(const ProjectedTrack& t, double k) {
  PipelineConfig cfg;
  cfg.velocity_k = k;
  return analyze_projected(t, cfg).features.m1;
}

void criterion1() {
  std::mt19937_64 rng(1);
  const auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0;
  const int clouds = 200;
  for (int i = 0; i < clouds; ++i) {
    const std::size_t n = 1 + rng() % 12;
    const auto m = distance_matrix(testing::random_cloud(rng, n, 10.0));
    if (sorted_pairs(compute_persistence(m)) != sorted_pairs(naive_reduce(m))) ++mismatches;
  }
  const double secs = seconds_since(t0);
  report(1, mismatches == 0 && secs < kOracleSeconds, "fast reduction equals naive oracle",
         std::to_string(clouds) + " clouds, " + std::to_string(mismatches) + " mismatches, " +
             fmt("%.2f s", secs));
}

void criterion2() {
  const auto square = compute_persistence(
      distance_matrix(testing::cloud_from({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}})));
  const auto h1 = square.of_dim(1);
  std::vector<double> h0;
  for (const auto& p : square.of_dim(0)) {
    if (!p.essential()) h0.push_back(p.death);
  }
  std::sort(h0.begin(), h0.end());
  bool ok = h1.size() == 1 && std::abs(h1[0].birth - 1.0) <= kAnalyticTol &&
            std::abs(h1[0].death - std::sqrt(2.0)) <= kAnalyticTol && h0.size() == 3;
  for (double d : h0) ok = ok && std::abs(d - 1.0) <= kAnalyticTol;

  PointCloud hex(2);
  for (int i = 0; i < 6; ++i) {
    const double a = std::numbers::pi * i / 3.0;
    const std::vector<double> p{std::cos(a), std::sin(a)};
    hex.push_back(p);
  }
  const auto hh1 = compute_persistence(distance_matrix(hex)).of_dim(1);
  ok = ok && hh1.size() == 1 && std::abs(hh1[0].birth - 1.0) <= kAnalyticTol &&
       std::abs(hh1[0].death - std::sqrt(3.0)) <= kAnalyticTol;
  std::string detail = "square H1 ";
  for (const auto& p : h1) detail += "(" + fmt("%.12g", p.birth) + ", " + fmt("%.12g", p.death) + ")";
  detail += ", hexagon H1 ";
  for (const auto& p : hh1) detail += "(" + fmt("%.12g", p.birth) + ", " + fmt("%.12g", p.death) + ")";
  report(2, ok, "analytic square and hexagon diagrams", detail);
}

void criterion3() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto cloud = testing::random_cloud(rng, 10);
    PointCloud moved(3);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      std::vector<double> dir{gauss(rng), gauss(rng), gauss(rng)};
      const double norm = std::hypot(dir[0], dir[1], dir[2]);
      const double r = kPerturbDelta * unit(rng);
      std::vector<double> p(3);
      for (int c = 0; c < 3; ++c) p[c] = cloud[i][c] + r * dir[c] / norm;
      moved.push_back(p);
    }
    const auto a = compute_persistence(distance_matrix(cloud));
    const auto b = compute_persistence(distance_matrix(moved));
    for (int dim : {0, 1}) worst = std::max(worst, testing::bottleneck_distance(a.of_dim(dim), b.of_dim(dim)));
  }
  report(3, worst <= 2 * kPerturbDelta + 1e-12, "stability under perturbation",
         "worst bottleneck " + fmt("%.6f", worst) + " <= " + fmt("%.2f", 2 * kPerturbDelta));
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto data = build_benchmark(desk_clean_tracks(), 0.1, circle_sampler(), kDeskSeed);
  PipelineConfig cfg;
  cfg.workers = 4;
  cfg.seed = kDeskSeed;
  const std::vector<double> grid{0.5, 1, 5, 10, 20, 30};
  const auto r = sweep_k(data, grid, cfg);
  const double secs = seconds_since(t0);
  double auc10 = 0.0;
  double auc05 = 0.0;
  std::string curve;
  for (const auto& e : r.per_k) {
    if (e.k == 10) auc10 = e.auc;
    if (e.k == 0.5) auc05 = e.auc;
    curve += fmt("%g:", e.k) + fmt("%.4f ", e.auc);
  }
  std::size_t augmented = 0;
  for (const auto& t : data) augmented += t.label == Label::kAugmented;
  const bool ok = data.size() == 200 && augmented == 20 && auc10 >= kMinAucAt10 && auc10 > auc05 &&
                  r.chosen_k == 10.0 && secs < kCalibrationSeconds;
  report(4, ok, "desk calibration picks k = 10",
         "AUC " + curve + "chosen_k " + fmt("%g", r.chosen_k) + ", " + fmt("%.1f s", secs));
}

void criterion5() {
  const auto hosts = desk_clean_tracks();
  double lowest = 1e300;
  std::size_t runs = 0;
  std::size_t below = 0;
  Rng rng(mix_seed(kDeskSeed, 5));
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    const double half = 0.5 * path_length_km(hosts[i]);
    for (double radius : {1.0, 2.5, 5.0}) {
      if (radius > half) continue;
      std::vector<AnomalySpec> specs;
      AnomalySpec sq;
      sq.shape = Shape::kSquare;
      sq.radius_km = radius;
      specs.push_back(sq);
      for (double e : {0.4, 0.8}) {
        for (double orient : {0.0, std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4}) {
          AnomalySpec el;
          el.shape = Shape::kEllipse;
          el.radius_km = radius;
          el.eccentricity = e;
          el.orientation = orient;
          specs.push_back(el);
        }
      }
      for (auto spec : specs) {
        spec.n_loops = SpecSampler{}.n_loops;
        spec.phase = uniform(rng, 0.0, 2 * std::numbers::pi);
        spec.direction = (rng() & 1U) ? Direction::kClockwise : Direction::kCounterClockwise;
        const double m1 = m1_at(augment_track(hosts[i], spec, i).track, 10.0);
        lowest = std::min(lowest, m1);
        below += m1 < kShapeMinM1;
        ++runs;
      }
    }
  }
  report(5, below == 0 && runs > 0, "squares and ellipses are detected",
         std::to_string(runs) + " augmented tracks, min m1 " + fmt("%.3f km", lowest) + ", " +
             std::to_string(below) + " below " + fmt("%.1f", kShapeMinM1));
}

void criterion6() {
  double worst = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed : {kDeskSeed, std::uint64_t{7}, std::uint64_t{99}, std::uint64_t{1234}, std::uint64_t{2024}}) {
    const auto tracks = desk_clean_tracks(seed);
    PipelineConfig cfg;
    cfg.workers = 4;
    const auto m1 = parallel_map(tracks.size(), cfg.workers,
                                 [&](std::size_t i) { return analyze_projected(tracks[i], cfg).features.m1; });
    for (double v : m1) worst = std::max(worst, v);
    n += tracks.size();
  }
  report(6, worst < kCleanMaxM1, "clean-track floor at k = 10",
         std::to_string(n) + " clean tracks, max m1 " + fmt("%.4f km", worst));
}

void criterion7() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  bool identity = true;
  for (int trial = 0; trial < 50; ++trial) {
    ProjectedTrack t;
    double time = 0.0;
    const std::size_t n = 1 + rng() % 150;
    for (std::size_t i = 0; i < n; ++i) {
      t.points.push_back({u(rng), u(rng), time});
      time += std::abs(u(rng)) / 100.0;
    }
    const double k = 0.5 + std::abs(u(rng));
    const auto cloud = embed_track(t, k);
    identity = identity && cloud.size() == n && cloud.dim() == 3;
    for (std::size_t i = 0; identity && i < n; ++i) {
      identity = cloud[i][0] == t.points[i].x && cloud[i][1] == t.points[i].y && cloud[i][2] == k * t.points[i].t;
    }
  }
  bool counts = true;
  for (int trial = 0; trial < 100; ++trial) {
    const EmbeddingConfig cfg{1 + rng() % 6, 1 + rng() % 6, 1 + rng() % 4};
    const std::size_t len = rng() % 80;
    std::size_t direct = 0;
    for (std::size_t s = 0; s + (cfg.window_length - 1) * cfg.delay < len; s += cfg.stride) ++direct;
    counts = counts && cfg.window_count(len) == direct;
    if (len >= cfg.min_series_length()) {
      std::vector<double> series(len);
      for (auto& v : series) v = u(rng);
      counts = counts && takens_embed(series, cfg).size() == direct;
    }
  }
  report(7, identity && counts, "Takens identity and window counts",
         std::string("identity on 50 tracks ") + (identity ? "exact" : "broken") + ", 100 window counts " +
             (counts ? "match" : "differ"));
}

std::string detect_outputs(const std::vector<Track>& tracks, std::size_t workers) {
  PipelineConfig cfg;
  cfg.workers = workers;
  cfg.seed = kDeskSeed;
  const auto r = run_detect(tracks, cfg);
  std::vector<FeatureRecord> records;
  for (const auto& a : r.analyses) records.push_back(a.features);
  std::ostringstream ss;
  write_features_csv(ss, records);
  write_features_json(ss, records);
  write_diagrams_csv(ss, r.analyses);
  if (r.report) ss << outlier_report_json(*r.report).dump(2);
  write_row_errors_jsonl(ss, {}, r.failures);
  return ss.str();
}

std::vector<Track> augmented_desk_tracks() {
  const auto data = build_benchmark(desk_clean_tracks(), 0.1, SpecSampler{}, kDeskSeed);
  std::vector<Track> out;
  for (auto lt : data) {
    lt.track.origin = {-43.2, -22.9, 1.7e9};
    out.push_back(unproject(lt.track));
  }
  return out;
}

void criterion8() {
  const auto tracks = augmented_desk_tracks();
  const std::string base = detect_outputs(tracks, 1);
  bool same = true;
  for (std::size_t w : {4, 8}) same = same && detect_outputs(tracks, w) == base;
  same = same && detect_outputs(augmented_desk_tracks(), 1) == base;
  report(8, same, "detect output independent of workers and reruns",
         "workers 1/4/8 and rerun, " + std::to_string(base.size()) + " bytes " + (same ? "identical" : "differ"));
}

void criterion9() {
  std::ifstream in(std::string(LOOPTRACK_SOURCE_DIR) + "/README.md");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string readme = ss.str();
  const std::vector<std::string> needles{"355692000", "Point Reyes", "1,000", "3,400", "MarineCadastre",
                                         "-123.3196", "-122.7372", "37.8406", "38.3473", "--schema marinecadastre",
                                         "not reproducible"};
  std::string missing;
  for (const auto& n : needles) {
    if (readme.find(n) == std::string::npos) missing += (missing.empty() ? "" : ", ") + n;
  }
  report(9, !readme.empty() && missing.empty(), "README documents the unreproducible results",
         missing.empty() ? "all statements present" : "missing: " + missing);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                    criterion6, criterion7, criterion8, criterion9};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %zu: threw %s\n", i + 1, e.what());
      ++failures;
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
