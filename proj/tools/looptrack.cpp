// looptrack: find loop anomalies in trajectory files.
//
// Exit codes: 0 nothing flagged, 1 anomalies flagged, 2 usage or
// configuration error, 3 input error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "looptrack/looptrack.hpp"

namespace fs = std::filesystem;
using namespace looptrack;

namespace {

constexpr int kExitFlagged = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;

struct SchemaOptions {
  std::string selector = "selector";
  std::string lat = "lat";
  std::string lon = "lon";
  std::string time = "time";
  std::string delimiter = ",";
  std::string preset;
  // Column flags given explicitly override a preset.
  bool selector_given = false;
  bool lat_given = false;
  bool lon_given = false;
  bool time_given = false;
};

void add_schema_options(CLI::App* cmd, SchemaOptions& o) {
  auto* sel = cmd->add_option("--col-selector", o.selector, "Selector (track id) column")->capture_default_str();
  auto* lat = cmd->add_option("--col-lat", o.lat, "Latitude column")->capture_default_str();
  auto* lon = cmd->add_option("--col-lon", o.lon, "Longitude column")->capture_default_str();
  auto* time = cmd->add_option("--col-time", o.time, "Time column (ISO-8601 or epoch seconds)")->capture_default_str();
  cmd->add_option("--delimiter", o.delimiter, "Field delimiter (a character, or 'tab')")->capture_default_str();
  cmd->add_option("--schema", o.preset, "Column preset: marinecadastre");
  cmd->final_callback([&o, sel, lat, lon, time]() {
    o.selector_given = sel->count() > 0;
    o.lat_given = lat->count() > 0;
    o.lon_given = lon->count() > 0;
    o.time_given = time->count() > 0;
  });
}

TrackSchema resolve_schema(const SchemaOptions& o) {
  TrackSchema s;
  if (o.preset == "marinecadastre") {
    s = marinecadastre_schema();
  } else if (!o.preset.empty()) {
    throw ConfigError("unknown schema preset '" + o.preset + "' (known: marinecadastre)");
  }
  const bool preset = !o.preset.empty();
  if (!preset || o.selector_given) s.selector = o.selector;
  if (!preset || o.lat_given) s.lat = o.lat;
  if (!preset || o.lon_given) s.lon = o.lon;
  if (!preset || o.time_given) s.time = o.time;
  if (o.delimiter == "\\t" || o.delimiter == "tab") {
    s.delimiter = '\t';
  } else if (o.delimiter.size() == 1) {
    s.delimiter = o.delimiter[0];
  } else {
    throw ConfigError("delimiter must be a single character");
  }
  return s;
}

struct PipelineOptions {
  PipelineConfig config;
  std::string cap = "enclosing";
  std::string outlier_method = "mad";

  PipelineConfig resolve() const {
    PipelineConfig c = config;
    if (cap == "enclosing") {
      c.cap_mode = CapMode::kEnclosingRadius;
    } else {
      const auto v = looptrack::detail::parse_double(cap);
      if (!v) throw ConfigError("--cap must be 'enclosing' or a distance in km");
      c.cap_mode = CapMode::kFixed;
      c.cap_km = *v;
    }
    c.outlier.method = parse_outlier_method(outlier_method);
    c.validate();
    return c;
  }
};

void add_pipeline_options(CLI::App* cmd, PipelineOptions& o, bool with_k = true) {
  auto& c = o.config;
  if (with_k) {
    cmd->add_option("--velocity-k", c.velocity_k, "Velocity parameter k (km/hr)")->capture_default_str();
  }
  cmd->add_option("--rest-gap", c.rest_gap_minutes, "Split tracks at gaps longer than this (minutes)")
      ->capture_default_str();
  cmd->add_option("--takens-dim", c.embedding.window_length, "Takens window length L")->capture_default_str();
  cmd->add_option("--takens-stride", c.embedding.stride, "Takens stride")->capture_default_str();
  cmd->add_option("--takens-delay", c.embedding.delay, "Takens delay")->capture_default_str();
  cmd->add_option("--cap", o.cap, "Filtration cap: 'enclosing' or a distance in km")->capture_default_str();
  cmd->add_option("--max-points", c.max_points, "Downsample tracks longer than this")->capture_default_str();
  cmd->add_option("--workers", c.workers, "Worker threads")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_option("--outlier-method", o.outlier_method, "Outlier rule: absolute or mad")->capture_default_str();
  cmd->add_option("--threshold", c.outlier.threshold_km, "Absolute rule threshold (km)")->capture_default_str();
  cmd->add_option("--mad-c", c.outlier.mad_c, "MAD rule multiplier")->capture_default_str();
  cmd->add_option("--mad-floor", c.outlier.mad_floor_km, "MAD rule margin when MAD is zero (km)")
      ->capture_default_str();
}

struct SamplerOptions {
  std::vector<std::string> shapes{"circle", "square", "ellipse"};
  SpecSampler sampler;

  SpecSampler resolve() const {
    SpecSampler s = sampler;
    s.shapes.clear();
    for (const auto& name : shapes) s.shapes.push_back(parse_shape(name));
    s.validate();
    return s;
  }
};

void add_sampler_options(CLI::App* cmd, SamplerOptions& o) {
  cmd->add_option("--shapes", o.shapes, "Anomaly shapes")->delimiter(',')->capture_default_str();
  cmd->add_option("--radius-min", o.sampler.radius_min_km, "Smallest anomaly radius (km)")->capture_default_str();
  cmd->add_option("--radius-max", o.sampler.radius_max_km, "Largest anomaly radius (km)")->capture_default_str();
  cmd->add_option("--eccentricity-max", o.sampler.eccentricity_max, "Largest ellipse eccentricity")
      ->capture_default_str();
  cmd->add_option("--loops", o.sampler.n_loops, "Times each anomaly is traced")->capture_default_str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParseResult load_tracks(const fs::path& path, const TrackSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  ParseResult parsed = parse_tracks(in, schema);
  if (parsed.tracks.empty()) throw InputError("no tracks parsed from '" + path.string() + "'");
  return parsed;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "'");
}

template <typename Writer>
void emit(const fs::path& path, Writer&& write) {
  std::ostringstream ss;
  write(ss);
  write_atomic(path, ss.str());
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    const auto v = looptrack::detail::parse_double(item);
    if (!v) throw ConfigError("--grid: '" + item + "' is not a number");
    grid.push_back(*v);
  }
  if (grid.empty()) throw ConfigError("--grid must list at least one k value");
  return grid;
}

std::vector<ProjectedTrack> segment_and_project(const std::vector<Track>& tracks, double rest_gap_minutes) {
  std::vector<ProjectedTrack> out;
  for (const auto& t : tracks) {
    for (const auto& s : segment_track(t, rest_gap_minutes * 60.0)) out.push_back(project_local(s));
  }
  return out;
}

std::vector<Track> unproject_all(const std::vector<LabeledTrack>& dataset) {
  std::vector<Track> out;
  out.reserve(dataset.size());
  for (const auto& t : dataset) out.push_back(unproject(t.track));
  return out;
}

// Directional distance table: one row per line, n numbers per row.
std::vector<double> read_dense_table(const fs::path& path, char delim, std::size_t& n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::vector<double> values;
  std::string line;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (looptrack::detail::trim(line).empty()) continue;
    const auto fields = looptrack::detail::split_record(looptrack::detail::trim(line), delim);
    if (!fields) throw InputError("quasi matrix: malformed line " + std::to_string(line_no));
    for (const auto& f : *fields) {
      const auto v = looptrack::detail::parse_double(f);
      if (!v) throw InputError("quasi matrix: line " + std::to_string(line_no) + ": '" + f + "' is not a number");
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw InputError("quasi matrix: file is empty");
  n = rows;
  return values;
}

int run_detect(const std::string& input, const std::string& quasi, const SchemaOptions& so,
               const PipelineOptions& po, const fs::path& out_dir, const std::string& format) {
  const PipelineConfig config = po.resolve();
  const TrackSchema schema = resolve_schema(so);
  if (format != "csv" && format != "json") throw ConfigError("--format must be csv or json");
  DetectResult result;
  std::vector<RowError> row_errors;
  if (!quasi.empty()) {
    std::size_t n = 0;
    const auto table = read_dense_table(quasi, schema.delimiter, n);
    DistanceMatrix m(0);
    try {
      m = quasi_symmetrize(table, n);
    } catch (const ConfigError& e) {
      throw InputError(e.what());
    }
    TrackAnalysis a;
    a.selector = fs::path(quasi).stem().string();
    a.diagram = persistence_for(m, config);
    a.features = extract_features(a.selector, a.diagram);
    result.analyses.push_back(a);
    result.report = score_outliers({a.features}, config.outlier);
  } else {
    const ParseResult parsed = load_tracks(input, schema);
    row_errors = parsed.errors;
    result = looptrack::run_detect(parsed.tracks, config);
  }
  ensure_dir(out_dir);
  std::vector<FeatureRecord> records;
  for (const auto& a : result.analyses) records.push_back(a.features);
  if (format == "csv") {
    emit(out_dir / "features.csv", [&](std::ostream& o) { write_features_csv(o, records); });
  } else {
    emit(out_dir / "features.json", [&](std::ostream& o) { write_features_json(o, records); });
  }
  emit(out_dir / "diagrams.csv", [&](std::ostream& o) { write_diagrams_csv(o, result.analyses); });
  emit(out_dir / "errors.jsonl", [&](std::ostream& o) { write_row_errors_jsonl(o, row_errors, result.failures); });
  if (!result.report) throw InputError("no track could be analysed (see errors.jsonl)");
  emit(out_dir / "outliers.json", [&](std::ostream& o) { o << outlier_report_json(*result.report).dump(2) << '\n'; });

  const auto& flagged = result.report->flagged;
  std::cout << "tracks analysed: " << result.analyses.size() << ", skipped: " << result.failures.size()
            << ", bad rows: " << row_errors.size() << ", threshold: " << format_number(result.report->threshold)
            << " km, flagged: " << flagged.size() << '\n';
  for (const auto& s : flagged) std::cout << "  " << s << '\n';
  return flagged.empty() ? 0 : kExitFlagged;
}

int run_augment(const std::string& input, const SchemaOptions& so, const SamplerOptions& sa, double fraction,
                double rest_gap, std::uint64_t seed, const fs::path& out_dir) {
  const TrackSchema schema = resolve_schema(so);
  const SpecSampler sampler = sa.resolve();
  const ParseResult parsed = load_tracks(input, schema);
  const auto projected = segment_and_project(parsed.tracks, rest_gap);
  const auto dataset = build_benchmark(projected, fraction, sampler, seed);
  ensure_dir(out_dir);
  emit(out_dir / "augmented.csv", [&](std::ostream& o) { write_tracks_csv(o, unproject_all(dataset), schema); });
  emit(out_dir / "labels.csv", [&](std::ostream& o) { write_labels_csv(o, dataset); });
  std::size_t n_aug = 0;
  for (const auto& t : dataset) n_aug += t.label == Label::kAugmented;
  std::cout << "tracks: " << dataset.size() << ", augmented: " << n_aug << '\n';
  return 0;
}

std::vector<LabeledTrack> join_labels(const std::vector<Track>& tracks, const fs::path& labels_path) {
  std::ifstream in(labels_path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + labels_path.string() + "'");
  const auto labels = read_labels_csv(in);
  std::map<std::string, const LabelRow*> by_selector;
  for (const auto& l : labels) by_selector[l.selector] = &l;
  std::vector<LabeledTrack> dataset;
  for (const auto& t : tracks) {
    const auto it = by_selector.find(t.selector);
    if (it == by_selector.end()) throw InputError("track '" + t.selector + "' has no label");
    LabeledTrack lt;
    lt.track = project_local(t);
    lt.label = it->second->label;
    if (lt.label == Label::kAugmented) {
      AnomalySpec spec;
      if (it->second->shape) spec.shape = *it->second->shape;
      if (it->second->radius_km) spec.radius_km = *it->second->radius_km;
      lt.spec = spec;
    }
    lt.seed = it->second->seed.value_or(0);
    dataset.push_back(std::move(lt));
    by_selector.erase(it);
  }
  if (!by_selector.empty()) {
    throw InputError("label for '" + by_selector.begin()->first + "' matches no track in the input");
  }
  return dataset;
}

void write_sweep_outputs(const SweepResult& result, const fs::path& out_dir, const std::string& stem) {
  emit(out_dir / (stem + ".csv"), [&](std::ostream& o) { write_sweep_csv(o, result); });
  emit(out_dir / (stem + ".json"), [&](std::ostream& o) { o << sweep_json(result).dump(2) << '\n'; });
  emit(out_dir / (stem + ".svg"), [&](std::ostream& o) { o << svg_auc_curve(result); });
  for (const auto& e : result.per_k) {
    std::cout << "k=" << format_number(e.k) << " auc=" << format_number(e.auc) << " gap=" << format_number(e.gap)
              << '\n';
  }
  std::cout << "chosen k: " << format_number(result.chosen_k) << '\n';
}

int run_sweep(const std::string& input, const std::string& labels, const std::string& grid_text,
              const SchemaOptions& so, const PipelineOptions& po, const fs::path& out_dir) {
  const std::vector<double> grid = parse_grid(grid_text);
  const PipelineConfig config = po.resolve();
  const ParseResult parsed = load_tracks(input, resolve_schema(so));
  const auto dataset = join_labels(parsed.tracks, labels);
  const SweepResult result = sweep_k(dataset, grid, config);
  ensure_dir(out_dir);
  write_sweep_outputs(result, out_dir, "sweep");
  return 0;
}

int run_calibrate(const std::string& input, const std::string& labels, double augment,
                  const std::string& grid_text, const SchemaOptions& so, const PipelineOptions& po,
                  const SamplerOptions& sa, const fs::path& out_dir) {
  const std::vector<double> grid = parse_grid(grid_text);
  const PipelineConfig config = po.resolve();
  const TrackSchema schema = resolve_schema(so);
  const ParseResult parsed = load_tracks(input, schema);
  std::vector<LabeledTrack> dataset;
  ensure_dir(out_dir);
  if (augment > 0.0) {
    const auto projected = segment_and_project(parsed.tracks, config.rest_gap_minutes);
    dataset = build_benchmark(projected, augment, sa.resolve(), config.seed);
    emit(out_dir / "labels.csv", [&](std::ostream& o) { write_labels_csv(o, dataset); });
  } else if (!labels.empty()) {
    dataset = join_labels(parsed.tracks, labels);
  } else {
    throw ConfigError("calibrate needs --augment FRACTION or --labels FILE");
  }
  write_sweep_outputs(sweep_k(dataset, grid, config), out_dir, "calibration");
  return 0;
}

SweepResult read_sweep_json(const fs::path& path) {
  const auto j = ordered_json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.contains("per_k") || !j.contains("chosen_k")) {
    throw InputError("'" + path.string() + "' is not a sweep result (needs per_k and chosen_k)");
  }
  SweepResult r;
  for (const auto& e : j["per_k"]) {
    KEvaluation k;
    k.k = e.at("k").get<double>();
    k.auc = e.at("auc").get<double>();
    r.grid.push_back(k.k);
    r.per_k.push_back(k);
  }
  r.chosen_k = j["chosen_k"].get<double>();
  return r;
}

int run_plot(const std::string& input, const std::string& kind, const PipelineOptions& po, const fs::path& output) {
  std::string svg;
  if (kind == "scatter") {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw InputError("cannot read '" + input + "'");
    const auto records = read_features_csv(in);
    if (records.empty()) throw InputError("features file has no records");
    PipelineConfig c = po.resolve();
    const auto report = score_outliers(records, c.outlier);
    svg = svg_lifespan_scatter(records, report.flagged);
  } else if (kind == "auc") {
    svg = svg_auc_curve(read_sweep_json(input));
  } else {
    throw ConfigError("--kind must be scatter or auc");
  }
  if (output.has_parent_path()) ensure_dir(output.parent_path());
  write_atomic(output, svg);
  std::cout << "wrote " << output.string() << '\n';
  return 0;
}

int run_synth(const CleanTrackConfig& cfg, double origin_lon, double origin_lat, double start_time,
              std::uint64_t seed, const SchemaOptions& so, const fs::path& output) {
  const TrackSchema schema = resolve_schema(so);
  const auto clean = synthesize_clean_tracks(cfg, seed);
  std::vector<Track> tracks;
  tracks.reserve(clean.size());
  for (auto t : clean) {
    // Centre the generation box on the requested origin.
    for (auto& p : t.points) {
      p.x -= 0.5 * cfg.region_km;
      p.y -= 0.5 * cfg.region_km;
    }
    t.origin = {origin_lon, origin_lat, start_time};
    tracks.push_back(unproject(t));
  }
  if (output.has_parent_path()) ensure_dir(output.parent_path());
  emit(output, [&](std::ostream& o) { write_tracks_csv(o, tracks, schema); });
  std::cout << "wrote " << tracks.size() << " tracks to " << output.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect loop anomalies in trajectories with persistent homology"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "looptrack 0.1.0");

  // detect
  auto* detect = app.add_subcommand("detect", "Score every track and flag loop anomalies");
  std::string detect_input;
  std::string quasi;
  std::string format = "csv";
  std::string detect_out = ".";
  SchemaOptions detect_schema;
  PipelineOptions detect_pipeline;
  auto* detect_in_opt = detect->add_option("input", detect_input, "Trajectory file");
  auto* quasi_opt = detect->add_option("--quasi-matrix", quasi, "Dense directional distance table to analyse instead");
  detect_in_opt->excludes(quasi_opt);
  detect->add_option("--output-dir", detect_out, "Where to write results")->capture_default_str();
  detect->add_option("--format", format, "Features file format: csv or json")->capture_default_str();
  add_schema_options(detect, detect_schema);
  add_pipeline_options(detect, detect_pipeline);

  // augment
  auto* augment = app.add_subcommand("augment", "Insert synthetic loop anomalies into a share of the tracks");
  std::string augment_input;
  std::string augment_out = ".";
  double fraction = 0.1;
  double augment_rest_gap = 45.0;
  std::uint64_t augment_seed = 0;
  SchemaOptions augment_schema;
  SamplerOptions augment_sampler;
  augment->add_option("input", augment_input, "Trajectory file")->required();
  augment->add_option("--fraction", fraction, "Share of eligible tracks to augment")->capture_default_str();
  augment->add_option("--rest-gap", augment_rest_gap, "Split tracks at gaps longer than this (minutes)")
      ->capture_default_str();
  augment->add_option("--seed", augment_seed, "Random seed")->capture_default_str();
  augment->add_option("--output-dir", augment_out, "Where to write augmented.csv and labels.csv")
      ->capture_default_str();
  add_schema_options(augment, augment_schema);
  add_sampler_options(augment, augment_sampler);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "AUC of m1 over a grid of k for a labelled dataset");
  std::string sweep_input;
  std::string sweep_labels;
  std::string sweep_grid = "0.5,1,2,5,10,15,20,30,50";
  std::string sweep_out = ".";
  SchemaOptions sweep_schema;
  PipelineOptions sweep_pipeline;
  sweep->add_option("input", sweep_input, "Trajectory file")->required();
  sweep->add_option("--labels", sweep_labels, "Labels file (selector,label,...)")->required();
  sweep->add_option("--grid", sweep_grid, "Comma-separated k values (km/hr)")->capture_default_str();
  sweep->add_option("--output-dir", sweep_out, "Where to write results")->capture_default_str();
  add_schema_options(sweep, sweep_schema);
  add_pipeline_options(sweep, sweep_pipeline, false);

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "Augment (or read labels), sweep k and pick the plateau k");
  std::string cal_input;
  std::string cal_labels;
  double cal_augment = 0.0;
  std::string cal_grid = "0.5,1,2,5,10,15,20,30,50";
  std::string cal_out = ".";
  SchemaOptions cal_schema;
  PipelineOptions cal_pipeline;
  SamplerOptions cal_sampler;
  calibrate->add_option("input", cal_input, "Trajectory file")->required();
  auto* aug_opt = calibrate->add_option("--augment", cal_augment, "Augment this share of tracks first");
  auto* lab_opt = calibrate->add_option("--labels", cal_labels, "Labels file for an already augmented dataset");
  aug_opt->excludes(lab_opt);
  calibrate->add_option("--grid", cal_grid, "Comma-separated k values (km/hr)")->capture_default_str();
  calibrate->add_option("--output-dir", cal_out, "Where to write results")->capture_default_str();
  add_schema_options(calibrate, cal_schema);
  add_pipeline_options(calibrate, cal_pipeline, false);
  add_sampler_options(calibrate, cal_sampler);

  // plot
  auto* plot = app.add_subcommand("plot", "Render features (scatter) or a sweep result (auc) to SVG");
  std::string plot_input;
  std::string plot_kind = "scatter";
  std::string plot_out = "plot.svg";
  PipelineOptions plot_pipeline;
  plot->add_option("input", plot_input, "features.csv, or a sweep/calibration JSON with --kind auc")->required();
  plot->add_option("--kind", plot_kind, "scatter or auc")->capture_default_str();
  plot->add_option("-o,--output", plot_out, "SVG file to write")->capture_default_str();
  plot->add_option("--outlier-method", plot_pipeline.outlier_method, "Outlier rule for highlighting")
      ->capture_default_str();
  plot->add_option("--threshold", plot_pipeline.config.outlier.threshold_km, "Absolute rule threshold (km)")
      ->capture_default_str();
  plot->add_option("--mad-c", plot_pipeline.config.outlier.mad_c, "MAD rule multiplier")->capture_default_str();
  plot->add_option("--mad-floor", plot_pipeline.config.outlier.mad_floor_km, "MAD rule margin when MAD is zero")
      ->capture_default_str();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate smooth synthetic clean tracks");
  CleanTrackConfig synth_cfg;
  double origin_lon = -43.2;
  double origin_lat = -22.9;
  double start_time = 1700000000.0;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "clean_tracks.csv";
  SchemaOptions synth_schema;
  synth->add_option("--tracks", synth_cfg.n_tracks, "Number of tracks")->capture_default_str();
  synth->add_option("--points", synth_cfg.n_points, "Points per track")->capture_default_str();
  synth->add_option("--interval", synth_cfg.sample_interval_s, "Seconds between samples")->capture_default_str();
  synth->add_option("--speed-min", synth_cfg.speed_min_kmh, "Slowest speed (km/hr)")->capture_default_str();
  synth->add_option("--speed-max", synth_cfg.speed_max_kmh, "Fastest speed (km/hr)")->capture_default_str();
  synth->add_option("--region", synth_cfg.region_km, "Side of the square region (km)")->capture_default_str();
  synth->add_option("--circuit-fraction", synth_cfg.circuit_fraction, "Share of ring-route tracks")
      ->capture_default_str();
  synth->add_option("--origin-lon", origin_lon, "Longitude of the region centre")->capture_default_str();
  synth->add_option("--origin-lat", origin_lat, "Latitude of the region centre")->capture_default_str();
  synth->add_option("--start-time", start_time, "Epoch seconds of the first sample")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
  synth->add_option("-o,--output", synth_out, "CSV file to write")->capture_default_str();
  add_schema_options(synth, synth_schema);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (detect->parsed()) {
      if (detect_input.empty() && quasi.empty()) throw ConfigError("detect needs an input file or --quasi-matrix");
      return run_detect(detect_input, quasi, detect_schema, detect_pipeline, detect_out, format);
    }
    if (augment->parsed()) {
      return run_augment(augment_input, augment_schema, augment_sampler, fraction, augment_rest_gap, augment_seed,
                         augment_out);
    }
    if (sweep->parsed()) return run_sweep(sweep_input, sweep_labels, sweep_grid, sweep_schema, sweep_pipeline, sweep_out);
    if (calibrate->parsed()) {
      return run_calibrate(cal_input, cal_labels, cal_augment, cal_grid, cal_schema, cal_pipeline, cal_sampler,
                           cal_out);
    }
    if (plot->parsed()) return run_plot(plot_input, plot_kind, plot_pipeline, plot_out);
    if (synth->parsed()) {
      return run_synth(synth_cfg, origin_lon, origin_lat, start_time, synth_seed, synth_schema, synth_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "looptrack: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "looptrack: error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitUsage;
}
