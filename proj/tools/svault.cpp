// Copyright (c) 2026, the svault authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Verbs:
//   ingest        compress a CSV file into the store
//   daemon        run the periodic mover + sealer
//   tune-epsilon  pick an operating epsilon from history
//   query         read stored points (optionally materialized)
//   report        per-day compression summary
//   gen-synth     generate a deterministic synthetic PAR day file
// All tabular output is RFC-4180 CSV with a header row.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svault/svault.hpp"

namespace {

using namespace svault;

Daemon* g_daemon = nullptr;

void handle_signal(int) {
  if (g_daemon) g_daemon->stop();
}

std::string iso(Timestamp ts) { return format_timestamp(ts); }

Timestamp require_timestamp(const std::string& text, const std::string& flag) {
  const auto ts = parse_timestamp(text);
  if (!ts) throw ParseError(flag + " '" + text + "' is neither epoch seconds nor ISO-8601");
  return *ts;
}

std::int64_t require_date(const std::string& text, const std::string& flag) {
  const auto day = parse_date(text);
  if (!day) throw ParseError(flag + " '" + text + "' is not a YYYY-MM-DD date");
  return *day;
}

AppConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return AppConfig{};
  return load_config(path);
}

std::optional<Catalog> open_catalog(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return std::make_optional<Catalog>(std::filesystem::path(path));
}

std::function<bool(SensorId)> registration_predicate(const std::optional<Catalog>& catalog) {
  if (!catalog) return nullptr;
  return [&catalog](SensorId s) { return catalog->is_registered(s); };
}

std::map<std::string, SensorId> parse_sensor_map(const std::vector<std::string>& entries) {
  std::map<std::string, SensorId> map;
  for (const auto& e : entries) {
    const auto eq = e.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InvalidArgumentError("--map expects column=sensor-id, got '" + e + "'");
    std::uint64_t id = 0;
    const char* first = e.data() + eq + 1;
    const char* last = e.data() + e.size();
    const auto r = std::from_chars(first, last, id);
    if (r.ec != std::errc{} || r.ptr != last || id == 0)
      throw InvalidArgumentError("bad sensor id in '" + e + "'");
    map[e.substr(0, eq)] = SensorId{id};
  }
  return map;
}

void parse_epsilon_overrides(const std::vector<std::string>& entries, MoverConfig& config) {
  for (const auto& e : entries) {
    const auto eq = e.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InvalidArgumentError("--epsilon expects sensor-id=value, got '" + e + "'");
    std::uint64_t id = 0;
    const auto r = std::from_chars(e.data(), e.data() + eq, id);
    if (r.ec != std::errc{} || r.ptr != e.data() + eq || id == 0)
      throw InvalidArgumentError("bad sensor id in '" + e + "'");
    config.sensor_epsilon.insert_or_assign(SensorId{id}, Epsilon{std::stod(e.substr(eq + 1))});
  }
}

std::vector<Epsilon> parse_candidates(const std::string& text) {
  std::vector<Epsilon> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (tok.empty()) throw InvalidArgumentError("empty candidate in '" + text + "'");
    out.push_back(Epsilon{std::stod(tok)});
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

/// Builds a raw (unfilled) series from one CSV column: sorted, duplicate
/// timestamps last-writer-wins.
TimeSeries series_from_csv(const std::string& path, std::string column) {
  const SensorCsv csv = read_sensor_csv_file(path);
  if (csv.valid_rows == 0) throw ParseError("no valid rows in " + path);
  if (column.empty()) {
    if (csv.columns.size() != 1)
      throw InvalidArgumentError(path + " has " + std::to_string(csv.columns.size()) +
                                 " sensor columns; pick one with --column");
    column = csv.columns[0];
  }
  const auto it = std::find(csv.columns.begin(), csv.columns.end(), column);
  if (it == csv.columns.end())
    throw InvalidArgumentError("column '" + column + "' not present in " + path);
  const auto& raw = csv.series[static_cast<std::size_t>(it - csv.columns.begin())];
  std::map<Timestamp, double> dedup;
  for (const auto& p : raw) dedup[p.timestamp] = p.value;
  TimeSeries out;
  out.reserve(dedup.size());
  for (const auto& [ts, v] : dedup) out.append({ts, v});
  return out;
}

void print_move_reports(const std::vector<std::string>& columns,
                        const std::vector<MoveReport>& reports, const MoverConfig& config) {
  write_csv_row(std::cout, {"column", "sensor", "epsilon", "first", "last", "staged_count",
                            "resampled_count", "kept_count", "appended_count", "gaps", "skipped"});
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const MoveReport& r = reports[i];
    write_csv_row(std::cout,
                  {i < columns.size() ? columns[i] : "", std::to_string(r.sensor.value),
                   format_double(config.epsilon_for(r.sensor).value),
                   r.skipped ? "" : iso(r.first), r.skipped ? "" : iso(r.last),
                   std::to_string(r.staged_count), std::to_string(r.resampled_count),
                   std::to_string(r.kept_count), std::to_string(r.appended_count),
                   std::to_string(r.gaps.size()), r.skipped ? "true" : "false"});
  }
}

int cmd_ingest(const std::string& store_dir, const std::string& catalog_file, AppConfig cfg,
               const std::string& file, const std::vector<std::string>& map_entries,
               const std::vector<std::string>& epsilon_entries) {
  const auto sensor_map = parse_sensor_map(map_entries);
  if (sensor_map.empty()) throw InvalidArgumentError("ingest needs at least one --map column=id");
  parse_epsilon_overrides(epsilon_entries, cfg.mover);

  const auto catalog = open_catalog(catalog_file);
  Store store(store_dir);
  StagingStore staging(std::filesystem::path(store_dir) / "staging");
  Pipeline pipeline(staging, store, cfg.mover, registration_predicate(catalog));

  const FileIngestResult result = pipeline.ingest_file(file, sensor_map);
  for (const auto& e : result.row_errors)
    std::cerr << file << ": row " << e.line << ": " << e.message << "\n";

  std::vector<std::string> columns;
  for (const auto& [col, _] : sensor_map) columns.push_back(col);
  print_move_reports(columns, result.reports, cfg.mover);
  return 0;
}

int cmd_daemon(const std::string& store_dir, const std::string& catalog_file,
               const AppConfig& cfg, std::uint64_t max_ticks) {
  const auto catalog = open_catalog(catalog_file);
  Store store(store_dir);
  StagingStore staging(std::filesystem::path(store_dir) / "staging");
  Pipeline pipeline(staging, store, cfg.mover, registration_predicate(catalog));
  Daemon daemon(pipeline, store, cfg.daemon);

  std::uint64_t tick = 0;
  write_csv_row(std::cout, {"tick", "sensor", "first", "last", "staged_count", "resampled_count",
                            "kept_count", "appended_count", "gaps", "skipped", "sealed"});
  daemon.on_tick = [&](const Daemon::TickResult& result) {
    ++tick;
    for (const auto& r : result.reports)
      write_csv_row(std::cout, {std::to_string(tick), std::to_string(r.sensor.value),
                                r.skipped ? "" : iso(r.first), r.skipped ? "" : iso(r.last),
                                std::to_string(r.staged_count), std::to_string(r.resampled_count),
                                std::to_string(r.kept_count), std::to_string(r.appended_count),
                                std::to_string(r.gaps.size()), r.skipped ? "true" : "false",
                                std::to_string(result.sealed)});
    std::cout.flush();
    for (const auto& e : result.errors) std::cerr << "tick " << tick << ": " << e << "\n";
  };

  g_daemon = &daemon;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  daemon.run(max_ticks == 0 ? std::nullopt : std::make_optional(max_ticks));
  g_daemon = nullptr;
  return 0;
}

int cmd_tune(const std::string& store_dir, const AppConfig& cfg, const std::string& history_file,
             const std::string& column, std::uint64_t sensor_id, const std::string& start_text,
             const std::string& end_text, const std::string& candidates_text) {
  const std::vector<Epsilon> candidates = parse_candidates(candidates_text);

  TimeSeries history;
  if (!history_file.empty()) {
    history = series_from_csv(history_file, column);
  } else {
    if (sensor_id == 0 || start_text.empty() || end_text.empty())
      throw InvalidArgumentError(
          "tune-epsilon needs either --history <csv> or --sensor with --start/--end");
    Store store(store_dir);
    QuerySpec spec;
    spec.sensor = SensorId{sensor_id};
    spec.start = require_timestamp(start_text, "--start");
    spec.end = require_timestamp(end_text, "--end");
    spec.materialize = 1;  // reconstructed 1 Hz grid; raw points are already compressed
    history = store.query(spec);
  }

  const std::int64_t day = find_high_fluctuation_day(history, cfg.tuner_window);
  std::vector<TimePoint> day_points;
  for (const auto& p : history.points())
    if (day_of(p.timestamp) == day) day_points.push_back(p);
  const auto grid = resample_1s(day_points, cfg.mover.max_gap_seconds, history.sensor());

  const auto reports = sweep_epsilon(grid.series, candidates, cfg.mover.metric);
  const Epsilon floor = estimate_noise_floor(history, cfg.steady_state);
  const EpsilonSelection sel = select_epsilon(reports, floor, cfg.knee_threshold);

  write_csv_row(std::cout, {"epsilon", "kept_points", "reduction", "mae", "rmse", "max_error"});
  for (const auto& r : reports)
    write_csv_row(std::cout, {format_double(r.epsilon), std::to_string(r.kept_points),
                              format_double(r.reduction), format_double(r.mae),
                              format_double(r.rmse), format_double(r.max_error)});
  std::cout << "\r\n";
  write_csv_row(std::cout, {"selected_epsilon", "noise_floor", "high_fluctuation_day", "rationale"});
  write_csv_row(std::cout, {format_double(sel.epsilon.value), format_double(sel.noise_floor),
                            format_date(day), sel.rationale});
  return 0;
}

int cmd_query(const std::string& store_dir, std::uint64_t sensor_id, const std::string& start_text,
              const std::string& end_text, std::int64_t resolution) {
  Store store(store_dir);
  QuerySpec spec;
  spec.sensor = SensorId{sensor_id};
  spec.start = require_timestamp(start_text, "--start");
  spec.end = require_timestamp(end_text, "--end");
  if (resolution > 0) spec.materialize = resolution;
  const TimeSeries result = store.query(spec);

  write_csv_row(std::cout, {"timestamp", "value"});
  for (const auto& p : result.points())
    write_csv_row(std::cout, {iso(p.timestamp), format_double(p.value)});
  return 0;
}

int cmd_report(const std::string& store_dir, std::uint64_t sensor_id, const std::string& day_text,
               const std::string& original_file, const std::string& original_column) {
  Store store(store_dir);
  const std::int64_t day = require_date(day_text, "--day");
  const SensorId sensor{sensor_id};
  const Timestamp from = day_start(day);
  const Timestamp to = day_start(day + 1) - 1;

  QuerySpec spec;
  spec.sensor = sensor;
  spec.start = from;
  spec.end = to;
  const TimeSeries stored = store.query(spec);

  std::size_t before = 0;
  const auto gaps = store.gaps_in_range(sensor, from, to);
  if (!stored.empty()) {
    const Timestamp first = stored.front().timestamp;
    const Timestamp last = stored.back().timestamp;
    before = static_cast<std::size_t>(last - first + 1);
    for (const auto& g : gaps) {
      const Timestamp lo = std::max(g.last_before + 1, first);
      const Timestamp hi = std::min(g.first_after - 1, last);
      if (lo <= hi) before -= static_cast<std::size_t>(hi - lo + 1);
    }
  }
  const std::size_t after = stored.size();
  const double reduction =
      before == 0 ? 0.0
                  : static_cast<double>(before - after) / static_cast<double>(before);

  std::string mae, rmse, max_error;
  if (!original_file.empty()) {
    const TimeSeries original = series_from_csv(original_file, original_column);
    if (stored.empty()) throw InsufficientDataError("nothing stored on " + day_text);
    auto in_gap = [&](Timestamp ts) {
      for (const auto& g : gaps)
        if (g.contains(ts)) return true;
      return false;
    };
    std::vector<Timestamp> stamps;
    std::vector<double> truth;
    for (const auto& p : original.points()) {
      if (p.timestamp < stored.front().timestamp || p.timestamp > stored.back().timestamp)
        continue;
      if (in_gap(p.timestamp)) continue;
      stamps.push_back(p.timestamp);
      truth.push_back(p.value);
    }
    if (stamps.empty())
      throw InsufficientDataError("no original samples overlap the stored day");
    const TimeSeries recon = reconstruct(stored, stamps);
    double abs_sum = 0.0, sq_sum = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < stamps.size(); ++i) {
      const double e = std::fabs(truth[i] - recon[i].value);
      abs_sum += e;
      sq_sum += e * e;
      mx = std::max(mx, e);
    }
    mae = format_double(abs_sum / static_cast<double>(stamps.size()));
    rmse = format_double(std::sqrt(sq_sum / static_cast<double>(stamps.size())));
    max_error = format_double(mx);
  }

  write_csv_row(std::cout, {"sensor", "day", "points_before", "points_after", "reduction", "mae",
                            "rmse", "max_error"});
  write_csv_row(std::cout, {std::to_string(sensor.value), day_text, std::to_string(before),
                            std::to_string(after), format_double(reduction), mae, rmse, max_error});
  return 0;
}

int cmd_gen_synth(const SynthSpec& spec, const std::string& out_path, const std::string& column) {
  const TimeSeries series = generate_par_series(spec);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open " + out_path + " for writing");
  write_csv_row(out, {"timestamp", column});
  for (const auto& p : series.points())
    write_csv_row(out, {iso(p.timestamp), format_double(p.value)});
  out.flush();
  if (!out) throw IoError("short write to " + out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compressed storage for 1 Hz sensor fleets"};
  app.require_subcommand(1);

  std::string store_dir = "store";
  std::string catalog_file;
  std::string config_file;
  app.add_option("--store", store_dir, "Store root directory")->capture_default_str();
  app.add_option("--catalog", catalog_file, "Catalog document (JSON)");
  app.add_option("--config", config_file, "Config file (JSON, // comments allowed)");

  auto* ingest = app.add_subcommand("ingest", "Compress a CSV file into the store");
  std::string ingest_file_path;
  std::vector<std::string> ingest_map, ingest_epsilon;
  ingest->add_option("file", ingest_file_path, "CSV file (column 1: timestamp)")->required();
  ingest->add_option("--map", ingest_map, "column=sensor-id (repeatable)")->required();
  ingest->add_option("--epsilon", ingest_epsilon, "sensor-id=epsilon override (repeatable)");

  auto* daemon = app.add_subcommand("daemon", "Run the periodic mover and day sealer");
  std::uint64_t max_ticks = 0;
  daemon->add_option("--max-ticks", max_ticks, "Exit after this many ticks (testing; 0 = run forever)");

  auto* tune = app.add_subcommand("tune-epsilon", "Pick an operating epsilon from history");
  std::string tune_history, tune_column, tune_start, tune_end;
  std::string tune_candidates = "1,5,10,25";
  std::uint64_t tune_sensor = 0;
  tune->add_option("--history", tune_history, "History CSV (raw, uncompressed)");
  tune->add_option("--column", tune_column, "Sensor column in the history CSV");
  tune->add_option("--sensor", tune_sensor, "Sensor id (tune from the store instead of a CSV)");
  tune->add_option("--start", tune_start, "Range start (ISO-8601 or epoch seconds)");
  tune->add_option("--end", tune_end, "Range end (inclusive)");
  tune->add_option("--candidates", tune_candidates, "Comma-separated ascending epsilons")
      ->capture_default_str();

  auto* query = app.add_subcommand("query", "Read stored points as CSV");
  std::uint64_t query_sensor = 0;
  std::string query_start, query_end;
  std::int64_t query_resolution = 0;
  query->add_option("--sensor", query_sensor, "Sensor id")->required();
  query->add_option("--start", query_start, "Range start (ISO-8601 or epoch seconds)")->required();
  query->add_option("--end", query_end, "Range end (inclusive)")->required();
  query->add_option("--resolution", query_resolution,
                    "Materialize onto a uniform grid of this many seconds");

  auto* report = app.add_subcommand("report", "Per-day compression summary");
  std::uint64_t report_sensor = 0;
  std::string report_day, report_original, report_original_column;
  report->add_option("--sensor", report_sensor, "Sensor id")->required();
  report->add_option("--day", report_day, "UTC day, YYYY-MM-DD")->required();
  report->add_option("--original", report_original, "Raw CSV to compute error metrics against");
  report->add_option("--original-column", report_original_column, "Column in the raw CSV");

  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic PAR CSV");
  SynthSpec synth;
  std::string gen_out, gen_start, gen_column = "par";
  gen->add_option("--out", gen_out, "Output CSV path")->required();
  gen->add_option("--days", synth.days, "Number of days")->capture_default_str();
  gen->add_option("--seed", synth.seed, "RNG seed")->capture_default_str();
  gen->add_option("--peak", synth.clear_sky_peak, "Clear-sky peak value")->capture_default_str();
  gen->add_option("--clouds-per-hour", synth.clouds_per_hour, "Cloud transient rate")
      ->capture_default_str();
  gen->add_option("--noise", synth.noise_amplitude, "Uniform noise amplitude")
      ->capture_default_str();
  gen->add_option("--start", gen_start, "First timestamp (ISO-8601 or epoch seconds)");
  gen->add_option("--column", gen_column, "Value column name")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const AppConfig cfg = load_config_or_default(config_file);
    if (*ingest)
      return cmd_ingest(store_dir, catalog_file, cfg, ingest_file_path, ingest_map, ingest_epsilon);
    if (*daemon) return cmd_daemon(store_dir, catalog_file, cfg, max_ticks);
    if (*tune)
      return cmd_tune(store_dir, cfg, tune_history, tune_column, tune_sensor, tune_start, tune_end,
                      tune_candidates);
    if (*query) return cmd_query(store_dir, query_sensor, query_start, query_end, query_resolution);
    if (*report)
      return cmd_report(store_dir, report_sensor, report_day, report_original,
                        report_original_column);
    if (*gen) {
      if (!gen_start.empty()) synth.start = require_timestamp(gen_start, "--start");
      return cmd_gen_synth(synth, gen_out, gen_column);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
