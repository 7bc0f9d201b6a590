// Copyright 2026 The privcam Authors.
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

#include "privcam/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace privcam {

namespace {

using nlohmann::json;

constexpr std::array<Method, 7> kMethods = {Method::kEngine,    Method::kEngineHc,
                                            Method::kGgv,       Method::kGgvPrivate,
                                            Method::kGreedy,    Method::kHillclimb,
                                            Method::kExhaustive};

std::string exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = text.find(sep);
    out.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

bool is_engine(Method m) { return m == Method::kEngine || m == Method::kEngineHc; }

bool is_fixture(std::string_view ref) {
  const auto names = fixture_names();
  return std::find(names.begin(), names.end(), ref) != names.end();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  static constexpr char kDigits[] = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex += kDigits[digest[i] >> 4];
    hex += kDigits[digest[i] & 0xF];
  }
  return hex;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view policy_name(InfeasiblePolicy p) {
  return p == InfeasiblePolicy::kIdle ? "idle" : "error";
}

std::string placement_label(const SweepPoint& p) {
  if (p.placement) return p.placement->label();
  if (p.config.placement) return p.config.placement->label();
  return std::to_string(p.config.locations.size()) + "cams";
}

std::string selection_csv(const PointResult& pr, const MethodOutcome& mo) {
  const auto& plan_sets = mo.method == Method::kEngineHc ? pr.constrained->plan_sets
                                                         : pr.plain.plan_sets;
  std::map<std::size_t, std::string> rows;
  for (std::size_t i = 0; i < plan_sets.size(); ++i) {
    const Plan& p = plan_sets[i].plans[mo.choices[i]];
    rows[plan_sets[i].camera_id] =
        std::to_string(p.plan_index) + ',' + exact(p.orientation_deg) + ",active";
  }
  for (const auto& cam : pr.scenario.cameras) {
    if (!rows.count(cam.id)) rows[cam.id] = ",,idle";
  }
  std::string out = "camera_id,plan_index,orientation_deg,status\n";
  for (const auto& [id, row] : rows) out += std::to_string(id) + ',' + row + '\n';
  return out;
}

std::filesystem::path method_dir(const ExperimentSpec& spec, const PointResult& pr, Method m) {
  return spec.out / pr.scenario.label / std::string(to_string(m));
}

void write_point_files(const ExperimentSpec& spec, const PointResult& pr) {
  const std::string tag = pr.point.tag();
  for (const auto& mo : pr.methods) {
    const auto dir = method_dir(spec, pr, mo.method);
    std::filesystem::create_directories(dir);
    if (mo.run) {
      write_file_atomic(dir / ("trace_" + tag + ".csv"),
                        trace_csv(*mo.run, mo.aggregate.units_per_cell));
    }
    const Heatmap h = make_heatmap(mo.aggregate, pr.scenario.target, pr.scenario.map);
    write_file_atomic(dir / ("heatmap_" + tag + ".csv"), heatmap_csv(h));
    write_file_atomic(dir / ("heatmap_" + tag + ".pgm"), heatmap_pgm(h));
    write_file_atomic(dir / ("selection_" + tag + ".csv"), selection_csv(pr, mo));
  }
}

std::string summary_csv(const std::vector<const PointResult*>& points, Method m) {
  std::string out = "placement,K,repetitions,mean_final_rmse,stderr_final_rmse,best_final_rmse\n";
  for (const PointResult* pr : points) {
    for (const auto& mo : pr->methods) {
      if (mo.method != m || !mo.run) continue;
      std::vector<double> finals;
      for (const auto& trace : mo.run->traces) finals.push_back(trace.back().rmse);
      const double n = static_cast<double>(finals.size());
      double mean = 0;
      for (double f : finals) mean += f;
      mean /= n;
      double var = 0;
      for (double f : finals) var += (f - mean) * (f - mean);
      const double se = finals.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
      out += mo.metrics.placement + ',' + std::to_string(mo.metrics.plan_count) + ',' +
             std::to_string(finals.size()) + ',' + fixed6(mean) + ',' + fixed6(se) + ',' +
             fixed6(mo.run->rmse) + '\n';
    }
  }
  return out;
}

json spec_json(const ExperimentSpec& spec) {
  json j;
  j["scenario"] = json::parse(serialize_config(resolve_scenario_config(spec.scenario)));
  std::vector<std::string> methods, placements;
  for (Method m : spec.methods) methods.emplace_back(to_string(m));
  for (const auto& p : spec.placements) placements.push_back(p.label());
  j["methods"] = methods;
  j["k_values"] = spec.k_values;
  j["placements"] = placements;
  j["fixtures"] = spec.fixtures;
  j["repetitions"] = spec.repetitions;
  j["iterations"] = spec.iterations;
  j["arity"] = spec.arity;
  j["seed"] = spec.seed;
  j["threshold_v"] = spec.threshold_v ? json(*spec.threshold_v) : json(nullptr);
  j["sample_density"] = spec.sample_density ? json(*spec.sample_density) : json(nullptr);
  j["on_infeasible"] = policy_name(spec.on_infeasible);
  j["hillclimb_restarts"] = spec.hillclimb_restarts;
  j["exhaustive_budget"] = spec.exhaustive_budget;
  j["mean_price"] = spec.cost.mean_price;
  j["standard_angle_deg"] = spec.cost.standard_angle_deg;
  return j;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kEngine:
      return "iepos";
    case Method::kEngineHc:
      return "iepos-hc";
    case Method::kGgv:
      return "ggv";
    case Method::kGgvPrivate:
      return "ggv-private";
    case Method::kGreedy:
      return "greedy";
    case Method::kHillclimb:
      return "hillclimb";
    case Method::kExhaustive:
      break;
  }
  return "exhaustive";
}

Method parse_method(std::string_view name) {
  for (Method m : kMethods) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_methods(std::string_view comma_list) {
  std::vector<Method> out;
  for (auto part : split(comma_list, ',')) {
    const Method m = parse_method(part);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

std::span<const Method> all_methods() { return kMethods; }

std::string PlacementSpec::label() const {
  std::string out = grid.label();
  if (angle_deg) out += '@' + exact(*angle_deg);
  return out;
}

PlacementSpec parse_placement_spec(std::string_view text) {
  PlacementSpec spec;
  const auto at = text.find('@');
  spec.grid = parse_placement(text.substr(0, at));
  if (at != std::string_view::npos) {
    const std::string_view angle = text.substr(at + 1);
    double v = 0;
    const auto res = std::from_chars(angle.data(), angle.data() + angle.size(), v);
    if (res.ec != std::errc{} || res.ptr != angle.data() + angle.size() || !(v > 0.0) ||
        !(v < 180.0)) {
      throw std::invalid_argument("bad placement angle in '" + std::string(text) + "'");
    }
    spec.angle_deg = v;
  }
  return spec;
}

std::vector<PlacementSpec> parse_placement_list(std::string_view comma_list) {
  std::vector<PlacementSpec> out;
  for (auto part : split(comma_list, ',')) out.push_back(parse_placement_spec(part));
  return out;
}

std::vector<int> parse_int_list(std::string_view comma_list) {
  std::vector<int> out;
  for (auto part : split(comma_list, ',')) {
    int v = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc{} || res.ptr != part.data() + part.size()) {
      throw std::invalid_argument("bad integer '" + std::string(part) + "'");
    }
    out.push_back(v);
  }
  return out;
}

void validate(const ExperimentSpec& spec) {
  if (spec.methods.empty()) throw std::invalid_argument("methods: at least one is required");
  for (int k : spec.k_values) {
    if (k < 1) throw std::invalid_argument("k: values must be >= 1");
  }
  for (const auto& f : spec.fixtures) {
    if (!is_fixture(f)) throw std::invalid_argument("fixtures: unknown fixture '" + f + "'");
  }
  if (spec.repetitions < 1) throw std::invalid_argument("reps: must be >= 1");
  if (spec.iterations < 1) throw std::invalid_argument("iters: must be >= 1");
  if (spec.arity < 1) throw std::invalid_argument("arity: must be >= 1");
  if (spec.workers < 1) throw std::invalid_argument("workers: must be >= 1");
  if (spec.hillclimb_restarts < 1) throw std::invalid_argument("restarts: must be >= 1");
  if (spec.threshold_v && !(*spec.threshold_v >= 0.0)) {
    throw std::invalid_argument("v: must be >= 0");
  }
  if (spec.sample_density && (*spec.sample_density < 1 || *spec.sample_density > 256)) {
    throw std::invalid_argument("sample-density: must be in [1, 256]");
  }
  if (!(spec.cost.mean_price > 0.0) || !(spec.cost.standard_angle_deg > 0.0)) {
    throw std::invalid_argument("cost: price and standard angle must be positive");
  }
}

ScenarioConfig resolve_scenario_config(std::string_view ref) {
  if (is_fixture(ref)) return desk_config(ref);
  const std::filesystem::path path{std::string(ref)};
  if (!std::filesystem::exists(path)) {
    throw std::invalid_argument("scenario: '" + std::string(ref) +
                                "' is neither a fixture nor an existing file");
  }
  return parse_scenario_config(read_file(path));
}

std::string SweepPoint::tag() const {
  return placement_label(*this) + "_k" + std::to_string(config.plan_count);
}

std::vector<SweepPoint> expand_sweep(const ExperimentSpec& spec) {
  const ScenarioConfig base = resolve_scenario_config(spec.scenario);
  std::vector<std::string> fixtures = spec.fixtures;
  if (fixtures.empty()) fixtures.emplace_back();
  std::vector<std::optional<PlacementSpec>> placements(spec.placements.begin(),
                                                       spec.placements.end());
  if (placements.empty()) placements.emplace_back();
  std::vector<std::optional<int>> ks(spec.k_values.begin(), spec.k_values.end());
  if (ks.empty()) ks.emplace_back();

  std::vector<SweepPoint> out;
  for (const auto& fixture : fixtures) {
    for (const auto& placement : placements) {
      for (const auto& k : ks) {
        SweepPoint p{fixture, placement, k, base};
        if (!fixture.empty()) {
          p.config.fixture = fixture;
          p.config.label = fixture;
        }
        if (placement) {
          p.config.placement = placement->grid;
          p.config.locations.clear();
          if (placement->angle_deg) p.config.angle_deg = placement->angle_deg;
        }
        if (k) p.config.plan_count = *k;
        if (spec.threshold_v) p.config.threshold_v = spec.threshold_v;
        if (spec.sample_density) p.config.sample_density = *spec.sample_density;
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

PointResult run_point(const ExperimentSpec& spec, const SweepPoint& point, int workers) {
  PointResult pr;
  pr.point = point;
  pr.scenario = build_scenario(point.config);
  const Scenario& sc = pr.scenario;

  PlanGenerationOptions gen;
  gen.on_infeasible = spec.on_infeasible;
  gen.workers = workers;
  gen.mode = PlanMode::kUnconstrained;
  pr.plain = generate_all_plans(sc, gen);
  if (std::find(spec.methods.begin(), spec.methods.end(), Method::kEngineHc) !=
      spec.methods.end()) {
    gen.mode = PlanMode::kHardConstrained;
    pr.constrained = generate_all_plans(sc, gen);
  }

  RunOptions ro;
  ro.repetitions = spec.repetitions;
  ro.iterations = spec.iterations;
  ro.arity = spec.arity;
  ro.seed = spec.seed;
  ro.workers = workers;

  for (Method m : spec.methods) {
    const std::vector<PlanSet>& sets =
        m == Method::kEngineHc ? pr.constrained->plan_sets : pr.plain.plan_sets;
    MethodOutcome mo;
    mo.method = m;
    if (is_engine(m)) {
      RunResult rr = run_collective_learning(sets, sc.target, ro);
      mo.choices = rr.selections;
      mo.aggregate = rr.aggregate;
      mo.run = std::move(rr);
    } else {
      Selection s;
      switch (m) {
        case Method::kGgv:
          s = ggv_select(sc, sets, false);
          break;
        case Method::kGgvPrivate:
          s = ggv_select(sc, sets, true);
          break;
        case Method::kGreedy:
          s = greedy_raster_select(sc, sets);
          break;
        case Method::kHillclimb:
          s = hillclimb_select(sc, sets, spec.hillclimb_restarts, spec.seed);
          break;
        default:
          s = exhaustive_select(sc, sets, spec.exhaustive_budget);
          break;
      }
      mo.choices = std::move(s.choices);
      mo.aggregate = std::move(s.aggregate);
    }
    for (const auto& ps : sets) mo.camera_ids.push_back(ps.camera_id);
    mo.metrics = evaluate(sc, sets, mo.choices, mo.aggregate, std::string(to_string(m)), spec.cost);
    mo.metrics.placement = placement_label(point);
    pr.methods.push_back(std::move(mo));
  }
  return pr;
}

std::vector<MetricsReport> ExperimentResult::rows() const {
  std::vector<MetricsReport> out;
  for (const auto& pr : points) {
    for (const auto& mo : pr.methods) out.push_back(mo.metrics);
  }
  return out;
}

std::string config_hash(const ExperimentSpec& spec) { return sha256_hex(spec_json(spec).dump()); }

std::string metrics_csv(const std::vector<MetricsReport>& rows) {
  std::string out(kMetricsCsvHeader);
  out += '\n';
  for (const auto& r : rows) out += metrics_csv_row(r) + '\n';
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ExperimentResult cmd_run(const ExperimentSpec& spec) {
  validate(spec);
  const std::vector<SweepPoint> points = expand_sweep(spec);
  ExperimentResult result;
  result.config_hash = config_hash(spec);
  result.points.resize(points.size());

  const int inner = points.size() == 1 ? spec.workers : 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      PointResult& slot = result.points[i];
      try {
        slot = run_point(spec, points[i], inner);
        write_point_files(spec, slot);
      } catch (const std::exception& e) {
        slot = PointResult{};
        slot.point = points[i];
        slot.scenario.label = points[i].config.label;
        slot.error = "sweep point " + points[i].config.label + '/' + points[i].tag() + ": " +
                     e.what();
      }
    }
  };
  const int threads = std::clamp<int>(spec.workers, 1, static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Per-(scenario, method) files, in sweep order.
  std::map<std::pair<std::string, Method>, std::vector<const PointResult*>> groups;
  std::vector<std::pair<std::string, Method>> group_order;
  json failures = json::array();
  for (const auto& pr : result.points) {
    if (!pr.error.empty()) {
      ++result.failures;
      failures.push_back(pr.error);
      continue;
    }
    for (const auto& mo : pr.methods) {
      const auto key = std::pair(pr.scenario.label, mo.method);
      if (!groups.count(key)) group_order.push_back(key);
      groups[key].push_back(&pr);
    }
  }
  for (const auto& key : group_order) {
    std::vector<MetricsReport> rows;
    for (const PointResult* pr : groups[key]) {
      for (const auto& mo : pr->methods) {
        if (mo.method == key.second) rows.push_back(mo.metrics);
      }
    }
    const auto dir = spec.out / key.first / std::string(to_string(key.second));
    write_file_atomic(dir / "metrics.csv", metrics_csv(rows));
    if (is_engine(key.second)) {
      write_file_atomic(dir / "summary.csv", summary_csv(groups[key], key.second));
    }
  }
  write_file_atomic(spec.out / "metrics.csv", metrics_csv(result.rows()));

  json manifest;
  manifest["tool"] = "privcam";
  manifest["version"] = kVersion;
  manifest["config_hash"] = result.config_hash;
  manifest["seed"] = spec.seed;
  manifest["compiler"] = __VERSION__;
  manifest["created_utc"] = utc_timestamp();
  manifest["sweep_points"] = points.size();
  manifest["failures"] = failures;
  manifest["spec"] = spec_json(spec);
  json idle = json::object();
  for (const auto& pr : result.points) {
    if (pr.error.empty() && pr.constrained && !pr.constrained->idle_cameras.empty()) {
      idle[pr.scenario.label + '/' + pr.point.tag()] = pr.constrained->idle_cameras;
    }
  }
  manifest["idle_cameras"] = idle;
  write_file_atomic(spec.out / "manifest.json", manifest.dump(2) + '\n');
  return result;
}

PlanGeneration cmd_export_plans(const Scenario& scenario, PlanMode mode,
                                const std::filesystem::path& path, bool verify,
                                InfeasiblePolicy on_infeasible, int workers) {
  PlanGenerationOptions gen;
  gen.mode = mode;
  gen.on_infeasible = on_infeasible;
  gen.workers = workers;
  PlanGeneration plans = generate_all_plans(scenario, gen);
  std::ostringstream out;
  export_plans(plans.plan_sets, out);
  write_file_atomic(path, out.str());
  if (verify) {
    std::ifstream in(path, std::ios::binary);
    const std::vector<PlanSet> back = import_plans(in, scenario.sample_density, mode);
    std::vector<PlanSet> expected;
    for (const auto& ps : plans.plan_sets) {
      if (!ps.plans.empty()) expected.push_back(ps);
    }
    if (back != expected) {
      throw std::runtime_error("re-imported dataset differs from the generated plans");
    }
  }
  return plans;
}

void cmd_render(const std::filesystem::path& csv, const std::filesystem::path& pgm) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + csv.string());
  write_file_atomic(pgm, heatmap_pgm(parse_heatmap_csv(in)));
}

}  // namespace privcam
