/* Copyright 2026 The wavepipe Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wavepipe/analytics.hpp"
#include "wavepipe/config.hpp"
#include "wavepipe/cost_model.hpp"
#include "wavepipe/gantt.hpp"
#include "wavepipe/placement.hpp"
#include "wavepipe/schedule.hpp"
#include "wavepipe/serialize.hpp"
#include "wavepipe/simulate.hpp"
#include "wavepipe/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relative output paths resolve against $WAVEPIPE_OUT_DIR when it is set.
std::string resolve_output_path(const std::string& path) {
  if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
  const char* dir = std::getenv("WAVEPIPE_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  return (std::filesystem::path(dir) / path).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::string resolved = resolve_output_path(path);
  std::ofstream out(resolved, std::ios::binary);
  if (!out) throw IoError("cannot open " + resolved + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("cannot write " + resolved);
}

wavepipe::Scheme parse_scheme(const std::string& name) {
  wavepipe::Scheme scheme;
  if (!wavepipe::scheme_from_name(name, &scheme)) {
    throw wavepipe::ConfigError("unknown scheme: " + name);
  }
  return scheme;
}

// CLI-facing config builder.  --devices is the total device budget; the
// chimera-wave scheme stores one of its two symmetric groups, so the budget
// is halved into the group and the microbatches split between the groups.
wavepipe::ScheduleConfig build_config(wavepipe::Scheme scheme, int devices,
                                      int microbatches, int waves,
                                      int replicas) {
  if (scheme == wavepipe::Scheme::ChimeraWave) {
    if (devices % 2 != 0 || devices < 2) {
      throw wavepipe::ConfigError(
          "chimera-wave: device budget P must be even, got " +
          std::to_string(devices));
    }
    if (microbatches % 2 != 0) {
      throw wavepipe::ConfigError("chimera-wave: B must be even, got " +
                                  std::to_string(microbatches));
    }
    return wavepipe::make_config(scheme, devices / 2, microbatches / 2, waves,
                                 2);
  }
  return wavepipe::make_config(scheme, devices, microbatches, waves, replicas);
}

// Compute costs are given for the full device budget; a config that
// describes one of `replicas` device-disjoint groups carries
// proportionally larger per-device slices.
wavepipe::CostModel effective_cost(const wavepipe::ScheduleConfig& cfg,
                                   double tf, double tb, double tc) {
  wavepipe::CostModel base;
  base.t_forward = tf;
  base.t_backward = tb;
  base.t_comm = tc;
  return base.rescaled(cfg.devices * cfg.replicas, cfg.devices);
}

int cmd_generate(const std::string& scheme_name, int devices, int microbatches,
                 int waves, int replicas, double tf, double tb, double tc,
                 const std::string& out) {
  wavepipe::Scheme scheme = parse_scheme(scheme_name);
  wavepipe::ScheduleConfig cfg =
      build_config(scheme, devices, microbatches, waves, replicas);
  wavepipe::StagePlacement placement = wavepipe::make_placement(cfg);
  wavepipe::CostModel cost = effective_cost(cfg, tf, tb, tc);
  wavepipe::ActionList list = wavepipe::generate_schedule(placement, cfg, cost);
  write_file(out, wavepipe::serialize_action_list(list));
  return kExitOk;
}

int cmd_validate(const std::string& file, bool json) {
  wavepipe::ActionList list;
  try {
    list = wavepipe::parse_action_list(read_file(file));
  } catch (const wavepipe::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  }
  wavepipe::ValidationReport report = wavepipe::validate_all(list);
  if (json) {
    std::cout << wavepipe::render_diagnostics_json(report);
  } else {
    std::cout << wavepipe::render_diagnostics_text(report);
    if (report.ok()) {
      std::cout << "ok\n";
    } else {
      std::cout << report.diagnostics.size() << " finding(s)\n";
    }
  }
  return report.ok() ? kExitOk : kExitValidation;
}

int cmd_simulate(const std::string& file, double tf, double tb, double tc,
                 bool json, bool force, const std::string& gantt_format,
                 const std::string& gantt_out, const std::string& trace_out) {
  wavepipe::ActionList list;
  try {
    list = wavepipe::parse_action_list(read_file(file));
  } catch (const wavepipe::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  }
  wavepipe::ValidationReport report = wavepipe::validate_all(list);
  if (!report.ok() && !force) {
    std::cerr << wavepipe::render_diagnostics_text(report);
    std::cerr << "refusing to simulate an invalid schedule (use --force to "
                 "override)\n";
    return kExitValidation;
  }
  wavepipe::CostModel cost = effective_cost(list.config, tf, tb, tc);
  wavepipe::SimTrace trace = wavepipe::simulate(list, cost);
  wavepipe::MetricsReport metrics = wavepipe::compute_metrics(trace, list);
  std::cout << (json ? wavepipe::metrics_to_json(metrics)
                     : wavepipe::metrics_to_text(metrics));
  if (!gantt_format.empty()) {
    std::string out = gantt_out.empty() ? "gantt." + gantt_format : gantt_out;
    write_file(out, wavepipe::trace_to_gantt(trace, gantt_format));
  }
  if (!trace_out.empty()) {
    write_file(trace_out, wavepipe::trace_to_json(trace));
  }
  return kExitOk;
}

int cmd_compare(int devices, int microbatches, const std::string& schemes_csv,
                int waves_sweep, double tf, double tb, double tc, bool json,
                const std::string& out) {
  std::vector<wavepipe::CompareRequest> requests;
  std::stringstream ss(schemes_csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    wavepipe::Scheme scheme = parse_scheme(item);
    int sweep = wavepipe::is_wave_scheme(scheme) ? waves_sweep : 1;
    for (int w = 1; w <= sweep; ++w) {
      requests.push_back(wavepipe::CompareRequest{scheme, w});
    }
  }
  if (requests.empty()) {
    std::cerr << "error: no schemes requested\n";
    return kExitUsage;
  }
  wavepipe::CostModel base;
  base.t_forward = tf;
  base.t_backward = tb;
  base.t_comm = tc;
  std::vector<wavepipe::CompareRow> rows =
      wavepipe::compare(requests, devices, microbatches, base);
  std::string rendered =
      json ? wavepipe::compare_to_json(rows) : wavepipe::compare_to_csv(rows);
  if (out.empty()) {
    std::cout << rendered;
  } else {
    write_file(out, rendered);
  }
  bool any_ok = false;
  for (const wavepipe::CompareRow& row : rows) any_ok |= !row.failed;
  return any_ok ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synchronous pipeline-parallel schedule toolkit"};
  app.require_subcommand(1);

  std::string scheme, in_file, out_file, gantt_format, gantt_out, trace_out;
  std::string schemes_csv;
  int devices = 0, microbatches = 0, waves = 1, replicas = 1, waves_sweep = 1;
  double tf = 1.0, tb = 2.0, tc = 0.0;
  bool json = false, force = false;

  CLI::App* gen = app.add_subcommand("generate", "generate a schedule file");
  gen->add_option("--scheme", scheme,
                  "gpipe|dapple|chimera|chimera-wave|hanayo")
      ->required();
  gen->add_option("--devices", devices, "device budget P")->required();
  gen->add_option("--microbatches", microbatches, "microbatch count B")
      ->required();
  gen->add_option("--waves", waves, "wave count W (wave schemes)");
  gen->add_option("--replicas", replicas, "device-disjoint replica groups D");
  gen->add_option("--tf", tf, "full forward cost / P (default 1)");
  gen->add_option("--tb", tb, "full backward cost / P (default 2)");
  gen->add_option("--tc", tc, "point-to-point transfer cost (default 0)");
  gen->add_option("--out", out_file, "output file")->required();

  CLI::App* val = app.add_subcommand("validate", "check a schedule file");
  val->add_option("file", in_file, "schedule file")->required();
  val->add_flag("--json", json, "JSON diagnostics");

  CLI::App* sim = app.add_subcommand("simulate", "simulate a schedule file");
  sim->add_option("file", in_file, "schedule file")->required();
  sim->add_option("--tf", tf, "full forward cost / P (default 1)");
  sim->add_option("--tb", tb, "full backward cost / P (default 2)");
  sim->add_option("--tc", tc, "point-to-point transfer cost (default 0)");
  sim->add_flag("--json", json, "JSON metrics");
  sim->add_flag("--force", force, "simulate even if validation fails");
  sim->add_option("--gantt", gantt_format, "write a gantt chart (svg|csv)")
      ->check(CLI::IsMember({"svg", "csv"}));
  sim->add_option("--gantt-out", gantt_out,
                  "gantt output file (default gantt.<fmt>)");
  sim->add_option("--trace-out", trace_out, "write the trace as JSON");

  CLI::App* cmp = app.add_subcommand("compare", "compare schemes at a budget");
  cmp->add_option("--devices", devices, "device budget P")->required();
  cmp->add_option("--microbatches", microbatches, "total microbatches B")
      ->required();
  cmp->add_option("--schemes", schemes_csv, "comma-separated scheme list")
      ->required();
  cmp->add_option("--waves-sweep", waves_sweep,
                  "evaluate wave schemes at W = 1..MAX");
  cmp->add_option("--tf", tf, "full forward cost / P (default 1)");
  cmp->add_option("--tb", tb, "full backward cost / P (default 2)");
  cmp->add_option("--tc", tc, "point-to-point transfer cost (default 0)");
  cmp->add_flag("--json", json, "JSON table");
  cmp->add_option("--out", out_file, "write the table to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_generate(scheme, devices, microbatches, waves, replicas, tf,
                          tb, tc, out_file);
    }
    if (val->parsed()) {
      return cmd_validate(in_file, json);
    }
    if (sim->parsed()) {
      return cmd_simulate(in_file, tf, tb, tc, json, force, gantt_format,
                          gantt_out, trace_out);
    }
    if (cmp->parsed()) {
      return cmd_compare(devices, microbatches, schemes_csv, waves_sweep, tf,
                         tb, tc, json, out_file);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const wavepipe::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const wavepipe::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
