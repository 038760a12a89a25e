// Command-line front end: single runs, seeded batches, scenario generation
// and re-summarizing batch output directories.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "xtcp/error.hpp"
#include "xtcp/runner/batch.hpp"
#include "xtcp/runner/simulation.hpp"
#include "xtcp/scenario/scenario.hpp"

namespace fs = std::filesystem;
using namespace xtcp;

namespace {

struct CommonOpts {
  std::string scenario = "random-two-ue";
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::optional<double> rate_cap;
  std::optional<double> lambda;
  std::optional<double> epsilon_ms;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario, "Bundle name or path to a scenario document");
  cmd->add_option("--seed", o.seed, "Run seed (batch: first seed); falls back to XTCP_SIM_SEED");
  cmd->add_option("--duration", o.duration_s, "Simulated seconds");
  cmd->add_option("--rate-cap", o.rate_cap, "Application rate cap in bit/s");
  cmd->add_option("--lambda", o.lambda, "X-TCP window scaling factor");
  cmd->add_option("--epsilon-ms", o.epsilon_ms, "X-TCP queueing tolerance in ms");
}

std::optional<std::uint64_t> seed_from_env() {
  const char* env = std::getenv("XTCP_SIM_SEED");
  if (!env || !*env) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("XTCP_SIM_SEED='{}' is not an unsigned integer", env));
  }
}

std::optional<std::uint64_t> effective_seed(const CommonOpts& o) { return o.seed ? o.seed : seed_from_env(); }

GenOverrides overrides_of(const CommonOpts& o) {
  GenOverrides g;
  g.rate_cap_bps = o.rate_cap;
  g.duration_s = o.duration_s;
  g.lambda = o.lambda;
  g.epsilon_ms = o.epsilon_ms;
  return g;
}

// "xtcp,cubic" or "xtcp+cubic": per-UE flavors for a single scenario.
std::vector<CcFlavor> parse_flavor_list(const std::string& text) {
  std::string s = text;
  for (auto& c : s) {
    if (c == ',') c = '+';
  }
  return parse_cc_variant(s).flavors;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

int cmd_run(const CommonOpts& o, const std::string& cc, const std::string& out, const OutputConfig& traces) {
  Scenario sc = resolve_scenario(o.scenario);
  if (auto s = effective_seed(o)) sc.seed = *s;
  GenOverrides g = overrides_of(o);
  if (!cc.empty()) g.cc = parse_flavor_list(cc);
  apply_overrides(sc, g);
  sc.output.sinr_trace |= traces.sinr_trace;
  sc.output.dci_trace |= traces.dci_trace;
  sc.output.flow_trace |= traces.flow_trace;
  sc.output.check_invariants |= traces.check_invariants;

  const RunResult r = run_simulation(sc);
  if (!out.empty()) {
    write_run_outputs(out, r);
    write_text((fs::path(out) / "scenario.json").string(), scenario_to_json(sc).dump(2) + "\n");
  }
  std::cout << "metric,value\n";
  for (const auto& [k, v] : r.summary) std::cout << fmt::format("{},{}\n", k, v);
  if (sc.output.check_invariants) {
    std::cerr << fmt::format("invariant violations: {}\n", r.invariant_violations);
    if (r.invariant_violations) return 3;
  }
  return 0;
}

int cmd_batch(const CommonOpts& o, const std::string& cc, std::size_t runs, bool swap, unsigned jobs,
              const std::string& out) {
  Scenario base = resolve_scenario(o.scenario);
  apply_overrides(base, overrides_of(o));
  BatchConfig cfg;
  cfg.runs = runs;
  cfg.seed_base = effective_seed(o).value_or(base.seed);
  cfg.swap_pairing = swap;
  cfg.jobs = jobs;
  cfg.out_dir = out;
  for (const auto& v : split(cc, ',')) cfg.variants.push_back(parse_cc_variant(v));

  const BatchResult r = run_batch(reseed_factory(base), cfg);
  const std::string csv = r.summary_csv(base.name);
  if (!out.empty()) write_text((fs::path(out) / "summary.csv").string(), csv);
  std::cout << csv;
  return 0;
}

int cmd_gen(const std::string& kind, const CommonOpts& o, const std::string& cc, const std::string& out) {
  GenOverrides g = overrides_of(o);
  if (!cc.empty()) g.cc = parse_flavor_list(cc);
  const Scenario sc = gen_scenario(kind, effective_seed(o).value_or(1), g);
  const std::string doc = scenario_to_json(sc).dump(2) + "\n";
  if (out.empty()) {
    std::cout << doc;
  } else {
    write_text(out, doc);
  }
  return 0;
}

// Rebuilds the batch summary from the per-run directories of a batch.
int cmd_summarize(const std::string& dir, const std::string& scenario_name) {
  if (!fs::is_directory(dir)) throw ConfigError("'" + dir + "' is not a directory");
  std::vector<fs::path> run_dirs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::exists(e.path() / "summary.csv")) run_dirs.push_back(e.path());
  }
  std::sort(run_dirs.begin(), run_dirs.end());
  if (run_dirs.empty()) throw ConfigError("no run directories with summary.csv under '" + dir + "'");

  BatchResult r;
  for (const auto& p : run_dirs) {
    const std::string name = p.filename().string();
    const auto at = name.rfind("_seed");
    if (at == std::string::npos) continue;
    BatchRun run;
    run.variant = name.substr(0, at);
    std::ifstream f(p / "summary.csv");
    std::string line;
    std::getline(f, line);  // header
    while (std::getline(f, line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      run.summary.emplace_back(line.substr(0, comma), std::stod(line.substr(comma + 1)));
    }
    r.runs.push_back(std::move(run));
  }
  std::cout << r.summary_csv(scenario_name);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of TCP uplink over a mmWave cellular link"};
  app.require_subcommand(1);

  CommonOpts run_o, batch_o, gen_o;
  std::string run_cc, run_out, batch_cc = "xtcp,cubic", batch_out, gen_cc, gen_out, gen_kind;
  std::string sum_dir, sum_name = "batch";
  std::size_t runs = 1;
  bool swap = false;
  unsigned jobs = 1;
  OutputConfig traces;

  auto* run = app.add_subcommand("run", "Run one simulation and print its summary");
  add_common(run, run_o);
  run->add_option("--cc", run_cc, "Flavors per UE, e.g. xtcp or xtcp,cubic");
  run->add_option("--out", run_out, "Directory for metrics, summary and traces");
  run->add_flag("--sinr-trace", traces.sinr_trace, "Write sinr.csv");
  run->add_flag("--dci-trace", traces.dci_trace, "Write dci.csv");
  run->add_flag("--flow-trace", traces.flow_trace, "Write flow.csv");
  run->add_flag("--check-invariants", traces.check_invariants, "Check conservation after every event");

  auto* batch = app.add_subcommand("batch", "Run seeds seed..seed+N-1 for each flavor variant");
  add_common(batch, batch_o);
  batch->add_option("--runs", runs, "Seeds per variant")->check(CLI::PositiveNumber);
  batch->add_option("--cc", batch_cc, "Comma-separated variants; '+' assigns flavors per UE")
      ->capture_default_str();
  batch->add_flag("--swap-pairing", swap, "Also run every seed with the UE trajectories exchanged");
  batch->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  batch->add_option("--out", batch_out, "Directory for per-run outputs and summary.csv");

  auto* gen = app.add_subcommand("gen-scenario", "Write a fully populated scenario document");
  gen->add_option("kind", gen_kind, "random-two-ue or outage")->required();
  add_common(gen, gen_o);
  gen->add_option("--cc", gen_cc, "Flavors per UE");
  gen->add_option("--out", gen_out, "Output file (default: stdout)");

  auto* sum = app.add_subcommand("summarize", "Summarize the run directories of a batch");
  sum->add_option("dir", sum_dir, "Batch output directory")->required();
  sum->add_option("--name", sum_name, "Scenario column value");

  auto* list = app.add_subcommand("list", "List bundled scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_o, run_cc, run_out, traces);
    if (*batch) return cmd_batch(batch_o, batch_cc, runs, swap, jobs, batch_out);
    if (*gen) return cmd_gen(gen_kind, gen_o, gen_cc, gen_out);
    if (*sum) return cmd_summarize(sum_dir, sum_name);
    if (*list) {
      for (const auto& name : list_bundles()) std::cout << name << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
