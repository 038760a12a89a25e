#include "xtcp/runner/batch.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "xtcp/error.hpp"

namespace xtcp {

CcVariant parse_cc_variant(const std::string& text) {
  CcVariant v{text, {}};
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t plus = text.find('+', pos);
    const std::size_t end = plus == std::string::npos ? text.size() : plus;
    v.flavors.push_back(parse_cc_flavor(text.substr(pos, end - pos)));
    if (plus == std::string::npos) break;
    pos = plus + 1;
  }
  return v;
}

void apply_variant(Scenario& sc, const CcVariant& v) {
  if (v.flavors.size() == 1) {
    for (auto& ue : sc.ues) ue.cc = v.flavors[0];
    return;
  }
  if (v.flavors.size() != sc.ues.size()) {
    throw ConfigError(fmt::format("cc variant '{}' names {} flavors but the scenario has {} UEs", v.label,
                                  v.flavors.size(), sc.ues.size()));
  }
  for (std::size_t i = 0; i < sc.ues.size(); ++i) sc.ues[i].cc = v.flavors[i];
}

ScenarioFactory reseed_factory(Scenario base) {
  return [base = std::move(base)](std::uint64_t seed) {
    Scenario sc = base;
    sc.seed = seed;
    return sc;
  };
}

std::vector<double> BatchResult::values(const std::string& variant, const std::string& metric) const {
  std::vector<double> out;
  for (const auto& r : runs) {
    if (r.variant != variant) continue;
    for (const auto& [k, v] : r.summary) {
      if (k == metric) out.push_back(v);
    }
  }
  return out;
}

Summary BatchResult::summary(const std::string& variant, const std::string& metric) const {
  const auto v = values(variant, metric);
  return summarize(v);
}

std::string BatchResult::summary_csv(const std::string& scenario_name) const {
  std::string out = "scenario,cc,metric,mean,ci95,n\n";
  std::vector<std::string> variants;
  for (const auto& r : runs) {
    if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) variants.push_back(r.variant);
  }
  for (const auto& variant : variants) {
    std::vector<std::string> metrics;
    for (const auto& r : runs) {
      if (r.variant != variant) continue;
      for (const auto& [k, v] : r.summary) {
        if (std::find(metrics.begin(), metrics.end(), k) == metrics.end()) metrics.push_back(k);
      }
    }
    for (const auto& m : metrics) {
      const Summary s = summary(variant, m);
      out += fmt::format("{},{},{},{},{},{}\n", scenario_name, variant, m, s.mean,
                         s.ci95 ? fmt::format("{}", *s.ci95) : std::string(), s.n);
    }
  }
  return out;
}

BatchResult run_batch(const ScenarioFactory& factory, const BatchConfig& cfg) {
  struct Job {
    const CcVariant* variant;
    std::uint64_t seed;
    bool swapped;
  };
  std::vector<CcVariant> variants = cfg.variants;
  if (variants.empty()) variants.push_back({"scenario", {}});

  std::vector<Job> jobs;
  for (const auto& v : variants) {
    for (std::size_t i = 0; i < cfg.runs; ++i) {
      jobs.push_back({&v, cfg.seed_base + i, false});
      if (cfg.swap_pairing) jobs.push_back({&v, cfg.seed_base + i, true});
    }
  }

  BatchResult result;
  result.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      try {
        Scenario sc = factory(job.seed);
        if (!job.variant->flavors.empty()) apply_variant(sc, *job.variant);
        if (job.swapped) sc = swap_trajectories(sc);
        RunResult r = run_simulation(sc);
        if (!cfg.out_dir.empty()) {
          const auto dir = std::filesystem::path(cfg.out_dir) /
                           fmt::format("{}_seed{}{}", job.variant->label, job.seed, job.swapped ? "_swap" : "");
          write_run_outputs(dir.string(), r);
        }
        result.runs[i] = {job.variant->label, job.seed, job.swapped, std::move(r.summary),
                          r.invariant_violations};
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
        return;
      }
    }
  };

  const unsigned n_threads = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace xtcp
