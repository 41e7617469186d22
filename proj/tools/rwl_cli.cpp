// Command-line front end. Talks to the library through the C interface only.
#include <CLI11.hpp>

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "rwl/rwl.h"

namespace {

enum Exit { kOk = 0, kInvariant = 1, kConfig = 2, kRuntime = 3, kInterrupted = 130 };

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void on_signal(int) { rwl_request_cancel(); }

void print_line(const char* line, void*) {
  std::printf("%s\n", line);
  std::fflush(stdout);
}

int run_study(const std::string& study, const Common& c) {
  rwl_config* cfg = nullptr;
  if (rwl_config_load(c.config.c_str(), study.c_str(), &cfg) != RWL_OK) {
    std::fprintf(stderr, "%s: invalid configuration:\n%s\n", c.config.c_str(), rwl_last_error());
    return kConfig;
  }
  if (c.seed_set) rwl_config_set_seed(cfg, c.seed);
  if (c.threads > 0 && rwl_config_set_threads(cfg, c.threads) != RWL_OK) {
    std::fprintf(stderr, "%s\n", rwl_last_error());
    rwl_config_destroy(cfg);
    return kConfig;
  }
  const std::string out = c.out.empty() ? rwl_config_output(cfg) : c.out;
  std::printf("%s -> %s\n", study.c_str(), out.c_str());

  rwl_report* report = nullptr;
  const rwl_status st = rwl_run_experiment(cfg, out.c_str(), print_line, nullptr, &report);
  rwl_config_destroy(cfg);
  if (st != RWL_OK) {
    std::fprintf(stderr, "error (%s): %s\n", rwl_status_name(st), rwl_last_error());
    return st == RWL_ERR_INTERRUPTED ? kInterrupted : kRuntime;
  }
  const bool ok = rwl_report_ok(report);
  for (size_t k = 0; k < rwl_report_failure_count(report); ++k)
    std::fprintf(stderr, "invariant failure: %s\n", rwl_report_failure(report, k));
  std::printf("%s\n", ok ? "all invariants hold" : "invariant failures recorded in status.json");
  rwl_report_destroy(report);
  return ok ? kOk : kInvariant;
}

int run_selftest(const std::vector<int>& ids, int threads) {
  int failures = 0;
  char line[1024];
  for (int id : ids) {
    int passed = 0;
    if (rwl_selftest_run(id, threads, &passed, line, sizeof line) != RWL_OK) {
      std::printf("FAIL %d: %s\n", id, rwl_last_error());
      ++failures;
      continue;
    }
    std::printf("%s\n", line);
    std::fflush(stdout);
    if (!passed) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failures, ids.size());
  return failures == 0 ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotating low-Mach flow experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rwl_version());

  Common common;
  const std::vector<std::pair<std::string, std::string>> study_help = {
      {"propagate", "Exact linear wave propagation with norm checks"},
      {"decay-study", "Dispersive decay of a fast-branch pulse"},
      {"project", "Kernel projection of initial data"},
      {"qg-run", "Quasi-geostrophic limit run"},
      {"ns-run", "Scaled compressible Navier-Stokes run"},
      {"limit-study", "Low-Mach sweep against the quasi-geostrophic limit"}};
  std::vector<std::string> studies;
  for (const auto& [name, help] : study_help) {
    studies.push_back(name);
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", common.config, "Configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "Output directory (overrides [run] output)");
    sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::Range(1, 256));
    sub->add_option("--seed", common.seed, "Seed for random initial data")
        ->each([&](const std::string&) { common.seed_set = true; });
  }

  std::vector<int> criteria;
  int st_threads = 1;
  CLI::App* st = app.add_subcommand("selftest", "Run the acceptance criteria");
  st->add_option("--criteria", criteria, "Subset of criteria to run (default: all)")
      ->delimiter(',')
      ->check(CLI::Range(1, rwl_selftest_count()));
  st->add_option("--threads", st_threads, "Worker threads")->check(CLI::Range(1, 256));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  if (*st) {
    if (criteria.empty())
      for (int k = 1; k <= rwl_selftest_count(); ++k) criteria.push_back(k);
    return run_selftest(criteria, st_threads);
  }
  for (const auto& name : studies)
    if (*app.get_subcommand(name)) return run_study(name, common);
  return kConfig;
}
