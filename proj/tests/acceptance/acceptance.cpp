// Acceptance battery: one PASS/FAIL line per criterion on stdout, progress on
// stderr. Arguments select criteria by number (default: all eleven).
#include <malloc.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "diffsr/agent/online.hpp"
#include "diffsr/app/checks.hpp"
#include "diffsr/app/config.hpp"
#include "diffsr/app/run.hpp"

using namespace diffsr;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Verdict all_of(const std::vector<app::CheckResult>& checks, const std::string& extra = "") {
  Verdict v{true, ""};
  for (const auto& c : checks) {
    v.passed = v.passed && c.passed;
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += c.name + (c.passed ? " ok (" : " FAILED (") + c.detail + ")";
  }
  if (!extra.empty()) v.detail += "; " + extra;
  return v;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct SeedRun {
  double final_return = 0.0;
  double seconds = 0.0;
};

SeedRun train_seed(agent::AgentConfig config, std::uint64_t seed, const std::string& label) {
  config.seed = seed;
  const auto start = Clock::now();
  const auto records = agent::run_online(config);
  SeedRun out;
  out.seconds = seconds_since(start);
  out.final_return = records.empty() ? 0.0 : records.back().eval_return_mean;
  std::cerr << "  " << label << " seed " << seed << ": final eval " << out.final_return << " in " << out.seconds
            << " s\n";
  return out;
}

Verdict criterion_pendulum() {
  const agent::AgentConfig config = app::parse_config_text("").agent;
  int good = 0;
  double worst_time = 0.0;
  std::string returns;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const SeedRun r = train_seed(config, seed, "pendulum");
    good += r.final_return >= 150.0;
    worst_time = std::max(worst_time, r.seconds);
    returns += fmt(seed ? ", %.1f" : "%.1f", r.final_return);
  }
  const bool fast = worst_time < 30.0 * 60.0;
  return {good >= 3 && fast, "final eval returns [" + returns + "], " + std::to_string(good) +
                                 "/4 seeds >= 150, slowest seed " + fmt("%.0f s (limit 1800 s)", worst_time)};
}

Verdict criterion_pomdp() {
  agent::AgentConfig config = app::parse_config_text("env = \"pendulum-masked\"").agent;
  std::vector<double> l1, l3;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    config.history_len = 1;
    l1.push_back(train_seed(config, seed, "masked L=1").final_return);
    config.history_len = 3;
    l3.push_back(train_seed(config, seed, "masked L=3").final_return);
  }
  const double m1 = median(l1), m3 = median(l3);
  const double gain = (m3 - m1) / std::max(std::abs(m1), 1e-12);
  return {gain >= 0.2, fmt("median final return L=3 %.1f vs L=1 %.1f, improvement %.1f%% (need >= 20%%)", m3, m1,
                           100.0 * gain)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict criterion_determinism() {
  const fs::path root = fs::temp_directory_path() / "diffsr_acceptance";
  fs::remove_all(root);
  auto config_for = [&](const std::string& name, std::int64_t steps) {
    app::RunConfig c = app::parse_config_text("total_steps = 3000\neval_interval = 1000\neval_episodes = 3\nseed = 17");
    c.agent.total_steps = steps;
    c.output_dir = (root / name).string();
    return c;
  };
  std::ostringstream log;
  const auto start = Clock::now();
  bool ok = app::run_experiment(config_for("a", 3000), std::nullopt, log) == 0;
  ok = ok && app::run_experiment(config_for("b", 3000), std::nullopt, log) == 0;
  ok = ok && app::run_experiment(config_for("r", 2000), std::nullopt, log) == 0;
  fs::rename(root / "r" / "checkpoint", root / "r_checkpoint");
  ok = ok && app::run_experiment(config_for("r", 3000), root / "r_checkpoint", log) == 0;
  const std::string a = slurp(root / "a" / "metrics.jsonl");
  const bool same = !a.empty() && a == slurp(root / "b" / "metrics.jsonl");
  const bool resumed = a == slurp(root / "r" / "metrics.jsonl");
  const bool ckpt = slurp(root / "a" / "checkpoint" / "tensors.bin") == slurp(root / "r" / "checkpoint" / "tensors.bin");
  fs::remove_all(root);
  return {ok && same && resumed && ckpt,
          std::string("repeat run metrics ") + (same ? "byte-identical" : "DIFFER") + ", resumed-at-2000 metrics " +
              (resumed ? "byte-identical" : "DIFFER") + ", final checkpoints " + (ckpt ? "identical" : "DIFFER") +
              fmt(" (%.0f s)", seconds_since(start))};
}

}  // namespace

int main(int argc, char** argv) {
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"score recovery", [] { return all_of({app::check_score_recovery()}); }},
      {"loss equivalence", [] { return all_of({app::check_loss_equivalence()}); }},
      {"tweedie identity", [] { return all_of({app::check_tweedie()}); }},
      {"spectral chain",
       [] {
         const auto start = Clock::now();
         auto checks = std::vector{app::check_spectral_identity(), app::check_partition_linear()};
         const double secs = seconds_since(start);
         Verdict v = all_of(checks, fmt("runtime %.1f s (limit 60 s)", secs));
         v.passed = v.passed && secs < 60.0;
         return v;
       }},
      {"rff fidelity", [] { return all_of({app::check_rff()}); }},
      {"gradient exactness", [] { return all_of({app::check_gradients()}); }},
      {"tabular fidelity", [] { return all_of({app::check_tabular_td(), app::check_dp_consistency()}); }},
      {"bonus correctness",
       [] {
         return all_of({app::check_sherman_morrison(), app::check_bonus_properties(), app::check_bonus_values()});
       }},
      {"scaled-down pendulum", criterion_pendulum},
      {"pomdp history benefit", criterion_pomdp},
      {"determinism", criterion_determinism},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.passed;
    std::cout << (v.passed ? "PASS " : "FAIL ") << id << " " << criteria[i].first << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
