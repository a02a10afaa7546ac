#include <CLI11.hpp>

#include <malloc.h>

#include <cstdlib>
#include <iostream>
#include <map>

#include "diffsr/app/config.hpp"
#include "diffsr/app/run.hpp"
#include "diffsr/app/selftest.hpp"

namespace app = diffsr::app;

namespace {

std::string flag_name(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", file, "key = value config file");
    for (const std::string& key : app::config_keys()) cmd->add_option(flag_name(key), values[key], key);
  }

  app::RunConfig build(CLI::App* cmd) const {
    app::RunConfig config = file.empty() ? app::parse_config_text("") : app::parse_config_file(file);
    for (const std::string& key : app::config_keys())
      if (cmd->count(flag_name(key)) > 0) app::apply_setting(config, key, values.at(key), "flag " + flag_name(key));
    config.agent.validate();
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
  CLI::App cli{"Diffusion spectral representations for online RL"};
  cli.require_subcommand(1);

  ConfigFlags train_flags;
  std::string resume;
  CLI::App* train = cli.add_subcommand("train", "Online RL with the diffusion representation");
  train_flags.attach(train);
  train->add_option("--resume", resume, "checkpoint directory to continue from");

  ConfigFlags repr_flags;
  app::ReprRunOptions repr_opts;
  std::string repr_checkpoint;
  CLI::App* repr = cli.add_subcommand("repr", "Score-matching representation training on a recorded buffer");
  repr_flags.attach(repr);
  repr->add_option("--from", repr_checkpoint, "checkpoint whose replay buffer is used");
  repr->add_option("--collect", repr_opts.collect_steps, "random-policy transitions to collect otherwise");
  repr->add_option("--steps", repr_opts.train_steps, "gradient steps");
  repr->add_option("--log-every", repr_opts.log_every, "loss report interval");

  std::vector<std::string> selftest_names;
  CLI::App* selftest = cli.add_subcommand("selftest", "Run the oracle battery and spectral validators");
  selftest->add_option("checks", selftest_names, "check names (default: all)");

  std::string eval_checkpoint;
  int eval_episodes = 10;
  CLI::App* eval = cli.add_subcommand("eval", "Roll out a checkpointed policy");
  eval->add_option("checkpoint", eval_checkpoint, "checkpoint directory")->required();
  eval->add_option("--episodes", eval_episodes, "episode count");

  CLI11_PARSE(cli, argc, argv);

  try {
    if (*train) {
      const app::RunConfig config = train_flags.build(train);
      std::optional<std::filesystem::path> from;
      if (!resume.empty()) from = resume;
      return app::run_experiment(config, from, std::cout);
    }
    if (*repr) {
      const app::RunConfig config = repr_flags.build(repr);
      if (!repr_checkpoint.empty()) repr_opts.checkpoint = repr_checkpoint;
      const double loss = app::run_representation(config, repr_opts, std::cout);
      std::cout << "final diff_loss " << loss << '\n';
      return 0;
    }
    if (*selftest) return app::run_selftest(std::cout, selftest_names) == 0 ? 0 : 1;
    if (*eval) {
      const app::LoadedRun run = app::checkpoint_load(eval_checkpoint);
      const auto result = run.agent->evaluate(eval_episodes);
      nlohmann::json j;
      j["step"] = run.agent->steps_done();
      j["eval_return_mean"] = result.mean;
      j["eval_return_std"] = result.std;
      j["returns"] = result.returns;
      std::cout << j.dump() << '\n';
      return 0;
    }
  } catch (const diffsr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
