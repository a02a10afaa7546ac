#include "diffsr/app/run.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "diffsr/envs/registry.hpp"

namespace diffsr::app {
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::int64_t record_step(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  return j.at("step").get<std::int64_t>();
}

}  // namespace

void checkpoint_save(const agent::OnlineAgent& agent, const RunConfig& config, const fs::path& dir) {
  TensorArchive ar = agent.checkpoint();
  ar.meta()["config"] = config_echo(config);
  ar.meta()["step"] = agent.steps_done();
  ar.save(dir);
}

LoadedRun checkpoint_load(const fs::path& dir) {
  const TensorArchive ar = TensorArchive::load(dir);
  if (!ar.meta().contains("config")) throw ContractError("checkpoint " + dir.string() + " carries no config");
  LoadedRun run;
  run.config = parse_config_text(ar.meta().at("config").get<std::string>(), (dir / "manifest.json").string());
  run.agent = std::make_unique<agent::OnlineAgent>(run.config.agent);
  run.agent->restore(ar);
  return run;
}

int run_experiment(const RunConfig& config, const std::optional<fs::path>& resume, std::ostream& log) {
  const fs::path out = resolve_output_dir(config);
  fs::create_directories(out);
  write_text(out / "config.txt", config_echo(config));

  std::unique_ptr<agent::OnlineAgent> agent;
  std::vector<std::string> kept;
  if (resume) {
    agent = std::make_unique<agent::OnlineAgent>(config.agent);
    agent->restore(TensorArchive::load(*resume));
    for (const std::string& line : read_lines(out / "metrics.jsonl"))
      if (record_step(line) <= agent->steps_done()) kept.push_back(line);
  } else {
    agent = std::make_unique<agent::OnlineAgent>(config.agent);
  }

  std::ofstream metrics(out / "metrics.jsonl", std::ios::binary | std::ios::trunc);
  for (const std::string& line : kept) metrics << line << '\n';
  metrics.flush();

  std::optional<agent::MetricsRecord> last;
  auto sink = [&](const agent::MetricsRecord& r) {
    metrics << agent::metrics_line(r) << '\n';
    metrics.flush();
    last = r;
    log << "step " << r.step << "  eval " << r.eval_return_mean << " +- " << r.eval_return_std << '\n';
  };

  const std::int64_t total = config.agent.total_steps;
  std::string status = "ok";
  int code = 0;
  try {
    while (agent->steps_done() < total) {
      std::int64_t next = total;
      if (config.checkpoint_interval > 0)
        next = std::min(total, (agent->steps_done() / config.checkpoint_interval + 1) * config.checkpoint_interval);
      agent->run(next, sink);
      if (config.checkpoint_interval > 0 && next < total)
        checkpoint_save(*agent, config, out / ("checkpoint-" + std::to_string(next)));
    }
  } catch (const PoisonError& e) {
    status = std::string("poisoned: ") + e.what();
    code = 1;
  } catch (const NumericError& e) {
    status = std::string("numeric failure: ") + e.what();
    code = 1;
  }
  checkpoint_save(*agent, config, out / "checkpoint");

  std::ostringstream summary;
  summary << "status=" << (code == 0 ? "ok" : "failed") << " steps=" << agent->steps_done();
  if (last) summary << " final_eval_return_mean=" << last->eval_return_mean;
  if (code != 0) summary << " error=\"" << status << "\"";
  write_text(out / "summary.txt", summary.str() + "\n");
  log << summary.str() << '\n';
  return code;
}

double run_representation(const RunConfig& config, const ReprRunOptions& options, std::ostream& log) {
  const agent::AgentConfig& ac = config.agent;
  std::unique_ptr<agent::ReplayBuffer> owned;
  LoadedRun loaded;
  const agent::ReplayBuffer* buffer = nullptr;
  if (options.checkpoint) {
    loaded = checkpoint_load(*options.checkpoint);
    buffer = &loaded.agent->buffer();
  } else {
    auto env = envs::make_environment(ac.env, ac.history_len);
    const envs::EnvSpec& spec = env->spec();
    owned = std::make_unique<agent::ReplayBuffer>(static_cast<std::size_t>(options.collect_steps), spec.obs_dim,
                                                  spec.action_dim);
    Rng rng = Rng::derive(ac.seed, 11);
    Vector obs = env->reset(rng);
    int t = 0;
    for (std::int64_t i = 0; i < options.collect_steps; ++i) {
      Vector a(spec.action_dim);
      for (Eigen::Index j = 0; j < spec.action_dim; ++j) a(j) = rng.uniform(spec.action_low(j), spec.action_high(j));
      const envs::StepResult res = env->step(a, rng);
      owned->push({obs, a, res.reward, res.observation, res.done});
      obs = res.observation;
      if (res.done || ++t >= spec.horizon) obs = env->reset(rng), t = 0;
    }
    buffer = owned.get();
  }

  Rng init = Rng::derive(ac.seed, 12);
  Rng rng = Rng::derive(ac.seed, 13);
  diffusion::ScorePair sp = diffusion::ScorePair::create({.state_dim = buffer->obs_dim(),
                                                          .action_dim = buffer->action_dim(),
                                                          .feature_dim = ac.feature_dim,
                                                          .psi_width = ac.psi_width,
                                                          .psi_depth = ac.psi_depth,
                                                          .zeta_width = ac.zeta_width,
                                                          .zeta_depth = ac.zeta_depth},
                                                         init);
  const diffusion::ReprHead head = diffusion::ReprHead::create(ac.feature_dim, ac.fourier_dim, ac.repr_dim, init);
  const diffusion::NoiseSchedule schedule = diffusion::make_noise_schedule(ac.noise_levels, ac.beta_min, ac.beta_max);
  diffusion::ScorePairOptimizer opt(sp, ac.lr_repr);
  const int batch = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(ac.batch_size), buffer->size()));
  const diffusion::ReprTrainConfig rc{.steps = 1, .batch_size = batch, .norm_weight = ac.norm_weight,
                                      .learning_rate = ac.lr_repr};
  double window = 0.0, last = 0.0;
  for (int step = 1; step <= options.train_steps; ++step) {
    last = diffusion::train_representation(*buffer, sp, &head, schedule, rc, opt, rng).front().diff_loss;
    window += last;
    if (options.log_every > 0 && step % options.log_every == 0) {
      log << "repr step " << step << "  diff_loss " << window / options.log_every << '\n';
      window = 0.0;
    }
  }

  TensorArchive ar;
  for (const ParamView& v : sp.psi.parameters()) ar.put("psi." + v.name, {static_cast<std::int64_t>(v.data.size())}, v.data);
  for (const ParamView& v : sp.zeta.parameters())
    ar.put("zeta." + v.name, {static_cast<std::int64_t>(v.data.size())}, v.data);
  ar.put("head.W1", head.W1());
  ar.put("head.W2", head.W2());
  ar.meta()["kind"] = "diffsr-representation";
  ar.meta()["config"] = config_echo(config);
  ar.meta()["schedule"] = {{"levels", ac.noise_levels}, {"beta_min", ac.beta_min}, {"beta_max", ac.beta_max}};
  ar.meta()["final_diff_loss"] = last;
  ar.save(resolve_output_dir(config) / "repr");
  return last;
}

}  // namespace diffsr::app
