#include "stvsa/pipeline/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "stvsa/error.hpp"

namespace stvsa::pipeline {

using nlohmann::json;

std::string PipelineConfig::resolve(const std::string &name) const {
  std::filesystem::path p(name);
  if (p.is_absolute() || name.rfind("./", 0) == 0 || name.rfind("../", 0) == 0)
    return name;
  return (std::filesystem::path(paths.out) / p).string();
}

PipelineConfig default_config() { return PipelineConfig{}; }

namespace {

template <typename T> void read_if(const json &j, const char *key, T &out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

PipelineConfig load_config(const std::string &path) {
  std::ifstream f(path);
  if (!f) fail("io", "cannot open config '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::exception &e) {
    fail("config", "cannot parse '" + path + "': " + e.what());
  }

  PipelineConfig cfg;
  try {
    read_if(j, "seed", cfg.seed);
    if (j.contains("data")) {
      const json &d = j["data"];
      read_if(d, "bus_count", cfg.data.bus_count);
      read_if(d, "dt", cfg.data.dt);
      read_if(d, "horizon", cfg.data.horizon);
      read_if(d, "lines", cfg.data.lines);
      read_if(d, "clearing_time_count", cfg.data.clearing_time_count);
      read_if(d, "window_seconds", cfg.data.window_seconds);
      read_if(d, "ambiguous_share", cfg.data.ambiguous_share);
    }
    if (j.contains("labeling")) {
      const json &d = j["labeling"];
      read_if(d, "clusters", cfg.labeling.clusters);
      read_if(d, "alpha", cfg.labeling.alpha);
      read_if(d, "tol", cfg.labeling.tol);
      read_if(d, "max_iter", cfg.labeling.max_iter);
      read_if(d, "split_train", cfg.labeling.split_train);
      read_if(d, "split_test", cfg.labeling.split_test);
    }
    if (j.contains("augment")) {
      const json &d = j["augment"];
      read_if(d, "learning_rate", cfg.augment.learning_rate);
      read_if(d, "beta1", cfg.augment.beta1);
      read_if(d, "disc_steps", cfg.augment.disc_steps);
      read_if(d, "batch_size", cfg.augment.batch_size);
      read_if(d, "iterations", cfg.augment.iterations);
      read_if(d, "noise_dim", cfg.augment.noise_dim);
      read_if(d, "snapshot_every", cfg.augment.snapshot_every);
      read_if(d, "snapshot_samples", cfg.augment.snapshot_samples);
      read_if(d, "seeds", cfg.augment.seeds);
      read_if(d, "target_total", cfg.augment.target_total);
      read_if(d, "loss_mode", cfg.augment.loss_mode);
      read_if(d, "gen_hidden", cfg.augment.gen_hidden);
      read_if(d, "disc_hidden", cfg.augment.disc_hidden);
    }
    if (j.contains("classifier")) {
      const json &d = j["classifier"];
      read_if(d, "learning_rate", cfg.classifier.learning_rate);
      read_if(d, "batch_size", cfg.classifier.batch_size);
      read_if(d, "epochs", cfg.classifier.epochs);
      read_if(d, "dropout", cfg.classifier.dropout);
      read_if(d, "hidden", cfg.classifier.hidden);
      read_if(d, "attention_size", cfg.classifier.attention_size);
      read_if(d, "variant", cfg.classifier.variant);
      read_if(d, "train_on", cfg.classifier.train_on);
    }
    if (j.contains("evaluation")) {
      const json &d = j["evaluation"];
      read_if(d, "snr_db", cfg.evaluation.snr_db);
      read_if(d, "otw_ms", cfg.evaluation.otw_ms);
      read_if(d, "otw_epochs", cfg.evaluation.otw_epochs);
      read_if(d, "latency_samples", cfg.evaluation.latency_samples);
    }
    if (j.contains("paths")) {
      const json &d = j["paths"];
      read_if(d, "out", cfg.paths.out);
      read_if(d, "windows", cfg.paths.windows);
      read_if(d, "trajectories", cfg.paths.trajectories);
      read_if(d, "scenarios", cfg.paths.scenarios);
      read_if(d, "labeled", cfg.paths.labeled);
      read_if(d, "partition", cfg.paths.partition);
      read_if(d, "final_windows", cfg.paths.final_windows);
      read_if(d, "final_partition", cfg.paths.final_partition);
      read_if(d, "gan_checkpoint", cfg.paths.gan_checkpoint);
      read_if(d, "model_checkpoint", cfg.paths.model_checkpoint);
      read_if(d, "sc_report", cfg.paths.sc_report);
      read_if(d, "fidelity", cfg.paths.fidelity);
      read_if(d, "fidelity_report", cfg.paths.fidelity_report);
      read_if(d, "curves", cfg.paths.curves);
      read_if(d, "eval_report", cfg.paths.eval_report);
      read_if(d, "roc", cfg.paths.roc);
      read_if(d, "otw", cfg.paths.otw);
      read_if(d, "noise", cfg.paths.noise);
    }
  } catch (const json::exception &e) {
    fail("config", std::string("bad config value: ") + e.what());
  }
  return cfg;
}

std::string config_to_json(const PipelineConfig &cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["data"] = {{"bus_count", cfg.data.bus_count},
               {"dt", cfg.data.dt},
               {"horizon", cfg.data.horizon},
               {"lines", cfg.data.lines},
               {"clearing_time_count", cfg.data.clearing_time_count},
               {"window_seconds", cfg.data.window_seconds},
               {"ambiguous_share", cfg.data.ambiguous_share}};
  j["labeling"] = {{"clusters", cfg.labeling.clusters},
                   {"alpha", cfg.labeling.alpha},
                   {"tol", cfg.labeling.tol},
                   {"max_iter", cfg.labeling.max_iter},
                   {"split_train", cfg.labeling.split_train},
                   {"split_test", cfg.labeling.split_test}};
  j["augment"] = {{"learning_rate", cfg.augment.learning_rate},
                  {"beta1", cfg.augment.beta1},
                  {"disc_steps", cfg.augment.disc_steps},
                  {"batch_size", cfg.augment.batch_size},
                  {"iterations", cfg.augment.iterations},
                  {"noise_dim", cfg.augment.noise_dim},
                  {"snapshot_every", cfg.augment.snapshot_every},
                  {"snapshot_samples", cfg.augment.snapshot_samples},
                  {"seeds", cfg.augment.seeds},
                  {"target_total", cfg.augment.target_total},
                  {"loss_mode", cfg.augment.loss_mode},
                  {"gen_hidden", cfg.augment.gen_hidden},
                  {"disc_hidden", cfg.augment.disc_hidden}};
  j["classifier"] = {{"learning_rate", cfg.classifier.learning_rate},
                     {"batch_size", cfg.classifier.batch_size},
                     {"epochs", cfg.classifier.epochs},
                     {"dropout", cfg.classifier.dropout},
                     {"hidden", cfg.classifier.hidden},
                     {"attention_size", cfg.classifier.attention_size},
                     {"variant", cfg.classifier.variant},
                     {"train_on", cfg.classifier.train_on}};
  j["evaluation"] = {{"snr_db", cfg.evaluation.snr_db},
                     {"otw_ms", cfg.evaluation.otw_ms},
                     {"otw_epochs", cfg.evaluation.otw_epochs},
                     {"latency_samples", cfg.evaluation.latency_samples}};
  j["paths"] = {{"out", cfg.paths.out},
                {"windows", cfg.paths.windows},
                {"trajectories", cfg.paths.trajectories},
                {"scenarios", cfg.paths.scenarios},
                {"labeled", cfg.paths.labeled},
                {"partition", cfg.paths.partition},
                {"final_windows", cfg.paths.final_windows},
                {"final_partition", cfg.paths.final_partition},
                {"gan_checkpoint", cfg.paths.gan_checkpoint},
                {"model_checkpoint", cfg.paths.model_checkpoint},
                {"sc_report", cfg.paths.sc_report},
                {"fidelity", cfg.paths.fidelity},
                {"fidelity_report", cfg.paths.fidelity_report},
                {"curves", cfg.paths.curves},
                {"eval_report", cfg.paths.eval_report},
                {"roc", cfg.paths.roc},
                {"otw", cfg.paths.otw},
                {"noise", cfg.paths.noise}};
  return j.dump(2);
}

} // namespace stvsa::pipeline
