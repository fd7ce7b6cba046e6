#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stvsa/error.hpp"
#include "stvsa/pipeline/commands.hpp"
#include "stvsa/pipeline/config.hpp"

using namespace stvsa;

int main(int argc, char **argv) {
  CLI::App app{"Short-term voltage stability assessment pipeline: synthetic "
               "contingency data, semi-supervised labeling, adversarial data "
               "augmentation, recurrent classification, and evaluation."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "JSON configuration file")
    ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app
    .add_option_function<std::uint64_t>(
      "--seed",
      [&](std::uint64_t s) {
        seed = s;
        seed_set = true;
      },
      "master seed (overrides config)")
    ->expected(1);

  app.add_subcommand("generate",
                     "simulate the scenario grid and write the dataset");
  app.add_subcommand("label",
                     "complete labels with semi-supervised clustering");
  auto *cmd_aug =
    app.add_subcommand("augment", "train the conditional GAN and inflate "
                                  "the training set");
  std::string loss_mode;
  cmd_aug->add_option("--loss-mode", loss_mode,
                      "least-squares (default) or cross-entropy");
  auto *cmd_tr = app.add_subcommand("train", "train a classifier variant");
  std::string variant, train_on;
  cmd_tr->add_option("--variant", variant,
                     "bigru-attention (default), gru, or lstm");
  cmd_tr->add_option("--dataset", train_on, "train on 'final' or 'labeled'");
  auto *cmd_ev = app.add_subcommand("eval", "evaluate on the test partition");
  std::string counts_fixture;
  cmd_ev->add_option("--counts-fixture", counts_fixture,
                     "JSON file {tp,fn,fp,tn}; compute metrics from counts");
  cmd_ev->add_option("--dataset", train_on, "evaluate on 'final' or 'labeled'");
  app.add_subcommand("sweep-otw",
                     "accuracy across observation window lengths");
  app.add_subcommand("noise", "accuracy under additive measurement noise");
  auto *cmd_as = app.add_subcommand("assess", "assess one window file");
  std::string window_path;
  cmd_as->add_option("--window", window_path, "CSV window file, q rows x 3L columns")
    ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    pipeline::PipelineConfig cfg = config_path.empty()
                                     ? pipeline::default_config()
                                     : pipeline::load_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.paths.out = out_dir;
    if (!loss_mode.empty()) cfg.augment.loss_mode = loss_mode;
    if (!variant.empty()) cfg.classifier.variant = variant;
    if (!train_on.empty()) cfg.classifier.train_on = train_on;

    if (app.got_subcommand("generate")) pipeline::cmd_generate(cfg);
    else if (app.got_subcommand("label")) pipeline::cmd_label(cfg);
    else if (app.got_subcommand("augment")) pipeline::cmd_augment(cfg);
    else if (app.got_subcommand("train")) pipeline::cmd_train(cfg);
    else if (app.got_subcommand("eval")) pipeline::cmd_eval(cfg, counts_fixture);
    else if (app.got_subcommand("sweep-otw")) pipeline::cmd_sweep_otw(cfg);
    else if (app.got_subcommand("noise")) pipeline::cmd_noise(cfg);
    else if (app.got_subcommand("assess")) pipeline::cmd_assess(cfg, window_path);
  } catch (const Error &e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << std::endl;
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: internal: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
