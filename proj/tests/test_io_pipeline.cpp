#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "stvsa/data/dataset.hpp"
#include "stvsa/io/checkpoint.hpp"
#include "stvsa/numerics/rng.hpp"
#include "stvsa/pipeline/commands.hpp"
#include "stvsa/pipeline/config.hpp"

using namespace stvsa;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

// Tiny but complete configuration: 60 scenarios, cheap GAN, short training.
pipeline::PipelineConfig tiny_config(const std::string &out) {
  pipeline::PipelineConfig cfg;
  cfg.seed = 11;
  cfg.paths.out = out;
  cfg.data.bus_count = 4;
  cfg.data.lines = 1;
  cfg.data.clearing_time_count = 1;
  cfg.labeling.max_iter = 60;
  cfg.augment.iterations = 120;
  cfg.augment.snapshot_every = 120;
  cfg.augment.snapshot_samples = 64;
  cfg.augment.seeds = {1};
  cfg.augment.target_total = 120;
  cfg.augment.gen_hidden = {32, 32};
  cfg.augment.disc_hidden = {32, 16};
  cfg.augment.noise_dim = 16;
  cfg.classifier.epochs = 30;
  cfg.classifier.hidden = 8;
  cfg.classifier.attention_size = 4;
  cfg.classifier.batch_size = 16;
  cfg.classifier.learning_rate = 5e-3;
  cfg.evaluation.otw_ms = {20, 30};
  cfg.evaluation.otw_epochs = 8;
  cfg.evaluation.snr_db = {50, 30};
  cfg.evaluation.latency_samples = 5;
  return cfg;
}

} // namespace

TEST_CASE("checkpoint container round trips exactly") {
  io::Checkpoint ckpt;
  ckpt.meta["kind"] = "test";
  ckpt.meta["note"] = "two words";
  num::Rng rng(3);
  num::DenseArray &a = ckpt.params.create("layer.w", {3, 4});
  for (double &v : a.values) v = rng.normal() * 1e-7;
  num::DenseArray &b = ckpt.params.create("layer.b", {4});
  b.values = {1.0 / 3.0, -2.0e-15, 3.5e12, 0.0};

  const double diff = io::checkpoint_roundtrip("test_tmp_ckpt.txt", ckpt);
  CHECK(diff < 1e-12);

  io::Checkpoint back = io::load_checkpoint("test_tmp_ckpt.txt");
  CHECK(back.meta.at("kind") == "test");
  CHECK(back.meta.at("note") == "two words");
  CHECK(back.params.at("layer.w").shape == num::Shape{3, 4});
}

TEST_CASE("checkpoint rejects bad magic, version, and truncation") {
  {
    std::ofstream f("test_tmp_bad1.txt");
    f << "GARBAGE\n";
  }
  CHECK_THROWS_WITH_AS(io::load_checkpoint("test_tmp_bad1.txt"),
                       doctest::Contains("magic"), Error);
  {
    std::ofstream f("test_tmp_bad2.txt");
    f << "DLBAN2\nend\n";
  }
  CHECK_THROWS_WITH_AS(io::load_checkpoint("test_tmp_bad2.txt"),
                       doctest::Contains("version"), Error);
  {
    std::ofstream f("test_tmp_bad3.txt");
    f << "DLBAN1\nparam w 2 2 2\n1.0 2.0 3.0\n";
  }
  CHECK_THROWS_AS(io::load_checkpoint("test_tmp_bad3.txt"), Error);
  {
    // no end marker
    std::ofstream f("test_tmp_bad4.txt");
    f << "DLBAN1\nmeta kind test\n";
  }
  CHECK_THROWS_WITH_AS(io::load_checkpoint("test_tmp_bad4.txt"),
                       doctest::Contains("truncated"), Error);
}

TEST_CASE("pipeline end to end on a tiny grid") {
  const std::string dir = "test_tmp_pipe";
  fs::remove_all(dir);
  pipeline::PipelineConfig cfg = tiny_config(dir);

  pipeline::cmd_generate(cfg);
  CHECK(fs::exists(cfg.resolve(cfg.paths.windows)));
  CHECK(fs::exists(cfg.resolve(cfg.paths.trajectories)));
  data::WindowSet w = data::read_windows_csv(cfg.resolve(cfg.paths.windows));
  CHECK(w.size() == 60); // 3 loads x 4 motor shares x 1 line x 5 locs x 1 ct
  CHECK(w.q == 3);
  CHECK(w.feature_dim == 12);

  pipeline::cmd_label(cfg);
  data::WindowSet labeled =
    data::read_windows_csv(cfg.resolve(cfg.paths.labeled));
  for (const data::WindowRecord &r : labeled.records)
    CHECK(r.label >= 0);
  data::Partition part =
    data::read_partition_csv(cfg.resolve(cfg.paths.partition));
  CHECK(part.train_ids.size() == 45);
  CHECK(part.test_ids.size() == 15);

  pipeline::cmd_augment(cfg);
  data::WindowSet final_set =
    data::read_windows_csv(cfg.resolve(cfg.paths.final_windows));
  CHECK(final_set.size() == 120);
  data::Partition final_part =
    data::read_partition_csv(cfg.resolve(cfg.paths.final_partition));
  CHECK(final_part.test_ids == part.test_ids);
  for (long id : final_part.test_ids) {
    const data::WindowRecord *r = final_set.find(id);
    REQUIRE(r != nullptr);
    CHECK(r->origin == "simulated");
  }

  pipeline::cmd_train(cfg);
  CHECK(fs::exists(cfg.resolve(cfg.paths.model_checkpoint)));
  CHECK(fs::exists(cfg.resolve(cfg.paths.curves)));

  pipeline::cmd_eval(cfg);
  CHECK(fs::exists(cfg.resolve(cfg.paths.eval_report)));
  CHECK(fs::exists(cfg.resolve(cfg.paths.roc)));
  const std::string report = read_file(cfg.resolve(cfg.paths.eval_report));
  CHECK(report.find("accuracy") != std::string::npos);

  pipeline::cmd_noise(cfg);
  CHECK(fs::exists(cfg.resolve(cfg.paths.noise)));

  pipeline::cmd_sweep_otw(cfg);
  const std::string otw = read_file(cfg.resolve(cfg.paths.otw));
  CHECK(otw.find("otw_ms") != std::string::npos);
  // two sweep points plus header
  CHECK(std::count(otw.begin(), otw.end(), '\n') == 3);
}

TEST_CASE("commands are byte-reproducible under a fixed seed") {
  const std::string d1 = "test_tmp_repro1", d2 = "test_tmp_repro2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  pipeline::PipelineConfig c1 = tiny_config(d1);
  pipeline::PipelineConfig c2 = tiny_config(d2);
  c1.augment.iterations = 40; // keep the double run cheap
  c2.augment.iterations = 40;
  c1.classifier.epochs = 6;
  c2.classifier.epochs = 6;

  for (pipeline::PipelineConfig *c : {&c1, &c2}) {
    pipeline::cmd_generate(*c);
    pipeline::cmd_label(*c);
    pipeline::cmd_augment(*c);
    pipeline::cmd_train(*c);
    pipeline::cmd_eval(*c);
  }
  for (const char *name :
       {"windows.csv", "trajectories.csv", "scenarios.csv",
        "windows_labeled.csv", "partition.csv", "windows_final.csv",
        "partition_final.csv", "gan.ckpt", "model.ckpt", "train_curves.csv",
        "roc.csv"}) {
    CHECK_MESSAGE(read_file(d1 + "/" + name) == read_file(d2 + "/" + name),
                  name);
  }
}

TEST_CASE("eval triggers the purity guard on injected generated samples") {
  const std::string dir = "test_tmp_purity";
  fs::remove_all(dir);
  pipeline::PipelineConfig cfg = tiny_config(dir);
  cfg.augment.iterations = 30;
  cfg.classifier.epochs = 3;
  pipeline::cmd_generate(cfg);
  pipeline::cmd_label(cfg);
  pipeline::cmd_augment(cfg);
  pipeline::cmd_train(cfg);

  // flip one test sample's origin to generated
  data::WindowSet final_set =
    data::read_windows_csv(cfg.resolve(cfg.paths.final_windows));
  data::Partition part =
    data::read_partition_csv(cfg.resolve(cfg.paths.final_partition));
  for (data::WindowRecord &r : final_set.records)
    if (r.sample_id == part.test_ids.front()) r.origin = "gan";
  data::write_windows_csv(cfg.resolve(cfg.paths.final_windows), final_set);

  CHECK_THROWS_WITH_AS(pipeline::cmd_eval(cfg),
                       doctest::Contains("test partition"), Error);
}

TEST_CASE("eval from a counts fixture reproduces the published metrics") {
  const std::string dir = "test_tmp_fixture";
  fs::remove_all(dir);
  fs::create_directories(dir);
  pipeline::PipelineConfig cfg = tiny_config(dir);
  {
    std::ofstream f(dir + "/counts.json");
    f << "{\"tp\":1368,\"fn\":15,\"fp\":0,\"tn\":1277}\n";
  }
  pipeline::cmd_eval(cfg, dir + "/counts.json");
  const std::string report = read_file(cfg.resolve(cfg.paths.eval_report));
  auto grab = [&](const std::string &key) {
    const std::size_t pos = report.find("\"" + key + "\":");
    REQUIRE(pos != std::string::npos);
    return std::stod(report.substr(pos + key.size() + 3));
  };
  CHECK(std::abs(grab("accuracy") - 0.9944) < 5e-4);
  CHECK(std::abs(grab("f1") - 0.9945) < 5e-4);
  CHECK(std::abs(grab("mcc") - 0.9888) < 5e-4);
  CHECK(grab("misdetection_rate") == 0.0);
}

TEST_CASE("config file overrides defaults and survives a round trip") {
  pipeline::PipelineConfig cfg = pipeline::default_config();
  // documented defaults match the published hyperparameter tables
  CHECK(cfg.augment.learning_rate == 1e-4);
  CHECK(cfg.augment.beta1 == 0.5);
  CHECK(cfg.augment.batch_size == 32);
  CHECK(cfg.augment.iterations == 3000);
  CHECK(cfg.augment.disc_steps == 4);
  CHECK(cfg.augment.noise_dim == 100);
  CHECK(cfg.augment.target_total == 10640);
  CHECK(cfg.classifier.learning_rate == 1e-4);
  CHECK(cfg.classifier.batch_size == 64);
  CHECK(cfg.classifier.epochs == 200);
  CHECK(cfg.classifier.dropout == 0.25);
  CHECK(cfg.classifier.hidden == 64);
  CHECK(cfg.classifier.attention_size == 8);
  CHECK(cfg.data.dt == 0.01);
  CHECK(cfg.data.window_seconds == 0.03);

  {
    std::ofstream f("test_tmp_cfg.json");
    f << "{\"seed\": 99, \"classifier\": {\"epochs\": 7}, "
         "\"paths\": {\"out\": \"xyz\"}}\n";
  }
  pipeline::PipelineConfig loaded = pipeline::load_config("test_tmp_cfg.json");
  CHECK(loaded.seed == 99);
  CHECK(loaded.classifier.epochs == 7);
  CHECK(loaded.paths.out == "xyz");
  CHECK(loaded.classifier.batch_size == 64); // untouched default

  const std::string dumped = pipeline::config_to_json(loaded);
  {
    std::ofstream f("test_tmp_cfg2.json");
    f << dumped;
  }
  pipeline::PipelineConfig again = pipeline::load_config("test_tmp_cfg2.json");
  CHECK(again.seed == 99);
  CHECK(again.classifier.epochs == 7);
}
