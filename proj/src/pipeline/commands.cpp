#include "stvsa/pipeline/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "stvsa/cluster/cop_kmeans.hpp"
#include "stvsa/cluster/resolve.hpp"
#include "stvsa/cluster/sfcm.hpp"
#include "stvsa/cluster/silhouette.hpp"
#include "stvsa/data/dataset.hpp"
#include "stvsa/eval/metrics.hpp"
#include "stvsa/gan/augment.hpp"
#include "stvsa/gan/fidelity.hpp"
#include "stvsa/gan/model.hpp"
#include "stvsa/model/classifier.hpp"
#include "stvsa/numerics/rng.hpp"

namespace stvsa::pipeline {

namespace {

void ensure_out_dir(const PipelineConfig &cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.paths.out, ec);
  if (ec)
    fail("io", "cannot create output directory '" + cfg.paths.out + "'");
}

std::ofstream open_out(const std::string &path) {
  std::ofstream f(path);
  if (!f) fail("io", "cannot open '" + path + "' for writing");
  return f;
}

struct LoadedDataset {
  data::WindowSet windows;
  data::Partition partition;
  data::NormalizationBounds bounds;
  std::map<long, const data::WindowRecord *> by_id;
};

LoadedDataset load_dataset(const std::string &windows_path,
                           const std::string &partition_path) {
  LoadedDataset ds;
  ds.windows = data::read_windows_csv(windows_path);
  ds.partition = data::read_partition_csv(partition_path);
  for (const data::WindowRecord &r : ds.windows.records)
    ds.by_id[r.sample_id] = &r;
  const std::size_t covered =
    ds.partition.train_ids.size() + ds.partition.test_ids.size();
  if (covered != ds.windows.size())
    fail("data", "partition covers " + std::to_string(covered) +
                   " samples, dataset has " +
                   std::to_string(ds.windows.size()));
  for (long id : ds.partition.train_ids)
    if (!ds.by_id.count(id))
      fail("data", "partition references unknown sample " + std::to_string(id));
  for (long id : ds.partition.test_ids)
    if (!ds.by_id.count(id))
      fail("data", "partition references unknown sample " + std::to_string(id));
  ds.bounds = data::compute_bounds(ds.windows, ds.partition.train_ids);
  return ds;
}

// Normalized feature matrix plus labels for a list of sample ids.
std::pair<num::DenseArray, std::vector<int>>
matrix_for(const LoadedDataset &ds, const std::vector<long> &ids) {
  const std::size_t d = static_cast<std::size_t>(ds.windows.flat_dim());
  num::DenseArray x({ids.size(), d});
  std::vector<int> y(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const data::WindowRecord *r = ds.by_id.at(ids[i]);
    std::vector<double> n = data::normalize(r->features, ds.bounds);
    std::copy(n.begin(), n.end(), &x.values[i * d]);
    y[i] = r->label;
  }
  return {std::move(x), std::move(y)};
}

void purity_guard(const LoadedDataset &ds) {
  for (long id : ds.partition.test_ids)
    if (ds.by_id.at(id)->origin != "simulated")
      fail("data", "test partition contains non-simulated sample " +
                     std::to_string(id) + "; refusing to evaluate");
}

std::string mode_suffix(const std::string &loss_mode) {
  return loss_mode == "cross-entropy" ? "_cgan" : "";
}

std::string with_suffix(const std::string &name, const std::string &suffix) {
  if (suffix.empty()) return name;
  const std::size_t dot = name.rfind('.');
  if (dot == std::string::npos) return name + suffix;
  return name.substr(0, dot) + suffix + name.substr(dot);
}

model::SequenceClassifier build_classifier(const PipelineConfig &cfg, int q,
                                           int feature_dim,
                                           std::uint64_t seed_salt,
                                           int epochs_override = -1) {
  model::ClassifierConfig mc;
  mc.learning_rate = cfg.classifier.learning_rate;
  mc.batch_size = cfg.classifier.batch_size;
  mc.epochs = epochs_override > 0 ? epochs_override : cfg.classifier.epochs;
  mc.dropout = cfg.classifier.dropout;
  mc.hidden = cfg.classifier.hidden;
  mc.attention_size = cfg.classifier.attention_size;
  mc.seed = num::mix_seed(cfg.seed, seed_salt);
  return model::SequenceClassifier(
    model::variant_from_string(cfg.classifier.variant), q, feature_dim, mc,
    num::mix_seed(cfg.seed, seed_salt ^ 0xABCDEF));
}

} // namespace

// ------------------------------------------------------------- generate ----

void cmd_generate(const PipelineConfig &cfg) {
  ensure_out_dir(cfg);
  data::GridConfig grid_cfg;
  grid_cfg.line_count = cfg.data.lines;
  grid_cfg.clearing_time_count = cfg.data.clearing_time_count;
  grid_cfg.seed = num::mix_seed(cfg.seed, 0x6E0);
  std::vector<data::Scenario> grid = data::build_scenario_grid(grid_cfg);

  data::SimParams sim;
  sim.ambiguous_share = cfg.data.ambiguous_share;

  std::vector<data::TrajectorySample> trajectories;
  std::vector<data::ScenarioRecord> scenario_records;
  data::WindowSet windows;
  windows.q = static_cast<int>(std::lround(cfg.data.window_seconds / cfg.data.dt));
  windows.feature_dim = 3 * cfg.data.bus_count;

  int n_stable = 0, n_unstable = 0, n_unlabeled = 0;
  for (const data::Scenario &sc : grid) {
    data::SimOutcome outcome;
    data::TrajectorySample s = data::simulate_trajectory(
      sc, cfg.data.bus_count, cfg.data.dt, cfg.data.horizon, &outcome, sim);
    s.sample_id = sc.id;
    s.label = data::prelabel(s);
    switch (s.label) {
    case data::LabelState::kStable: ++n_stable; break;
    case data::LabelState::kUnstable: ++n_unstable; break;
    case data::LabelState::kUnlabeled: ++n_unlabeled; break;
    }

    num::DenseArray w = data::extract_window(s, cfg.data.window_seconds);
    data::WindowRecord rec;
    rec.sample_id = s.sample_id;
    rec.label = data::label_to_int(s.label);
    rec.origin = "simulated";
    rec.scenario_id = sc.id;
    rec.features = w.values;
    windows.records.push_back(std::move(rec));

    scenario_records.push_back({sc, outcome});
    trajectories.push_back(std::move(s));
  }

  data::write_scenarios_csv(cfg.resolve(cfg.paths.scenarios), scenario_records);
  data::write_trajectories_csv(cfg.resolve(cfg.paths.trajectories),
                               trajectories);
  data::write_windows_csv(cfg.resolve(cfg.paths.windows), windows);

  std::cout << "generated " << grid.size() << " samples (stable " << n_stable
            << ", unstable " << n_unstable << ", unlabeled " << n_unlabeled
            << ")\n";
}

// ---------------------------------------------------------------- label ----

void cmd_label(const PipelineConfig &cfg) {
  ensure_out_dir(cfg);
  data::WindowSet windows =
    data::read_windows_csv(cfg.resolve(cfg.paths.windows));
  std::vector<data::TrajectorySample> trajectories =
    data::read_trajectories_csv(cfg.resolve(cfg.paths.trajectories));
  if (trajectories.size() != windows.size())
    fail("data", "window and trajectory files disagree on sample count");

  std::map<long, const data::TrajectorySample *> traj_by_id;
  for (const data::TrajectorySample &t : trajectories)
    traj_by_id[t.sample_id] = &t;

  // Clustering features: flattened full-horizon voltage trajectories.
  const std::size_t n = windows.size();
  const data::TrajectorySample &first = trajectories.front();
  const std::size_t fdim = first.voltage.numel();
  num::DenseArray features({n, fdim});
  std::vector<int> known(n, -1);
  int labeled_stable = 0, labeled_unstable = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const data::WindowRecord &r = windows.records[i];
    auto it = traj_by_id.find(r.sample_id);
    if (it == traj_by_id.end())
      fail("data", "no trajectory for sample " + std::to_string(r.sample_id));
    std::copy(it->second->voltage.values.begin(),
              it->second->voltage.values.end(), &features.values[i * fdim]);
    known[i] = r.label; // 1 stable, 0 unstable, -1 unlabeled
    if (r.label == 1) ++labeled_stable;
    if (r.label == 0) ++labeled_unstable;
  }
  if (labeled_stable == 0 || labeled_unstable == 0)
    fail("data", "labeling needs prelabeled samples of both classes");

  const std::size_t unlabeled =
    n - static_cast<std::size_t>(labeled_stable + labeled_unstable);

  nlohmann::json report;
  report["samples"] = n;
  report["prelabeled_stable"] = labeled_stable;
  report["prelabeled_unstable"] = labeled_unstable;
  report["unlabeled"] = unlabeled;

  std::vector<int> final_labels = known;
  if (unlabeled == 0) {
    const double sc = cluster::silhouette(features, known);
    report["sfcm_silhouette"] = sc;
    report["cop_kmeans_silhouette"] = sc;
    report["note"] = "no unlabeled samples; silhouette computed on prelabels";
  } else {
    cluster::SfcmOptions sfcm_opts;
    sfcm_opts.clusters = cfg.labeling.clusters;
    sfcm_opts.alpha = cfg.labeling.alpha;
    sfcm_opts.tol = cfg.labeling.tol;
    sfcm_opts.max_iter = cfg.labeling.max_iter;
    sfcm_opts.seed = num::mix_seed(cfg.seed, 0x5F);
    cluster::SfcmResult sfcm = cluster::sfcm_fit(features, known, sfcm_opts);
    final_labels = cluster::resolve_labels(sfcm.assignment, known);

    cluster::CopKmeansOptions cop_opts;
    cop_opts.clusters = cfg.labeling.clusters;
    cop_opts.seed = num::mix_seed(cfg.seed, 0xC0);
    cluster::ClusterAssignment cop =
      cluster::cop_kmeans_fit(features, known, cop_opts);

    // One shared distance matrix serves both silhouettes.
    num::DenseArray dist({n, n});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < fdim; ++k) {
          const double d = features.at(i, k) - features.at(j, k);
          s += d * d;
        }
        dist.at(i, j) = dist.at(j, i) = std::sqrt(s);
      }
    const double sfcm_sc =
      cluster::silhouette_from_distances(dist, sfcm.assignment.hard_labels);
    report["sfcm_silhouette"] = sfcm_sc;
    report["sfcm_iterations"] = sfcm.assignment.iterations;
    report["sfcm_objective"] = sfcm.assignment.objective;
    if (cop.feasible) {
      report["cop_kmeans_silhouette"] =
        cluster::silhouette_from_distances(dist, cop.hard_labels);
    } else {
      report["cop_kmeans_silhouette"] = nullptr;
      report["cop_kmeans_infeasible"] = true;
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    windows.records[i].label = final_labels[i];

  data::Partition part = data::stratified_split(
    windows, cfg.labeling.split_train, cfg.labeling.split_test,
    num::mix_seed(cfg.seed, 0x377));

  data::write_windows_csv(cfg.resolve(cfg.paths.labeled), windows);
  data::write_partition_csv(cfg.resolve(cfg.paths.partition), part);
  open_out(cfg.resolve(cfg.paths.sc_report)) << report.dump(2) << '\n';

  std::cout << "labeled " << unlabeled << " ambiguous samples; split "
            << part.train_ids.size() << " train / " << part.test_ids.size()
            << " test\n";
}

// -------------------------------------------------------------- augment ----

void cmd_augment(const PipelineConfig &cfg) {
  ensure_out_dir(cfg);
  LoadedDataset ds = load_dataset(cfg.resolve(cfg.paths.labeled),
                                  cfg.resolve(cfg.paths.partition));
  for (const data::WindowRecord &r : ds.windows.records)
    if (r.label < 0)
      fail("data", "dataset still has unlabeled samples; run label first");

  auto [x_train, y_train] = matrix_for(ds, ds.partition.train_ids);
  auto [x_test, y_test] = matrix_for(ds, ds.partition.test_ids);
  (void)y_test;

  const num::GanLossMode mode =
    num::gan_loss_mode_from_string(cfg.augment.loss_mode);
  const std::string suffix = mode_suffix(cfg.augment.loss_mode);
  if (cfg.augment.seeds.empty()) fail("config", "augment needs at least one seed");

  std::vector<gan::GenerativeModel> models;
  std::ofstream fidelity_csv =
    open_out(cfg.resolve(with_suffix(cfg.paths.fidelity, suffix)));
  fidelity_csv << "seed,iteration,wd,mmd,fid\n";
  nlohmann::json per_seed = nlohmann::json::array();
  double mean_wd = 0, mean_mmd = 0, mean_fid = 0;

  for (std::uint64_t seed : cfg.augment.seeds) {
    gan::GanTrainConfig gc;
    gc.learning_rate = cfg.augment.learning_rate;
    gc.beta1 = cfg.augment.beta1;
    gc.disc_steps = cfg.augment.disc_steps;
    gc.batch_size = cfg.augment.batch_size;
    gc.iterations = cfg.augment.iterations;
    gc.snapshot_every = cfg.augment.snapshot_every;
    gc.snapshot_samples = cfg.augment.snapshot_samples;
    gc.seed = num::mix_seed(cfg.seed, seed);
    gan::GenerativeModel m =
      gan::train_gan(x_train, y_train, x_test, gc, mode,
                     cfg.augment.noise_dim, cfg.augment.gen_hidden,
                     cfg.augment.disc_hidden);
    for (const gan::FidelitySnapshot &s : m.snapshots())
      fidelity_csv << seed << ',' << s.iteration << ',' << s.wd << ','
                   << s.mmd << ',' << s.fid << '\n';
    const gan::FidelitySnapshot &last = m.snapshots().back();
    per_seed.push_back({{"seed", seed},
                        {"wd", last.wd},
                        {"mmd", last.mmd},
                        {"fid", last.fid}});
    mean_wd += last.wd;
    mean_mmd += last.mmd;
    mean_fid += last.fid;
    models.push_back(std::move(m));
  }
  const double k = static_cast<double>(cfg.augment.seeds.size());
  nlohmann::json report;
  report["loss_mode"] = cfg.augment.loss_mode;
  report["runs"] = per_seed;
  report["mean"] = {{"wd", mean_wd / k},
                    {"mmd", mean_mmd / k},
                    {"fid", mean_fid / k}};
  open_out(cfg.resolve(with_suffix(cfg.paths.fidelity_report, suffix)))
    << report.dump(2) << '\n';

  // The first seed's model produces the inflated dataset.
  gan::AugmentResult aug =
    gan::augment(ds.windows, ds.partition, models.front(), ds.bounds,
                 cfg.augment.target_total, num::mix_seed(cfg.seed, 0xA06));
  data::write_windows_csv(cfg.resolve(with_suffix(cfg.paths.final_windows,
                                                  suffix)),
                          aug.dataset);
  data::write_partition_csv(cfg.resolve(with_suffix(cfg.paths.final_partition,
                                                    suffix)),
                            aug.partition);
  gan::save_gan(cfg.resolve(with_suffix(cfg.paths.gan_checkpoint, suffix)),
                models.front());

  std::cout << "augment (" << cfg.augment.loss_mode << "): " << k
            << " run(s); mean wd " << mean_wd / k << ", mmd " << mean_mmd / k
            << ", fid " << mean_fid / k << "; final dataset "
            << aug.dataset.size() << " samples (" << aug.generated_count
            << " generated)\n";
}

// ---------------------------------------------------------------- train ----

namespace {

LoadedDataset load_train_dataset(const PipelineConfig &cfg) {
  if (cfg.classifier.train_on == "final")
    return load_dataset(cfg.resolve(cfg.paths.final_windows),
                        cfg.resolve(cfg.paths.final_partition));
  if (cfg.classifier.train_on == "labeled")
    return load_dataset(cfg.resolve(cfg.paths.labeled),
                        cfg.resolve(cfg.paths.partition));
  fail("config", "train_on must be 'final' or 'labeled', got '" +
                   cfg.classifier.train_on + "'");
}

} // namespace

void cmd_train(const PipelineConfig &cfg) {
  ensure_out_dir(cfg);
  LoadedDataset ds = load_train_dataset(cfg);
  purity_guard(ds);

  auto [x_train, y_train] = matrix_for(ds, ds.partition.train_ids);
  auto [x_test, y_test] = matrix_for(ds, ds.partition.test_ids);

  model::SequenceClassifier clf =
    build_classifier(cfg, ds.windows.q, ds.windows.feature_dim, 0x7121);
  clf.bounds() = ds.bounds;

  model::TrainResult result =
    model::train_classifier(clf, x_train, y_train, x_test, y_test);

  std::ofstream curves = open_out(cfg.resolve(cfg.paths.curves));
  curves << "epoch,train_loss,train_accuracy,test_accuracy\n";
  char buf[160];
  for (const model::EpochStats &e : result.curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g\n", e.epoch,
                  e.train_loss, e.train_accuracy, e.test_accuracy);
    curves << buf;
  }

  model::save_classifier(cfg.resolve(cfg.paths.model_checkpoint), clf);

  const model::EpochStats &last = result.curve.back();
  std::cout << "trained " << cfg.classifier.variant << " for "
            << result.curve.size() << " epochs; final train accuracy "
            << last.train_accuracy << ", test accuracy " << last.test_accuracy
            << "\n";
}

// ----------------------------------------------------------------- eval ----

void cmd_eval(const PipelineConfig &cfg, const std::string &counts_fixture) {
  ensure_out_dir(cfg);

  if (!counts_fixture.empty()) {
    std::ifstream f(counts_fixture);
    if (!f) fail("io", "cannot open counts fixture '" + counts_fixture + "'");
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception &e) {
      fail("format", std::string("bad counts fixture: ") + e.what());
    }
    eval::EvalReport report;
    report.counts.tp = j.at("tp").get<long>();
    report.counts.fn = j.at("fn").get<long>();
    report.counts.fp = j.at("fp").get<long>();
    report.counts.tn = j.at("tn").get<long>();
    report.metrics = eval::scalar_metrics(report.counts);
    report.evaluated = static_cast<std::size_t>(report.counts.total());
    open_out(cfg.resolve(cfg.paths.eval_report))
      << eval::report_to_json(report) << '\n';
    std::cout << "eval (fixture): accuracy " << report.metrics.accuracy
              << ", f1 " << report.metrics.f1 << ", mcc "
              << report.metrics.mcc << "\n";
    return;
  }

  model::SequenceClassifier clf =
    model::load_classifier(cfg.resolve(cfg.paths.model_checkpoint));
  LoadedDataset ds = load_train_dataset(cfg);
  purity_guard(ds);
  if (ds.windows.q != clf.steps() ||
      ds.windows.feature_dim != clf.features_per_step())
    fail("shape", "checkpoint window shape [" + std::to_string(clf.steps()) +
                    ", " + std::to_string(clf.features_per_step()) +
                    "] does not match dataset [" +
                    std::to_string(ds.windows.q) + ", " +
                    std::to_string(ds.windows.feature_dim) + "]");

  // Test features normalized through the bounds stored with the model.
  const std::size_t d = static_cast<std::size_t>(ds.windows.flat_dim());
  const std::vector<long> &ids = ds.partition.test_ids;
  num::DenseArray x({ids.size(), d});
  std::vector<int> truth(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const data::WindowRecord *r = ds.by_id.at(ids[i]);
    std::vector<double> nrm = data::normalize(r->features, clf.bounds());
    std::copy(nrm.begin(), nrm.end(), &x.values[i * d]);
    truth[i] = r->label;
  }

  std::vector<double> scores = model::stable_scores(clf, x);
  std::vector<int> predicted(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    predicted[i] = scores[i] > 0.5 ? 1 : 0;

  eval::EvalReport report;
  report.counts = eval::confusion_matrix(truth, predicted);
  report.metrics = eval::scalar_metrics(report.counts);
  report.roc = eval::roc_auc(scores, truth);
  report.evaluated = truth.size();

  // Latency measured on single-window assessments.
  const std::size_t latency_n = std::min<std::size_t>(
    ids.size(), static_cast<std::size_t>(cfg.evaluation.latency_samples));
  double latency_sum = 0.0;
  for (std::size_t i = 0; i < latency_n; ++i) {
    const data::WindowRecord *r = ds.by_id.at(ids[i]);
    num::DenseArray w({static_cast<std::size_t>(ds.windows.q),
                       static_cast<std::size_t>(ds.windows.feature_dim)},
                      std::vector<double>(r->features));
    latency_sum += model::assess(clf, w).latency_ms;
  }
  report.mean_latency_ms =
    latency_n > 0 ? latency_sum / static_cast<double>(latency_n) : 0.0;

  open_out(cfg.resolve(cfg.paths.eval_report))
    << eval::report_to_json(report) << '\n';
  eval::write_roc_csv(cfg.resolve(cfg.paths.roc), *report.roc);

  std::cout << "eval: accuracy " << report.metrics.accuracy << ", f1 "
            << report.metrics.f1 << ", mcc " << report.metrics.mcc << ", auc "
            << report.roc->auc << ", misdetection "
            << report.metrics.misdetection_rate << ", false alarm "
            << report.metrics.false_alarm_rate << ", mean latency "
            << report.mean_latency_ms << " ms\n";
}

// ------------------------------------------------------------ otw sweep ----

void cmd_sweep_otw(const PipelineConfig &cfg) {
  ensure_out_dir(cfg);
  std::vector<data::TrajectorySample> trajectories =
    data::read_trajectories_csv(cfg.resolve(cfg.paths.trajectories));
  LoadedDataset base = load_dataset(cfg.resolve(cfg.paths.labeled),
                                    cfg.resolve(cfg.paths.partition));

  std::map<long, const data::TrajectorySample *> traj_by_id;
  for (const data::TrajectorySample &t : trajectories)
    traj_by_id[t.sample_id] = &t;

  std::ofstream csv = open_out(cfg.resolve(cfg.paths.otw));
  csv << "otw_ms,steps,test_accuracy\n";

  for (double otw_ms : cfg.evaluation.otw_ms) {
    const double seconds = otw_ms / 1000.0;
    data::WindowSet set;
    set.feature_dim = 3 * trajectories.front().bus_count;
    set.q = static_cast<int>(std::lround(seconds / trajectories.front().dt));
    bool skipped = false;
    for (const data::WindowRecord &r : base.windows.records) {
      const data::TrajectorySample *t = traj_by_id.at(r.sample_id);
      if (t->clear_step + set.q > t->horizon) {
        std::cerr << "warning: otw " << otw_ms
                  << " ms exceeds the horizon, skipped\n";
        skipped = true;
        break;
      }
      num::DenseArray w = data::extract_window(*t, seconds);
      data::WindowRecord rec = r;
      rec.features = w.values;
      set.records.push_back(std::move(rec));
    }
    if (skipped) continue;

    LoadedDataset ds;
    ds.windows = std::move(set);
    ds.partition = base.partition;
    for (const data::WindowRecord &r : ds.windows.records)
      ds.by_id[r.sample_id] = &r;
    ds.bounds = data::compute_bounds(ds.windows, ds.partition.train_ids);

    auto [x_train, y_train] = matrix_for(ds, ds.partition.train_ids);
    auto [x_test, y_test] = matrix_for(ds, ds.partition.test_ids);

    model::SequenceClassifier clf = build_classifier(
      cfg, ds.windows.q, ds.windows.feature_dim,
      0x800 + static_cast<std::uint64_t>(otw_ms), cfg.evaluation.otw_epochs);
    clf.bounds() = ds.bounds;
    model::train_classifier(clf, x_train, y_train, {}, {});
    const double acc = model::accuracy_on(clf, x_test, y_test);

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g,%d,%.10g\n", otw_ms, ds.windows.q, acc);
    csv << buf;
    std::cout << "otw " << otw_ms << " ms (q=" << ds.windows.q
              << "): test accuracy " << acc << "\n";
  }
}

// ---------------------------------------------------------------- noise ----

void cmd_noise(const PipelineConfig &cfg) {
  ensure_out_dir(cfg);
  model::SequenceClassifier clf =
    model::load_classifier(cfg.resolve(cfg.paths.model_checkpoint));
  std::vector<data::TrajectorySample> trajectories =
    data::read_trajectories_csv(cfg.resolve(cfg.paths.trajectories));
  LoadedDataset base = load_dataset(cfg.resolve(cfg.paths.labeled),
                                    cfg.resolve(cfg.paths.partition));
  purity_guard(base);

  std::map<long, const data::TrajectorySample *> traj_by_id;
  for (const data::TrajectorySample &t : trajectories)
    traj_by_id[t.sample_id] = &t;

  const double window_seconds = clf.steps() * trajectories.front().dt;
  const std::size_t d =
    static_cast<std::size_t>(clf.steps() * clf.features_per_step());

  std::ofstream csv = open_out(cfg.resolve(cfg.paths.noise));
  csv << "snr_db,accuracy,mcc,f1,auc\n";

  int snr_index = 0;
  for (double snr : cfg.evaluation.snr_db) {
    const std::vector<long> &ids = base.partition.test_ids;
    num::DenseArray x({ids.size(), d});
    std::vector<int> truth(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const data::TrajectorySample *t = traj_by_id.at(ids[i]);
      data::TrajectorySample noisy = data::add_noise(
        *t, snr,
        num::mix_seed(cfg.seed, 0xF00 + 1000 * snr_index +
                                  static_cast<std::uint64_t>(ids[i])));
      num::DenseArray w = data::extract_window(noisy, window_seconds);
      std::vector<double> nrm = data::normalize(w.values, clf.bounds());
      std::copy(nrm.begin(), nrm.end(), &x.values[i * d]);
      truth[i] = base.by_id.at(ids[i])->label;
    }
    std::vector<double> scores = model::stable_scores(clf, x);
    std::vector<int> predicted(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
      predicted[i] = scores[i] > 0.5 ? 1 : 0;
    eval::ConfusionCounts counts = eval::confusion_matrix(truth, predicted);
    eval::ScalarMetrics m = eval::scalar_metrics(counts);
    eval::RocResult roc = eval::roc_auc(scores, truth);

    char buf[128];
    std::snprintf(buf, sizeof(buf), "%g,%.10g,%.10g,%.10g,%.10g\n", snr,
                  m.accuracy, m.mcc, m.f1, roc.auc);
    csv << buf;
    std::cout << "snr " << snr << " dB: accuracy " << m.accuracy << ", mcc "
              << m.mcc << ", f1 " << m.f1 << ", auc " << roc.auc << "\n";
    ++snr_index;
  }
}

// --------------------------------------------------------------- assess ----

void cmd_assess(const PipelineConfig &cfg, const std::string &window_path) {
  model::SequenceClassifier clf =
    model::load_classifier(cfg.resolve(cfg.paths.model_checkpoint));

  std::ifstream f(window_path);
  if (!f) fail("io", "cannot open window file '" + window_path + "'");
  const std::size_t q = static_cast<std::size_t>(clf.steps());
  const std::size_t m = static_cast<std::size_t>(clf.features_per_step());
  num::DenseArray window({q, m});
  std::string line;
  std::size_t row = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (row >= q)
      fail("format", window_path + ": expected " + std::to_string(q) +
                       " rows, found more");
    std::size_t col = 0, start = 0;
    while (start <= line.size()) {
      std::size_t pos = line.find(',', start);
      const std::string tok = pos == std::string::npos
                                ? line.substr(start)
                                : line.substr(start, pos - start);
      if (col >= m)
        fail("format", window_path + ": row " + std::to_string(row) + " has " +
                         std::to_string(col + 1) + "+ columns, expected " +
                         std::to_string(m));
      try {
        window.at(row, col) = std::stod(tok);
      } catch (const std::exception &) {
        fail("format", window_path + ": row " + std::to_string(row) +
                         ", column " + std::to_string(col) +
                         ": cannot parse '" + tok + "'");
      }
      ++col;
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (col != m)
      fail("format", window_path + ": row " + std::to_string(row) + " has " +
                       std::to_string(col) + " columns, expected " +
                       std::to_string(m));
    ++row;
  }
  if (row != q)
    fail("format", window_path + ": expected " + std::to_string(q) +
                     " rows, found " + std::to_string(row));

  model::Assessment a = model::assess(clf, window);
  std::printf("verdict: %s\n", a.verdict == 1 ? "stable" : "unstable");
  std::printf("probability_stable: %.6f\n", a.probability_stable);
  std::printf("probability_unstable: %.6f\n", 1.0 - a.probability_stable);
  std::printf("latency_ms: %.4f\n", a.latency_ms);
}

} // namespace stvsa::pipeline
