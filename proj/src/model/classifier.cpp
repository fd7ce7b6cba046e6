#include "stvsa/model/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "stvsa/io/checkpoint.hpp"
#include "stvsa/model/cells.hpp"
#include "stvsa/numerics/adam.hpp"
#include "stvsa/numerics/init.hpp"

namespace stvsa::model {

// ---------------------------------------------------------------- cells ----

void create_gru_params(num::ParameterStore &store, const std::string &prefix,
                       const RnnDims &dims, num::Rng &rng) {
  const std::size_t m = static_cast<std::size_t>(dims.input);
  const std::size_t h = static_cast<std::size_t>(dims.hidden);
  for (const char *gate : {"r", "z", "h"}) {
    num::DenseArray &w = store.create(prefix + ".W" + gate, {m, h});
    num::glorot_uniform(w, rng);
    num::DenseArray &u = store.create(prefix + ".U" + gate, {h, h});
    num::glorot_uniform(u, rng);
    store.create(prefix + ".b" + gate, {h});
  }
}

namespace {

int gate_preact(num::Graph &g, const std::string &prefix, const char *gate,
                const RnnDims &dims, int x_t, int h_prev) {
  const std::size_t m = static_cast<std::size_t>(dims.input);
  const std::size_t h = static_cast<std::size_t>(dims.hidden);
  int w = g.param(prefix + ".W" + gate, {m, h});
  int u = g.param(prefix + ".U" + gate, {h, h});
  int b = g.param(prefix + ".b" + gate, {h});
  return g.add_row(g.add(g.matmul(x_t, w), g.matmul(h_prev, u)), b);
}

} // namespace

int gru_step(num::Graph &g, const std::string &prefix, const RnnDims &dims,
             int x_t, int h_prev) {
  const std::size_t m = static_cast<std::size_t>(dims.input);
  const std::size_t h = static_cast<std::size_t>(dims.hidden);
  int r = g.sigmoid(gate_preact(g, prefix, "r", dims, x_t, h_prev));
  int z = g.sigmoid(gate_preact(g, prefix, "z", dims, x_t, h_prev));
  int wh = g.param(prefix + ".Wh", {m, h});
  int uh = g.param(prefix + ".Uh", {h, h});
  int bh = g.param(prefix + ".bh", {h});
  int cand = g.tanh(g.add_row(
    g.add(g.matmul(x_t, wh), g.mul(r, g.matmul(h_prev, uh))), bh));
  int keep = g.mul(g.scalar_affine(z, -1.0, 1.0), h_prev);
  return g.add(keep, g.mul(z, cand));
}

void create_lstm_params(num::ParameterStore &store, const std::string &prefix,
                        const RnnDims &dims, num::Rng &rng) {
  const std::size_t m = static_cast<std::size_t>(dims.input);
  const std::size_t h = static_cast<std::size_t>(dims.hidden);
  for (const char *gate : {"i", "f", "o", "g"}) {
    num::DenseArray &w = store.create(prefix + ".W" + gate, {m, h});
    num::glorot_uniform(w, rng);
    num::DenseArray &u = store.create(prefix + ".U" + gate, {h, h});
    num::glorot_uniform(u, rng);
    store.create(prefix + ".b" + gate, {h});
  }
}

std::pair<int, int> lstm_step(num::Graph &g, const std::string &prefix,
                              const RnnDims &dims, int x_t, int h_prev,
                              int c_prev) {
  int i = g.sigmoid(gate_preact(g, prefix, "i", dims, x_t, h_prev));
  int f = g.sigmoid(gate_preact(g, prefix, "f", dims, x_t, h_prev));
  int o = g.sigmoid(gate_preact(g, prefix, "o", dims, x_t, h_prev));
  int cand = g.tanh(gate_preact(g, prefix, "g", dims, x_t, h_prev));
  int c = g.add(g.mul(f, c_prev), g.mul(i, cand));
  int h = g.mul(o, g.tanh(c));
  return {h, c};
}

// ----------------------------------------------------------- classifier ----

Variant variant_from_string(const std::string &s) {
  if (s == "bigru-attention") return Variant::kBiGruAttention;
  if (s == "gru") return Variant::kGru;
  if (s == "lstm") return Variant::kLstm;
  fail("config", "unknown classifier variant '" + s + "'");
}

std::string to_string(Variant v) {
  switch (v) {
  case Variant::kBiGruAttention: return "bigru-attention";
  case Variant::kGru: return "gru";
  case Variant::kLstm: return "lstm";
  }
  return "?";
}

SequenceClassifier::SequenceClassifier(Variant variant, int steps,
                                       int features_per_step,
                                       const ClassifierConfig &config,
                                       std::uint64_t init_seed)
  : variant_(variant), steps_(steps), features_per_step_(features_per_step),
    config_(config) {
  if (steps_ < 1 || features_per_step_ < 1)
    fail("config", "classifier needs at least one step and one feature");
  if (config_.hidden < 1 || config_.attention_size < 1)
    fail("config", "hidden and attention sizes must be positive");

  num::Rng rng(init_seed);
  const RnnDims dims{features_per_step_, config_.hidden};
  const std::size_t h = static_cast<std::size_t>(config_.hidden);
  const std::size_t a = static_cast<std::size_t>(config_.attention_size);

  switch (variant_) {
  case Variant::kBiGruAttention: {
    create_gru_params(params_, "fwd", dims, rng);
    create_gru_params(params_, "bwd", dims, rng);
    num::DenseArray &watt = params_.create("att.w", {2 * h, a});
    num::glorot_uniform(watt, rng);
    params_.create("att.b", {a});
    num::DenseArray &uatt = params_.create("att.u", {a, 1});
    num::normal_fill(uatt, rng, 1.0 / std::sqrt(static_cast<double>(a)));
    num::DenseArray &wo = params_.create("out.w", {2 * h, 2});
    num::glorot_uniform(wo, rng);
    params_.create("out.b", {2});
    break;
  }
  case Variant::kGru: {
    create_gru_params(params_, "fwd", dims, rng);
    num::DenseArray &wo = params_.create("out.w", {h, 2});
    num::glorot_uniform(wo, rng);
    params_.create("out.b", {2});
    break;
  }
  case Variant::kLstm: {
    create_lstm_params(params_, "fwd", dims, rng);
    num::DenseArray &wo = params_.create("out.w", {h, 2});
    num::glorot_uniform(wo, rng);
    params_.create("out.b", {2});
    break;
  }
  }
}

SequenceClassifier::BatchGraph &SequenceClassifier::graph_for(int batch) const {
  auto it = graphs_.find(batch);
  if (it != graphs_.end()) return *it->second;

  auto bg = std::make_unique<BatchGraph>();
  num::Graph &g = bg->graph;
  const std::size_t b = static_cast<std::size_t>(batch);
  const std::size_t m = static_cast<std::size_t>(features_per_step_);
  const std::size_t h = static_cast<std::size_t>(config_.hidden);
  const int q = steps_;
  const RnnDims dims{features_per_step_, config_.hidden};

  int x = g.input("x", {b, static_cast<std::size_t>(q) * m});
  int target = g.input("target", {b, 2});

  std::vector<int> x_steps(q);
  for (int t = 0; t < q; ++t)
    x_steps[t] = g.slice_cols(x, static_cast<std::size_t>(t) * m, m);

  int pooled = -1;
  if (variant_ == Variant::kBiGruAttention) {
    std::vector<int> h_fwd(q), h_bwd(q);
    int hf = g.constant(num::DenseArray({b, h}));
    for (int t = 0; t < q; ++t)
      h_fwd[t] = hf = gru_step(g, "fwd", dims, x_steps[t], hf);
    int hb = g.constant(num::DenseArray({b, h}));
    for (int t = q - 1; t >= 0; --t)
      h_bwd[t] = hb = gru_step(g, "bwd", dims, x_steps[t], hb);

    std::vector<int> h_cat(q);
    for (int t = 0; t < q; ++t)
      h_cat[t] = g.dropout(g.concat_cols(h_fwd[t], h_bwd[t]), config_.dropout);

    const std::size_t a = static_cast<std::size_t>(config_.attention_size);
    int watt = g.param("att.w", {2 * h, a});
    int batt = g.param("att.b", {a});
    int uatt = g.param("att.u", {a, 1});
    int logits = -1;
    for (int t = 0; t < q; ++t) {
      int u = g.tanh(g.add_row(g.matmul(h_cat[t], watt), batt));
      int score = g.matmul(u, uatt); // [b, 1]
      logits = t == 0 ? score : g.concat_cols(logits, score);
    }
    int alpha = g.softmax_rows(logits);
    bg->attention = alpha;
    for (int t = 0; t < q; ++t) {
      int weighted = g.scale_rows(
        h_cat[t], g.slice_cols(alpha, static_cast<std::size_t>(t), 1));
      pooled = t == 0 ? weighted : g.add(pooled, weighted);
    }
  } else {
    std::vector<int> h_seq(q);
    if (variant_ == Variant::kGru) {
      int hf = g.constant(num::DenseArray({b, h}));
      for (int t = 0; t < q; ++t)
        h_seq[t] = hf = gru_step(g, "fwd", dims, x_steps[t], hf);
    } else {
      int hf = g.constant(num::DenseArray({b, h}));
      int cf = g.constant(num::DenseArray({b, h}));
      for (int t = 0; t < q; ++t) {
        auto [hn, cn] = lstm_step(g, "fwd", dims, x_steps[t], hf, cf);
        h_seq[t] = hn;
        hf = hn;
        cf = cn;
      }
    }
    for (int t = 0; t < q; ++t) {
      int hd = g.dropout(h_seq[t], config_.dropout);
      pooled = t == 0 ? hd : g.add(pooled, hd);
    }
    pooled = g.scalar_affine(pooled, 1.0 / static_cast<double>(q), 0.0);
    bg->attention = g.constant(
      num::DenseArray::full({b, static_cast<std::size_t>(q)},
                            1.0 / static_cast<double>(q)));
  }

  pooled = g.dropout(pooled, config_.dropout);
  const std::size_t out_in = variant_ == Variant::kBiGruAttention ? 2 * h : h;
  int wo = g.param("out.w", {out_in, 2});
  int bo = g.param("out.b", {2});
  int probs = g.softmax_rows(g.add_row(g.matmul(pooled, wo), bo));
  bg->probs = probs;

  int diff = g.sub(probs, target);
  bg->loss = g.scalar_affine(g.sum_all(g.mul(diff, diff)),
                             1.0 / static_cast<double>(batch), 0.0);
  g.mark_output("probs", probs);
  g.mark_output("attention", bg->attention);
  g.mark_output("loss", bg->loss);

  return *graphs_.emplace(batch, std::move(bg)).first->second;
}

namespace {

num::DenseArray dummy_targets(std::size_t batch) {
  num::DenseArray t({batch, 2});
  for (std::size_t i = 0; i < batch; ++i) t.at(i, 0) = 1.0;
  return t;
}

} // namespace

num::DenseArray SequenceClassifier::predict(const num::DenseArray &x,
                                            bool train_mode,
                                            std::uint64_t dropout_seed) const {
  if (x.rank() != 2 ||
      x.shape[1] != static_cast<std::size_t>(steps_ * features_per_step_))
    fail("shape", "classifier input must be [batch, q*m], got " +
                    num::shape_str(x.shape));
  if (x.shape[0] == 0) fail("data", "empty batch");
  std::lock_guard<std::mutex> lock(*eval_mutex_);
  BatchGraph &bg = graph_for(static_cast<int>(x.shape[0]));
  num::EvalOptions opts;
  opts.train_mode = train_mode;
  opts.dropout_seed = dropout_seed;
  auto out = bg.graph.evaluate(params_,
                               {{"x", x}, {"target", dummy_targets(x.shape[0])}},
                               opts);
  return out.at("probs");
}

num::DenseArray
SequenceClassifier::attention_weights(const num::DenseArray &x) const {
  std::lock_guard<std::mutex> lock(*eval_mutex_);
  BatchGraph &bg = graph_for(static_cast<int>(x.shape[0]));
  auto out = bg.graph.evaluate(params_,
                               {{"x", x}, {"target", dummy_targets(x.shape[0])}});
  return out.at("attention");
}

std::pair<double, num::DenseArray> SequenceClassifier::train_step(
  const num::DenseArray &x, const num::DenseArray &targets,
  std::uint64_t dropout_seed, std::map<std::string, num::DenseArray> &gradients) {
  BatchGraph &bg = graph_for(static_cast<int>(x.shape[0]));
  num::EvalOptions opts;
  opts.train_mode = true;
  opts.dropout_seed = dropout_seed;
  auto out = bg.graph.evaluate(params_, {{"x", x}, {"target", targets}}, opts);
  bg.graph.backward(bg.loss);
  gradients = bg.graph.parameter_gradients();
  return {out.at("loss").values[0], out.at("probs")};
}

// ------------------------------------------------------------- training ----

namespace {

num::DenseArray gather_rows(const num::DenseArray &x,
                            const std::vector<std::size_t> &rows) {
  num::DenseArray out({rows.size(), x.shape[1]});
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy_n(&x.values[rows[i] * x.shape[1]], x.shape[1],
                &out.values[i * x.shape[1]]);
  return out;
}

} // namespace

TrainResult train_classifier(SequenceClassifier &model,
                             const num::DenseArray &x_train,
                             const std::vector<int> &y_train,
                             const num::DenseArray &x_test,
                             const std::vector<int> &y_test) {
  const std::size_t n = x_train.shape[0];
  if (y_train.size() != n)
    fail("shape", "training label count does not match sample count");
  for (int y : y_train)
    if (y != 0 && y != 1)
      fail("data", "unlabeled sample in the training set");

  const ClassifierConfig &cfg = model.config();
  num::AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  std::vector<std::string> names = model.params().names();
  num::AdamOptimizer opt(adam_cfg, names);

  TrainResult result;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    num::Rng rng(num::mix_seed(cfg.seed, 0xE000 + epoch));
    rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::map<std::string, num::DenseArray> grads;
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
        std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<std::size_t> rows(order.begin() + start,
                                    order.begin() + stop);
      num::DenseArray xb = gather_rows(x_train, rows);
      num::DenseArray tb({rows.size(), 2});
      for (std::size_t i = 0; i < rows.size(); ++i)
        tb.at(i, static_cast<std::size_t>(y_train[rows[i]])) = 1.0;

      auto [loss, probs] = model.train_step(
        xb, tb, num::mix_seed(cfg.seed, 0xD000 + epoch * 100003 + start),
        grads);
      opt.update(model.params(), grads);

      loss_sum += loss * static_cast<double>(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const int pred = probs.at(i, 1) > probs.at(i, 0) ? 1 : 0;
        if (pred == y_train[rows[i]]) ++correct;
      }
    }

    EpochStats stats;
    stats.epoch = epoch + 1;
    stats.train_loss = loss_sum / static_cast<double>(n);
    stats.train_accuracy = static_cast<double>(correct) / n;
    stats.test_accuracy = x_test.shape.empty() || x_test.shape[0] == 0
                            ? std::numeric_limits<double>::quiet_NaN()
                            : accuracy_on(model, x_test, y_test);
    result.curve.push_back(stats);

    if (cfg.early_exit && stats.train_loss < cfg.early_exit_loss) break;
  }
  return result;
}

std::vector<double> stable_scores(const SequenceClassifier &model,
                                  const num::DenseArray &x) {
  std::vector<double> scores;
  const std::size_t n = x.shape[0];
  const std::size_t chunk = 256;
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t stop = std::min(n, start + chunk);
    num::DenseArray xb({stop - start, x.shape[1]});
    std::copy_n(&x.values[start * x.shape[1]], (stop - start) * x.shape[1],
                xb.values.begin());
    num::DenseArray probs = model.predict(xb);
    for (std::size_t i = 0; i < stop - start; ++i)
      scores.push_back(probs.at(i, 1));
  }
  return scores;
}

double accuracy_on(const SequenceClassifier &model, const num::DenseArray &x,
                   const std::vector<int> &y) {
  if (y.size() != x.shape[0])
    fail("shape", "accuracy labels do not match sample count");
  if (y.empty()) fail("data", "empty evaluation set");
  std::vector<double> scores = stable_scores(model, x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const int pred = scores[i] > 0.5 ? 1 : 0;
    if (pred == y[i]) ++correct;
  }
  return static_cast<double>(correct) / y.size();
}

void save_classifier(const std::string &path,
                     const SequenceClassifier &model) {
  io::Checkpoint ckpt;
  ckpt.meta["kind"] = "classifier";
  ckpt.meta["variant"] = to_string(model.variant());
  ckpt.meta["steps"] = std::to_string(model.steps());
  ckpt.meta["features_per_step"] = std::to_string(model.features_per_step());
  ckpt.meta["hidden"] = std::to_string(model.config().hidden);
  ckpt.meta["attention_size"] = std::to_string(model.config().attention_size);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", model.config().dropout);
  ckpt.meta["dropout"] = buf;
  for (const std::string &name : model.params().names())
    ckpt.params.create(name, model.params().at(name).shape).values =
      model.params().at(name).values;
  if (!model.bounds().min.empty()) {
    ckpt.params.create("norm.min", {model.bounds().min.size()}).values =
      model.bounds().min;
    ckpt.params.create("norm.max", {model.bounds().max.size()}).values =
      model.bounds().max;
  }
  io::save_checkpoint(path, ckpt);
}

SequenceClassifier load_classifier(const std::string &path) {
  io::Checkpoint ckpt = io::load_checkpoint(path);
  auto meta = [&](const char *key) -> const std::string & {
    auto it = ckpt.meta.find(key);
    if (it == ckpt.meta.end())
      fail("format", path + ": checkpoint missing meta key '" +
                       std::string(key) + "'");
    return it->second;
  };
  if (meta("kind") != "classifier")
    fail("format", path + ": not a classifier checkpoint");

  ClassifierConfig cfg;
  cfg.hidden = std::stoi(meta("hidden"));
  cfg.attention_size = std::stoi(meta("attention_size"));
  cfg.dropout = std::stod(meta("dropout"));
  SequenceClassifier model(variant_from_string(meta("variant")),
                           std::stoi(meta("steps")),
                           std::stoi(meta("features_per_step")), cfg, 0);
  for (const std::string &name : model.params().names()) {
    if (!ckpt.params.contains(name))
      fail("format", path + ": checkpoint missing parameter '" + name + "'");
    const num::DenseArray &src = ckpt.params.at(name);
    num::DenseArray &dst = model.params().at(name);
    if (!src.same_shape(dst))
      fail("format", path + ": parameter '" + name + "' has shape " +
                       num::shape_str(src.shape) + ", expected " +
                       num::shape_str(dst.shape));
    dst.values = src.values;
  }
  if (ckpt.params.contains("norm.min")) {
    model.bounds().min = ckpt.params.at("norm.min").values;
    model.bounds().max = ckpt.params.at("norm.max").values;
  }
  return model;
}

Assessment assess(const SequenceClassifier &model,
                  const num::DenseArray &window) {
  if (window.rank() != 2 ||
      window.shape[0] != static_cast<std::size_t>(model.steps()) ||
      window.shape[1] != static_cast<std::size_t>(model.features_per_step()))
    fail("shape", "assess window must be [" + std::to_string(model.steps()) +
                    ", " + std::to_string(model.features_per_step()) +
                    "], got " + num::shape_str(window.shape));
  if (model.bounds().min.size() != window.numel())
    fail("config", "model carries no normalization bounds for this window size");

  const auto start = std::chrono::steady_clock::now();
  std::vector<double> normalized = data::normalize(window.values, model.bounds());
  num::DenseArray x({1, window.numel()}, std::move(normalized));
  num::DenseArray probs = model.predict(x);
  const auto stop = std::chrono::steady_clock::now();

  Assessment a;
  a.probability_stable = probs.at(0, 1);
  a.verdict = a.probability_stable > probs.at(0, 0) ? 1 : 0;
  a.latency_ms =
    std::chrono::duration<double, std::milli>(stop - start).count();
  return a;
}

} // namespace stvsa::model
