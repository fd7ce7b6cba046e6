#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stvsa/model/classifier.hpp"
#include "stvsa/numerics/rng.hpp"

#include "support/gradcheck.hpp"

using namespace stvsa;
using model::ClassifierConfig;
using model::SequenceClassifier;
using model::Variant;
using num::DenseArray;

namespace {

ClassifierConfig small_config() {
  ClassifierConfig cfg;
  cfg.hidden = 4;
  cfg.attention_size = 3;
  cfg.dropout = 0.25;
  cfg.batch_size = 8;
  cfg.epochs = 20;
  cfg.learning_rate = 1e-2;
  cfg.seed = 1;
  return cfg;
}

// Constant-feature sequences: class 0 at -0.5, class 1 at +0.5, light noise.
struct ToyData {
  DenseArray x;
  std::vector<int> y;
};

ToyData toy_sequences(std::size_t n, int q, int m, std::uint64_t seed) {
  num::Rng rng(seed);
  ToyData t;
  t.x = DenseArray({n, static_cast<std::size_t>(q * m)});
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    t.y.push_back(cls);
    for (int j = 0; j < q * m; ++j)
      t.x.at(i, j) = (cls == 0 ? -0.5 : 0.5) + 0.05 * rng.normal();
  }
  return t;
}

} // namespace

TEST_CASE("variant names round trip") {
  CHECK(model::to_string(model::variant_from_string("bigru-attention")) ==
        "bigru-attention");
  CHECK(model::to_string(model::variant_from_string("gru")) == "gru");
  CHECK(model::to_string(model::variant_from_string("lstm")) == "lstm");
  CHECK_THROWS_AS(model::variant_from_string("cnn"), Error);
}

TEST_CASE("attention weights: single step gets weight one, ties split") {
  ClassifierConfig cfg = small_config();
  SequenceClassifier one(Variant::kBiGruAttention, 1, 5, cfg, 3);
  DenseArray x({2, 5});
  num::Rng rng(4);
  testsupport::fill_uniform(x, rng);
  DenseArray a = one.attention_weights(x);
  CHECK(a.shape == num::Shape{2, 1});
  CHECK(a.at(0, 0) == doctest::Approx(1.0));

  // identical inputs at both steps produce identical hidden states only for
  // matched recurrences; instead check the simplex property on random data
  SequenceClassifier two(Variant::kBiGruAttention, 4, 5, cfg, 3);
  DenseArray x4({3, 20});
  testsupport::fill_uniform(x4, rng);
  DenseArray a4 = two.attention_weights(x4);
  for (std::size_t r = 0; r < 3; ++r) {
    double sum = 0.0;
    for (std::size_t t = 0; t < 4; ++t) {
      CHECK(a4.at(r, t) >= 0.0);
      sum += a4.at(r, t);
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("identical hidden states share attention equally") {
  // the attention scores depend only on the per-step hidden vector, so two
  // equal vectors must tie; build the block directly on equal inputs
  num::Graph g;
  num::ParameterStore params;
  num::Rng rng(7);
  testsupport::fill_uniform(params.create("att.w", {4, 3}), rng);
  testsupport::fill_uniform(params.create("att.b", {3}), rng);
  testsupport::fill_uniform(params.create("att.u", {3, 1}), rng);
  int h = g.input("h", {1, 4});
  int watt = g.param("att.w", {4, 3});
  int batt = g.param("att.b", {3});
  int uatt = g.param("att.u", {3, 1});
  auto score = [&](int hid) {
    return g.matmul(g.tanh(g.add_row(g.matmul(hid, watt), batt)), uatt);
  };
  int logits = g.concat_cols(score(h), score(h)); // both steps see the same h
  int alpha = g.softmax_rows(logits);
  g.mark_output("alpha", alpha);
  DenseArray hv({1, 4});
  testsupport::fill_uniform(hv, rng);
  auto out = g.evaluate(params, {{"h", hv}});
  CHECK(out.at("alpha").at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.at("alpha").at(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("zero output layer yields the uniform distribution") {
  ClassifierConfig cfg = small_config();
  for (Variant v :
       {Variant::kBiGruAttention, Variant::kGru, Variant::kLstm}) {
    SequenceClassifier clf(v, 3, 4, cfg, 11);
    clf.params().at("out.w").fill(0.0);
    clf.params().at("out.b").fill(0.0);
    DenseArray x({2, 12});
    num::Rng rng(8);
    testsupport::fill_uniform(x, rng);
    DenseArray p = clf.predict(x);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(p.at(i, 0) == doctest::Approx(0.5));
      CHECK(p.at(i, 1) == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("probabilities sum to one and inference is bit-stable") {
  ClassifierConfig cfg = small_config();
  for (Variant v :
       {Variant::kBiGruAttention, Variant::kGru, Variant::kLstm}) {
    SequenceClassifier clf(v, 3, 6, cfg, 13);
    DenseArray x({5, 18});
    num::Rng rng(9);
    testsupport::fill_uniform(x, rng);
    DenseArray p1 = clf.predict(x);
    DenseArray p2 = clf.predict(x);
    CHECK(p1.values == p2.values);
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(std::abs(p1.at(i, 0) + p1.at(i, 1) - 1.0) < 1e-12);
  }
}

TEST_CASE("full bigru-attention loss passes the finite-difference check") {
  // q=3, m=6, H=4 instance, attention 3; checked through the training graph
  ClassifierConfig cfg = small_config();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SequenceClassifier clf(Variant::kBiGruAttention, 3, 6, cfg, seed);
    DenseArray x({2, 18}), t({2, 2});
    num::Rng rng(seed * 101);
    testsupport::fill_uniform(x, rng);
    t.at(0, 0) = 1.0;
    t.at(1, 1) = 1.0;

    std::map<std::string, DenseArray> grads;
    auto [loss, probs] = clf.train_step(x, t, 424242, grads);
    (void)probs;
    CHECK(std::isfinite(loss));

    // finite differences through the same dropout masks
    double worst = 0.0;
    for (const std::string &name : clf.params().names()) {
      DenseArray &p = clf.params().at(name);
      for (std::size_t i = 0; i < p.numel(); ++i) {
        const double saved = p.values[i];
        std::map<std::string, DenseArray> scratch;
        p.values[i] = saved + 1e-5;
        const double up = clf.train_step(x, t, 424242, scratch).first;
        p.values[i] = saved - 1e-5;
        const double down = clf.train_step(x, t, 424242, scratch).first;
        p.values[i] = saved;
        const double fd = (up - down) / 2e-5;
        worst = std::max(worst,
                         testsupport::rel_error(grads.at(name).values[i], fd));
      }
    }
    CHECK_MESSAGE(worst < 1e-4, "seed ", seed);
  }
}

TEST_CASE("architecture is equivariant under time reversal") {
  // Swapping the forward/backward recurrent parameter sets together with the
  // matching half-blocks of the attention and output input weights, then
  // reversing the input sequence, reproduces the class probabilities.
  ClassifierConfig cfg = small_config();
  cfg.dropout = 0.0;
  const int q = 4, m = 5, h = cfg.hidden;
  SequenceClassifier a(Variant::kBiGruAttention, q, m, cfg, 21);
  SequenceClassifier b(Variant::kBiGruAttention, q, m, cfg, 21);

  // b takes a's parameters with directions swapped
  for (const char *gate : {"r", "z", "h"}) {
    for (const char *mat : {"W", "U", "b"}) {
      const std::string fwd = std::string("fwd.") + mat + gate;
      const std::string bwd = std::string("bwd.") + mat + gate;
      b.params().at(fwd).values = a.params().at(bwd).values;
      b.params().at(bwd).values = a.params().at(fwd).values;
    }
  }
  // swap the row blocks of the [2H x k] matrices that consume the
  // concatenated (forward, backward) hidden state
  for (const char *name : {"att.w", "out.w"}) {
    const DenseArray &src = a.params().at(name);
    DenseArray &dst = b.params().at(name);
    const std::size_t cols = src.shape[1];
    for (std::size_t r = 0; r < static_cast<std::size_t>(h); ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        dst.values[r * cols + c] = src.values[(r + h) * cols + c];
        dst.values[(r + h) * cols + c] = src.values[r * cols + c];
      }
  }
  b.params().at("att.b").values = a.params().at("att.b").values;
  b.params().at("att.u").values = a.params().at("att.u").values;
  b.params().at("out.b").values = a.params().at("out.b").values;

  DenseArray x({3, static_cast<std::size_t>(q * m)});
  num::Rng rng(31);
  testsupport::fill_uniform(x, rng);
  DenseArray reversed(x.shape);
  for (std::size_t i = 0; i < 3; ++i)
    for (int t = 0; t < q; ++t)
      for (int j = 0; j < m; ++j)
        reversed.at(i, static_cast<std::size_t>((q - 1 - t) * m + j)) =
          x.at(i, static_cast<std::size_t>(t * m + j));

  DenseArray pa = a.predict(x);
  DenseArray pb = b.predict(reversed);
  for (std::size_t i = 0; i < pa.numel(); ++i)
    CHECK(std::abs(pa.values[i] - pb.values[i]) < 1e-10);
}

TEST_CASE("training rejects unlabeled samples") {
  ClassifierConfig cfg = small_config();
  SequenceClassifier clf(Variant::kGru, 2, 3, cfg, 5);
  ToyData t = toy_sequences(8, 2, 3, 2);
  t.y[3] = -1;
  CHECK_THROWS_AS(model::train_classifier(clf, t.x, t.y, {}, {}), Error);
}

TEST_CASE("zero epochs keep the initialization, near-chance accuracy") {
  ClassifierConfig cfg = small_config();
  cfg.epochs = 0;
  SequenceClassifier clf(Variant::kBiGruAttention, 2, 4, cfg, 6);
  ToyData t = toy_sequences(64, 2, 4, 3);
  model::TrainResult r = model::train_classifier(clf, t.x, t.y, {}, {});
  CHECK(r.curve.empty());

  // parameters equal a fresh model built from the same seed
  SequenceClassifier fresh(Variant::kBiGruAttention, 2, 4, cfg, 6);
  for (const std::string &name : clf.params().names())
    CHECK(clf.params().at(name).values == fresh.params().at(name).values);

  // labels decoupled from the inputs: the untrained model sits near chance
  num::Rng rng(44);
  DenseArray x({200, 8});
  testsupport::fill_uniform(x, rng);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 2);
  const double acc = model::accuracy_on(clf, x, y);
  CHECK(acc > 0.3);
  CHECK(acc < 0.7);
}

TEST_CASE("separable toy sequences train to full accuracy") {
  for (Variant v :
       {Variant::kBiGruAttention, Variant::kGru, Variant::kLstm}) {
    ClassifierConfig cfg = small_config();
    cfg.epochs = 20;
    SequenceClassifier clf(v, 3, 4, cfg, 7);
    ToyData t = toy_sequences(64, 3, 4, 5);
    model::TrainResult r = model::train_classifier(clf, t.x, t.y, t.x, t.y);
    REQUIRE_FALSE(r.curve.empty());
    // inference-mode accuracy on the training set reaches 1.0
    CHECK(model::accuracy_on(clf, t.x, t.y) == doctest::Approx(1.0));
    CHECK(r.curve.back().test_accuracy == doctest::Approx(1.0));
  }
}

TEST_CASE("training curves are deterministic per seed") {
  ClassifierConfig cfg = small_config();
  cfg.epochs = 5;
  ToyData t = toy_sequences(32, 2, 3, 11);
  SequenceClassifier a(Variant::kBiGruAttention, 2, 3, cfg, 9);
  SequenceClassifier b(Variant::kBiGruAttention, 2, 3, cfg, 9);
  auto ra = model::train_classifier(a, t.x, t.y, {}, {});
  auto rb = model::train_classifier(b, t.x, t.y, {}, {});
  REQUIRE(ra.curve.size() == rb.curve.size());
  for (std::size_t i = 0; i < ra.curve.size(); ++i) {
    CHECK(ra.curve[i].train_loss == rb.curve[i].train_loss);
    CHECK(ra.curve[i].train_accuracy == rb.curve[i].train_accuracy);
  }
}

TEST_CASE("assess applies bounds, reports probability and latency") {
  ClassifierConfig cfg = small_config();
  cfg.epochs = 25;
  const int q = 3, m = 4;
  SequenceClassifier clf(Variant::kBiGruAttention, q, m, cfg, 15);

  // raw windows in physical units, normalized through computed bounds
  num::Rng rng(16);
  const std::size_t n = 64;
  DenseArray raw({n, q * m});
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    for (int j = 0; j < q * m; ++j)
      raw.at(i, j) = (y[i] == 0 ? 0.4 : 0.9) + 0.02 * rng.normal();
  }
  data::NormalizationBounds bounds;
  bounds.min.assign(q * m, 1e30);
  bounds.max.assign(q * m, -1e30);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < q * m; ++j) {
      bounds.min[j] = std::min(bounds.min[j], raw.at(i, j));
      bounds.max[j] = std::max(bounds.max[j], raw.at(i, j));
    }
  clf.bounds() = bounds;

  DenseArray xn({n, q * m});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(q * m);
    for (int j = 0; j < q * m; ++j) row[j] = raw.at(i, j);
    auto nr = data::normalize(row, bounds);
    for (int j = 0; j < q * m; ++j) xn.at(i, j) = nr[j];
  }
  model::train_classifier(clf, xn, y, {}, {});

  // a known-stable window assesses as stable with matching probability
  DenseArray window({q, m});
  for (int t = 0; t < q; ++t)
    for (int j = 0; j < m; ++j) window.at(t, j) = 0.9;
  model::Assessment a = model::assess(clf, window);
  CHECK(a.verdict == 1);
  CHECK(a.probability_stable > 0.5);
  CHECK(a.latency_ms > 0.0);

  // repeated assessments agree bit-exactly
  model::Assessment a2 = model::assess(clf, window);
  CHECK(a.probability_stable == a2.probability_stable);

  // shape mismatch rejects
  DenseArray bad({q + 1, m});
  CHECK_THROWS_AS(model::assess(clf, bad), Error);
}

TEST_CASE("classifier checkpoints round trip through the container") {
  ClassifierConfig cfg = small_config();
  SequenceClassifier clf(Variant::kBiGruAttention, 3, 6, cfg, 19);
  clf.bounds().min.assign(18, -2.0);
  clf.bounds().max.assign(18, 3.0);
  const std::string path = "test_tmp_model.ckpt";
  model::save_classifier(path, clf);
  SequenceClassifier back = model::load_classifier(path);
  CHECK(back.variant() == clf.variant());
  CHECK(back.steps() == clf.steps());
  CHECK(back.features_per_step() == clf.features_per_step());
  CHECK(back.bounds().min == clf.bounds().min);
  for (const std::string &name : clf.params().names())
    CHECK(back.params().at(name).values == clf.params().at(name).values);

  // identical predictions after reload
  DenseArray x({2, 18});
  num::Rng rng(23);
  testsupport::fill_uniform(x, rng);
  CHECK(clf.predict(x).values == back.predict(x).values);
}
