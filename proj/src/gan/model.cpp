#include "stvsa/gan/model.hpp"

#include <algorithm>
#include <cmath>

#include "stvsa/gan/fidelity.hpp"
#include "stvsa/io/checkpoint.hpp"
#include "stvsa/numerics/adam.hpp"
#include "stvsa/numerics/init.hpp"
#include "stvsa/numerics/rng.hpp"

namespace stvsa::gan {

std::vector<double> one_hot(int label, int class_count) {
  if (label < 0 || label >= class_count)
    fail("domain", "label " + std::to_string(label) +
                     " outside [0, " + std::to_string(class_count) + ")");
  std::vector<double> v(class_count, 0.0);
  v[label] = 1.0;
  return v;
}

namespace {

constexpr double kLeakySlope = 0.2;

struct LayerDims {
  std::vector<std::pair<int, int>> shapes; // (in, out) per layer
};

LayerDims layer_dims(int input, const std::vector<int> &hidden, int output) {
  LayerDims d;
  int prev = input;
  for (int h : hidden) {
    d.shapes.emplace_back(prev, h);
    prev = h;
  }
  d.shapes.emplace_back(prev, output);
  return d;
}

void create_mlp_params(num::ParameterStore &store, const std::string &prefix,
                       const LayerDims &dims, num::Rng &rng) {
  for (std::size_t i = 0; i < dims.shapes.size(); ++i) {
    auto [in, out] = dims.shapes[i];
    num::DenseArray &w = store.create(
      prefix + ".w" + std::to_string(i),
      {static_cast<std::size_t>(in), static_cast<std::size_t>(out)});
    num::glorot_uniform(w, rng);
    store.create(prefix + ".b" + std::to_string(i),
                 {static_cast<std::size_t>(out)});
  }
}

// Hidden layers use a leaky rectifier; the head is left linear and the
// caller applies tanh / sigmoid / nothing as needed.
int build_mlp(num::Graph &g, const std::string &prefix, const LayerDims &dims,
              int x) {
  for (std::size_t i = 0; i < dims.shapes.size(); ++i) {
    auto [in, out] = dims.shapes[i];
    int w = g.param(prefix + ".w" + std::to_string(i),
                    {static_cast<std::size_t>(in), static_cast<std::size_t>(out)});
    int b = g.param(prefix + ".b" + std::to_string(i),
                    {static_cast<std::size_t>(out)});
    x = g.add_row(g.matmul(x, w), b);
    if (i + 1 < dims.shapes.size()) x = g.leaky_relu(x, kLeakySlope);
  }
  return x;
}

} // namespace

GenerativeModel::GenerativeModel(int data_dim, int noise_dim, int class_count,
                                 num::GanLossMode mode,
                                 std::vector<int> gen_hidden,
                                 std::vector<int> disc_hidden,
                                 std::uint64_t init_seed)
  : data_dim_(data_dim), noise_dim_(noise_dim), class_count_(class_count),
    mode_(mode), gen_hidden_(std::move(gen_hidden)),
    disc_hidden_(std::move(disc_hidden)) {
  if (data_dim_ <= 0 || noise_dim_ <= 0 || class_count_ < 2)
    fail("config", "generative model dims must be positive, classes >= 2");
  num::Rng rng(init_seed);
  create_mlp_params(params_, "gen",
                    layer_dims(noise_dim_ + class_count_, gen_hidden_,
                               data_dim_),
                    rng);
  create_mlp_params(params_, "disc",
                    layer_dims(data_dim_ + class_count_, disc_hidden_, 1),
                    rng);
}

std::vector<std::string> GenerativeModel::generator_param_names() const {
  std::vector<std::string> out;
  for (const std::string &n : params_.names())
    if (n.rfind("gen.", 0) == 0) out.push_back(n);
  return out;
}

std::vector<std::string> GenerativeModel::discriminator_param_names() const {
  std::vector<std::string> out;
  for (const std::string &n : params_.names())
    if (n.rfind("disc.", 0) == 0) out.push_back(n);
  return out;
}

num::Graph &GenerativeModel::generator_graph(int batch) const {
  auto it = gen_graphs_.find(batch);
  if (it != gen_graphs_.end()) return *it->second;
  auto g = std::make_unique<num::Graph>();
  const std::size_t b = static_cast<std::size_t>(batch);
  int z = g->input("noise", {b, static_cast<std::size_t>(noise_dim_)});
  int y = g->input("onehot", {b, static_cast<std::size_t>(class_count_)});
  int head = build_mlp(*g, "gen",
                       layer_dims(noise_dim_ + class_count_, gen_hidden_,
                                  data_dim_),
                       g->concat_cols(z, y));
  g->mark_output("fake", g->tanh(head));
  return *gen_graphs_.emplace(batch, std::move(g)).first->second;
}

num::Graph &GenerativeModel::scorer_graph(int batch) const {
  auto it = score_graphs_.find(batch);
  if (it != score_graphs_.end()) return *it->second;
  auto g = std::make_unique<num::Graph>();
  const std::size_t b = static_cast<std::size_t>(batch);
  int x = g->input("windows", {b, static_cast<std::size_t>(data_dim_)});
  int y = g->input("onehot", {b, static_cast<std::size_t>(class_count_)});
  int score = build_mlp(*g, "disc",
                        layer_dims(data_dim_ + class_count_, disc_hidden_, 1),
                        g->concat_cols(x, y));
  if (mode_ == num::GanLossMode::kCrossEntropy) score = g->sigmoid(score);
  g->mark_output("score", score);
  return *score_graphs_.emplace(batch, std::move(g)).first->second;
}

num::DenseArray
GenerativeModel::generate_batch(const num::DenseArray &noise,
                                const num::DenseArray &onehot) const {
  num::Graph &g = generator_graph(static_cast<int>(noise.shape[0]));
  auto out = g.evaluate(params_, {{"noise", noise}, {"onehot", onehot}});
  return out.at("fake");
}

num::DenseArray
GenerativeModel::score_batch(const num::DenseArray &windows,
                             const num::DenseArray &onehot) const {
  num::Graph &g = scorer_graph(static_cast<int>(windows.shape[0]));
  auto out = g.evaluate(params_, {{"windows", windows}, {"onehot", onehot}});
  return out.at("score");
}

std::pair<num::DenseArray, std::vector<int>>
GenerativeModel::sample(int count_per_class, std::uint64_t seed) const {
  if (count_per_class < 0)
    fail("config", "count per class must be >= 0");
  const int total = count_per_class * class_count_;
  std::vector<int> labels;
  if (total == 0)
    return {num::DenseArray({0, static_cast<std::size_t>(data_dim_)}), labels};

  num::Rng rng(seed);
  num::DenseArray noise({static_cast<std::size_t>(total),
                         static_cast<std::size_t>(noise_dim_)});
  for (double &v : noise.values) v = rng.normal();
  num::DenseArray onehot({static_cast<std::size_t>(total),
                          static_cast<std::size_t>(class_count_)});
  for (int i = 0; i < total; ++i) {
    const int label = i % class_count_;
    labels.push_back(label);
    onehot.at(i, label) = 1.0;
  }
  return {generate_batch(noise, onehot), labels};
}

// ------------------------------------------------------------- training ----

namespace {

// Two training graphs keep the per-step cost down: the discriminator step
// sees the fake batch as a plain input (generator detached), and only the
// generator step carries the full noise -> generator -> discriminator chain.
struct DiscGraph {
  num::Graph graph;
  int loss = -1;
};

struct GenGraph {
  num::Graph graph;
  int loss = -1;
};

int attach_scorer(num::Graph &g, const GenerativeModel &m, int x, int y) {
  int score = build_mlp(g, "disc",
                        layer_dims(m.data_dim() + m.class_count(),
                                   m.disc_hidden(), 1),
                        g.concat_cols(x, y));
  if (m.mode() == num::GanLossMode::kCrossEntropy) score = g.sigmoid(score);
  return score;
}

// Mean of (score - target)^2, halved.
int half_mean_sq_err(num::Graph &g, int score, double target) {
  int diff = g.scalar_affine(score, 1.0, -target);
  return g.scalar_affine(g.mean_all(g.mul(diff, diff)), 0.5, 0.0);
}

// Mean of -log(p + eps) with p already in (0,1).
int neg_mean_log(num::Graph &g, int p) {
  return g.scalar_affine(g.mean_all(g.log(g.scalar_affine(p, 1.0, 1e-12))),
                         -1.0, 0.0);
}

DiscGraph build_disc_graph(const GenerativeModel &m, int batch) {
  DiscGraph t;
  num::Graph &g = t.graph;
  const std::size_t b = static_cast<std::size_t>(batch);
  const std::size_t d = static_cast<std::size_t>(m.data_dim());
  const std::size_t cc = static_cast<std::size_t>(m.class_count());

  int x_real = g.input("x_real", {b, d});
  int y_real = g.input("y_real", {b, cc});
  int x_fake = g.input("x_fake", {b, d});
  int y_fake = g.input("y_fake", {b, cc});

  int d_real = attach_scorer(g, m, x_real, y_real);
  int d_fake = attach_scorer(g, m, x_fake, y_fake);

  if (m.mode() == num::GanLossMode::kLeastSquares) {
    t.loss = g.add(half_mean_sq_err(g, d_real, 1.0),
                   half_mean_sq_err(g, d_fake, 0.0));
  } else {
    int one_minus = g.scalar_affine(d_fake, -1.0, 1.0);
    t.loss = g.add(neg_mean_log(g, d_real), neg_mean_log(g, one_minus));
  }
  g.mark_output("loss", t.loss);
  return t;
}

GenGraph build_gen_graph(const GenerativeModel &m, int batch) {
  GenGraph t;
  num::Graph &g = t.graph;
  const std::size_t b = static_cast<std::size_t>(batch);
  const std::size_t cc = static_cast<std::size_t>(m.class_count());

  int z = g.input("noise", {b, static_cast<std::size_t>(m.noise_dim())});
  int y_gen = g.input("y_gen", {b, cc});

  int gen_head = build_mlp(g, "gen",
                           layer_dims(m.noise_dim() + m.class_count(),
                                      m.gen_hidden(), m.data_dim()),
                           g.concat_cols(z, y_gen));
  int fake = g.tanh(gen_head);
  int d_gen = attach_scorer(g, m, fake, y_gen);

  t.loss = m.mode() == num::GanLossMode::kLeastSquares
             ? half_mean_sq_err(g, d_gen, 1.0)
             : neg_mean_log(g, d_gen);
  g.mark_output("loss", t.loss);
  return t;
}

} // namespace

GenerativeModel
train_gan(const num::DenseArray &windows, const std::vector<int> &labels,
          const num::DenseArray &reference, const GanTrainConfig &config,
          num::GanLossMode mode, int noise_dim,
          const std::vector<int> &gen_hidden,
          const std::vector<int> &disc_hidden) {
  if (windows.rank() != 2 || windows.shape[0] == 0)
    fail("data", "gan training needs a non-empty [n, d] window matrix");
  if (labels.size() != windows.shape[0])
    fail("shape", "label count does not match window count");
  for (double v : windows.values)
    if (v < -1.0 - 1e-9 || v > 1.0 + 1e-9)
      fail("data", "gan training data must be normalized to [-1, 1]");
  int class_count = 0;
  for (int l : labels) class_count = std::max(class_count, l + 1);
  if (class_count < 2) fail("data", "gan training needs both classes present");
  {
    std::vector<int> per_class(class_count, 0);
    for (int l : labels) {
      if (l < 0) fail("data", "gan training labels must be binary");
      ++per_class[l];
    }
    for (int c : per_class)
      if (c == 0) fail("data", "gan training needs both classes present");
  }

  const int d = static_cast<int>(windows.shape[1]);
  GenerativeModel model(d, noise_dim, class_count, mode, gen_hidden,
                        disc_hidden, num::mix_seed(config.seed, 0x1717));

  num::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.learning_rate;
  adam_cfg.beta1 = config.beta1;
  num::AdamOptimizer opt_d(adam_cfg, model.discriminator_param_names());
  num::AdamOptimizer opt_g(adam_cfg, model.generator_param_names());

  const int batch = std::min<int>(config.batch_size,
                                  static_cast<int>(windows.shape[0]));
  DiscGraph dg = build_disc_graph(model, batch);
  GenGraph gg = build_gen_graph(model, batch);

  num::Rng rng(num::mix_seed(config.seed, 0x5454));
  const std::size_t n = windows.shape[0];

  auto draw_real = [&](num::DenseArray &x, num::DenseArray &y) {
    for (int i = 0; i < batch; ++i) {
      const std::size_t j = rng.below(n);
      std::copy_n(&windows.values[j * d], d, &x.values[i * d]);
      for (int c = 0; c < class_count; ++c) y.at(i, c) = 0.0;
      y.at(i, labels[j]) = 1.0;
    }
  };
  auto draw_noise = [&](num::DenseArray &z, num::DenseArray &y) {
    for (double &v : z.values) v = rng.normal();
    for (int i = 0; i < batch; ++i) {
      const std::size_t j = rng.below(n); // labels follow the data marginal
      for (int c = 0; c < class_count; ++c) y.at(i, c) = 0.0;
      y.at(i, labels[j]) = 1.0;
    }
  };

  const std::size_t bs = static_cast<std::size_t>(batch);
  num::DenseArray x_real({bs, static_cast<std::size_t>(d)});
  num::DenseArray y_real({bs, static_cast<std::size_t>(class_count)});
  num::DenseArray z({bs, static_cast<std::size_t>(noise_dim)});
  num::DenseArray y_z({bs, static_cast<std::size_t>(class_count)});

  auto snapshot = [&](int iteration) {
    const int per_class =
      std::max(1, config.snapshot_samples / model.class_count());
    auto [gen, gen_labels] =
      model.sample(per_class, num::mix_seed(config.seed, 0x9000 + iteration));
    (void)gen_labels;
    FidelitySnapshot s;
    s.iteration = iteration;
    s.wd = wasserstein_distance(reference, gen);
    s.mmd = mmd(reference, gen);
    s.fid = fid(reference, gen);
    model.mutable_snapshots().push_back(s);
  };

  if (config.iterations > 0 && reference.shape[0] > 0) snapshot(0);

  for (int iter = 1; iter <= config.iterations; ++iter) {
    double last_d_loss = 0.0;
    for (int k = 0; k < config.disc_steps; ++k) {
      draw_real(x_real, y_real);
      draw_noise(z, y_z);
      num::DenseArray x_fake = model.generate_batch(z, y_z);
      auto out = dg.graph.evaluate(model.params(), {{"x_real", x_real},
                                                    {"y_real", y_real},
                                                    {"x_fake", x_fake},
                                                    {"y_fake", y_z}});
      last_d_loss = out.at("loss").values[0];
      if (!std::isfinite(last_d_loss))
        fail("train", "non-finite discriminator loss at iteration " +
                        std::to_string(iter));
      dg.graph.backward(dg.loss);
      opt_d.update(model.params(), dg.graph.parameter_gradients());
    }

    draw_noise(z, y_z);
    auto out =
      gg.graph.evaluate(model.params(), {{"noise", z}, {"y_gen", y_z}});
    const double g_loss = out.at("loss").values[0];
    if (!std::isfinite(g_loss))
      fail("train",
           "non-finite generator loss at iteration " + std::to_string(iter));
    gg.graph.backward(gg.loss);
    opt_g.update(model.params(), gg.graph.parameter_gradients());

    model.mutable_history().push_back({iter, last_d_loss, g_loss});
    if (reference.shape[0] > 0 && config.snapshot_every > 0 &&
        (iter % config.snapshot_every == 0 || iter == config.iterations))
      snapshot(iter);
  }

  model.set_trained(config.iterations > 0);
  return model;
}

// ---------------------------------------------------------- persistence ----

namespace {

std::string ints_to_string(const std::vector<int> &v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> ints_from_string(const std::string &s) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(',', start);
    const std::string tok =
      pos == std::string::npos ? s.substr(start) : s.substr(start, pos - start);
    if (!tok.empty()) out.push_back(std::stoi(tok));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

} // namespace

void save_gan(const std::string &path, const GenerativeModel &model) {
  io::Checkpoint ckpt;
  ckpt.meta["kind"] = "gan";
  ckpt.meta["loss_mode"] = num::to_string(model.mode());
  ckpt.meta["data_dim"] = std::to_string(model.data_dim());
  ckpt.meta["noise_dim"] = std::to_string(model.noise_dim());
  ckpt.meta["class_count"] = std::to_string(model.class_count());
  ckpt.meta["gen_hidden"] = ints_to_string(model.gen_hidden());
  ckpt.meta["disc_hidden"] = ints_to_string(model.disc_hidden());
  ckpt.meta["trained"] = model.trained() ? "1" : "0";
  for (const std::string &name : model.params().names())
    ckpt.params.create(name, model.params().at(name).shape).values =
      model.params().at(name).values;
  io::save_checkpoint(path, ckpt);
}

GenerativeModel load_gan(const std::string &path) {
  io::Checkpoint ckpt = io::load_checkpoint(path);
  auto meta = [&](const char *key) -> const std::string & {
    auto it = ckpt.meta.find(key);
    if (it == ckpt.meta.end())
      fail("format", path + ": checkpoint missing meta key '" +
                       std::string(key) + "'");
    return it->second;
  };
  if (meta("kind") != "gan") fail("format", path + ": not a gan checkpoint");
  GenerativeModel model(std::stoi(meta("data_dim")),
                        std::stoi(meta("noise_dim")),
                        std::stoi(meta("class_count")),
                        num::gan_loss_mode_from_string(meta("loss_mode")),
                        ints_from_string(meta("gen_hidden")),
                        ints_from_string(meta("disc_hidden")), 0);
  for (const std::string &name : model.params().names()) {
    if (!ckpt.params.contains(name))
      fail("format", path + ": checkpoint missing parameter '" + name + "'");
    const num::DenseArray &src = ckpt.params.at(name);
    num::DenseArray &dst = model.params().at(name);
    if (!src.same_shape(dst))
      fail("format", path + ": parameter '" + name + "' shape mismatch");
    dst.values = src.values;
  }
  model.set_trained(meta("trained") == "1");
  return model;
}

} // namespace stvsa::gan
