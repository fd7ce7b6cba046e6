#include "stvsa/numerics/graph.hpp"

#include <algorithm>
#include <cmath>

#include "stvsa/numerics/rng.hpp"

namespace stvsa::num {

const char *op_name(Graph::Op op) {
  switch (op) {
  case Graph::Op::kInput: return "input";
  case Graph::Op::kParam: return "param";
  case Graph::Op::kConst: return "const";
  case Graph::Op::kMatMul: return "matmul";
  case Graph::Op::kAddRow: return "add_row";
  case Graph::Op::kAdd: return "add";
  case Graph::Op::kSub: return "sub";
  case Graph::Op::kMul: return "mul";
  case Graph::Op::kScaleRows: return "scale_rows";
  case Graph::Op::kScalarAffine: return "scalar_affine";
  case Graph::Op::kSigmoid: return "sigmoid";
  case Graph::Op::kTanh: return "tanh";
  case Graph::Op::kLeakyRelu: return "leaky_relu";
  case Graph::Op::kLog: return "log";
  case Graph::Op::kConcatCols: return "concat_cols";
  case Graph::Op::kSliceCols: return "slice_cols";
  case Graph::Op::kReshape: return "reshape";
  case Graph::Op::kDropout: return "dropout";
  case Graph::Op::kSoftmaxRows: return "softmax_rows";
  case Graph::Op::kSumAll: return "sum_all";
  case Graph::Op::kMeanAll: return "mean_all";
  }
  return "?";
}

// ---------------------------------------------------------------- store ----

DenseArray &ParameterStore::create(const std::string &name, Shape shape) {
  if (values_.count(name))
    fail("config", "parameter '" + name + "' already exists");
  order_.push_back(name);
  auto [it, ok] = values_.emplace(name, DenseArray(std::move(shape)));
  (void)ok;
  return it->second;
}

DenseArray &ParameterStore::at(const std::string &name) {
  auto it = values_.find(name);
  if (it == values_.end()) fail("config", "unknown parameter '" + name + "'");
  return it->second;
}

const DenseArray &ParameterStore::at(const std::string &name) const {
  auto it = values_.find(name);
  if (it == values_.end()) fail("config", "unknown parameter '" + name + "'");
  return it->second;
}

bool ParameterStore::contains(const std::string &name) const {
  return values_.count(name) != 0;
}

// ------------------------------------------------------------- builders ----

int Graph::check(int node) const {
  if (node < 0 || node >= static_cast<int>(nodes_.size()))
    fail("shape", "node id " + std::to_string(node) + " out of range");
  return node;
}

void Graph::shape_error(const std::string &what, int node) const {
  fail("shape", what + " at node " + std::to_string(node));
}

int Graph::push(Node n) {
  n.value = DenseArray(n.shape);
  n.grad = DenseArray(n.shape);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Graph::input(const std::string &name, Shape shape) {
  auto it = input_ids_.find(name);
  if (it != input_ids_.end()) {
    if (nodes_[it->second].shape != shape)
      fail("shape", "input '" + name + "' redeclared with different shape");
    return it->second;
  }
  Node n;
  n.op = Op::kInput;
  n.shape = std::move(shape);
  n.name = name;
  int id = push(std::move(n));
  input_ids_[name] = id;
  return id;
}

int Graph::param(const std::string &name, Shape shape) {
  auto it = param_ids_.find(name);
  if (it != param_ids_.end()) {
    if (nodes_[it->second].shape != shape)
      fail("shape", "param '" + name + "' redeclared with different shape");
    return it->second;
  }
  Node n;
  n.op = Op::kParam;
  n.shape = std::move(shape);
  n.name = name;
  int id = push(std::move(n));
  param_ids_[name] = id;
  return id;
}

int Graph::constant(DenseArray value) {
  Node n;
  n.op = Op::kConst;
  n.shape = value.shape;
  int id = push(std::move(n));
  nodes_[id].value = std::move(value);
  return id;
}

int Graph::matmul(int a, int b) {
  const Shape &sa = nodes_[check(a)].shape, &sb = nodes_[check(b)].shape;
  Node n;
  n.op = Op::kMatMul;
  n.in0 = a;
  n.in1 = b;
  if (sa.size() != 2 || sb.size() != 2 || sa[1] != sb[0])
    shape_error("matmul of " + shape_str(sa) + " and " + shape_str(sb),
                static_cast<int>(nodes_.size()));
  n.shape = {sa[0], sb[1]};
  return push(std::move(n));
}

int Graph::add_row(int a, int bias) {
  const Shape &sa = nodes_[check(a)].shape, &sb = nodes_[check(bias)].shape;
  Node n;
  n.op = Op::kAddRow;
  n.in0 = a;
  n.in1 = bias;
  if (sa.size() != 2 || sb.size() != 1 || sb[0] != sa[1])
    shape_error("add_row of " + shape_str(sa) + " and " + shape_str(sb),
                static_cast<int>(nodes_.size()));
  n.shape = sa;
  return push(std::move(n));
}

static void require_same(Graph &g, const Shape &a, const Shape &b,
                         const char *what, std::size_t id) {
  if (a != b)
    fail("shape", std::string(what) + " of " + shape_str(a) + " and " +
                    shape_str(b) + " at node " + std::to_string(id));
  (void)g;
}

int Graph::add(int a, int b) {
  require_same(*this, nodes_[check(a)].shape, nodes_[check(b)].shape, "add",
               nodes_.size());
  Node n;
  n.op = Op::kAdd;
  n.in0 = a;
  n.in1 = b;
  n.shape = nodes_[a].shape;
  return push(std::move(n));
}

int Graph::sub(int a, int b) {
  require_same(*this, nodes_[check(a)].shape, nodes_[check(b)].shape, "sub",
               nodes_.size());
  Node n;
  n.op = Op::kSub;
  n.in0 = a;
  n.in1 = b;
  n.shape = nodes_[a].shape;
  return push(std::move(n));
}

int Graph::mul(int a, int b) {
  require_same(*this, nodes_[check(a)].shape, nodes_[check(b)].shape, "mul",
               nodes_.size());
  Node n;
  n.op = Op::kMul;
  n.in0 = a;
  n.in1 = b;
  n.shape = nodes_[a].shape;
  return push(std::move(n));
}

int Graph::scale_rows(int x, int s) {
  const Shape &sx = nodes_[check(x)].shape, &ss = nodes_[check(s)].shape;
  Node n;
  n.op = Op::kScaleRows;
  n.in0 = x;
  n.in1 = s;
  if (sx.size() != 2 || ss.size() != 2 || ss[0] != sx[0] || ss[1] != 1)
    shape_error("scale_rows of " + shape_str(sx) + " by " + shape_str(ss),
                static_cast<int>(nodes_.size()));
  n.shape = sx;
  return push(std::move(n));
}

int Graph::scalar_affine(int x, double mul_const, double add_const) {
  Node n;
  n.op = Op::kScalarAffine;
  n.in0 = check(x);
  n.alpha = mul_const;
  n.beta = add_const;
  n.shape = nodes_[x].shape;
  return push(std::move(n));
}

int Graph::sigmoid(int x) {
  Node n;
  n.op = Op::kSigmoid;
  n.in0 = check(x);
  n.shape = nodes_[x].shape;
  return push(std::move(n));
}

int Graph::tanh(int x) {
  Node n;
  n.op = Op::kTanh;
  n.in0 = check(x);
  n.shape = nodes_[x].shape;
  return push(std::move(n));
}

int Graph::leaky_relu(int x, double slope) {
  Node n;
  n.op = Op::kLeakyRelu;
  n.in0 = check(x);
  n.alpha = slope;
  n.shape = nodes_[x].shape;
  return push(std::move(n));
}

int Graph::log(int x) {
  Node n;
  n.op = Op::kLog;
  n.in0 = check(x);
  n.shape = nodes_[x].shape;
  return push(std::move(n));
}

int Graph::concat_cols(int a, int b) {
  const Shape &sa = nodes_[check(a)].shape, &sb = nodes_[check(b)].shape;
  Node n;
  n.op = Op::kConcatCols;
  n.in0 = a;
  n.in1 = b;
  if (sa.size() != 2 || sb.size() != 2 || sa[0] != sb[0])
    shape_error("concat_cols of " + shape_str(sa) + " and " + shape_str(sb),
                static_cast<int>(nodes_.size()));
  n.shape = {sa[0], sa[1] + sb[1]};
  return push(std::move(n));
}

int Graph::slice_cols(int x, std::size_t offset, std::size_t width) {
  const Shape &sx = nodes_[check(x)].shape;
  Node n;
  n.op = Op::kSliceCols;
  n.in0 = x;
  n.offset = offset;
  n.width = width;
  if (sx.size() != 2 || width == 0 || offset + width > sx[1])
    shape_error("slice_cols [" + std::to_string(offset) + ", +" +
                  std::to_string(width) + ") of " + shape_str(sx),
                static_cast<int>(nodes_.size()));
  n.shape = {sx[0], width};
  return push(std::move(n));
}

int Graph::reshape(int x, Shape shape) {
  const Shape &sx = nodes_[check(x)].shape;
  Node n;
  n.op = Op::kReshape;
  n.in0 = x;
  if (shape_numel(shape) != shape_numel(sx))
    shape_error("reshape " + shape_str(sx) + " -> " + shape_str(shape),
                static_cast<int>(nodes_.size()));
  n.shape = std::move(shape);
  return push(std::move(n));
}

int Graph::dropout(int x, double rate) {
  if (rate < 0.0 || rate >= 1.0) fail("config", "dropout rate must be in [0,1)");
  Node n;
  n.op = Op::kDropout;
  n.in0 = check(x);
  n.alpha = rate;
  n.shape = nodes_[x].shape;
  return push(std::move(n));
}

int Graph::softmax_rows(int x) {
  const Shape &sx = nodes_[check(x)].shape;
  if (sx.size() != 2)
    shape_error("softmax_rows of " + shape_str(sx),
                static_cast<int>(nodes_.size()));
  Node n;
  n.op = Op::kSoftmaxRows;
  n.in0 = x;
  n.shape = sx;
  return push(std::move(n));
}

int Graph::sum_all(int x) {
  Node n;
  n.op = Op::kSumAll;
  n.in0 = check(x);
  n.shape = {1};
  return push(std::move(n));
}

int Graph::mean_all(int x) {
  Node n;
  n.op = Op::kMeanAll;
  n.in0 = check(x);
  n.shape = {1};
  return push(std::move(n));
}

void Graph::mark_output(const std::string &name, int node) {
  outputs_[name] = check(node);
}

// -------------------------------------------------------------- forward ----

void Graph::forward_node(int id, const ParameterStore &params,
                         const std::map<std::string, DenseArray> &bindings,
                         const EvalOptions &opts) {
  Node &n = nodes_[id];
  const auto in = [&](int k) -> const DenseArray & {
    return nodes_[k].value;
  };
  switch (n.op) {
  case Op::kInput: {
    auto it = bindings.find(n.name);
    if (it == bindings.end())
      fail("shape", "missing binding for input '" + n.name + "'");
    if (it->second.shape != n.shape)
      fail("shape", "binding for '" + n.name + "' has shape " +
                      shape_str(it->second.shape) + ", expected " +
                      shape_str(n.shape));
    if (!it->second.all_finite())
      fail("domain", "non-finite values bound to input '" + n.name + "'");
    n.value = it->second;
    return; // inputs already checked
  }
  case Op::kParam: {
    const DenseArray &p = params.at(n.name);
    if (p.shape != n.shape)
      fail("shape", "parameter '" + n.name + "' has shape " +
                      shape_str(p.shape) + ", graph expects " +
                      shape_str(n.shape));
    n.value = p;
    break;
  }
  case Op::kConst:
    break;
  case Op::kMatMul:
    matmul_into(in(n.in0), in(n.in1), n.value);
    break;
  case Op::kAddRow: {
    const DenseArray &a = in(n.in0), &b = in(n.in1);
    const std::size_t r = a.shape[0], c = a.shape[1];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        n.value.values[i * c + j] = a.values[i * c + j] + b.values[j];
    break;
  }
  case Op::kAdd: {
    const auto &a = in(n.in0).values, &b = in(n.in1).values;
    for (std::size_t i = 0; i < a.size(); ++i)
      n.value.values[i] = a[i] + b[i];
    break;
  }
  case Op::kSub: {
    const auto &a = in(n.in0).values, &b = in(n.in1).values;
    for (std::size_t i = 0; i < a.size(); ++i)
      n.value.values[i] = a[i] - b[i];
    break;
  }
  case Op::kMul: {
    const auto &a = in(n.in0).values, &b = in(n.in1).values;
    for (std::size_t i = 0; i < a.size(); ++i)
      n.value.values[i] = a[i] * b[i];
    break;
  }
  case Op::kScaleRows: {
    const DenseArray &x = in(n.in0), &s = in(n.in1);
    const std::size_t r = x.shape[0], c = x.shape[1];
    for (std::size_t i = 0; i < r; ++i) {
      const double f = s.values[i];
      for (std::size_t j = 0; j < c; ++j)
        n.value.values[i * c + j] = x.values[i * c + j] * f;
    }
    break;
  }
  case Op::kScalarAffine: {
    const auto &x = in(n.in0).values;
    for (std::size_t i = 0; i < x.size(); ++i)
      n.value.values[i] = n.alpha * x[i] + n.beta;
    break;
  }
  case Op::kSigmoid: {
    const auto &x = in(n.in0).values;
    for (std::size_t i = 0; i < x.size(); ++i)
      n.value.values[i] = 1.0 / (1.0 + std::exp(-x[i]));
    break;
  }
  case Op::kTanh: {
    const auto &x = in(n.in0).values;
    for (std::size_t i = 0; i < x.size(); ++i)
      n.value.values[i] = std::tanh(x[i]);
    break;
  }
  case Op::kLeakyRelu: {
    const auto &x = in(n.in0).values;
    for (std::size_t i = 0; i < x.size(); ++i)
      n.value.values[i] = x[i] >= 0.0 ? x[i] : n.alpha * x[i];
    break;
  }
  case Op::kLog: {
    const auto &x = in(n.in0).values;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] <= 0.0)
        fail("domain", "log of non-positive value at node " +
                         std::to_string(id));
      n.value.values[i] = std::log(x[i]);
    }
    break;
  }
  case Op::kConcatCols: {
    const DenseArray &a = in(n.in0), &b = in(n.in1);
    const std::size_t r = a.shape[0], ca = a.shape[1], cb = b.shape[1];
    for (std::size_t i = 0; i < r; ++i) {
      double *row = &n.value.values[i * (ca + cb)];
      std::copy_n(&a.values[i * ca], ca, row);
      std::copy_n(&b.values[i * cb], cb, row + ca);
    }
    break;
  }
  case Op::kSliceCols: {
    const DenseArray &x = in(n.in0);
    const std::size_t r = x.shape[0], c = x.shape[1];
    for (std::size_t i = 0; i < r; ++i)
      std::copy_n(&x.values[i * c + n.offset], n.width,
                  &n.value.values[i * n.width]);
    break;
  }
  case Op::kReshape:
    n.value.values = in(n.in0).values;
    break;
  case Op::kDropout: {
    const auto &x = in(n.in0).values;
    if (!opts.train_mode || n.alpha == 0.0) {
      n.mask = DenseArray(); // identity
      n.value.values = x;
    } else {
      Rng rng(mix_seed(opts.dropout_seed, static_cast<std::uint64_t>(id)));
      n.mask = DenseArray(n.shape);
      const double keep = 1.0 - n.alpha;
      const double scale = 1.0 / keep;
      for (std::size_t i = 0; i < x.size(); ++i) {
        n.mask.values[i] = rng.uniform() < keep ? scale : 0.0;
        n.value.values[i] = x[i] * n.mask.values[i];
      }
    }
    break;
  }
  case Op::kSoftmaxRows: {
    const DenseArray &x = in(n.in0);
    const std::size_t r = x.shape[0], c = x.shape[1];
    for (std::size_t i = 0; i < r; ++i) {
      const double *xr = &x.values[i * c];
      double *yr = &n.value.values[i * c];
      double m = xr[0];
      for (std::size_t j = 1; j < c; ++j) m = std::max(m, xr[j]);
      double s = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        yr[j] = std::exp(xr[j] - m);
        s += yr[j];
      }
      for (std::size_t j = 0; j < c; ++j) yr[j] /= s;
    }
    break;
  }
  case Op::kSumAll: {
    double s = 0.0;
    for (double v : in(n.in0).values) s += v;
    n.value.values[0] = s;
    break;
  }
  case Op::kMeanAll: {
    double s = 0.0;
    const auto &x = in(n.in0).values;
    for (double v : x) s += v;
    n.value.values[0] = s / static_cast<double>(x.size());
    break;
  }
  }
  if (opts.check_finite && !n.value.all_finite())
    fail("domain", std::string("non-finite value produced by ") +
                     op_name(n.op) + " at node " + std::to_string(id));
}

std::map<std::string, DenseArray>
Graph::evaluate(const ParameterStore &params,
                const std::map<std::string, DenseArray> &bindings,
                const EvalOptions &opts) {
  for (int id = 0; id < static_cast<int>(nodes_.size()); ++id)
    forward_node(id, params, bindings, opts);
  evaluated_ = true;
  std::map<std::string, DenseArray> out;
  for (const auto &[name, id] : outputs_) out.emplace(name, nodes_[id].value);
  return out;
}

// ------------------------------------------------------------- backward ----

void Graph::backward_node(int id) {
  Node &n = nodes_[id];
  const auto &g = n.grad.values;
  auto acc = [&](int k) -> std::vector<double> & {
    return nodes_[k].grad.values;
  };
  switch (n.op) {
  case Op::kInput:
  case Op::kParam:
  case Op::kConst:
    break;
  case Op::kMatMul: {
    const DenseArray &a = nodes_[n.in0].value, &b = nodes_[n.in1].value;
    auto &ga = acc(n.in0);
    auto &gb = acc(n.in1);
    const std::size_t r = a.shape[0], k = a.shape[1], c = b.shape[1];
    // ga += g . b^T
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        double s = 0.0;
        const double *gr = &g[i * c];
        const double *br = &b.values[p * c];
        for (std::size_t j = 0; j < c; ++j) s += gr[j] * br[j];
        ga[i * k + p] += s;
      }
    // gb += a^T . g
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        const double av = a.values[i * k + p];
        const double *gr = &g[i * c];
        double *gbr = &gb[p * c];
        for (std::size_t j = 0; j < c; ++j) gbr[j] += av * gr[j];
      }
    break;
  }
  case Op::kAddRow: {
    auto &ga = acc(n.in0);
    auto &gb = acc(n.in1);
    const std::size_t r = n.shape[0], c = n.shape[1];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        ga[i * c + j] += g[i * c + j];
        gb[j] += g[i * c + j];
      }
    break;
  }
  case Op::kAdd: {
    auto &ga = acc(n.in0);
    auto &gb = acc(n.in1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] += g[i];
    }
    break;
  }
  case Op::kSub: {
    auto &ga = acc(n.in0);
    auto &gb = acc(n.in1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] -= g[i];
    }
    break;
  }
  case Op::kMul: {
    const auto &a = nodes_[n.in0].value.values;
    const auto &b = nodes_[n.in1].value.values;
    auto &ga = acc(n.in0);
    auto &gb = acc(n.in1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * b[i];
      gb[i] += g[i] * a[i];
    }
    break;
  }
  case Op::kScaleRows: {
    const DenseArray &x = nodes_[n.in0].value, &s = nodes_[n.in1].value;
    auto &gx = acc(n.in0);
    auto &gs = acc(n.in1);
    const std::size_t r = x.shape[0], c = x.shape[1];
    for (std::size_t i = 0; i < r; ++i) {
      const double f = s.values[i];
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        gx[i * c + j] += g[i * c + j] * f;
        dot += g[i * c + j] * x.values[i * c + j];
      }
      gs[i] += dot;
    }
    break;
  }
  case Op::kScalarAffine: {
    auto &gx = acc(n.in0);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += n.alpha * g[i];
    break;
  }
  case Op::kSigmoid: {
    const auto &y = n.value.values;
    auto &gx = acc(n.in0);
    for (std::size_t i = 0; i < g.size(); ++i)
      gx[i] += g[i] * y[i] * (1.0 - y[i]);
    break;
  }
  case Op::kTanh: {
    const auto &y = n.value.values;
    auto &gx = acc(n.in0);
    for (std::size_t i = 0; i < g.size(); ++i)
      gx[i] += g[i] * (1.0 - y[i] * y[i]);
    break;
  }
  case Op::kLeakyRelu: {
    const auto &x = nodes_[n.in0].value.values;
    auto &gx = acc(n.in0);
    for (std::size_t i = 0; i < g.size(); ++i)
      gx[i] += g[i] * (x[i] >= 0.0 ? 1.0 : n.alpha);
    break;
  }
  case Op::kLog: {
    const auto &x = nodes_[n.in0].value.values;
    auto &gx = acc(n.in0);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] / x[i];
    break;
  }
  case Op::kConcatCols: {
    auto &ga = acc(n.in0);
    auto &gb = acc(n.in1);
    const std::size_t r = n.shape[0];
    const std::size_t ca = nodes_[n.in0].shape[1];
    const std::size_t cb = nodes_[n.in1].shape[1];
    for (std::size_t i = 0; i < r; ++i) {
      const double *gr = &g[i * (ca + cb)];
      for (std::size_t j = 0; j < ca; ++j) ga[i * ca + j] += gr[j];
      for (std::size_t j = 0; j < cb; ++j) gb[i * cb + j] += gr[ca + j];
    }
    break;
  }
  case Op::kSliceCols: {
    auto &gx = acc(n.in0);
    const std::size_t r = n.shape[0];
    const std::size_t c = nodes_[n.in0].shape[1];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < n.width; ++j)
        gx[i * c + n.offset + j] += g[i * n.width + j];
    break;
  }
  case Op::kReshape: {
    auto &gx = acc(n.in0);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    break;
  }
  case Op::kDropout: {
    auto &gx = acc(n.in0);
    if (n.mask.numel() == 0) {
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
    } else {
      for (std::size_t i = 0; i < g.size(); ++i)
        gx[i] += g[i] * n.mask.values[i];
    }
    break;
  }
  case Op::kSoftmaxRows: {
    const auto &y = n.value.values;
    auto &gx = acc(n.in0);
    const std::size_t r = n.shape[0], c = n.shape[1];
    for (std::size_t i = 0; i < r; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += g[i * c + j] * y[i * c + j];
      for (std::size_t j = 0; j < c; ++j)
        gx[i * c + j] += y[i * c + j] * (g[i * c + j] - dot);
    }
    break;
  }
  case Op::kSumAll: {
    auto &gx = acc(n.in0);
    for (double &v : gx) v += g[0];
    break;
  }
  case Op::kMeanAll: {
    auto &gx = acc(n.in0);
    const double f = g[0] / static_cast<double>(gx.size());
    for (double &v : gx) v += f;
    break;
  }
  }
}

void Graph::backward(int loss_node) {
  check(loss_node);
  if (!evaluated_)
    fail("domain", "backward before any forward evaluation");
  if (nodes_[loss_node].value.numel() != 1)
    fail("shape", "backward requires a scalar loss node, got shape " +
                    shape_str(nodes_[loss_node].shape));
  for (Node &n : nodes_) n.grad.fill(0.0);
  nodes_[loss_node].grad.values[0] = 1.0;
  for (int id = loss_node; id >= 0; --id) backward_node(id);
}

std::map<std::string, DenseArray> Graph::parameter_gradients() const {
  std::map<std::string, DenseArray> out;
  for (const auto &[name, id] : param_ids_) out.emplace(name, nodes_[id].grad);
  return out;
}

} // namespace stvsa::num
