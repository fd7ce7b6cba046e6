#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stvsa/numerics/array.hpp"

namespace stvsa::num {

/// Named parameter arrays shared by every graph built for a model. Iteration
/// order is creation order, so optimizer sweeps are deterministic.
class ParameterStore {
public:
  DenseArray &create(const std::string &name, Shape shape);
  DenseArray &at(const std::string &name);
  const DenseArray &at(const std::string &name) const;
  bool contains(const std::string &name) const;
  const std::vector<std::string> &names() const { return order_; }
  std::size_t size() const { return order_.size(); }

private:
  std::vector<std::string> order_;
  std::map<std::string, DenseArray> values_;
};

struct EvalOptions {
  bool train_mode = false;       // enables dropout
  std::uint64_t dropout_seed = 0;
  bool check_finite = true;
};

/// Static computation graph with reverse-mode differentiation. Nodes are
/// appended through the builder methods, which validate shapes eagerly, so
/// insertion order is already a topological order. evaluate() binds the
/// named inputs and runs a forward pass; backward() propagates from a scalar
/// loss node into every node's gradient slot.
class Graph {
public:
  enum class Op {
    kInput,
    kParam,
    kConst,
    kMatMul,
    kAddRow,
    kAdd,
    kSub,
    kMul,
    kScaleRows,
    kScalarAffine,
    kSigmoid,
    kTanh,
    kLeakyRelu,
    kLog,
    kConcatCols,
    kSliceCols,
    kReshape,
    kDropout,
    kSoftmaxRows,
    kSumAll,
    kMeanAll,
  };

  // ---- builders (all return the new node id) ----
  int input(const std::string &name, Shape shape);
  int param(const std::string &name, Shape shape);
  int constant(DenseArray value);
  int matmul(int a, int b);
  int add_row(int a, int bias);
  int add(int a, int b);
  int sub(int a, int b);
  int mul(int a, int b);
  /// Row i of x scaled by the scalar in row i of s (s has shape [rows, 1]).
  int scale_rows(int x, int s);
  /// mul_const * x + add_const, elementwise.
  int scalar_affine(int x, double mul_const, double add_const);
  int sigmoid(int x);
  int tanh(int x);
  int leaky_relu(int x, double slope);
  int log(int x);
  int concat_cols(int a, int b);
  int slice_cols(int x, std::size_t offset, std::size_t width);
  int reshape(int x, Shape shape);
  int dropout(int x, double rate);
  int softmax_rows(int x);
  int sum_all(int x);
  int mean_all(int x);

  void mark_output(const std::string &name, int node);

  // ---- execution ----
  /// Forward pass. Returns the arrays marked with mark_output().
  std::map<std::string, DenseArray>
  evaluate(const ParameterStore &params,
           const std::map<std::string, DenseArray> &bindings,
           const EvalOptions &opts = {});

  /// Reverse pass from a scalar loss node; requires a prior evaluate().
  void backward(int loss_node);

  /// Gradients of the most recent backward() per parameter name.
  std::map<std::string, DenseArray> parameter_gradients() const;

  const DenseArray &value(int node) const { return nodes_[check(node)].value; }
  const DenseArray &gradient(int node) const {
    return nodes_[check(node)].grad;
  }
  const Shape &node_shape(int node) const { return nodes_[check(node)].shape; }
  std::size_t size() const { return nodes_.size(); }

private:
  struct Node {
    Op op;
    int in0 = -1;
    int in1 = -1;
    Shape shape;
    std::string name;       // input / param nodes
    double alpha = 0.0;     // slope, scale factor, dropout rate
    double beta = 0.0;      // additive constant
    std::size_t offset = 0; // slice
    std::size_t width = 0;
    DenseArray value;
    DenseArray grad;
    DenseArray mask; // dropout; empty means identity
  };

  int check(int node) const;
  int push(Node n);
  [[noreturn]] void shape_error(const std::string &what, int node) const;
  void forward_node(int id, const ParameterStore &params,
                    const std::map<std::string, DenseArray> &bindings,
                    const EvalOptions &opts);
  void backward_node(int id);

  std::vector<Node> nodes_;
  std::map<std::string, int> input_ids_;
  std::map<std::string, int> param_ids_;
  std::map<std::string, int> outputs_;
  bool evaluated_ = false;
};

const char *op_name(Graph::Op op);

} // namespace stvsa::num
