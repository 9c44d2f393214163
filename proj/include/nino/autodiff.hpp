#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nino/tensor.hpp"

namespace nino {

/// A trainable tensor and its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

/// Ordered, named collection of parameters. Order is the checkpoint order.
class ParameterSet {
 public:
  std::size_t add(std::string name, Tensor value);

  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  std::size_t size() const { return params_.size(); }
  std::size_t element_count() const;

  /// Index of the parameter called `name`; throws BadConfig when absent.
  std::size_t find(const std::string& name) const;

  void zero_grad();

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
};

class Tape;

/// Handle to a node recorded on a Tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

enum class Mode { Train, Eval };

/// Records operations in creation order (a valid topological order) and runs
/// reverse-mode differentiation over them. One Tape per forward pass; not shared
/// between threads.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  /// Leaf whose gradient is readable through grad() after backward().
  Var variable(Tensor value);
  /// Leaf bound to `p`; backward() adds dloss/dp into p.grad.
  Var parameter(Parameter& p);

  Var record(Tensor value, std::vector<std::size_t> parents, BackwardFn fn);

  /// Seeds dloss/dloss = 1 and propagates to every node the loss depends on.
  void backward(Var loss);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Used by backward closures.
  bool needs_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  Tensor& grad_buffer(std::size_t id) { return grads_[id]; }

 private:
  struct Node {
    Tensor value;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  bool done_ = false;
};

// Differentiable operations. Shapes follow the model code's needs; there is no
// general broadcasting.

Var add(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double factor);
Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);

enum class PointwiseOp { Sigmoid, Tanh, Relu, Hadamard, Add };
/// Dispatches to the unary or binary elementwise op.
Var pointwise(PointwiseOp op, std::span<const Var> args);

/// Same-padded, stride-1 cross-correlation. input [C_in][H][W], kernels
/// [C_out][C_in][k][k] with odd k, bias [C_out]. Output [C_out][H][W].
Var conv2d(Var input, Var kernels, Var bias);
Var conv2d(Var input, Var kernels);

/// y = W x + b with x [n], W [m][n], b [m].
Var dense(Var input, Var weights, Var bias);

Var reshape(Var a, Shape shape);
inline Var flatten(Var a) { return reshape(a, {a.value().size()}); }

/// Inverted dropout: in Train mode each element is zeroed with probability
/// `rate` and survivors are scaled by 1/(1-rate). Eval mode is the identity.
/// The mask is a pure function of `seed` and element index.
Var dropout(Var a, double rate, Mode mode, std::uint64_t seed);

/// Mean of squared differences over all elements.
Var mse(Var pred, Var target);

// Forward-only kernels shared with tests and inference code.
Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor* bias);
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

}  // namespace nino
