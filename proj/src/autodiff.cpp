#include "nino/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <spdlog/spdlog.h>

#include "nino/error.hpp"
#include "nino/rng.hpp"

namespace nino {

std::size_t ParameterSet::add(std::string name, Tensor value) {
  for (const auto& p : params_) {
    if (p.name == name) fail(ErrorKind::BadConfig, "duplicate parameter name " + name);
  }
  Tensor grad(value.shape(), 0.0);
  params_.push_back({std::move(name), std::move(value), std::move(grad)});
  return params_.size() - 1;
}

std::size_t ParameterSet::element_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

std::size_t ParameterSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  fail(ErrorKind::BadConfig, "no parameter named " + name);
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p.grad.fill(0.0);
}

const Tensor& Var::value() const { return tape_->value(id_); }

Var Tape::constant(Tensor value) {
  nodes_.push_back({std::move(value), {}, nullptr, nullptr, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::variable(Tensor value) {
  nodes_.push_back({std::move(value), {}, nullptr, nullptr, true});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Parameter& p) {
  nodes_.push_back({p.value, {}, nullptr, &p, true});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::vector<std::size_t> parents, BackwardFn fn) {
  bool needs = false;
  for (auto id : parents) needs = needs || nodes_[id].requires_grad;
  nodes_.push_back({std::move(value), std::move(parents), needs ? std::move(fn) : nullptr, nullptr, needs});
  return Var(this, nodes_.size() - 1);
}

void Tape::backward(Var loss) {
  if (loss.value().size() != 1) fail(ErrorKind::NotScalar, "backward needs a scalar loss, got " + shape_str(loss.shape()));
  if (done_) fail(ErrorKind::BadConfig, "backward already ran on this tape");
  done_ = true;

  const std::size_t root = loss.id();
  std::vector<char> reachable(root + 1, 0);
  reachable[root] = 1;
  for (std::size_t i = root + 1; i-- > 0;) {
    if (!reachable[i]) continue;
    for (auto p : nodes_[i].parents) reachable[p] = 1;
  }

  grads_.assign(nodes_.size(), Tensor());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].requires_grad) grads_[i] = Tensor(nodes_[i].value.shape(), 0.0);
  }
  if (!nodes_[root].requires_grad) {
    spdlog::warn("DisconnectedGraph: loss does not depend on any differentiable input");
    return;
  }
  grads_[root][0] = 1.0;

  for (std::size_t i = root + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (!reachable[i] || !node.requires_grad || !node.backward) continue;
    node.backward(*this, grads_[i]);
  }

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Parameter* p = nodes_[i].param;
    if (p == nullptr) continue;
    if (i > root || !reachable[i]) {
      spdlog::warn("DisconnectedGraph: parameter {} does not influence the loss", p->name);
      continue;
    }
    auto dst = p->grad.data();
    auto src = grads_[i].data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  }
}

const Tensor& Tape::grad(Var v) const {
  if (!done_) fail(ErrorKind::BadConfig, "grad() before backward()");
  if (!nodes_.at(v.id()).requires_grad) fail(ErrorKind::BadConfig, "grad() of a constant node");
  return grads_[v.id()];
}

namespace {

void same_tape(Var a, Var b, const char* op) {
  if (&a.tape() != &b.tape()) fail(ErrorKind::ShapeMismatch, std::string(op) + ": operands on different tapes");
}

void accumulate(Tape& t, std::size_t id, const Tensor& g) {
  if (!t.needs_grad(id)) return;
  auto dst = t.grad_buffer(id).data();
  auto src = g.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

template <class F, class D>
Var unary(Var a, F f, D dfdx_from_xy) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  const auto ia = a.id();
  return a.tape().record(std::move(y), {ia}, [ia, dfdx_from_xy](Tape& t, const Tensor& g) {
    if (!t.needs_grad(ia)) return;
    const Tensor& x = t.value(ia);
    auto dst = t.grad_buffer(ia).data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i] * dfdx_from_xy(x[i]);
  });
}

double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Var add(Var a, Var b) {
  same_tape(a, b, "add");
  require_same_shape(a.value(), b.value(), "add");
  Tensor y(a.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] + b.value()[i];
  const auto ia = a.id();
  const auto ib = b.id();
  return a.tape().record(std::move(y), {ia, ib}, [ia, ib](Tape& t, const Tensor& g) {
    accumulate(t, ia, g);
    accumulate(t, ib, g);
  });
}

Var hadamard(Var a, Var b) {
  same_tape(a, b, "hadamard");
  require_same_shape(a.value(), b.value(), "hadamard");
  Tensor y(a.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] * b.value()[i];
  const auto ia = a.id();
  const auto ib = b.id();
  return a.tape().record(std::move(y), {ia, ib}, [ia, ib](Tape& t, const Tensor& g) {
    const Tensor& va = t.value(ia);
    const Tensor& vb = t.value(ib);
    if (t.needs_grad(ia)) {
      auto d = t.grad_buffer(ia).data();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * vb[i];
    }
    if (t.needs_grad(ib)) {
      auto d = t.grad_buffer(ib).data();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * va[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tensor y(a.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] * factor;
  const auto ia = a.id();
  return a.tape().record(std::move(y), {ia}, [ia, factor](Tape& t, const Tensor& g) {
    if (!t.needs_grad(ia)) return;
    auto d = t.grad_buffer(ia).data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * factor;
  });
}

Var sigmoid(Var a) {
  return unary(a, sigmoid_scalar, [](double x) {
    const double s = sigmoid_scalar(x);
    return s * (1.0 - s);
  });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double x) {
    const double y = std::tanh(x);
    return 1.0 - y * y;
  });
}

Var relu(Var a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var pointwise(PointwiseOp op, std::span<const Var> args) {
  const bool binary = op == PointwiseOp::Hadamard || op == PointwiseOp::Add;
  if (args.size() != (binary ? 2u : 1u)) fail(ErrorKind::ShapeMismatch, "pointwise: wrong operand count");
  switch (op) {
    case PointwiseOp::Sigmoid: return sigmoid(args[0]);
    case PointwiseOp::Tanh: return tanh(args[0]);
    case PointwiseOp::Relu: return relu(args[0]);
    case PointwiseOp::Hadamard: return hadamard(args[0], args[1]);
    case PointwiseOp::Add: return add(args[0], args[1]);
  }
  fail(ErrorKind::ShapeMismatch, "pointwise: unknown op");
}

namespace {

struct ConvDims {
  std::size_t c_in, c_out, h, w, k;
};

ConvDims conv_dims(const Tensor& input, const Tensor& kernels, const Tensor* bias) {
  if (input.rank() != 3) fail(ErrorKind::ShapeMismatch, "conv2d input must be [C][H][W], got " + shape_str(input.shape()));
  if (kernels.rank() != 4) fail(ErrorKind::ShapeMismatch, "conv2d kernels must be [Co][Ci][k][k]");
  ConvDims d{input.extent(0), kernels.extent(0), input.extent(1), input.extent(2), kernels.extent(2)};
  if (kernels.extent(1) != d.c_in) {
    fail(ErrorKind::ShapeMismatch, "conv2d: kernel expects " + std::to_string(kernels.extent(1)) +
                                       " input channels, input has " + std::to_string(d.c_in));
  }
  if (kernels.extent(3) != d.k || d.k % 2 == 0) fail(ErrorKind::ShapeMismatch, "conv2d kernels must be square and odd");
  if (bias && (bias->rank() != 1 || bias->extent(0) != d.c_out)) fail(ErrorKind::ShapeMismatch, "conv2d bias must be [Co]");
  return d;
}

// Valid output range [lo, hi) along one axis for kernel offset `off` (already minus pad).
inline void valid_range(std::ptrdiff_t off, std::size_t n, std::size_t& lo, std::size_t& hi) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, -off));
  hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(sn, sn - off));
  if (hi < lo) hi = lo;
}

// Visits every in-image (patch row, input offset, output offset, run length) of
// a same-padded convolution. Patch row index is (ci * k + ky) * k + kx.
template <class F>
void for_each_patch_run(const ConvDims& d, F&& f) {
  const auto pad = static_cast<std::ptrdiff_t>(d.k / 2);
  const std::size_t plane = d.h * d.w;
  std::size_t row = 0;
  for (std::size_t ci = 0; ci < d.c_in; ++ci) {
    for (std::size_t ky = 0; ky < d.k; ++ky) {
      const auto dy = static_cast<std::ptrdiff_t>(ky) - pad;
      std::size_t y0, y1;
      valid_range(dy, d.h, y0, y1);
      for (std::size_t kx = 0; kx < d.k; ++kx, ++row) {
        const auto dx = static_cast<std::ptrdiff_t>(kx) - pad;
        std::size_t x0, x1;
        valid_range(dx, d.w, x0, x1);
        if (x1 == x0) continue;
        for (std::size_t r = y0; r < y1; ++r) {
          const std::size_t src = ci * plane + static_cast<std::size_t>(static_cast<std::ptrdiff_t>(r) + dy) * d.w +
                                  static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x0) + dx);
          f(row, src, r * d.w + x0, x1 - x0);
        }
      }
    }
  }
}

// Patch matrix [c_in * k * k][h * w]: entry (row, cell) is the input value that
// kernel tap `row` sees at output `cell`, zero outside the image.
std::vector<double> im2col(const double* x, const ConvDims& d) {
  const std::size_t plane = d.h * d.w;
  std::vector<double> cols(d.c_in * d.k * d.k * plane, 0.0);
  for_each_patch_run(d, [&](std::size_t row, std::size_t src, std::size_t dst, std::size_t n) {
    std::copy(x + src, x + src + n, cols.data() + row * plane + dst);
  });
  return cols;
}

// Scatters a patch-matrix gradient back onto the input cells it was read from.
void col2im_add(const std::vector<double>& cols, const ConvDims& d, double* gx) {
  const std::size_t plane = d.h * d.w;
  for_each_patch_run(d, [&](std::size_t row, std::size_t src, std::size_t dst, std::size_t n) {
    const double* c = cols.data() + row * plane + dst;
    for (std::size_t i = 0; i < n; ++i) gx[src + i] += c[i];
  });
}

// out[i] += sum_r w[r] * rows[r][i], four rows per pass over `out`.
void axpy_rows(const double* w, const double* rows, std::size_t n_rows, std::size_t n, double* __restrict out) {
  std::size_t r = 0;
  for (; r + 4 <= n_rows; r += 4) {
    const double w0 = w[r], w1 = w[r + 1], w2 = w[r + 2], w3 = w[r + 3];
    if (w0 == 0.0 && w1 == 0.0 && w2 == 0.0 && w3 == 0.0) continue;
    const double* __restrict a = rows + r * n;
    const double* __restrict b = a + n;
    const double* __restrict c = b + n;
    const double* __restrict e = c + n;
    for (std::size_t i = 0; i < n; ++i) out[i] += w0 * a[i] + w1 * b[i] + w2 * c[i] + w3 * e[i];
  }
  for (; r < n_rows; ++r) {
    const double wv = w[r];
    if (wv == 0.0) continue;
    const double* __restrict a = rows + r * n;
    for (std::size_t i = 0; i < n; ++i) out[i] += wv * a[i];
  }
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& kernels, const Tensor* bias) {
  const auto d = conv_dims(input, kernels, bias);
  const std::size_t plane = d.h * d.w;
  const std::size_t taps = d.c_in * d.k * d.k;
  const auto cols = im2col(input.data().data(), d);
  const double* kw = kernels.data().data();
  Tensor out({d.c_out, d.h, d.w}, 0.0);
  double* y = out.data().data();
  for (std::size_t co = 0; co < d.c_out; ++co) {
    double* yo = y + co * plane;
    if (bias) std::fill(yo, yo + plane, (*bias)[co]);
    axpy_rows(kw + co * taps, cols.data(), taps, plane, yo);
  }
  return out;
}

namespace {

Var conv2d_impl(Var input, Var kernels, const Var* bias) {
  same_tape(input, kernels, "conv2d");
  if (bias) same_tape(input, *bias, "conv2d");
  Tensor out = conv2d_forward(input.value(), kernels.value(), bias ? &bias->value() : nullptr);
  const auto ix = input.id();
  const auto ik = kernels.id();
  std::vector<std::size_t> parents{ix, ik};
  if (bias) parents.push_back(bias->id());
  const bool has_bias = bias != nullptr;
  const auto ib = has_bias ? bias->id() : 0;

  return input.tape().record(std::move(out), parents, [ix, ik, ib, has_bias](Tape& t, const Tensor& g) {
    const Tensor& xin = t.value(ix);
    const Tensor& kin = t.value(ik);
    const auto d = conv_dims(xin, kin, nullptr);
    const std::size_t plane = d.h * d.w;
    const std::size_t taps = d.c_in * d.k * d.k;
    const double* kw = kin.data().data();
    const double* gy = g.data().data();

    if (has_bias && t.needs_grad(ib)) {
      auto gb = t.grad_buffer(ib).data();
      for (std::size_t co = 0; co < d.c_out; ++co) {
        double s = 0.0;
        for (std::size_t i = 0; i < plane; ++i) s += gy[co * plane + i];
        gb[co] += s;
      }
    }
    if (t.needs_grad(ik)) {
      const auto cols = im2col(xin.data().data(), d);
      double* gk = t.grad_buffer(ik).data().data();
      for (std::size_t co = 0; co < d.c_out; ++co) {
        const double* go = gy + co * plane;
        for (std::size_t tap = 0; tap < taps; ++tap) {
          const double* col = cols.data() + tap * plane;
          double acc = 0.0;
          for (std::size_t i = 0; i < plane; ++i) acc += go[i] * col[i];
          gk[co * taps + tap] += acc;
        }
      }
    }
    if (t.needs_grad(ix)) {
      std::vector<double> gcols(taps * plane, 0.0);
      // gcols[tap] = sum over co of w[co][tap] * g[co], blocked over co like the forward pass.
      std::vector<double> wt(d.c_out);
      for (std::size_t tap = 0; tap < taps; ++tap) {
        for (std::size_t co = 0; co < d.c_out; ++co) wt[co] = kw[co * taps + tap];
        axpy_rows(wt.data(), gy, d.c_out, plane, gcols.data() + tap * plane);
      }
      col2im_add(gcols, d, t.grad_buffer(ix).data().data());
    }
  });
}

}  // namespace

Var conv2d(Var input, Var kernels, Var bias) { return conv2d_impl(input, kernels, &bias); }
Var conv2d(Var input, Var kernels) { return conv2d_impl(input, kernels, nullptr); }

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  if (input.rank() != 1 || weights.rank() != 2 || bias.rank() != 1 || weights.extent(1) != input.extent(0) ||
      weights.extent(0) != bias.extent(0)) {
    fail(ErrorKind::ShapeMismatch, "dense: x " + shape_str(input.shape()) + ", W " + shape_str(weights.shape()) +
                                       ", b " + shape_str(bias.shape()));
  }
  const std::size_t m = weights.extent(0);
  const std::size_t n = weights.extent(1);
  Tensor y({m});
  const double* w = weights.data().data();
  const double* x = input.data().data();
  for (std::size_t r = 0; r < m; ++r) {
    double s = bias[r];
    const double* wr = w + r * n;
    for (std::size_t c = 0; c < n; ++c) s += wr[c] * x[c];
    y[r] = s;
  }
  return y;
}

Var dense(Var input, Var weights, Var bias) {
  same_tape(input, weights, "dense");
  same_tape(input, bias, "dense");
  Tensor y = dense_forward(input.value(), weights.value(), bias.value());
  const auto ix = input.id();
  const auto iw = weights.id();
  const auto ib = bias.id();
  return input.tape().record(std::move(y), {ix, iw, ib}, [ix, iw, ib](Tape& t, const Tensor& g) {
    const Tensor& x = t.value(ix);
    const Tensor& w = t.value(iw);
    const std::size_t m = w.extent(0);
    const std::size_t n = w.extent(1);
    if (t.needs_grad(ib)) {
      auto gb = t.grad_buffer(ib).data();
      for (std::size_t r = 0; r < m; ++r) gb[r] += g[r];
    }
    if (t.needs_grad(iw)) {
      double* gw = t.grad_buffer(iw).data().data();
      for (std::size_t r = 0; r < m; ++r) {
        const double gr = g[r];
        if (gr == 0.0) continue;
        double* row = gw + r * n;
        for (std::size_t c = 0; c < n; ++c) row[c] += gr * x[c];
      }
    }
    if (t.needs_grad(ix)) {
      double* gx = t.grad_buffer(ix).data().data();
      const double* wd = w.data().data();
      for (std::size_t r = 0; r < m; ++r) {
        const double gr = g[r];
        if (gr == 0.0) continue;
        const double* row = wd + r * n;
        for (std::size_t c = 0; c < n; ++c) gx[c] += gr * row[c];
      }
    }
  });
}

Var reshape(Var a, Shape shape) {
  Tensor y = a.value().reshaped(std::move(shape));
  const auto ia = a.id();
  return a.tape().record(std::move(y), {ia}, [ia](Tape& t, const Tensor& g) {
    if (!t.needs_grad(ia)) return;
    auto d = t.grad_buffer(ia).data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i];
  });
}

Var dropout(Var a, double rate, Mode mode, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) fail(ErrorKind::BadRate, "dropout rate must be in [0, 1), got " + std::to_string(rate));
  if (mode == Mode::Eval || rate == 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - rate);
  auto mask = std::make_shared<std::vector<double>>(a.value().size());
  Tensor y(a.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double u = unit_real(mix64(hash_key({seed, i})));
    (*mask)[i] = u < rate ? 0.0 : keep_scale;
    y[i] = a.value()[i] * (*mask)[i];
  }
  const auto ia = a.id();
  return a.tape().record(std::move(y), {ia}, [ia, mask](Tape& t, const Tensor& g) {
    if (!t.needs_grad(ia)) return;
    auto d = t.grad_buffer(ia).data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * (*mask)[i];
  });
}

Var mse(Var pred, Var target) {
  same_tape(pred, target, "mse");
  require_same_shape(pred.value(), target.value(), "mse");
  const std::size_t n = pred.value().size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = pred.value()[i] - target.value()[i];
    s += r * r;
  }
  const auto ip = pred.id();
  const auto it = target.id();
  return pred.tape().record(Tensor::scalar(s / static_cast<double>(n)), {ip, it}, [ip, it, n](Tape& t, const Tensor& g) {
    const Tensor& p = t.value(ip);
    const Tensor& q = t.value(it);
    const double c = 2.0 * g[0] / static_cast<double>(n);
    if (t.needs_grad(ip)) {
      auto d = t.grad_buffer(ip).data();
      for (std::size_t i = 0; i < n; ++i) d[i] += c * (p[i] - q[i]);
    }
    if (t.needs_grad(it)) {
      auto d = t.grad_buffer(it).data();
      for (std::size_t i = 0; i < n; ++i) d[i] -= c * (p[i] - q[i]);
    }
  });
}

}  // namespace nino
