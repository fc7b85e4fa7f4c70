#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ppnn/errors.hpp"

namespace ppnn::ad {

using Shape = std::vector<int>;

inline std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) n *= static_cast<std::size_t>(d);
  return n;
}

// Named trainable tensor. Lives outside any graph; graphs reference it via
// param leaves and deliver gradients through Graph::apply_param_grads, so
// independent per-sample graphs can run concurrently and reduce in a fixed
// order.
template <typename T>
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;

  Parameter(std::string n, Shape s)
      : name(std::move(n)), shape(std::move(s)),
        value(shape_size(shape), T(0)), grad(shape_size(shape), T(0)) {}

  void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
  std::size_t size() const { return value.size(); }
};

struct Padding {
  enum class Kind { zero, periodic };
  Kind kind = Kind::zero;
  int amount = 0;

  static Padding zero(int p) { return {Kind::zero, p}; }
  static Padding periodic() { return {Kind::periodic, 0}; }
};

namespace detail {
inline int div_floor(int a, int b) {
  int q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
inline int div_ceil(int a, int b) { return -div_floor(-a, b); }
inline int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}
}  // namespace detail

// Tape of operations recorded during one forward pass. Node ids are ints;
// creation order is the topological order, and backward() walks it in
// reverse. A graph constructed with record=false skips closure creation and
// only supports forward evaluation.
template <typename T>
class Graph {
 public:
  using Id = int;

  explicit Graph(bool record = true) : record_(record) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Id input(Shape shape, std::vector<T> v) {
    if (shape_size(shape) != v.size()) throw ConfigError("input: shape/value mismatch");
    return push(std::move(shape), std::move(v), false, nullptr);
  }

  Id param(Parameter<T>& p) {
    return push(p.shape, p.value, record_, &p);
  }

  const Shape& shape(Id i) const { return nodes_[i].shape; }
  const std::vector<T>& value(Id i) const { return nodes_[i].val; }
  // Gradient buffer of a node (empty if backward never reached it).
  const std::vector<T>& grad_of(Id i) const { return nodes_[i].grad; }

  // --- ops ------------------------------------------------------------

  Id conv2d(Id x, Id w, Id b, int stride, Padding pad) {
    const Shape& xs = shape(x);
    const Shape& ws = shape(w);
    const Shape& bs = shape(b);
    if (xs.size() != 3 || ws.size() != 4 || bs.size() != 1) {
      throw ConfigError("conv2d: expects x[C,H,W], w[Co,Ci,kh,kw], b[Co]");
    }
    const int ci = xs[0], h = xs[1], wd = xs[2];
    const int co = ws[0], kh = ws[2], kw = ws[3];
    if (ws[1] != ci) throw ConfigError("conv2d: channel mismatch");
    if (bs[0] != co) throw ConfigError("conv2d: bias size mismatch");
    if (stride < 1) throw ConfigError("conv2d: stride must be >= 1");

    int ho, wo;
    if (pad.kind == Padding::Kind::periodic) {
      if (stride != 1) throw ConfigError("conv2d: periodic padding requires stride 1");
      ho = h;
      wo = wd;
    } else {
      if ((h + 2 * pad.amount - kh) % stride != 0 ||
          (wd + 2 * pad.amount - kw) % stride != 0) {
        throw ConfigError("conv2d: output size is not an integer (stride arithmetic)");
      }
      ho = (h + 2 * pad.amount - kh) / stride + 1;
      wo = (wd + 2 * pad.amount - kw) / stride + 1;
      if (ho < 1 || wo < 1) throw ConfigError("conv2d: kernel exceeds padded input");
    }

    std::vector<T> out(static_cast<std::size_t>(co) * ho * wo);
    const T* xv = nodes_[x].val.data();
    const T* wv = nodes_[w].val.data();
    const T* bv = nodes_[b].val.data();
    if (pad.kind == Padding::Kind::periodic) {
      conv_forward_periodic(xv, wv, bv, out.data(), ci, h, wd, co, kh, kw);
    } else {
      conv_forward_zero(xv, wv, bv, out.data(), ci, h, wd, co, kh, kw, stride,
                        pad.amount, ho, wo);
    }

    Id y = push({co, ho, wo}, std::move(out), needs(x) || needs(w) || needs(b),
                nullptr);
    if (record_ && nodes_[y].needs_grad) {
      nodes_[y].back = [this, x, w, b, y, stride, pad, ci, h, wd, co, kh, kw, ho, wo] {
        const std::vector<T>& gy = nodes_[y].grad;
        if (needs(b)) {
          std::vector<T>& gb = grad_buf(b);
          for (int oc = 0; oc < co; ++oc) {
            double acc = 0.0;
            const T* gyp = gy.data() + static_cast<std::size_t>(oc) * ho * wo;
            for (int i = 0; i < ho * wo; ++i) acc += gyp[i];
            gb[oc] += static_cast<T>(acc);
          }
        }
        if (pad.kind == Padding::Kind::periodic) {
          if (needs(w)) {
            conv_backward_w_periodic(nodes_[x].val.data(), gy.data(),
                                     grad_buf(w).data(), ci, h, wd, co, kh, kw);
          }
          if (needs(x)) {
            conv_backward_x_periodic(nodes_[w].val.data(), gy.data(),
                                     grad_buf(x).data(), ci, h, wd, co, kh, kw);
          }
        } else {
          if (needs(w)) {
            conv_backward_w_zero(nodes_[x].val.data(), gy.data(), grad_buf(w).data(),
                                 ci, h, wd, co, kh, kw, stride, pad.amount, ho, wo);
          }
          if (needs(x)) {
            conv_backward_x_zero(nodes_[w].val.data(), gy.data(), grad_buf(x).data(),
                                 ci, h, wd, co, kh, kw, stride, pad.amount, ho, wo);
          }
        }
      };
    }
    return y;
  }

  Id relu(Id x) {
    std::vector<T> out = nodes_[x].val;
    for (T& v : out) v = v > T(0) ? v : T(0);
    Id y = push(shape(x), std::move(out), needs(x), nullptr);
    if (record_ && nodes_[y].needs_grad) {
      nodes_[y].back = [this, x, y] {
        const std::vector<T>& gy = nodes_[y].grad;
        const std::vector<T>& xv = nodes_[x].val;
        std::vector<T>& gx = grad_buf(x);
        for (std::size_t i = 0; i < gx.size(); ++i) {
          if (xv[i] > T(0)) gx[i] += gy[i];
        }
      };
    }
    return y;
  }

  // Normalizes jointly over every element of x, then applies the elementwise
  // affine map gain * xhat + bias. gain and bias share x's shape.
  Id layer_norm(Id x, Id gain, Id bias, T eps) {
    if (shape(gain) != shape(x) || shape(bias) != shape(x)) {
      throw ConfigError("layer_norm: gain/bias must match x's shape");
    }
    if (!(eps > T(0))) throw ConfigError("layer_norm: eps must be positive");
    const std::vector<T>& xv = nodes_[x].val;
    const std::size_t n = xv.size();
    double mu = 0.0;
    for (T v : xv) mu += v;
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (T v : xv) {
      const double d = v - mu;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + static_cast<double>(eps));

    std::vector<T> xhat(n), out(n);
    const T* gv = nodes_[gain].val.data();
    const T* bv = nodes_[bias].val.data();
    for (std::size_t i = 0; i < n; ++i) {
      xhat[i] = static_cast<T>((xv[i] - mu) * inv);
      out[i] = gv[i] * xhat[i] + bv[i];
    }

    Id y = push(shape(x), std::move(out), needs(x) || needs(gain) || needs(bias),
                nullptr);
    if (record_ && nodes_[y].needs_grad) {
      auto xh = std::make_shared<std::vector<T>>(std::move(xhat));
      nodes_[y].back = [this, x, gain, bias, y, xh, inv] {
        const std::vector<T>& gy = nodes_[y].grad;
        const std::size_t n2 = gy.size();
        const T* gv2 = nodes_[gain].val.data();
        if (needs(gain)) {
          std::vector<T>& gg = grad_buf(gain);
          for (std::size_t i = 0; i < n2; ++i) gg[i] += gy[i] * (*xh)[i];
        }
        if (needs(bias)) {
          std::vector<T>& gb = grad_buf(bias);
          for (std::size_t i = 0; i < n2; ++i) gb[i] += gy[i];
        }
        if (needs(x)) {
          double s1 = 0.0, s2 = 0.0;
          for (std::size_t i = 0; i < n2; ++i) {
            const double gh = static_cast<double>(gy[i]) * gv2[i];
            s1 += gh;
            s2 += gh * (*xh)[i];
          }
          s1 /= static_cast<double>(n2);
          s2 /= static_cast<double>(n2);
          std::vector<T>& gx = grad_buf(x);
          for (std::size_t i = 0; i < n2; ++i) {
            const double gh = static_cast<double>(gy[i]) * gv2[i];
            gx[i] += static_cast<T>((gh - s1 - (*xh)[i] * s2) * inv);
          }
        }
      };
    }
    return y;
  }

  // out(c, r*h + a, r*w + b) = in(c*r^2 + a*r + b, h, w)
  Id pixel_shuffle(Id x, int r) {
    const Shape& xs = shape(x);
    if (xs.size() != 3) throw ConfigError("pixel_shuffle: expects [C,H,W]");
    const int c_in = xs[0], h = xs[1], w = xs[2];
    if (r < 1 || c_in % (r * r) != 0) {
      throw ConfigError("pixel_shuffle: channels not divisible by r^2");
    }
    const int c_out = c_in / (r * r);
    std::vector<T> out(nodes_[x].val.size());
    const T* xv = nodes_[x].val.data();
    for (int c = 0; c < c_out; ++c) {
      for (int a = 0; a < r; ++a) {
        for (int bsub = 0; bsub < r; ++bsub) {
          const T* src = xv + (static_cast<std::size_t>(c) * r * r + a * r + bsub) * h * w;
          for (int yy = 0; yy < h; ++yy) {
            for (int xx = 0; xx < w; ++xx) {
              out[(static_cast<std::size_t>(c) * h * r + yy * r + a) * (w * r) +
                  xx * r + bsub] = src[static_cast<std::size_t>(yy) * w + xx];
            }
          }
        }
      }
    }
    Id y = push({c_out, h * r, w * r}, std::move(out), needs(x), nullptr);
    if (record_ && nodes_[y].needs_grad) {
      nodes_[y].back = [this, x, y, r, c_out, h, w] {
        const std::vector<T>& gy = nodes_[y].grad;
        std::vector<T>& gx = grad_buf(x);
        for (int c = 0; c < c_out; ++c) {
          for (int a = 0; a < r; ++a) {
            for (int bsub = 0; bsub < r; ++bsub) {
              T* dst = gx.data() +
                       (static_cast<std::size_t>(c) * r * r + a * r + bsub) * h * w;
              for (int yy = 0; yy < h; ++yy) {
                for (int xx = 0; xx < w; ++xx) {
                  dst[static_cast<std::size_t>(yy) * w + xx] +=
                      gy[(static_cast<std::size_t>(c) * h * r + yy * r + a) * (w * r) +
                         xx * r + bsub];
                }
              }
            }
          }
        }
      };
    }
    return y;
  }

  // scalar * (col (x) row) as a single channel.
  Id rank1_param_map(T scalar, Id col, Id row) {
    const Shape& cs = shape(col);
    const Shape& rs = shape(row);
    if (cs.size() != 2 || cs[1] != 1 || rs.size() != 2 || rs[0] != 1) {
      throw ConfigError("rank1_param_map: col must be [ny,1] and row [1,nx]");
    }
    const int ny = cs[0], nx = rs[1];
    std::vector<T> out(static_cast<std::size_t>(ny) * nx);
    const T* cv = nodes_[col].val.data();
    const T* rv = nodes_[row].val.data();
    for (int i = 0; i < ny; ++i) {
      for (int j = 0; j < nx; ++j) {
        out[static_cast<std::size_t>(i) * nx + j] = scalar * cv[i] * rv[j];
      }
    }
    Id y = push({1, ny, nx}, std::move(out), needs(col) || needs(row), nullptr);
    if (record_ && nodes_[y].needs_grad) {
      nodes_[y].back = [this, col, row, y, scalar, ny, nx] {
        const std::vector<T>& gy = nodes_[y].grad;
        const T* cv2 = nodes_[col].val.data();
        const T* rv2 = nodes_[row].val.data();
        if (needs(col)) {
          std::vector<T>& gc = grad_buf(col);
          for (int i = 0; i < ny; ++i) {
            double acc = 0.0;
            for (int j = 0; j < nx; ++j) {
              acc += static_cast<double>(gy[static_cast<std::size_t>(i) * nx + j]) * rv2[j];
            }
            gc[i] += static_cast<T>(scalar * acc);
          }
        }
        if (needs(row)) {
          std::vector<T>& gr = grad_buf(row);
          for (int j = 0; j < nx; ++j) {
            double acc = 0.0;
            for (int i = 0; i < ny; ++i) {
              acc += static_cast<double>(gy[static_cast<std::size_t>(i) * nx + j]) * cv2[i];
            }
            gr[j] += static_cast<T>(scalar * acc);
          }
        }
      };
    }
    return y;
  }

  Id add(Id a, Id b) {
    if (shape(a) != shape(b)) throw ConfigError("add: shape mismatch");
    std::vector<T> out = nodes_[a].val;
    const std::vector<T>& bv = nodes_[b].val;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    Id y = push(shape(a), std::move(out), needs(a) || needs(b), nullptr);
    if (record_ && nodes_[y].needs_grad) {
      nodes_[y].back = [this, a, b, y] {
        const std::vector<T>& gy = nodes_[y].grad;
        if (needs(a)) {
          std::vector<T>& ga = grad_buf(a);
          for (std::size_t i = 0; i < gy.size(); ++i) ga[i] += gy[i];
        }
        if (needs(b)) {
          std::vector<T>& gb = grad_buf(b);
          for (std::size_t i = 0; i < gy.size(); ++i) gb[i] += gy[i];
        }
      };
    }
    return y;
  }

  Id concat_channels(const std::vector<Id>& xs) {
    if (xs.empty()) throw ConfigError("concat_channels: no inputs");
    const Shape& s0 = shape(xs[0]);
    if (s0.size() != 3) throw ConfigError("concat_channels: expects [C,H,W]");
    int ctot = 0;
    bool ng = false;
    for (Id x : xs) {
      const Shape& s = shape(x);
      if (s.size() != 3 || s[1] != s0[1] || s[2] != s0[2]) {
        throw ConfigError("concat_channels: spatial shape mismatch");
      }
      ctot += s[0];
      ng = ng || needs(x);
    }
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(ctot) * s0[1] * s0[2]);
    for (Id x : xs) {
      const std::vector<T>& v = nodes_[x].val;
      out.insert(out.end(), v.begin(), v.end());
    }
    Id y = push({ctot, s0[1], s0[2]}, std::move(out), ng, nullptr);
    if (record_ && nodes_[y].needs_grad) {
      std::vector<Id> inputs = xs;
      nodes_[y].back = [this, inputs, y] {
        const std::vector<T>& gy = nodes_[y].grad;
        std::size_t off = 0;
        for (Id x : inputs) {
          const std::size_t n = nodes_[x].val.size();
          if (needs(x)) {
            std::vector<T>& gx = grad_buf(x);
            for (std::size_t i = 0; i < n; ++i) gx[i] += gy[off + i];
          }
          off += n;
        }
      };
    }
    return y;
  }

  Id scale(Id x, T s) {
    std::vector<T> out = nodes_[x].val;
    for (T& v : out) v *= s;
    Id y = push(shape(x), std::move(out), needs(x), nullptr);
    if (record_ && nodes_[y].needs_grad) {
      nodes_[y].back = [this, x, y, s] {
        const std::vector<T>& gy = nodes_[y].grad;
        std::vector<T>& gx = grad_buf(x);
        for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += s * gy[i];
      };
    }
    return y;
  }

  Id mse_loss(Id pred, Id target) {
    if (shape(pred) != shape(target)) throw ConfigError("mse_loss: shape mismatch");
    const std::vector<T>& pv = nodes_[pred].val;
    const std::vector<T>& tv = nodes_[target].val;
    const std::size_t n = pv.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(pv[i]) - tv[i];
      acc += d * d;
    }
    Id y = push({1}, {static_cast<T>(acc / static_cast<double>(n))},
                needs(pred) || needs(target), nullptr);
    if (record_ && nodes_[y].needs_grad) {
      nodes_[y].back = [this, pred, target, y, n] {
        const T g = nodes_[y].grad[0];
        const std::vector<T>& pv2 = nodes_[pred].val;
        const std::vector<T>& tv2 = nodes_[target].val;
        const T c = static_cast<T>(2.0 / static_cast<double>(n)) * g;
        if (needs(pred)) {
          std::vector<T>& gp = grad_buf(pred);
          for (std::size_t i = 0; i < n; ++i) gp[i] += c * (pv2[i] - tv2[i]);
        }
        if (needs(target)) {
          std::vector<T>& gt = grad_buf(target);
          for (std::size_t i = 0; i < n; ++i) gt[i] -= c * (pv2[i] - tv2[i]);
        }
      };
    }
    return y;
  }

  Id sum(Id x) {
    const std::vector<T>& xv = nodes_[x].val;
    double acc = 0.0;
    for (T v : xv) acc += v;
    Id y = push({1}, {static_cast<T>(acc)}, needs(x), nullptr);
    if (record_ && nodes_[y].needs_grad) {
      nodes_[y].back = [this, x, y] {
        const T g = nodes_[y].grad[0];
        std::vector<T>& gx = grad_buf(x);
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
      };
    }
    return y;
  }

  // Elementwise dot with fixed weights, reduced to a scalar; a convenient
  // scalarizer for gradient checks.
  Id weighted_sum(Id x, const std::vector<T>& wts) {
    const std::vector<T>& xv = nodes_[x].val;
    if (xv.size() != wts.size()) throw ConfigError("weighted_sum: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) acc += static_cast<double>(xv[i]) * wts[i];
    Id y = push({1}, {static_cast<T>(acc)}, needs(x), nullptr);
    if (record_ && nodes_[y].needs_grad) {
      auto w = std::make_shared<std::vector<T>>(wts);
      nodes_[y].back = [this, x, y, w] {
        const T g = nodes_[y].grad[0];
        std::vector<T>& gx = grad_buf(x);
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g * (*w)[i];
      };
    }
    return y;
  }

  // --- backward --------------------------------------------------------

  void backward(Id loss) {
    if (!record_) throw ConfigError("backward: graph was built without recording");
    if (ran_backward_) throw ConfigError("backward: already run on this graph");
    if (shape_size(shape(loss)) != 1) throw ConfigError("backward: loss must be scalar");
    ran_backward_ = true;
    grad_buf(loss)[0] = T(1);
    for (Id i = loss; i >= 0; --i) {
      Node& node = nodes_[i];
      if (node.back && !node.grad.empty()) node.back();
    }
  }

  // Adds scale * (leaf gradients) into the bound Parameters, in leaf creation
  // order. Call once per graph after backward().
  void apply_param_grads(T scl = T(1)) {
    for (Node& node : nodes_) {
      if (node.param && !node.grad.empty()) {
        for (std::size_t i = 0; i < node.grad.size(); ++i) {
          node.param->grad[i] += scl * node.grad[i];
        }
      }
    }
  }

  // Moves the leaf gradients out of the graph (leaf creation order), so a
  // worker thread can hand them to a fixed-order reduction.
  std::vector<std::pair<Parameter<T>*, std::vector<T>>> take_param_grads() {
    std::vector<std::pair<Parameter<T>*, std::vector<T>>> out;
    for (Node& node : nodes_) {
      if (node.param && !node.grad.empty()) {
        out.emplace_back(node.param, std::move(node.grad));
      }
    }
    return out;
  }

 private:
  struct Node {
    Shape shape;
    std::vector<T> val;
    std::vector<T> grad;
    bool needs_grad = false;
    Parameter<T>* param = nullptr;
    std::function<void()> back;
  };

  std::vector<Node> nodes_;
  bool record_;
  bool ran_backward_ = false;

  bool needs(Id i) const { return nodes_[i].needs_grad; }

  std::vector<T>& grad_buf(Id i) {
    Node& node = nodes_[i];
    if (node.grad.empty()) node.grad.assign(node.val.size(), T(0));
    return node.grad;
  }

  Id push(Shape shape, std::vector<T> val, bool needs_grad, Parameter<T>* p) {
    Node node;
    node.shape = std::move(shape);
    node.val = std::move(val);
    node.needs_grad = needs_grad;
    node.param = p;
    nodes_.push_back(std::move(node));
    return static_cast<Id>(nodes_.size()) - 1;
  }

  // --- conv kernels ------------------------------------------------------

  static void conv_forward_zero(const T* x, const T* w, const T* b, T* y, int ci,
                                int h, int wd, int co, int kh, int kw, int stride,
                                int p, int ho, int wo) {
    using detail::div_ceil;
    using detail::div_floor;
    for (int oc = 0; oc < co; ++oc) {
      T* yp = y + static_cast<std::size_t>(oc) * ho * wo;
      for (int i = 0; i < ho * wo; ++i) yp[i] = b[oc];
      for (int ic = 0; ic < ci; ++ic) {
        const T* xp = x + static_cast<std::size_t>(ic) * h * wd;
        for (int ky = 0; ky < kh; ++ky) {
          const int oy_lo = std::max(0, div_ceil(p - ky, stride));
          const int oy_hi = std::min(ho - 1, div_floor(h - 1 + p - ky, stride));
          for (int kx = 0; kx < kw; ++kx) {
            const T wv = w[((static_cast<std::size_t>(oc) * ci + ic) * kh + ky) * kw + kx];
            const int ox_lo = std::max(0, div_ceil(p - kx, stride));
            const int ox_hi = std::min(wo - 1, div_floor(wd - 1 + p - kx, stride));
            for (int oy = oy_lo; oy <= oy_hi; ++oy) {
              const T* xrow = xp + static_cast<std::size_t>(oy * stride + ky - p) * wd;
              T* yrow = yp + static_cast<std::size_t>(oy) * wo;
              if (stride == 1) {
                const T* xq = xrow + kx - p;
                for (int ox = ox_lo; ox <= ox_hi; ++ox) yrow[ox] += wv * xq[ox];
              } else {
                for (int ox = ox_lo; ox <= ox_hi; ++ox) {
                  yrow[ox] += wv * xrow[ox * stride + kx - p];
                }
              }
            }
          }
        }
      }
    }
  }

  static void conv_backward_x_zero(const T* w, const T* gy, T* gx, int ci, int h,
                                   int wd, int co, int kh, int kw, int stride,
                                   int p, int ho, int wo) {
    using detail::div_ceil;
    using detail::div_floor;
    for (int oc = 0; oc < co; ++oc) {
      const T* gyp = gy + static_cast<std::size_t>(oc) * ho * wo;
      for (int ic = 0; ic < ci; ++ic) {
        T* gxp = gx + static_cast<std::size_t>(ic) * h * wd;
        for (int ky = 0; ky < kh; ++ky) {
          const int oy_lo = std::max(0, div_ceil(p - ky, stride));
          const int oy_hi = std::min(ho - 1, div_floor(h - 1 + p - ky, stride));
          for (int kx = 0; kx < kw; ++kx) {
            const T wv = w[((static_cast<std::size_t>(oc) * ci + ic) * kh + ky) * kw + kx];
            const int ox_lo = std::max(0, div_ceil(p - kx, stride));
            const int ox_hi = std::min(wo - 1, div_floor(wd - 1 + p - kx, stride));
            for (int oy = oy_lo; oy <= oy_hi; ++oy) {
              T* gxrow = gxp + static_cast<std::size_t>(oy * stride + ky - p) * wd;
              const T* gyrow = gyp + static_cast<std::size_t>(oy) * wo;
              if (stride == 1) {
                T* gq = gxrow + kx - p;
                for (int ox = ox_lo; ox <= ox_hi; ++ox) gq[ox] += wv * gyrow[ox];
              } else {
                for (int ox = ox_lo; ox <= ox_hi; ++ox) {
                  gxrow[ox * stride + kx - p] += wv * gyrow[ox];
                }
              }
            }
          }
        }
      }
    }
  }

  static void conv_backward_w_zero(const T* x, const T* gy, T* gw, int ci, int h,
                                   int wd, int co, int kh, int kw, int stride,
                                   int p, int ho, int wo) {
    using detail::div_ceil;
    using detail::div_floor;
    for (int oc = 0; oc < co; ++oc) {
      const T* gyp = gy + static_cast<std::size_t>(oc) * ho * wo;
      for (int ic = 0; ic < ci; ++ic) {
        const T* xp = x + static_cast<std::size_t>(ic) * h * wd;
        for (int ky = 0; ky < kh; ++ky) {
          const int oy_lo = std::max(0, div_ceil(p - ky, stride));
          const int oy_hi = std::min(ho - 1, div_floor(h - 1 + p - ky, stride));
          for (int kx = 0; kx < kw; ++kx) {
            const int ox_lo = std::max(0, div_ceil(p - kx, stride));
            const int ox_hi = std::min(wo - 1, div_floor(wd - 1 + p - kx, stride));
            double acc = 0.0;
            for (int oy = oy_lo; oy <= oy_hi; ++oy) {
              const T* xrow = xp + static_cast<std::size_t>(oy * stride + ky - p) * wd;
              const T* gyrow = gyp + static_cast<std::size_t>(oy) * wo;
              if (stride == 1) {
                const T* xq = xrow + kx - p;
                for (int ox = ox_lo; ox <= ox_hi; ++ox) {
                  acc += static_cast<double>(gyrow[ox]) * xq[ox];
                }
              } else {
                for (int ox = ox_lo; ox <= ox_hi; ++ox) {
                  acc += static_cast<double>(gyrow[ox]) * xrow[ox * stride + kx - p];
                }
              }
            }
            gw[((static_cast<std::size_t>(oc) * ci + ic) * kh + ky) * kw + kx] +=
                static_cast<T>(acc);
          }
        }
      }
    }
  }

  static void conv_forward_periodic(const T* x, const T* w, const T* b, T* y,
                                    int ci, int h, int wd, int co, int kh, int kw) {
    using detail::wrap;
    const int oy0 = (kh - 1) / 2, ox0 = (kw - 1) / 2;
    for (int oc = 0; oc < co; ++oc) {
      T* yp = y + static_cast<std::size_t>(oc) * h * wd;
      for (int i = 0; i < h * wd; ++i) yp[i] = b[oc];
      for (int ic = 0; ic < ci; ++ic) {
        const T* xp = x + static_cast<std::size_t>(ic) * h * wd;
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            const T wv = w[((static_cast<std::size_t>(oc) * ci + ic) * kh + ky) * kw + kx];
            for (int oy = 0; oy < h; ++oy) {
              const int iy = wrap(oy + ky - oy0, h);
              const T* xrow = xp + static_cast<std::size_t>(iy) * wd;
              T* yrow = yp + static_cast<std::size_t>(oy) * wd;
              for (int ox = 0; ox < wd; ++ox) {
                yrow[ox] += wv * xrow[wrap(ox + kx - ox0, wd)];
              }
            }
          }
        }
      }
    }
  }

  static void conv_backward_x_periodic(const T* w, const T* gy, T* gx, int ci,
                                       int h, int wd, int co, int kh, int kw) {
    using detail::wrap;
    const int oy0 = (kh - 1) / 2, ox0 = (kw - 1) / 2;
    for (int oc = 0; oc < co; ++oc) {
      const T* gyp = gy + static_cast<std::size_t>(oc) * h * wd;
      for (int ic = 0; ic < ci; ++ic) {
        T* gxp = gx + static_cast<std::size_t>(ic) * h * wd;
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            const T wv = w[((static_cast<std::size_t>(oc) * ci + ic) * kh + ky) * kw + kx];
            for (int oy = 0; oy < h; ++oy) {
              const int iy = wrap(oy + ky - oy0, h);
              T* gxrow = gxp + static_cast<std::size_t>(iy) * wd;
              const T* gyrow = gyp + static_cast<std::size_t>(oy) * wd;
              for (int ox = 0; ox < wd; ++ox) {
                gxrow[wrap(ox + kx - ox0, wd)] += wv * gyrow[ox];
              }
            }
          }
        }
      }
    }
  }

  static void conv_backward_w_periodic(const T* x, const T* gy, T* gw, int ci,
                                       int h, int wd, int co, int kh, int kw) {
    using detail::wrap;
    const int oy0 = (kh - 1) / 2, ox0 = (kw - 1) / 2;
    for (int oc = 0; oc < co; ++oc) {
      const T* gyp = gy + static_cast<std::size_t>(oc) * h * wd;
      for (int ic = 0; ic < ci; ++ic) {
        const T* xp = x + static_cast<std::size_t>(ic) * h * wd;
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            double acc = 0.0;
            for (int oy = 0; oy < h; ++oy) {
              const int iy = wrap(oy + ky - oy0, h);
              const T* xrow = xp + static_cast<std::size_t>(iy) * wd;
              const T* gyrow = gyp + static_cast<std::size_t>(oy) * wd;
              for (int ox = 0; ox < wd; ++ox) {
                acc += static_cast<double>(gyrow[ox]) * xrow[wrap(ox + kx - ox0, wd)];
              }
            }
            gw[((static_cast<std::size_t>(oc) * ci + ic) * kh + ky) * kw + kx] +=
                static_cast<T>(acc);
          }
        }
      }
    }
  }
};

}  // namespace ppnn::ad
