#pragma once

#include <cmath>
#include <vector>

#include "ppnn/autodiff.hpp"

namespace ppnn::ad {

struct AdamHyper {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over a fixed list of parameters. The update is
// theta -= lr * mhat / sqrt(vhat + eps).
template <typename T>
class AdamState {
 public:
  AdamState(std::vector<Parameter<T>*> params, AdamHyper hyper)
      : params_(std::move(params)), hyper_(hyper) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (Parameter<T>* p : params_) {
      m_.emplace_back(p->size(), T(0));
      v_.emplace_back(p->size(), T(0));
    }
  }

  long long step_count() const { return t_; }
  const AdamHyper& hyper() const { return hyper_; }

  // Consumes the gradients currently in each parameter; does not zero them.
  void step() {
    ++t_;
    const double c1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(t_));
    const T b1 = static_cast<T>(hyper_.beta1);
    const T b2 = static_cast<T>(hyper_.beta2);
    for (std::size_t k = 0; k < params_.size(); ++k) {
      Parameter<T>& p = *params_[k];
      std::vector<T>& m = m_[k];
      std::vector<T>& v = v_[k];
      for (std::size_t i = 0; i < p.size(); ++i) {
        const T g = p.grad[i];
        m[i] = b1 * m[i] + (T(1) - b1) * g;
        v[i] = b2 * v[i] + (T(1) - b2) * g * g;
        const double mhat = static_cast<double>(m[i]) / c1;
        const double vhat = static_cast<double>(v[i]) / c2;
        p.value[i] -= static_cast<T>(hyper_.lr * mhat / std::sqrt(vhat + hyper_.eps));
      }
    }
  }

  void zero_grad() {
    for (Parameter<T>* p : params_) p->zero_grad();
  }

 private:
  std::vector<Parameter<T>*> params_;
  AdamHyper hyper_;
  long long t_ = 0;
  std::vector<std::vector<T>> m_, v_;
};

}  // namespace ppnn::ad
