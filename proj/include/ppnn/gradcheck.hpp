#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ppnn/autodiff.hpp"

namespace ppnn::ad {

struct GradcheckReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  long long n_coords = 0;
};

// Central-difference check of analytic gradients, double precision only.
//
// loss(with_grad): builds a fresh graph from the parameters' current values
// and returns the scalar loss; when with_grad, it must also run backward and
// apply_param_grads(1) so the analytic gradients land in param.grad.
//
// The relative error denominator is floored to keep finite-difference noise
// on near-zero gradients from dominating the report.
inline GradcheckReport gradcheck(const std::function<double(bool)>& loss,
                                 const std::vector<Parameter<double>*>& params,
                                 double h = 1e-6, double denom_floor = 1e-3) {
  GradcheckReport rep;
  for (Parameter<double>* p : params) p->zero_grad();
  loss(true);

  for (Parameter<double>* p : params) {
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double keep = p->value[i];
      p->value[i] = keep + h;
      const double fp = loss(false);
      p->value[i] = keep - h;
      const double fm = loss(false);
      p->value[i] = keep;
      const double fd = (fp - fm) / (2.0 * h);
      const double g = p->grad[i];
      const double abs_err = std::abs(fd - g);
      const double rel =
          abs_err / std::max({denom_floor, std::abs(fd), std::abs(g)});
      rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
      rep.max_rel_err = std::max(rep.max_rel_err, rel);
      ++rep.n_coords;
    }
  }
  return rep;
}

}  // namespace ppnn::ad
