#pragma once

#include <vector>

#include "ppnn/field.hpp"

namespace ppnn {

enum class Axis { x, y };

// Finite-difference stencil stored as 1D taps applied along one axis with
// periodic index wrap. Tap k acts on index i + (k - center); the accumulated
// sum is divided by h^spacing_power with h the grid spacing of that axis.
struct Stencil {
  std::vector<double> taps;
  int center = 0;
  Axis axis = Axis::x;
  int derivative_order = 0;
  int accuracy_order = 0;
  int spacing_power = 0;
};

// Central second-derivative taps, order 2 or 6.
Stencil second_derivative_stencil(int order, Axis axis = Axis::x);

// 3rd-order upwind-biased first derivative. flow_sign > 0 biases the taps
// against the flow ((2u_{i+1} + 3u_i - 6u_{i-1} + u_{i-2}) / 6h); flow_sign < 0
// is the mirror image.
Stencil first_derivative_upwind3(Axis axis, int flow_sign);

// Checks the moment conditions: taps reproduce d^m/dx^m x^m exactly for all
// m < derivative_order + accuracy_order. Throws ConfigError on failure.
// Every stencil constructor runs this once per coefficient table.
void validate_stencil(const Stencil& s, double tol = 1e-12);

Field apply_stencil(const Field& f, const Stencil& s);

// d2/dx2 + d2/dy2 at the given accuracy order.
Field laplacian(const Field& f, int order);

// Per-axis counts of upwind branch selections, for tests.
struct UpwindStats {
  long long pos_x = 0, neg_x = 0, pos_y = 0, neg_y = 0;
};

// (u d/dx + v d/dy) advected, with the upwind direction per point chosen by
// the sign of the local velocity component (0 counts as positive). velocity
// must have exactly 2 channels on the same grid as advected.
Field upwind_convection(const Field& velocity, const Field& advected,
                        UpwindStats* stats = nullptr);

}  // namespace ppnn
