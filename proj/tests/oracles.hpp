#pragma once

// Independent test oracles. Everything here recomputes expected values by a
// different route than the library (direct loops, Taylor/moment conditions,
// naive DFT) and must stay free of the implementation paths it checks.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "ppnn/field.hpp"
#include "ppnn/stencil.hpp"

namespace oracle {

// Applies taps to samples of fn on an unwrapped 1D grid at index i; the
// polynomial-exactness reference for stencils.
inline double apply_taps_at(const std::vector<double>& taps, int center,
                            const std::function<double(double)>& fn, double x0,
                            double h, int spacing_power) {
  double acc = 0.0;
  for (std::size_t k = 0; k < taps.size(); ++k) {
    acc += taps[k] * fn(x0 + (static_cast<int>(k) - center) * h);
  }
  double hp = 1.0;
  for (int i = 0; i < spacing_power; ++i) hp *= h;
  return acc / hp;
}

// d-th derivative of x^m.
inline double monomial_derivative(int m, int d, double x) {
  double coeff = 1.0;
  for (int i = 0; i < d; ++i) coeff *= (m - i);
  if (m - d < 0) return 0.0;
  return coeff * std::pow(x, m - d);
}

// Direct triple-loop order-2 periodic Laplacian, the independent check for
// apply_stencil / laplacian.
inline ppnn::Field laplacian2_reference(const ppnn::Field& f) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const double ihx2 = 1.0 / (f.grid.dx() * f.grid.dx());
  const double ihy2 = 1.0 / (f.grid.dy() * f.grid.dy());
  ppnn::Field out(f.grid, f.channels);
  for (int c = 0; c < f.channels; ++c) {
    for (int y = 0; y < ny; ++y) {
      for (int x = 0; x < nx; ++x) {
        const int xm = (x + nx - 1) % nx, xp = (x + 1) % nx;
        const int ym = (y + ny - 1) % ny, yp = (y + 1) % ny;
        out.at(c, y, x) =
            (f.at(c, y, xm) - 2.0 * f.at(c, y, x) + f.at(c, y, xp)) * ihx2 +
            (f.at(c, ym, x) - 2.0 * f.at(c, y, x) + f.at(c, yp, x)) * ihy2;
      }
    }
  }
  return out;
}

// Naive O(n^2) DFT along one axis of a channel; returns per-mode amplitude
// |X_k| for k = 0..n-1, summed over the other axis.
inline std::vector<double> dft_mode_energy(const ppnn::Field& f, int channel,
                                           bool along_x) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const int n = along_x ? nx : ny;
  const int m = along_x ? ny : nx;
  std::vector<double> energy(n, 0.0);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < n; ++k) {
      std::complex<double> acc(0.0, 0.0);
      for (int i = 0; i < n; ++i) {
        const double v = along_x ? f.at(channel, j, i) : f.at(channel, i, j);
        const double ang = -2.0 * M_PI * k * i / n;
        acc += v * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      energy[k] += std::norm(acc);
    }
  }
  return energy;
}

// Bilinear sample of a callable over the periodic unit cell conventions used
// by the grids (point i at i*dx).
inline double eval_on_grid(const ppnn::Grid2D& g, int i, int j,
                           const std::function<double(double, double)>& fn) {
  return fn(i * g.dx(), j * g.dy());
}

}  // namespace oracle
