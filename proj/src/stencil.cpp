#include "ppnn/stencil.hpp"

#include <cmath>
#include <string>

namespace ppnn {

namespace {

double int_pow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

double factorial(int m) {
  double r = 1.0;
  for (int i = 2; i <= m; ++i) r *= i;
  return r;
}

// Channel padded with periodic halo on both axes; row stride nx + 2*halo.
void pad_channel(const Field& f, int c, int halo, std::vector<double>& buf) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const int w = nx + 2 * halo;
  buf.resize(static_cast<std::size_t>(ny + 2 * halo) * w);
  for (int y = -halo; y < ny + halo; ++y) {
    int ys = (y % ny + ny) % ny;
    double* dst = buf.data() + static_cast<std::size_t>(y + halo) * w;
    const double* src = &f.data[(static_cast<std::size_t>(c) * ny + ys) * nx];
    for (int x = -halo; x < nx + halo; ++x) {
      dst[x + halo] = src[(x % nx + nx) % nx];
    }
  }
}

const Stencil& upwind3_x_pos() {
  static const Stencil s = first_derivative_upwind3(Axis::x, +1);
  return s;
}
const Stencil& upwind3_x_neg() {
  static const Stencil s = first_derivative_upwind3(Axis::x, -1);
  return s;
}

}  // namespace

void validate_stencil(const Stencil& s, double tol) {
  const int maxdeg = s.derivative_order + s.accuracy_order - 1;
  for (int m = 0; m <= maxdeg; ++m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < s.taps.size(); ++k) {
      acc += s.taps[k] * int_pow(static_cast<double>(static_cast<int>(k) - s.center), m);
    }
    const double want = (m == s.derivative_order) ? factorial(m) : 0.0;
    if (std::abs(acc - want) > tol * std::max(1.0, std::abs(want))) {
      throw ConfigError("stencil fails moment condition at degree " + std::to_string(m));
    }
  }
}

Stencil second_derivative_stencil(int order, Axis axis) {
  Stencil s;
  s.axis = axis;
  s.derivative_order = 2;
  s.spacing_power = 2;
  if (order == 2) {
    s.taps = {1.0, -2.0, 1.0};
    s.center = 1;
    s.accuracy_order = 2;
  } else if (order == 6) {
    s.taps = {1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0,
              3.0 / 2.0,  -3.0 / 20.0, 1.0 / 90.0};
    s.center = 3;
    s.accuracy_order = 6;
  } else {
    throw ConfigError("second_derivative_stencil: unsupported order " +
                      std::to_string(order));
  }
  validate_stencil(s);
  return s;
}

Stencil first_derivative_upwind3(Axis axis, int flow_sign) {
  Stencil s;
  s.axis = axis;
  s.derivative_order = 1;
  s.accuracy_order = 3;
  s.spacing_power = 1;
  if (flow_sign >= 0) {
    // (u_{i-2} - 6 u_{i-1} + 3 u_i + 2 u_{i+1}) / 6h
    s.taps = {1.0 / 6.0, -1.0, 0.5, 1.0 / 3.0};
    s.center = 2;
  } else {
    s.taps = {-1.0 / 3.0, -0.5, 1.0, -1.0 / 6.0};
    s.center = 1;
  }
  validate_stencil(s);
  return s;
}

Field apply_stencil(const Field& f, const Stencil& s) {
  const int nx = f.grid.nx, ny = f.grid.ny;
  const int left = s.center;
  const int right = static_cast<int>(s.taps.size()) - 1 - s.center;
  const int halo = std::max(left, right);
  const double h = (s.axis == Axis::x) ? f.grid.dx() : f.grid.dy();
  const double hp = int_pow(h, s.spacing_power);

  Field out(f.grid, f.channels);
  out.diverged = f.diverged;
  std::vector<double> buf;
  const int w = nx + 2 * halo;
  for (int c = 0; c < f.channels; ++c) {
    pad_channel(f, c, halo, buf);
    for (int y = 0; y < ny; ++y) {
      const double* base = buf.data() + static_cast<std::size_t>(y + halo) * w + halo;
      double* dst = &out.data[(static_cast<std::size_t>(c) * ny + y) * nx];
      for (std::size_t k = 0; k < s.taps.size(); ++k) {
        const double t = s.taps[k];
        const int off = static_cast<int>(k) - s.center;
        const double* src = (s.axis == Axis::x)
                                ? base + off
                                : buf.data() + static_cast<std::size_t>(y + halo + off) * w + halo;
        for (int x = 0; x < nx; ++x) dst[x] += t * src[x];
      }
      for (int x = 0; x < nx; ++x) dst[x] /= hp;
    }
  }
  return out;
}

Field laplacian(const Field& f, int order) {
  const Stencil sx = second_derivative_stencil(order, Axis::x);
  const int nx = f.grid.nx, ny = f.grid.ny;
  const int halo = sx.center;
  const int w = nx + 2 * halo;
  const double ihx2 = 1.0 / (f.grid.dx() * f.grid.dx());
  const double ihy2 = 1.0 / (f.grid.dy() * f.grid.dy());

  Field out(f.grid, f.channels);
  out.diverged = f.diverged;
  std::vector<double> buf;
  for (int c = 0; c < f.channels; ++c) {
    pad_channel(f, c, halo, buf);
    for (int y = 0; y < ny; ++y) {
      const double* base = buf.data() + static_cast<std::size_t>(y + halo) * w + halo;
      double* dst = &out.data[(static_cast<std::size_t>(c) * ny + y) * nx];
      for (std::size_t k = 0; k < sx.taps.size(); ++k) {
        const int off = static_cast<int>(k) - sx.center;
        const double tx = sx.taps[k] * ihx2;
        const double ty = sx.taps[k] * ihy2;
        const double* srcx = base + off;
        const double* srcy = buf.data() + static_cast<std::size_t>(y + halo + off) * w + halo;
        for (int x = 0; x < nx; ++x) dst[x] += tx * srcx[x] + ty * srcy[x];
      }
    }
  }
  return out;
}

Field upwind_convection(const Field& velocity, const Field& advected,
                        UpwindStats* stats) {
  if (velocity.channels != 2) {
    throw ConfigError("upwind_convection: velocity must have exactly 2 channels");
  }
  if (!(velocity.grid == advected.grid)) {
    throw ConfigError("upwind_convection: grid mismatch");
  }
  const Stencil& pos = upwind3_x_pos();
  const Stencil& neg = upwind3_x_neg();
  const int nx = advected.grid.nx, ny = advected.grid.ny;
  const int halo = 2;
  const int w = nx + 2 * halo;
  const double ihx = 1.0 / advected.grid.dx();
  const double ihy = 1.0 / advected.grid.dy();

  Field out(advected.grid, advected.channels);
  out.diverged = velocity.diverged || advected.diverged;
  std::vector<double> buf;
  for (int c = 0; c < advected.channels; ++c) {
    pad_channel(advected, c, halo, buf);
    for (int y = 0; y < ny; ++y) {
      const double* row = buf.data() + static_cast<std::size_t>(y + halo) * w + halo;
      double* dst = &out.data[(static_cast<std::size_t>(c) * ny + y) * nx];
      for (int x = 0; x < nx; ++x) {
        const double un = velocity.at(0, y, x);
        const double vn = velocity.at(1, y, x);
        const Stencil& su = (un >= 0.0) ? pos : neg;
        const Stencil& sv = (vn >= 0.0) ? pos : neg;
        double ddx = 0.0;
        for (int k = 0; k < 4; ++k) ddx += su.taps[k] * row[x + k - su.center];
        double ddy = 0.0;
        for (int k = 0; k < 4; ++k) {
          ddy += sv.taps[k] *
                 buf[static_cast<std::size_t>(y + halo + k - sv.center) * w + halo + x];
        }
        dst[x] = un * ddx * ihx + vn * ddy * ihy;
        if (stats && c == 0) {
          (un >= 0.0 ? stats->pos_x : stats->neg_x) += 1;
          (vn >= 0.0 ? stats->pos_y : stats->neg_y) += 1;
        }
      }
    }
  }
  return out;
}

}  // namespace ppnn
