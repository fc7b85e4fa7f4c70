#include "ppnn/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ppnn {

Grid2D make_grid(int nx, int ny, double lx, double ly) {
  if (nx < 4 || ny < 4) {
    throw ConfigError("grid must have at least 4 points per axis, got " +
                      std::to_string(nx) + "x" + std::to_string(ny));
  }
  if (!(lx > 0.0) || !(ly > 0.0)) {
    throw ConfigError("grid domain lengths must be positive");
  }
  return Grid2D{nx, ny, lx, ly};
}

Field constant_field(const Grid2D& grid, int channels, double value) {
  if (channels < 1) throw ConfigError("field needs at least one channel");
  Field f(grid, channels);
  std::fill(f.data.begin(), f.data.end(), value);
  return f;
}

bool all_finite(const Field& f) {
  for (double v : f.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double l2_norm(const Field& f) {
  if (f.diverged) throw DivergedError("l2_norm of a diverged field");
  double acc = 0.0;
  for (double v : f.data) acc += v * v;
  double n = std::sqrt(acc);
  if (!std::isfinite(n)) throw DivergedError("l2_norm: field has non-finite entries");
  return n;
}

Field linear_rescale(const Field& f, double lo, double hi) {
  if (!(hi > lo)) throw ConfigError("linear_rescale: hi must exceed lo");
  auto [mn_it, mx_it] = std::minmax_element(f.data.begin(), f.data.end());
  double mn = *mn_it, mx = *mx_it;
  if (!(mx > mn)) throw ConfigError("linear_rescale: constant field has no min-max map");
  Field out = f;
  double s = (hi - lo) / (mx - mn);
  for (double& v : out.data) v = lo + (v - mn) * s;
  return out;
}

namespace {

struct TapTable {
  std::vector<int> base;      // leftmost source index per output point (unwrapped)
  std::vector<double> w;      // ntaps weights per output point
  int ntaps = 0;
};

// Source coordinate of output point i is i * n_src / n_dst in source index
// space; both grids anchor point 0 at the physical origin.
TapTable bilinear_table(int n_dst, int n_src) {
  TapTable t;
  t.ntaps = 2;
  t.base.resize(n_dst);
  t.w.resize(2 * static_cast<std::size_t>(n_dst));
  for (int i = 0; i < n_dst; ++i) {
    double x = static_cast<double>(i) * n_src / n_dst;
    int i0 = static_cast<int>(std::floor(x));
    double u = x - i0;
    t.base[i] = i0;
    t.w[2 * i] = 1.0 - u;
    t.w[2 * i + 1] = u;
  }
  return t;
}

double catmull_rom(double s) {
  double a = std::abs(s);
  if (a < 1.0) return ((1.5 * a - 2.5) * a) * a + 1.0;
  if (a < 2.0) return ((-0.5 * a + 2.5) * a - 4.0) * a + 2.0;
  return 0.0;
}

TapTable bicubic_table(int n_dst, int n_src) {
  TapTable t;
  t.ntaps = 4;
  t.base.resize(n_dst);
  t.w.resize(4 * static_cast<std::size_t>(n_dst));
  for (int i = 0; i < n_dst; ++i) {
    double x = static_cast<double>(i) * n_src / n_dst;
    int i0 = static_cast<int>(std::floor(x));
    double u = x - i0;
    double w[4] = {catmull_rom(u + 1.0), catmull_rom(u), catmull_rom(u - 1.0),
                   catmull_rom(u - 2.0)};
    double sum = w[0] + w[1] + w[2] + w[3];
    for (int k = 0; k < 4; ++k) t.w[4 * i + k] = w[k] / sum;
    t.base[i] = i0 - 1;
  }
  return t;
}

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

Field resample(const Field& f, const Grid2D& dst, const TapTable& tx,
               const TapTable& ty) {
  const Grid2D& src = f.grid;
  Field out(dst, f.channels);
  out.diverged = f.diverged;
  std::vector<double> row(static_cast<std::size_t>(src.ny) * dst.nx);
  for (int c = 0; c < f.channels; ++c) {
    // pass 1: along x, keeping source rows
    for (int y = 0; y < src.ny; ++y) {
      for (int x = 0; x < dst.nx; ++x) {
        double acc = 0.0;
        for (int k = 0; k < tx.ntaps; ++k) {
          int xs = wrap(tx.base[x] + k, src.nx);
          acc += tx.w[tx.ntaps * x + k] * f.at(c, y, xs);
        }
        row[static_cast<std::size_t>(y) * dst.nx + x] = acc;
      }
    }
    // pass 2: along y
    for (int y = 0; y < dst.ny; ++y) {
      for (int x = 0; x < dst.nx; ++x) {
        double acc = 0.0;
        for (int k = 0; k < ty.ntaps; ++k) {
          int ys = wrap(ty.base[y] + k, src.ny);
          acc += ty.w[ty.ntaps * y + k] * row[static_cast<std::size_t>(ys) * dst.nx + x];
        }
        out.at(c, y, x) = acc;
      }
    }
  }
  return out;
}

}  // namespace

Field downsample_bilinear(const Field& f, const Grid2D& coarse) {
  if (!f.grid.same_domain(coarse)) {
    throw ConfigError("downsample_bilinear: physical domains differ");
  }
  if (coarse.nx > f.grid.nx || coarse.ny > f.grid.ny) {
    throw ConfigError("downsample_bilinear: target grid is finer than the source");
  }
  return resample(f, coarse, bilinear_table(coarse.nx, f.grid.nx),
                  bilinear_table(coarse.ny, f.grid.ny));
}

Field upsample_bicubic(const Field& f, const Grid2D& fine) {
  if (!f.grid.same_domain(fine)) {
    throw ConfigError("upsample_bicubic: physical domains differ");
  }
  if (fine.nx < f.grid.nx || fine.ny < f.grid.ny) {
    throw ConfigError("upsample_bicubic: target grid is coarser than the source");
  }
  return resample(f, fine, bicubic_table(fine.nx, f.grid.nx),
                  bicubic_table(fine.ny, f.grid.ny));
}

Field add_scaled(const Field& a, double s, const Field& b) {
  if (!a.same_shape(b)) throw ConfigError("add_scaled: shape mismatch");
  Field out = a;
  out.diverged = a.diverged || b.diverged;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += s * b.data[i];
  return out;
}

Field subtract(const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw ConfigError("subtract: shape mismatch");
  Field out = a;
  out.diverged = a.diverged || b.diverged;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

}  // namespace ppnn
