#pragma once

#include <cstddef>
#include <vector>

#include "ppnn/errors.hpp"

namespace ppnn {

// Uniform periodic grid on [0,lx) x [0,ly). Point (i,j) sits at (i*dx, j*dy);
// index 0 aliases index nx under periodicity, so there is no duplicated
// boundary column/row.
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;

  double dx() const { return lx / nx; }
  double dy() const { return ly / ny; }
  bool same_domain(const Grid2D& o) const { return lx == o.lx && ly == o.ly; }
  bool operator==(const Grid2D&) const = default;
};

Grid2D make_grid(int nx, int ny, double lx, double ly);

// Multi-channel scalar field sampled on a Grid2D. Storage is channel-major,
// then row (y), then column (x). `diverged` is a sticky flag set by time
// steppers when non-finite values appear; a diverged field's payload is
// not meaningful.
struct Field {
  Grid2D grid;
  int channels = 0;
  std::vector<double> data;
  bool diverged = false;

  Field() = default;
  Field(const Grid2D& g, int c)
      : grid(g), channels(c),
        data(static_cast<std::size_t>(c) * g.nx * g.ny, 0.0) {}

  double& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * grid.ny + y) * grid.nx + x];
  }
  double at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * grid.ny + y) * grid.nx + x];
  }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Field& o) const {
    return grid == o.grid && channels == o.channels;
  }
};

Field constant_field(const Grid2D& grid, int channels, double value);

// Discrete 2-norm over all channels and points. Throws DivergedError if the
// field is flagged diverged or contains non-finite entries.
double l2_norm(const Field& f);

// Affine map sending the global min to lo and the global max to hi, one map
// across all channels. Throws ConfigError for a constant field or hi <= lo.
Field linear_rescale(const Field& f, double lo, double hi);

// Bilinear resampling onto a coarser grid over the same physical domain,
// periodic wrap, arbitrary (non-integer) ratios.
Field downsample_bilinear(const Field& f, const Grid2D& coarse);

// Separable cubic-convolution resampling (Catmull-Rom, a = -0.5) onto a finer
// grid over the same physical domain, periodic wrap. Tap weights are
// normalized so constants reproduce bitwise.
Field upsample_bicubic(const Field& f, const Grid2D& fine);

// Elementwise helpers used by the steppers.
Field add_scaled(const Field& a, double s, const Field& b);  // a + s*b
Field subtract(const Field& a, const Field& b);

bool all_finite(const Field& f);

}  // namespace ppnn
