#pragma once

#include <string>
#include <variant>

#include "ppnn/field.hpp"

namespace ppnn {

// FitzHugh-Nagumo reaction-diffusion, full system:
//   du/dt = gamma lap(u) + u - u^3 - v + alpha
//   dv/dt = gamma lap(v) + beta (u - v)
struct RdFull {
  double gamma = 1.0;
  double alpha = 0.01;
  double beta = 0.25;
};

// Diffusion-only truncation of the system above (partial physics).
struct RdDiffusionOnly {
  double gamma = 1.0;
};

// 2D viscous Burgers: du/dt = -(u . grad) u + nu lap(u)
struct Burgers {
  double nu = 0.02;
};

struct PdeSpec {
  std::variant<RdFull, RdDiffusionOnly, Burgers> variant;
  int laplacian_order = 6;

  double diffusion_coefficient() const;
  std::string system_name() const;
  // Replaces the scalar physical parameter (gamma or nu).
  PdeSpec with_parameter(double value) const;
  double parameter() const;
  std::string parameter_name() const;
};

PdeSpec make_rd_full(double gamma, double alpha = 0.01, double beta = 0.25,
                     int laplacian_order = 6);
PdeSpec make_rd_diffusion_only(double gamma, int laplacian_order = 6);
PdeSpec make_burgers(double nu, int laplacian_order = 6);

// Right-hand side F(u) of du/dt = F(u). u must have 2 channels.
Field rhs(const PdeSpec& spec, const Field& u);

// One explicit forward-Euler step. Sets the diverged flag (instead of
// throwing) when the result contains non-finite values.
Field euler_step(const PdeSpec& spec, const Field& u, double dt);

// `substeps` Euler steps of size dt_total/substeps. If the state diverges,
// integration stops, the flag is set, and the failing substep index (0-based)
// is written to *diverged_substep when provided.
Field integrate(const PdeSpec& spec, const Field& u, double dt_total,
                int substeps, int* diverged_substep = nullptr);

// Conservative explicit-diffusion stability bound dt <= 0.1 min(dx,dy)^2 / c,
// used as a warning threshold by the CLI.
double diffusion_dt_limit(const PdeSpec& spec, const Grid2D& grid);

}  // namespace ppnn
