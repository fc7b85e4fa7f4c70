#include "ppnn/physics.hpp"

#include <algorithm>
#include <cmath>

#include "ppnn/stencil.hpp"

namespace ppnn {

PdeSpec make_rd_full(double gamma, double alpha, double beta, int laplacian_order) {
  if (!(gamma > 0.0)) throw ConfigError("reaction-diffusion needs gamma > 0");
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ConfigError("reaction coefficients must be finite");
  }
  return PdeSpec{RdFull{gamma, alpha, beta}, laplacian_order};
}

PdeSpec make_rd_diffusion_only(double gamma, int laplacian_order) {
  if (!(gamma > 0.0)) throw ConfigError("diffusion needs gamma > 0");
  return PdeSpec{RdDiffusionOnly{gamma}, laplacian_order};
}

PdeSpec make_burgers(double nu, int laplacian_order) {
  if (!(nu > 0.0)) throw ConfigError("Burgers needs nu > 0");
  return PdeSpec{Burgers{nu}, laplacian_order};
}

double PdeSpec::diffusion_coefficient() const {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Burgers>) return v.nu;
        else return v.gamma;
      },
      variant);
}

std::string PdeSpec::system_name() const {
  if (std::holds_alternative<RdFull>(variant)) return "rd";
  if (std::holds_alternative<RdDiffusionOnly>(variant)) return "rd-diffusion";
  return "burgers";
}

std::string PdeSpec::parameter_name() const {
  return std::holds_alternative<Burgers>(variant) ? "nu" : "gamma";
}

double PdeSpec::parameter() const { return diffusion_coefficient(); }

PdeSpec PdeSpec::with_parameter(double value) const {
  PdeSpec out = *this;
  std::visit(
      [&](auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Burgers>) v.nu = value;
        else v.gamma = value;
      },
      out.variant);
  if (!(value > 0.0)) throw ConfigError("physical parameter must be positive");
  return out;
}

Field rhs(const PdeSpec& spec, const Field& u) {
  if (u.channels != 2) throw ConfigError("rhs expects a 2-channel state");
  if (std::holds_alternative<RdDiffusionOnly>(spec.variant)) {
    const auto& p = std::get<RdDiffusionOnly>(spec.variant);
    Field out = laplacian(u, spec.laplacian_order);
    for (double& v : out.data) v *= p.gamma;
    return out;
  }
  if (std::holds_alternative<RdFull>(spec.variant)) {
    const auto& p = std::get<RdFull>(spec.variant);
    Field out = laplacian(u, spec.laplacian_order);
    const std::size_t n = static_cast<std::size_t>(u.grid.nx) * u.grid.ny;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = u.data[i];
      const double b = u.data[n + i];
      out.data[i] = p.gamma * out.data[i] + (a - a * a * a - b + p.alpha);
      out.data[n + i] = p.gamma * out.data[n + i] + p.beta * (a - b);
    }
    return out;
  }
  const auto& p = std::get<Burgers>(spec.variant);
  Field out = laplacian(u, spec.laplacian_order);
  Field conv = upwind_convection(u, u);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = p.nu * out.data[i] - conv.data[i];
  }
  return out;
}

Field euler_step(const PdeSpec& spec, const Field& u, double dt) {
  if (!(dt >= 0.0)) throw ConfigError("euler_step needs dt >= 0");
  if (u.diverged) return u;
  Field out = add_scaled(u, dt, rhs(spec, u));
  if (!all_finite(out)) out.diverged = true;
  return out;
}

Field integrate(const PdeSpec& spec, const Field& u, double dt_total,
                int substeps, int* diverged_substep) {
  if (substeps < 1) throw ConfigError("integrate needs substeps >= 1");
  if (diverged_substep) *diverged_substep = -1;
  const double dt = dt_total / substeps;
  Field state = u;
  for (int k = 0; k < substeps; ++k) {
    if (state.diverged) break;
    state = euler_step(spec, state, dt);
    if (state.diverged && diverged_substep && *diverged_substep < 0) {
      *diverged_substep = k;
    }
  }
  return state;
}

double diffusion_dt_limit(const PdeSpec& spec, const Grid2D& grid) {
  const double h = std::min(grid.dx(), grid.dy());
  return 0.1 * h * h / spec.diffusion_coefficient();
}

}  // namespace ppnn
