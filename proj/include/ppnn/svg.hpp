#pragma once

#include <string>
#include <vector>

#include "ppnn/rollout.hpp"

namespace ppnn {

// Line chart of eps_mean per model against the rollout step, log-scale y,
// with a vertical marker at the training horizon. Self-contained SVG 1.1,
// no plotting dependency.
std::string render_epsilon_chart(const std::vector<RolloutReport>& reports,
                                 const std::string& title);

}  // namespace ppnn
