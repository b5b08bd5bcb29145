#pragma once

#include <string>

#include "reskern/experiment.hpp"

namespace reskern {

/// Self-contained SVG line chart of a sweep: grid index on the x-axis
/// (1..|grid|, the figures' convention), metric mean on the y-axis,
/// mean +- sd whiskers, failed grid points drawn as gaps.
/// `metric` is "nmi" or "acc".
void write_sweep_svg(const SweepResult& sweep, const std::string& metric,
                     const std::string& path);

}  // namespace reskern
