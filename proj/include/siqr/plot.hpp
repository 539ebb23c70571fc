#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "siqr/odeint.hpp"

namespace siqr {

/// Static SVG line chart of trajectory series.
struct PlotSpec {
    std::vector<std::string> series = {"I"}; ///< subset of S,I,Q,R,N
    std::optional<std::pair<double, double>> x_range; ///< auto when absent
    std::optional<std::pair<double, double>> y_range;
    bool log_I = false; ///< log10 y-axis (values floored at 1e-30)
    std::string title;
    std::string output_path;

    void validate() const; ///< at least one known series
};

/// Renders the chart as a standalone SVG document (no external resources).
std::string render_trajectory_svg(const Trajectory& traj, const PlotSpec& spec);

/// Renders and writes to spec.output_path.
void write_trajectory_svg(const Trajectory& traj, const PlotSpec& spec);

} // namespace siqr
