#pragma once

#include "gabm/experiments.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gabm {

struct ChartOptions {
    int width = 640;
    int height = 420;
    std::string title;
};

/// SVG line chart: x = day 0..n_days, y = blue count 0..n_agents, one <polyline> per series.
/// Each polyline carries its raw counts in a data-series attribute. Throws ConfigError when empty.
std::string render_trajectories_svg(std::span<const std::vector<int>> series, int n_agents,
                                    const ChartOptions& options = {});

/// Renders the batch and writes it to `out_path`; nothing is written when the batch is empty.
void render_trajectories(const BatchResult& batch, const std::filesystem::path& out_path, int n_agents = 20);
void render_trajectories(std::span<const std::vector<int>> series, int n_agents, const std::string& title,
                         const std::filesystem::path& out_path);

} // namespace gabm
