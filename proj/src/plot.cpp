#include "gabm/plot.hpp"

#include "gabm/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gabm {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_trajectories_svg(std::span<const std::vector<int>> series, int n_agents,
                                    const ChartOptions& options) {
    if (series.empty()) throw ConfigError("cannot plot an empty batch");
    if (n_agents < 1) throw ConfigError("n_agents must be positive");
    std::size_t n_points = 0;
    for (const auto& s : series) n_points = std::max(n_points, s.size());
    if (n_points < 1) throw ConfigError("cannot plot empty series");
    const int n_days = static_cast<int>(n_points) - 1;

    const double left = 56, right = 20, top = options.title.empty() ? 20 : 40, bottom = 48;
    const double plot_w = options.width - left - right;
    const double plot_h = options.height - top - bottom;
    auto px = [&](int day) { return left + (n_days == 0 ? 0.0 : plot_w * day / n_days); };
    auto py = [&](int count) { return top + plot_h * (1.0 - static_cast<double>(count) / n_agents); };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << num(options.width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"15\">" << xml_escape(options.title) << "</text>\n";
    }

    svg << "<g class=\"axes\" stroke=\"#444\" stroke-width=\"1\">\n"
        << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(left + plot_w)
        << "\" y2=\"" << num(top + plot_h) << "\"/>\n"
        << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
        << num(top + plot_h) << "\"/>\n"
        << "</g>\n";

    svg << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
    for (int d = 0; d <= n_days; ++d) {
        svg << "<text x=\"" << num(px(d)) << "\" y=\"" << num(top + plot_h + 16) << "\" text-anchor=\"middle\">" << d
            << "</text>\n";
    }
    const int step = n_agents <= 20 ? 5 : std::max(1, n_agents / 4);
    for (int c = 0; c <= n_agents; c += step) {
        svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(c) + 4) << "\" text-anchor=\"end\">" << c
            << "</text>\n";
    }
    svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(options.height - 10.0)
        << "\" text-anchor=\"middle\">Day</text>\n"
        << "<text x=\"14\" y=\"" << num(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << num(top + plot_h / 2) << ")\">Workers wearing blue</text>\n"
        << "</g>\n";

    svg << "<g class=\"runs\" fill=\"none\" stroke=\"#1f5fbf\" stroke-opacity=\"0.35\" stroke-width=\"1.5\">\n";
    for (const auto& s : series) {
        std::string points, raw;
        for (std::size_t d = 0; d < s.size(); ++d) {
            if (d > 0) {
                points += ' ';
                raw += ' ';
            }
            points += num(px(static_cast<int>(d))) + "," + num(py(s[d]));
            raw += std::to_string(s[d]);
        }
        svg << "<polyline data-series=\"" << raw << "\" points=\"" << points << "\"/>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

void render_trajectories(std::span<const std::vector<int>> series, int n_agents, const std::string& title,
                         const std::filesystem::path& out_path) {
    auto svg = render_trajectories_svg(series, n_agents, ChartOptions{640, 420, title});
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_path.string());
    out << svg;
    if (!out) throw IoError("failed writing " + out_path.string());
}

void render_trajectories(const BatchResult& batch, const std::filesystem::path& out_path, int n_agents) {
    auto series = batch.per_run_blue_series();
    render_trajectories(series, n_agents, experiment_label(batch.experiment) + ": " +
                                              std::string(experiment_spec(batch.experiment).title),
                        out_path);
}

} // namespace gabm
