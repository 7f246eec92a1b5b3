#include "gabm/errors.hpp"
#include "gabm/plot.hpp"

#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

using namespace gabm;
namespace pt = boost::property_tree;

namespace {

struct Polyline {
    std::vector<int> series;
    std::vector<std::pair<double, double>> points;
};

std::vector<Polyline> polylines(const std::string& svg) {
    pt::ptree tree;
    std::istringstream in(svg);
    pt::read_xml(in, tree);
    std::vector<Polyline> out;
    std::function<void(const pt::ptree&)> walk = [&](const pt::ptree& node) {
        for (const auto& [tag, child] : node) {
            if (tag == "polyline") {
                Polyline p;
                std::istringstream s(child.get<std::string>("<xmlattr>.data-series"));
                for (int v; s >> v;) p.series.push_back(v);
                std::istringstream pts(child.get<std::string>("<xmlattr>.points"));
                for (std::string xy; pts >> xy;) {
                    auto comma = xy.find(',');
                    p.points.emplace_back(std::stod(xy.substr(0, comma)), std::stod(xy.substr(comma + 1)));
                }
                out.push_back(std::move(p));
            } else if (tag != "<xmlattr>") {
                walk(child);
            }
        }
    };
    walk(tree);
    return out;
}

} // namespace

TEST_CASE("single trajectory") {
    std::vector<std::vector<int>> series{{10, 14, 17, 19, 20, 20, 20, 20}};
    auto svg = render_trajectories_svg(series, 20, {640, 420, "E1 & friends"});
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("E1 &amp; friends") != std::string::npos);
    auto lines = polylines(svg);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].series == series[0]);
    REQUIRE(lines[0].points.size() == 8);
    for (std::size_t i = 1; i < 8; ++i) {
        CHECK(lines[0].points[i].first > lines[0].points[i - 1].first);
        // Higher counts sit higher on the page.
        if (series[0][i] > series[0][i - 1]) CHECK(lines[0].points[i].second < lines[0].points[i - 1].second);
    }
    for (const auto& [x, y] : lines[0].points) {
        CHECK(x >= 0);
        CHECK(x <= 640);
        CHECK(y >= 0);
        CHECK(y <= 420);
    }
}

TEST_CASE("a batch renders one polyline per run") {
    auto batch = run_batch(ExperimentId::E1, 100, 4, BackendKind::scripted(0), 1);
    auto series = batch.per_run_blue_series();
    auto lines = polylines(render_trajectories_svg(series, 20));
    REQUIRE(lines.size() == 100);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        CHECK(lines[i].series == series[i]);
        for (int v : lines[i].series) {
            CHECK(v >= 0);
            CHECK(v <= 20);
        }
    }

    auto path = std::filesystem::temp_directory_path() / "gabm_plot_test.svg";
    std::filesystem::remove(path);
    render_trajectories(batch, path);
    REQUIRE(std::filesystem::exists(path));
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(polylines(ss.str()).size() == 100);
    std::filesystem::remove(path);
}

TEST_CASE("empty input writes nothing") {
    std::vector<std::vector<int>> none;
    CHECK_THROWS_AS(render_trajectories_svg(none, 20), ConfigError);
    auto path = std::filesystem::temp_directory_path() / "gabm_plot_empty.svg";
    std::filesystem::remove(path);
    BatchResult empty;
    CHECK_THROWS_AS(render_trajectories(empty, path), ConfigError);
    CHECK_FALSE(std::filesystem::exists(path));
}
