#include "gabm/stats.hpp"

#include "gabm/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gabm {

const Coefficient& RegressionReport::at(std::string_view name) const {
    for (const auto& c : coefficients) {
        if (c.name == name) return c;
    }
    throw std::out_of_range("no regressor named " + std::string(name));
}

double student_t_two_sided_p(double t, double df) {
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

RegressionReport ols_fit(const DesignMatrix& x, const Eigen::VectorXd& y) {
    const auto n = x.values.rows();
    const auto k = x.values.cols();
    if (static_cast<std::size_t>(k) != x.columns.size()) throw ConfigError("design matrix column names do not match");
    if (y.size() != n) throw ConfigError("response length does not match design rows");
    if (n <= k) {
        throw InsufficientData("need more observations (" + std::to_string(n) + ") than regressors (" +
                               std::to_string(k) + ")");
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.values);
    if (qr.rank() < k) {
        throw SingularDesign("design matrix has rank " + std::to_string(qr.rank()) + " < " + std::to_string(k));
    }
    Eigen::VectorXd beta = qr.solve(y);
    Eigen::VectorXd resid = y - x.values * beta;
    const double rss = resid.squaredNorm();
    const double tss = (y.array() - y.mean()).matrix().squaredNorm();
    const int df = static_cast<int>(n - k);
    const double s2 = rss / df;

    // (X'X)^-1 = P R^-1 R^-T P'
    Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd unscaled = qr.colsPermutation() * (r_inv * r_inv.transpose()) * qr.colsPermutation().transpose();

    RegressionReport report;
    report.n = static_cast<int>(n);
    report.df_resid = df;
    report.rss = rss;
    if (tss > 0.0) {
        report.r_squared = std::clamp(1.0 - rss / tss, 0.0, 1.0);
    } else {
        report.r_squared = 1.0; // constant response is fitted exactly by the intercept
    }
    for (Eigen::Index j = 0; j < k; ++j) {
        Coefficient c;
        c.name = x.columns[static_cast<std::size_t>(j)];
        c.beta = beta(j);
        c.se = std::sqrt(std::max(0.0, s2 * unscaled(j, j)));
        if (c.se > 0.0) {
            c.t = c.beta / c.se;
        } else {
            c.t = c.beta == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.beta);
        }
        c.p = student_t_two_sided_p(c.t, df);
        report.coefficients.push_back(std::move(c));
    }
    return report;
}

std::pair<int, int> build_dummies(int b0, int half) { return {b0 > half ? 1 : 0, b0 == half ? 1 : 0}; }

EndpointRow make_endpoint_row(int b0, int b_final, int half, bool is_experiment) {
    auto [gt, eq] = build_dummies(b0, half);
    return EndpointRow{b0, b_final, std::abs(b_final - half), gt, eq, is_experiment ? 1 : 0};
}

RegressionReport fit_path_dependence(std::span<const EndpointRow> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    DesignMatrix x{{kConstant, kAboveHalf, kAtHalf}, Eigen::MatrixXd(n, 3)};
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        x.values.row(i) << 1.0, r.d_gt, r.d_eq;
        y(i) = r.b7;
    }
    return ols_fit(x, y);
}

RegressionReport fit_comparison(std::span<const EndpointRow> experiment, std::span<const EndpointRow> base) {
    if (experiment.empty() || base.empty()) throw InsufficientData("both the experiment and base sets need rows");
    const auto n = static_cast<Eigen::Index>(experiment.size() + base.size());
    DesignMatrix x{{kConstant, kAboveHalf, kAtHalf, kExperiment, kExpAboveHalf, kExpAtHalf}, Eigen::MatrixXd(n, 6)};
    Eigen::VectorXd y(n);
    Eigen::Index i = 0;
    auto add = [&](const EndpointRow& r, double e) {
        x.values.row(i) << 1.0, r.d_gt, r.d_eq, e, e * r.d_gt, e * r.d_eq;
        y(i) = r.d7;
        ++i;
    };
    for (const auto& r : experiment) add(r, 1.0);
    for (const auto& r : base) add(r, 0.0);
    return ols_fit(x, y);
}

std::string significance_stars(double p) {
    if (std::isnan(p)) return "";
    if (p < 0.0005) return "***";
    if (p < 0.001) return "**";
    if (p < 0.05) return "*";
    return "";
}

std::string format_cell(const Coefficient& c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.2f%s (%.2f)", c.beta, significance_stars(c.p).c_str(), c.se);
    return buf;
}

std::pair<double, double> confidence_interval_95(const Coefficient& c) {
    return {c.beta - 1.96 * c.se, c.beta + 1.96 * c.se};
}

std::vector<std::string> path_dependence_rows() { return {kAboveHalf, kAtHalf, kConstant}; }

std::vector<std::string> comparison_rows() {
    return {kAboveHalf, kAtHalf, kExperiment, kExpAboveHalf, kExpAtHalf, kConstant};
}

std::string render_table(std::span<const ReportColumn> columns, std::span<const std::string> row_order,
                         std::string_view title) {
    std::vector<std::string> labels(row_order.begin(), row_order.end());
    labels.emplace_back("R-squared");
    labels.emplace_back("N");

    std::vector<std::vector<std::string>> cells(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& rep = columns[c].report;
        for (const auto& row : row_order) {
            std::string cell;
            for (const auto& coef : rep.coefficients) {
                if (coef.name == row) cell = format_cell(coef);
            }
            cells[c].push_back(cell);
        }
        char r2[32];
        std::snprintf(r2, sizeof r2, "%.2f", rep.r_squared);
        cells[c].emplace_back(r2);
        cells[c].push_back(std::to_string(rep.n));
    }

    std::size_t label_w = std::string_view("Variable").size();
    for (const auto& l : labels) label_w = std::max(label_w, l.size());
    std::vector<std::size_t> widths;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        std::size_t w = columns[c].label.size();
        for (const auto& s : cells[c]) w = std::max(w, s.size());
        widths.push_back(w);
    }

    std::ostringstream out;
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
    out << title << "\n\n" << pad("Variable", label_w);
    for (std::size_t c = 0; c < columns.size(); ++c) out << "  " << pad(columns[c].label, widths[c]);
    out << '\n';
    for (std::size_t r = 0; r < labels.size(); ++r) {
        out << pad(labels[r], label_w);
        for (std::size_t c = 0; c < columns.size(); ++c) out << "  " << pad(cells[c][r], widths[c]);
        out << '\n';
    }
    out << "\n***P<0.000 (p < 0.0005); **P<0.001; *P<0.05; {q} = 1 if q is true, otherwise 0.\n";
    return out.str();
}

nlohmann::json report_json(const RegressionReport& report) {
    nlohmann::json out = nlohmann::json::object();
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    for (const auto& c : report.coefficients) {
        out[c.name] = {{"beta", num(c.beta)}, {"se", num(c.se)}, {"t", num(c.t)}, {"p", num(c.p)}};
    }
    out["r2"] = report.r_squared;
    out["n"] = report.n;
    return out;
}

} // namespace gabm
