#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gabm {

struct DesignMatrix {
    std::vector<std::string> columns; // column 0 is the intercept
    Eigen::MatrixXd values;
};

struct Coefficient {
    std::string name;
    double beta = 0.0;
    double se = 0.0;
    double t = 0.0;
    double p = 1.0;
};

struct RegressionReport {
    std::vector<Coefficient> coefficients;
    double r_squared = 0.0;
    double rss = 0.0;
    int n = 0;
    int df_resid = 0;

    /// Throws std::out_of_range for an unknown regressor.
    const Coefficient& at(std::string_view name) const;
};

/// Two-sided p-value of a Student-t statistic with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Least squares via column-pivoted Householder QR.
/// se_j = sqrt(s^2 [(X'X)^-1]_jj) with s^2 = RSS/(N-k); R^2 = 1 - RSS/TSS.
/// Throws InsufficientData when N <= k and SingularDesign when X is rank deficient.
RegressionReport ols_fit(const DesignMatrix& x, const Eigen::VectorXd& y);

// Regressor names, as printed in the report tables.
inline constexpr const char* kConstant = "Constant";
inline constexpr const char* kAboveHalf = "{B0 > 10}";
inline constexpr const char* kAtHalf = "{B0 = 10}";
inline constexpr const char* kExperiment = "E";
inline constexpr const char* kExpAboveHalf = "E * {B0 > 10}";
inline constexpr const char* kExpAtHalf = "E * {B0 = 10}";

struct EndpointRow {
    int b0 = 0;
    int b7 = 0;
    int d7 = 0;     // |b7 - half|
    int d_gt = 0;   // b0 > half
    int d_eq = 0;   // b0 == half
    int is_experiment = 0;
};

/// (d_gt, d_eq) = ([b0 > half], [b0 == half]).
std::pair<int, int> build_dummies(int b0, int half);
EndpointRow make_endpoint_row(int b0, int b_final, int half, bool is_experiment = false);

/// B7 on (1, {B0 > half}, {B0 = half}).
RegressionReport fit_path_dependence(std::span<const EndpointRow> rows);
/// D7 on (1, {B0 > half}, {B0 = half}, E, E x {B0 > half}, E x {B0 = half}) over the stacked sets.
RegressionReport fit_comparison(std::span<const EndpointRow> experiment, std::span<const EndpointRow> base);

/// "***" for p < 0.0005 (p rounds to .000), "**" for p < 0.001, "*" for p < 0.05.
std::string significance_stars(double p);
/// "13.30*** (0.34)"
std::string format_cell(const Coefficient& c);

/// Lower and upper bounds beta -/+ 1.96 se.
std::pair<double, double> confidence_interval_95(const Coefficient& c);

struct ReportColumn {
    std::string label;
    RegressionReport report;
};

/// Aligned plain-text table: one column per report, rows in `row_order`, then R-squared and N.
std::string render_table(std::span<const ReportColumn> columns, std::span<const std::string> row_order,
                         std::string_view title);
std::vector<std::string> path_dependence_rows();
std::vector<std::string> comparison_rows();

/// {regressor: {beta, se, t, p}, r2, n}
nlohmann::json report_json(const RegressionReport& report);

} // namespace gabm
