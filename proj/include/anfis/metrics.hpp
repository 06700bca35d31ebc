#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "anfis/errors.hpp"

namespace anfis {

/// Regression evaluation bundle.
///
/// Relative measures (mare_pct, mre_pct, relative_deviations) are undefined
/// whenever some actual value is zero, and r2 is undefined when the actuals
/// have zero variance; those cases are flagged by empty optionals rather
/// than infinities so downstream reporting never blows up.
///
/// MARE% is the mean of |a-p|/|a| and MRE% the mean of the signed (a-p)/a,
/// both times 100. relative_deviations[k] = 100 * (p_k - a_k) / a_k, so the
/// mean deviation equals -mre_pct.
struct Metrics {
    double rmse = 0.0;
    double mse = 0.0;
    std::optional<double> mare_pct;
    std::optional<double> mre_pct;
    std::optional<double> r2;
    std::vector<double> relative_deviations;

    bool relative_defined() const { return mare_pct.has_value(); }
    bool r2_defined() const { return r2.has_value(); }

    bool operator==(const Metrics&) const = default;
};

inline Metrics compute_metrics(std::span<const double> actual,
                               std::span<const double> predicted) {
    if (actual.size() != predicted.size()) {
        throw ShapeError("compute_metrics: actual and predicted sizes differ");
    }
    const std::size_t m = actual.size();
    if (m < 2) {
        throw std::invalid_argument("compute_metrics: need at least 2 samples");
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (!std::isfinite(actual[k]) || !std::isfinite(predicted[k])) {
            throw NumericError("compute_metrics: non-finite value at sample " +
                               std::to_string(k));
        }
    }

    Metrics out;

    double sse = 0.0;
    double mean_actual = 0.0;
    bool any_zero_actual = false;
    for (std::size_t k = 0; k < m; ++k) {
        const double d = actual[k] - predicted[k];
        sse += d * d;
        mean_actual += actual[k];
        if (actual[k] == 0.0) any_zero_actual = true;
    }
    mean_actual /= static_cast<double>(m);
    out.mse = sse / static_cast<double>(m);
    out.rmse = std::sqrt(out.mse);

    if (!any_zero_actual) {
        double mare = 0.0;
        double mre = 0.0;
        out.relative_deviations.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double rel = (actual[k] - predicted[k]) / actual[k];
            mare += std::abs((actual[k] - predicted[k]) / std::abs(actual[k]));
            mre += rel;
            out.relative_deviations[k] = 100.0 * (predicted[k] - actual[k]) / actual[k];
        }
        out.mare_pct = 100.0 * mare / static_cast<double>(m);
        out.mre_pct = 100.0 * mre / static_cast<double>(m);
    }

    double ss_tot = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double d = actual[k] - mean_actual;
        ss_tot += d * d;
    }
    if (ss_tot > 0.0) {
        out.r2 = 1.0 - sse / ss_tot;
    }

    return out;
}

} // namespace anfis
