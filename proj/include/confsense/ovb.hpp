#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "confsense/errors.hpp"
#include "confsense/estimators.hpp"

namespace confsense::ovb {

/// Hypothetical confounder strength on partial-R2 scales: with the outcome
/// given treatment and covariates (r2_yu) and with the treatment given
/// covariates (r2_au).
struct OvbParams {
    double r2_yu = 0.0;
    double r2_au = 0.0;
};

namespace detail {

inline void check_params(const OvbParams& p) {
    if (!std::isfinite(p.r2_yu) || !std::isfinite(p.r2_au)) {
        throw ValidationError("OVB: non-finite partial R2");
    }
    if (!(p.r2_yu >= 0.0 && p.r2_yu <= 1.0)) {
        throw ValidationError("OVB: r2_yu must lie in [0,1]");
    }
    if (!(p.r2_au >= 0.0)) throw ValidationError("OVB: r2_au must lie in [0,1)");
    if (p.r2_au >= 1.0) {
        throw ValidationError("OVB: r2_au = 1 makes the adjustment singular");
    }
}

} // namespace detail

/// Absolute omitted-variable bias implied by the given confounder strength:
///   |bias| = se(tau) * sqrt(r2_yu * r2_au / (1 - r2_au)) * sqrt(df).
inline double bias_magnitude(const OlsFit& fit, std::string_view treatment,
                             const OvbParams& params) {
    detail::check_params(params);
    if (!(fit.df > 0.0)) throw ValidationError("OVB: fit has no residual degrees of freedom");
    const double se = fit.std_error(treatment);
    return se * std::sqrt(params.r2_yu * params.r2_au / (1.0 - params.r2_au)) *
           std::sqrt(fit.df);
}

/// Point estimate after removing a confounder of the given strength;
/// direction +1 pushes a positive estimate down (toward or past zero).
inline double adjusted_estimate(const OlsFit& fit, std::string_view treatment,
                                const OvbParams& params, int direction = +1) {
    if (direction != 1 && direction != -1) {
        throw ValidationError("OVB: direction must be +1 or -1");
    }
    return fit.coefficient(treatment) -
           static_cast<double>(direction) * bias_magnitude(fit, treatment, params);
}

inline double adjusted_se(const OlsFit& fit, std::string_view treatment, const OvbParams& params) {
    detail::check_params(params);
    if (!(fit.df > 1.0)) throw ValidationError("OVB: adjusted se needs df > 1");
    return fit.std_error(treatment) *
           std::sqrt((1.0 - params.r2_yu) / (1.0 - params.r2_au)) *
           std::sqrt(fit.df / (fit.df - 1.0));
}

inline double adjusted_t(const OlsFit& fit, std::string_view treatment, const OvbParams& params,
                         int direction = +1) {
    return adjusted_estimate(fit, treatment, params, direction) /
           adjusted_se(fit, treatment, params);
}

/// Robustness value: the partial R2 a confounder must share equally with
/// treatment and outcome to cut the estimate by the fraction q.
///   RV_q = (sqrt(f^4 + 4 f^2) - f^2) / 2,  f = q |t| / sqrt(df).
inline double robustness_value(const OlsFit& fit, std::string_view treatment, double q = 1.0) {
    if (!(q > 0.0 && q <= 1.0)) throw ValidationError("OVB: q must lie in (0,1]");
    if (!(fit.df > 0.0)) throw ValidationError("OVB: fit has no residual degrees of freedom");
    const double f = q * std::abs(fit.t_stat(treatment)) / std::sqrt(fit.df);
    return 0.5 * (std::sqrt(f * f * f * f + 4.0 * f * f) - f * f);
}

/// Benchmark point marked on a contour grid.
struct GridMarker {
    double r2_au = 0.0;
    double r2_yu = 0.0;
    std::string label;
};

/// Adjusted estimates and t-statistics over a square grid of confounder
/// strengths, plus the worst-case row at r2_yu = 1. Entry (0,0) is the
/// unadjusted estimate, exactly.
struct ContourGrid {
    std::vector<double> r2_au_axis;
    std::vector<double> r2_yu_axis;
    std::vector<double> estimates;   // row-major: [i_au * n + i_yu]
    std::vector<double> t_stats;
    std::vector<double> extreme_estimates;  // r2_yu = 1 across the r2_au axis
    std::vector<GridMarker> markers;
    int direction = +1;

    double estimate_at(std::size_t i_au, std::size_t i_yu) const {
        return estimates[i_au * r2_yu_axis.size() + i_yu];
    }
    double t_at(std::size_t i_au, std::size_t i_yu) const {
        return t_stats[i_au * r2_yu_axis.size() + i_yu];
    }
};

inline ContourGrid contour_grid(const OlsFit& fit, std::string_view treatment,
                                std::size_t n_points, double r2_max) {
    if (n_points < 2) throw ValidationError("OVB grid needs at least 2 points per axis");
    if (!(r2_max > 0.0 && r2_max < 1.0)) {
        throw ValidationError("OVB grid: r2_max must lie in (0,1)");
    }
    ContourGrid grid;
    grid.direction = fit.coefficient(treatment) >= 0.0 ? +1 : -1;
    grid.r2_au_axis.resize(n_points);
    grid.r2_yu_axis.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(n_points - 1);
        grid.r2_au_axis[i] = r2_max * f;
        grid.r2_yu_axis[i] = r2_max * f;
    }
    grid.estimates.resize(n_points * n_points);
    grid.t_stats.resize(n_points * n_points);
    grid.extreme_estimates.resize(n_points);
    for (std::size_t ia = 0; ia < n_points; ++ia) {
        for (std::size_t iy = 0; iy < n_points; ++iy) {
            const OvbParams p{grid.r2_yu_axis[iy], grid.r2_au_axis[ia]};
            grid.estimates[ia * n_points + iy] =
                adjusted_estimate(fit, treatment, p, grid.direction);
            grid.t_stats[ia * n_points + iy] = adjusted_t(fit, treatment, p, grid.direction);
        }
        grid.extreme_estimates[ia] = adjusted_estimate(
            fit, treatment, OvbParams{1.0, grid.r2_au_axis[ia]}, grid.direction);
    }
    return grid;
}

} // namespace confsense::ovb
