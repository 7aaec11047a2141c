#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "confsense/errors.hpp"
#include "confsense/estimators.hpp"

namespace confsense::mediation {

namespace detail {

inline void check_fit(const MediationFit& fit) {
    if (!(fit.sigma_mediator > 0.0)) {
        throw ValidationError("degenerate mediator: zero residual variance");
    }
}

inline double check_rho(double rho) {
    if (!(rho > -1.0 && rho < 1.0)) {
        throw ValidationError("mediation: rho must lie strictly in (-1,1)");
    }
    return rho;
}

} // namespace detail

/// Average causal mediation effect at a hypothesized correlation rho between
/// the mediator-equation and outcome-equation errors:
///   NIE(rho) = b2 (s1/s2) (rt - rho sqrt((1 - rt^2)/(1 - rho^2))),
/// with rt the sample correlation between the total-effect and mediator-fit
/// residuals. NIE(rt) = 0 identically.
inline double acme_given_rho(const MediationFit& fit, double rho) {
    detail::check_fit(fit);
    detail::check_rho(rho);
    const double rt = fit.resid_corr;
    const double g = rt - rho * std::sqrt((1.0 - rt * rt) / (1.0 - rho * rho));
    return fit.beta_treat_med * (fit.sigma_total / fit.sigma_mediator) * g;
}

/// Direct-effect complement: NDE(rho) = beta_total - NIE(rho).
inline double nde_given_rho(const MediationFit& fit, double rho) {
    return fit.beta_total - acme_given_rho(fit, rho);
}

struct RhoGridRow {
    double rho = 0.0;
    double nde = 0.0;
    double nie = 0.0;
};

struct RhoGridResult {
    std::vector<RhoGridRow> rows;
    double nie_min = 0.0, nie_max = 0.0;
    double nde_min = 0.0, nde_max = 0.0;
    double total = 0.0;  // beta_total; nde + nie per row
};

/// Both curves on a symmetric grid over [-rho_max, rho_max]. n_points must be
/// odd so the rho = 0 row carries the unadjusted analysis.
inline RhoGridResult mediation_bounds(const MediationFit& fit, double rho_max = 0.9,
                                      std::size_t n_points = 19) {
    detail::check_fit(fit);
    if (!(rho_max > 0.0 && rho_max < 1.0)) {
        throw ValidationError("mediation: rho_max must lie in (0,1)");
    }
    if (n_points < 3 || n_points % 2 == 0) {
        throw ValidationError("mediation: n_points must be odd and >= 3");
    }
    RhoGridResult out;
    out.total = fit.beta_total;
    const auto center = static_cast<std::ptrdiff_t>(n_points / 2);
    out.rows.reserve(n_points);
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_points); ++i) {
        const double rho =
            rho_max * (static_cast<double>(i - center) / static_cast<double>(center));
        const double nie = acme_given_rho(fit, rho);
        out.rows.push_back({rho, fit.beta_total - nie, nie});
    }
    auto [nie_lo, nie_hi] = std::minmax_element(
        out.rows.begin(), out.rows.end(),
        [](const RhoGridRow& a, const RhoGridRow& b) { return a.nie < b.nie; });
    auto [nde_lo, nde_hi] = std::minmax_element(
        out.rows.begin(), out.rows.end(),
        [](const RhoGridRow& a, const RhoGridRow& b) { return a.nde < b.nde; });
    out.nie_min = nie_lo->nie;
    out.nie_max = nie_hi->nie;
    out.nde_min = nde_lo->nde;
    out.nde_max = nde_hi->nde;
    return out;
}

} // namespace confsense::mediation
