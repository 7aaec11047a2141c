#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "confsense/data_table.hpp"
#include "confsense/errors.hpp"
#include "confsense/math.hpp"

namespace confsense::copula {

/// Observational summaries feeding the rho analysis: the naive contrast, the
/// treated fraction, and the pooled within-arm outcome sd.
struct CopulaSummary {
    double tau_unadj = 0.0;
    double p_treated = 0.0;
    double s_within = 0.0;
    std::size_t n = 0;
    double z_c = 0.0;  // Phi^{-1}(1 - p_treated): latent threshold of the treatment index
};

inline CopulaSummary summarize_for_copula(const DataTable& data, std::string_view treatment,
                                          std::string_view outcome) {
    const auto& a = data.column(treatment);
    const auto& y = data.column(outcome);
    count_binary_ones(a, "treatment");
    double s1 = 0.0, s0 = 0.0;
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 1.0) {
            s1 += y[i];
            ++n1;
        } else {
            s0 += y[i];
            ++n0;
        }
    }
    if (n1 == 0 || n0 == 0) throw ValidationError("degenerate arm: one treatment group is empty");
    if (n1 + n0 < 3) throw ValidationError("copula summary needs at least 3 rows");
    const double m1 = s1 / static_cast<double>(n1);
    const double m0 = s0 / static_cast<double>(n0);
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = y[i] - (a[i] == 1.0 ? m1 : m0);
        ss += d * d;
    }
    CopulaSummary s;
    s.n = a.size();
    s.tau_unadj = m1 - m0;
    s.p_treated = static_cast<double>(n1) / static_cast<double>(n1 + n0);
    s.s_within = std::sqrt(ss / static_cast<double>(n1 + n0 - 2));
    if (!(s.s_within > 0.0)) {
        throw ValidationError("degenerate outcome: zero within-arm variance");
    }
    s.z_c = normal_quantile(1.0 - s.p_treated);
    return s;
}

/// Two variance conventions for the structural outcome noise:
///   naive  - take the pooled within-arm sd as the noise sd directly;
///   exact  - solve for the noise sd that reproduces the pooled within-arm
///            variance once the truncation of the latent index at z_c is
///            accounted for. Exact is the default and the generatively
///            validated mode.
enum class Mode { naive, exact };

namespace detail {

/// Pooled shrink factor p*v1 + (1-p)*v0 - 1 (< 0), built from truncated
/// normal variances of the latent index above/below z_c.
inline double variance_shrink(const CopulaSummary& s) {
    const double lam1 = normal_pdf(s.z_c) / s.p_treated;
    const double lam0 = -normal_pdf(s.z_c) / (1.0 - s.p_treated);
    const double v1 = 1.0 + s.z_c * lam1 - lam1 * lam1;
    const double v0 = 1.0 + s.z_c * lam0 - lam0 * lam0;
    return s.p_treated * v1 + (1.0 - s.p_treated) * v0 - 1.0;
}

inline double noise_sd(const CopulaSummary& s, double rho, Mode mode) {
    if (mode == Mode::naive) return s.s_within;
    return s.s_within / std::sqrt(1.0 + variance_shrink(s) * rho * rho);
}

inline double check_rho(double rho) {
    if (!(rho > -1.0 && rho < 1.0)) {
        throw ValidationError("copula: rho must lie strictly in (-1,1)");
    }
    return rho;
}

} // namespace detail

/// Selection bias implied by correlation rho between the latent treatment
/// index and the outcome noise: rho * sigma_eps * phi(z_c) / (p (1-p)).
inline double bias_given_rho(const CopulaSummary& s, double rho, Mode mode = Mode::exact) {
    detail::check_rho(rho);
    if (rho == 0.0) return 0.0;
    return rho * detail::noise_sd(s, rho, mode) * normal_pdf(s.z_c) /
           (s.p_treated * (1.0 - s.p_treated));
}

/// Adjusted ACE at a hypothesized rho; strictly decreasing in rho, equal to
/// the naive contrast at rho = 0 in both modes.
inline double ace_given_rho(const CopulaSummary& s, double rho, Mode mode = Mode::exact) {
    return s.tau_unadj - bias_given_rho(s, rho, mode);
}

/// The rho at which the adjusted ACE crosses zero, when it lies in (-1,1).
inline std::optional<double> rho_nullifying(const CopulaSummary& s, Mode mode = Mode::exact) {
    const double naive_root =
        s.tau_unadj * s.p_treated * (1.0 - s.p_treated) / (s.s_within * normal_pdf(s.z_c));
    double root = naive_root;
    if (mode == Mode::exact) {
        // rho / sqrt(1 + w rho^2) = naive_root  =>  rho^2 = r^2 / (1 - w r^2).
        const double w = detail::variance_shrink(s);
        const double denom = 1.0 - w * naive_root * naive_root;
        root = naive_root / std::sqrt(denom);
    }
    if (!(root > -1.0 && root < 1.0)) return std::nullopt;  // not nullifiable in range
    return root;
}

/// Extremes of the adjusted ACE over rho in [-rho_max, rho_max]; by
/// monotonicity these sit at the endpoints.
inline std::pair<double, double> ace_bounds(const CopulaSummary& s, double rho_max,
                                            Mode mode = Mode::exact) {
    if (!(rho_max > 0.0 && rho_max < 1.0)) {
        throw ValidationError("copula: rho_max must lie in (0,1)");
    }
    return {ace_given_rho(s, rho_max, mode), ace_given_rho(s, -rho_max, mode)};
}

struct RhoCurvePoint {
    double rho = 0.0;
    double ace = 0.0;
};

struct RhoCurve {
    Mode mode = Mode::exact;
    std::vector<RhoCurvePoint> points;
    std::optional<double> rho_null;
    double ace_min = 0.0;
    double ace_max = 0.0;
};

/// Samples the adjusted-ACE curve on a symmetric grid including rho = 0.
inline RhoCurve rho_curve(const CopulaSummary& s, double rho_max = 0.95,
                          std::size_t n_points = 41, Mode mode = Mode::exact) {
    if (!(rho_max > 0.0 && rho_max < 1.0)) {
        throw ValidationError("copula: rho_max must lie in (0,1)");
    }
    if (n_points < 3 || n_points % 2 == 0) {
        throw ValidationError("copula: n_points must be odd and >= 3 so rho = 0 is on the grid");
    }
    RhoCurve curve;
    curve.mode = mode;
    const auto center = static_cast<std::ptrdiff_t>(n_points / 2);
    curve.points.reserve(n_points);
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_points); ++i) {
        // Symmetric by construction: rho(-k) = -rho(k), rho(center) = 0.
        const double rho = rho_max * (static_cast<double>(i - center) / static_cast<double>(center));
        curve.points.push_back({rho, ace_given_rho(s, rho, mode)});
    }
    curve.rho_null = rho_nullifying(s, mode);
    const auto [lo, hi] = ace_bounds(s, rho_max, mode);
    curve.ace_min = lo;
    curve.ace_max = hi;
    return curve;
}

} // namespace confsense::copula
