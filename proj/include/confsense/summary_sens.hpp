#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confsense/data_table.hpp"
#include "confsense/errors.hpp"

namespace confsense::summary {

/// Minimum risk-ratio strength of confounding, with both treatment and
/// outcome, needed to explain away an observed risk ratio:
///   E = RR + sqrt(RR (RR - 1)) for RR >= 1, applied to 1/RR otherwise.
inline double evalue_point(double rr) {
    if (!(rr > 0.0) || !std::isfinite(rr)) {
        throw ValidationError("evalue_point: risk ratio must be a finite positive number");
    }
    if (rr < 1.0) return evalue_point(1.0 / rr);
    return rr + std::sqrt(rr * (rr - 1.0));
}

struct RiskSummary {
    double rr = 1.0;
    std::optional<double> lo;
    std::optional<double> hi;
};

struct EValueResult {
    double point = 1.0;
    double ci = 1.0;
};

/// E-values for the point estimate and for the confidence limit closer to the
/// null. An interval containing 1 needs no confounding at all: E_ci = 1.
inline EValueResult evalue_ci(const RiskSummary& s) {
    if (!s.lo || !s.hi) {
        throw ValidationError("evalue_ci: both confidence limits are required");
    }
    const double lo = *s.lo, hi = *s.hi;
    if (!(lo > 0.0) || !(hi > 0.0) || !(lo <= s.rr) || !(s.rr <= hi)) {
        throw ValidationError("evalue_ci: need 0 < lower <= point <= upper");
    }
    EValueResult out;
    out.point = evalue_point(s.rr);
    if (lo <= 1.0 && hi >= 1.0) {
        out.ci = 1.0;
    } else {
        out.ci = evalue_point(s.rr >= 1.0 ? lo : hi);
    }
    return out;
}

/// Standardized mean difference mapped onto the risk-ratio scale,
/// rr = exp(0.91 d). The 0.91 constant is the conventional conversion factor,
/// imported as-is.
inline double rr_from_smd(double d) {
    if (!std::isfinite(d)) throw ValidationError("rr_from_smd: non-finite input");
    return std::exp(0.91 * d);
}

/// Assumption-free bounds on E[Y(1)], E[Y(0)] and the ATE for a binary
/// outcome. The ATE interval always has width 1 in exact arithmetic.
struct AteBounds {
    double y1_lo = 0.0, y1_hi = 0.0;
    double y0_lo = 0.0, y0_hi = 0.0;
    double ate_lo = 0.0, ate_hi = 0.0;
};

inline AteBounds manski_bounds(double p_treat, double p_y1_t1, double p_y1_t0) {
    if (!(p_treat > 0.0 && p_treat < 1.0)) {
        throw ValidationError("manski_bounds: p_treat must lie strictly in (0,1)");
    }
    if (!(p_y1_t1 >= 0.0 && p_y1_t1 <= 1.0) || !(p_y1_t0 >= 0.0 && p_y1_t0 <= 1.0)) {
        throw ValidationError("manski_bounds: outcome probabilities must lie in [0,1]");
    }
    AteBounds b;
    b.y1_lo = p_y1_t1 * p_treat;
    b.y1_hi = p_y1_t1 * p_treat + (1.0 - p_treat);
    b.y0_lo = p_y1_t0 * (1.0 - p_treat);
    b.y0_hi = p_y1_t0 * (1.0 - p_treat) + p_treat;
    b.ate_lo = b.y1_lo - b.y0_hi;
    b.ate_hi = b.y1_hi - b.y0_lo;
    return b;
}

namespace detail {

struct BinaryCounts {
    std::size_t n11 = 0, n1 = 0, n01 = 0, n0 = 0;
};

inline AteBounds bounds_from_counts(const BinaryCounts& c) {
    if (c.n1 == 0 || c.n0 == 0) {
        throw ValidationError("degenerate arm: one treatment group is empty");
    }
    const double n = static_cast<double>(c.n1 + c.n0);
    // Count-exact arithmetic: every endpoint is an integer divided by n, the
    // same form a direct imputation over the dataset produces.
    AteBounds b;
    b.y1_lo = static_cast<double>(c.n11) / n;
    b.y1_hi = static_cast<double>(c.n11 + c.n0) / n;
    b.y0_lo = static_cast<double>(c.n01) / n;
    b.y0_hi = static_cast<double>(c.n01 + c.n1) / n;
    b.ate_lo = b.y1_lo - b.y0_hi;
    b.ate_hi = b.y1_hi - b.y0_lo;
    return b;
}

inline BinaryCounts count_binary(std::span<const double> a, std::span<const double> y) {
    BinaryCounts c;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool treated = a[i] == 1.0;
        const bool event = y[i] == 1.0;
        if ((a[i] != 0.0 && a[i] != 1.0) || (y[i] != 0.0 && y[i] != 1.0)) {
            throw ValidationError("manski bounds need binary 0/1 treatment and outcome");
        }
        if (treated) {
            ++c.n1;
            if (event) ++c.n11;
        } else {
            ++c.n0;
            if (event) ++c.n01;
        }
    }
    return c;
}

} // namespace detail

/// Bounds computed from a dataset. Works in counts over n, so the endpoints
/// coincide bit-for-bit with what exhaustive imputation of the missing
/// potential outcomes yields.
inline AteBounds manski_from_data(const DataTable& data, std::string_view treatment,
                                  std::string_view outcome) {
    return detail::bounds_from_counts(
        detail::count_binary(data.column(treatment), data.column(outcome)));
}

/// Covariate-conditional bounds for discrete covariates: per-stratum bounds
/// averaged with stratum shares. Every stratum must contain both arms.
inline AteBounds manski_stratified(const DataTable& data, std::string_view treatment,
                                   std::string_view outcome,
                                   const std::vector<std::string>& covariates) {
    if (covariates.empty()) return manski_from_data(data, treatment, outcome);
    const auto& a = data.column(treatment);
    const auto& y = data.column(outcome);
    std::vector<const std::vector<double>*> cov;
    cov.reserve(covariates.size());
    for (const auto& name : covariates) cov.push_back(&data.column(name));

    std::map<std::vector<double>, detail::BinaryCounts> strata;
    std::vector<double> key(covariates.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < cov.size(); ++j) key[j] = (*cov[j])[i];
        auto& c = strata[key];
        if ((a[i] != 0.0 && a[i] != 1.0) || (y[i] != 0.0 && y[i] != 1.0)) {
            throw ValidationError("manski bounds need binary 0/1 treatment and outcome");
        }
        if (a[i] == 1.0) {
            ++c.n1;
            if (y[i] == 1.0) ++c.n11;
        } else {
            ++c.n0;
            if (y[i] == 1.0) ++c.n01;
        }
    }

    const double n = static_cast<double>(a.size());
    AteBounds out;
    for (const auto& [k, c] : strata) {
        if (c.n1 == 0 || c.n0 == 0) {
            throw ValidationError("positivity violated: a covariate stratum lacks one arm");
        }
        const double w = static_cast<double>(c.n1 + c.n0) / n;
        const AteBounds b = detail::bounds_from_counts(c);
        out.y1_lo += w * b.y1_lo;
        out.y1_hi += w * b.y1_hi;
        out.y0_lo += w * b.y0_lo;
        out.y0_hi += w * b.y0_hi;
        out.ate_lo += w * b.ate_lo;
        out.ate_hi += w * b.ate_hi;
    }
    return out;
}

} // namespace confsense::summary
