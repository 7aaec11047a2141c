#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "confsense/data_table.hpp"
#include "confsense/errors.hpp"
#include "confsense/math.hpp"

namespace confsense {

/// Least-squares fit. Term 0 is always the intercept, named "(intercept)".
struct OlsFit {
    std::vector<std::string> names;
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::VectorXd t;
    double residual_sd = 0.0;
    double df = 0.0;  // n - (#regressors + intercept)
    double r_squared = 0.0;
    std::size_t n = 0;

    int index(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return static_cast<int>(i);
        }
        return -1;
    }
    double coefficient(std::string_view name) const { return coef[checked_index(name)]; }
    double std_error(std::string_view name) const { return se[checked_index(name)]; }
    double t_stat(std::string_view name) const { return t[checked_index(name)]; }

private:
    int checked_index(std::string_view name) const {
        const int i = index(name);
        if (i < 0) throw ValidationError("no regressor named '" + std::string(name) + "'");
        return i;
    }
};

namespace detail {

constexpr double kRankTol = 1e-10;  // singular-value ratio treated as rank deficient

inline OlsFit ols_solve(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        std::vector<std::string> names) {
    const auto n = static_cast<std::size_t>(design.rows());
    const auto k = static_cast<std::size_t>(design.cols());
    if (n <= k) {
        throw ValidationError("OLS needs more rows than coefficients");
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
    const double dmax = diag.maxCoeff();
    for (Eigen::Index j = 0; j < diag.size(); ++j) {
        if (dmax == 0.0 || diag[j] < kRankTol * dmax) {
            // Pivot order puts dependent columns last; name the first of them.
            const auto original = qr.colsPermutation().indices()[j];
            throw ValidationError("rank deficiency: column '" +
                                  names[static_cast<std::size_t>(original)] +
                                  "' is linearly dependent on the others");
        }
    }

    OlsFit fit;
    fit.names = std::move(names);
    fit.n = n;
    fit.coef = qr.solve(y);
    const Eigen::VectorXd resid = y - design * fit.coef;
    fit.df = static_cast<double>(n - k);
    const double rss = resid.squaredNorm();
    const double sigma2 = rss / fit.df;
    fit.residual_sd = std::sqrt(sigma2);

    const Eigen::MatrixXd gram_inv =
        (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(
            static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
    fit.se.resize(static_cast<Eigen::Index>(k));
    fit.t.resize(static_cast<Eigen::Index>(k));
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k); ++j) {
        fit.se[j] = std::sqrt(sigma2 * gram_inv(j, j));
        fit.t[j] = fit.se[j] > 0.0 ? fit.coef[j] / fit.se[j] : 0.0;
    }

    const double ymean = y.mean();
    const double tss = (y.array() - ymean).matrix().squaredNorm();
    fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
    return fit;
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace detail

/// OLS of `outcome` on an intercept plus the named regressors.
inline OlsFit ols(const DataTable& data, std::string_view outcome,
                  const std::vector<std::string>& regressors) {
    const std::size_t n = data.n_rows();
    Eigen::MatrixXd design(n, regressors.size() + 1);
    design.col(0).setOnes();
    std::vector<std::string> names{"(intercept)"};
    for (std::size_t j = 0; j < regressors.size(); ++j) {
        const auto& col = data.column(regressors[j]);
        design.col(static_cast<Eigen::Index>(j + 1)) = detail::to_eigen(col);
        names.push_back(regressors[j]);
    }
    return detail::ols_solve(design, detail::to_eigen(data.column(outcome)), std::move(names));
}

/// Difference in arm means with a Welch (unequal-variance) standard error.
inline std::pair<double, double> diff_in_means(const DataTable& data, std::string_view treatment,
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
    const double m1 = s1 / static_cast<double>(n1);
    const double m0 = s0 / static_cast<double>(n0);
    double v1 = 0.0, v0 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = y[i] - (a[i] == 1.0 ? m1 : m0);
        (a[i] == 1.0 ? v1 : v0) += d * d;
    }
    v1 = n1 > 1 ? v1 / static_cast<double>(n1 - 1) : 0.0;
    v0 = n0 > 1 ? v0 / static_cast<double>(n0 - 1) : 0.0;
    const double se =
        std::sqrt(v1 / static_cast<double>(n1) + v0 / static_cast<double>(n0));
    return {m1 - m0, se};
}

/// Wald ratio: contrast in outcome means over contrast in treatment means
/// across the two instrument arms.
inline double wald_iv(const DataTable& data, std::string_view instrument,
                      std::string_view treatment, std::string_view outcome) {
    const auto& z = data.column(instrument);
    const auto& a = data.column(treatment);
    const auto& y = data.column(outcome);
    count_binary_ones(z, "instrument");
    double ya = 0.0, yb = 0.0, aa = 0.0, ab = 0.0;
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] == 1.0) {
            ya += y[i];
            aa += a[i];
            ++n1;
        } else {
            yb += y[i];
            ab += a[i];
            ++n0;
        }
    }
    if (n1 == 0 || n0 == 0) throw ValidationError("degenerate arm: one instrument group is empty");
    const double first_stage =
        aa / static_cast<double>(n1) - ab / static_cast<double>(n0);
    if (std::abs(first_stage) < 1e-6) {
        throw NumericError("weak/zero first stage: instrument does not move the treatment");
    }
    const double reduced_form = ya / static_cast<double>(n1) - yb / static_cast<double>(n0);
    return reduced_form / first_stage;
}

/// The three nested least-squares fits behind linear mediation analysis,
/// optionally adjusting every fit for a common covariate set.
struct MediationFit {
    double beta_total = 0.0;       // treatment coefficient, outcome ~ treatment (+ covariates)
    double beta_treat_med = 0.0;   // treatment coefficient, mediator ~ treatment (+ covariates)
    double beta_direct = 0.0;      // treatment coefficient, outcome ~ treatment + mediator (+ covariates)
    double gamma_mediator = 0.0;   // mediator coefficient in the outcome model
    double sigma_total = 0.0;      // residual sd of the total-effect fit
    double sigma_mediator = 0.0;   // residual sd of the mediator fit
    double resid_corr = 0.0;       // correlation of the two fits' residuals
    std::size_t n = 0;
    std::vector<std::string> covariates;
};

inline MediationFit fit_mediation(const DataTable& data, std::string_view treatment,
                                  std::string_view mediator, std::string_view outcome,
                                  const std::vector<std::string>& covariates = {}) {
    count_binary_ones(data.column(treatment), "treatment");

    std::vector<std::string> base{std::string(treatment)};
    base.insert(base.end(), covariates.begin(), covariates.end());
    std::vector<std::string> with_med{std::string(treatment), std::string(mediator)};
    with_med.insert(with_med.end(), covariates.begin(), covariates.end());

    const OlsFit total = ols(data, outcome, base);
    const OlsFit med = ols(data, mediator, base);
    const OlsFit direct = ols(data, outcome, with_med);

    MediationFit fit;
    fit.beta_total = total.coefficient(treatment);
    fit.beta_treat_med = med.coefficient(treatment);
    fit.beta_direct = direct.coefficient(treatment);
    fit.gamma_mediator = direct.coefficient(mediator);
    fit.sigma_total = total.residual_sd;
    fit.sigma_mediator = med.residual_sd;
    fit.n = data.n_rows();
    fit.covariates = covariates;

    // Residual correlation between the total-effect and mediator fits.
    const std::size_t n = data.n_rows();
    Eigen::MatrixXd design(n, base.size() + 1);
    design.col(0).setOnes();
    for (std::size_t j = 0; j < base.size(); ++j) {
        design.col(static_cast<Eigen::Index>(j + 1)) = detail::to_eigen(data.column(base[j]));
    }
    const Eigen::VectorXd e1 = detail::to_eigen(data.column(outcome)) - design * total.coef;
    const Eigen::VectorXd e2 = detail::to_eigen(data.column(mediator)) - design * med.coef;
    const double denom = std::sqrt(e1.squaredNorm() * e2.squaredNorm());
    if (denom == 0.0) {
        throw ValidationError("degenerate mediator or outcome: zero residual variance");
    }
    fit.resid_corr = e1.dot(e2) / denom;
    return fit;
}

/// Share of residual variance a regressor explains after partialling out the
/// rest: t^2 / (t^2 + df).
inline double partial_r2(const OlsFit& fit, std::string_view name) {
    const double t = fit.t_stat(name);
    return t * t / (t * t + fit.df);
}

} // namespace confsense
