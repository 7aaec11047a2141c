#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "confsense/estimators.hpp"
#include "confsense/mediation_sens.hpp"
#include "confsense/scm.hpp"

namespace cs = confsense;
namespace med = confsense::mediation;

namespace {

// Linear SEM with a binary treatment and a known correlation rho0 between the
// mediator-equation and outcome-equation errors. True ACME = b2 * gamma.
cs::DataTable correlated_sem(double b2, double gamma, double b3, double rho0, std::size_t n,
                             std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::bernoulli_distribution bern(0.45);
    std::vector<double> a(n), m(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = bern(gen) ? 1.0 : 0.0;
        const double e2 = 1.3 * nd(gen);
        const double e3 = 0.9 * (rho0 * (e2 / 1.3) + std::sqrt(1.0 - rho0 * rho0) * nd(gen));
        m[i] = 0.4 + b2 * a[i] + e2;
        y[i] = -0.2 + b3 * a[i] + gamma * m[i] + e3;
    }
    return cs::DataTable({"a", "m", "y"}, {a, m, y});
}

cs::MediationFit reference_fit(std::size_t n = 200000, std::uint64_t seed = 20210601) {
    const auto data = cs::scm::simulate(cs::scm::reference_dgp(), n, seed);
    return cs::fit_mediation(data, "A", "M", "Y", {"U_AY", "U_IY"});
}

} // namespace

TEST(MediationSens, AlgebraicZeroAtResidualCorrelation) {
    const auto fit = reference_fit(20000, 7);
    EXPECT_EQ(med::acme_given_rho(fit, fit.resid_corr), 0.0);
    EXPECT_EQ(med::nde_given_rho(fit, fit.resid_corr), fit.beta_total);
}

TEST(MediationSens, ComplementIdentity) {
    const auto fit = reference_fit(20000, 8);
    for (double rho : {-0.9, -0.4, 0.0, 0.3, 0.85}) {
        const double nie = med::acme_given_rho(fit, rho);
        const double nde = med::nde_given_rho(fit, rho);
        EXPECT_NEAR(nde + nie, fit.beta_total, 1e-12 * std::max(1.0, std::abs(fit.beta_total)));
    }
}

TEST(MediationSens, RhoZeroIsTheProductEstimate) {
    const auto fit = reference_fit(20000, 9);
    EXPECT_NEAR(med::acme_given_rho(fit, 0.0), fit.beta_treat_med * fit.gamma_mediator,
                1e-10 * std::abs(fit.beta_treat_med * fit.gamma_mediator));
}

// The anti-transcription gate: with data generated at a known error
// correlation, evaluating the curve at that correlation recovers the true
// ACME within Monte Carlo error. SE estimated from replicate generations.
TEST(MediationSens, GenerativeOracleGate) {
    const std::size_t n = 200000;
    const double b2 = 2.0, gamma = -1.5, b3 = 1.0;  // true ACME = -3
    for (double rho0 : {-0.5, 0.0, 0.5}) {
        std::vector<double> acmes;
        for (std::uint64_t seed = 300; seed < 308; ++seed) {
            const auto data = correlated_sem(b2, gamma, b3, rho0, n, seed);
            const auto fit = cs::fit_mediation(data, "a", "m", "y");
            acmes.push_back(med::acme_given_rho(fit, rho0));
        }
        double mean = 0.0;
        for (double v : acmes) mean += v;
        mean /= static_cast<double>(acmes.size());
        double var = 0.0;
        for (double v : acmes) var += (v - mean) * (v - mean);
        var /= static_cast<double>(acmes.size() - 1);
        const double se = std::sqrt(var);
        EXPECT_LE(std::abs(acmes.front() - (-3.0)), 3.0 * se + 1e-9) << "rho0=" << rho0;
        EXPECT_NEAR(mean, -3.0, 3.0 * se) << "rho0=" << rho0;

        // The direct effect recovers b3 at the same point.
        const auto data = correlated_sem(b2, gamma, b3, rho0, n, 300);
        const auto fit = cs::fit_mediation(data, "a", "m", "y");
        EXPECT_NEAR(med::nde_given_rho(fit, rho0), b3, 6.0 * se);
    }
}

TEST(MediationSens, MonotoneWithSlopeOppositeToBeta2) {
    const auto fit = reference_fit(20000, 10);  // beta_treat_med ~ -1.5 < 0
    double prev = med::acme_given_rho(fit, -0.95);
    for (double rho = -0.85; rho < 0.96; rho += 0.1) {
        const double v = med::acme_given_rho(fit, rho);
        EXPECT_GT(v, prev);  // increasing when b2 < 0
        prev = v;
    }
}

TEST(MediationSens, TreatmentCodingFlipNegatesCurves) {
    const auto data = cs::scm::simulate(cs::scm::reference_dgp(), 30000, 11);
    std::vector<double> flipped = data.column("A");
    for (double& v : flipped) v = 1.0 - v;
    cs::DataTable t({"A", "M", "Y", "U_AY", "U_IY"},
                    {flipped, data.column("M"), data.column("Y"), data.column("U_AY"),
                     data.column("U_IY")});
    const auto fit = cs::fit_mediation(data, "A", "M", "Y", {"U_AY", "U_IY"});
    const auto fit_flip = cs::fit_mediation(t, "A", "M", "Y", {"U_AY", "U_IY"});
    EXPECT_NEAR(fit_flip.beta_total, -fit.beta_total, 1e-9);
    EXPECT_NEAR(fit_flip.beta_treat_med, -fit.beta_treat_med, 1e-9);
    for (double rho : {-0.6, 0.0, 0.45}) {
        EXPECT_NEAR(med::acme_given_rho(fit_flip, rho), -med::acme_given_rho(fit, rho), 1e-9);
        EXPECT_NEAR(med::nde_given_rho(fit_flip, rho), -med::nde_given_rho(fit, rho), 1e-9);
    }
}

TEST(MediationSens, ReferenceModelBoundsMatchPinnedTargets) {
    // Population targets for the covariate-adjusted reference analysis over
    // rho in [-0.9, 0.9], fixed beforehand with a closed-form + large-sample
    // oracle: NIE in [-4.1964, +0.2733], NDE in [-0.2733, +4.1964].
    const auto fit = reference_fit();
    const auto grid = med::mediation_bounds(fit, 0.9, 19);
    EXPECT_NEAR(grid.nie_min, -4.1964, 0.1);
    EXPECT_NEAR(grid.nie_max, 0.2733, 0.1);
    EXPECT_NEAR(grid.nde_min, -0.2733, 0.1);
    EXPECT_NEAR(grid.nde_max, 4.1964, 0.1);

    // Published analysis values for the same grid.
    EXPECT_NEAR(grid.nde_min, -0.275, 0.3);
    EXPECT_NEAR(grid.nde_max, 4.186, 0.3);
    EXPECT_NEAR(grid.nie_min, -4.161, 0.3);
    EXPECT_NEAR(grid.nie_max, 0.300, 0.3);

    // The structural truths sit inside the bounds.
    EXPECT_LE(grid.nde_min, 3.0);
    EXPECT_GE(grid.nde_max, 3.0);
    EXPECT_LE(grid.nie_min, -3.0);
    EXPECT_GE(grid.nie_max, -3.0);
}

TEST(MediationSens, GridStructure) {
    const auto fit = reference_fit(20000, 12);
    const auto grid = med::mediation_bounds(fit, 0.9, 19);
    ASSERT_EQ(grid.rows.size(), 19u);
    EXPECT_EQ(grid.rows.front().rho, -0.9);
    EXPECT_EQ(grid.rows.back().rho, 0.9);
    EXPECT_EQ(grid.rows[9].rho, 0.0);
    // Center row carries the unadjusted product-of-coefficients analysis.
    EXPECT_NEAR(grid.rows[9].nie, fit.beta_treat_med * fit.gamma_mediator, 1e-10);
    for (const auto& row : grid.rows) {
        EXPECT_NEAR(row.nde + row.nie, grid.total, 1e-12 * std::max(1.0, std::abs(grid.total)));
    }
    for (std::size_t i = 1; i < grid.rows.size(); ++i) {
        EXPECT_GT(grid.rows[i].rho, grid.rows[i - 1].rho);
    }
}

TEST(MediationSens, DegenerateGridCollapsesToCenter) {
    const auto fit = reference_fit(20000, 13);
    const auto grid = med::mediation_bounds(fit, 1e-9, 3);
    const double center = fit.beta_treat_med * fit.gamma_mediator;
    EXPECT_NEAR(grid.nie_min, center, 1e-6);
    EXPECT_NEAR(grid.nie_max, center, 1e-6);
}

TEST(MediationSens, DomainErrors) {
    const auto fit = reference_fit(20000, 14);
    EXPECT_THROW(med::acme_given_rho(fit, 1.0), cs::ValidationError);
    EXPECT_THROW(med::acme_given_rho(fit, -1.0), cs::ValidationError);
    EXPECT_THROW(med::mediation_bounds(fit, 0.0, 19), cs::ValidationError);
    EXPECT_THROW(med::mediation_bounds(fit, 0.9, 18), cs::ValidationError);  // even
    auto broken = fit;
    broken.sigma_mediator = 0.0;
    EXPECT_THROW(med::acme_given_rho(broken, 0.5), cs::ValidationError);
}
