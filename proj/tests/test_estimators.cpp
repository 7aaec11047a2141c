#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "confsense/estimators.hpp"
#include "confsense/scm.hpp"

namespace cs = confsense;

namespace {

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double phi_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
constexpr double kZ06 = 0.2533471031357997;
constexpr double kZ07 = 0.5244005127080407;

// Closed-form population contrast E[Y|A=1] - E[Y|A=0] in the reference model,
// assembled from truncated-normal means of the latent confounders given A.
double oracle_diff_in_means() {
    const double p = 0.4 * (1.0 - phi_cdf(kZ07 - 1.0)) + 0.6 * 0.3;
    const double m_uay = 0.4 * phi_pdf(kZ07 - 1.0) + 0.6 * phi_pdf(kZ07);
    const double m_uiy = phi_pdf(kZ06) * ((1.0 - phi_cdf(kZ07 - 1.0)) - 0.3);
    return (1.5 * m_uiy + m_uay) / (p * (1.0 - p));
}

// Closed-form Wald limit when the instrument's latent leaks into the outcome.
double oracle_wald() {
    const double dy = 1.5 * phi_pdf(kZ06) * (1.0 / 0.4 + 1.0 / 0.6);
    const double da = (1.0 - phi_cdf(kZ07 - 1.0)) - 0.3;
    return dy / da;
}

cs::DataTable reference_data(std::size_t n = 200000, std::uint64_t seed = 20210601) {
    return cs::scm::simulate(cs::scm::reference_dgp(), n, seed);
}

} // namespace

TEST(DiffInMeans, ReferenceModelBand) {
    const auto data = reference_data();
    const auto [est, se] = cs::diff_in_means(data, "A", "Y");
    EXPECT_GE(est, 2.0);
    EXPECT_LE(est, 2.4);
    // And tighter: within Monte Carlo error of the closed-form population value.
    EXPECT_NEAR(est, oracle_diff_in_means(), 4.0 * se);
    EXPECT_GT(se, 0.0);
}

TEST(DiffInMeans, ConstantOutcomeIsZero) {
    cs::DataTable t({"a", "y"}, {{1.0, 0.0, 1.0, 0.0}, {7.0, 7.0, 7.0, 7.0}});
    const auto [est, se] = cs::diff_in_means(t, "a", "y");
    EXPECT_DOUBLE_EQ(est, 0.0);
    EXPECT_DOUBLE_EQ(se, 0.0);
}

TEST(DiffInMeans, Errors) {
    cs::DataTable one_arm({"a", "y"}, {{1.0, 1.0}, {1.0, 2.0}});
    EXPECT_THROW(cs::diff_in_means(one_arm, "a", "y"), cs::ValidationError);
    cs::DataTable not_binary({"a", "y"}, {{0.5, 1.0}, {1.0, 2.0}});
    EXPECT_THROW(cs::diff_in_means(not_binary, "a", "y"), cs::ValidationError);
}

TEST(Ols, ExactFitHasZeroResidual) {
    cs::DataTable t({"x", "y"}, {{1.0, 2.0, 3.0, 4.0}, {2.0, 4.0, 6.0, 8.0}});
    const auto fit = cs::ols(t, "y", {"x"});
    EXPECT_NEAR(fit.coefficient("x"), 2.0, 1e-12);
    EXPECT_NEAR(fit.coefficient("(intercept)"), 0.0, 1e-12);
    EXPECT_NEAR(fit.residual_sd, 0.0, 1e-10);
    EXPECT_DOUBLE_EQ(fit.df, 2.0);
}

TEST(Ols, AdjustingForLatentsZeroesTheTreatment) {
    const auto data = reference_data();
    const auto fit = cs::ols(data, "Y", {"A", "U_AY", "U_IY"});
    // Population argument: removing the latents' projection leaves noise that
    // is independent of A, so the partial coefficient of A is 0.
    EXPECT_NEAR(fit.coefficient("A"), 0.0, 0.05);
    // With a 1e6-row sample, the same quantity shrinks accordingly.
    const auto big = reference_data(1000000, 7);
    const auto fit_big = cs::ols(big, "Y", {"A", "U_AY", "U_IY"});
    EXPECT_NEAR(fit_big.coefficient("A"), 0.0, 0.03);
}

TEST(Ols, NaiveCoefficientInBand) {
    const auto data = reference_data();
    const auto fit = cs::ols(data, "Y", {"A"});
    EXPECT_GE(fit.coefficient("A"), 2.0);
    EXPECT_LE(fit.coefficient("A"), 2.4);
}

TEST(Ols, MatchesDiffInMeans) {
    const auto data = reference_data(20000, 5);
    const auto fit = cs::ols(data, "Y", {"A"});
    const auto [dim, se] = cs::diff_in_means(data, "A", "Y");
    EXPECT_NEAR(fit.coefficient("A"), dim, 1e-10 * std::abs(dim));
}

TEST(Ols, RankDeficiencyNamesAColumn) {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    std::vector<double> x1(50), x2(50), y(50);
    for (std::size_t i = 0; i < 50; ++i) {
        x1[i] = nd(gen);
        x2[i] = 2.0 * x1[i];  // exactly collinear
        y[i] = x1[i] + nd(gen);
    }
    cs::DataTable t({"x1", "x2", "y"}, {x1, x2, y});
    try {
        cs::ols(t, "y", {"x1", "x2"});
        FAIL() << "expected rank error";
    } catch (const cs::ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("rank deficiency"), std::string::npos);
        EXPECT_TRUE(msg.find("'x1'") != std::string::npos ||
                    msg.find("'x2'") != std::string::npos)
            << msg;
    }
}

TEST(WaldIv, BrokenExclusionMatchesClosedForm) {
    const auto data = reference_data();
    const double w = cs::wald_iv(data, "I", "A", "Y");
    EXPECT_NEAR(w, oracle_wald(), 0.2);  // oracle ~ 6.3075
}

TEST(WaldIv, RestoredExclusionIsNull) {
    auto spec = cs::scm::reference_dgp();
    for (auto& node : spec.nodes) {
        if (node.name == "Y") {
            for (auto& p : node.parents) {
                if (p.name == "U_IY") p.coef = 0.0;
            }
        }
    }
    const auto data = cs::scm::simulate(spec, 200000, 20210601);
    EXPECT_NEAR(cs::wald_iv(data, "I", "A", "Y"), 0.0, 0.1);
}

TEST(WaldIv, WeakFirstStageFails) {
    cs::DataTable t({"z", "a", "y"},
                    {{0.0, 1.0, 0.0, 1.0}, {0.0, 0.0, 1.0, 1.0}, {1.0, 2.0, 3.0, 4.0}});
    EXPECT_THROW(cs::wald_iv(t, "z", "a", "y"), cs::NumericError);
}

TEST(WaldIv, ScalesExactlyWithOutcomeUnits) {
    const auto data = reference_data(20000, 11);
    const double w = cs::wald_iv(data, "I", "A", "Y");
    std::vector<double> scaled = data.column("Y");
    for (double& v : scaled) v *= 4.0;  // power of two: exact in every float op
    cs::DataTable t({"I", "A", "Y4"}, {data.column("I"), data.column("A"), scaled});
    EXPECT_EQ(cs::wald_iv(t, "I", "A", "Y4"), 4.0 * w);
}

TEST(Mediation, ReferenceModelFits) {
    const auto data = reference_data();
    const auto fit = cs::fit_mediation(data, "A", "M", "Y");
    EXPECT_NEAR(fit.beta_treat_med, -1.5, 0.03);
    EXPECT_LT(fit.gamma_mediator, 2.0);  // biased below the structural 2
    EXPECT_GT(fit.gamma_mediator, 1.0);  // population value ~ 4.25/3.25
    EXPECT_NEAR(fit.gamma_mediator, 4.25 / 3.25, 0.05);
    EXPECT_NEAR(fit.resid_corr, 0.7783, 0.02);
    // Nested-fit identity, exact in-sample.
    EXPECT_NEAR(fit.beta_total, fit.beta_direct + fit.gamma_mediator * fit.beta_treat_med,
                1e-10 * std::abs(fit.beta_total));
}

TEST(Mediation, IndependentMediatorGivesNullCoefficients) {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> nd;
    std::bernoulli_distribution bd(0.5);
    const std::size_t n = 50000;
    std::vector<double> a(n), m(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = bd(gen) ? 1.0 : 0.0;
        m[i] = nd(gen);
        y[i] = 2.0 * a[i] + nd(gen);
    }
    cs::DataTable t({"a", "m", "y"}, {a, m, y});
    const auto fit = cs::fit_mediation(t, "a", "m", "y");
    EXPECT_NEAR(fit.beta_treat_med, 0.0, 0.03);
    EXPECT_NEAR(fit.gamma_mediator, 0.0, 0.03);
}

TEST(Mediation, IdentityHoldsOnArbitraryData) {
    std::mt19937_64 gen(21);
    std::normal_distribution<double> nd;
    std::bernoulli_distribution bd(0.4);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 500;
        std::vector<double> a(n), m(n), y(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = bd(gen) ? 1.0 : 0.0;
            c[i] = nd(gen);
            m[i] = 0.7 * a[i] - 0.2 * c[i] + nd(gen);
            y[i] = 1.1 * a[i] + 0.9 * m[i] + 0.5 * c[i] + nd(gen);
        }
        cs::DataTable t({"a", "m", "y", "c"}, {a, m, y, c});
        for (const auto& covs : {std::vector<std::string>{}, std::vector<std::string>{"c"}}) {
            const auto fit = cs::fit_mediation(t, "a", "m", "y", covs);
            const double lhs = fit.beta_total;
            const double rhs = fit.beta_direct + fit.gamma_mediator * fit.beta_treat_med;
            EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
            EXPECT_GE(fit.resid_corr, -1.0);
            EXPECT_LE(fit.resid_corr, 1.0);
        }
    }
}
