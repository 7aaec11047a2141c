#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "confsense/math.hpp"

namespace cs = confsense;

TEST(NormalDist, CdfReferenceValues) {
    EXPECT_NEAR(cs::normal_cdf(0.0), 0.5, 1e-15);
    EXPECT_NEAR(cs::normal_cdf(1.959963984540054), 0.975, 1e-12);
    EXPECT_NEAR(cs::normal_cdf(-1.959963984540054), 0.025, 1e-12);
    EXPECT_NEAR(cs::normal_cdf(3.0), 0.9986501019683699, 1e-13);
}

TEST(NormalDist, PdfReferenceValues) {
    EXPECT_NEAR(cs::normal_pdf(0.0), 0.3989422804014327, 1e-15);
    EXPECT_NEAR(cs::normal_pdf(1.0), 0.24197072451914337, 1e-15);
}

TEST(NormalDist, QuantileInvertsCdf) {
    for (double p = 0.0005; p < 1.0; p += 0.0127) {
        const double x = cs::normal_quantile(p);
        EXPECT_NEAR(cs::normal_cdf(x), p, 1e-13) << "p=" << p;
    }
    EXPECT_NEAR(cs::normal_quantile(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(cs::normal_quantile(0.5), 0.0, 1e-15);
    EXPECT_NEAR(cs::normal_quantile(0.6), 0.2533471031357997, 1e-12);
    EXPECT_NEAR(cs::normal_quantile(0.7), 0.5244005127080407, 1e-12);
}

TEST(NormalDist, QuantileDomain) {
    EXPECT_THROW(cs::normal_quantile(0.0), cs::ValidationError);
    EXPECT_THROW(cs::normal_quantile(1.0), cs::ValidationError);
    EXPECT_THROW(cs::normal_quantile(-0.1), cs::ValidationError);
}

// Both forms of a threshold rule must agree: Phi(x) > q  <=>  x > Phi^{-1}(q).
TEST(NormalDist, ThresholdFormsAgree) {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> xd(-4.0, 4.0), qd(0.01, 0.99);
    for (int i = 0; i < 20000; ++i) {
        const double x = xd(gen), q = qd(gen);
        EXPECT_EQ(cs::normal_cdf(x) > q, x > cs::normal_quantile(q)) << "x=" << x << " q=" << q;
    }
}

TEST(Moments, MeanVarianceCorrelation) {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    EXPECT_DOUBLE_EQ(cs::mean(x), 2.5);
    EXPECT_DOUBLE_EQ(cs::variance(x), 5.0 / 3.0);
    const std::vector<double> y{2.0, 4.0, 6.0, 8.0};
    EXPECT_NEAR(cs::correlation(x, y), 1.0, 1e-15);
    const std::vector<double> z{4.0, 3.0, 2.0, 1.0};
    EXPECT_NEAR(cs::correlation(x, z), -1.0, 1e-15);
}
