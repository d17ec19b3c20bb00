#include <gtest/gtest.h>

#include <cmath>

#include "gsr/quadrature.hpp"

using namespace gsr;

TEST(Quadrature, FiniteInterval) {
    auto r = integrate_finite([](double x) { return std::sin(x); }, 0.0, M_PI, QuadratureSpec{});
    EXPECT_NEAR(r.value, 2.0, 1e-13);
    EXPECT_TRUE(r.converged());
    EXPECT_GT(r.nodes_used, 0u);
}

TEST(Quadrature, EndpointSingularity) {
    auto r = integrate_finite([](double x) { return x > 0 ? 1 / std::sqrt(x) : 0.0; }, 0.0, 1.0, QuadratureSpec{});
    EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Quadrature, GaussianEnvelope) {
    auto r = integrate_semi_infinite([](double x) { return std::exp(-x * x); }, QuadratureSpec{}, Decay::Gaussian(1.0));
    EXPECT_NEAR(r.value, 0.5 * std::sqrt(M_PI), 1e-13);
    EXPECT_TRUE(r.converged());
    EXPECT_GT(r.truncation_point, 4.0);
}

TEST(Quadrature, ExponentialEnvelopeWithLowerLimit) {
    auto r = integrate_semi_infinite([](double x) { return std::exp(-2 * x) * std::cos(x); }, QuadratureSpec{},
                                     Decay::Exponential(2.0), 1.0);
    double exact = std::exp(-2.0) * (2 * std::cos(1.0) - std::sin(1.0)) / 5;
    EXPECT_NEAR(r.value, exact, 1e-13);
}

TEST(Quadrature, TruncationGrowsWithTolerance) {
    QuadratureSpec loose, tight;
    loose.abs_tol = 1e-6;
    tight.abs_tol = 1e-14;
    EXPECT_LT(truncation_point(Decay::Gaussian(1.0), loose), truncation_point(Decay::Gaussian(1.0), tight));
    EXPECT_LT(truncation_point(Decay::Exponential(1.0), loose), truncation_point(Decay::Exponential(1.0), tight));
}

TEST(Quadrature, BudgetExhaustionIsFlagged) {
    QuadratureSpec s;
    s.max_subdivisions = 2;
    auto r = integrate_finite([](double x) { return std::sin(200 * x * x); }, 0.0, 3.0, s);
    EXPECT_FALSE(r.converged());
    EXPECT_NE(r.flag_string().find("not_converged"), std::string::npos);
}

TEST(Quadrature, SpecValidation) {
    QuadratureSpec s;
    s.abs_tol = -1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = {};
    s.truncation_slack = 0.5;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = {};
    s.max_subdivisions = 0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}
