#include <gtest/gtest.h>

#include <cmath>

#include "gsr/gsr.hpp"

using namespace gsr;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const ModelParams mu1{1.0};
const ModelParams mu15{1.5};

}  // namespace

TEST(Stationary, ClosedForm) {
    for (double x : {0.1, 1.0, 4.0}) {
        double u = mu15.u_of(x);
        EXPECT_LT(rel(stationary_pdf(x, mu15), u * u * std::exp(-u) * mu15.mu2() / 2), 1e-14);
    }
    EXPECT_EQ(stationary_pdf(0.0, mu1), 0.0);
    EXPECT_THROW(ModelParams(0.0), std::invalid_argument);
}

TEST(TransitionPdf, FrozenValue) {
    auto r = transition_pdf({1, 1, 1}, mu1);
    EXPECT_LT(rel(r.value, 0.523857108254300579), 1e-11);
    EXPECT_TRUE(r.converged());
    EXPECT_LT(r.err_estimate, 1e-9);
}

TEST(TransitionPdf, SpectralAndLightenedFormsAgree) {
    for (double x : {0.3, 1.0, 2.5}) {
        double a = transition_pdf({x, 2, 0.7}, mu15).value;
        double b = transition_pdf({x, 2, 0.7}, mu15, {}, PdfForm::spectral).value;
        EXPECT_LT(rel(a, b), 1e-10) << x;
    }
}

TEST(TransitionPdf, DetailedBalance) {
    for (auto [x, y] : {std::pair{0.4, 1.7}, std::pair{2.0, 0.9}}) {
        double a = transition_pdf({x, 1.5, y}, mu15).value * stationary_pdf(y, mu15);
        double b = transition_pdf({y, 1.5, x}, mu15).value * stationary_pdf(x, mu15);
        EXPECT_LT(rel(a, b), 1e-10);
    }
}

TEST(TransitionPdf, Nonnegative) {
    for (double t : {0.2, 1.0, 5.0})
        for (double r : {0.0, 1.0, 3.0})
            for (double x = 0.05; x < 8; x *= 1.5) EXPECT_GE(transition_pdf({x, t, r}, mu15).value, -1e-12) << x << " " << t << " " << r;
}

TEST(TransitionPdf, ApproachesStationarityMonotonically) {
    double prev = 1e300;
    for (double t : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        double gap = std::abs(transition_pdf({1.0, t, 1.0}, mu1).value - stationary_pdf(1.0, mu1));
        EXPECT_LT(gap, prev) << t;
        prev = gap;
    }
}

TEST(TransitionPdf, StationaryDensityIsInvariant) {
    // int p(x, t | y) rho(y) dy = rho(x); with u = 2/(mu^2 y), rho(y) dy = e^{-u} du
    QuadratureSpec q;
    q.abs_tol = 1e-9;
    q.rel_tol = 1e-9;
    const double x = 1.2;
    auto f = [&](double u) { return u == 0 ? 0.0 : transition_pdf({x, 1.0, mu1.u_of(u)}, mu1).value * std::exp(-u); };
    auto r = integrate_semi_infinite(f, q, Decay::Exponential(1.0), 0.0, 16);
    EXPECT_NEAR(r.value, stationary_pdf(x, mu1), 1e-5);
}

TEST(TransitionPdf, DomainErrors) {
    EXPECT_THROW(transition_pdf({1, 0.01, 1}, mu1), small_time_error);
    EXPECT_THROW(transition_pdf({1, 1, -1}, mu1), std::domain_error);
    EXPECT_THROW(transition_pdf({-1, 1, 1}, mu1), std::domain_error);
    EXPECT_EQ(transition_pdf({0, 1, 1}, mu1).value, 0.0);
}

TEST(Eigenfunction, ZeroEndpointIsConstant) {
    double a = eigenfunction(0.0, 1.3, mu15);
    double b = eigenfunction(1e-4, 1.3, mu15);
    EXPECT_GT(std::abs(a), 0.0);
    EXPECT_LT(rel(b, a), 1e-3);
}

TEST(BesselForm, MatchesSpectral) {
    auto r = transition_pdf_bessel_form({1, 1, 1}, mu1);
    EXPECT_LT(rel(r.value, 0.523857108254300579), 1e-10);
    double s = transition_pdf({0.8, 1.5, 0}, mu15).value;
    EXPECT_LT(rel(transition_pdf_bessel_form({0.8, 1.5, 0}, mu15).value, s), 1e-9);
}

TEST(BesselForm, JacobianFreeVariantDiverges) {
    auto r = transition_pdf_bessel_form({1, 1, 1}, mu1, {}, BesselVariant::printed);
    EXPECT_FALSE(std::abs(r.value - 0.523857108254300579) < 1e-3);
    EXPECT_FALSE(r.converged());
}

TEST(BesselForm, MuInsteadOfMuSquaredFails) {
    double good = transition_pdf({1, 1, 1}, mu15).value;
    auto r = transition_pdf_bessel_form({1, 1, 1}, mu15, {}, BesselVariant::mu_denominator);
    EXPECT_FALSE(std::abs(r.value - good) < 1e-2 * good);
}

TEST(Greens, FrozenValue) {
    EXPECT_LT(rel(greens_function(1.0, 2.0, 0.5, mu1), 0.62078936607229787581), 1e-11);
    auto c = greens_function(1.0, 2.0, ComplexValue(0.5), mu1);
    EXPECT_EQ(c.re, greens_function(1.0, 2.0, 0.5, mu1));
    EXPECT_NEAR(c.im, 0.0, 1e-15);
}

TEST(Greens, SpectrumRejected) {
    EXPECT_THROW(greens_function(1.0, 2.0, 0.0, mu1), spectrum_error);
    EXPECT_THROW(greens_function(1.0, 2.0, ComplexValue(-0.3), mu1), spectrum_error);
    EXPECT_NO_THROW(greens_function(1.0, 2.0, ComplexValue(-0.3, 0.1), mu1));
}

TEST(Greens, SmallLambdaLimit) {
    // lambda G -> rho(x)
    for (double y : {0.0, 0.5, 3.0}) {
        double v = 1e-7 * greens_function(1.3, y, 1e-7, mu15);
        EXPECT_NEAR(v, stationary_pdf(1.3, mu15), 1e-6) << y;
    }
}

TEST(Cdf, FrozenClosedForm) {
    const double P = 0.63437897512636316;
    auto a = transition_cdf_closed(1.0, 1.0);
    auto b = transition_cdf_closed(1.0, 1.0, {}, ClosedCdfForm::peskir);
    EXPECT_NEAR(a.value, P, 1e-10);
    EXPECT_NEAR(b.value, P, 1e-10);
    EXPECT_NEAR(transition_cdf({1.0, 1.0, 0.0}, mu1).value, P, 1e-10);
}

TEST(Cdf, Limits) {
    EXPECT_NEAR(transition_cdf({200.0, 1.0, 1.0}, mu1).value, 1.0, 1e-6);
    EXPECT_EQ(transition_cdf({0.0, 1.0, 1.0}, mu1).value, 0.0);
    double late = transition_cdf_closed(1.0, 30.0).value;
    EXPECT_NEAR(late, std::exp(-2.0), 1e-3);
    EXPECT_NEAR(late, transition_cdf({1.0, 30.0, 0.0}, mu1).value, 1e-9);
}

TEST(Cdf, MassIsOne) {
    auto m = transition_mass(1.0, 1.0, mu15);
    EXPECT_NEAR(m.value, 1.0, 1e-9);
}

TEST(Laplace, PeskirImage) {
    EXPECT_LT(rel(laplace_image_cdf_peskir(1.0, 1.0), 0.72932943352677461621), 1e-13);
    EXPECT_LT(rel(laplace_image_cdf_peskir(0.5, 2.0), 0.34491843121195817428), 1e-13);
    // lambda image -> e^{-2/x}, Richardson in lambda
    auto li = [](double l) { return l * laplace_image_cdf_peskir(1.0, l); };
    EXPECT_NEAR(2 * li(1e-6) - li(2e-6), std::exp(-2.0), 1e-8);
    EXPECT_THROW(laplace_image_cdf_peskir(1.0, 0.0), std::domain_error);
}

TEST(Laplace, NumericTransformOfClosedCdf) {
    for (double x : {0.5, 1.0})
        for (double l : {0.5, 2.0}) EXPECT_NEAR(laplace_cdf_numeric(x, l).value, laplace_image_cdf_peskir(x, l), 1e-10);
}

TEST(Identities, HostlerSumExponent) {
    auto [l, r] = hostler_identity(1.5, 0.5, 3.0, 2.0);
    EXPECT_LT(rel(r, l), 1e-9);
}

TEST(Identities, HostlerProductExponentFails) {
    auto [l, r] = hostler_identity(1.5, 0.5, 3.0, 2.0, {}, HostlerVariant::product_exponent);
    EXPECT_GT(std::abs(r - l), 0.1 * std::abs(l));
}

TEST(Identities, Becker) {
    auto a = becker_identity(2.0, 1.0, 1.0);
    EXPECT_NEAR(a.rhs, 0.0347943026916228574, 1e-13);
    EXPECT_NEAR(a.lhs, a.rhs, 1e-8);
    auto b = becker_identity(0.5, 0.5, 2.25);
    EXPECT_NEAR(b.rhs, 0.0436773588938735551, 1e-13);
    EXPECT_NEAR(b.lhs, b.rhs, 1e-8);
    EXPECT_THROW(becker_identity(1.0, 1.0, 0.25), std::domain_error);
}
