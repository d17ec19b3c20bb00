#include <gtest/gtest.h>

#include <cmath>

#include "gsr/oracles.hpp"

using namespace gsr;

namespace {

const ModelParams mu1{1.0};
const ModelParams mu15{1.5};

}  // namespace

TEST(MonteCarlo, DriftOnly) {
    SimSpec s;
    s.n_paths = 1000;
    s.n_steps = 50;
    s.scheme = Scheme::euler_maruyama;
    s.zero_noise = true;
    auto r = simulate_endpoints(mu1, 0.7, 2.0, s);
    for (double v : r.samples) ASSERT_NEAR(v, 2.7, 1e-12);
}

TEST(MonteCarlo, DeterministicAcrossThreads) {
    SimSpec s;
    s.n_paths = 20000;
    s.n_steps = 20;
    auto a = simulate_endpoints(mu15, 1.0, 1.0, s);
    s.threads = 4;
    auto b = simulate_endpoints(mu15, 1.0, 1.0, s);
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_EQ(a.mean, b.mean);
}

TEST(MonteCarlo, MeanIsHeadstartPlusTime) {
    for (auto scheme : {Scheme::euler_maruyama, Scheme::log_exact_gbm_composite}) {
        SimSpec s;
        s.n_paths = 100000;
        s.n_steps = 100;
        s.scheme = scheme;
        auto r = simulate_endpoints(mu1, 1.0, 1.0, s);
        EXPECT_NEAR(r.mean, 2.0, 4 * r.sd / std::sqrt(double(s.n_paths)));
        for (double v : r.samples) ASSERT_GE(v, 0.0);
    }
}

TEST(MonteCarlo, EulerBiasHalvesWithStep) {
    // exact Euler second moment: m2' = m2 (1 + mu^2 dt) + 2 dt m1 + dt^2, m1 exact
    const ModelParams p(0.5);
    auto m2 = [&](int n) {
        double dt = 1.0 / n, m1 = 1, m = 1;
        for (int k = 0; k < n; ++k) m = m * (1 + p.mu2() * dt) + 2 * dt * m1 + dt * dt, m1 += dt;
        return m;
    };
    SimSpec s;
    s.n_paths = 100000;
    s.scheme = Scheme::euler_maruyama;
    s.estimate_bias = true;
    double prev = 0;
    for (int n : {5, 10, 20}) {
        s.n_steps = n;
        double b = simulate_endpoints(p, 1.0, 1.0, s).bias_estimate, exact = m2(n) - m2(2 * n);
        EXPECT_NEAR(b, exact, 0.15 * std::abs(exact)) << n;
        if (prev != 0) {
            EXPECT_GT(prev / b, 1.5);
            EXPECT_LT(prev / b, 2.5);
        }
        prev = b;
    }
}

TEST(MonteCarlo, KolmogorovSmirnov) {
    SimSpec s;
    s.n_paths = 50000;
    s.n_steps = 200;
    auto r = simulate_endpoints(mu1, 1.0, 1.0, s);
    CdfTable F(mu1, 1.0, 1.0);
    auto ks = ks_test(r.samples, F);
    EXPECT_GT(ks.p_value, 0.01);
    EXPECT_NEAR(F.upper(), 1.0, 1e-6);
}

TEST(MonteCarlo, KolmogorovTail) {
    EXPECT_NEAR(kolmogorov_q(1.0), 0.26999967167735456, 1e-12);
    EXPECT_NEAR(kolmogorov_q(1.36), 0.04941, 1e-4);
    EXPECT_EQ(kolmogorov_q(0.1), 1.0);
}

TEST(MonteCarlo, RejectsBadSpec) {
    SimSpec s;
    s.n_paths = 0;
    EXPECT_THROW(simulate_endpoints(mu1, 1.0, 1.0, s), std::invalid_argument);
    s = {};
    EXPECT_THROW(simulate_endpoints(mu1, -1.0, 1.0, s), std::domain_error);
}

TEST(Pde, MassAndAgreement) {
    auto sol = solve_forward_pde(mu1, 1.0, 1.0);
    EXPECT_NEAR(sol.mass, 1.0, 1e-10);
    EXPECT_LT(sol.max_mass_drift, 1e-10);
    for (double x : {0.3, 1.0, 2.0}) EXPECT_NEAR(sol.at(x), transition_pdf({x, 1.0, 1.0}, mu1).value, 1e-4) << x;
}

TEST(Pde, ZeroHeadstart) {
    auto sol = solve_forward_pde(mu15, 0.0, 2.0);
    EXPECT_GE(sol.min_value, -1e-10);
    EXPECT_NEAR(sol.at(0.8), transition_pdf({0.8, 2.0, 0.0}, mu15).value, 2e-4);
}

TEST(Pde, SecondOrderInSpace) {
    auto err = [](std::size_t nx) {
        PdeSpec s;
        s.n_x = nx;
        s.n_t = nx / 2;
        auto sol = solve_forward_pde(mu1, 1.0, 1.0, s);
        double e = 0;
        for (double x = 0.1; x <= 3; x += 0.05) e = std::max(e, std::abs(sol.at(x) - transition_pdf({x, 1.0, 1.0}, mu1).value));
        return e;
    };
    double e1 = err(1000), e2 = err(2000);
    EXPECT_GT(e1 / e2, 3.0);
}

TEST(Pde, BadSpec) {
    PdeSpec s;
    s.theta = 2;
    EXPECT_THROW(solve_forward_pde(mu1, 1.0, 1.0, s), std::invalid_argument);
}

TEST(Talbot, ElementaryTransforms) {
    auto one = [](ComplexValue l) { return ComplexValue(1.0) / l; };
    auto ex = [](ComplexValue l) { return ComplexValue(1.0) / (l + ComplexValue(1.0)); };
    for (double t : {0.5, 1.0, 4.0}) {
        EXPECT_NEAR(invert_laplace(one, t), 1.0, 1e-10);
        EXPECT_NEAR(invert_laplace(ex, t), std::exp(-t), 1e-10);
    }
}

TEST(Talbot, ContourViolation) {
    TalbotSpec s;
    s.rightmost_singularity = 50;
    EXPECT_THROW(invert_laplace([](ComplexValue l) { return ComplexValue(1.0) / l; }, 1.0, s), contour_violation);
}

TEST(Talbot, MatchesSpectralPdf) {
    for (double r : {0.0, 1.0})
        EXPECT_NEAR(transition_pdf_talbot(0.9, 1.0, r, mu15), transition_pdf({0.9, 1.0, r}, mu15).value, 1e-9) << r;
}
