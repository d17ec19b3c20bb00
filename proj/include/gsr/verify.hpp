#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"

namespace gsr::verify {

struct Check {
    std::string name;
    double measured = 0;
    double tolerance = 0;
    bool at_least = false;  // pass when measured >= tolerance
    bool pass = false;
};

struct Criterion {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0;
    double budget = 0;  // seconds

    bool pass() const {
        if (seconds > budget) return false;
        for (auto& c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }
};

inline Check at_most(std::string name, double v, double tol) { return {std::move(name), v, tol, false, v <= tol}; }
inline Check at_least(std::string name, double v, double tol) { return {std::move(name), v, tol, true, v >= tol}; }

struct Options {
    QuadratureSpec quad{};
    unsigned threads = 1;
    std::uint64_t seed = 20240917;
};

namespace detail {

template <class F>
Criterion timed(int id, std::string title, double budget, F&& body) {
    auto t0 = std::chrono::steady_clock::now();
    Criterion c{id, std::move(title), {}, 0, budget};
    try {
        body(c.checks);
    } catch (const std::exception& e) {
        c.checks.push_back({std::string("exception: ") + e.what(), 1, 0, false, false});
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace detail

inline Criterion normalization(const Options& o, bool reduced = false) {
    return detail::timed(1, "normalization", 120, [&](std::vector<Check>& out) {
        double worst = 0;
        std::vector<double> mus = {1.0, 1.5}, ts = {0.5, 1, 2, 5}, rs = {0.0, 1.0};
        if (reduced) ts = {1, 5};
        for (double mu : mus)
            for (double t : ts)
                for (double r : rs) worst = std::max(worst, std::abs(transition_mass(t, r, ModelParams(mu), o.quad).value - 1));
        out.push_back(at_most(reduced ? "max |mass - 1| (4 points)" : "max |mass - 1| (16 points)", worst, 1e-6));
    });
}

inline Criterion stationary_limit(const Options& o) {
    return detail::timed(2, "stationary limit", 60, [&](std::vector<Check>& out) {
        ModelParams p(1.5);
        for (double r : {0.0, 3.0}) {
            double worst = 0;
            for (int i = 0; i <= 295; ++i) {
                double x = 0.05 + 0.01 * i;
                worst = std::max(worst, std::abs(transition_pdf({x, 10, r}, p, o.quad).value - stationary_pdf(x, p)));
            }
            out.push_back(at_most("sup |p(x,10|" + std::to_string(int(r)) + ") - rho|", worst, 2e-3));
        }
    });
}

inline Criterion detailed_symmetry(const Options& o) {
    return detail::timed(3, "detailed symmetry", 60, [&](std::vector<Check>& out) {
        double worst = 0;
        const double pts[] = {0.25, 1, 2.5};
        for (double mu : {1.0, 1.5})
            for (double t : {1.0, 2.0}) {
                ModelParams p(mu);
                for (double x : pts)
                    for (double y : pts) {
                        double a = transition_pdf({x, t, y}, p, o.quad).value / speed_measure(x, p);
                        double b = transition_pdf({y, t, x}, p, o.quad).value / speed_measure(y, p);
                        worst = std::max(worst, detail::rel(a, b));
                    }
            }
        out.push_back(at_most("max relative asymmetry", worst, 1e-8));
    });
}

inline Criterion triangulation(const Options& o) {
    return detail::timed(4, "oracle triangulation", 1200, [&](std::vector<Check>& out) {
        double e_pde = 0, e_tal = 0, e_bes = 0;
        for (double mu : {1.0, 1.5})
            for (double t : {1.0, 2.0})
                for (double r : {0.0, 1.0}) {
                    ModelParams p(mu);
                    auto pde = solve_forward_pde(p, r, t);
                    for (double x : {0.5, 1.0, 2.0}) {
                        double ref = transition_pdf({x, t, r}, p, o.quad).value;
                        e_pde = std::max(e_pde, std::abs(pde.at(x) - ref));
                        e_tal = std::max(e_tal, std::abs(transition_pdf_talbot(x, t, r, p) - ref));
                        e_bes = std::max(e_bes, detail::rel(transition_pdf_bessel_form({x, t, r}, p, o.quad).value, ref));
                    }
                }
        out.push_back(at_most("PDE max abs diff", e_pde, 1e-3));
        out.push_back(at_most("Talbot max abs diff", e_tal, 1e-4));
        out.push_back(at_most("Bessel form max rel diff", e_bes, 1e-5));
    });
}

inline Criterion monte_carlo(const Options& o) {
    return detail::timed(5, "Monte Carlo KS", 300, [&](std::vector<Check>& out) {
        struct Cfg {
            double mu, r, t;
        };
        for (Cfg c : {Cfg{1, 1, 1}, Cfg{1.5, 0, 2}}) {
            SimSpec s;
            s.n_paths = 1000000;
            s.n_steps = 200;
            s.seed = o.seed;
            s.threads = o.threads;
            ModelParams p(c.mu);
            auto sim = simulate_endpoints(p, c.r, c.t, s);
            CdfTable cdf(p, c.t, c.r, o.quad);
            auto ks = ks_test(std::move(sim.samples), cdf);
            char buf[96];
            std::snprintf(buf, sizeof buf, "KS p-value (mu=%g, r=%g, t=%g; D=%.2e)", c.mu, c.r, c.t, ks.statistic);
            out.push_back(at_least(buf, ks.p_value, 0.01));
        }
    });
}

inline Criterion special_functions(const Options& o) {
    return detail::timed(6, "special-function identities", 60, [&](std::vector<Check>& out) {
        const double zs[] = {0.1, 0.5, 1, 2, 5, 10, 20, 35, 50};
        const double bs[] = {0.1, 0.5, 1, 2, 5};
        double e1 = 0;
        for (double z : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0})
            e1 = std::max(e1, detail::rel(whittaker_W(WhittakerIndex::real(0.5), z), z * std::exp(-0.5 * z)));
        out.push_back(at_most("W_{1,1/2}(z) vs z e^{-z/2}", e1, 1e-12));
        double e2 = 0, e3 = 0;
        for (double b : bs)
            for (double z : zs) {
                double a = whittaker_W(WhittakerIndex::imaginary(b), z), c = whittaker_W(WhittakerIndex::imaginary(-b), z);
                e2 = std::max(e2, detail::rel(a, c));
                if (z <= 10) e3 = std::max(e3, wronskian_check(WhittakerIndex::imaginary(b), z, 1e-4));
            }
        out.push_back(at_most("W evenness in i beta", e2, 1e-12));
        e3 = std::max(e3, wronskian_check(WhittakerIndex::real(0.5), 3.0, 1e-4));
        out.push_back(at_most("Wronskian residual", e3, 1e-6));
        double e4 = 0;
        for (int i = 0; i <= 40; ++i) {
            double b = 0.25 * i;
            double direct = std::exp(2 * log_gamma(ComplexValue(-0.5, b)).re);
            e4 = std::max(e4, detail::rel(gamma_abs_sq_shifted(b), direct));
        }
        out.push_back(at_most("|Gamma(i beta - 1/2)|^2 identity", e4, 1e-12));
        out.push_back(at_most("Becker residual (2, 1, 1)", becker_identity_residual(2, 1, 1, o.quad), 1e-7));
        out.push_back(at_most("Becker residual (0.5, 0.5, 2.25)", becker_identity_residual(0.5, 0.5, 2.25, o.quad), 1e-7));
    });
}

inline Criterion greens_limits(const Options& o) {
    return detail::timed(7, "Green's-function limits", 60, [&](std::vector<Check>& out) {
        ModelParams p(1.0);
        double e1 = 0;
        const double l = 1e-6;
        for (auto [x, y] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {2.0, 0.5}, {1.0, 0.0}}) {
            double f1 = l * greens_function(x, y, l, p), f2 = 2 * l * greens_function(x, y, 2 * l, p);
            e1 = std::max(e1, std::abs(2 * f1 - f2 - stationary_pdf(x, p)));
        }
        out.push_back(at_most("Richardson lambda G -> rho", e1, 1e-6));
        const double lam = 0.5;
        auto g = [&](double x) { return greens_function(x, 1.0, lam, p); };
        auto g0 = [&](double w) { return w == 0 ? 0.0 : 2 * w * gsr::detail::pdf_in_u(g, w * w, p); };
        auto g1 = [&](double u) { return gsr::detail::pdf_in_u(g, u, p); };
        QuadratureSpec q = o.quad;
        q.abs_tol = std::min(q.abs_tol, 1e-12);
        auto a = integrate_finite(g0, 0.0, 1.0, q, 8);
        auto b = integrate_semi_infinite(g1, q, Decay::Exponential(0.5), 1.0, 16);
        out.push_back(at_most("|int G dx - 1/lambda|", std::abs(a.value + b.value - 1 / lam), 1e-7));
    });
}

inline Criterion cdf_cross_check(const Options& o) {
    return detail::timed(8, "zero-headstart cdf cross-check", 300, [&](std::vector<Check>& out) {
        ModelParams p(1.0);
        double e1 = 0;
        for (double x : {0.5, 1.0, 2.0})
            for (double t : {0.5, 1.0, 2.0})
                e1 = std::max(e1, std::abs(transition_cdf_closed(x, t, o.quad).value - transition_cdf({x, t, 0}, p, o.quad).value));
        out.push_back(at_most("closed form vs pdf quadrature", e1, 1e-5));
        double e2 = 0;
        for (double x : {0.5, 1.0, 2.0})
            for (double lam : {0.5, 1.0, 2.0})
                e2 = std::max(e2, std::abs(laplace_cdf_numeric(x, lam, o.quad).value - laplace_image_cdf_peskir(x, lam)));
        out.push_back(at_most("Laplace image vs transform of cdf", e2, 1e-5));
    });
}

// x-argmax of p(x, t | r) by a grid scan refined with golden sections
inline double pdf_argmax(double t, double r, const ModelParams& p, const QuadratureSpec& q, double lo = 0.02, double hi = 5.0) {
    auto f = [&](double x) { return transition_pdf({x, t, r}, p, q).value; };
    double best = lo, fb = -1;
    const int n = 500;
    for (int i = 0; i <= n; ++i) {
        double x = lo + (hi - lo) * i / n, v = f(x);
        if (v > fb) fb = v, best = x;
    }
    double a = std::max(lo, best - (hi - lo) / n), b = std::min(hi, best + (hi - lo) / n);
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    double c = b - g * (b - a), d = a + g * (b - a), fc = f(c), fd = f(d);
    while (b - a > 1e-6) {
        if (fc > fd) b = d, d = c, fd = fc, c = b - g * (b - a), fc = f(c);
        else a = c, c = d, fc = fd, d = a + g * (b - a), fd = f(d);
    }
    return 0.5 * (a + b);
}

inline Criterion figures(const Options& o) {
    return detail::timed(9, "figure reproduction", 180, [&](std::vector<Check>& out) {
        ModelParams p1(1.0);
        double worst = 0;
        for (double r : {0.5, 1.0, 2.0}) worst = std::max(worst, std::abs(pdf_argmax(0.1, r, p1, o.quad) - r));
        out.push_back(at_most("ridge: max |argmax_x p(x,0.1|r) - r|", worst, 0.1));
        ModelParams p(1.5);
        double spread = 0;
        for (int i = 0; i <= 60; ++i) {
            double x = 0.05 * i, lo = 1e300, hi = -1e300;
            for (int j = 0; j <= 30; ++j) {
                double v = transition_pdf({x, 10, 0.1 * j}, p, o.quad).value;
                lo = std::min(lo, v), hi = std::max(hi, v);
            }
            spread = std::max(spread, hi - lo);
        }
        out.push_back(at_most("max_x r-spread of p(x,10|r)", spread, 1e-2));
    });
}

inline Criterion chapman_kolmogorov(const Options& o) {
    return detail::timed(10, "Chapman-Kolmogorov", 180, [&](std::vector<Check>& out) {
        ModelParams p(1.0);
        QuadratureSpec q = o.quad;
        auto f = [&](double u) { return transition_pdf({1, 1, u}, p, q).value * transition_pdf({u, 1, 1}, p, q).value; };
        QuadratureSpec oq = o.quad;
        oq.abs_tol = std::max(oq.abs_tol, 1e-9);
        auto I = integrate_finite(f, 0.0, 30.0, oq, 60);
        out.push_back(at_most("|int p p du - p(1,2|1)|", std::abs(I.value - transition_pdf({1, 2, 1}, p, q).value), 1e-4));
    });
}

inline std::vector<Criterion> acceptance(const Options& o) {
    return {normalization(o),   stationary_limit(o), detailed_symmetry(o), triangulation(o), monte_carlo(o),
            special_functions(o), greens_limits(o),    cdf_cross_check(o),    figures(o),       chapman_kolmogorov(o)};
}

inline void print(const Criterion& c, std::FILE* f = stdout) {
    std::fprintf(f, "criterion %2d  %-32s %s  (%.1fs, budget %.0fs)\n", c.id, c.title.c_str(), c.pass() ? "PASS" : "FAIL", c.seconds,
                 c.budget);
    for (auto& k : c.checks)
        std::fprintf(f, "      %-52s %.3e %s %.1e  %s\n", k.name.c_str(), k.measured, k.at_least ? ">=" : "<=", k.tolerance,
                     k.pass ? "ok" : "FAIL");
}

}  // namespace gsr::verify
