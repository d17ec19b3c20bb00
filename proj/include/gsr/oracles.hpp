#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gsr.hpp"

namespace gsr {

// ---------------------------------------------------------------- Monte Carlo

enum class Scheme { euler_maruyama, log_exact_gbm_composite };

struct SimSpec {
    std::size_t n_paths = 100000;
    std::size_t n_steps = 200;
    Scheme scheme = Scheme::log_exact_gbm_composite;
    std::uint64_t seed = 20240917;
    bool estimate_bias = false;  // rerun at 2 n_steps on the same Brownian paths
    bool zero_noise = false;     // dB = 0, for drift checks
    unsigned threads = 1;

    void validate() const {
        if (n_paths < 1) throw std::invalid_argument("SimSpec: n_paths must be >= 1");
        if (n_steps < 1) throw std::invalid_argument("SimSpec: n_steps must be >= 1");
    }
};

struct SimResult {
    std::vector<double> samples;
    std::size_t clamp_count = 0;
    double mean = 0, sd = 0;
    // second-moment difference between n_steps and 2 n_steps (NaN if not requested)
    double bias_estimate = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline constexpr std::size_t paths_per_block = 4096;

// one engine per block, keyed by (seed, block)
inline std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq sq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(block), std::uint32_t(block >> 32), 0x9e3779b9u};
    return std::mt19937_64(sq);
}

template <class Body>
void for_blocks(std::size_t n_blocks, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(n_blocks)));
    if (threads == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) body(b);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t b = w; b < n_blocks; b += threads) body(b);
        });
    for (auto& th : pool) th.join();
}

struct stepper {
    double mu, dt;
    Scheme scheme;
    std::size_t clamps = 0;

    // dB is the Brownian increment over dt
    double operator()(double R, double dB) {
        if (scheme == Scheme::euler_maruyama) {
            double n = R + dt + mu * R * dB;
            if (n < 0) {
                ++clamps;
                n = 0;
            }
            return n;
        }
        // R_{k+1} = G R_k + int Lambda_{k+1}/Lambda_s ds, trapezoid between G and 1
        double G = std::exp(mu * dB - 0.5 * mu * mu * dt);
        return G * R + 0.5 * dt * (G + 1);
    }
};

}  // namespace detail

inline SimResult simulate_endpoints(const ModelParams& p, double r, double t, const SimSpec& spec) {
    spec.validate();
    if (!(t > 0)) throw std::domain_error("simulate_endpoints: t must be positive");
    if (r < 0) throw std::domain_error("simulate_endpoints: r must be nonnegative");
    const std::size_t n = spec.n_paths, nb = (n + detail::paths_per_block - 1) / detail::paths_per_block;
    SimResult out;
    out.samples.resize(n);
    std::vector<std::size_t> clamps(nb, 0);
    std::vector<double> m2c(nb, 0), m2f(nb, 0);
    const double dt = t / spec.n_steps;
    detail::for_blocks(nb, spec.threads, [&](std::size_t b) {
        auto eng = detail::block_engine(spec.seed, b);
        std::normal_distribution<double> nd;
        detail::stepper coarse{p.mu, dt, spec.scheme}, fine{p.mu, dt / 2, spec.scheme};
        const double sh = std::sqrt(dt / 2);
        std::size_t lo = b * detail::paths_per_block, hi = std::min(n, lo + detail::paths_per_block);
        for (std::size_t i = lo; i < hi; ++i) {
            double R = r, Rf = r;
            for (std::size_t k = 0; k < spec.n_steps; ++k) {
                double z1 = nd(eng), z2 = nd(eng);
                if (spec.zero_noise) z1 = z2 = 0;
                double d1 = sh * z1, d2 = sh * z2;
                R = coarse(R, d1 + d2);
                if (spec.estimate_bias) Rf = fine(fine(Rf, d1), d2);
            }
            out.samples[i] = R;
            if (spec.estimate_bias) {
                m2c[b] += R * R;
                m2f[b] += Rf * Rf;
            }
        }
        clamps[b] = coarse.clamps;
    });
    double s = 0, s2 = 0, c2 = 0, f2 = 0;
    for (std::size_t b = 0; b < nb; ++b) out.clamp_count += clamps[b], c2 += m2c[b], f2 += m2f[b];
    for (double v : out.samples) s += v;
    out.mean = s / n;
    for (double v : out.samples) s2 += (v - out.mean) * (v - out.mean);
    out.sd = n > 1 ? std::sqrt(s2 / (n - 1)) : 0;
    if (spec.estimate_bias) out.bias_estimate = (c2 - f2) / n;
    return out;
}

// ---------------------------------------------------------------- KS test

// Tabulated cdf x -> P(x, t | r): nodes log-spaced, cumulative mass by 5-point Gauss-Legendre,
// cubic Hermite interpolation with the pdf as slope.
class CdfTable {
public:
    CdfTable(const ModelParams& p, double t, double r, const QuadratureSpec& spec = {}, double x_lo = 1e-2, double x_hi = 200.0,
             double h = 0.04)
        : p_(p), t_(t), r_(r), spec_(spec) {
        detail::check_time(t);
        if (!(x_lo > 0 && x_hi > x_lo && h > 0)) throw std::invalid_argument("CdfTable: bad grid");
        static constexpr double gx[5] = {-0.906179845938664, -0.538469310105683, 0.0, 0.538469310105683, 0.906179845938664};
        static constexpr double gw[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889, 0.478628670499366,
                                         0.236926885056189};
        auto pdf = [&](double x) { return transition_pdf({x, t, r}, p, spec).value; };
        const std::size_t m = std::size_t(std::ceil(std::log(x_hi / x_lo) / h));
        const double step = std::log(x_hi / x_lo) / m;
        for (std::size_t i = 0; i <= m; ++i) x_.push_back(x_lo * std::exp(step * i));
        F_.push_back(transition_cdf({x_lo, t, r}, p, spec).value);
        for (std::size_t i = 0; i <= m; ++i) d_.push_back(pdf(x_[i]));
        for (std::size_t i = 0; i < m; ++i) {
            double a = x_[i], b = x_[i + 1], c = 0.5 * (a + b), hw = 0.5 * (b - a), s = 0;
            for (int k = 0; k < 5; ++k) s += gw[k] * pdf(c + hw * gx[k]);
            F_.push_back(F_.back() + hw * s);
        }
    }

    double operator()(double x) const {
        if (x <= 0) return 0;
        if (x < x_.front() || x > x_.back()) return transition_cdf({x, t_, r_}, p_, spec_).value;
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = std::min<std::size_t>(std::size_t(it - x_.begin()) - 1, x_.size() - 2);
        double h = x_[i + 1] - x_[i], s = (x - x_[i]) / h;
        double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s), h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        return h00 * F_[i] + h10 * h * d_[i] + h01 * F_[i + 1] + h11 * h * d_[i + 1];
    }

    double upper() const { return F_.back(); }

private:
    ModelParams p_;
    double t_, r_;
    QuadratureSpec spec_;
    std::vector<double> x_, F_, d_;
};

struct KsResult {
    double statistic = 0;
    double p_value = 1;
    std::size_t n = 0;
};

// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
inline double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double s = 0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 ? 2 : -2) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf) {
    std::sort(samples.begin(), samples.end());
    KsResult r;
    r.n = samples.size();
    const double n = double(r.n);
    for (std::size_t i = 0; i < r.n; ++i) {
        double F = cdf(samples[i]);
        r.statistic = std::max({r.statistic, (i + 1) / n - F, F - i / n});
    }
    double sn = std::sqrt(n);
    r.p_value = kolmogorov_q((sn + 0.12 + 0.11 / sn) * r.statistic);
    return r;
}

// ---------------------------------------------------------------- forward PDE

struct pde_instability : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PdeSpec {
    double x_max = 0;        // 0: max(10, r + 10/mu^2, 2e4/mu^2)
    double x_min = 1e-4;
    std::size_t n_x = 4000;  // cells in log x
    std::size_t n_t = 2000;
    double theta = 0.5;
    int startup_steps = 80;  // implicit half steps before theta stepping
    bool gaussian_start = false;
    double gaussian_width = 0.02;  // in log x

    void validate() const {
        if (x_max < 0 || !(x_min > 0)) throw std::invalid_argument("PdeSpec: need x_min > 0, x_max >= 0");
        if (n_x < 16 || n_t < 1) throw std::invalid_argument("PdeSpec: grid too coarse");
        if (!(theta >= 0 && theta <= 1)) throw std::invalid_argument("PdeSpec: theta must lie in [0, 1]");
    }
};

struct PdeSolution {
    std::vector<double> x, p;  // cell centres and density in x
    double mass = 0;
    double max_mass_drift = 0;
    double min_value = 0;
    double right_density = 0;  // x p at the far cell, a proxy for truncated mass

    // linear interpolation in log x
    double at(double xq) const {
        if (xq <= x.front()) return xq <= 0 ? 0.0 : p.front() * xq / x.front();
        if (xq >= x.back()) return 0.0;
        auto it = std::upper_bound(x.begin(), x.end(), xq);
        std::size_t i = std::size_t(it - x.begin()) - 1;
        double s = std::log(xq / x[i]) / std::log(x[i + 1] / x[i]);
        return (1 - s) * p[i] + s * p[i + 1];
    }
};

// Finite volumes in y = log x for f = x p:  f_t = -J_y,  J = (e^{-y} - mu^2/2) f - (mu^2/2) f_y,
// zero flux at both ends, Scharfetter-Gummel face fluxes.
inline PdeSolution solve_forward_pde(const ModelParams& p, double r, double t, const PdeSpec& spec = {}) {
    spec.validate();
    if (!(t > 0)) throw std::domain_error("solve_forward_pde: t must be positive");
    const double m2 = p.mu2(), D = 0.5 * m2;
    // stationary mass beyond x is 1 - e^{-2/(mu^2 x)}: keep it near 1e-4
    const double x_max = spec.x_max > 0 ? spec.x_max : std::max({10.0, r + 10 / m2, 2e4 / m2});
    if (r < 0 || r >= x_max) throw std::domain_error("solve_forward_pde: r must lie inside the grid");
    const std::size_t n = spec.n_x;
    double y0 = std::log(spec.x_min), h = (std::log(x_max) - y0) / n;
    std::size_t ir = 0;
    if (r > spec.x_min) {
        // align a cell centre with log r
        double k = std::round((std::log(r) - y0) / h - 0.5);
        ir = std::size_t(std::max(0.0, k));
        y0 = std::log(r) - (ir + 0.5) * h;
    }
    std::vector<double> y(n), f(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) y[i] = y0 + (i + 0.5) * h;
    if (spec.gaussian_start && r > spec.x_min) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += f[i] = std::exp(-0.5 * std::pow((y[i] - std::log(r)) / spec.gaussian_width, 2));
        for (double& v : f) v /= s * h;
    } else {
        f[ir] = 1 / h;
    }
    // face i+1/2 between cells i, i+1: J = A_i f_i - B_i f_{i+1}
    auto bern = [](double z) { return std::abs(z) < 1e-8 ? 1 - 0.5 * z : z / std::expm1(z); };
    std::vector<double> A(n - 1), B(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double v = std::exp(-(y0 + (i + 1) * h)) - D;
        double pe = v * h / D;
        A[i] = D / h * bern(-pe);
        B[i] = D / h * bern(pe);
    }
    // L f: (J_{i-1/2} - J_{i+1/2})/h, tridiagonal
    std::vector<double> lo(n, 0), di(n, 0), up(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) lo[i] = A[i - 1] / h, di[i] -= B[i - 1] / h;
        if (i + 1 < n) di[i] -= A[i] / h, up[i] = B[i] / h;
    }
    auto mass = [&] {
        double s = 0;
        for (double v : f) s += v * h;
        return s;
    };
    PdeSolution sol;
    const double m0 = mass();
    std::vector<double> rhs(n), cp(n), dp(n);
    auto step = [&](double dt, double th) {
        for (std::size_t i = 0; i < n; ++i) {
            double Lf = di[i] * f[i];
            if (i > 0) Lf += lo[i] * f[i - 1];
            if (i + 1 < n) Lf += up[i] * f[i + 1];
            rhs[i] = f[i] + (1 - th) * dt * Lf;
        }
        // (I - th dt L) f_new = rhs, Thomas
        double b0 = 1 - th * dt * di[0];
        cp[0] = -th * dt * up[0] / b0;
        dp[0] = rhs[0] / b0;
        for (std::size_t i = 1; i < n; ++i) {
            double a = -th * dt * lo[i], b = 1 - th * dt * di[i], c = -th * dt * up[i];
            double den = b - a * cp[i - 1];
            cp[i] = c / den;
            dp[i] = (rhs[i] - a * dp[i - 1]) / den;
        }
        f[n - 1] = dp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) f[i] = dp[i] - cp[i] * f[i + 1];
        double mm = mass(), mn = *std::min_element(f.begin(), f.end());
        sol.max_mass_drift = std::max(sol.max_mass_drift, std::abs(mm - m0));
        sol.min_value = std::min(sol.min_value, mn);
        if (!(std::abs(mm - m0) <= 1e-10) || mn < -1e-6 / h) {
            std::ostringstream os;
            os << "solve_forward_pde: unstable step (mass drift " << mm - m0 << ", min " << mn << ")";
            throw pde_instability(os.str());
        }
    };
    double dt = t / spec.n_t, tt = 0;
    int ns = std::min<int>(spec.startup_steps, int(2 * spec.n_t));
    for (int k = 0; k < ns; ++k) step(0.5 * dt, 1.0), tt += 0.5 * dt;
    std::size_t rest = std::size_t(std::ceil((t - tt) / dt - 1e-9));
    double dt2 = rest ? (t - tt) / rest : 0;
    for (std::size_t k = 0; k < rest; ++k) step(dt2, spec.theta);
    sol.x.resize(n);
    sol.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) sol.x[i] = std::exp(y[i]), sol.p[i] = f[i] / sol.x[i];
    sol.mass = mass();
    sol.right_density = f[n - 1];
    return sol;
}

// ---------------------------------------------------------------- Laplace inversion

struct contour_violation : std::domain_error {
    using std::domain_error::domain_error;
};

struct TalbotSpec {
    int n_nodes = 24;
    double contour_scale = 0.4;     // r = contour_scale n_nodes / t
    double rightmost_singularity = 0;  // contour must cross the real axis to its right

    void validate() const {
        if (n_nodes < 8) throw std::invalid_argument("TalbotSpec: n_nodes must be >= 8");
        if (!(contour_scale > 0)) throw std::invalid_argument("TalbotSpec: contour_scale must be positive");
    }
};

// Fixed Talbot contour lambda(theta) = r theta (cot theta + i).
inline double invert_laplace(const std::function<ComplexValue(ComplexValue)>& F, double t, const TalbotSpec& spec = {}) {
    spec.validate();
    if (!(t > 0)) throw std::domain_error("invert_laplace: t must be positive");
    const int M = spec.n_nodes;
    const double r = spec.contour_scale * M / t;
    if (!(r > spec.rightmost_singularity))
        throw contour_violation("invert_laplace: contour does not clear the rightmost singularity");
    double s = 0.5 * F(ComplexValue(r)).re * std::exp(r * t);
    for (int k = 1; k < M; ++k) {
        double th = k * M_PI / M, ct = std::cos(th) / std::sin(th);
        ComplexValue lam(r * th * ct, r * th);
        double sg = th + (th * ct - 1) * ct;
        ComplexValue v = gsr::exp(lam * t) * F(lam) * ComplexValue(1.0, sg);
        s += v.re;
    }
    return r / M * s;
}

// p(x, t | y) from the Green's function.
inline double transition_pdf_talbot(double x, double t, double y, const ModelParams& p, const TalbotSpec& spec = {}) {
    return invert_laplace([&](ComplexValue l) { return greens_function(x, y, l, p); }, t, spec);
}

}  // namespace gsr
