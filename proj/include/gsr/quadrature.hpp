#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsr {

enum QuadFlag : unsigned {
    flag_converged = 1u,
    flag_truncated_early = 2u,
    flag_cancellation_warning = 4u,
};

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_subdivisions = 4000;
    double truncation_slack = 1.25;

    void validate() const {
        if (!(rel_tol > 0) || !(abs_tol > 0)) throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
        if (max_subdivisions < 1) throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
        if (!(truncation_slack >= 1)) throw std::invalid_argument("QuadratureSpec: truncation_slack must be >= 1");
    }
};

struct EvalResult {
    double value = 0;
    double err_estimate = 0;
    std::size_t nodes_used = 0;
    double truncation_point = 0;
    unsigned flags = 0;

    bool has(QuadFlag f) const { return (flags & f) != 0; }
    bool converged() const { return has(flag_converged); }

    std::string flag_string() const {
        std::string s;
        auto add = [&](const char* n) { s += s.empty() ? n : std::string("|") + n; };
        if (has(flag_converged)) add("converged");
        if (has(flag_truncated_early)) add("truncated_early");
        if (has(flag_cancellation_warning)) add("cancellation_warning");
        if (!has(flag_converged) && !has(flag_truncated_early)) add("not_converged");
        return s;
    }
};

struct Decay {
    enum Kind { gaussian, exponential } kind = gaussian;
    double rate = 1;  // envelope e^{-rate x^2} or e^{-rate x}

    static Decay Gaussian(double r) { return {gaussian, r}; }
    static Decay Exponential(double r) { return {exponential, r}; }
};

namespace detail {

// Kronrod 15 / Gauss 7 nodes and weights
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780, 0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct panel {
    double a, b, value, err, absval;
};

template <class F>
panel gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double rk = fc * wgk[7], rg = fc * wg[3], ra = std::abs(rk);
    std::array<double, 7> f1, f2;
    for (int j = 0; j < 7; ++j) {
        double dx = h * xgk[j];
        f1[j] = f(c - dx);
        f2[j] = f(c + dx);
        rk += wgk[j] * (f1[j] + f2[j]);
        ra += wgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) rg += wg[j / 2] * (f1[j] + f2[j]);
    }
    double mean = rk * 0.5;
    double asc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) asc += wgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
    double res = rk * h, err = std::abs((rk - rg) * h);
    asc *= std::abs(h);
    ra *= std::abs(h);
    if (asc != 0 && err != 0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (ra > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * ra, err);
    if (!std::isfinite(res)) err = std::numeric_limits<double>::infinity();
    return {a, b, res, err, ra};
}

}  // namespace detail

template <class F>
EvalResult integrate_panels(F&& f, const std::vector<double>& breaks, const QuadratureSpec& spec) {
    spec.validate();
    using detail::panel;
    auto worse = [](const panel& p, const panel& q) { return p.err < q.err || (p.err == q.err && p.a > q.a); };
    std::priority_queue<panel, std::vector<panel>, decltype(worse)> heap(worse);
    double total = 0, err = 0, absval = 0;
    std::size_t evals = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        panel p = detail::gk15(f, breaks[i], breaks[i + 1]);
        evals += 15;
        total += p.value;
        err += p.err;
        absval += p.absval;
        heap.push(p);
    }
    std::size_t pieces = heap.size();
    bool roundoff = false;
    auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    bool ok = err <= target();
    while (!ok && pieces < spec.max_subdivisions) {
        panel p = heap.top();
        double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) break;
        // worst panel already at its roundoff floor: bisection cannot help
        if (p.err <= 50.5 * std::numeric_limits<double>::epsilon() * p.absval) {
            roundoff = true;
            break;
        }
        heap.pop();
        panel l = detail::gk15(f, p.a, m), r = detail::gk15(f, m, p.b);
        evals += 30;
        total += l.value + r.value - p.value;
        err += l.err + r.err - p.err;
        absval += l.absval + r.absval - p.absval;
        heap.push(l);
        heap.push(r);
        ++pieces;
        if (err <= target()) {
            // recompute from scratch to shed drift in the running sums
            std::vector<panel> all;
            all.reserve(heap.size());
            auto copy = heap;
            while (!copy.empty()) all.push_back(copy.top()), copy.pop();
            std::sort(all.begin(), all.end(), [](const panel& x, const panel& y) { return x.a < y.a; });
            total = err = absval = 0;
            for (auto& q : all) total += q.value, err += q.err, absval += q.absval;
            ok = err <= target();
        }
    }
    std::vector<panel> all;
    all.reserve(heap.size());
    while (!heap.empty()) all.push_back(heap.top()), heap.pop();
    std::sort(all.begin(), all.end(), [](const panel& x, const panel& y) { return x.a < y.a; });
    total = err = absval = 0;
    for (auto& q : all) total += q.value, err += q.err, absval += q.absval;

    EvalResult r;
    r.value = total;
    r.err_estimate = err;
    r.nodes_used = evals;
    r.truncation_point = breaks.back();
    if (err <= target() && std::isfinite(total)) r.flags |= flag_converged;
    if (roundoff || (absval > 1e6 * std::abs(total) && absval * 1e-15 > target())) r.flags |= flag_cancellation_warning;
    return r;
}

template <class F>
EvalResult integrate_finite(F&& f, double a, double b, const QuadratureSpec& spec, int initial_panels = 1) {
    if (!(a < b)) throw std::invalid_argument("integrate_finite: need a < b");
    std::vector<double> br(initial_panels + 1);
    for (int i = 0; i <= initial_panels; ++i) br[i] = a + (b - a) * i / initial_panels;
    br.back() = b;
    return integrate_panels(f, br, spec);
}

// Truncation point for a tail envelope: T = slack sqrt(ln(1/abs_tol)/rate), or slack ln(1/abs_tol)/rate.
inline double truncation_point(const Decay& d, const QuadratureSpec& spec) {
    if (!(d.rate > 0)) throw std::invalid_argument("Decay: rate must be positive");
    double L = std::max(1.0, std::log(1.0 / spec.abs_tol));
    return d.kind == Decay::gaussian ? spec.truncation_slack * std::sqrt(L / d.rate)
                                     : spec.truncation_slack * L / d.rate;
}

template <class F>
EvalResult integrate_semi_infinite(F&& f, const QuadratureSpec& spec, Decay decay, double lower = 0.0, int initial_panels = 8) {
    spec.validate();
    double T = lower + truncation_point(decay, spec);
    bool tail_ok = false;
    for (int k = 0; k < 40; ++k) {
        double v = std::abs(f(T));
        if (std::isfinite(v) && v * 10.0 * T <= spec.abs_tol) {
            tail_ok = true;
            break;
        }
        T = lower + (T - lower) * 1.25;
    }
    EvalResult r = integrate_finite(f, lower, T, spec, initial_panels);
    if (!tail_ok) {
        r.flags &= ~unsigned(flag_converged);
        r.flags |= flag_truncated_early;
    }
    r.truncation_point = T;
    return r;
}

}  // namespace gsr
