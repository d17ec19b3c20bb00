#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "complex.hpp"

namespace gsr {

struct pole_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct cancellation_error : std::runtime_error {
    double rel_error;
    cancellation_error(const std::string& what, double e) : std::runtime_error(what), rel_error(e) {}
};

struct WhittakerIndex {
    double a = 1.0;
    ComplexValue b{};

    static WhittakerIndex real(double alpha) { return {1.0, {alpha, 0.0}}; }
    static WhittakerIndex imaginary(double beta) { return {1.0, {0.0, beta}}; }
};

enum class WMethod { none, asymptotic, integral, connection, connection_mp };

struct WhittakerDiagnostics {
    double err_estimate = 0;   // relative
    double imag_residual = 0;  // absolute, of the complex intermediate
    WMethod method = WMethod::none;
    int precision_digits = 0;
};

namespace detail {

using mp_quad = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<36>, boost::multiprecision::et_off>;
using mp_60 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<60>, boost::multiprecision::et_off>;
using mp_110 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<110>, boost::multiprecision::et_off>;

template <class T>
T epsilon() { return std::numeric_limits<T>::epsilon(); }

template <class T>
using cx = basic_complex<T>;

template <class T>
cx<T> stirling(const cx<T>& w) {
    using boost::math::constants::two_pi;
    using std::log;
    cx<T> lw = gsr::log(w);
    cx<T> s = (w - cx<T>(T(0.5))) * lw - w + cx<T>(log(two_pi<T>()) / 2);
    cx<T> inv = cx<T>(T(1)) / w, inv2 = inv * inv, p = inv;
    T prev = std::numeric_limits<T>::max();
    for (int k = 1; k < 80; ++k) {
        T b2k = boost::math::bernoulli_b2n<T>(k);
        cx<T> term = p * (b2k / T(2 * k * (2 * k - 1)));
        T at = gsr::abs(term);
        if (at > prev) break;
        s += term;
        if (at <= epsilon<T>() * gsr::abs(s) / 8) break;
        prev = at;
        p *= inv2;
    }
    return s;
}

// log Gamma continuous in the cut plane; exp() gives Gamma(z).
template <class T>
cx<T> log_gamma(cx<T> z) {
    using std::abs;
    using std::floor;
    if (z.im == 0 && z.re <= 0 && floor(z.re) == z.re) throw pole_error("log_gamma: pole at nonpositive integer");
    const T w0 = T(0.45 * std::numeric_limits<T>::digits10 + 7);
    cx<T> acc{};
    while (z.re < 0 || gsr::abs(z) < w0) {
        acc += gsr::log(z);
        z.re += 1;
    }
    return stirling(z) - acc;
}

template <class T>
struct series_sum {
    cx<T> value;
    T max_term;
    int terms;
};

// Kummer M(a, c, z) for real z >= 0.
template <class T>
series_sum<T> kummer_m(const cx<T>& a, const cx<T>& c, T z) {
    cx<T> term(T(1)), sum(T(1));
    T mx = 1;
    const T eps = epsilon<T>();
    const T hump = gsr::abs(a) + z;
    int n = 0;
    for (; n < 100000; ++n) {
        cx<T> an = a + cx<T>(T(n)), cn = c + cx<T>(T(n));
        if (an.re == 0 && an.im == 0) break;
        term = term * (an / cn) * (z / T(n + 1));
        sum += term;
        T at = gsr::abs(term);
        mx = std::max(mx, at);
        if (T(n) > hump && at <= eps * gsr::abs(sum) / 4) break;
    }
    if (n >= 100000) throw std::runtime_error("kummer_m: series did not converge");
    return {sum, mx, n + 1};
}

// One conjugate term of the connection formula, scaled:
// e^{z/2} z^{-1} Gamma(-2b)/Gamma(1/2-b-kappa) M_{kappa,b}(z) e^{shift}, kappa = 1.
template <class T>
struct conn_term {
    cx<T> value;
    T abs_err;
};

template <class T>
conn_term<T> connection_term(const cx<T>& b, T z, T shift) {
    using std::log;
    const cx<T> half(T(0.5)), one(T(1));
    cx<T> lpre = log_gamma(cx<T>(T(-2)) * b) - log_gamma(-b - half) + (b - half) * cx<T>(log(z)) + cx<T>(shift);
    cx<T> pre = gsr::exp(lpre);
    auto m = kummer_m(b - half, one + cx<T>(T(2)) * b, z);
    cx<T> v = pre * m.value;
    T scale = gsr::abs(pre) * m.max_term;
    // lgamma absolute error grows with |log Gamma|
    T lg_err = epsilon<T>() * (T(8) + gsr::abs(lpre)) * gsr::abs(v);
    return {v, T(16) * epsilon<T>() * scale * T(std::sqrt(double(m.terms))) + lg_err};
}

struct omega_value {
    ComplexValue value;
    double abs_err = 0;
    double amplitude = 0;
    double imag_residual = 0;
    WMethod method = WMethod::none;
    int digits = 16;
};

template <class T>
omega_value omega_connection_t(const ComplexValue& bd, double z, double shift, bool want_residual) {
    cx<T> b(bd);
    bool imag = bd.re == 0;
    auto t1 = connection_term<T>(b, T(z), T(shift));
    omega_value r;
    r.method = std::is_same_v<T, double> ? WMethod::connection : WMethod::connection_mp;
    r.digits = std::numeric_limits<T>::digits10;
    if (imag) {
        r.value = {double(2 * t1.value.re), 0.0};
        r.abs_err = double(2 * t1.abs_err);
        r.amplitude = double(2 * gsr::abs(t1.value));
        if (want_residual) {
            auto t2 = connection_term<T>(-b, T(z), T(shift));
            { using std::abs; r.imag_residual = double(abs(T(t1.value.im + t2.value.im))); }
            r.value = {double(t1.value.re + t2.value.re), 0.0};
        }
    } else {
        auto t2 = connection_term<T>(-b, T(z), T(shift));
        cx<T> v = t1.value + t2.value;
        r.value = {double(v.re), double(v.im)};
        r.abs_err = double(t1.abs_err + t2.abs_err);
        r.amplitude = double(gsr::abs(t1.value) + gsr::abs(t2.value));
    }
    return r;
}

// Large-z expansion of e^{z/2} W_{1,b}(z) / z.
inline omega_value omega_asymptotic(const ComplexValue& b, double z, double shift) {
    const ComplexValue b2 = b * b;
    ComplexValue term(1.0), sum(1.0);
    double prev = 1.0, last = 1.0;
    bool ok = false;
    for (int n = 0; n < 400; ++n) {
        double h = n - 0.5;
        term = term * (ComplexValue(h * h) - b2) / (-(n + 1.0) * z);
        double at = gsr::abs(term);
        if (at > prev) break;
        sum += term;
        last = at;
        prev = at;
        if (at <= 1e-17 * gsr::abs(sum)) {
            ok = true;
            break;
        }
    }
    omega_value r;
    double e = std::exp(shift);
    r.value = sum * e;
    r.abs_err = (ok ? 1e-17 * gsr::abs(sum) + 4e-16 * gsr::abs(sum) : last) * e;
    r.amplitude = gsr::abs(r.value);
    r.method = WMethod::asymptotic;
    return r;
}

// e^{z/2} W_{1,b}(z)/z = (4 pi z)^{-1/2} int_0^inf [(z-1) + z cosh s] e^{-(z/2)(cosh s - 1)} cosh(b s) ds,
// from W_{0,b}(z) = sqrt(z/pi) K_b(z/2); trapezoid rule on the even, entire integrand.
inline omega_value omega_integral(const ComplexValue& b, double z, double shift) {
    const double br = std::abs(b.re), bi = b.im;
    auto logenv = [&](double s) { return -0.5 * z * (std::cosh(s) - 1.0) + br * s + std::log(std::abs(z - 1.0) + z * std::cosh(s)); };
    double peak = logenv(0.0), s_max = 0.25;
    for (double s = 0.25; s < 80.0; s += 0.25) {
        double e = logenv(s);
        peak = std::max(peak, e);
        s_max = s;
        if (e < peak - 42.0) break;
    }
    double l1 = 0;
    auto g = [&](double s, double wgt) -> ComplexValue {
        double c = std::cosh(s);
        double w = ((z - 1.0) + z * c) * std::exp(-0.5 * z * (c - 1.0));
        ComplexValue v;
        if (bi == 0) v = {w * std::cosh(b.re * s), 0.0};
        else if (b.re == 0) v = {w * std::cos(bi * s), 0.0};
        else v = ComplexValue(w) * gsr::cosh(ComplexValue(b.re * s, bi * s));
        l1 += wgt * gsr::abs(v);
        return v * wgt;
    };
    int n = 8;
    double h = s_max / n;
    ComplexValue sum = g(0.0, 0.5);
    for (int k = 1; k <= n; ++k) sum += g(k * h, 1.0);
    ComplexValue prev = sum * h, cur = prev;
    double diff = 0;
    bool converged = false;
    for (int level = 0; level < 11; ++level) {
        for (int k = 0; k < n; ++k) sum += g((k + 0.5) * h, 1.0);
        n *= 2;
        h *= 0.5;
        cur = sum * h;
        diff = gsr::abs(cur - prev);
        if (level >= 1 && diff <= 1e-15 * l1 * h) {
            converged = true;
            break;
        }
        prev = cur;
    }
    double norm = std::exp(shift) / std::sqrt(4.0 * M_PI * z);
    omega_value r;
    r.value = cur * norm;
    r.abs_err = ((converged ? 0.0 : diff) + 2e-16 * l1 * h * std::sqrt(double(n))) * norm;
    r.amplitude = gsr::abs(r.value);
    r.method = WMethod::integral;
    return r;
}

inline bool accept(const omega_value& r, double tol) {
    double scale = std::max(gsr::abs(r.value), r.amplitude);
    return std::isfinite(r.value.re) && std::isfinite(r.value.im) && r.abs_err <= tol * scale;
}

// e^{shift} e^{z/2} W_{1,b}(z) / z for z > 0, b real, imaginary or complex.
inline omega_value omega(const ComplexValue& b, double z, double shift = 0.0, double tol = 1e-13, bool want_residual = false) {
    if (!(z > 0)) throw std::domain_error("omega: z must be positive");
    omega_value best;
    best.abs_err = std::numeric_limits<double>::infinity();
    auto consider = [&](const omega_value& r) {
        if (!std::isfinite(best.abs_err) ||
            r.abs_err / std::max(gsr::abs(r.value), r.amplitude) < best.abs_err / std::max(gsr::abs(best.value), best.amplitude))
            best = r;
        return accept(r, tol);
    };
    const double bi = std::abs(b.im), br = std::abs(b.re);
    const double bb = gsr::abs(b);
    if (z >= 12.0 + 0.1 * bb * bb || z >= 60.0) {
        auto r = omega_asymptotic(b, z, shift);
        if (consider(r)) return r;
    }
    double conn_loss = bi < 1e-3 ? std::numeric_limits<double>::infinity() : z - M_PI * bi + std::log1p(1.0 / (2.0 * bi));
    double int_loss = std::min(0.5 * M_PI * bi, bi * bi / z);
    bool conn_first = conn_loss < int_loss;
    if (conn_first) {
        auto r = omega_connection_t<double>(b, z, shift, want_residual);
        if (consider(r)) return r;
        if (int_loss < 30.0) {
            auto q = omega_integral(b, z, shift);
            if (consider(q)) return q;
        }
    } else {
        if (int_loss < 30.0 || bi < 1e-3) {
            auto q = omega_integral(b, z, shift);
            if (consider(q)) {
                if (want_residual && bi > 0 && br == 0 && conn_loss < 25.0) {
                    auto c = omega_connection_t<double>(b, z, shift, true);
                    q.imag_residual = c.imag_residual * gsr::abs(q.value) / std::max(gsr::abs(c.value), 1e-300);
                }
                return q;
            }
        }
        if (bi >= 1e-3) {
            auto r = omega_connection_t<double>(b, z, shift, want_residual);
            if (consider(r)) return r;
        }
    }
    if (bi >= 1e-6) {
        auto r = omega_connection_t<mp_quad>(b, z, shift, want_residual);
        if (consider(r)) return r;
        r = omega_connection_t<mp_60>(b, z, shift, want_residual);
        if (consider(r)) return r;
        r = omega_connection_t<mp_110>(b, z, shift, want_residual);
        if (consider(r)) return r;
    }
    return best;
}

// z e^{-z/2} M_reg_{1,b}(z) = z^{b+3/2} e^{-z} M(b-1/2, 1+2b, z)/Gamma(1+2b)
template <class T>
omega_value mreg_scaled_t(const ComplexValue& bd, double z) {
    using std::floor;
    using std::log;
    cx<T> b(bd);
    const cx<T> half(T(0.5)), one(T(1)), two(T(2));
    cx<T> c = one + two * b;
    cx<T> lpre = (b + cx<T>(T(1.5))) * cx<T>(log(T(z))) - cx<T>(T(z));
    bool pole = c.im == 0 && c.re <= 0 && floor(c.re) == c.re;
    omega_value r;
    r.digits = std::numeric_limits<T>::digits10;
    r.method = std::is_same_v<T, double> ? WMethod::connection : WMethod::connection_mp;
    if (pole) {
        // 1/Gamma(c) = 0 at the pole; the regularized series starts at n = 1 - c.
        throw std::domain_error("mreg: 1+2b is a nonpositive integer");
    }
    lpre -= log_gamma(c);
    auto m = kummer_m(b - half, c, T(z));
    cx<T> pre = gsr::exp(lpre);
    cx<T> v = pre * m.value;
    r.value = {double(v.re), double(v.im)};
    T scale = gsr::abs(pre) * m.max_term;
    r.abs_err = double(T(16) * epsilon<T>() * scale * T(std::sqrt(double(m.terms))) + epsilon<T>() * (T(8) + gsr::abs(lpre)) * gsr::abs(v));
    r.amplitude = gsr::abs(r.value);
    return r;
}

inline omega_value mreg_asymptotic(const ComplexValue& b, double z) {
    // (1/Gamma(b-1/2)) sum (3/2+b)_n (3/2-b)_n / (n! z^n)
    ComplexValue term(1.0), sum(1.0);
    double prev = 1.0, last = 1.0;
    bool ok = false;
    for (int n = 0; n < 400; ++n) {
        ComplexValue f = (ComplexValue(1.5 + n) + b) * (ComplexValue(1.5 + n) - b);
        term = term * f / ((n + 1.0) * z);
        double at = gsr::abs(term);
        if (at > prev) break;
        sum += term;
        last = at;
        prev = at;
        if (at <= 1e-17 * gsr::abs(sum)) {
            ok = true;
            break;
        }
    }
    ComplexValue g = gsr::exp(-log_gamma<double>(b - ComplexValue(0.5)));
    omega_value r;
    r.value = sum * g;
    // exponentially small recessive part neglected: ~ e^{-z} z^2 / |b|^2 relative
    double rec = std::exp(-z) * z * z;
    r.abs_err = ((ok ? 4e-16 * gsr::abs(sum) : last) + rec * gsr::abs(sum)) * gsr::abs(g);
    r.amplitude = gsr::abs(r.value);
    r.method = WMethod::asymptotic;
    return r;
}

inline omega_value mreg_scaled(const ComplexValue& b, double z, double tol = 1e-13) {
    if (!(z > 0)) throw std::domain_error("mreg: z must be positive");
    omega_value best;
    best.abs_err = std::numeric_limits<double>::infinity();
    auto consider = [&](const omega_value& r) {
        if (!std::isfinite(best.abs_err) || r.abs_err < best.abs_err) best = r;
        return accept(r, tol);
    };
    double bb = gsr::abs(b);
    // b - 1/2 a nonpositive integer: 1/Gamma(b-1/2) = 0 and the Kummer series terminates
    bool poly = b.im == 0 && b.re - 0.5 <= 0 && std::floor(b.re - 0.5) == b.re - 0.5;
    if (!poly && (z >= 40.0 + bb * bb / 10.0 || z > 600.0)) {
        auto r = mreg_asymptotic(b, z);
        if (consider(r)) return r;
    }
    if (z <= 650.0 || poly) {
        auto r = mreg_scaled_t<double>(b, z);
        if (consider(r)) return r;
        r = mreg_scaled_t<mp_quad>(b, z);
        if (consider(r)) return r;
        r = mreg_scaled_t<mp_60>(b, z);
        if (consider(r)) return r;
        r = mreg_scaled_t<mp_110>(b, z);
        if (consider(r)) return r;
    }
    return best;
}

inline void check_index(const WhittakerIndex& idx) {
    if (idx.a != 1.0) throw std::invalid_argument("whittaker: only first index a = 1 is supported");
    double m = std::max(1.0, gsr::abs(idx.b));
    bool real = std::abs(idx.b.im) <= 1e-13 * m;
    bool imag = std::abs(idx.b.re) <= 1e-13 * m;
    if (!real && !imag) throw std::invalid_argument("whittaker: second index must be real or purely imaginary");
}

inline ComplexValue canonical_b(const WhittakerIndex& idx) {
    double m = std::max(1.0, gsr::abs(idx.b));
    if (std::abs(idx.b.im) <= 1e-13 * m) return {idx.b.re, 0.0};
    if (std::abs(idx.b.re) <= 1e-13 * m) return {0.0, idx.b.im};
    return idx.b;
}

// Tricomi U(a, c, z) through the two-Kummer connection formula, in precision T.
template <class T>
cx<T> tricomi_u(const cx<T>& a, const cx<T>& c, T z) {
    using std::log;
    const cx<T> one(T(1)), two(T(2));
    cx<T> t1 = gsr::exp(log_gamma(one - c) - log_gamma(a - c + one)) * kummer_m(a, c, z).value;
    cx<T> t2 = gsr::exp(log_gamma(c - one) - log_gamma(a) + (one - c) * cx<T>(log(z))) * kummer_m(a - c + one, two - c, z).value;
    return t1 + t2;
}

}  // namespace detail

inline ComplexValue log_gamma(ComplexValue z) {
    auto r = detail::log_gamma<long double>(detail::cx<long double>(z));
    return {double(r.re), double(r.im)};
}

inline double gamma_abs_sq_shifted(double beta) {
    double c = std::cosh(M_PI * beta);
    return 4.0 * M_PI / ((1.0 + 4.0 * beta * beta) * c);
}

// W_{1,b}(z), b real or purely imaginary.
inline double whittaker_W(const WhittakerIndex& idx, double z, WhittakerDiagnostics* diag = nullptr, double rel_tol = 1e-10) {
    detail::check_index(idx);
    if (!(z > 0)) throw std::domain_error("whittaker_W: z must be positive");
    ComplexValue b = detail::canonical_b(idx);
    auto r = detail::omega(b, z, 0.0, 1e-13, diag != nullptr);
    double scale = std::max(gsr::abs(r.value), r.amplitude);
    double rel = r.abs_err / (scale > 0 ? scale : 1.0);
    if (!(rel <= rel_tol))
        throw cancellation_error("whittaker_W: cancellation, estimated relative error " + std::to_string(rel), rel);
    double w = z * std::exp(-0.5 * z) * r.value.re;
    if (diag) {
        diag->err_estimate = rel;
        diag->imag_residual = z * std::exp(-0.5 * z) * r.imag_residual;
        diag->method = r.method;
        diag->precision_digits = r.digits;
    }
    return w;
}

inline ComplexValue whittaker_M_reg(const WhittakerIndex& idx, double z, WhittakerDiagnostics* diag = nullptr) {
    detail::check_index(idx);
    if (!(z > 0)) throw std::domain_error("whittaker_M_reg: z must be positive");
    const double limit = 2.0 * std::log(std::numeric_limits<double>::max());
    if (z > limit) throw std::overflow_error("whittaker_M_reg: e^{z/2} overflows for z > " + std::to_string(limit));
    ComplexValue b = detail::canonical_b(idx);
    auto r = detail::mreg_scaled(b, z);
    if (diag) {
        double scale = std::max(gsr::abs(r.value), r.amplitude);
        diag->err_estimate = r.abs_err / (scale > 0 ? scale : 1.0);
        diag->method = r.method;
        diag->precision_digits = r.digits;
    }
    // z e^{-z/2} M = value; split the growth to delay overflow
    double h = std::exp(0.25 * z);
    return r.value * (h / z) * h;
}

inline double wronskian_check(const WhittakerIndex& idx, double z, double h) {
    if (!(z > h && h > 0)) throw std::domain_error("wronskian_check: need z > h > 0");
    auto W = [&](double s) { return whittaker_W(idx, s); };
    auto M = [&](double s) { return whittaker_M_reg(idx, s); };
    double w0 = W(z), dw;
    ComplexValue m0 = M(z), dm;
    if (z > 2 * h) {
        // fourth-order central stencil
        dw = (8 * (W(z + h) - W(z - h)) - (W(z + 2 * h) - W(z - 2 * h))) / (12 * h);
        dm = ((M(z + h) - M(z - h)) * 8.0 - (M(z + 2 * h) - M(z - 2 * h))) / (12 * h);
    } else {
        dw = (W(z + h) - W(z - h)) / (2 * h);
        dm = (M(z + h) - M(z - h)) / (2 * h);
    }
    ComplexValue wr = dm * w0 - m0 * dw;
    ComplexValue arg = idx.b - ComplexValue(idx.a - 0.5);
    ComplexValue target{};
    bool pole = std::abs(arg.im) < 1e-15 && arg.re <= 0 && std::floor(arg.re) == arg.re;
    if (!pole) target = gsr::exp(-log_gamma(arg));
    return gsr::abs(wr - target);
}

}  // namespace gsr
