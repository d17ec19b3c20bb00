#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>

#include "quadrature.hpp"
#include "special_fns.hpp"

namespace gsr {

struct small_time_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct spectrum_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct ModelParams {
    double mu = 1.0;

    ModelParams() = default;
    explicit ModelParams(double m) : mu(m) { validate(); }

    void validate() const {
        if (!(mu != 0) || !std::isfinite(mu)) throw std::invalid_argument("ModelParams: mu must be finite and nonzero");
    }
    double mu2() const { return mu * mu; }
    double u_of(double x) const { return 2.0 / (mu2() * x); }
};

struct DensityQuery {
    double x = 0;
    double t = 1;
    double r = 0;
};

// Resolvent point; on the cut lambda_beta = -mu^2 (1 + 4 beta^2)/8, alpha = i beta.
struct SpectralPoint {
    ComplexValue lambda{};
    ComplexValue alpha{};
    double beta = 0;

    static SpectralPoint on_cut(double beta, const ModelParams& p) {
        return {{-p.mu2() * (1 + 4 * beta * beta) / 8, 0.0}, {0.0, beta}, beta};
    }
};

inline ComplexValue alpha_of(ComplexValue lambda, const ModelParams& p) {
    return gsr::sqrt(ComplexValue(0.25) + lambda * (2.0 / p.mu2()));
}

inline double log_stationary_pdf(double x, const ModelParams& p) {
    if (!(x > 0)) return -std::numeric_limits<double>::infinity();
    double u = p.u_of(x);
    return -u + std::log(0.5 * u * u * p.mu2());
}

inline double stationary_pdf(double x, const ModelParams& p) {
    if (!(x > 0)) return 0.0;
    return std::exp(log_stationary_pdf(x, p));
}

inline double speed_measure(double x, const ModelParams& p) {
    if (!(x > 0)) throw std::domain_error("speed_measure: x must be positive");
    return stationary_pdf(x, p);
}

inline double scale_measure(double x, const ModelParams& p) {
    if (!(x > 0)) throw std::domain_error("scale_measure: x must be positive");
    return std::exp(p.u_of(x));
}

namespace detail {

struct node_value {
    double value, abs_err;
};

// e^{pi beta/2} e^{u/2} W_{1,i beta}(u)/u
inline node_value omega_hat(double beta, double u) {
    beta = std::abs(beta);
    auto r = omega({0.0, beta}, u, 0.5 * M_PI * beta);
    return {r.value.re, r.abs_err};
}

inline void check_time(double t) {
    if (!(t >= 0.05)) throw small_time_error("t < 0.05 is outside the supported range");
}

// e^{lpre + c pi^2} int_0^inf e^{-c u^2 - z cosh u} sinh u sin(2 pi c u) du.
// The integral is smaller than every power of z near 0, so the direct form loses about
// e^{c pi^2} eps. Moving the contour to u = w + i pi/2 gives
// e^{lpre + c pi^2/4} int_0^inf e^{-c w^2} cosh w cos(pi c w - z sinh w) dw.
inline EvalResult oscillatory_inner(double c, double z, double lpre, const QuadratureSpec& spec) {
    const double amp_direct = c * M_PI * M_PI;
    const double wmax = std::sqrt(40 / c);
    bool shifted = amp_direct > 8 && z * std::sinh(wmax) < 2000;
    QuadratureSpec sp = spec;
    EvalResult r;
    double noise;
    if (shifted) {
        const double e0 = lpre + amp_direct / 4;
        auto f = [&](double w) { return std::exp(e0 - c * w * w) * std::cosh(w) * std::cos(M_PI * c * w - z * std::sinh(w)); };
        r = integrate_semi_infinite(f, sp, Decay::Gaussian(c));
        noise = std::exp(e0 + 1 / (4 * c)) * std::sqrt(M_PI / c) * 1e-16;
    } else {
        const double e0 = lpre + amp_direct - z;
        auto f = [&](double u) {
            return std::exp(e0 - c * u * u - z * (std::cosh(u) - 1)) * std::sinh(u) * std::sin(2 * M_PI * c * u);
        };
        r = integrate_semi_infinite(f, sp, Decay::Gaussian(c));
        noise = std::exp(e0) * 1e-16 / std::max(1.0, std::sqrt(c));
    }
    if (noise > spec.abs_tol) r.flags |= flag_cancellation_warning;
    return r;
}

}  // namespace detail

// Unit-norm continuous-spectrum eigenfunction psi(x, lambda_beta).
inline double eigenfunction(double x, double beta, const ModelParams& p) {
    beta = std::abs(beta);
    double c = std::sqrt(8 * beta * (-std::expm1(-2 * M_PI * beta)) / (2 * M_PI * (1 + 4 * beta * beta)));
    if (x <= 0) return c * std::exp(0.5 * M_PI * beta);
    auto w = detail::omega_hat(beta, p.u_of(x));
    return c * w.value;
}

// G_lambda(x, y): Laplace transform in t of p(x, t | y).
inline ComplexValue greens_function(double x, double y, ComplexValue lambda, const ModelParams& p) {
    if (lambda.im == 0 && lambda.re <= 0) throw spectrum_error("greens_function: lambda lies on the spectrum (-inf, 0]");
    if (x < 0 || y < 0) throw std::domain_error("greens_function: x, y must be nonnegative");
    if (x == 0) return {};
    ComplexValue a = alpha_of(lambda, p);
    ComplexValue lg = log_gamma(a - ComplexValue(0.5));
    double ux = p.u_of(x);
    if (y == 0) {
        auto m = detail::mreg_scaled(a, ux);
        return gsr::exp(lg) * m.value;
    }
    double uy = p.u_of(y);
    if (x <= y) {
        auto w = detail::omega(a, ux);
        auto m = detail::mreg_scaled(a, uy);
        double pre = 2 * std::log(ux / uy) - (ux - uy);
        return gsr::exp(lg + ComplexValue(pre)) * w.value * m.value;
    }
    auto w = detail::omega(a, uy);
    auto m = detail::mreg_scaled(a, ux);
    return gsr::exp(lg) * w.value * m.value;
}

inline double greens_function(double x, double y, double lambda, const ModelParams& p) {
    if (!(lambda > 0)) throw spectrum_error("greens_function: lambda must be positive");
    return greens_function(x, y, ComplexValue(lambda), p).re;
}

enum class PdfForm { lightened, spectral };

namespace detail {

// p = rho(x) [1 + e^{-mu^2 t/8} J],  J = int_0^inf e^{-mu^2 t beta^2/2} k(beta) omega_hat_x omega_hat_y dbeta
template <class OmegaY>
EvalResult spectral_pdf(double x, double t, const ModelParams& p, const QuadratureSpec& spec, PdfForm form, OmegaY&& omy) {
    check_time(t);
    spec.validate();
    if (x < 0) throw std::domain_error("transition_pdf: x must be nonnegative");
    EvalResult out;
    if (x == 0) {
        out.flags = flag_converged;
        return out;
    }
    const double ux = p.u_of(x), g = 0.5 * p.mu2() * t;
    double node_err = 0;
    auto f = [&](double beta) {
        if (beta == 0) return 0.0;
        double k;
        if (form == PdfForm::lightened) {
            k = (8 / M_PI) * beta * (-std::expm1(-2 * M_PI * beta)) / (2 * (1 + 4 * beta * beta));
        } else {
            double lg = 2 * log_gamma(ComplexValue(-0.5, beta)).re;
            k = std::exp(lg + M_PI * beta) * beta * (-std::expm1(-4 * M_PI * beta)) / (2 * M_PI * M_PI);
        }
        double w = k * std::exp(-g * beta * beta);
        auto a = omega_hat(beta, ux);
        node_value b = omy(beta);
        node_err = std::max(node_err, std::abs(w) * (a.abs_err * std::abs(b.value) + b.abs_err * std::abs(a.value)));
        return w * a.value * b.value;
    };
    EvalResult J = integrate_semi_infinite(f, spec, Decay::Gaussian(g));
    double damp = std::exp(-p.mu2() * t / 8);
    double bracket = 1 + damp * J.value;
    double lr = log_stationary_pdf(x, p);
    double rho = std::exp(lr);
    out = J;
    out.value = bracket == 0 ? 0.0 : std::copysign(std::exp(lr + std::log(std::abs(bracket))), bracket);
    out.err_estimate = rho * damp * (J.err_estimate + node_err * J.truncation_point);
    if (t < 0.1) out.flags |= flag_cancellation_warning;
    if (node_err * J.truncation_point > 1e-8 * std::max(1.0, std::abs(J.value))) out.flags |= flag_cancellation_warning;
    return out;
}

}  // namespace detail

inline EvalResult transition_pdf(const DensityQuery& q, const ModelParams& p, const QuadratureSpec& spec = {},
                                 PdfForm form = PdfForm::lightened) {
    if (q.r < 0) throw std::domain_error("transition_pdf: r must be nonnegative");
    if (q.r == 0) {
        return detail::spectral_pdf(q.x, q.t, p, spec, form, [](double beta) {
            return detail::node_value{std::exp(0.5 * M_PI * beta), 0.0};
        });
    }
    const double uy = p.u_of(q.r);
    return detail::spectral_pdf(q.x, q.t, p, spec, form, [uy](double beta) { return detail::omega_hat(beta, uy); });
}

inline EvalResult transition_pdf_zero_headstart(double x, double t, const ModelParams& p, const QuadratureSpec& spec = {}) {
    return transition_pdf({x, t, 0.0}, p, spec);
}

enum class BesselVariant {
    corrected,
    printed,         // without the 1/sinh^2 Jacobian factor
    mu_denominator,  // second exponent divided by a multiple of mu instead of mu^2
};

// Double-integral (u, omega) representation. The integrand is singular at r = 0, where the value is
// extrapolated linearly from r = h, 2h.
inline EvalResult transition_pdf_bessel_form(const DensityQuery& q, const ModelParams& p, const QuadratureSpec& spec = {},
                                             BesselVariant variant = BesselVariant::corrected) {
    detail::check_time(q.t);
    spec.validate();
    if (q.r < 0) throw std::domain_error("transition_pdf_bessel_form: r must be nonnegative");
    if (q.r == 0) {
        const double h = 1e-7;
        EvalResult a = transition_pdf_bessel_form({q.x, q.t, h}, p, spec, variant);
        EvalResult b = transition_pdf_bessel_form({q.x, q.t, 2 * h}, p, spec, variant);
        a.value = 2 * a.value - b.value;
        a.err_estimate = 3 * (a.err_estimate + b.err_estimate);
        a.nodes_used += b.nodes_used;
        a.flags = ((a.flags | b.flags) & ~unsigned(flag_converged)) | (a.flags & b.flags & flag_converged);
        return a;
    }
    if (q.x < 0) throw std::domain_error("transition_pdf_bessel_form: x must be nonnegative");
    EvalResult out;
    if (q.x == 0) {
        out.flags = flag_converged;
        return out;
    }
    const double x = q.x, y = q.r, t = q.t, mu = std::abs(p.mu), m2 = p.mu2(), a = 1 / m2;
    const double lp = std::log(2 * std::sqrt(2.0) / (M_PI * std::sqrt(M_PI))) - 5 * std::log(mu) - 2 * std::log(x) -
                      0.5 * std::log(t) - m2 * t / 8;
    const double sxy = std::sqrt(x * y);
    // second exponent: -(2/d)(u^2/t + cosh(u)/(sinh(sigma) sqrt(xy)))
    const double d = variant == BesselVariant::mu_denominator ? mu : m2;
    const double grate = 2 / (d * t), freq = 4 * M_PI / (m2 * t);
    // e^{2 pi^2/(mu^2 t)} e^{-grate u^2} sin(freq u): the shift is exact only when grate matches
    const double boost_exp = 2 * M_PI * M_PI / (m2 * t);
    unsigned extra = 0;
    std::size_t nodes = 0;
    double inner_err = 0;
    QuadratureSpec ispec = spec;
    auto outer = [&](double w) {
        if (w <= 0) return 0.0;
        double s = 2 * w / m2;
        double e2 = std::exp(-2 * s);
        double cothm1 = 2 * e2 / -std::expm1(-2 * s);  // coth(s) - 1
        double lsinh = s + std::log1p(-e2) - std::log(2.0);
        double E = -a / x * (2 + cothm1) - a / y * cothm1 + 4 * a * w;
        if (variant != BesselVariant::printed) E -= 2 * lsinh;
        double z = 2 / (d * sxy * std::exp(lsinh));
        if (lp + E - z < -745) return 0.0;
        EvalResult I;
        ispec.abs_tol = 1e-2 * spec.abs_tol;
        if (variant == BesselVariant::mu_denominator) {
            // frequency and Gaussian rate no longer match, so only the direct form applies
            const double e0 = lp + E - z + boost_exp;
            auto inner = [&](double u) {
                return std::exp(e0 - grate * u * u - z * (std::cosh(u) - 1)) * std::sinh(u) * std::sin(freq * u);
            };
            I = integrate_semi_infinite(inner, ispec, Decay::Gaussian(grate));
            if (std::exp(e0) * 1e-16 > ispec.abs_tol) I.flags |= flag_cancellation_warning;
        } else {
            I = detail::oscillatory_inner(grate, z, lp + E, ispec);
        }
        nodes += I.nodes_used;
        if (!I.converged() || I.has(flag_cancellation_warning)) extra |= flag_cancellation_warning;
        inner_err += I.err_estimate;
        return I.value;
    };
    EvalResult r = integrate_semi_infinite(outer, spec, Decay::Exponential(2 * a));
    r.nodes_used += nodes;
    r.flags |= extra;
    if (!std::isfinite(r.value)) {
        // the printed form has no Jacobian damping and the outer integral diverges
        r.value = std::numeric_limits<double>::infinity();
        r.flags = (r.flags & ~unsigned(flag_converged)) | flag_truncated_early;
    }
    if (t < 0.1) r.flags |= flag_cancellation_warning;
    return r;
}

namespace detail {

// p(x(u)) dx/du with x = 2/(mu^2 u)
template <class Pdf>
double pdf_in_u(Pdf& pdf, double u, const ModelParams& p) {
    double x = p.u_of(u);
    return pdf(x) * 2 / (p.mu2() * u * u);
}

inline EvalResult combine(EvalResult a, const EvalResult& b) {
    a.value += b.value;
    a.err_estimate += b.err_estimate;
    a.nodes_used += b.nodes_used;
    unsigned conv = a.flags & b.flags & flag_converged;
    a.flags = ((a.flags | b.flags) & ~unsigned(flag_converged)) | conv;
    return a;
}

}  // namespace detail

// int_0^x p(s, t | r) ds through pdf quadrature in u = 2/(mu^2 s).
inline EvalResult transition_cdf(const DensityQuery& q, const ModelParams& p, const QuadratureSpec& spec = {}) {
    detail::check_time(q.t);
    spec.validate();
    EvalResult out;
    if (q.x <= 0) {
        out.flags = flag_converged;
        return out;
    }
    QuadratureSpec inner = spec;
    inner.abs_tol = spec.abs_tol * 1e-2;
    unsigned inner_flags = flag_converged;
    double inner_err = 0;
    auto pdf = [&](double x) {
        auto r = transition_pdf({x, q.t, q.r}, p, inner);
        inner_flags = (inner_flags & r.flags & flag_converged) | ((inner_flags | r.flags) & ~unsigned(flag_converged));
        inner_err = std::max(inner_err, r.err_estimate);
        return r.value;
    };
    const double ux = p.u_of(q.x);
    // split points in u around the headstart, where the profile is narrow
    std::vector<double> brk;
    auto w_branch = [&](double hi) {
        // int_0^hi f(u) du with u = w^2
        auto g = [&](double w) { return w == 0 ? 0.0 : 2 * w * detail::pdf_in_u(pdf, w * w, p); };
        return integrate_finite(g, 0.0, std::sqrt(hi), spec, 8);
    };
    auto u_branch = [&](double lo) {
        auto g = [&](double u) { return detail::pdf_in_u(pdf, u, p); };
        return integrate_semi_infinite(g, spec, Decay::Exponential(1.0), lo, 8);
    };
    if (ux >= 1) {
        out = u_branch(ux);
    } else {
        out = w_branch(ux);
        out.value = 1 - out.value;
    }
    out.err_estimate += inner_err * q.x;
    out.flags = (out.flags & inner_flags & flag_converged) | ((out.flags | inner_flags) & ~unsigned(flag_converged));
    return out;
}

// Total mass int_0^inf p(x, t | r) dx.
inline EvalResult transition_mass(double t, double r, const ModelParams& p, const QuadratureSpec& spec = {}) {
    QuadratureSpec inner = spec;
    inner.abs_tol = spec.abs_tol * 1e-2;
    auto pdf = [&](double x) { return transition_pdf({x, t, r}, p, inner).value; };
    auto g0 = [&](double w) { return w == 0 ? 0.0 : 2 * w * detail::pdf_in_u(pdf, w * w, p); };
    auto g1 = [&](double u) { return detail::pdf_in_u(pdf, u, p); };
    EvalResult a = integrate_finite(g0, 0.0, 1.0, spec, 4);
    EvalResult b = integrate_semi_infinite(g1, spec, Decay::Exponential(1.0), 1.0, 8);
    return detail::combine(a, b);
}

enum class ClosedCdfForm {
    stationary_tail,  // e^{-2/x} + int_t^inf K(s) ds
    peskir,           // 1 - int_0^t K(s) ds
};

namespace detail {

// K(s) = -dP/ds for mu = 1, r = 0:
// (1/(pi x^{3/2})) e^{-1/x} s^{-1/2} e^{-s/8 + pi^2/(2s)} int_0^inf e^{-v^2/(2s) - cosh(v)/x} sinh v sin(pi v/s) dv
inline EvalResult cdf_kernel(double x, double s, const QuadratureSpec& spec) {
    EvalResult I;
    if (!(s > 0)) return I;
    const double pre = -std::log(M_PI * std::pow(x, 1.5)) - 1 / x - 0.5 * std::log(s) - s / 8;
    return oscillatory_inner(1 / (2 * s), 1 / x, pre, spec);
}

// Below this s the shifted inner integral still carries e^{pi^2/(8s)} eps of noise (about 1e-9
// here) while the kernel itself is under 1e-12 for x >= 0.3.
inline constexpr double cdf_kernel_floor = 0.075;

}  // namespace detail

// Closed double-integral cdf P(x, t | r = 0) for mu = 1.
inline EvalResult transition_cdf_closed(double x, double t, const QuadratureSpec& spec = {},
                                        ClosedCdfForm form = ClosedCdfForm::stationary_tail) {
    detail::check_time(t);
    spec.validate();
    EvalResult out;
    if (x <= 0) {
        out.flags = flag_converged;
        return out;
    }
    QuadratureSpec inner = spec;
    inner.abs_tol = spec.abs_tol * 1e-2;
    unsigned fl = flag_converged;
    auto K = [&](double s) {
        auto k = detail::cdf_kernel(x, s, inner);
        fl = (fl & k.flags & flag_converged) | ((fl | k.flags) & ~unsigned(flag_converged));
        return k.value;
    };
    if (form == ClosedCdfForm::stationary_tail) {
        out = integrate_semi_infinite(K, spec, Decay::Exponential(1.0 / 8), std::max(t, detail::cdf_kernel_floor), 8);
        out.value += std::exp(-2 / x);
    } else {
        if (t > detail::cdf_kernel_floor) out = integrate_finite(K, detail::cdf_kernel_floor, t, spec, 8);
        else out.flags = flag_converged;
        out.value = 1 - out.value;
    }
    out.flags = (out.flags & fl & flag_converged) | ((out.flags | fl) & ~unsigned(flag_converged));
    return out;
}

// Laplace image of P(x, t | 0), mu = 1.
inline double laplace_image_cdf_peskir(double x, double lambda) {
    if (!(lambda > 0) || !(x > 0)) throw std::domain_error("laplace_image_cdf_peskir: need lambda > 0, x > 0");
    double a = std::sqrt(0.25 + 2 * lambda);
    double z = 1 / x;
    // e^{-z} I_a(z), scaled form avoids overflow for small x
    double ie = z > 600 ? std::exp(std::log(boost::math::cyl_bessel_i(a, 600.0)) - 600) : boost::math::cyl_bessel_i(a, z) * std::exp(-z);
    if (z > 600) {
        // large-argument expansion of e^{-z} I_a(z)
        double s = 1, term = 1, m = 4 * a * a;
        for (int k = 1; k < 30; ++k) {
            term *= -(m - (2 * k - 1) * (2 * k - 1)) / (k * 8 * z);
            s += term;
            if (std::abs(term) < 1e-17) break;
        }
        ie = s / std::sqrt(2 * M_PI * z);
    }
    return (1 - std::sqrt(2 * M_PI / x) * ie) / lambda;
}

// Same, by numerical Laplace transform of the closed-form cdf:
// int e^{-lambda t} P dt = (1 - int_0^inf e^{-lambda s} K(s) ds)/lambda.
inline EvalResult laplace_cdf_numeric(double x, double lambda, const QuadratureSpec& spec = {}) {
    QuadratureSpec inner = spec;
    inner.abs_tol = spec.abs_tol * 1e-2;
    auto g = [&](double s) { return s <= detail::cdf_kernel_floor ? 0.0 : std::exp(-lambda * s) * detail::cdf_kernel(x, s, inner).value; };
    EvalResult r = integrate_semi_infinite(g, spec, Decay::Exponential(lambda + 1.0 / 8), detail::cdf_kernel_floor, 16);
    r.value = (1 - r.value) / lambda;
    r.err_estimate /= lambda;
    return r;
}

// Hostler/Buchholz identity, a = 1, b = alpha real: returns {LHS, RHS}.
// LHS = Gamma(alpha - 1/2) W_{1,alpha}(c x1) M_reg_{1,alpha}(c x2), x1 > x2.
enum class HostlerVariant { sum_exponent, product_exponent };

inline std::pair<double, double> hostler_identity(double alpha, double c, double x1, double x2, const QuadratureSpec& spec = {},
                                                  HostlerVariant v = HostlerVariant::sum_exponent) {
    if (!(x1 > x2 && x2 > 0 && c > 0 && alpha > 0)) throw std::domain_error("hostler_identity: need x1 > x2 > 0, c > 0, alpha > 0");
    double z1 = c * x1, z2 = c * x2;
    auto w = detail::omega({alpha, 0.0}, z1);
    auto m = detail::mreg_scaled({alpha, 0.0}, z2);
    double lhs = std::exp(log_gamma(ComplexValue(alpha - 0.5)).re + std::log(z1) - 0.5 * z1 + 0.5 * z2 - std::log(z2)) *
                 w.value.re * m.value.re;
    const double s12 = std::sqrt(x1 * x2);
    // the misprinted exponent no longer beats the Bessel growth: RHS diverges
    if (v == HostlerVariant::product_exponent && 0.5 * x1 * x2 <= c * s12)
        return {lhs, std::numeric_limits<double>::infinity()};
    auto f = [&](double t) {
        if (t <= 0) return 0.0;
        double arg = c * std::sinh(t) * s12;
        double A = v == HostlerVariant::sum_exponent ? -0.5 * c * (x1 + x2) : -0.5 * x1 * x2, B = c * s12;
        double ct = 1 / std::tanh(0.5 * t);
        // e^{-arg} I(arg) keeps the product finite
        double ie = arg > 700 ? 1 / std::sqrt(2 * M_PI * arg) : boost::math::cyl_bessel_i(2 * alpha, arg) * std::exp(-arg);
        // A cosh t + B sinh t without overflow
        double le = 0.5 * ((A + B) * std::exp(t) + (A - B) * std::exp(-t));
        if (le < -745) return 0.0;
        return std::exp(le) * ie * ct * ct;
    };
    double rate = 0.5 * c * (std::sqrt(x1) - std::sqrt(x2)) * (std::sqrt(x1) - std::sqrt(x2)) / 2;
    if (v == HostlerVariant::product_exponent) rate = std::max(1e-3, 0.25 * x1 * x2 - 0.5 * c * s12);
    EvalResult r = integrate_semi_infinite(f, spec, Decay::Exponential(std::max(rate, 1e-3)), 0.0, 16);
    return {lhs, c * s12 * r.value};
}

namespace detail {

// One conjugate term T of omega_hat = 2 Re T (b = i beta), double precision.
inline ComplexValue omega_hat_term(double beta, double z) {
    auto t = connection_term<double>(ComplexValue(0.0, beta), z, 0.5 * M_PI * beta);
    return t.value;
}

}  // namespace detail

struct BeckerSides {
    double lhs, rhs;
    EvalResult quad;
};

// int_0^inf beta sinh(pi beta) / ((1+4beta^2)(s+beta^2)) W_{1,i beta}(x1) W_{1,i beta}(x2) dbeta  vs closed form.
inline BeckerSides becker_identity(double x1, double x2, double s, const QuadratureSpec& spec = {}, double B = 400.0) {
    if (!(x1 > 0 && x2 > 0)) throw std::domain_error("becker_identity: x1, x2 must be positive");
    if (!(s > 0) || s == 0.25) throw std::domain_error("becker_identity: s must be positive and != 1/4");
    const double rs = std::sqrt(s);
    const double hi = std::max(x1, x2), lo = std::min(x1, x2);
    // RHS: (pi/8) Gamma(sqrt(s)-1/2) W(hi) M_reg(lo) - (pi/2) e^{-(x1+x2)/2} x1 x2/(4s-1)
    auto w = detail::omega({rs, 0.0}, hi);
    auto m = detail::mreg_scaled({rs, 0.0}, lo);
    double lg = log_gamma(ComplexValue(rs - 0.5)).re;
    double sg = 1;
    if (rs < 0.5) sg = std::tgamma(rs - 0.5) < 0 ? -1 : 1;
    double wm = hi * std::exp(-0.5 * hi) * w.value.re * (std::exp(0.5 * lo) / lo) * m.value.re;
    double rhs = M_PI / 8 * sg * std::exp(lg) * wm - M_PI / 2 * std::exp(-0.5 * (x1 + x2)) * x1 * x2 / (4 * s - 1);

    // LHS; W(x) = x e^{-x/2} e^{-pi beta/2} omega_hat
    const double c12 = x1 * x2 * std::exp(-0.5 * (x1 + x2));
    const double L = std::log(x1 / x2), sq = std::sqrt(x1 * x2);
    auto kern = [&](double b) { return b * (-std::expm1(-2 * M_PI * b)) / (2 * (1 + 4 * b * b) * (s + b * b)); };
    auto a1 = [&](double b) { return sq * std::cos(b * L) / (8 * (s + b * b)); };
    // past beta ~ 40 the double connection term is good to ~1e-13 relative, ample against the
    // O(beta^-2) weight; the adaptive evaluator would escalate precision there
    auto om = [&](double b, double x) { return b > 40 ? 2 * detail::omega_hat_term(b, x).re : detail::omega_hat(b, x).value; };
    auto f = [&](double b) {
        if (b == 0) return -a1(0.0);
        return kern(b) * c12 * om(b, x1) * om(b, x2) - a1(b);
    };
    std::vector<double> brk;
    for (double b = 0; b < B; b += 2.0) brk.push_back(b);
    brk.push_back(B);
    EvalResult q = integrate_panels(f, brk, spec);
    double lhs = q.value + sq / 8 * M_PI / (2 * rs) * std::exp(-rs * std::abs(L));
    // tail beyond B: f - A1 = 2 kern c12 Re(T1 T2) + O(B^{-3}); the first term oscillates fast
    auto fast = [&](double b) {
        ComplexValue t1 = detail::omega_hat_term(b, x1), t2 = detail::omega_hat_term(b, x2);
        return t1 * t2 * (2 * kern(b) * c12);
    };
    ComplexValue H = fast(B);
    const double h = 1e-3;
    double dpsi = (gsr::arg(fast(B + h) * gsr::conj(fast(B - h)))) / (2 * h);
    lhs += (ComplexValue(0.0, 1.0) * H / dpsi).re;
    return {lhs, rhs, q};
}

inline double becker_identity_residual(double x1, double x2, double s, const QuadratureSpec& spec = {}) {
    auto b = becker_identity(x1, x2, s, spec);
    return std::abs(b.lhs - b.rhs);
}

}  // namespace gsr
