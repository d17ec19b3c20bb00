#pragma once

#include <cmath>
#include <complex>

namespace gsr {

// Minimal complex type usable with boost::multiprecision reals, where
// std::complex<T> is unspecified.
template <class T>
struct basic_complex {
    T re{};
    T im{};

    basic_complex() = default;
    basic_complex(T r) : re(r), im(0) {}
    basic_complex(T r, T i) : re(r), im(i) {}
    template <class U, class = std::enable_if_t<std::is_arithmetic_v<U> && !std::is_same_v<U, T>>>
    basic_complex(U r) : re(T(r)), im(0) {}

    template <class U>
    explicit basic_complex(const basic_complex<U>& o) : re(T(o.re)), im(T(o.im)) {}

    basic_complex& operator+=(const basic_complex& o) { re += o.re; im += o.im; return *this; }
    basic_complex& operator-=(const basic_complex& o) { re -= o.re; im -= o.im; return *this; }
    basic_complex& operator*=(const basic_complex& o) {
        T r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    basic_complex& operator/=(const basic_complex& o) { return *this = *this / o; }

    friend basic_complex operator+(basic_complex a, const basic_complex& b) { return a += b; }
    friend basic_complex operator-(basic_complex a, const basic_complex& b) { return a -= b; }
    friend basic_complex operator*(basic_complex a, const basic_complex& b) { return a *= b; }
    friend basic_complex operator*(basic_complex a, const T& s) { a.re *= s; a.im *= s; return a; }
    friend basic_complex operator*(const T& s, basic_complex a) { a.re *= s; a.im *= s; return a; }
    friend basic_complex operator/(basic_complex a, const T& s) { a.re /= s; a.im /= s; return a; }
    friend basic_complex operator-(const basic_complex& a) { return {-a.re, -a.im}; }
    friend basic_complex operator/(const basic_complex& a, const basic_complex& b) {
        using std::abs;
        // Smith's algorithm
        if (abs(b.re) >= abs(b.im)) {
            T r = b.im / b.re, d = b.re + b.im * r;
            return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
        }
        T r = b.re / b.im, d = b.re * r + b.im;
        return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
    }
    friend bool operator==(const basic_complex& a, const basic_complex& b) { return a.re == b.re && a.im == b.im; }
};

using ComplexValue = basic_complex<double>;

template <class T>
basic_complex<T> conj(const basic_complex<T>& z) { return {z.re, -z.im}; }

template <class T>
T norm(const basic_complex<T>& z) { return z.re * z.re + z.im * z.im; }

template <class T>
T abs(const basic_complex<T>& z) {
    using std::abs;
    using std::sqrt;
    T a = abs(z.re), b = abs(z.im);
    if (a < b) std::swap(a, b);
    if (a == 0) return a;
    T q = b / a;
    return a * sqrt(1 + q * q);
}

template <class T>
T arg(const basic_complex<T>& z) {
    using std::atan2;
    return atan2(z.im, z.re);
}

template <class T>
basic_complex<T> exp(const basic_complex<T>& z) {
    using std::cos;
    using std::exp;
    using std::sin;
    T m = exp(z.re);
    return {m * cos(z.im), m * sin(z.im)};
}

template <class T>
basic_complex<T> log(const basic_complex<T>& z) {
    using std::log;
    return {log(gsr::abs(z)), gsr::arg(z)};
}

template <class T>
basic_complex<T> sqrt(const basic_complex<T>& z) {
    using std::abs;
    using std::sqrt;
    if (z.re == 0 && z.im == 0) return {};
    T m = gsr::abs(z);
    T r = sqrt((m + abs(z.re)) / 2);
    if (z.re >= 0) return {r, z.im / (2 * r)};
    return {abs(z.im) / (2 * r), z.im >= 0 ? r : -r};
}

template <class T>
basic_complex<T> cosh(const basic_complex<T>& z) {
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    return {cosh(z.re) * cos(z.im), sinh(z.re) * sin(z.im)};
}

template <class T>
basic_complex<T> sinh(const basic_complex<T>& z) {
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    return {sinh(z.re) * cos(z.im), cosh(z.re) * sin(z.im)};
}

inline std::complex<double> to_std(const ComplexValue& z) { return {z.re, z.im}; }
inline ComplexValue from_std(const std::complex<double>& z) { return {z.real(), z.imag()}; }

}  // namespace gsr
