#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <quadmath.h>

namespace qdx {

template <class Real>
struct real_traits;

template <>
struct real_traits<double> {
    static double frexp(double x, int* e) { return std::frexp(x, e); }
    static double ldexp(double x, int e) { return std::ldexp(x, e); }
    static double fabs(double x) { return std::fabs(x); }
    static double log(double x) { return std::log(x); }
    static constexpr double eps() { return 2.220446049250313e-16; }
};

template <>
struct real_traits<long double> {
    static long double frexp(long double x, int* e) { return std::frexp(x, e); }
    static long double ldexp(long double x, int e) { return std::ldexp(x, e); }
    static long double fabs(long double x) { return std::fabs(x); }
    static long double log(long double x) { return std::log(x); }
    static constexpr long double eps() { return 1.084202172485504434e-19L; }
};

template <>
struct real_traits<__float128> {
    static __float128 frexp(__float128 x, int* e) { return ::frexpq(x, e); }
    static __float128 ldexp(__float128 x, int e) { return ::ldexpq(x, e); }
    static __float128 fabs(__float128 x) { return ::fabsq(x); }
    static __float128 log(__float128 x) { return ::logq(x); }
    static __float128 eps() { return ::ldexpq(__float128(1), -112); }
};

// Real number as mantissa * 2^exp2 with |mantissa| in [0.5, 1) (or exactly 0).
// Keeps the trace recursion and transfer products exact through doubly-exponential
// escape where the plain type would overflow.
template <class Real>
struct scaled_real {
    Real m = Real(0);
    std::int64_t e = 0;

    scaled_real() = default;
    explicit scaled_real(Real value) {
        int ex = 0;
        m = real_traits<Real>::frexp(value, &ex);
        e = ex;
    }
    static scaled_real from_parts(Real mantissa, std::int64_t exp2) {
        scaled_real s;
        if (mantissa == Real(0)) return s;
        int ex = 0;
        s.m = real_traits<Real>::frexp(mantissa, &ex);
        s.e = exp2 + ex;
        return s;
    }

    bool is_zero() const { return m == Real(0); }
    int sign() const { return m > Real(0) ? 1 : (m < Real(0) ? -1 : 0); }

    // log2(|x|); -inf not representable, callers must check is_zero().
    double log2_abs() const {
        return static_cast<double>(e) +
               std::log2(static_cast<double>(real_traits<Real>::fabs(m)));
    }
    double log_abs() const { return log2_abs() * 0.6931471805599453; }

    // Lossy conversion; overflows to +-inf when e is large.
    Real to_real() const {
        if (is_zero()) return Real(0);
        if (e > 16000) return m > Real(0) ? Real(HUGE_VALL) : -Real(HUGE_VALL);
        if (e < -16000) return Real(0);
        return real_traits<Real>::ldexp(m, static_cast<int>(e));
    }

    friend scaled_real operator*(const scaled_real& a, const scaled_real& b) {
        if (a.is_zero() || b.is_zero()) return scaled_real();
        return from_parts(a.m * b.m, a.e + b.e);
    }
    friend scaled_real operator*(Real c, const scaled_real& a) {
        return from_parts(c * a.m, a.e);
    }
    friend scaled_real operator-(const scaled_real& a) { return from_parts(-a.m, a.e); }
    friend scaled_real operator+(const scaled_real& a, const scaled_real& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        std::int64_t d = a.e - b.e;
        // beyond the mantissa width the smaller addend cannot affect the result
        const std::int64_t cut = 150;
        if (d > cut) return a;
        if (d < -cut) return b;
        if (d >= 0) return from_parts(a.m + real_traits<Real>::ldexp(b.m, static_cast<int>(-d)), a.e);
        return from_parts(real_traits<Real>::ldexp(a.m, static_cast<int>(d)) + b.m, b.e);
    }
    friend scaled_real operator-(const scaled_real& a, const scaled_real& b) { return a + (-b); }

    // |a| <=> |b|
    static int cmp_abs(const scaled_real& a, const scaled_real& b) {
        if (a.is_zero()) return b.is_zero() ? 0 : -1;
        if (b.is_zero()) return 1;
        if (a.e != b.e) return a.e < b.e ? -1 : 1;
        Real x = real_traits<Real>::fabs(a.m), y = real_traits<Real>::fabs(b.m);
        return x < y ? -1 : (x > y ? 1 : 0);
    }
    bool abs_leq(Real bound) const { return cmp_abs(*this, scaled_real(bound)) <= 0; }
};

// Complex value as (re, im) * 2^exp2, same purpose as scaled_real for the complex
// trace recursion.
struct scaled_complex {
    std::complex<double> m{0.0, 0.0};
    std::int64_t e = 0;

    scaled_complex() = default;
    explicit scaled_complex(std::complex<double> value) { *this = from_parts(value, 0); }

    static scaled_complex from_parts(std::complex<double> v, std::int64_t exp2) {
        scaled_complex s;
        double a = std::max(std::fabs(v.real()), std::fabs(v.imag()));
        if (a == 0.0) return s;
        int ex = 0;
        std::frexp(a, &ex);
        s.m = {std::ldexp(v.real(), -ex), std::ldexp(v.imag(), -ex)};
        s.e = exp2 + ex;
        return s;
    }

    bool is_zero() const { return m == std::complex<double>(0.0, 0.0); }
    double log2_abs() const { return static_cast<double>(e) + std::log2(std::abs(m)); }

    std::complex<double> to_complex() const {
        if (is_zero()) return {0.0, 0.0};
        if (e > 4000) {
            double inf = HUGE_VAL;
            return {m.real() * inf, m.imag() * inf};
        }
        if (e < -4000) return {0.0, 0.0};
        return {std::ldexp(m.real(), static_cast<int>(e)), std::ldexp(m.imag(), static_cast<int>(e))};
    }

    friend scaled_complex operator*(const scaled_complex& a, const scaled_complex& b) {
        if (a.is_zero() || b.is_zero()) return scaled_complex();
        return from_parts(a.m * b.m, a.e + b.e);
    }
    friend scaled_complex operator*(double c, const scaled_complex& a) {
        return from_parts(c * a.m, a.e);
    }
    friend scaled_complex operator-(const scaled_complex& a) { return from_parts(-a.m, a.e); }
    friend scaled_complex operator+(const scaled_complex& a, const scaled_complex& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        std::int64_t d = a.e - b.e;
        const std::int64_t cut = 80;
        if (d > cut) return a;
        if (d < -cut) return b;
        if (d >= 0)
            return from_parts(a.m + std::complex<double>(std::ldexp(b.m.real(), static_cast<int>(-d)),
                                                         std::ldexp(b.m.imag(), static_cast<int>(-d))),
                              a.e);
        return from_parts(std::complex<double>(std::ldexp(a.m.real(), static_cast<int>(d)),
                                               std::ldexp(a.m.imag(), static_cast<int>(d))) +
                              b.m,
                          b.e);
    }
    friend scaled_complex operator-(const scaled_complex& a, const scaled_complex& b) {
        return a + (-b);
    }
};

}  // namespace qdx
