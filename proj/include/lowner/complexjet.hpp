#pragma once

#include <cmath>
#include <complex>

namespace lowner {

// Second-order jet of a holomorphic function: value, f', f'' at a point.
// Arithmetic propagates derivatives exactly, so closed-form expressions for
// kernels and one-point functions come with exact z-derivatives.
struct CJet {
    std::complex<double> f{0.0}, d{0.0}, dd{0.0};

    CJet() = default;
    CJet(std::complex<double> f_, std::complex<double> d_ = 0.0,
         std::complex<double> dd_ = 0.0)
        : f(f_), d(d_), dd(dd_) {}

    static CJet var(std::complex<double> z) { return {z, 1.0, 0.0}; }
    static CJet cst(std::complex<double> c) { return {c, 0.0, 0.0}; }
};

inline CJet operator+(const CJet& a, const CJet& b) {
    return {a.f + b.f, a.d + b.d, a.dd + b.dd};
}
inline CJet operator-(const CJet& a, const CJet& b) {
    return {a.f - b.f, a.d - b.d, a.dd - b.dd};
}
inline CJet operator-(const CJet& a) { return {-a.f, -a.d, -a.dd}; }
inline CJet operator*(const CJet& a, const CJet& b) {
    return {a.f * b.f, a.d * b.f + a.f * b.d, a.dd * b.f + 2.0 * a.d * b.d + a.f * b.dd};
}
inline CJet operator*(std::complex<double> s, const CJet& a) {
    return {s * a.f, s * a.d, s * a.dd};
}
inline CJet operator*(double s, const CJet& a) {
    return std::complex<double>(s) * a;
}
inline CJet operator+(const CJet& a, std::complex<double> c) { return {a.f + c, a.d, a.dd}; }
inline CJet operator+(std::complex<double> c, const CJet& a) { return a + c; }
inline CJet operator-(const CJet& a, std::complex<double> c) { return {a.f - c, a.d, a.dd}; }
inline CJet operator-(std::complex<double> c, const CJet& a) { return -(a - c); }

inline CJet inv(const CJet& a) {
    std::complex<double> w = 1.0 / a.f;
    return {w, -a.d * w * w, (2.0 * a.d * a.d / a.f - a.dd) * w * w};
}
inline CJet operator/(const CJet& a, const CJet& b) { return a * inv(b); }
inline CJet operator/(std::complex<double> c, const CJet& a) { return CJet::cst(c) * inv(a); }
inline CJet operator/(const CJet& a, std::complex<double> c) { return (1.0 / c) * a; }

// compose(g at a.f) with outer derivatives g', g'' supplied
inline CJet lift(const CJet& a, std::complex<double> g, std::complex<double> gd,
                 std::complex<double> gdd) {
    return {g, gd * a.d, gdd * a.d * a.d + gd * a.dd};
}

inline CJet log(const CJet& a) {
    return lift(a, std::log(a.f), 1.0 / a.f, -1.0 / (a.f * a.f));
}
inline CJet exp(const CJet& a) {
    auto e = std::exp(a.f);
    return lift(a, e, e, e);
}
inline CJet sqrt(const CJet& a) {
    auto r = std::sqrt(a.f);
    return lift(a, r, 0.5 / r, -0.25 / (r * a.f));
}
inline CJet sin(const CJet& a) { return lift(a, std::sin(a.f), std::cos(a.f), -std::sin(a.f)); }
inline CJet cos(const CJet& a) { return lift(a, std::cos(a.f), -std::sin(a.f), -std::cos(a.f)); }
inline CJet tan(const CJet& a) {
    auto t = std::tan(a.f);
    auto s = 1.0 + t * t;
    return lift(a, t, s, 2.0 * t * s);
}
inline CJet sinh(const CJet& a) { return lift(a, std::sinh(a.f), std::cosh(a.f), std::sinh(a.f)); }
inline CJet cosh(const CJet& a) { return lift(a, std::cosh(a.f), std::sinh(a.f), std::cosh(a.f)); }
inline CJet tanh(const CJet& a) {
    auto t = std::tanh(a.f);
    auto s = 1.0 - t * t;
    return lift(a, t, s, -2.0 * t * s);
}
// principal branches
inline CJet atan(const CJet& a) {
    auto w = 1.0 + a.f * a.f;
    return lift(a, std::atan(a.f), 1.0 / w, -2.0 * a.f / (w * w));
}
inline CJet atanh(const CJet& a) {
    auto w = 1.0 - a.f * a.f;
    return lift(a, std::atanh(a.f), 1.0 / w, 2.0 * a.f / (w * w));
}

}  // namespace lowner
