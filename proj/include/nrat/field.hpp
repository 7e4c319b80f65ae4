#pragma once

// The two coefficient fields used throughout:
//   Complex  - arbitrary-precision floating complex numbers (MPFR pairs),
//   QComplex - exact Gaussian rationals for identity checks.
// Generic code is templated on the field; FieldOps<K> supplies the few
// operations whose meaning differs between the exact and floating worlds.

#include "nrat/real.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <complex>
#include <string>

namespace nrat {

class Complex {
public:
    explicit Complex(Prec prec = kDefaultPrec) : re_(prec), im_(prec) {}
    Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}
    Complex(double re, double im, Prec prec) : re_(re, prec), im_(im, prec) {}
    static Complex from_long(long n, Prec prec) { return Complex(Real(n, prec), Real(0L, prec)); }

    const Real& re() const { return re_; }
    const Real& im() const { return im_; }
    Prec prec() const { return re_.prec() > im_.prec() ? re_.prec() : im_.prec(); }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    std::complex<double> to_std() const { return {re_.to_double(), im_.to_double()}; }

    friend Complex operator+(const Complex& a, const Complex& b) {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend Complex operator-(const Complex& a, const Complex& b) {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    Complex operator-() const { return {-re_, -im_}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    friend Complex operator/(const Complex& a, const Complex& b) {
        Real n = b.re_ * b.re_ + b.im_ * b.im_;
        return {(a.re_ * b.re_ + a.im_ * b.im_) / n, (a.im_ * b.re_ - a.re_ * b.im_) / n};
    }
    Complex& operator+=(const Complex& o) { re_ += o.re_; im_ += o.im_; return *this; }
    Complex& operator-=(const Complex& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
    Complex& operator*=(const Complex& o) { *this = *this * o; return *this; }
    Complex& operator/=(const Complex& o) { *this = *this / o; return *this; }

    friend bool operator==(const Complex& a, const Complex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

    friend Complex conj(const Complex& a) { return {a.re_, -a.im_}; }
    friend Real abs(const Complex& a) { return hypot(a.re_, a.im_); }

private:
    Real re_, im_;
};

using Rational = boost::multiprecision::mpq_rational;

class QComplex {
public:
    QComplex() : re_(0), im_(0) {}
    QComplex(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}
    QComplex(long re, long im) : re_(re), im_(im) {}

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    bool is_zero() const { return re_ == 0 && im_ == 0; }
    std::complex<double> to_std() const {
        return {static_cast<double>(re_), static_cast<double>(im_)};
    }

    friend QComplex operator+(const QComplex& a, const QComplex& b) {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend QComplex operator-(const QComplex& a, const QComplex& b) {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    QComplex operator-() const { return {-re_, -im_}; }
    friend QComplex operator*(const QComplex& a, const QComplex& b) {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    friend QComplex operator/(const QComplex& a, const QComplex& b) {
        Rational n = b.re_ * b.re_ + b.im_ * b.im_;
        if (n == 0) throw std::domain_error("QComplex: division by zero");
        return {(a.re_ * b.re_ + a.im_ * b.im_) / n, (a.im_ * b.re_ - a.re_ * b.im_) / n};
    }
    QComplex& operator+=(const QComplex& o) { re_ += o.re_; im_ += o.im_; return *this; }
    QComplex& operator-=(const QComplex& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
    QComplex& operator*=(const QComplex& o) { *this = *this * o; return *this; }

    friend bool operator==(const QComplex& a, const QComplex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const QComplex& a, const QComplex& b) { return !(a == b); }
    friend QComplex conj(const QComplex& a) { return {a.re_, -a.im_}; }

private:
    Rational re_, im_;
};

template <class K>
struct FieldOps;

template <>
struct FieldOps<Complex> {
    static constexpr bool exact = false;
    static Complex zero_like(const Complex& x) { return Complex(x.prec()); }
    static Complex one_like(const Complex& x) { return Complex::from_long(1, x.prec()); }
    static Complex from_long(long n, const Complex& like) {
        return Complex::from_long(n, like.prec());
    }
    static Complex imag_unit_like(const Complex& x) {
        return Complex(Real(0L, x.prec()), Real(1L, x.prec()));
    }
    // Cheap magnitude estimate used for pivoting/trimming decisions.
    static double mag(const Complex& x) {
        double m = std::abs(x.to_std());
        if (m == 0.0 && !x.is_zero()) {
            // underflowed in double; treat as tiny but nonzero
            return 1e-300;
        }
        return m;
    }
};

template <>
struct FieldOps<QComplex> {
    static constexpr bool exact = true;
    static QComplex zero_like(const QComplex&) { return QComplex(); }
    static QComplex one_like(const QComplex&) { return QComplex(1, 0); }
    static QComplex from_long(long n, const QComplex&) { return QComplex(n, 0); }
    static QComplex imag_unit_like(const QComplex&) { return QComplex(0, 1); }
    static double mag(const QComplex& x) {
        double m = std::abs(x.to_std());
        if (m == 0.0 && !x.is_zero()) return 1e-300;
        return m;
    }
};

// A point of the Riemann sphere: a finite field element or the point at
// infinity, kept as a tagged state rather than a large float.
template <class K>
class SpherePoint {
public:
    SpherePoint() : v_(), inf_(true) {}
    explicit SpherePoint(K v) : v_(std::move(v)), inf_(false) {}
    static SpherePoint infinity() { return SpherePoint(); }

    bool is_inf() const { return inf_; }
    const K& value() const {
        if (inf_) throw std::logic_error("SpherePoint: value() at infinity");
        return v_;
    }
    friend bool operator==(const SpherePoint& a, const SpherePoint& b) {
        if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
        return a.v_ == b.v_;
    }
    friend bool operator!=(const SpherePoint& a, const SpherePoint& b) { return !(a == b); }

private:
    K v_;
    bool inf_;
};

using CPoint = SpherePoint<Complex>;
using QPoint = SpherePoint<QComplex>;

// Spherical-flavoured distance used for tolerance decisions: ordinary
// distance between finite points, reciprocal distance near infinity.
inline double sphere_dist_est(const CPoint& a, const CPoint& b) {
    if (a.is_inf() && b.is_inf()) return 0.0;
    auto inv = [](const Complex& z) {
        double m = FieldOps<Complex>::mag(z);
        return m == 0.0 ? 1e300 : 1.0 / m;
    };
    if (a.is_inf()) return inv(b.value());
    if (b.is_inf()) return inv(a.value());
    return FieldOps<Complex>::mag(a.value() - b.value());
}

inline double sphere_dist_est(const QPoint& a, const QPoint& b) {
    if (a.is_inf() && b.is_inf()) return 0.0;
    if (a.is_inf() || b.is_inf()) return 1e300;
    return (a.value() - b.value()).is_zero() ? 0.0 : 1.0;
}

}  // namespace nrat
