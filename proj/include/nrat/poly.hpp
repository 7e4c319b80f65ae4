#pragma once

// Dense univariate polynomials over a coefficient field K, lowest degree
// first.  The zero polynomial is the empty coefficient list; any other
// polynomial keeps a nonzero leading coefficient (after trim()).

#include "nrat/field.hpp"

#include <algorithm>
#include <vector>

namespace nrat {

template <class K>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<K> coeffs) : c_(std::move(coeffs)) {}
    static Poly constant(K v) {
        if (v.is_zero()) return Poly();
        return Poly(std::vector<K>{std::move(v)});
    }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<K>& coeffs() const { return c_; }
    const K& operator[](size_t i) const { return c_[i]; }
    K& operator[](size_t i) { return c_[i]; }

    const K& leading() const { return c_.back(); }

    // Drop leading coefficients that are exactly zero (exact mode) or
    // negligible relative to the largest coefficient (float mode).
    Poly& trim(double rel_tol = 0.0) {
        if (c_.empty()) return *this;
        if constexpr (FieldOps<K>::exact) {
            while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
        } else {
            double scale = 0.0;
            for (const auto& x : c_) scale = std::max(scale, FieldOps<K>::mag(x));
            double cut = scale * rel_tol;
            while (!c_.empty() &&
                   (c_.back().is_zero() || FieldOps<K>::mag(c_.back()) <= cut))
                c_.pop_back();
        }
        return *this;
    }

    double coeff_scale() const {
        double scale = 0.0;
        for (const auto& x : c_) scale = std::max(scale, FieldOps<K>::mag(x));
        return scale;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<K> r(std::max(a.c_.size(), b.c_.size()),
                         a.c_.empty() ? (b.c_.empty() ? K() : FieldOps<K>::zero_like(b.c_[0]))
                                      : FieldOps<K>::zero_like(a.c_[0]));
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] = a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
        Poly p(std::move(r));
        p.trim();
        return p;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
    Poly operator-() const {
        std::vector<K> r;
        r.reserve(c_.size());
        for (const auto& x : c_) r.push_back(-x);
        return Poly(std::move(r));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<K> r(a.c_.size() + b.c_.size() - 1, FieldOps<K>::zero_like(a.c_[0]));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        Poly p(std::move(r));
        p.trim();
        return p;
    }
    friend Poly operator*(const Poly& a, const K& s) {
        if (a.is_zero() || s.is_zero()) return Poly();
        std::vector<K> r;
        r.reserve(a.c_.size());
        for (const auto& x : a.c_) r.push_back(x * s);
        return Poly(std::move(r));
    }

    K eval(const K& z) const {
        if (c_.empty()) return FieldOps<K>::zero_like(z);
        K acc = c_.back();
        for (size_t i = c_.size() - 1; i-- > 0;) acc = acc * z + c_[i];
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<K> r;
        r.reserve(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i)
            r.push_back(c_[i] * FieldOps<K>::from_long(static_cast<long>(i), c_[i]));
        Poly p(std::move(r));
        p.trim();
        return p;
    }

    // Coefficients of p(z + a) via repeated synthetic division.
    Poly shift(const K& a) const {
        if (c_.empty()) return Poly();
        std::vector<K> w = c_;
        size_t n = w.size();
        for (size_t i = 0; i < n; ++i)
            for (size_t j = n - 1; j-- > i;) w[j] += w[j + 1] * a;
        // After the loop w[i] holds the coefficient of z^i of p(z + a)
        // when read with the same ordering; rebuild to be safe.
        return Poly(std::move(w));
    }

    // p(z) -> z^deg * p(1/z)
    Poly reversed() const {
        std::vector<K> r(c_.rbegin(), c_.rend());
        Poly p(std::move(r));
        p.trim();
        return p;
    }

    // Quotient and remainder; requires b nonzero.  Exact in exact mode.
    friend std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
        if (b.is_zero()) throw std::domain_error("Poly: division by zero polynomial");
        if (a.degree() < b.degree()) return {Poly(), a};
        std::vector<K> rem = a.c_;
        std::vector<K> quo(a.degree() - b.degree() + 1, FieldOps<K>::zero_like(b.c_[0]));
        const K& lead = b.leading();
        for (int k = a.degree() - b.degree(); k >= 0; --k) {
            K q = rem[k + b.degree()] / lead;
            quo[k] = q;
            for (int j = 0; j <= b.degree(); ++j) rem[k + j] -= q * b.c_[j];
        }
        Poly r(std::move(rem));
        r.c_.resize(std::max(b.degree(), 0));
        r.trim();
        Poly qq(std::move(quo));
        qq.trim();
        return {qq, r};
    }

private:
    std::vector<K> c_;
};

// Monic gcd by the Euclidean algorithm; exact coefficient field only.
template <class K>
Poly<K> poly_gcd(Poly<K> a, Poly<K> b) {
    static_assert(FieldOps<K>::exact, "poly_gcd requires an exact field");
    while (!b.is_zero()) {
        auto [q, r] = divmod(a, b);
        (void)q;
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) return a;
    // normalize monic
    std::vector<K> c = a.coeffs();
    K inv = FieldOps<K>::one_like(c.back()) / c.back();
    for (auto& x : c) x = x * inv;
    return Poly<K>(std::move(c));
}

// First `n` coefficients of 1/p, requiring p(0) != 0.
template <class K>
std::vector<K> series_inverse(const Poly<K>& p, size_t n) {
    if (p.is_zero() || p[0].is_zero())
        throw std::domain_error("series_inverse: constant term vanishes");
    K inv0 = FieldOps<K>::one_like(p[0]) / p[0];
    std::vector<K> r(n, FieldOps<K>::zero_like(p[0]));
    r[0] = inv0;
    for (size_t k = 1; k < n; ++k) {
        K acc = FieldOps<K>::zero_like(p[0]);
        size_t jmax = std::min(k, static_cast<size_t>(p.degree()));
        for (size_t j = 1; j <= jmax; ++j) acc += p[j] * r[k - j];
        r[k] = -(acc * inv0);
    }
    return r;
}

// First `n` coefficients of a/b as a power series at 0; b(0) != 0.
template <class K>
std::vector<K> series_divide(const Poly<K>& a, const Poly<K>& b, size_t n) {
    auto binv = series_inverse(b, n);
    std::vector<K> r(n, FieldOps<K>::zero_like(b[0]));
    for (size_t i = 0; i < n; ++i) {
        K acc = FieldOps<K>::zero_like(b[0]);
        size_t jmax = std::min(i, static_cast<size_t>(std::max(a.degree(), -1)));
        for (size_t j = 0; j <= jmax && j < static_cast<size_t>(a.degree() + 1); ++j)
            acc += a[j] * binv[i - j];
        r[i] = acc;
    }
    return r;
}

template <class K>
Poly<K> poly_from_roots(const std::vector<K>& roots, const K& like) {
    Poly<K> p = Poly<K>::constant(FieldOps<K>::one_like(like));
    for (const auto& r : roots) {
        Poly<K> lin(std::vector<K>{-r, FieldOps<K>::one_like(like)});
        p = p * lin;
    }
    return p;
}

}  // namespace nrat
