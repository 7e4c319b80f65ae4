#pragma once

// Rational self-maps of the sphere in numerator/denominator form, kept
// reduced.  Conjugation by Mobius maps is done through homogeneous
// substitution, which cannot introduce spurious common factors.

#include "nrat/poly.hpp"
#include "nrat/mobius.hpp"
#include "nrat/error.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace nrat {

template <class K>
struct RatMap {
    Poly<K> num, den;

    RatMap() = default;
    RatMap(Poly<K> n, Poly<K> d) : num(std::move(n)), den(std::move(d)) {
        if (den.is_zero())
            throw Error(ErrorCode::validation, "RatMap: denominator is identically zero");
    }

    int degree() const { return std::max(num.degree(), den.degree()); }

    // Numerator of z - F(z); its roots are the finite fixed points.
    Poly<K> displacement() const {
        Poly<K> z_poly(std::vector<K>{FieldOps<K>::zero_like(den.coeffs()[0]),
                                      FieldOps<K>::one_like(den.coeffs()[0])});
        return z_poly * den - num;
    }

    bool is_identity(double rel_tol = 0.0) const {
        Poly<K> g = displacement();
        g.trim(rel_tol);
        return g.is_zero();
    }

    SpherePoint<K> eval(const SpherePoint<K>& p) const {
        if (p.is_inf()) {
            int dn = num.degree(), dd = den.degree();
            if (dn > dd) return SpherePoint<K>::infinity();
            if (dn < dd) return SpherePoint<K>(FieldOps<K>::zero_like(den.leading()));
            return SpherePoint<K>(num.leading() / den.leading());
        }
        K q = den.eval(p.value());
        if (q.is_zero()) return SpherePoint<K>::infinity();
        return SpherePoint<K>(num.eval(p.value()) / q);
    }

    // F'(z) at a finite non-pole point.
    K derivative_at(const K& z) const {
        K p = num.eval(z), q = den.eval(z);
        K dp = num.derivative().eval(z), dq = den.derivative().eval(z);
        return (dp * q - p * dq) / (q * q);
    }
};

// F o M for a Mobius M, via homogeneous substitution at degree
// n = max(deg num, deg den).
template <class K>
RatMap<K> compose_mobius_right(const RatMap<K>& f, const Mobius<K>& m) {
    int n = f.degree();
    if (n < 0) throw Error(ErrorCode::validation, "compose: empty map");
    K one = FieldOps<K>::one_like(m.a);
    Poly<K> lin_num(std::vector<K>{m.b, m.a});  // az + b
    Poly<K> lin_den(std::vector<K>{m.d, m.c});  // cz + d
    std::vector<Poly<K>> pow_num(n + 1), pow_den(n + 1);
    pow_num[0] = Poly<K>::constant(one);
    pow_den[0] = Poly<K>::constant(one);
    for (int i = 1; i <= n; ++i) {
        pow_num[i] = pow_num[i - 1] * lin_num;
        pow_den[i] = pow_den[i - 1] * lin_den;
    }
    auto subst = [&](const Poly<K>& p) {
        Poly<K> acc;
        for (int k = 0; k <= p.degree(); ++k) {
            if (p[k].is_zero()) continue;
            acc = acc + pow_num[k] * pow_den[n - k] * p[k];
        }
        return acc;
    };
    return RatMap<K>(subst(f.num), subst(f.den));
}

// T o F for a Mobius T.
template <class K>
RatMap<K> compose_mobius_left(const Mobius<K>& t, const RatMap<K>& f) {
    return RatMap<K>(f.num * t.a + f.den * t.b, f.num * t.c + f.den * t.d);
}

// G = T o F o T^{-1}.  Fixed points move by T, indices are unchanged.
template <class K>
RatMap<K> mobius_conjugate(const RatMap<K>& f, const Mobius<K>& t) {
    RatMap<K> inner = compose_mobius_right(f, t.inverse());
    RatMap<K> g = compose_mobius_left(t, inner);
    if constexpr (FieldOps<K>::exact) {
        Poly<K> gcd = poly_gcd(g.num, g.den);
        if (gcd.degree() > 0) {
            g.num = divmod(g.num, gcd).first;
            g.den = divmod(g.den, gcd).first;
        }
    } else {
        // Exact degree drops land at rounding scale; trim them away.
        Prec p = g.den.coeffs()[0].prec();
        double tol = std::pow(2.0, -static_cast<double>(p) / 2);
        g.num.trim(tol);
        g.den.trim(tol);
    }
    return g;
}

// Exact reduction to coprime form.
template <class K>
RatMap<K> reduced(const RatMap<K>& f) {
    static_assert(FieldOps<K>::exact);
    Poly<K> g = poly_gcd(f.num, f.den);
    if (g.degree() <= 0) return f;
    return RatMap<K>(divmod(f.num, g).first, divmod(f.den, g).first);
}

}  // namespace nrat
