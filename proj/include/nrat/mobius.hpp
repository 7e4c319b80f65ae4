#pragma once

#include "nrat/field.hpp"
#include "nrat/error.hpp"

namespace nrat {

// Fractional linear map z -> (az + b)/(cz + d), ad - bc != 0.
template <class K>
struct Mobius {
    K a, b, c, d;

    K det() const { return a * d - b * c; }

    static Mobius identity(const K& like) {
        K one = FieldOps<K>::one_like(like);
        K zero = FieldOps<K>::zero_like(like);
        return {one, zero, zero, one};
    }

    Mobius inverse() const { return {d, -b, -c, a}; }

    friend Mobius operator*(const Mobius& s, const Mobius& t) {
        return {s.a * t.a + s.b * t.c, s.a * t.b + s.b * t.d,
                s.c * t.a + s.d * t.c, s.c * t.b + s.d * t.d};
    }

    SpherePoint<K> apply(const SpherePoint<K>& p) const {
        if (p.is_inf()) {
            if (c.is_zero()) return SpherePoint<K>::infinity();
            return SpherePoint<K>(a / c);
        }
        K den = c * p.value() + d;
        if (den.is_zero()) return SpherePoint<K>::infinity();
        return SpherePoint<K>((a * p.value() + b) / den);
    }
};

// The unique Mobius map with T(p0)=0, T(p1)=1, T(p2)=infinity.
template <class K>
Mobius<K> mobius_from_triple(const SpherePoint<K>& p0, const SpherePoint<K>& p1,
                             const SpherePoint<K>& p2) {
    if (p0 == p1 || p1 == p2 || p0 == p2)
        throw Error(ErrorCode::validation, "mobius_from_triple: points must be distinct");
    const K* fin = nullptr;
    if (!p0.is_inf()) fin = &p0.value();
    else if (!p1.is_inf()) fin = &p1.value();
    else fin = &p2.value();
    K one = FieldOps<K>::one_like(*fin);
    K zero = FieldOps<K>::zero_like(*fin);

    if (p0.is_inf()) {
        const K& b = p1.value();
        const K& c = p2.value();
        return {zero, b - c, one, -c};
    }
    if (p1.is_inf()) {
        const K& a = p0.value();
        const K& c = p2.value();
        return {one, -a, one, -c};
    }
    if (p2.is_inf()) {
        const K& a = p0.value();
        const K& b = p1.value();
        return {one, -a, zero, b - a};
    }
    const K& a = p0.value();
    const K& b = p1.value();
    const K& c = p2.value();
    K bc = b - c;
    K ba = b - a;
    return {bc, -(a * bc), ba, -(c * ba)};
}

}  // namespace nrat
