#pragma once

// Fixed points, dynamical indices and principal-part decorations of
// rational maps.  The index of F at a fixed point p is the residue of
// 1/(z - F(z)) at p; over all fixed points the indices sum to 1.

#include "nrat/ratmap.hpp"
#include "nrat/rootfind.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace nrat {

template <class K>
double default_rel_tol(const K& like) {
    if constexpr (FieldOps<K>::exact) {
        (void)like;
        return 0.0;
    } else {
        return std::pow(2.0, -static_cast<double>(like.prec()) / 2);
    }
}

// Order of vanishing of z - F(z) at a finite point (0 if p is not fixed).
template <class K>
int fixed_point_order_finite(const RatMap<K>& f, const K& p, double rel_tol) {
    Poly<K> g = f.displacement().shift(p);
    if (g.is_zero()) throw Error(ErrorCode::validation, "fixed_point_order: identity map");
    int m = 0;
    if constexpr (FieldOps<K>::exact) {
        while (m <= g.degree() && g[m].is_zero()) ++m;
    } else {
        double cut = g.coeff_scale() * rel_tol;
        while (m <= g.degree() && FieldOps<K>::mag(g[m]) <= cut) ++m;
    }
    return m;
}

namespace detail {

// A finite sample point that is neither a pole nor a fixed point of F.
template <class K>
K nonfixed_sample(const RatMap<K>& f, double rel_tol) {
    K like = f.den.coeffs()[0];
    double den_scale = f.den.coeff_scale();
    double disp_scale = f.displacement().coeff_scale();
    for (long k = 0; k < 64; ++k) {
        K s = FieldOps<K>::from_long(2 + k, like) +
              FieldOps<K>::imag_unit_like(like) * FieldOps<K>::from_long((3 * k + 1) % 7, like);
        K q = f.den.eval(s);
        K disp = f.displacement().eval(s);
        bool q_ok, d_ok;
        if constexpr (FieldOps<K>::exact) {
            q_ok = !q.is_zero();
            d_ok = !disp.is_zero();
        } else {
            q_ok = FieldOps<K>::mag(q) > den_scale * rel_tol;
            d_ok = FieldOps<K>::mag(disp) > disp_scale * rel_tol;
        }
        if (q_ok && d_ok) return s;
    }
    throw Error(ErrorCode::internal, "nonfixed_sample: no usable sample found");
}

// Principal part (c_1..c_m) of 1/(z - F(z)) at a finite point p with
// multiplicity m (m may be 0: empty vector).
template <class K>
std::vector<K> laurent_principal_finite(const RatMap<K>& f, const K& p, double rel_tol) {
    Poly<K> g = f.displacement().shift(p);
    int m = 0;
    if constexpr (FieldOps<K>::exact) {
        while (m <= g.degree() && g[m].is_zero()) ++m;
    } else {
        double cut = g.coeff_scale() * rel_tol;
        while (m <= g.degree() && FieldOps<K>::mag(g[m]) <= cut) ++m;
    }
    if (m == 0) return {};
    std::vector<K> h(g.coeffs().begin() + m, g.coeffs().end());
    Poly<K> hp(std::move(h));
    Poly<K> q = f.den.shift(p);
    auto a = series_divide(q, hp, static_cast<size_t>(m));
    // 1/(z-F) = sum_l c_l/(z-p)^l with c_l = a[m-l]
    std::vector<K> c(static_cast<size_t>(m), FieldOps<K>::zero_like(p));
    for (int l = 1; l <= m; ++l) c[l - 1] = a[m - l];
    return c;
}

}  // namespace detail

// Order of vanishing of z - F(z) at any sphere point.
template <class K>
int fixed_point_order(const RatMap<K>& f, const SpherePoint<K>& p, double rel_tol) {
    if (!p.is_inf()) return fixed_point_order_finite(f, p.value(), rel_tol);
    Poly<K> g = f.displacement();
    g.trim(rel_tol);
    if (g.is_zero()) throw Error(ErrorCode::validation, "fixed_point_order: identity map");
    return f.degree() + 1 - g.degree();
}

// Dynamical index of F at a fixed point p: residue of 1/(z - F(z)).
template <class K>
K dynamical_index(const RatMap<K>& f, const SpherePoint<K>& p, double rel_tol = -1.0) {
    K like = f.den.coeffs()[0];
    if (rel_tol < 0) rel_tol = default_rel_tol(like);
    if (f.is_identity(rel_tol))
        throw Error(ErrorCode::validation, "dynamical_index: identity map");
    if (p.is_inf()) {
        K s = detail::nonfixed_sample(f, rel_tol);
        // z -> 1/(z - s) sends infinity to 0
        Mobius<K> t{FieldOps<K>::zero_like(s), FieldOps<K>::one_like(s),
                    FieldOps<K>::one_like(s), -s};
        RatMap<K> g = mobius_conjugate(f, t);
        auto c = detail::laurent_principal_finite(g, FieldOps<K>::zero_like(s), rel_tol);
        if (c.empty()) throw Error(ErrorCode::validation, "dynamical_index: point is not fixed");
        return c[0];
    }
    auto c = detail::laurent_principal_finite(f, p.value(), rel_tol);
    if (c.empty()) throw Error(ErrorCode::validation, "dynamical_index: point is not fixed");
    return c[0];
}

template <class K>
struct PrincipalPart {
    SpherePoint<K> base_point;
    std::vector<K> coeffs;  // c_1 .. c_L
    int level;
    bool truncated;  // multiplicity fell short of the requested level
};

// Principal part of 1/(z - F~) at 0 after the (p,u,v) -> (0,1,inf)
// normalization; c_1 is chart-free, higher entries depend on (u,v).
template <class K>
PrincipalPart<K> principal_part(const RatMap<K>& f, const SpherePoint<K>& p,
                                const SpherePoint<K>& u, const SpherePoint<K>& v, int level,
                                double rel_tol = -1.0, bool allow_unfixed = false) {
    K like = f.den.coeffs()[0];
    if (rel_tol < 0) rel_tol = default_rel_tol(like);
    if (level < 1) throw Error(ErrorCode::validation, "principal_part: level must be >= 1");
    Mobius<K> t = mobius_from_triple(p, u, v);
    RatMap<K> g = mobius_conjugate(f, t);
    auto c = detail::laurent_principal_finite(g, FieldOps<K>::zero_like(t.a), rel_tol);
    int m = static_cast<int>(c.size());
    if (m == 0 && !allow_unfixed)
        throw Error(ErrorCode::validation, "principal_part: point is not fixed");
    if (m > level)
        throw Error(ErrorCode::validation,
                    "principal_part: multiplicity exceeds the requested level");
    c.resize(static_cast<size_t>(level), FieldOps<K>::zero_like(like));
    return PrincipalPart<K>{p, std::move(c), level, m < level};
}

// All fixed points of F with multiplicities (numeric field only).
inline std::vector<std::pair<CPoint, int>> fixed_points(const RatMap<Complex>& f, Prec data_prec,
                                                        double cluster_tol = 0.0) {
    double rel_tol = std::pow(2.0, -static_cast<double>(data_prec) / 2);
    if (f.is_identity(rel_tol))
        throw Error(ErrorCode::validation, "fixed_points: identity map");
    Poly<Complex> g = f.displacement();
    g.trim(rel_tol);
    std::vector<std::pair<CPoint, int>> out;
    int mult_inf = f.degree() + 1 - g.degree();
    auto roots = poly_roots(g, data_prec, cluster_tol);
    for (auto& r : roots) out.emplace_back(CPoint(r.center), r.multiplicity);
    if (mult_inf > 0) out.emplace_back(CPoint::infinity(), mult_inf);
    return out;
}

// ---------------------------------------------------------------------------
// Builders

template <class K>
struct PolePart {
    K point;                // finite location of the fixed point
    std::vector<K> coeffs;  // principal-part targets c_1..c_L
};

// The rational map F with 1/(z - F(z)) = sum_r sum_l c_{l,r}/(z - w_r)^l.
// When the c_1 entries sum to 1 the fixed points are exactly the w_r with
// multiplicity = effective length of c (the index formula closes at finite
// points).  With allow_fixed_infinity the sum may differ from 1 and
// infinity becomes a simple fixed point carrying the complementary index.
// `part_trim_tol` decides when a trailing target coefficient counts as
// absent (multiplicity below level).
template <class K>
RatMap<K> map_from_principal_parts(std::vector<PolePart<K>> parts, double part_trim_tol = -1.0,
                                   bool allow_fixed_infinity = false) {
    if (parts.empty()) throw Error(ErrorCode::validation, "map builder: no parts");
    K like = parts[0].point;
    double rel_tol = default_rel_tol(like);
    if (part_trim_tol < 0) part_trim_tol = rel_tol;

    // drop trailing negligible coefficients; drop parts that are entirely gone
    double scale = 1.0;
    for (auto& pp : parts)
        for (auto& c : pp.coeffs) scale = std::max(scale, FieldOps<K>::mag(c));
    std::vector<PolePart<K>> eff;
    for (auto& pp : parts) {
        auto c = pp.coeffs;
        if constexpr (FieldOps<K>::exact) {
            while (!c.empty() && c.back().is_zero()) c.pop_back();
        } else {
            while (!c.empty() && FieldOps<K>::mag(c.back()) <= part_trim_tol * scale) c.pop_back();
        }
        if (!c.empty()) eff.push_back(PolePart<K>{pp.point, std::move(c)});
    }
    if (eff.empty()) throw Error(ErrorCode::validation, "map builder: all parts vanish");
    for (size_t i = 0; i < eff.size(); ++i)
        for (size_t j = i + 1; j < eff.size(); ++j)
            if (eff[i].point == eff[j].point)
                throw Error(ErrorCode::validation, "map builder: coincident base points");

    K one = FieldOps<K>::one_like(like);
    Poly<K> full = Poly<K>::constant(one);
    std::vector<Poly<K>> pole_pow;  // (z - w_r)^{L_r}
    for (auto& pp : eff) {
        Poly<K> lin(std::vector<K>{-pp.point, one});
        Poly<K> pw = Poly<K>::constant(one);
        for (size_t l = 0; l < pp.coeffs.size(); ++l) pw = pw * lin;
        pole_pow.push_back(pw);
        full = full * pw;
    }
    Poly<K> numer;  // N with 1/(z-F) = N / full
    for (size_t r = 0; r < eff.size(); ++r) {
        Poly<K> others = Poly<K>::constant(one);
        for (size_t s = 0; s < eff.size(); ++s)
            if (s != r) others = others * pole_pow[s];
        Poly<K> lin(std::vector<K>{-eff[r].point, one});
        size_t L = eff[r].coeffs.size();
        Poly<K> pw = Poly<K>::constant(one);  // (z - w_r)^{L - l}, built downward
        std::vector<Poly<K>> lin_pows(L + 1);
        lin_pows[0] = Poly<K>::constant(one);
        for (size_t i = 1; i <= L; ++i) lin_pows[i] = lin_pows[i - 1] * lin;
        for (size_t l = 1; l <= L; ++l)
            numer = numer + others * lin_pows[L - l] * eff[r].coeffs[l - 1];
    }
    // index formula: the leading coefficients of z*N and full must cancel
    // unless infinity is allowed to absorb the complementary index
    Poly<K> zp(std::vector<K>{FieldOps<K>::zero_like(like), one});
    Poly<K> num = zp * numer - full;
    if constexpr (!FieldOps<K>::exact) num.trim(rel_tol);
    if (!allow_fixed_infinity && num.degree() >= full.degree())
        throw Error(ErrorCode::validation,
                    "map builder: index sum differs from 1 (index formula)");
    return RatMap<K>(std::move(num), std::move(numer));
}

// Ordered fixed-point/index data (the parametrization coordinates).
template <class K>
struct FixedPointData {
    std::vector<std::pair<K, K>> entries;  // (point, index), points finite
};

// Degree-d map with the d+1 given simple fixed points and indices.
template <class K>
RatMap<K> from_fixed_point_data(const FixedPointData<K>& data, double sum_tol = -1.0) {
    size_t n = data.entries.size();
    if (n < 3)
        throw Error(ErrorCode::validation,
                    "from_fixed_point_data: need at least 3 entries (degree >= 2)");
    K like = data.entries[0].first;
    if (sum_tol < 0) sum_tol = default_rel_tol(like);
    for (size_t i = 0; i < n; ++i) {
        if (data.entries[i].second.is_zero())
            throw Error(ErrorCode::validation, "from_fixed_point_data: zero index (degenerate)");
        for (size_t j = i + 1; j < n; ++j)
            if (data.entries[i].first == data.entries[j].first)
                throw Error(ErrorCode::validation, "from_fixed_point_data: duplicate points");
    }
    K sum = FieldOps<K>::zero_like(like);
    for (auto& e : data.entries) sum += e.second;
    K defect = sum - FieldOps<K>::one_like(like);
    if constexpr (FieldOps<K>::exact) {
        if (!defect.is_zero())
            throw Error(ErrorCode::validation, "from_fixed_point_data: index sum must be 1");
    } else {
        if (FieldOps<K>::mag(defect) > sum_tol)
            throw Error(ErrorCode::validation, "from_fixed_point_data: index sum must be 1");
    }
    std::vector<PolePart<K>> parts;
    parts.reserve(n);
    for (auto& e : data.entries) parts.push_back(PolePart<K>{e.first, {e.second}});
    return map_from_principal_parts(std::move(parts), 0.0 /* keep simple poles as given */);
}

// ---------------------------------------------------------------------------
// Polynomial-likeness

enum class MapClass { polynomial_conjugate, constant, neither };

struct PolyLikeResult {
    MapClass kind;
    std::optional<Mobius<Complex>> witness;  // sends the invariant point to infinity
};

// A map is Mobius conjugate to a polynomial iff some fixed point is
// totally invariant (its full preimage is itself).
inline PolyLikeResult is_polynomial_like(const RatMap<Complex>& f, Prec data_prec) {
    double rel_tol = std::pow(2.0, -static_cast<double>(data_prec) / 2);
    if (f.degree() == 0) return {MapClass::constant, std::nullopt};
    int d = f.degree();
    auto fps = fixed_points(f, data_prec);
    for (auto& [p, mult] : fps) {
        (void)mult;
        if (p.is_inf()) {
            Poly<Complex> q = f.den;
            q.trim(rel_tol);
            if (q.degree() == 0 && f.num.degree() == d)
                return {MapClass::polynomial_conjugate, Mobius<Complex>::identity(f.num[0])};
            continue;
        }
        // preimages of p: roots of num - p*den; totally invariant means
        // this polynomial is lead*(z-p)^d
        Poly<Complex> pre = f.num - f.den * p.value();
        pre.trim(rel_tol);
        if (pre.degree() != d) continue;  // infinity is also a preimage
        Poly<Complex> sh = pre.shift(p.value());
        double cut = sh.coeff_scale() * rel_tol;
        bool tot = true;
        for (int i = 0; i < d; ++i)
            if (FieldOps<Complex>::mag(sh[i]) > cut) {
                tot = false;
                break;
            }
        if (tot) {
            Complex zero(p.value().prec());
            Complex one = FieldOps<Complex>::from_long(1, p.value());
            Mobius<Complex> w{zero, one, one, -p.value()};
            return {MapClass::polynomial_conjugate, w};
        }
    }
    return {MapClass::neither, std::nullopt};
}

}  // namespace nrat
