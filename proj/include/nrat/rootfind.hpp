#pragma once

// Simultaneous-iteration (Aberth-Ehrlich) root finder for the moderate
// degrees used here (<= ~14).  Runs at elevated working precision so that
// multiple roots, which scatter like eps^(1/m), can still be clustered at
// the caller's precision.

#include "nrat/poly.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace nrat {

struct RootClusterPoint {
    Complex center;
    int multiplicity;
};

namespace detail {

inline Poly<Complex> at_precision(const Poly<Complex>& p, Prec prec) {
    std::vector<Complex> c;
    c.reserve(p.degree() + 1);
    for (int i = 0; i <= p.degree(); ++i) {
        Real re(prec), im(prec);
        mpfr_set(re.raw(), p[i].re().raw(), MPFR_RNDN);
        mpfr_set(im.raw(), p[i].im().raw(), MPFR_RNDN);
        c.emplace_back(std::move(re), std::move(im));
    }
    return Poly<Complex>(std::move(c));
}

inline std::vector<Complex> aberth(const Poly<Complex>& poly, Prec w) {
    Poly<Complex> p = at_precision(poly, w);
    Poly<Complex> dp = p.derivative();
    int n = p.degree();
    std::vector<Complex> z;
    z.reserve(n);

    double lead = FieldOps<Complex>::mag(p.leading());
    double radius = 0.0;
    for (int k = 0; k < n; ++k)
        radius = std::max(radius, FieldOps<Complex>::mag(p[k]) / lead);
    radius = 1.0 + radius;
    for (int i = 0; i < n; ++i) {
        double th = 2.0 * M_PI * (i + 0.25) / n + 0.61803 * i;
        double r = radius * (0.55 + 0.25 * ((i % 3) / 3.0));
        z.emplace_back(r * std::cos(th), r * std::sin(th), w);
    }

    std::vector<bool> done(n, false);
    Real stop_scale = pow2(64, -static_cast<long>(w) + 6) * Real(4.0 * (n + 1), 64);
    int maxit = static_cast<int>(w) + 200;
    for (int it = 0; it < maxit; ++it) {
        bool all_done = true;
        for (int i = 0; i < n; ++i) {
            if (done[i]) continue;
            Complex pv = p.eval(z[i]);
            // backward-error stop: |p(z)| below rounding level of the
            // evaluated sum, which multiple roots also reach
            Real bound(64);
            Real zi_abs = abs(z[i]);
            Real t(1.0, 64);
            for (int k = 0; k <= n; ++k) {
                bound += abs(p[k]) * t;
                t = t * zi_abs;
            }
            if (abs(pv) <= bound * stop_scale) {
                done[i] = true;
                continue;
            }
            all_done = false;
            Complex pd = dp.eval(z[i]);
            if (pd.is_zero()) {
                z[i] += Complex(1e-3, 1e-3, w);
                continue;
            }
            Complex e = pv / pd;
            Complex s(w);
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                Complex d = z[i] - z[j];
                if (d.is_zero()) {
                    d = Complex(1e-20, 0, w);
                }
                s += FieldOps<Complex>::from_long(1, s) / d;
            }
            Complex denom = FieldOps<Complex>::from_long(1, s) - e * s;
            if (denom.is_zero())
                z[i] -= e;
            else
                z[i] -= e / denom;
        }
        if (all_done) break;
    }
    return z;
}

}  // namespace detail

// Roots of p with multiplicities.  `data_prec` is the precision the
// coefficients are trusted to; roots closer than cluster_tol (default
// 2^(-data_prec/2), relative) are merged into one multiple root.
inline std::vector<RootClusterPoint> poly_roots(const Poly<Complex>& p_in, Prec data_prec,
                                                double cluster_tol = 0.0) {
    if (cluster_tol <= 0.0) cluster_tol = std::pow(2.0, -static_cast<double>(data_prec) / 2);
    Poly<Complex> p = p_in;
    p.trim(std::pow(2.0, -static_cast<double>(data_prec) * 0.9));
    std::vector<RootClusterPoint> out;
    if (p.degree() <= 0) return out;

    // exact zeros at the origin deflate immediately
    int zero_mult = 0;
    while (zero_mult <= p.degree() && p[zero_mult].is_zero()) ++zero_mult;
    if (zero_mult > 0) {
        std::vector<Complex> c(p.coeffs().begin() + zero_mult, p.coeffs().end());
        p = Poly<Complex>(std::move(c));
        out.push_back({Complex(p.coeffs()[0].prec()), zero_mult});
    }
    if (p.degree() >= 1) {
        Prec w1 = data_prec + 96;
        std::vector<Complex> roots;
        if (p.degree() == 1) {
            roots.push_back(-(p[0] / p[1]));
        } else {
            roots = detail::aberth(p, w1);
            // if any two roots sit suspiciously close, redo with enough
            // working precision to separate scatter from true clusters
            double suspect = std::pow(2.0, -static_cast<double>(data_prec) / 16);
            bool close = false;
            for (size_t i = 0; i < roots.size() && !close; ++i)
                for (size_t j = i + 1; j < roots.size(); ++j) {
                    double sep = FieldOps<Complex>::mag(roots[i] - roots[j]);
                    double sc = std::max(1.0, std::max(FieldOps<Complex>::mag(roots[i]),
                                                       FieldOps<Complex>::mag(roots[j])));
                    if (sep <= suspect * sc) {
                        close = true;
                        break;
                    }
                }
            if (close) roots = detail::aberth(p, 3 * data_prec + 96);
        }
        // union-find merge at cluster_tol
        size_t n = roots.size();
        std::vector<size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) {
                double sc = std::max(1.0, std::max(FieldOps<Complex>::mag(roots[i]),
                                                   FieldOps<Complex>::mag(roots[j])));
                if (FieldOps<Complex>::mag(roots[i] - roots[j]) <= cluster_tol * sc) {
                    size_t a = find(i), b = find(j);
                    if (a != b) parent[a] = b;
                }
            }
        std::vector<std::vector<size_t>> groups(n);
        for (size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
        for (auto& g : groups) {
            if (g.empty()) continue;
            Complex sum(roots[g[0]].prec());
            for (size_t i : g) sum += roots[i];
            Complex center = sum / FieldOps<Complex>::from_long(static_cast<long>(g.size()), sum);
            out.push_back({center, static_cast<int>(g.size())});
        }
    }
    std::sort(out.begin(), out.end(), [](const RootClusterPoint& a, const RootClusterPoint& b) {
        auto za = a.center.to_std(), zb = b.center.to_std();
        if (za.real() != zb.real()) return za.real() < zb.real();
        return za.imag() < zb.imag();
    });
    return out;
}

}  // namespace nrat
