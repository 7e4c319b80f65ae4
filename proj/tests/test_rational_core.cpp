#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nrat/fixpoint.hpp"
#include "nrat/rng.hpp"

using namespace nrat;

namespace {

Complex C(double re, double im = 0.0, Prec prec = 256) { return Complex(re, im, prec); }
CPoint P(double re, double im = 0.0) { return CPoint(C(re, im)); }

double dist(const Complex& a, const Complex& b) { return FieldOps<Complex>::mag(a - b); }

RatMap<Complex> square_map(Prec prec = 256) {
    // z^2
    return RatMap<Complex>(Poly<Complex>({Complex(prec), Complex(prec), C(1, 0, prec)}),
                           Poly<Complex>({C(1, 0, prec)}));
}

}  // namespace

TEST_CASE("mobius_from_triple: identity and swap cases") {
    auto id = mobius_from_triple<Complex>(P(0), P(1), CPoint::infinity());
    CHECK(id.apply(P(0.37)) == P(0.37));
    CHECK(id.apply(CPoint::infinity()).is_inf());

    // (0, inf, 1) -> z/(z-1)
    auto t = mobius_from_triple<Complex>(P(0), CPoint::infinity(), P(1));
    CHECK(!t.apply(P(0)).is_inf());
    CHECK(dist(t.apply(P(0)).value(), C(0)) == 0.0);
    CHECK(t.apply(P(1)).is_inf());
    CHECK(dist(t.apply(CPoint::infinity()).value(), C(1)) < 1e-70);
    auto half = t.apply(P(3)).value();  // 3/(3-1)
    CHECK(dist(half, C(1.5)) < 1e-70);

    CHECK_THROWS_AS(mobius_from_triple<Complex>(P(1), P(1), P(2)), Error);
}

TEST_CASE("mobius_from_triple reproduces the two-pole contraction family") {
    // For the pair (e, e+eps) with e = (-1)^j 2, the map sending
    // (0, e, e+eps) -> (0, inf, 1) is  mu * z/(z-e),  mu = eps/(e+eps).
    for (double e : {-2.0, 2.0}) {
        Complex eps = C(1e-3, 2e-4);
        CPoint pe = CPoint(C(e));
        CPoint pe_eps = CPoint(C(e) + eps);
        auto s = mobius_from_triple<Complex>(P(0), pe_eps, pe);
        Complex mu = eps / (C(e) + eps);
        // compare against mu*z/(z-e) at a few points
        for (double x : {0.7, -1.3, 3.1}) {
            Complex z = C(x, 0.4);
            Complex expect = mu * z / (z - C(e));
            CHECK(dist(s.apply(CPoint(z)).value(), expect) < 1e-70);
        }
    }
}

TEST_CASE("mobius_conjugate: identity, inversion of z^2, degree preserved") {
    auto f = square_map();
    auto id = Mobius<Complex>::identity(C(1));
    auto g = mobius_conjugate(f, id);
    CHECK(g.degree() == 2);
    CHECK(dist(g.eval(P(0.3)).value(), f.eval(P(0.3)).value()) < 1e-70);

    // conjugate by z -> 1/z : fixed points {0,1,inf} become {inf,1,0}
    Mobius<Complex> inv{C(0), C(1), C(1), C(0)};
    auto h = mobius_conjugate(f, inv);
    CHECK(h.degree() == 2);
    auto fps = fixed_points(h, 256);
    REQUIRE(fps.size() == 3);
    bool has_inf = false, has_zero = false, has_one = false;
    for (auto& [p, m] : fps) {
        CHECK(m == 1);
        if (p.is_inf()) has_inf = true;
        else if (dist(p.value(), C(0)) < 1e-60) has_zero = true;
        else if (dist(p.value(), C(1)) < 1e-60) has_one = true;
    }
    CHECK(has_inf);
    CHECK(has_zero);
    CHECK(has_one);
}

TEST_CASE("conjugation preserves indices at corresponding fixed points") {
    Rng rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        int d = static_cast<int>(rng.uniform_int(2, 5));
        FixedPointData<Complex> data;
        Complex sum(256);
        for (int i = 0; i <= d; ++i) {
            Complex pt;
            bool ok = false;
            while (!ok) {
                pt = rng.complex_box(2.0, 256);
                ok = true;
                for (auto& e : data.entries)
                    if (dist(e.first, pt) < 0.2) ok = false;
            }
            Complex idx = rng.complex_box(1.5, 256);
            data.entries.emplace_back(pt, idx);
            sum += idx;
        }
        // rescale indices so they sum to 1
        if (FieldOps<Complex>::mag(sum) < 0.05) continue;
        for (auto& e : data.entries) e.second = e.second / sum;
        auto f = from_fixed_point_data(data);
        Mobius<Complex> t{rng.complex_box(2, 256), rng.complex_box(2, 256),
                          rng.complex_box(2, 256), rng.complex_box(2, 256)};
        if (FieldOps<Complex>::mag(t.det()) < 0.05) continue;
        auto g = mobius_conjugate(f, t);
        CHECK(g.degree() == f.degree());
        for (auto& e : data.entries) {
            CPoint moved = t.apply(CPoint(e.first));
            Complex idx = dynamical_index(g, moved);
            CHECK(dist(idx, e.second) < 1e-40);
        }
    }
}

TEST_CASE("from_fixed_point_data: the (-1,0,1)/(1,-1,1) map is 2z/(z^2+1)") {
    // exact oracle: sum l_r/(z-p_r) = (z^2+1)/(z^3-z), so F = 2z/(z^2+1)
    FixedPointData<QComplex> data;
    data.entries = {{QComplex(-1, 0), QComplex(1, 0)},
                    {QComplex(0, 0), QComplex(-1, 0)},
                    {QComplex(1, 0), QComplex(1, 0)}};
    auto f = from_fixed_point_data(data);
    REQUIRE(f.degree() == 2);
    // normalize denominator leading to 1 and compare coefficients exactly
    QComplex lead = f.den.leading();
    auto nn = f.num * (QComplex(1, 0) / lead);
    auto dd = f.den * (QComplex(1, 0) / lead);
    REQUIRE(nn.degree() == 1);
    CHECK(nn[0] == QComplex(0, 0));
    CHECK(nn[1] == QComplex(2, 0));
    REQUIRE(dd.degree() == 2);
    CHECK(dd[0] == QComplex(1, 0));
    CHECK(dd[1] == QComplex(0, 0));
    CHECK(dd[2] == QComplex(1, 0));
}

TEST_CASE("from_fixed_point_data input validation") {
    FixedPointData<Complex> two;
    two.entries = {{C(0), C(0.5)}, {C(1), C(0.5)}};
    CHECK_THROWS_AS(from_fixed_point_data(two), Error);

    FixedPointData<Complex> badsum;
    badsum.entries = {{C(0), C(0.5)}, {C(1), C(0.5)}, {C(2), C(0.5)}};
    CHECK_THROWS_AS(from_fixed_point_data(badsum), Error);

    FixedPointData<Complex> dup;
    dup.entries = {{C(0), C(0.5)}, {C(0), C(0.25)}, {C(2), C(0.25)}};
    CHECK_THROWS_AS(from_fixed_point_data(dup), Error);

    FixedPointData<Complex> zero_idx;
    zero_idx.entries = {{C(0), C(0)}, {C(1), C(0.5)}, {C(2), C(0.5)}};
    CHECK_THROWS_AS(from_fixed_point_data(zero_idx), Error);
}

TEST_CASE("fixed point / index round trip on random data") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        int d = static_cast<int>(rng.uniform_int(2, 8));
        FixedPointData<Complex> data;
        Complex sum(256);
        bool good = true;
        for (int i = 0; i <= d; ++i) {
            Complex pt;
            int guard = 0;
            while (true) {
                pt = rng.complex_box(2.0, 256);
                bool ok = true;
                for (auto& e : data.entries)
                    if (dist(e.first, pt) < 0.15) ok = false;
                if (ok || ++guard > 200) break;
            }
            Complex idx = rng.complex_box(1.5, 256);
            data.entries.emplace_back(pt, idx);
            sum += idx;
        }
        if (FieldOps<Complex>::mag(sum) < 0.05) continue;
        for (auto& e : data.entries) e.second = e.second / sum;
        for (auto& e : data.entries)
            if (FieldOps<Complex>::mag(e.second) < 1e-6) good = false;
        if (!good) continue;

        auto f = from_fixed_point_data(data);
        CHECK(f.degree() == d);
        auto fps = fixed_points(f, 256);
        REQUIRE(fps.size() == static_cast<size_t>(d + 1));
        int total = 0;
        for (auto& [p, m] : fps) {
            total += m;
            REQUIRE(!p.is_inf());
            // match to nearest input point
            double best = 1e300;
            size_t arg = 0;
            for (size_t i = 0; i < data.entries.size(); ++i) {
                double dd = dist(data.entries[i].first, p.value());
                if (dd < best) {
                    best = dd;
                    arg = i;
                }
            }
            CHECK(best < 1e-30);
            Complex idx = dynamical_index(f, p);
            CHECK(dist(idx, data.entries[arg].second) < 1e-30);
        }
        CHECK(total == d + 1);
    }
}

TEST_CASE("fixed_points of the named examples") {
    auto f = square_map();
    auto fps = fixed_points(f, 256);
    REQUIRE(fps.size() == 3);  // 0, 1, inf

    // 2z/(z^2+1): fixed points {-1, 0, 1}
    RatMap<Complex> g(Poly<Complex>({C(0), C(2)}), Poly<Complex>({C(1), C(0), C(1)}));
    auto gf = fixed_points(g, 256);
    REQUIRE(gf.size() == 3);
    for (auto& [p, m] : gf) {
        CHECK(m == 1);
        CHECK(!p.is_inf());
    }

    // z^2/(2z-1): z(1-z)/(2z-1) displacement; fixed {0, 1} and inf
    RatMap<Complex> h(Poly<Complex>({C(0), C(0), C(1)}), Poly<Complex>({C(-1), C(2)}));
    auto hf = fixed_points(h, 256);
    REQUIRE(hf.size() == 3);
    bool inf_found = false;
    for (auto& [p, m] : hf) {
        CHECK(m == 1);
        if (p.is_inf()) inf_found = true;
    }
    CHECK(inf_found);

    RatMap<Complex> ident(Poly<Complex>({C(0), C(1)}), Poly<Complex>({C(1)}));
    CHECK_THROWS_AS(fixed_points(ident, 256), Error);
}

TEST_CASE("dynamical_index: multiplier examples and the index formula") {
    auto f = square_map();
    CHECK(dist(dynamical_index(f, P(1)), C(-1)) < 1e-70);  // 1/(1-2)
    CHECK(dist(dynamical_index(f, P(0)), C(1)) < 1e-70);   // 1/(1-0)
    // index at infinity closes the formula: 1 - (-1) - 1 = 1... sum must be 1
    Complex s = dynamical_index(f, P(0)) + dynamical_index(f, P(1)) +
                dynamical_index(f, CPoint::infinity());
    CHECK(dist(s, C(1)) < 1e-70);

    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        int d = static_cast<int>(rng.uniform_int(2, 6));
        std::vector<Complex> num, den;
        for (int i = 0; i <= d; ++i) num.push_back(rng.complex_box(1.0, 256));
        for (int i = 0; i <= d; ++i) den.push_back(rng.complex_box(1.0, 256));
        RatMap<Complex> m{Poly<Complex>(num), Poly<Complex>(den)};
        if (m.degree() != d) continue;
        std::vector<std::pair<CPoint, int>> fps;
        try {
            fps = fixed_points(m, 256);
        } catch (const Error&) {
            continue;
        }
        bool simple = true;
        for (auto& [p, mu] : fps)
            if (mu != 1) simple = false;
        if (!simple) continue;
        Complex sum(256);
        for (auto& [p, mu] : fps) sum += dynamical_index(m, p);
        CHECK(dist(sum, C(1)) < 1e-40);
    }
}

TEST_CASE("principal_part: exact level-3 example and chart dependence") {
    // 1/(z-F) = 2/(z-1) - 1/z + 1/z^2 + 1/z^3 : principal part at 0 under
    // (0,1,inf) is (-1, 1, 1); c_1 is chart-free, c_2, c_3 are not.
    std::vector<PolePart<QComplex>> parts;
    parts.push_back({QComplex(1, 0), {QComplex(2, 0)}});
    parts.push_back({QComplex(0, 0), {QComplex(-1, 0), QComplex(1, 0), QComplex(1, 0)}});
    auto f = map_from_principal_parts(parts);
    REQUIRE(f.degree() == 3);

    auto pp = principal_part<QComplex>(f, QPoint(QComplex(0, 0)), QPoint(QComplex(1, 0)),
                                       QPoint::infinity(), 3);
    REQUIRE(pp.coeffs.size() == 3);
    CHECK(pp.coeffs[0] == QComplex(-1, 0));
    CHECK(pp.coeffs[1] == QComplex(1, 0));
    CHECK(pp.coeffs[2] == QComplex(1, 0));
    CHECK(!pp.truncated);

    // another chart: c_1 unchanged, and the index at 1 is exactly 2
    auto pp2 = principal_part<QComplex>(f, QPoint(QComplex(0, 0)), QPoint(QComplex(1, 1)),
                                        QPoint(QComplex(5, 0)), 3);
    CHECK(pp2.coeffs[0] == QComplex(-1, 0));
    bool higher_changed = (pp2.coeffs[1] != pp.coeffs[1]) || (pp2.coeffs[2] != pp.coeffs[2]);
    CHECK(higher_changed);
    CHECK(dynamical_index(f, QPoint(QComplex(1, 0))) == QComplex(2, 0));

    CHECK_THROWS_AS(principal_part<QComplex>(f, QPoint(QComplex(0, 0)), QPoint(QComplex(1, 0)),
                                             QPoint::infinity(), 2),
                    Error);
}

TEST_CASE("principal_part: simple fixed point at level 1 equals the index") {
    auto f = square_map();
    auto pp = principal_part<Complex>(f, P(1), P(0), CPoint::infinity(), 1);
    CHECK(dist(pp.coeffs[0], C(-1)) < 1e-70);
}

TEST_CASE("c_1 invariance for a triple fixed point across charts") {
    std::vector<PolePart<Complex>> parts;
    parts.push_back({C(1), {C(2)}});
    parts.push_back({C(0), {C(-1), C(1), C(1)}});
    auto f = map_from_principal_parts(parts);
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        Complex u = rng.complex_box(3.0, 256);
        Complex v = rng.complex_box(3.0, 256);
        if (dist(u, v) < 0.1) continue;
        if (FieldOps<Complex>::mag(u) < 0.1 || FieldOps<Complex>::mag(v) < 0.1) continue;
        auto pp = principal_part<Complex>(f, P(0), CPoint(u), CPoint(v), 3);
        CHECK(dist(pp.coeffs[0], C(-1)) < 1e-50);
    }
}

TEST_CASE("is_polynomial_like classification") {
    auto f = square_map();
    auto r = is_polynomial_like(f, 256);
    CHECK(r.kind == MapClass::polynomial_conjugate);

    // 2z/(z^2+1) is conjugate to z^2: T = (1+z)/(1-z) moves the
    // superattracting pair {-1, 1} to {0, inf}
    RatMap<Complex> g(Poly<Complex>({C(0), C(2)}), Poly<Complex>({C(1), C(0), C(1)}));
    auto rg = is_polynomial_like(g, 256);
    CHECK(rg.kind == MapClass::polynomial_conjugate);
    {
        REQUIRE(rg.witness.has_value());
        auto w = mobius_conjugate(g, *rg.witness);
        Poly<Complex> den = w.den;
        den.trim(1e-40);
        CHECK(den.degree() == 0);
    }

    // 1/z^2: every fixed point (the cube roots of unity) has a two-point
    // preimage, so nothing is totally invariant
    RatMap<Complex> inv2(Poly<Complex>({C(1)}), Poly<Complex>({C(0), C(0), C(1)}));
    CHECK(is_polynomial_like(inv2, 256).kind == MapClass::neither);

    RatMap<Complex> c(Poly<Complex>({C(3.5)}), Poly<Complex>({C(1)}));
    CHECK(is_polynomial_like(c, 256).kind == MapClass::constant);

    // 1/z^2 has no totally invariant point... 0 and inf swap; but z^2
    // conjugated anywhere stays polynomial-like
    Mobius<Complex> t{C(1), C(2, 1), C(0.5, -0.3), C(1)};
    auto h = mobius_conjugate(f, t);
    auto rh = is_polynomial_like(h, 256);
    CHECK(rh.kind == MapClass::polynomial_conjugate);
    REQUIRE(rh.witness.has_value());
    auto w = mobius_conjugate(h, *rh.witness);
    // witness conjugation yields an honest polynomial: denominator degree 0
    Poly<Complex> den = w.den;
    den.trim(1e-40);
    CHECK(den.degree() == 0);
}

TEST_CASE("multiple fixed point: degree-2 map with a double point at 0") {
    // z - F = z^2/(1 - z): F = (z - 2z^2)/(1 - z), double at 0, simple at inf
    RatMap<Complex> f(Poly<Complex>({C(0), C(1), C(-2)}), Poly<Complex>({C(1), C(-1)}));
    REQUIRE(f.degree() == 2);
    auto fps = fixed_points(f, 256);
    REQUIRE(fps.size() == 2);
    for (auto& [p, m] : fps) {
        if (p.is_inf()) CHECK(m == 1);
        else {
            CHECK(m == 2);
            CHECK(FieldOps<Complex>::mag(p.value()) < 1e-60);
        }
    }
    // principal part at 0 under (0,1,inf): (1-z)/z^2 = 1/z^2 - 1/z
    auto pp = principal_part<Complex>(f, P(0), P(1), CPoint::infinity(), 2);
    CHECK(dist(pp.coeffs[0], C(-1)) < 1e-60);
    CHECK(dist(pp.coeffs[1], C(1)) < 1e-60);
    // index formula across both fixed points
    Complex s = dynamical_index(f, P(0)) + dynamical_index(f, CPoint::infinity());
    CHECK(dist(s, C(1)) < 1e-60);
}
