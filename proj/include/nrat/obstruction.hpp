#pragma once

// Executable boundary experiments.
//
//  * d = 5: the two-bubble stratum with a level-2 bouquet IS reachable:
//    build the explicit family (pinned points -2, 2, 0, 1; collapsing
//    pairs), watch the decoration residuals vanish, and check the
//    degeneration recovers the target stratum.
//  * d = 6: the analogous level-3 target resists approximation: a
//    multi-start derivative-free sweep over the constrained family space
//    certifies that the residual stays bounded away from zero (numerical
//    evidence consistent with the obstruction, not a proof).
//  * the pinned variant (both extra points glued at 0) fails by a direct
//    least-squares infeasibility check.

#include "nrat/reopening.hpp"
#include "nrat/optimize.hpp"

#include <array>
#include <atomic>
#include <complex>
#include <thread>
#include <tuple>

namespace nrat {

// ---------------------------------------------------------------------------
// Targets

// Level-3 boundary target of type 6: two 3-punctured components whose
// 0-punctures share a level-3 bouquet; on component j (j = 1, 2)
// 1/(z - G_j) = 2/(z-1) - 1/z + (-1)^j/z^2 + 1/z^3.
template <class K>
NodedFunction<K> d6_target() {
    K one = FieldOps<K>::from_long(1, K{});
    K two = FieldOps<K>::from_long(2, K{});
    K zero = FieldOps<K>::zero_like(one);
    NodedFunction<K> nf;
    auto& sph = nf.structure.crush.sphere;
    for (int ci = 0; ci < 2; ++ci) {
        SphereComponent<K> c;
        c.id = ci;
        c.punctures.push_back({ci * 3 + 0, SpherePoint<K>(zero)});
        c.punctures.push_back({ci * 3 + 1, SpherePoint<K>(one)});
        c.punctures.push_back({ci * 3 + 2, SpherePoint<K>::infinity()});
        sph.components.push_back(c);
    }
    SphereComponent<K> mid;
    mid.id = 2;
    mid.punctures.push_back({6, SpherePoint<K>::infinity()});
    mid.punctures.push_back({7, SpherePoint<K>(FieldOps<K>::from_long(9, one))});
    for (int k = 0; k < 3; ++k)
        mid.punctures.push_back({8 + k, SpherePoint<K>(FieldOps<K>::from_long(k, one))});
    sph.components.push_back(mid);
    sph.nodes.push_back({0, 6});
    sph.nodes.push_back({3, 7});
    sph.level_n = 7;
    nf.structure.crush.ordinary_ids = {0, 1};
    nf.structure.marking.parts = {{4}, {5}, {6}, {7}, {1, 2, 3}};
    for (int j = 1; j <= 2; ++j) {
        std::vector<PolePart<K>> parts;
        parts.push_back({one, {two}});
        parts.push_back({zero, {-one, j == 1 ? -one : one, one}});
        nf.maps.emplace(j - 1, map_from_principal_parts(parts));
    }
    return nf;
}

// d = 5 stratum targets: per component j, indices at the v (infinity) and
// u (chart-1) punctures and the second decoration entry at the bouquet.
struct D5Targets {
    std::array<Complex, 2> lam_v;  // target index at the v puncture
    std::array<Complex, 2> lam_u;  // target index at the u puncture
    std::array<Complex, 2> c2;     // target c_2 at the singular puncture
    Prec prec = kDefaultPrec;

    Complex c1(int j) const {
        return Complex::from_long(1, prec) - lam_v[j] - lam_u[j];
    }
};

inline D5Targets default_d5_targets(Prec prec = kDefaultPrec) {
    D5Targets t;
    t.prec = prec;
    for (int j = 0; j < 2; ++j) {
        t.lam_v[j] = Complex(0.3, 0.1, prec);
        t.lam_u[j] = Complex(0.4, 0.0, prec);
        t.c2[j] = Complex(0.2, 0.0, prec);
    }
    return t;
}

// The target as a rational function with nodes: components have punctures
// 0 (singular, level 2), 1 (= u) and infinity (= v); infinity is a fixed
// point carrying lam_v.
inline NodedFunction<Complex> d5_target(const D5Targets& t) {
    Prec prec = t.prec;
    Complex one = Complex::from_long(1, prec);
    Complex zero(prec);
    NodedFunction<Complex> nf;
    auto& sph = nf.structure.crush.sphere;
    for (int ci = 0; ci < 2; ++ci) {
        SphereComponent<Complex> c;
        c.id = ci;
        c.punctures.push_back({ci * 3 + 0, CPoint(zero)});
        c.punctures.push_back({ci * 3 + 1, CPoint(one)});
        c.punctures.push_back({ci * 3 + 2, CPoint::infinity()});
        sph.components.push_back(c);
    }
    SphereComponent<Complex> mid;
    mid.id = 2;
    mid.punctures.push_back({6, CPoint::infinity()});
    mid.punctures.push_back({7, CPoint(Complex(9.0, 0.0, prec))});
    for (int k = 0; k < 2; ++k) mid.punctures.push_back({8 + k, CPoint(Complex(k, 0.0, prec))});
    sph.components.push_back(mid);
    sph.nodes.push_back({0, 6});
    sph.nodes.push_back({3, 7});
    sph.level_n = 6;
    nf.structure.crush.ordinary_ids = {0, 1};
    nf.structure.marking.parts = {{3}, {4}, {5}, {6}, {1, 2}};
    for (int j = 0; j < 2; ++j) {
        std::vector<PolePart<Complex>> parts;
        parts.push_back({zero, {t.c1(j), t.c2[j]}});
        parts.push_back({one, {t.lam_u[j]}});
        nf.maps.emplace(j, map_from_principal_parts(parts, -1.0,
                                                    /*allow_fixed_infinity=*/true));
    }
    return nf;
}

// ---------------------------------------------------------------------------
// d = 5 family

// The explicit degree-5 family pinned at (-2, 2, 0, 1): collapsing pairs
// at -2 and 2 carry the component data, the indices at 0 and 1 blow up
// like k^2.  Entries follow the target's labels:
//   [0, 1, -2+eps_1, -2, 2+eps_2, 2].
inline FamilySample build_d5_family(const D5Targets& t, long k) {
    if (k < 1) throw Error(ErrorCode::validation, "build_d5_family: k must be >= 1");
    Prec prec = t.prec;
    Complex one = Complex::from_long(1, prec);
    Complex ctil1 = Complex(static_cast<double>(k), 0.0, prec) *
                    Complex(static_cast<double>(k), 0.0, prec);
    std::array<Complex, 2> b, eps;
    for (int j = 0; j < 2; ++j) {
        if (FieldOps<Complex>::mag(t.c2[j]) > 0.0)
            b[j] = -t.c2[j];
        else
            b[j] = one / Complex(static_cast<double>(k), 0.0, prec);
    }
    // S_{k,1}(1) = b_1/ctil and S_{k,2}(1) = b_2/ctil solved for eps
    Complex three = Complex::from_long(3, prec);
    Complex two_c = Complex::from_long(2, prec);
    Complex six = Complex::from_long(6, prec);
    eps[0] = -(six * b[0]) / (ctil1 - three * b[0]);
    eps[1] = -(two_c * b[1]) / (ctil1 + b[1]);
    Complex sum_lam(prec);
    for (int j = 0; j < 2; ++j) sum_lam += t.lam_v[j] + t.lam_u[j];
    Complex ctil2 = one - sum_lam - ctil1;

    FamilySample s;
    s.k = k;
    s.data.entries = {
        {Complex(prec), ctil1},
        {one, ctil2},
        {Complex(-2.0, 0.0, prec) + eps[0], t.lam_u[0]},
        {Complex(-2.0, 0.0, prec), t.lam_v[0]},
        {Complex(2.0, 0.0, prec) + eps[1], t.lam_u[1]},
        {Complex(2.0, 0.0, prec), t.lam_v[1]},
    };
    return s;
}

inline std::vector<FamilySample> build_d5_schedule(const D5Targets& t, long k0 = 16,
                                                   int len = 7) {
    std::vector<FamilySample> fam;
    for (int i = 0; i < len; ++i) fam.push_back(build_d5_family(t, k0 << i));
    return fam;
}

// Per-sample decoration residual of the d5 family against its targets:
// largest finite-entry deviation after the contraction charts.
inline double d5_sample_residual(const D5Targets& t, const FamilySample& s) {
    Prec prec = t.prec;
    double res = 0.0;
    for (int j = 0; j < 2; ++j) {
        Complex e_base = Complex(j == 0 ? -2.0 : 2.0, 0.0, prec);
        Complex eps = s.data.entries[2 + 2 * j].first - e_base;
        Complex mu = eps / (e_base + eps);
        auto S = [&](const Complex& z) { return mu * z / (z - e_base); };
        // the four points clustering at 0 on component j
        Complex m1(prec), m2(prec);
        for (int i : {0, 1, 2 + 2 * (1 - j), 3 + 2 * (1 - j)}) {
            const auto& [p, idx] = s.data.entries[i];
            Complex img = S(p);
            m1 += idx;
            m2 += idx * img;
        }
        res = std::max(res, FieldOps<Complex>::mag(m1 - t.c1(j)));
        res = std::max(res, FieldOps<Complex>::mag(m2 - t.c2[j]));
        // the u/v indices are pinned to the targets by construction; check anyway
        res = std::max(res, FieldOps<Complex>::mag(s.data.entries[2 + 2 * j].second -
                                                   t.lam_u[j]));
        res = std::max(res, FieldOps<Complex>::mag(s.data.entries[3 + 2 * j].second -
                                                   t.lam_v[j]));
    }
    return res;
}

struct D5Verification {
    std::vector<std::pair<long, double>> trace;  // (k, decoration residual)
    DegenerationReport report;
    bool structure_matched = false;
    double final_residual = 0.0;  // last-k residual + classification indicator
};

inline D5Verification verify_d5(const D5Targets& t, long k0 = 16, int len = 7,
                                const DegenConfig& cfg_in = {}) {
    D5Verification v;
    auto fam = build_d5_schedule(t, k0, len);
    for (auto& s : fam) v.trace.emplace_back(s.k, d5_sample_residual(t, s));
    DegenConfig cfg = cfg_in;
    cfg.prec = t.prec;
    auto target = d5_target(t);
    v.report = classify_and_assemble(fam, cfg, target.structure);
    v.structure_matched = v.report.assembled && v.report.hint_matched;
    v.final_residual = v.trace.back().second + (v.structure_matched ? 0.0 : 1.0);
    return v;
}

// ---------------------------------------------------------------------------
// The d = 6 sweep (and its d = 5 positive control)

struct SweepConfig {
    bool d5_control = false;  // sweep the solvable 6-point analogue instead
    int starts = 64;
    int stages = 6;
    double R0 = 0.25;      // first bound on the pair separations
    double shrink = 0.5;   // bound shrink factor per stage
    long evals_per_start = 1600;
    long total_budget = -1;  // optional global cap on evaluations
    uint64_t seed = 2026;
    int jobs = 1;
    double margin = 0.1;
    bool fix_lambda_sum = false;  // optionally pin sum(lam) = -3 (d6 only)
    D5Targets control_targets = default_d5_targets();
};

struct SweepReport {
    double min_residual = 0.0;          // at the tightest stage
    std::vector<double> stage_minima;   // one per stage
    std::vector<double> argmin;         // scaled parameter vector
    long evals = 0;
    bool partial = false;               // budget ran out mid-run
    bool exceeds_margin = false;
    std::string note;
};

namespace sweepdetail {

using CD = std::complex<double>;

inline CD get(const std::vector<double>& x, size_t i) { return CD(x[2 * i], x[2 * i + 1]); }

// Decoration residual of one family member against the boundary targets.
// Scaled coordinates: pair separations measured in units of the stage
// bound R, the large indices in units of 1/R^2.
//   d6 layout: u1 u2 d dp eta1 kap1 eta2 kap2 q2 q3   (lam1 eliminated)
//   d5 layout: u1 u2 d eta1 kap1 eta2 kap2 g1         (ctil2 eliminated)
inline double residual(bool d5, const std::vector<double>& x, double R,
                       const std::array<CD, 2>& t_u, const std::array<CD, 2>& t_v,
                       const std::array<std::vector<CD>, 2>& t_c, bool fix_lambda_sum) {
    const double bad = 1e9;
    size_t nc = d5 ? 8 : 10;
    if (x.size() != 2 * nc) return bad;
    CD u[2] = {get(x, 0), get(x, 1)};
    if (std::abs(u[0]) > 1.0 || std::abs(u[1]) > 1.0) return bad;
    CD eps[2] = {R * u[0], R * u[1]};
    if (std::abs(eps[0]) < 1e-14 || std::abs(eps[1]) < 1e-14) return bad;

    std::vector<CD> pts;     // all fixed points
    std::vector<CD> idx;     // their indices
    std::vector<int> bpts;   // indices into pts of the bouquet-bound points
    CD e_base[2] = {CD(-2, 0), CD(2, 0)};
    pts = {e_base[0] + eps[0], e_base[0], e_base[1] + eps[1], e_base[1]};
    if (d5) {
        CD d = get(x, 2);
        CD eta1 = get(x, 3), kap1 = get(x, 4), eta2 = get(x, 5), kap2 = get(x, 6);
        CD g1 = get(x, 7);
        CD ctil1 = g1 / (R * R);
        CD ctil2 = CD(1, 0) - (eta1 + kap1 + eta2 + kap2) - ctil1;
        pts.push_back(CD(0, 0));
        pts.push_back(d);
        idx = {kap1, eta1, kap2, eta2, ctil1, ctil2};
        bpts = {4, 5};
    } else {
        CD d = get(x, 2), dp = get(x, 3);
        CD eta1 = get(x, 4), kap1 = get(x, 5), eta2 = get(x, 6), kap2 = get(x, 7);
        CD lam2 = get(x, 8) / (R * R), lam3 = get(x, 9) / (R * R);
        CD lam1 = CD(1, 0) - (eta1 + kap1 + eta2 + kap2) - lam2 - lam3;
        if (fix_lambda_sum) {
            // keep lam1+lam2+lam3 = -3: absorb the defect into eta2
            CD defect = lam1 + lam2 + lam3 + CD(3, 0);
            eta2 += defect;
            lam1 -= defect;
        }
        pts.push_back(CD(0, 0));
        pts.push_back(d);
        pts.push_back(dp);
        idx = {kap1, eta1, kap2, eta2, lam1, lam2, lam3};
        bpts = {4, 5, 6};
    }
    // sanity: distinct points, nonzero indices
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            if (std::abs(pts[i] - pts[j]) < 1e-12) return bad;
    for (auto& v : idx) {
        if (std::abs(v) < 1e-300) return bad;
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return bad;
    }

    double res = 0.0;
    for (int j = 0; j < 2; ++j) {
        CD mu = eps[j] / (e_base[j] + eps[j]);
        auto S = [&](CD z) { return mu * z / (z - e_base[j]); };
        res += std::abs(idx[2 * j] - t_u[j]);      // index at the u puncture
        res += std::abs(idx[2 * j + 1] - t_v[j]);  // index at the v puncture
        size_t L = t_c[j].size();
        for (size_t l = 1; l <= L; ++l) {
            CD m(0, 0);
            // the cluster on component j: the other pair and the bouquet points
            int other = 1 - j;
            std::vector<int> cluster = {2 * other, 2 * other + 1};
            for (int b : bpts) cluster.push_back(b);
            for (int i : cluster) {
                CD img = S(pts[i]);
                CD pw(1, 0);
                for (size_t e = 1; e < l; ++e) pw *= img;
                m += idx[i] * pw;
            }
            res += std::abs(m - t_c[j][l - 1]);
        }
        if (!std::isfinite(res)) return bad;
    }
    return res;
}

struct Problem {
    bool d5;
    std::array<CD, 2> t_u, t_v;
    std::array<std::vector<CD>, 2> t_c;
    bool fix_lambda_sum = false;

    size_t dim() const { return d5 ? 16 : 20; }
    double eval(const std::vector<double>& x, double R) const {
        return residual(d5, x, R, t_u, t_v, t_c, fix_lambda_sum);
    }
};

inline Problem make_problem(const SweepConfig& cfg) {
    Problem p;
    p.d5 = cfg.d5_control;
    p.fix_lambda_sum = cfg.fix_lambda_sum && !cfg.d5_control;
    if (cfg.d5_control) {
        const D5Targets& t = cfg.control_targets;
        for (int j = 0; j < 2; ++j) {
            p.t_u[j] = t.lam_u[j].to_std();
            p.t_v[j] = t.lam_v[j].to_std();
            p.t_c[j] = {t.c1(j).to_std(), t.c2[j].to_std()};
        }
    } else {
        for (int j = 0; j < 2; ++j) {
            p.t_u[j] = CD(2, 0);
            p.t_v[j] = CD(0, 0);
            double s = j == 0 ? -1.0 : 1.0;
            p.t_c[j] = {CD(-1, 0), CD(s, 0), CD(1, 0)};
        }
    }
    return p;
}

inline std::vector<double> random_start(const Problem& p, Rng& rng) {
    std::vector<double> x(p.dim(), 0.0);
    auto put = [&](size_t i, CD v) {
        x[2 * i] = v.real();
        x[2 * i + 1] = v.imag();
    };
    auto rnd = [&](double r) { return CD(rng.uniform(-r, r), rng.uniform(-r, r)); };
    put(0, CD(0.4, 0) + rnd(0.3));
    put(1, CD(0.4, 0) + rnd(0.3));
    if (p.d5) {
        put(2, CD(0.9, 0) + rnd(0.5));  // d
        put(3, p.t_v[0] + rnd(0.2));    // eta1
        put(4, p.t_u[0] + rnd(0.2));    // kap1
        put(5, p.t_v[1] + rnd(0.2));
        put(6, p.t_u[1] + rnd(0.2));
        put(7, CD(1, 0) + rnd(0.5));  // g1 = ctil1 * R^2
    } else {
        put(2, CD(0.5, 0) + rnd(0.4));   // d
        put(3, CD(-0.5, 0) + rnd(0.4));  // dp
        put(4, rnd(0.1));                // eta1 -> 0
        put(5, CD(2, 0) + rnd(0.2));     // kap1 -> 2
        put(6, rnd(0.1));
        put(7, CD(2, 0) + rnd(0.2));
        put(8, rnd(1.0));  // q2
        put(9, rnd(1.0));  // q3
    }
    return x;
}

// A construction-informed start: for the control it is the explicit d5
// family; for the target it matches the first two moment equations.
inline std::vector<double> informed_start(const Problem& p, double R) {
    std::vector<double> x(p.dim(), 0.0);
    auto put = [&](size_t i, CD v) {
        x[2 * i] = v.real();
        x[2 * i + 1] = v.imag();
    };
    if (p.d5) {
        CD ctil1 = CD(1, 0) / (R * R);
        CD b[2];
        for (int j = 0; j < 2; ++j) {
            CD c2 = p.t_c[j][1];
            b[j] = std::abs(c2) > 0 ? -c2 : CD(R, 0);
        }
        CD eps0 = -6.0 * b[0] / (ctil1 - 3.0 * b[0]);
        CD eps1 = -2.0 * b[1] / (ctil1 + b[1]);
        put(0, eps0 / R);
        put(1, eps1 / R);
        put(2, CD(1, 0));  // the second bouquet point at 1
        put(3, p.t_v[0]);
        put(4, p.t_u[0]);
        put(5, p.t_v[1]);
        put(6, p.t_u[1]);
        put(7, CD(1, 0));  // g1
    } else {
        CD eps[2] = {CD(0.5 * R, 0), CD(0.5 * R, 0)};
        CD d = CD(0.4, 0), dp = CD(-0.4, 0);
        put(0, eps[0] / R);
        put(1, eps[1] / R);
        put(2, d);
        put(3, dp);
        put(4, CD(0.01, 0));
        put(5, CD(2, 0));
        put(6, CD(0.01, 0));
        put(7, CD(2, 0));
        // match the second-moment pair for (lam2, lam3)
        CD e_base[2] = {CD(-2, 0), CD(2, 0)};
        CD xj[2], yj[2];
        for (int j = 0; j < 2; ++j) {
            CD mu = eps[j] / (e_base[j] + eps[j]);
            xj[j] = mu * d / (d - e_base[j]);
            yj[j] = mu * dp / (dp - e_base[j]);
        }
        CD det = xj[0] * yj[1] - xj[1] * yj[0];
        if (std::abs(det) > 1e-30) {
            CD b1 = CD(-1, 0), b2 = CD(1, 0);
            CD lam2 = (b1 * yj[1] - b2 * yj[0]) / det;
            CD lam3 = (xj[0] * b2 - xj[1] * b1) / det;
            put(8, lam2 * R * R);
            put(9, lam3 * R * R);
        } else {
            put(8, CD(1, 0));
            put(9, CD(1, 0));
        }
    }
    return x;
}

}  // namespace sweepdetail

// Multi-start pattern-search sweep over a shrinking schedule of pair
// separations.  Reports the smallest residual at the tightest stage; for
// the d6 target this staying above the margin is evidence for (never a
// proof of) the obstruction.
inline SweepReport d6_sweep(const SweepConfig& cfg) {
    sweepdetail::Problem prob = sweepdetail::make_problem(cfg);
    SweepReport rep;
    long budget = cfg.total_budget;
    if (cfg.starts < 1 || cfg.stages < 1) {
        rep.partial = true;
        rep.note = "empty sweep configuration";
        return rep;
    }
    if (budget == 0) {
        rep.partial = true;
        rep.note = "budget exhausted before the first evaluation";
        rep.min_residual = std::numeric_limits<double>::infinity();
        return rep;
    }
    Rng root(cfg.seed);
    std::vector<std::vector<double>> xs(cfg.starts);
    for (int s = 0; s < cfg.starts; ++s) {
        Rng r = root.fork(static_cast<uint64_t>(s) + 1);
        xs[s] = sweepdetail::random_start(prob, r);
    }
    double R = cfg.R0;
    std::atomic<long> used{0};
    for (int stage = 0; stage < cfg.stages; ++stage) {
        // start 0 is replaced by the construction-informed point
        xs[0] = sweepdetail::informed_start(prob, R);
        std::vector<double> values(cfg.starts,
                                   std::numeric_limits<double>::infinity());
        auto run_chunk = [&](int begin, int end) {
            for (int s = begin; s < end; ++s) {
                long remaining = budget < 0
                                     ? cfg.evals_per_start
                                     : std::min<long>(cfg.evals_per_start,
                                                      budget - used.load());
                if (remaining <= 0) return;
                auto f = [&](const std::vector<double>& x) { return prob.eval(x, R); };
                auto res = pattern_search(f, xs[s], 0.2, 1e-9, remaining);
                used += res.evals;
                xs[s] = res.x;
                values[s] = res.value;
            }
        };
        int jobs = std::max(1, cfg.jobs);
        if (jobs == 1) {
            run_chunk(0, cfg.starts);
        } else {
            std::vector<std::thread> pool;
            int per = (cfg.starts + jobs - 1) / jobs;
            for (int t = 0; t < jobs; ++t)
                pool.emplace_back(run_chunk, t * per,
                                  std::min(cfg.starts, (t + 1) * per));
            for (auto& th : pool) th.join();
        }
        double stage_min = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int s = 0; s < cfg.starts; ++s)
            if (values[s] < stage_min) {
                stage_min = values[s];
                arg = s;
            }
        rep.stage_minima.push_back(stage_min);
        if (stage == cfg.stages - 1 && arg >= 0) {
            rep.min_residual = stage_min;
            rep.argmin = xs[arg];
        }
        if (budget >= 0 && used.load() >= budget && stage < cfg.stages - 1) {
            rep.partial = true;
            rep.note = "evaluation budget exhausted mid-run";
            rep.min_residual = stage_min;
            if (arg >= 0) rep.argmin = xs[arg];
            break;
        }
        // warm-start the next, tighter stage: pull separations into bounds
        double Rn = R * cfg.shrink;
        for (auto& x : xs)
            for (size_t i = 0; i < 2; ++i) {
                // scaled u stays within the unit disk automatically, but
                // re-center extreme values toward the informed scale
                double m = std::hypot(x[2 * i], x[2 * i + 1]);
                if (m > 0.95) {
                    x[2 * i] *= 0.5 / m;
                    x[2 * i + 1] *= 0.5 / m;
                }
            }
        R = Rn;
    }
    rep.evals = used.load();
    rep.exceeds_margin = rep.min_residual >= cfg.margin;
    return rep;
}

// ---------------------------------------------------------------------------
// The pinned variant: both extra points glued at 0 (a triple fixed point).
// The transformed decoration entries at the bouquet are, exactly,
//   g2 = -mu_j (lam2/e_j + lam3/e_j^2),   g3 = mu_j^2 lam3 / e_j^2,
// and no shared (lam2, lam3) can reach c2 = (-1)^j, c3 = 1 for both j with
// small eps: the least-squares residual stays of order one.

struct PinnedCheckReport {
    double min_residual = 1e300;
    std::vector<std::tuple<double, double, double>> grid;  // (|eps1|, |eps2|, residual)
};

inline PinnedCheckReport d6_pinned_check(int scales = 10, double scale0 = 0.125,
                                         double shrink = 0.5) {
    using CD = std::complex<double>;
    PinnedCheckReport rep;
    const CD e_base[2] = {CD(-2, 0), CD(2, 0)};
    // rows: per j, the c2 and c3 equations as linear forms in (lam2, lam3)
    for (int t = 0; t < scales; ++t) {
        double s = scale0 * std::pow(shrink, t);
        for (double ratio : {1.0, -1.0, 0.5, 2.0}) {
            CD eps[2] = {CD(s, 0), CD(ratio * s, 0)};
            CD A[4][2];
            CD b[4];
            for (int j = 0; j < 2; ++j) {
                CD mu = eps[j] / (e_base[j] + eps[j]);
                A[2 * j][0] = -mu / e_base[j];
                A[2 * j][1] = -mu / (e_base[j] * e_base[j]);
                b[2 * j] = j == 0 ? CD(-1, 0) : CD(1, 0);  // c2 = (-1)^(j+1)
                A[2 * j + 1][0] = CD(0, 0);
                A[2 * j + 1][1] = mu * mu / (e_base[j] * e_base[j]);
                b[2 * j + 1] = CD(1, 0);  // c3 = 1
            }
            // least squares via normal equations
            CD g00(0, 0), g01(0, 0), g11(0, 0), r0(0, 0), r1(0, 0);
            for (int r = 0; r < 4; ++r) {
                g00 += std::conj(A[r][0]) * A[r][0];
                g01 += std::conj(A[r][0]) * A[r][1];
                g11 += std::conj(A[r][1]) * A[r][1];
                r0 += std::conj(A[r][0]) * b[r];
                r1 += std::conj(A[r][1]) * b[r];
            }
            CD det = g00 * g11 - g01 * std::conj(g01);
            CD lam2, lam3;
            if (std::abs(det) > 1e-300) {
                lam2 = (r0 * g11 - g01 * r1) / det;
                lam3 = (g00 * r1 - std::conj(g01) * r0) / det;
            }
            double rss = 0.0;
            for (int r = 0; r < 4; ++r)
                rss += std::norm(A[r][0] * lam2 + A[r][1] * lam3 - b[r]);
            double res = std::sqrt(rss);
            rep.grid.emplace_back(std::abs(eps[0]), std::abs(eps[1]), res);
            rep.min_residual = std::min(rep.min_residual, res);
        }
    }
    return rep;
}

}  // namespace nrat
