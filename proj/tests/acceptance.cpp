// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Criteria (tolerances pinned in code):
//   1  index-formula + round trip on 1000 random generic maps (<60 s)
//   2  exact symmetric-matrix identities, 200 rational eps vectors (<30 s)
//   3  exact golden decoration of the level-3 boundary target
//   4  reopen/degenerate round trip on 20 random noded functions (<5 min)
//   5  the d=5 boundary family reaches its stratum (residual < 1e-2)
//   6  sweep contrast: d=6 target >= 0.1, d=5 control < 1e-2 (<15 min)
//   7  pinned-variant infeasibility residual >= 0.1
//   8  30-case combinatorial validator table, zero misclassifications

#include "nrat/json_io.hpp"
#include "nrat/rng.hpp"

#include <chrono>
#include <cstdio>

using namespace nrat;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  (%s)\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Complex C(double re, double im = 0.0) { return Complex(re, im, 256); }

// --------------------------------------------------------------------------

void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    int done = 0;
    double worst_sum = 0.0, worst_rt = 0.0;
    while (done < 1000) {
        int d = static_cast<int>(rng.uniform_int(2, 8));
        FixedPointData<Complex> data;
        Complex sum(256);
        bool ok = true;
        for (int i = 0; i <= d; ++i) {
            Complex pt;
            int guard = 0;
            while (true) {
                pt = rng.complex_box(2.0, 256);
                bool clear = true;
                for (auto& e : data.entries)
                    if (FieldOps<Complex>::mag(e.first - pt) < 0.1) clear = false;
                if (clear || ++guard > 100) break;
            }
            Complex idx = rng.complex_box(1.5, 256);
            data.entries.emplace_back(pt, idx);
            sum += idx;
        }
        if (FieldOps<Complex>::mag(sum) < 0.05) continue;
        for (auto& e : data.entries) {
            e.second = e.second / sum;
            if (FieldOps<Complex>::mag(e.second) < 1e-3) ok = false;
        }
        if (!ok) continue;
        ++done;

        auto f = from_fixed_point_data(data);
        auto fps = fixed_points(f, 256);
        if (fps.size() != data.entries.size()) {
            worst_rt = 1.0;
            break;
        }
        Complex isum(256);
        for (auto& [p, m] : fps) {
            if (m != 1 || p.is_inf()) {
                worst_rt = 1.0;
                break;
            }
            Complex idx = dynamical_index(f, p);
            isum += idx;
            double best = 1e300;
            size_t arg = 0;
            for (size_t i = 0; i < data.entries.size(); ++i) {
                double dd = FieldOps<Complex>::mag(data.entries[i].first - p.value());
                if (dd < best) {
                    best = dd;
                    arg = i;
                }
            }
            worst_rt = std::max(worst_rt, best);
            worst_rt = std::max(
                worst_rt, FieldOps<Complex>::mag(idx - data.entries[arg].second));
        }
        worst_sum = std::max(worst_sum,
                             FieldOps<Complex>::mag(isum - FieldOps<Complex>::from_long(1, isum)));
        if (worst_sum > 1e-30 || worst_rt > 1e-20) break;
    }
    double secs = seconds_since(t0);
    bool pass = done == 1000 && worst_sum <= 1e-30 && worst_rt <= 1e-20 && secs < 60.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "1000 maps, |sum-1| <= %.2e, round trip <= %.2e, %.1f s", worst_sum,
                  worst_rt, secs);
    report(1, pass, buf);
}

void criterion2() {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(202);
    int checked = 0;
    bool all_exact = true;
    while (checked < 200) {
        int L = static_cast<int>(rng.uniform_int(1, 6));
        std::vector<QComplex> eps;
        bool dup = false;
        for (int i = 0; i < L; ++i) {
            QComplex e = rng.qcomplex(20, 9);
            for (auto& x : eps)
                if (x == e) dup = true;
            eps.push_back(e);
        }
        if (dup) continue;
        ++checked;
        auto sm = sym_matrix(eps);
        if (sym_det(sm) != vandermonde_product(eps)) all_exact = false;
        auto inv = sym_inverse(sm);
        for (int r = 0; r < L && all_exact; ++r)
            for (int c = 0; c < L; ++c) {
                QComplex acc(0, 0);
                for (int k = 0; k < L; ++k) acc += sm.m[r][k] * inv[k][c];
                if (acc != (r == c ? QComplex(1, 0) : QComplex(0, 0))) all_exact = false;
            }
        if (!all_exact) break;
    }
    double secs = seconds_since(t0);
    bool pass = checked == 200 && all_exact && secs < 30.0;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "200 rational eps vectors, exact, %.1f s", secs);
    report(2, pass, buf);
}

void criterion3() {
    bool pass = false;
    std::string detail;
    try {
        auto nf = d6_target<QComplex>();
        auto vr = validate_noded_function(nf);
        auto dec = reduced_decoration(nf, derive_convention(nf.structure));
        std::map<int, QComplex> idx;
        for (auto& [pid, v] : dec.indices) idx[pid] = v;
        bool blocks_ok =
            dec.principal_blocks.size() == 2 &&
            dec.principal_blocks[0].second ==
                std::vector<QComplex>{QComplex(-1, 0), QComplex(-1, 0), QComplex(1, 0)} &&
            dec.principal_blocks[1].second ==
                std::vector<QComplex>{QComplex(-1, 0), QComplex(1, 0), QComplex(1, 0)};
        bool idx_ok = idx.at(1) == QComplex(2, 0) && idx.at(4) == QComplex(2, 0);
        bool sums_ok =
            idx.at(1) + dec.principal_blocks[0].second[0] == QComplex(1, 0) &&
            idx.at(4) + dec.principal_blocks[1].second[0] == QComplex(1, 0);
        pass = vr.ok() && blocks_ok && idx_ok && sums_ok;
        detail = "exact blocks (-1, -1, 1) and (-1, 1, 1), index 2, sums 1";
    } catch (const Error& e) {
        detail = e.what();
    }
    report(3, pass, detail);
}

void criterion4() {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(404);
    int done = 0, passed = 0;
    double worst = 0.0;
    std::string fail_note;
    while (done < 20) {
        // one or two singular punctures of level 2..4 plus simple ones
        int bouquets = static_cast<int>(rng.uniform_int(1, 2));
        std::vector<int> levels;
        int total_level = 0;
        for (int b = 0; b < bouquets; ++b) {
            int L = static_cast<int>(rng.uniform_int(2, 4));
            levels.push_back(L);
            total_level += L;
        }
        int simple = static_cast<int>(rng.uniform_int(std::max(1, 3 - bouquets), 4));
        bool with_unfixed = rng.uniform() < 0.3;

        std::vector<ComponentPunctureSpec<Complex>> specs;
        std::vector<Complex> positions;
        auto fresh_pos = [&]() {
            while (true) {
                Complex p = rng.complex_box(2.0, 256);
                bool clear = true;
                for (auto& q : positions)
                    if (FieldOps<Complex>::mag(p - q) < 0.5) clear = false;
                if (clear) {
                    positions.push_back(p);
                    return p;
                }
            }
        };
        Complex c1_sum(256);
        for (int b = 0; b < bouquets; ++b) {
            std::vector<Complex> cs;
            for (int l = 0; l < levels[b]; ++l) {
                Complex c = rng.complex_box(1.0, 256);
                // keep the last entry honestly nonzero
                if (l == levels[b] - 1)
                    c += Complex(c.to_std().real() < 0 ? -0.5 : 0.5, 0.0, 256);
                cs.push_back(c);
            }
            c1_sum += cs[0];
            specs.push_back({CPoint(fresh_pos()), cs});
        }
        for (int s = 0; s < simple; ++s) {
            Complex lam = rng.complex_box(1.0, 256);
            if (s == simple - 1) {
                lam = FieldOps<Complex>::from_long(1, lam) - c1_sum;  // close the index formula
                if (FieldOps<Complex>::mag(lam) < 1e-3) break;
            } else {
                c1_sum += lam;
            }
            specs.push_back({CPoint(fresh_pos()), {lam}});
        }
        if (specs.size() != static_cast<size_t>(bouquets + simple)) continue;
        if (with_unfixed) specs.push_back({CPoint(fresh_pos()), {}});

        NodedFunction<Complex> nf;
        try {
            nf = build_single_component_function(specs);
            if (!validate_noded_function(nf).ok()) continue;
        } catch (const Error&) {
            continue;
        }
        ++done;
        try {
            auto fams = reopen_family(nf);
            auto rep = classify_and_assemble(fams.at(0));
            if (!rep.assembled) {
                fail_note = rep.failure;
                continue;
            }
            if (!structures_equal(*rep.limit, nf, 1e-6)) {
                fail_note = "structures differ";
                continue;
            }
            auto da = reduced_decoration(*rep.limit, derive_convention(rep.limit->structure));
            auto db = reduced_decoration(nf, derive_convention(nf.structure));
            double dist = decoration_distance(da, db);
            worst = std::max(worst, dist);
            if (dist < 1e-6) ++passed;
        } catch (const Error& e) {
            fail_note = e.what();
        }
    }
    double secs = seconds_since(t0);
    bool pass = done == 20 && passed == 20 && secs < 300.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%d/%d round trips, worst residual %.2e, %.1f s%s%s",
                  passed, done, worst, secs, fail_note.empty() ? "" : "; last failure: ",
                  fail_note.c_str());
    report(4, pass, buf);
}

void criterion5() {
    bool pass = false;
    std::string detail;
    try {
        auto t = default_d5_targets();
        auto v = verify_d5(t);  // k = 16 * 2^t, t = 0..6, reaching 1024
        bool shape = v.report.assembled && v.report.ordinary_components == 2 &&
                     v.report.crushed_components == 1 &&
                     v.report.bouquet_levels == std::vector<int>{2} && v.structure_matched;
        size_t n = v.trace.size();
        bool decreasing = true;
        for (size_t i = n - 4; i + 1 < n; ++i)
            if (!(v.trace[i + 1].second < v.trace[i].second)) decreasing = false;
        pass = shape && decreasing && v.trace.back().second < 1e-2;
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "stratum %s, residual %.2e at k=%ld, tail %sdecreasing",
                      shape ? "matched" : "MISSED", v.trace.back().second,
                      v.trace.back().first, decreasing ? "" : "NOT ");
        detail = buf;
    } catch (const Error& e) {
        detail = e.what();
    }
    report(5, pass, detail);
}

void criterion6() {
    auto t0 = std::chrono::steady_clock::now();
    SweepConfig cfg;  // defaults: 64 starts, 6 shrinking stages
    auto d6 = d6_sweep(cfg);
    SweepConfig c5 = cfg;
    c5.d5_control = true;
    auto d5 = d6_sweep(c5);
    double secs = seconds_since(t0);
    bool pass = !d6.partial && !d5.partial && d6.min_residual >= 0.1 &&
                d5.min_residual < 1e-2 && secs < 900.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "d6 min %.3f (>= 0.1), d5 control min %.2e (< 1e-2), %.1f s; "
                  "evidence only, not a proof",
                  d6.min_residual, d5.min_residual, secs);
    report(6, pass, buf);
}

void criterion7() {
    auto rep = d6_pinned_check();
    bool pass = rep.min_residual >= 0.1;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "least-squares infeasibility >= %.3f over %zu grid points",
                  rep.min_residual, rep.grid.size());
    report(7, pass, buf);
}

// --------------------------------------------------------------------------
// criterion 8: a 30-case validator table

struct Case {
    const char* name;
    bool valid;
    MarkedCrush<Complex> mc;
};

MarkedCrush<Complex> base_chain() {
    // two ordinary 3-punctured components through a crushed 4-punctured one
    MarkedCrush<Complex> mc;
    auto& s = mc.crush.sphere;
    for (int ci = 0; ci < 3; ++ci) {
        SphereComponent<Complex> c;
        c.id = ci;
        int count = ci == 2 ? 4 : 3;
        for (int k = 0; k < count; ++k) {
            CPoint pos = k == 0   ? CPoint(C(0))
                         : k == 1 ? CPoint(C(1))
                         : k == 2 ? CPoint::infinity()
                                  : CPoint(C(0.5, 0.5));
            c.punctures.push_back({ci * 4 + k, pos});
        }
        s.components.push_back(c);
    }
    s.nodes.push_back({2, 8});
    s.nodes.push_back({6, 9});
    s.level_n = 6;
    mc.crush.ordinary_ids = {0, 1};
    mc.marking.parts = {{1}, {2}, {3}, {4}, {5, 6}};
    return mc;
}

MarkedCrush<Complex> plain4() {
    MarkedCrush<Complex> mc;
    SphereComponent<Complex> c;
    c.id = 0;
    c.punctures = {{0, CPoint(C(0))},
                   {1, CPoint(C(1))},
                   {2, CPoint::infinity()},
                   {3, CPoint(C(0, 1))}};
    mc.crush.sphere.components.push_back(c);
    mc.crush.sphere.level_n = 4;
    mc.crush.ordinary_ids = {0};
    mc.marking.parts = {{1}, {2}, {3}, {4}};
    return mc;
}

void criterion8() {
    std::vector<Case> cases;
    auto add = [&](const char* name, bool valid, MarkedCrush<Complex> mc) {
        cases.push_back({name, valid, std::move(mc)});
    };

    add("plain 3-punctured sphere", true, [] {
        auto mc = plain4();
        mc.crush.sphere.components[0].punctures.pop_back();
        mc.crush.sphere.level_n = 3;
        mc.marking.parts = {{1}, {2}, {3}};
        return mc;
    }());
    add("plain 4-punctured sphere", true, plain4());
    add("chain with level-2 bouquet", true, base_chain());
    add("permuted marking labels", true, [] {
        auto mc = base_chain();
        mc.marking.parts = {{6}, {2}, {3}, {4}, {1, 5}};
        return mc;
    }());
    add("three ordinary components, retained nodes", true, [] {
        auto mc = base_chain();
        mc.crush.ordinary_ids = {0, 1, 2};
        mc.crush.retained_nodes = {0, 1};
        mc.marking.parts = {{1}, {2}, {3}, {4}, {5}, {6}};
        return mc;
    }());
    add("level-3 bouquet through a 5-punctured middle", true, [] {
        auto mc = base_chain();
        mc.crush.sphere.components[2].punctures.push_back({12, CPoint(C(0.25, -0.5))});
        mc.crush.sphere.level_n = 7;
        mc.marking.parts = {{1}, {2}, {3}, {4}, {5, 6, 7}};
        return mc;
    }());
    add("embed-style phantom (level 2)", true, [] {
        MarkedCrush<Complex> mc;
        auto& s = mc.crush.sphere;
        SphereComponent<Complex> main;
        main.id = 0;
        main.punctures = {{0, CPoint(C(0))}, {1, CPoint(C(1))}, {2, CPoint::infinity()}};
        SphereComponent<Complex> ph;
        ph.id = 1;
        ph.punctures = {{3, CPoint::infinity()}, {4, CPoint(C(0))}, {5, CPoint(C(1))}};
        s.components = {main, ph};
        s.nodes.push_back({0, 3});
        s.level_n = 4;
        mc.crush.ordinary_ids = {0};
        mc.marking.parts = {{3}, {4}, {1, 2}};
        return mc;
    }());
    add("two bouquets on one component", true, [] {
        MarkedCrush<Complex> mc;
        auto& s = mc.crush.sphere;
        SphereComponent<Complex> main;
        main.id = 0;
        main.punctures = {{0, CPoint(C(0))},
                          {1, CPoint(C(1))},
                          {2, CPoint::infinity()},
                          {3, CPoint(C(2))}};
        SphereComponent<Complex> p1, p2;
        p1.id = 1;
        p1.punctures = {{4, CPoint::infinity()}, {5, CPoint(C(0))}, {6, CPoint(C(1))}};
        p2.id = 2;
        p2.punctures = {{7, CPoint::infinity()}, {8, CPoint(C(0))}, {9, CPoint(C(1))}};
        s.components = {main, p1, p2};
        s.nodes = {{0, 4}, {1, 7}};
        s.level_n = 6;
        mc.crush.ordinary_ids = {0};
        mc.marking.parts = {{5}, {6}, {1, 2}, {3, 4}};
        return mc;
    }());

    // counting violations
    add("claimed n off by one (sum n_m != 2J+n)", false, [] {
        auto mc = base_chain();
        mc.crush.sphere.level_n = 5;
        mc.marking.parts = {{1}, {2}, {3}, {4, 5}};
        return mc;
    }());
    add("extra node breaks J = M-1 (and the tree)", false, [] {
        auto mc = base_chain();
        mc.crush.sphere.nodes.push_back({3, 10});
        mc.crush.sphere.level_n = 4;
        mc.marking.parts = {{1}, {2}, {3, 4}};
        return mc;
    }());
    add("J exceeds n-3", false, [] {
        // two 3-punctured spheres, one node, n = 4: J = 1 > n-3 = 1? no;
        // shrink to n = 3 by a 3+2 split instead
        MarkedCrush<Complex> mc;
        auto& s = mc.crush.sphere;
        SphereComponent<Complex> a, b;
        a.id = 0;
        a.punctures = {{0, CPoint(C(0))}, {1, CPoint(C(1))}, {2, CPoint::infinity()}};
        b.id = 1;
        b.punctures = {{3, CPoint(C(0))}, {4, CPoint(C(1))}, {5, CPoint::infinity()}};
        s.components = {a, b};
        s.nodes = {{2, 3}};
        s.level_n = 4;  // 6 = 2*1 + 4 holds, J = 1 = M-1, n-3 = 1: valid baseline
        mc.crush.ordinary_ids = {0, 1};
        mc.crush.retained_nodes = {0};
        mc.marking.parts = {{1}, {2}, {3}, {4}};
        // push it over: drop one puncture from b
        s.components[1].punctures.pop_back();
        s.level_n = 3;
        mc.marking.parts = {{1}, {2}, {3}};
        return mc;
    }());
    add("component with two punctures", false, [] {
        auto mc = plain4();
        mc.crush.sphere.components[0].punctures.resize(2);
        mc.crush.sphere.level_n = 2;
        mc.marking.parts = {{1}, {2}};
        return mc;
    }());
    add("coincident punctures", false, [] {
        auto mc = plain4();
        mc.crush.sphere.components[0].punctures[3].pos = CPoint(C(1));
        return mc;
    }());
    add("node inside one component", false, [] {
        auto mc = plain4();
        mc.crush.sphere.nodes.push_back({0, 1});
        mc.crush.sphere.level_n = 2;
        mc.marking.parts = {{1}, {2}};
        return mc;
    }());
    add("puncture in two nodes", false, [] {
        auto mc = base_chain();
        mc.crush.sphere.nodes.push_back({2, 10});
        mc.crush.sphere.level_n = 4;
        mc.marking.parts = {{1}, {2}, {3, 4}};
        return mc;
    }());
    add("disconnected realization graph", false, [] {
        auto mc = base_chain();
        mc.crush.sphere.nodes.clear();
        mc.crush.sphere.level_n = 10;
        mc.marking.parts = std::vector<std::vector<int>>(10);
        for (int i = 0; i < 10; ++i) mc.marking.parts[i] = {i + 1};
        return mc;
    }());
    add("duplicate puncture ids", false, [] {
        auto mc = plain4();
        mc.crush.sphere.components[0].punctures[3].id = 0;
        return mc;
    }());
    add("node references unknown puncture", false, [] {
        auto mc = plain4();
        mc.crush.sphere.nodes.push_back({0, 77});
        return mc;
    }());

    // crush violations
    add("no ordinary components", false, [] {
        auto mc = plain4();
        mc.crush.ordinary_ids.clear();
        return mc;
    }());
    add("crushed component with one non-nodal puncture", false, [] {
        auto mc = base_chain();
        mc.crush.sphere.components[2].punctures.pop_back();
        mc.crush.sphere.level_n = 5;
        mc.marking.parts = {{1}, {2}, {3}, {4}, {5}};
        return mc;
    }());
    add("node between two crushed components", false, [] {
        auto mc = base_chain();
        mc.crush.ordinary_ids = {0};  // component 1 now crushed too
        mc.marking.parts = {{1}, {2}, {3, 4, 5, 6}};
        return mc;
    }());
    add("ordinary-ordinary node not retained", false, [] {
        auto mc = base_chain();
        mc.crush.ordinary_ids = {0, 1, 2};
        mc.crush.retained_nodes = {0};
        mc.marking.parts = {{1}, {2}, {3}, {4}, {5}, {6}};
        return mc;
    }());
    add("retained node touching a crushed component", false, [] {
        auto mc = base_chain();
        mc.crush.retained_nodes = {0};
        return mc;
    }());
    add("unknown ordinary id", false, [] {
        auto mc = plain4();
        mc.crush.ordinary_ids = {7};
        return mc;
    }());

    // marking violations
    add("marking with too few parts", false, [] {
        auto mc = base_chain();
        mc.marking.parts = {{1}, {2}, {3}, {4, 5, 6}};
        return mc;
    }());
    add("bouquet part of the wrong size", false, [] {
        auto mc = base_chain();
        mc.marking.parts = {{1}, {2}, {3}, {4, 5}, {6}};
        return mc;
    }());
    add("label used twice", false, [] {
        auto mc = base_chain();
        mc.marking.parts = {{1}, {1}, {3}, {4}, {5, 6}};
        return mc;
    }());
    add("label out of range", false, [] {
        auto mc = base_chain();
        mc.marking.parts = {{1}, {2}, {3}, {9}, {5, 6}};
        return mc;
    }());
    add("missing label", false, [] {
        auto mc = base_chain();
        mc.marking.parts = {{1}, {2}, {3}, {4}, {5, 5}};
        return mc;
    }());
    add("empty marking", false, [] {
        auto mc = base_chain();
        mc.marking.parts.clear();
        return mc;
    }());
    add("singleton marking on a bouquet sphere (valid twin)", true, [] {
        auto mc = base_chain();
        mc.marking.parts = {{2}, {1}, {6}, {3}, {4, 5}};
        return mc;
    }());

    int wrong = 0;
    for (auto& c : cases) {
        bool got = validate_marking(c.mc).ok();
        if (got != c.valid) {
            ++wrong;
            std::printf("  misclassified: %s (expected %s)\n", c.name,
                        c.valid ? "valid" : "invalid");
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%zu cases, %d misclassified", cases.size(), wrong);
    report(8, cases.size() >= 30 && wrong == 0, buf);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (failures == 0)
        std::printf("acceptance: all criteria PASS\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
