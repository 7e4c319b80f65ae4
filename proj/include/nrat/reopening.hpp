#pragma once

// Reopening of singular punctures: split a level-L puncture into L nearby
// simple fixed points whose indices solve the elementary-symmetric-matrix
// system, so that the emitted generic maps converge back to the target
// noded function.

#include "nrat/degeneration.hpp"
#include "nrat/rng.hpp"

namespace nrat {

// M[j][v] = elementary symmetric function of degree j of the eps with
// eps_v omitted (rows indexed 0..L-1, row 0 all ones).
template <class K>
struct SymMatrix {
    int L = 0;
    std::vector<K> eps;
    std::vector<std::vector<K>> m;
};

template <class K>
SymMatrix<K> sym_matrix(const std::vector<K>& eps) {
    int L = static_cast<int>(eps.size());
    if (L < 1) throw Error(ErrorCode::validation, "sym_matrix: empty epsilon vector");
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j)
            if ((eps[i] - eps[j]).is_zero())
                throw Error(ErrorCode::validation, "sym_matrix: repeated epsilon (singular)");
    K one = FieldOps<K>::one_like(eps[0]);
    K zero = FieldOps<K>::zero_like(eps[0]);
    // full elementary symmetric functions e_0..e_L
    std::vector<K> e(static_cast<size_t>(L) + 1, zero);
    e[0] = one;
    for (int v = 0; v < L; ++v)
        for (int j = v + 1; j >= 1; --j) e[j] += eps[v] * e[j - 1];
    SymMatrix<K> out;
    out.L = L;
    out.eps = eps;
    out.m.assign(L, std::vector<K>(L, zero));
    for (int v = 0; v < L; ++v) {
        // deflate eps_v: sigma^{(j)}_v = e_j - eps_v * sigma^{(j-1)}_v
        K prev = one;
        out.m[0][v] = one;
        for (int j = 1; j < L; ++j) {
            K cur = e[j] - eps[v] * prev;
            out.m[j][v] = cur;
            prev = cur;
        }
    }
    return out;
}

// Determinant by Gaussian elimination (exact over an exact field).
template <class K>
K sym_det(const SymMatrix<K>& sm) {
    auto a = sm.m;
    int n = sm.L;
    K det = FieldOps<K>::one_like(a[0][0]);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        double best = 0.0;
        for (int r = col; r < n; ++r) {
            double m = FieldOps<K>::mag(a[r][col]);
            if (!a[r][col].is_zero() && m > best) {
                best = m;
                piv = r;
            }
        }
        if (piv < 0) return FieldOps<K>::zero_like(det);
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det = det * a[col][col];
        for (int r = col + 1; r < n; ++r) {
            K f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return det;
}

template <class K>
K vandermonde_product(const std::vector<K>& eps) {
    K p = FieldOps<K>::one_like(eps[0]);
    for (size_t mu = 0; mu < eps.size(); ++mu)
        for (size_t nu = mu + 1; nu < eps.size(); ++nu) p = p * (eps[mu] - eps[nu]);
    return p;
}

// Closed-form inverse: (M^{-1})[k][j] = (-1)^j eps_k^{L-1-j} / Delta_k
// with Delta_k = prod_{v != k}(eps_k - eps_v)   (0-based j).
template <class K>
std::vector<std::vector<K>> sym_inverse(const SymMatrix<K>& sm) {
    int L = sm.L;
    std::vector<std::vector<K>> inv(L, std::vector<K>(L, FieldOps<K>::zero_like(sm.eps[0])));
    for (int k = 0; k < L; ++k) {
        K delta = FieldOps<K>::one_like(sm.eps[0]);
        for (int v = 0; v < L; ++v)
            if (v != k) delta = delta * (sm.eps[k] - sm.eps[v]);
        if (delta.is_zero()) throw Error(ErrorCode::validation, "sym_inverse: singular matrix");
        for (int j = 0; j < L; ++j) {
            K p = FieldOps<K>::one_like(sm.eps[0]);
            for (int e = 0; e < L - 1 - j; ++e) p = p * sm.eps[k];
            if (j % 2 == 1) p = -p;
            inv[k][j] = p / delta;
        }
    }
    return inv;
}

// Solve M * lambda = a for the signed target vector a_v = (-1)^{v-1} A_{L-v}.
template <class K>
std::vector<K> solve_lambdas(const std::vector<K>& eps, const std::vector<K>& a_targets) {
    if (eps.size() != a_targets.size())
        throw Error(ErrorCode::validation, "solve_lambdas: size mismatch");
    auto sm = sym_matrix(eps);
    auto inv = sym_inverse(sm);
    int L = sm.L;
    std::vector<K> lam(L, FieldOps<K>::zero_like(eps[0]));
    for (int k = 0; k < L; ++k)
        for (int j = 0; j < L; ++j) lam[k] += inv[k][j] * a_targets[j];
    return lam;
}

// Signed target vector from principal-part coefficients: a_v = (-1)^(v-1) c_v.
template <class K>
std::vector<K> signed_targets(const std::vector<K>& c) {
    std::vector<K> a = c;
    for (size_t v = 1; v < a.size(); v += 2) a[v] = -a[v];
    return a;
}

// ---------------------------------------------------------------------------
// Plans and families

struct ReopeningPlan {
    struct Entry {
        int puncture_id;
        int level;
        std::vector<Complex> targets;  // c_1..c_L in the normalized chart
        Mobius<Complex> chart;         // (p,u,v) -> (0,1,inf)
    };
    std::map<int, std::vector<Entry>> per_component;  // ordinary component id -> entries
    double ratio = 0.5;
    int steps = 14;
    int base_shift = 6;  // epsilon_v(t) = v * ratio^(t + base_shift)
    uint64_t seed = 1;
    Prec prec = kDefaultPrec;

    Complex eps_of(int v, int t) const {
        double e = (v + 1) * std::pow(ratio, t + base_shift);
        return Complex(e, 0.0, prec);
    }
};

// Move every ordinary component that has a puncture at infinity into an
// all-finite chart via z -> 1/(z - s); the dynamical structure is unchanged.
inline NodedFunction<Complex> with_finite_charts(const NodedFunction<Complex>& nf,
                                                 Prec prec = kDefaultPrec) {
    std::map<int, Mobius<Complex>> shifts;
    for (auto& comp : nf.structure.crush.sphere.components) {
        bool is_ord = std::find(nf.structure.crush.ordinary_ids.begin(),
                                nf.structure.crush.ordinary_ids.end(),
                                comp.id) != nf.structure.crush.ordinary_ids.end();
        if (!is_ord) continue;
        bool has_inf = false;
        for (auto& p : comp.punctures)
            if (p.pos.is_inf()) has_inf = true;
        if (!has_inf) continue;
        Complex s(0.31, 0.47, prec);
        for (int guard = 0; guard < 64; ++guard) {
            bool clash = false;
            for (auto& p : comp.punctures)
                if (!p.pos.is_inf() && FieldOps<Complex>::mag(p.pos.value() - s) < 1e-3)
                    clash = true;
            if (!clash) break;
            s += Complex(0.13, 0.29, prec);
        }
        Complex one = FieldOps<Complex>::one_like(s), zero = FieldOps<Complex>::zero_like(s);
        shifts.emplace(comp.id, Mobius<Complex>{zero, one, one, -s});
    }
    if (shifts.empty()) return nf;
    return transformed(nf, shifts);
}

// Plan for a valid noded function under the derived convention.
inline ReopeningPlan make_reopening_plan(const NodedFunction<Complex>& nf,
                                         std::optional<ValidateOpts> opts = std::nullopt) {
    ReopeningPlan plan;
    auto conv = derive_convention(nf.structure);
    auto dec = reduced_decoration(nf, conv, opts);
    const auto& pc = nf.structure.crush;
    CrushData cd = crush_data(pc);
    auto loc = detail::puncture_locator(pc.sphere);
    auto pos_of = [&](int pid) {
        return pc.sphere.components[loc[pid].first].punctures[loc[pid].second].pos;
    };
    for (auto& [pid, block] : dec.principal_blocks) {
        int cid = pc.sphere.components[loc[pid].first].id;
        auto [u, v] = conv.uv.at(pid);
        ReopeningPlan::Entry e;
        e.puncture_id = pid;
        e.level = static_cast<int>(block.size());
        e.targets = block;
        e.chart = mobius_from_triple(pos_of(pid), pos_of(u), pos_of(v));
        plan.per_component[cid].push_back(std::move(e));
    }
    return plan;
}

// The reopened fixed-point data of one ordinary component at step t.
// Entries follow the marking: the j-th entry tracks label j+1.  Simple
// punctures keep their indices, each singular puncture splits into `level`
// points with indices solved from the matrix system, unfixed marked
// punctures become fixed points with indices shrinking to 0, and nodal
// fixed points are appended after all labelled entries.
inline FixedPointData<Complex> build_reopened_map(const NodedFunction<Complex>& nf,
                                                  int component_id, const ReopeningPlan& plan,
                                                  int t,
                                                  std::optional<ValidateOpts> opts = std::nullopt) {
    const auto& pc = nf.structure.crush;
    CrushData cd = crush_data(pc);
    auto xs = x_enumeration(pc, cd);
    auto loc = detail::puncture_locator(pc.sphere);
    const SphereComponent<Complex>* comp = nullptr;
    for (auto& c : pc.sphere.components)
        if (c.id == component_id) comp = &c;
    if (!comp || !nf.maps.count(component_id))
        throw Error(ErrorCode::validation, "build_reopened_map: unknown ordinary component");
    const RatMap<Complex>& f = nf.maps.at(component_id);

    // labels per puncture id (bouquet punctures share their part's labels)
    std::map<int, std::vector<int>> labels_of;
    for (size_t i = 0; i < xs.size(); ++i) {
        std::vector<int> labs = nf.structure.marking.parts[i];
        std::sort(labs.begin(), labs.end());
        if (xs[i].is_bouquet) {
            for (int pid : cd.bouquets[xs[i].bouquet_index].punctures) labels_of[pid] = labs;
        } else {
            labels_of[xs[i].puncture_id] = labs;
        }
    }
    std::map<int, const ReopeningPlan::Entry*> plan_of;
    auto it = plan.per_component.find(component_id);
    if (it != plan.per_component.end())
        for (auto& e : it->second) plan_of[e.puncture_id] = &e;

    Prec prec = plan.prec;
    ValidateOpts o = opts ? *opts : default_validate_opts(f.den.coeffs()[0]);
    double zero_tol = std::pow(2.0, -static_cast<double>(prec) / 2);
    std::map<int, std::pair<Complex, Complex>> labelled;  // label -> (point, index)
    std::vector<std::pair<Complex, Complex>> nodal_entries;
    Complex vanish_sum(prec);
    int vanish_count = 0;
    Rng rng(plan.seed ^ static_cast<uint64_t>(component_id * 2654435761u));

    for (auto& p : comp->punctures) {
        auto plan_it = plan_of.find(p.id);
        if (plan_it != plan_of.end()) {
            const auto& entry = *plan_it->second;
            std::vector<Complex> eps;
            for (int v = 0; v < entry.level; ++v) eps.push_back(plan.eps_of(v, t));
            std::vector<Complex> a = signed_targets(entry.targets);
            std::vector<Complex> lam;
            double perturb = std::pow(10.0, -static_cast<double>(prec) * 0.30103 / 2);
            for (int attempt = 0;; ++attempt) {
                lam = solve_lambdas(eps, a);
                bool ok = true;
                for (auto& l : lam)
                    if (FieldOps<Complex>::mag(l) <= zero_tol) ok = false;
                if (ok) break;
                if (attempt >= 8)
                    throw Error(ErrorCode::validation,
                                "build_reopened_map: could not avoid zero indices");
                // nudge the higher targets; a_1 stays put so the index sum is kept
                for (size_t j = 1; j < a.size(); ++j)
                    a[j] += Complex(perturb * (rng.uniform() - 0.5),
                                    perturb * (rng.uniform() - 0.5), prec);
            }
            Mobius<Complex> inv = entry.chart.inverse();
            const auto& labs = labels_of.at(p.id);
            if (static_cast<int>(labs.size()) != entry.level)
                throw Error(ErrorCode::internal, "build_reopened_map: label/level mismatch");
            for (int v = 0; v < entry.level; ++v) {
                auto w = inv.apply(CPoint(eps[v]));
                if (w.is_inf())
                    throw Error(ErrorCode::internal, "build_reopened_map: reopened point at inf");
                labelled[labs[v]] = {w.value(), lam[v]};
            }
            continue;
        }
        int ord = fixed_point_order(f, p.pos, o.rel_tol);
        bool marked = labels_of.count(p.id) > 0;
        if (ord == 0 && !marked) continue;  // unfixed nodal puncture: nothing to emit
        if (p.pos.is_inf())
            throw Error(ErrorCode::unsupported,
                        "build_reopened_map: fixed puncture at infinity; shift the chart first");
        if (ord >= 1) {
            Complex idx = dynamical_index(f, p.pos, o.rel_tol);
            if (marked) labelled[labels_of.at(p.id)[0]] = {p.pos.value(), idx};
            else nodal_entries.emplace_back(p.pos.value(), idx);
        } else {
            // a marked but unfixed puncture: give it a fixed point whose
            // index vanishes along the schedule
            double d = std::pow(plan.ratio, t + plan.base_shift + 2 + 2 * vanish_count);
            Complex idx(d, 0.0, prec);
            labelled[labels_of.at(p.id)[0]] = {p.pos.value(), idx};
            vanish_sum += idx;
            ++vanish_count;
        }
    }
    FixedPointData<Complex> out;
    for (auto& [lab, e] : labelled) out.entries.push_back(e);
    for (auto& e : nodal_entries) out.entries.push_back(e);
    if (out.entries.empty())
        throw Error(ErrorCode::validation, "build_reopened_map: component carries no data");
    if (vanish_count > 0) {
        // take the injected mass back from the largest honest index
        size_t arg = 0;
        double best = -1.0;
        for (size_t i = 0; i < out.entries.size(); ++i) {
            double m = FieldOps<Complex>::mag(out.entries[i].second);
            if (m > best) {
                best = m;
                arg = i;
            }
        }
        out.entries[arg].second -= vanish_sum;
    }
    return out;
}

// Families per ordinary component, ready for degeneration.  Requires the
// realization to be connected (every bouquet a single puncture); opening
// non-singular nodes is out of scope.
inline std::map<int, std::vector<FamilySample>> reopen_family(
    const NodedFunction<Complex>& nf, const ReopeningPlan& plan_in = ReopeningPlan{},
    std::optional<ValidateOpts> opts = std::nullopt) {
    auto vr = validate_noded_function(nf, opts);
    if (!vr.ok())
        throw Error(ErrorCode::validation, "reopen_family: " + vr.violations.front());
    auto rg = reduced_realization(nf.structure.crush);
    if (rg.star_component_count != 1)
        throw Error(ErrorCode::unsupported,
                    "reopen_family: disconnected realization; reopening non-singular nodes "
                    "is not supported");
    NodedFunction<Complex> work = with_finite_charts(nf, plan_in.prec);
    ReopeningPlan plan = make_reopening_plan(work, opts);
    plan.ratio = plan_in.ratio;
    plan.steps = plan_in.steps;
    plan.base_shift = plan_in.base_shift;
    plan.seed = plan_in.seed;
    plan.prec = plan_in.prec;

    std::map<int, std::vector<FamilySample>> out;
    for (int cid : work.structure.crush.ordinary_ids) {
        std::vector<FamilySample> fam;
        for (int t = 0; t < plan.steps; ++t) {
            FamilySample s;
            s.k = 1L << t;
            s.data = build_reopened_map(work, cid, plan, t, opts);
            fam.push_back(std::move(s));
        }
        out.emplace(cid, std::move(fam));
    }
    return out;
}

}  // namespace nrat
