#pragma once

// Rational functions with nodes: per-ordinary-component rational maps
// constrained to fix only punctures (multiplicity bounded by the level),
// with node-pair indices summing to 1; reduced index decorations under a
// marking-derived normalization convention; structural equality through
// canonical forms.

#include "nrat/sphere.hpp"
#include "nrat/fixpoint.hpp"

#include <map>
#include <optional>

namespace nrat {

template <class K>
struct NodedFunction {
    MarkedCrush<K> structure;
    std::map<int, RatMap<K>> maps;  // keyed by ordinary component id
};

// The ordered pair (u, v) of punctures sent to (1, infinity) when a
// singular puncture is normalized to 0.
struct NormalizationConvention {
    std::map<int, std::pair<int, int>> uv;  // singular puncture id -> (u, v)
};

// Default convention: take the two punctures on the same component that
// follow p in the cyclic marking-key order.
template <class K>
NormalizationConvention derive_convention(const MarkedCrush<K>& mc) {
    CrushData cd = crush_data(mc.crush);
    auto xs = x_enumeration(mc.crush, cd);
    MarkingKeys mk = marking_keys(mc, cd, xs);
    auto loc = detail::puncture_locator(mc.crush.sphere);
    NormalizationConvention conv;
    for (auto& b : cd.bouquets) {
        for (int pid : b.punctures) {
            const auto& comp = mc.crush.sphere.components[loc[pid].first];
            std::vector<int> order;
            for (auto& p : comp.punctures) order.push_back(p.id);
            std::sort(order.begin(), order.end(),
                      [&](int a, int bb) { return mk.key[a] < mk.key[bb]; });
            size_t pos = std::find(order.begin(), order.end(), pid) - order.begin();
            int u = order[(pos + 1) % order.size()];
            int v = order[(pos + 2) % order.size()];
            conv.uv[pid] = {u, v};
        }
    }
    return conv;
}

namespace detail {

template <class K>
std::map<int, int> level_of_puncture(const PartialCrush<K>& pc, const CrushData& cd) {
    std::map<int, int> lvl;
    std::set<int> ordinary(pc.ordinary_ids.begin(), pc.ordinary_ids.end());
    for (auto& c : pc.sphere.components) {
        if (!ordinary.count(c.id)) continue;
        for (auto& p : c.punctures) lvl[p.id] = 1;
    }
    for (auto& b : cd.bouquets)
        for (int pid : b.punctures) lvl[pid] = b.level;
    return lvl;
}

}  // namespace detail

struct ValidateOpts {
    double rel_tol;  // order-of-vanishing detection, relative
    double sum_tol;  // node index-sum check, absolute
    ValidateOpts(double rel, double sum) : rel_tol(rel), sum_tol(sum) {}
};

template <class K>
ValidateOpts default_validate_opts(const K& like) {
    double t = default_rel_tol(like);
    return ValidateOpts(t, FieldOps<K>::exact ? 0.0 : t);
}

template <class K>
ValidationReport validate_noded_function(const NodedFunction<K>& nf,
                                         std::optional<ValidateOpts> opts = std::nullopt) {
    ValidationReport r = validate_marking(nf.structure);
    if (!r.ok()) return r;
    const auto& pc = nf.structure.crush;
    CrushData cd = crush_data(pc);
    auto lvl = detail::level_of_puncture(pc, cd);
    auto loc = detail::puncture_locator(pc.sphere);
    std::set<int> ordinary(pc.ordinary_ids.begin(), pc.ordinary_ids.end());

    for (int cid : pc.ordinary_ids)
        if (!nf.maps.count(cid))
            r.add("ordinary component " + std::to_string(cid) + " has no map");
    for (auto& [cid, f] : nf.maps) {
        (void)f;
        if (!ordinary.count(cid))
            r.add("map attached to non-ordinary component " + std::to_string(cid));
    }
    if (!r.ok()) return r;

    ValidateOpts o = opts ? *opts
                          : default_validate_opts(nf.maps.begin()->second.den.coeffs()[0]);

    std::map<int, int> order_at;  // puncture id -> multiplicity of the fixed point
    for (auto& c : pc.sphere.components) {
        if (!ordinary.count(c.id)) continue;
        const RatMap<K>& f = nf.maps.at(c.id);
        if (f.is_identity(o.rel_tol)) {
            r.add("component " + std::to_string(c.id) + ": map is the identity");
            continue;
        }
        int d = f.degree();
        int total = 0;
        for (auto& p : c.punctures) {
            int m = fixed_point_order(f, p.pos, o.rel_tol);
            order_at[p.id] = m;
            total += m;
            if (m > lvl[p.id])
                r.add("component " + std::to_string(c.id) + ": puncture " +
                      std::to_string(p.id) + " has multiplicity " + std::to_string(m) +
                      " above its level " + std::to_string(lvl[p.id]));
        }
        if (total != d + 1)
            r.add("component " + std::to_string(c.id) + ": only " + std::to_string(total) +
                  " of " + std::to_string(d + 1) +
                  " fixed points (with multiplicity) sit at punctures");
    }
    // Index formula at nodes: each retained node pair consists of simple
    // or unfixed punctures whose indices sum to 1.
    for (int ni : pc.retained_nodes) {
        auto& nd = pc.sphere.nodes[ni];
        auto side = [&](int pid) -> K {
            const auto& comp = pc.sphere.components[loc[pid].first];
            const RatMap<K>& f = nf.maps.at(comp.id);
            int m = order_at.count(pid) ? order_at[pid] : 0;
            if (m == 0) return FieldOps<K>::zero_like(f.den.coeffs()[0]);
            SpherePoint<K> pos = comp.punctures[loc[pid].second].pos;
            return dynamical_index(f, pos, o.rel_tol);
        };
        if (order_at[nd.first] > 1 || order_at[nd.second] > 1) {
            r.add("node " + std::to_string(ni) + ": nodal puncture is a multiple fixed point");
            continue;
        }
        K s = side(nd.first) + side(nd.second);
        K defect = s - FieldOps<K>::one_like(s);
        bool ok = FieldOps<K>::exact ? defect.is_zero() : FieldOps<K>::mag(defect) <= o.sum_tol;
        if (!ok)
            r.add("node " + std::to_string(ni) + ": pair indices sum to " +
                  std::to_string(FieldOps<K>::mag(s)) + " (abs), not 1");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Reduced index decoration

template <class K>
struct ReducedDecoration {
    std::vector<std::pair<int, K>> indices;  // (puncture id, index) over the q_r
    // (puncture id, c_1..c_L) for singular punctures, bouquet-major order
    std::vector<std::pair<int, std::vector<K>>> principal_blocks;

    size_t dimension() const {
        size_t d = indices.size();
        for (auto& b : principal_blocks) d += b.second.size();
        return d;
    }
    std::vector<K> flatten() const {
        std::vector<K> v;
        for (auto& i : indices) v.push_back(i.second);
        for (auto& b : principal_blocks)
            for (auto& c : b.second) v.push_back(c);
        return v;
    }
};

// Largest entry-wise distance between two decorations of equal shape.
template <class K>
double decoration_distance(const ReducedDecoration<K>& a, const ReducedDecoration<K>& b) {
    auto va = a.flatten(), vb = b.flatten();
    if (va.size() != vb.size()) return 1e300;
    double m = 0.0;
    for (size_t i = 0; i < va.size(); ++i)
        m = std::max(m, FieldOps<K>::mag(va[i] - vb[i]));
    return m;
}

template <class K>
ReducedDecoration<K> reduced_decoration(const NodedFunction<K>& nf,
                                        const NormalizationConvention& conv,
                                        std::optional<ValidateOpts> opts = std::nullopt) {
    auto vr = validate_noded_function(nf, opts);
    if (!vr.ok())
        throw Error(ErrorCode::validation, "reduced_decoration: " + vr.violations.front());
    const auto& pc = nf.structure.crush;
    ValidateOpts o = opts ? *opts
                          : default_validate_opts(nf.maps.begin()->second.den.coeffs()[0]);
    CrushData cd = crush_data(pc);
    auto loc = detail::puncture_locator(pc.sphere);
    auto pos_of = [&](int pid) {
        return pc.sphere.components[loc[pid].first].punctures[loc[pid].second].pos;
    };
    auto map_of = [&](int pid) -> const RatMap<K>& {
        return nf.maps.at(pc.sphere.components[loc[pid].first].id);
    };

    ReducedDecoration<K> out;
    for (int pid : cd.nonsingular) {
        const RatMap<K>& f = map_of(pid);
        int m = fixed_point_order(f, pos_of(pid), o.rel_tol);
        K idx = m == 0 ? FieldOps<K>::zero_like(f.den.coeffs()[0])
                       : dynamical_index(f, pos_of(pid), o.rel_tol);
        out.indices.emplace_back(pid, std::move(idx));
    }
    for (auto& b : cd.bouquets) {
        for (int pid : b.punctures) {
            auto it = conv.uv.find(pid);
            if (it == conv.uv.end())
                throw Error(ErrorCode::validation,
                            "reduced_decoration: no normalization for singular puncture " +
                                std::to_string(pid));
            auto [u, v] = it->second;
            if (loc[u].first != loc[pid].first || loc[v].first != loc[pid].first || u == v ||
                u == pid || v == pid)
                throw Error(ErrorCode::validation,
                            "reduced_decoration: invalid normalization pair for puncture " +
                                std::to_string(pid));
            auto ppart = principal_part(map_of(pid), pos_of(pid), pos_of(u), pos_of(v), b.level,
                                        o.rel_tol, /*allow_unfixed=*/true);
            out.principal_blocks.emplace_back(pid, std::move(ppart.coeffs));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Embedding of plain rational maps

// A non-identity rational map of degree >= 2 as a single-component noded
// function: multiple fixed points become singleton bouquets whose level is
// the multiplicity (carried by one phantom crushed component each).
inline NodedFunction<Complex> embed_vm(const RatMap<Complex>& f,
                                       const std::vector<CPoint>& order, Prec data_prec) {
    double rel_tol = std::pow(2.0, -static_cast<double>(data_prec) / 2);
    if (f.is_identity(rel_tol)) throw Error(ErrorCode::validation, "embed_vm: identity map");
    if (f.degree() < 2) throw Error(ErrorCode::validation, "embed_vm: degree must be >= 2");
    auto fps = fixed_points(f, data_prec);
    if (order.size() != fps.size())
        throw Error(ErrorCode::validation, "embed_vm: order must list all distinct fixed points");
    if (fps.size() < 3)
        throw Error(ErrorCode::unsupported,
                    "embed_vm: fewer than 3 distinct fixed points cannot carry a marked sphere");
    // match order entries to computed fixed points
    std::vector<int> mult(order.size(), 0);
    std::vector<bool> used(fps.size(), false);
    for (size_t i = 0; i < order.size(); ++i) {
        double best = 1e300;
        size_t arg = fps.size();
        for (size_t j = 0; j < fps.size(); ++j) {
            if (used[j]) continue;
            double d = sphere_dist_est(order[i], fps[j].first);
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        if (arg == fps.size() || best > 1e-6)
            throw Error(ErrorCode::validation, "embed_vm: order entry is not a fixed point");
        used[arg] = true;
        mult[i] = fps[arg].second;
    }

    NodedFunction<Complex> nf;
    auto& sph = nf.structure.crush.sphere;
    SphereComponent<Complex> main;
    main.id = 0;
    for (size_t i = 0; i < order.size(); ++i)
        main.punctures.push_back({static_cast<int>(i), order[i]});
    sph.components.push_back(main);
    nf.structure.crush.ordinary_ids = {0};
    int d = f.degree();
    sph.level_n = d + 1;

    int next_pid = static_cast<int>(order.size());
    int next_cid = 1;
    for (size_t i = 0; i < order.size(); ++i) {
        if (mult[i] < 2) continue;
        SphereComponent<Complex> phantom;
        phantom.id = next_cid++;
        // one nodal puncture plus `mult` non-nodal ones at dummy positions
        phantom.punctures.push_back({next_pid, CPoint::infinity()});
        for (int k = 0; k < mult[i]; ++k)
            phantom.punctures.push_back({next_pid + 1 + k, CPoint(Complex(k, 0, data_prec))});
        sph.nodes.push_back({static_cast<int>(i), next_pid});
        next_pid += mult[i] + 1;
        sph.components.push_back(std::move(phantom));
    }

    // labels 1..d+1 run along `order`, each point taking `mult` of them
    std::vector<std::vector<int>> labels(order.size());
    int next_label = 1;
    for (size_t i = 0; i < order.size(); ++i)
        for (int k = 0; k < mult[i]; ++k) labels[i].push_back(next_label++);
    CrushData cd = crush_data(nf.structure.crush);
    auto xs = x_enumeration(nf.structure.crush, cd);
    for (auto& x : xs) {
        if (x.is_bouquet)
            nf.structure.marking.parts.push_back(labels[cd.bouquets[x.bouquet_index].punctures[0]]);
        else
            nf.structure.marking.parts.push_back(labels[x.puncture_id]);
    }
    nf.maps.emplace(0, f);
    auto vr = validate_noded_function(nf);
    if (!vr.ok())
        throw Error(ErrorCode::internal, "embed_vm: result failed validation: " +
                                             vr.violations.front());
    return nf;
}

// ---------------------------------------------------------------------------
// Dynamical-structure equality

template <class K>
bool structures_equal(const NodedFunction<K>& a, const NodedFunction<K>& b, double tol) {
    auto va = validate_noded_function(a);
    auto vb = validate_noded_function(b);
    if (!va.ok() || !vb.ok())
        throw Error(ErrorCode::validation, "structures_equal: invalid operand");
    if (!canonical_equal(a.structure, b.structure, tol)) return false;
    CanonicalForm<K> ca = canonical_form(a.structure, tol);
    CanonicalForm<K> cb = canonical_form(b.structure, tol);
    if (ca.transforms.size() != cb.transforms.size()) return false;
    for (size_t i = 0; i < ca.transforms.size(); ++i) {
        RatMap<K> ga = mobius_conjugate(a.maps.at(ca.transforms[i].first), ca.transforms[i].second);
        RatMap<K> gb = mobius_conjugate(b.maps.at(cb.transforms[i].first), cb.transforms[i].second);
        if constexpr (!FieldOps<K>::exact) {
            ga.num.trim(tol);
            ga.den.trim(tol);
            gb.num.trim(tol);
            gb.den.trim(tol);
        }
        if (ga.num.degree() != gb.num.degree() || ga.den.degree() != gb.den.degree())
            return false;
        // normalize by the largest denominator coefficient
        auto norm = [](RatMap<K>& g) {
            size_t arg = 0;
            double best = -1.0;
            for (int k = 0; k <= g.den.degree(); ++k) {
                double m = FieldOps<K>::mag(g.den[k]);
                if (m > best) {
                    best = m;
                    arg = static_cast<size_t>(k);
                }
            }
            K s = FieldOps<K>::one_like(g.den[arg]) / g.den[arg];
            g.num = g.num * s;
            g.den = g.den * s;
        };
        norm(ga);
        norm(gb);
        for (int k = 0; k <= ga.num.degree(); ++k) {
            K diff = ga.num[k] - gb.num[k];
            if (FieldOps<K>::exact ? !diff.is_zero() : FieldOps<K>::mag(diff) > tol) return false;
        }
        for (int k = 0; k <= ga.den.degree(); ++k) {
            K diff = ga.den[k] - gb.den[k];
            if (FieldOps<K>::exact ? !diff.is_zero() : FieldOps<K>::mag(diff) > tol) return false;
        }
    }
    return true;
}

// Apply a Mobius change of chart to selected ordinary components: puncture
// positions move, maps are conjugated, the dynamical structure is unchanged.
template <class K>
NodedFunction<K> transformed(const NodedFunction<K>& nf,
                             const std::map<int, Mobius<K>>& charts) {
    NodedFunction<K> out = nf;
    for (auto& [cid, t] : charts) {
        for (auto& comp : out.structure.crush.sphere.components) {
            if (comp.id != cid) continue;
            for (auto& p : comp.punctures) p.pos = t.apply(p.pos);
        }
        auto it = out.maps.find(cid);
        if (it != out.maps.end()) it->second = mobius_conjugate(it->second, t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Construction helper used by tests, the round-trip corpus and the CLI:
// one ordinary component given by puncture positions and component-chart
// principal-part targets (vector length >= 2 marks a singular puncture,
// realized through a phantom crushed component).

template <class K>
struct ComponentPunctureSpec {
    SpherePoint<K> pos;
    std::vector<K> parts;  // component-chart c_1..c_L; empty = unfixed puncture
};

template <class K>
NodedFunction<K> build_single_component_function(
    const std::vector<ComponentPunctureSpec<K>>& specs) {
    if (specs.size() < 3)
        throw Error(ErrorCode::validation, "single-component builder: need >= 3 punctures");
    std::vector<PolePart<K>> parts;
    K like{};
    bool got_like = false;
    for (auto& s : specs) {
        if (!s.parts.empty() && !got_like) {
            like = s.parts[0];
            got_like = true;
        }
        if (!s.parts.empty() && s.pos.is_inf())
            throw Error(ErrorCode::unsupported,
                        "single-component builder: fixed puncture at infinity not supported");
        if (!s.parts.empty()) parts.push_back(PolePart<K>{s.pos.value(), s.parts});
    }
    if (parts.empty())
        throw Error(ErrorCode::validation, "single-component builder: no fixed punctures");
    RatMap<K> f = map_from_principal_parts(parts);

    NodedFunction<K> nf;
    auto& sph = nf.structure.crush.sphere;
    SphereComponent<K> main;
    main.id = 0;
    int n = 0;
    for (size_t i = 0; i < specs.size(); ++i) {
        main.punctures.push_back({static_cast<int>(i), specs[i].pos});
        n += std::max<int>(1, static_cast<int>(specs[i].parts.size()));
    }
    sph.components.push_back(main);
    nf.structure.crush.ordinary_ids = {0};
    sph.level_n = n;

    int next_pid = static_cast<int>(specs.size());
    int next_cid = 1;
    std::vector<std::vector<int>> labels(specs.size());
    int next_label = 1;
    for (size_t i = 0; i < specs.size(); ++i) {
        int lv = std::max<int>(1, static_cast<int>(specs[i].parts.size()));
        for (int k = 0; k < lv; ++k) labels[i].push_back(next_label++);
        if (lv < 2) continue;
        SphereComponent<K> phantom;
        phantom.id = next_cid++;
        phantom.punctures.push_back({next_pid, SpherePoint<K>::infinity()});
        for (int k = 0; k < lv; ++k)
            phantom.punctures.push_back(
                {next_pid + 1 + k, SpherePoint<K>(FieldOps<K>::from_long(k, like))});
        sph.nodes.push_back({static_cast<int>(i), next_pid});
        next_pid += lv + 1;
        sph.components.push_back(std::move(phantom));
    }
    CrushData cd = crush_data(nf.structure.crush);
    auto xs = x_enumeration(nf.structure.crush, cd);
    for (auto& x : xs) {
        if (x.is_bouquet)
            nf.structure.marking.parts.push_back(
                labels[cd.bouquets[x.bouquet_index].punctures[0]]);
        else
            nf.structure.marking.parts.push_back(labels[x.puncture_id]);
    }
    nf.maps.emplace(0, std::move(f));
    return nf;
}

}  // namespace nrat
