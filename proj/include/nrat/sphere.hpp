#pragma once

// Combinatorial model of punctured Riemann spheres with nodes, partial
// crushes, crush data and boundary markings, with validators that report
// violations as data.  Components store concrete puncture positions; two
// marked crushes are equivalent iff their canonical forms agree.

#include "nrat/mobius.hpp"
#include "nrat/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace nrat {

template <class K>
struct Puncture {
    int id;
    SpherePoint<K> pos;
};

template <class K>
struct SphereComponent {
    int id;
    std::vector<Puncture<K>> punctures;
};

struct NodePairIds {
    int first, second;  // puncture ids on different components
};

template <class K>
struct NodedSphere {
    std::vector<SphereComponent<K>> components;
    std::vector<NodePairIds> nodes;
    int level_n = 0;  // number of non-nodal punctures
};

template <class K>
struct PartialCrush {
    NodedSphere<K> sphere;
    std::vector<int> ordinary_ids;    // component ids kept in the crush
    std::vector<int> retained_nodes;  // indices into sphere.nodes
};

// Ordered label partition {E_r}; part r corresponds to the r-th element of
// the canonical enumeration of X (non-singular punctures in component/
// puncture order, then bouquets by smallest member puncture id).
struct Marking {
    std::vector<std::vector<int>> parts;
};

template <class K>
struct MarkedCrush {
    PartialCrush<K> crush;
    Marking marking;
};

struct Bouquet {
    std::vector<int> punctures;   // puncture ids of the crush, sorted
    int level = 0;                // non-nodal punctures of the crushed region
    std::vector<int> crushed_components;
};

struct CrushData {
    std::vector<Bouquet> bouquets;
    std::vector<int> nonsingular;  // puncture ids (the q_r), in sphere order
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    void add(std::string v) { violations.push_back(std::move(v)); }
};

// ---------------------------------------------------------------------------
// helpers

namespace detail {

template <class K>
bool positions_close(const SpherePoint<K>& a, const SpherePoint<K>& b, double tol) {
    if constexpr (FieldOps<K>::exact) {
        (void)tol;
        return a == b;
    } else {
        return sphere_dist_est(a, b) <= tol;
    }
}

template <class K>
std::map<int, std::pair<int, int>> puncture_locator(const NodedSphere<K>& s) {
    // puncture id -> (component index, puncture index)
    std::map<int, std::pair<int, int>> loc;
    for (size_t ci = 0; ci < s.components.size(); ++ci)
        for (size_t pi = 0; pi < s.components[ci].punctures.size(); ++pi)
            loc[s.components[ci].punctures[pi].id] = {static_cast<int>(ci),
                                                      static_cast<int>(pi)};
    return loc;
}

inline std::set<int> nodal_puncture_ids(const std::vector<NodePairIds>& nodes) {
    std::set<int> out;
    for (auto& n : nodes) {
        out.insert(n.first);
        out.insert(n.second);
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// validators

template <class K>
ValidationReport validate_sphere(const NodedSphere<K>& s, double pos_tol = 1e-12) {
    ValidationReport r;
    std::set<int> comp_ids, punc_ids;
    for (auto& c : s.components) {
        if (!comp_ids.insert(c.id).second)
            r.add("duplicate component id " + std::to_string(c.id));
        if (c.punctures.size() < 3)
            r.add("component " + std::to_string(c.id) + " has fewer than 3 punctures");
        for (auto& p : c.punctures)
            if (!punc_ids.insert(p.id).second)
                r.add("duplicate puncture id " + std::to_string(p.id));
        for (size_t i = 0; i < c.punctures.size(); ++i)
            for (size_t j = i + 1; j < c.punctures.size(); ++j)
                if (detail::positions_close<K>(c.punctures[i].pos, c.punctures[j].pos, pos_tol))
                    r.add("component " + std::to_string(c.id) + ": punctures " +
                          std::to_string(c.punctures[i].id) + " and " +
                          std::to_string(c.punctures[j].id) + " coincide");
    }
    auto loc = detail::puncture_locator(s);
    std::set<int> seen_nodal;
    for (size_t ni = 0; ni < s.nodes.size(); ++ni) {
        auto& n = s.nodes[ni];
        if (!loc.count(n.first) || !loc.count(n.second)) {
            r.add("node " + std::to_string(ni) + " references unknown punctures");
            continue;
        }
        if (loc[n.first].first == loc[n.second].first)
            r.add("node " + std::to_string(ni) + " joins punctures of the same component");
        if (!seen_nodal.insert(n.first).second)
            r.add("puncture " + std::to_string(n.first) + " belongs to more than one node");
        if (!seen_nodal.insert(n.second).second)
            r.add("puncture " + std::to_string(n.second) + " belongs to more than one node");
    }
    long total = 0;
    for (auto& c : s.components) total += static_cast<long>(c.punctures.size());
    long M = static_cast<long>(s.components.size());
    long J = static_cast<long>(s.nodes.size());
    long n = s.level_n;
    if (total != 2 * J + n)
        r.add("puncture count " + std::to_string(total) + " != 2J+n = " +
              std::to_string(2 * J + n));
    if (J != M - 1) r.add("J = " + std::to_string(J) + " != M-1 = " + std::to_string(M - 1));
    if (J > n - 3) r.add("J = " + std::to_string(J) + " exceeds n-3 = " + std::to_string(n - 3));
    // connectivity of the realization (components as vertices, nodes as edges)
    if (!s.components.empty() && r.ok()) {
        std::map<int, std::vector<int>> adj;
        for (auto& nd : s.nodes) {
            int a = loc[nd.first].first, b = loc[nd.second].first;
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        std::vector<bool> seen(s.components.size(), false);
        std::vector<int> stack{0};
        seen[0] = true;
        size_t cnt = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    ++cnt;
                    stack.push_back(w);
                }
        }
        if (cnt != s.components.size()) r.add("realization is not connected");
    }
    return r;
}

template <class K>
ValidationReport validate_crush(const PartialCrush<K>& pc, double pos_tol = 1e-12) {
    ValidationReport r = validate_sphere(pc.sphere, pos_tol);
    std::set<int> comp_ids;
    for (auto& c : pc.sphere.components) comp_ids.insert(c.id);
    std::set<int> ordinary(pc.ordinary_ids.begin(), pc.ordinary_ids.end());
    if (ordinary.size() != pc.ordinary_ids.size()) r.add("duplicate ordinary component ids");
    if (ordinary.empty()) r.add("no ordinary components (the empty point is not representable)");
    for (int id : ordinary)
        if (!comp_ids.count(id)) r.add("ordinary id " + std::to_string(id) + " unknown");
    if (!r.ok()) return r;

    auto loc = detail::puncture_locator(pc.sphere);
    auto comp_of = [&](int pid) { return pc.sphere.components[loc[pid].first].id; };

    std::set<int> retained(pc.retained_nodes.begin(), pc.retained_nodes.end());
    for (int ni : retained)
        if (ni < 0 || ni >= static_cast<int>(pc.sphere.nodes.size()))
            r.add("retained node index " + std::to_string(ni) + " out of range");
    if (!r.ok()) return r;

    for (size_t ni = 0; ni < pc.sphere.nodes.size(); ++ni) {
        auto& nd = pc.sphere.nodes[ni];
        bool a_ord = ordinary.count(comp_of(nd.first)) > 0;
        bool b_ord = ordinary.count(comp_of(nd.second)) > 0;
        bool is_retained = retained.count(static_cast<int>(ni)) > 0;
        if (!a_ord && !b_ord)
            r.add("node " + std::to_string(ni) +
                  " joins two crushed components (no puncture of the crush in the pair)");
        if (is_retained && !(a_ord && b_ord))
            r.add("retained node " + std::to_string(ni) + " touches a crushed component");
        if (!is_retained && a_ord && b_ord)
            r.add("node " + std::to_string(ni) +
                  " joins two ordinary components but is not retained");
    }
    auto nodal = detail::nodal_puncture_ids(pc.sphere.nodes);
    for (auto& c : pc.sphere.components) {
        if (ordinary.count(c.id)) continue;
        int non_nodal = 0;
        for (auto& p : c.punctures)
            if (!nodal.count(p.id)) ++non_nodal;
        if (non_nodal < 2)
            r.add("crushed component " + std::to_string(c.id) +
                  " has fewer than 2 non-nodal punctures");
    }
    return r;
}

// ---------------------------------------------------------------------------
// crush data

template <class K>
CrushData crush_data(const PartialCrush<K>& pc) {
    auto vr = validate_crush(pc);
    if (!vr.ok()) throw Error(ErrorCode::validation, "crush_data: " + vr.violations.front());
    auto loc = detail::puncture_locator(pc.sphere);
    std::set<int> ordinary(pc.ordinary_ids.begin(), pc.ordinary_ids.end());
    auto nodal = detail::nodal_puncture_ids(pc.sphere.nodes);
    auto comp_of = [&](int pid) { return pc.sphere.components[loc[pid].first].id; };

    CrushData cd;
    // valid crushes have pairwise non-adjacent crushed components, so each
    // crushed component is its own region
    for (auto& c : pc.sphere.components) {
        if (ordinary.count(c.id)) continue;
        Bouquet b;
        b.crushed_components = {c.id};
        for (auto& nd : pc.sphere.nodes) {
            if (comp_of(nd.first) == c.id && ordinary.count(comp_of(nd.second)))
                b.punctures.push_back(nd.second);
            else if (comp_of(nd.second) == c.id && ordinary.count(comp_of(nd.first)))
                b.punctures.push_back(nd.first);
        }
        for (auto& p : c.punctures)
            if (!nodal.count(p.id)) ++b.level;
        std::sort(b.punctures.begin(), b.punctures.end());
        // a bouquet holds at most one puncture of each ordinary component
        std::set<int> comps;
        for (int pid : b.punctures)
            if (!comps.insert(comp_of(pid)).second)
                throw Error(ErrorCode::internal,
                            "crush_data: bouquet meets a component twice (dual graph not a tree)");
        cd.bouquets.push_back(std::move(b));
    }
    std::sort(cd.bouquets.begin(), cd.bouquets.end(), [](const Bouquet& a, const Bouquet& b) {
        return a.punctures < b.punctures;
    });
    for (auto& c : pc.sphere.components) {
        if (!ordinary.count(c.id)) continue;
        for (auto& p : c.punctures)
            if (!nodal.count(p.id)) cd.nonsingular.push_back(p.id);
    }
    // counting identity A + sum L = n
    long A = static_cast<long>(cd.nonsingular.size());
    long L = 0;
    for (auto& b : cd.bouquets) L += b.level;
    if (A + L != pc.sphere.level_n)
        throw Error(ErrorCode::internal, "crush_data: A + sum(L) != n");
    return cd;
}

// The canonical enumeration of X: non-singular punctures first (sphere
// order), then bouquets ordered by smallest member puncture id.
struct XElement {
    bool is_bouquet;
    int puncture_id;    // when !is_bouquet
    int bouquet_index;  // when is_bouquet, index into CrushData::bouquets
    int level;
};

template <class K>
std::vector<XElement> x_enumeration(const PartialCrush<K>& pc, const CrushData& cd) {
    std::vector<XElement> xs;
    for (int pid : cd.nonsingular) xs.push_back({false, pid, -1, 1});
    for (size_t bi = 0; bi < cd.bouquets.size(); ++bi)
        xs.push_back({true, -1, static_cast<int>(bi), cd.bouquets[bi].level});
    (void)pc;
    return xs;
}

template <class K>
ValidationReport validate_marking(const MarkedCrush<K>& mc) {
    ValidationReport r = validate_crush(mc.crush);
    if (!r.ok()) return r;
    CrushData cd = crush_data(mc.crush);
    auto xs = x_enumeration(mc.crush, cd);
    int n = mc.crush.sphere.level_n;
    if (mc.marking.parts.size() != xs.size()) {
        r.add("marking has " + std::to_string(mc.marking.parts.size()) + " parts, expected " +
              std::to_string(xs.size()));
        return r;
    }
    std::set<int> seen;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (static_cast<int>(mc.marking.parts[i].size()) != xs[i].level)
            r.add("marking part " + std::to_string(i) + " has " +
                  std::to_string(mc.marking.parts[i].size()) + " labels, level is " +
                  std::to_string(xs[i].level));
        for (int lab : mc.marking.parts[i]) {
            if (lab < 1 || lab > n) r.add("label " + std::to_string(lab) + " out of range");
            else if (!seen.insert(lab).second)
                r.add("label " + std::to_string(lab) + " used twice");
        }
    }
    if (static_cast<int>(seen.size()) != n) r.add("marking does not cover all labels");
    return r;
}

// ---------------------------------------------------------------------------
// reduced realization

struct RealizationGraph {
    std::vector<int> component_ids;             // ordinary components
    std::vector<std::pair<int, int>> edges;     // retained (non-singular) nodes
    std::vector<Bouquet> singular_attachments;  // singular nodes with bouquet data
    bool reduced_connected = false;
    int star_component_count = 0;  // connected pieces of the plain realization
};

// ---------------------------------------------------------------------------
// canonical form

// Marking-derived sort keys: marked punctures sort by their smallest label,
// retained-node punctures after all labels (by node index), crushed-side
// punctures last.  Within a component all keys are distinct because the
// dual graph is a tree.
template <class K>
struct CanonicalForm {
    MarkedCrush<K> object;
    // original ordinary component id -> normalizing Mobius (anchors to 0,1,inf)
    std::vector<std::pair<int, Mobius<K>>> transforms;
};

struct MarkingKeys {
    std::map<int, long> key;              // puncture id -> sort key
    std::map<int, int> part_of_puncture;  // non-singular pid -> part index
    std::map<int, int> part_of_bouquet;   // bouquet index -> part index
};

template <class K>
MarkingKeys marking_keys(const MarkedCrush<K>& mc, const CrushData& cd,
                         const std::vector<XElement>& xs) {
    const auto& sph = mc.crush.sphere;
    int n = sph.level_n;
    auto loc = detail::puncture_locator(sph);
    std::set<int> ordinary(mc.crush.ordinary_ids.begin(), mc.crush.ordinary_ids.end());
    MarkingKeys mk;
    for (size_t i = 0; i < xs.size(); ++i) {
        long min_label = *std::min_element(mc.marking.parts[i].begin(),
                                           mc.marking.parts[i].end());
        if (xs[i].is_bouquet) {
            mk.part_of_bouquet[xs[i].bouquet_index] = static_cast<int>(i);
            for (int pid : cd.bouquets[xs[i].bouquet_index].punctures) mk.key[pid] = min_label;
        } else {
            mk.part_of_puncture[xs[i].puncture_id] = static_cast<int>(i);
            mk.key[xs[i].puncture_id] = min_label;
        }
    }
    for (size_t ni = 0; ni < sph.nodes.size(); ++ni) {
        int pa = sph.nodes[ni].first, pb = sph.nodes[ni].second;
        bool a_ord = ordinary.count(sph.components[loc[pa].first].id) > 0;
        bool b_ord = ordinary.count(sph.components[loc[pb].first].id) > 0;
        if (a_ord && b_ord) {
            mk.key[pa] = mk.key[pb] = n + 1 + static_cast<long>(ni);
        } else {
            // the ordinary-side puncture already carries its bouquet key
            if (!a_ord) mk.key[pa] = 2L * n + 2 + static_cast<long>(ni);
            if (!b_ord) mk.key[pb] = 2L * n + 2 + static_cast<long>(ni);
        }
    }
    // crushed-side non-nodal punctures: keep stable order after everything
    long filler = 3L * n + 3;
    for (auto& c : sph.components)
        for (auto& p : c.punctures)
            if (!mk.key.count(p.id)) mk.key[p.id] = filler++;
    return mk;
}

template <class K>
CanonicalForm<K> canonical_form(const MarkedCrush<K>& mc, double pos_tol = 1e-12) {
    auto vr = validate_marking(mc);
    if (!vr.ok()) throw Error(ErrorCode::validation, "canonical_form: " + vr.violations.front());
    const auto& sph = mc.crush.sphere;
    int n = sph.level_n;
    CrushData cd = crush_data(mc.crush);
    auto xs = x_enumeration(mc.crush, cd);
    std::set<int> ordinary(mc.crush.ordinary_ids.begin(), mc.crush.ordinary_ids.end());

    MarkingKeys mk = marking_keys(mc, cd, xs);
    auto& key = mk.key;
    auto& part_of_puncture = mk.part_of_puncture;
    auto& part_of_bouquet = mk.part_of_bouquet;

    // component order: ordinary first, then crushed, by sorted key lists
    struct CompOrder {
        bool crushed;
        std::vector<long> keys;
        size_t index;
    };
    std::vector<CompOrder> order;
    for (size_t ci = 0; ci < sph.components.size(); ++ci) {
        CompOrder co;
        co.crushed = ordinary.count(sph.components[ci].id) == 0;
        co.index = ci;
        for (auto& p : sph.components[ci].punctures) co.keys.push_back(key[p.id]);
        std::sort(co.keys.begin(), co.keys.end());
        order.push_back(std::move(co));
    }
    std::sort(order.begin(), order.end(), [](const CompOrder& a, const CompOrder& b) {
        if (a.crushed != b.crushed) return !a.crushed;
        return a.keys < b.keys;
    });

    CanonicalForm<K> out;
    auto& res = out.object;
    res.crush.sphere.level_n = n;
    std::map<int, int> new_id;  // old puncture id -> new id
    int counter = 0;
    for (auto& co : order) {
        const auto& comp = sph.components[co.index];
        std::vector<Puncture<K>> ps = comp.punctures;
        std::sort(ps.begin(), ps.end(),
                  [&](const Puncture<K>& a, const Puncture<K>& b) { return key[a.id] < key[b.id]; });
        SphereComponent<K> nc;
        nc.id = static_cast<int>(res.crush.sphere.components.size());
        bool is_ord = !co.crushed;
        if (is_ord) {
            // move the three smallest-key punctures to 0, 1, inf
            Mobius<K> t = mobius_from_triple(ps[0].pos, ps[1].pos, ps[2].pos);
            out.transforms.emplace_back(comp.id, t);
            for (auto& p : ps) {
                Puncture<K> q;
                q.id = counter;
                new_id[p.id] = counter++;
                q.pos = t.apply(p.pos);
                nc.punctures.push_back(std::move(q));
            }
            // snap the anchors exactly
            K like = t.a;
            nc.punctures[0].pos = SpherePoint<K>(FieldOps<K>::zero_like(like));
            nc.punctures[1].pos = SpherePoint<K>(FieldOps<K>::one_like(like));
            nc.punctures[2].pos = SpherePoint<K>::infinity();
            res.crush.ordinary_ids.push_back(nc.id);
        } else {
            for (auto& p : ps) {
                Puncture<K> q;
                q.id = counter;
                new_id[p.id] = counter++;
                q.pos = p.pos;  // conformal structure of crushed parts is immaterial
                nc.punctures.push_back(std::move(q));
            }
        }
        res.crush.sphere.components.push_back(std::move(nc));
    }
    // nodes keep their input order; each pair is stored smaller id first
    for (auto& nd : sph.nodes) {
        int a = new_id[nd.first], b = new_id[nd.second];
        res.crush.sphere.nodes.push_back({std::min(a, b), std::max(a, b)});
    }
    res.crush.retained_nodes = mc.crush.retained_nodes;
    std::sort(res.crush.retained_nodes.begin(), res.crush.retained_nodes.end());

    // marking parts re-aligned with the canonical X enumeration
    CrushData cd2 = crush_data(res.crush);
    auto xs2 = x_enumeration(res.crush, cd2);
    std::map<int, int> old_id;  // new -> old
    for (auto& [o, nn] : new_id) old_id[nn] = o;
    // map each canonical bouquet to the original via any member puncture
    std::map<int, int> bouquet_of_old_pid;
    for (size_t bi = 0; bi < cd.bouquets.size(); ++bi)
        for (int pid : cd.bouquets[bi].punctures) bouquet_of_old_pid[pid] = static_cast<int>(bi);
    for (auto& x : xs2) {
        std::vector<int> labels;
        if (x.is_bouquet) {
            int old_b = bouquet_of_old_pid[old_id[cd2.bouquets[x.bouquet_index].punctures[0]]];
            labels = mc.marking.parts[part_of_bouquet[old_b]];
        } else {
            labels = mc.marking.parts[part_of_puncture[old_id[x.puncture_id]]];
        }
        std::sort(labels.begin(), labels.end());
        res.marking.parts.push_back(std::move(labels));
    }
    (void)pos_tol;
    return out;
}

// Structural equality of canonicalized marked crushes; ordinary-component
// puncture positions compare within tol, crushed components combinatorially.
template <class K>
bool canonical_equal(const MarkedCrush<K>& a, const MarkedCrush<K>& b, double pos_tol) {
    CanonicalForm<K> ca = canonical_form(a, pos_tol);
    CanonicalForm<K> cb = canonical_form(b, pos_tol);
    const auto& x = ca.object;
    const auto& y = cb.object;
    if (x.crush.sphere.level_n != y.crush.sphere.level_n) return false;
    if (x.crush.sphere.components.size() != y.crush.sphere.components.size()) return false;
    if (x.crush.ordinary_ids != y.crush.ordinary_ids) return false;
    if (x.crush.retained_nodes != y.crush.retained_nodes) return false;
    if (x.marking.parts != y.marking.parts) return false;
    if (x.crush.sphere.nodes.size() != y.crush.sphere.nodes.size()) return false;
    for (size_t i = 0; i < x.crush.sphere.nodes.size(); ++i)
        if (x.crush.sphere.nodes[i].first != y.crush.sphere.nodes[i].first ||
            x.crush.sphere.nodes[i].second != y.crush.sphere.nodes[i].second)
            return false;
    std::set<int> ord(x.crush.ordinary_ids.begin(), x.crush.ordinary_ids.end());
    for (size_t ci = 0; ci < x.crush.sphere.components.size(); ++ci) {
        const auto& pc = x.crush.sphere.components[ci].punctures;
        const auto& qc = y.crush.sphere.components[ci].punctures;
        if (pc.size() != qc.size()) return false;
        if (!ord.count(static_cast<int>(ci))) continue;
        for (size_t pi = 0; pi < pc.size(); ++pi)
            if (!detail::positions_close<K>(pc[pi].pos, qc[pi].pos, pos_tol)) return false;
    }
    return true;
}

template <class K>
RealizationGraph reduced_realization(const PartialCrush<K>& pc) {
    auto vr = validate_crush(pc);
    if (!vr.ok())
        throw Error(ErrorCode::validation, "reduced_realization: " + vr.violations.front());
    CrushData cd = crush_data(pc);
    auto loc = detail::puncture_locator(pc.sphere);
    auto comp_of = [&](int pid) { return pc.sphere.components[loc[pid].first].id; };

    RealizationGraph g;
    g.component_ids = pc.ordinary_ids;
    for (int ni : pc.retained_nodes) {
        auto& nd = pc.sphere.nodes[ni];
        g.edges.emplace_back(comp_of(nd.first), comp_of(nd.second));
    }
    g.singular_attachments = cd.bouquets;

    std::map<int, int> idx;
    for (size_t i = 0; i < g.component_ids.size(); ++i) idx[g.component_ids[i]] = (int)i;
    auto count_pieces = [&](bool with_bouquets) {
        std::vector<int> parent(g.component_ids.size());
        for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
        for (auto& e : g.edges) unite(idx[e.first], idx[e.second]);
        if (with_bouquets)
            for (auto& b : g.singular_attachments)
                for (size_t i = 1; i < b.punctures.size(); ++i)
                    unite(idx[comp_of(b.punctures[0])], idx[comp_of(b.punctures[i])]);
        std::set<int> roots;
        for (size_t i = 0; i < parent.size(); ++i) roots.insert(find(static_cast<int>(i)));
        return static_cast<int>(roots.size());
    };
    g.star_component_count = count_pieces(false);
    g.reduced_connected = count_pieces(true) == 1;
    return g;
}

}  // namespace nrat
