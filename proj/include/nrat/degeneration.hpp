#pragma once

// Numerical degeneration of families of marked generic rational maps:
// cluster colliding fixed points across a geometric schedule, extrapolate
// index/moment decorations (with divergence flags), rescale into collision
// bubbles recursively, classify crushed against ordinary components, and
// assemble the limit as a rational function with nodes.

#include "nrat/extrapolate.hpp"
#include "nrat/nodedfn.hpp"

#include <numeric>
#include <optional>
#include <sstream>

namespace nrat {

struct FamilySample {
    long k = 0;
    FixedPointData<Complex> data;  // label j = entry j, consistent across samples
};

struct DegenConfig {
    Prec prec = kDefaultPrec;
    double cluster_tol = 1e-4;   // merge tolerance on extrapolated limit points
    double div_threshold = 1e6;  // absolute blow-up level
    double growth_ratio = 1.25;  // sustained geometric growth counts as divergence
    double residual_tol = 1e-6;  // assembly validation tolerance
    long schedule_k0 = 16;       // default family schedule: k0 * 2^t
    int schedule_len = 6;

    ExtrapolateOpts extrap() const {
        ExtrapolateOpts o;
        o.div_threshold = div_threshold;
        o.growth_ratio = growth_ratio;
        return o;
    }
};

struct Cluster {
    std::vector<int> labels;  // 0-based entry indices
    CPoint limit;
    std::vector<Complex> moments;  // extrapolated c_1..c_{L'}
    std::vector<bool> moment_inf;
    int size() const { return static_cast<int>(labels.size()); }
};

namespace detail {

inline void check_family(const std::vector<FamilySample>& samples, size_t min_labels = 2) {
    if (samples.size() < 3)
        throw Error(ErrorCode::validation, "degeneration: need at least 3 samples");
    size_t n = samples[0].data.entries.size();
    if (n < min_labels)
        throw Error(ErrorCode::validation, "degeneration: too few labels");
    for (auto& s : samples)
        if (s.data.entries.size() != n)
            throw Error(ErrorCode::validation, "degeneration: inconsistent label count");
}

// positions[t][j]: position of label j at sample t (current chart)
using PosMatrix = std::vector<std::vector<Complex>>;

inline PosMatrix positions_of(const std::vector<FamilySample>& samples) {
    PosMatrix pos(samples.size());
    for (size_t t = 0; t < samples.size(); ++t)
        for (auto& e : samples[t].data.entries) pos[t].push_back(e.first);
    return pos;
}

inline std::vector<std::vector<int>> cluster_labels(const std::vector<Complex>& limits,
                                                    const std::vector<int>& labels,
                                                    double tol) {
    size_t n = labels.size();
    std::vector<size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<size_t(size_t)> find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (FieldOps<Complex>::mag(limits[i] - limits[j]) <= tol) {
                size_t a = find(i), b = find(j);
                if (a != b) parent[a] = b;
            }
    std::map<size_t, std::vector<int>> groups;
    for (size_t i = 0; i < n; ++i) groups[find(i)].push_back(labels[i]);
    std::vector<std::vector<int>> out;
    for (auto& [root, g] : groups) {
        (void)root;
        out.push_back(g);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Extrapolated limit of every label's point sequence.  Throws no_limit when
// a sequence neither settles nor diverges cleanly.
inline std::vector<Complex> extrapolate_points(const std::vector<FamilySample>& samples,
                                               const DegenConfig& cfg) {
    detail::check_family(samples);
    size_t n = samples[0].data.entries.size();
    std::vector<Complex> limits;
    for (size_t j = 0; j < n; ++j) {
        std::vector<Complex> seq;
        for (auto& s : samples) seq.push_back(s.data.entries[j].first);
        SeqLimit l = extrapolate(seq, cfg.extrap());
        if (!l.finite())
            throw Error(ErrorCode::no_limit,
                        "degeneration: point sequence of label " + std::to_string(j) +
                            " does not converge (extend the schedule?)");
        limits.push_back(l.value);
    }
    return limits;
}

// Top-level clustering: transitive closure of "extrapolated limits within
// tol", ties merged.
inline std::vector<Cluster> cluster_fixed_points(const std::vector<FamilySample>& samples,
                                                 double tol, const DegenConfig& cfg = {}) {
    auto limits = extrapolate_points(samples, cfg);
    std::vector<int> all(limits.size());
    std::iota(all.begin(), all.end(), 0);
    auto groups = detail::cluster_labels(limits, all, tol);
    std::vector<Cluster> out;
    for (auto& g : groups) {
        Cluster c;
        c.labels = g;
        // cluster limit: extrapolated mean of the member positions
        std::vector<Complex> mean_seq;
        for (auto& s : samples) {
            Complex m(cfg.prec);
            for (int j : g) m += s.data.entries[j].first;
            mean_seq.push_back(m / FieldOps<Complex>::from_long(static_cast<long>(g.size()), m));
        }
        SeqLimit l = extrapolate(mean_seq, cfg.extrap());
        c.limit = CPoint(l.value);
        out.push_back(std::move(c));
    }
    return out;
}

// Moments of a cluster about its limit point, extrapolated in k; entries
// that blow up are flagged as infinite.
inline void limit_decoration(const std::vector<FamilySample>& samples, Cluster& cluster,
                             const DegenConfig& cfg = {}) {
    detail::check_family(samples);
    int L = cluster.size();
    const Complex& p = cluster.limit.value();
    cluster.moments.clear();
    cluster.moment_inf.clear();
    for (int l = 1; l <= L; ++l) {
        std::vector<Complex> seq;
        for (auto& s : samples) {
            Complex m(cfg.prec);
            for (int j : cluster.labels) {
                Complex diff = s.data.entries[j].first - p;
                Complex pw = FieldOps<Complex>::one_like(diff);
                for (int e = 0; e < l - 1; ++e) pw *= diff;
                m += s.data.entries[j].second * pw;
            }
            seq.push_back(std::move(m));
        }
        SeqLimit lim = extrapolate(seq, cfg.extrap());
        if (lim.status == SeqStatus::no_limit)
            throw Error(ErrorCode::no_limit, "limit_decoration: moment " + std::to_string(l) +
                                                 " oscillates without converging");
        cluster.moments.push_back(lim.value);
        cluster.moment_inf.push_back(lim.status == SeqStatus::diverged);
    }
}

// ---------------------------------------------------------------------------
// Multi-scale structure tree

namespace detail {

struct TreePunc {
    enum Kind { own_label, toward_child, toward_parent } kind;
    CPoint pos;
    int label = -1;     // own_label
    int child = -1;     // toward_child: component index
    Complex index;      // own_label decoration
    bool index_inf = false;
    double index_err = 0.0;
    std::vector<Complex> moments;  // toward_* decorations
    std::vector<bool> moment_inf;
    std::vector<double> moment_err;  // extrapolation error estimates
    std::vector<int> far_labels;  // labels beyond this puncture
};

struct TreeComp {
    std::vector<TreePunc> punctures;
    bool crushed = false;
    int parent = -1;
    std::vector<int> own_labels;
};

struct TreeBuild {
    const std::vector<FamilySample>* samples;
    DegenConfig cfg;
    std::vector<TreeComp> comps;
    std::vector<std::pair<int, int>> root_link;  // two-component top split

    size_t nsamples() const { return samples->size(); }

    Complex index_at(size_t t, int j) const {
        return (*samples)[t].data.entries[j].second;
    }

    SeqLimit extrapolate_seq(const std::vector<Complex>& seq) const {
        return extrapolate(seq, cfg.extrap());
    }

    // moments of `group` about the limit point `p` in chart positions `pos`
    void group_moments(const PosMatrix& pos, const std::vector<int>& group, const Complex& p,
                       int order, std::vector<Complex>& moments, std::vector<bool>& inf,
                       std::vector<double>& err) const {
        for (int l = 1; l <= order; ++l) {
            std::vector<Complex> seq;
            for (size_t t = 0; t < nsamples(); ++t) {
                Complex m(cfg.prec);
                for (int j : group) {
                    Complex diff = pos[t][j] - p;
                    Complex pw = FieldOps<Complex>::one_like(diff);
                    for (int e = 0; e < l - 1; ++e) pw *= diff;
                    m += index_at(t, j) * pw;
                }
                seq.push_back(std::move(m));
            }
            SeqLimit lim = extrapolate_seq(seq);
            if (lim.status == SeqStatus::no_limit)
                throw Error(ErrorCode::no_limit, "degeneration: cluster moment " +
                                                     std::to_string(l) + " does not converge");
            moments.push_back(lim.value);
            inf.push_back(lim.status == SeqStatus::diverged);
            err.push_back(lim.err_est);
        }
    }

    // chart for a collision group: w = (z - mean)/scale followed by
    // w -> 1/(w - g); the group separates, everything else lands near 0.
    PosMatrix rescaled_chart(const PosMatrix& pos, const std::vector<int>& group) const {
        size_t T = nsamples();
        size_t n = pos[0].size();
        std::vector<Complex> center, scale;
        center.reserve(T);
        for (size_t t = 0; t < T; ++t) {
            Complex c(cfg.prec);
            for (int j : group) c += pos[t][j];
            center.push_back(c / FieldOps<Complex>::from_long(static_cast<long>(group.size()), c));
        }
        // reference member: farthest from the mean at the last sample
        int ref = group[0];
        double best = -1.0;
        for (int j : group) {
            double d = FieldOps<Complex>::mag(pos[T - 1][j] - center[T - 1]);
            if (d > best) {
                best = d;
                ref = j;
            }
        }
        for (size_t t = 0; t < T; ++t) scale.push_back(pos[t][ref] - center[t]);
        PosMatrix w(T, std::vector<Complex>());
        for (size_t t = 0; t < T; ++t) {
            w[t].reserve(n);
            for (size_t j = 0; j < n; ++j) w[t].push_back((pos[t][j] - center[t]) / scale[t]);
        }
        // flip so the far complement comes to a finite spot (0 = image of inf)
        double rho = 1.0;
        for (size_t t = 0; t < T; ++t)
            for (int j : group) rho = std::max(rho, FieldOps<Complex>::mag(w[t][j]));
        Complex g(0.0, 3.0 * rho, cfg.prec);
        for (size_t t = 0; t < T; ++t)
            for (size_t j = 0; j < n; ++j) {
                Complex d = w[t][j] - g;
                w[t][j] = FieldOps<Complex>::one_like(d) / d;
            }
        return w;
    }

    // Build the component seen at this chart.  `members` separate here;
    // `complement` (possibly empty at the root) collapses to phi(inf) = 0.
    int build(const PosMatrix& pos, const std::vector<int>& members,
              const std::vector<int>& complement, int depth) {
        if (depth > 16)
            throw Error(ErrorCode::no_limit, "degeneration: nested collisions too deep");
        // extrapolated member limits in this chart
        std::map<int, Complex> limit;
        for (int j : members) {
            std::vector<Complex> seq;
            for (size_t t = 0; t < nsamples(); ++t) seq.push_back(pos[t][j]);
            SeqLimit l = extrapolate_seq(seq);
            if (!l.finite())
                throw Error(ErrorCode::no_limit, "degeneration: label " + std::to_string(j) +
                                                     " has no positional limit in its chart");
            limit.emplace(j, l.value);
        }
        std::vector<Complex> lims;
        for (int j : members) lims.push_back(limit.at(j));
        auto groups = detail::cluster_labels(lims, members, cfg.cluster_tol);
        if (groups.size() == 1 && members.size() > 1 && complement.empty())
            throw Error(ErrorCode::internal, "degeneration: unseparated root cluster");

        int my_id = static_cast<int>(comps.size());
        comps.emplace_back();

        TreeComp comp;
        comp.parent = -1;  // linked by caller
        if (!complement.empty()) {
            TreePunc pp;
            pp.pos = CPoint(Complex(cfg.prec));  // phi(inf) = 0
            pp.far_labels = complement;
            if (complement.size() == 1) {
                pp.kind = TreePunc::own_label;
                pp.label = complement[0];
                std::vector<Complex> seq;
                for (size_t t = 0; t < nsamples(); ++t) seq.push_back(index_at(t, complement[0]));
                SeqLimit l = extrapolate_seq(seq);
                if (l.status == SeqStatus::no_limit)
                    throw Error(ErrorCode::no_limit, "degeneration: index of label " +
                                                         std::to_string(complement[0]) +
                                                         " does not converge");
                pp.index = l.value;
                pp.index_inf = l.status == SeqStatus::diverged;
                pp.index_err = l.err_est;
                comp.own_labels.push_back(complement[0]);
            } else {
                pp.kind = TreePunc::toward_parent;
                Complex zero(cfg.prec);
                group_moments(pos, complement, zero, static_cast<int>(complement.size()),
                              pp.moments, pp.moment_inf, pp.moment_err);
            }
            comp.punctures.push_back(std::move(pp));
        }
        for (auto& g : groups) {
            if (g.size() == 1) {
                int j = g[0];
                TreePunc pp;
                pp.kind = TreePunc::own_label;
                pp.label = j;
                pp.pos = CPoint(limit.at(j));
                std::vector<Complex> seq;
                for (size_t t = 0; t < nsamples(); ++t) seq.push_back(index_at(t, j));
                SeqLimit l = extrapolate_seq(seq);
                if (l.status == SeqStatus::no_limit)
                    throw Error(ErrorCode::no_limit, "degeneration: index of label " +
                                                         std::to_string(j) + " does not converge");
                pp.index = l.value;
                pp.index_inf = l.status == SeqStatus::diverged;
                pp.index_err = l.err_est;
                comp.own_labels.push_back(j);
                comp.punctures.push_back(std::move(pp));
            } else {
                // collision point on this component, resolved in a child chart
                std::vector<Complex> mean_seq;
                for (size_t t = 0; t < nsamples(); ++t) {
                    Complex c(cfg.prec);
                    for (int j : g) c += pos[t][j];
                    mean_seq.push_back(c / FieldOps<Complex>::from_long(static_cast<long>(g.size()), c));
                }
                SeqLimit lp = extrapolate_seq(mean_seq);
                TreePunc pp;
                pp.kind = TreePunc::toward_child;
                pp.pos = CPoint(lp.value);
                pp.far_labels = g;
                group_moments(pos, g, lp.value, static_cast<int>(g.size()), pp.moments,
                              pp.moment_inf, pp.moment_err);
                PosMatrix sub = rescaled_chart(pos, g);
                std::vector<int> sub_complement;
                for (size_t j = 0; j < pos[0].size(); ++j)
                    if (std::find(g.begin(), g.end(), static_cast<int>(j)) == g.end())
                        sub_complement.push_back(static_cast<int>(j));
                int child = build(sub, g, sub_complement, depth + 1);
                comps[child].parent = my_id;
                pp.child = child;
                comp.punctures.push_back(std::move(pp));
            }
        }
        // crushed iff an infinite index or an infinite moment shows up here
        for (auto& pp : comp.punctures) {
            if (pp.kind == TreePunc::own_label && pp.index_inf) comp.crushed = true;
            for (bool b : pp.moment_inf)
                if (b) comp.crushed = true;
        }
        comps[my_id] = std::move(comp);
        return my_id;
    }
};

}  // namespace detail

namespace detail {

// Turn the structure tree into a rational function with nodes: adjacent
// crushed components contract into one crushed part per region (the crush
// data allow several presentations; the contracted one satisfies the
// node conditions), ordinary components get maps rebuilt from their
// extrapolated decorations.
inline NodedFunction<Complex> assemble_tree(const TreeBuild& tb, const DegenConfig& cfg,
                                            int& ordinary_count, int& crushed_count,
                                            std::vector<int>& bouquet_levels) {
    const auto& comps = tb.comps;
    size_t nc = comps.size();
    // edges of the component tree
    std::vector<std::pair<int, int>> edges;
    for (size_t i = 0; i < nc; ++i)
        if (comps[i].parent >= 0) edges.emplace_back(comps[i].parent, static_cast<int>(i));
    for (auto& l : tb.root_link) edges.push_back(l);

    // crushed regions: union-find over crushed components along edges
    std::vector<int> region(nc);
    std::iota(region.begin(), region.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (region[x] != x) x = region[x] = region[region[x]];
        return x;
    };
    for (auto& e : edges)
        if (comps[e.first].crushed && comps[e.second].crushed)
            region[find(e.first)] = find(e.second);

    std::map<int, std::vector<int>> regions;  // root -> crushed members
    for (size_t i = 0; i < nc; ++i)
        if (comps[i].crushed) regions[find(static_cast<int>(i))].push_back(static_cast<int>(i));

    // region levels: labels homed on the region's components
    std::map<int, std::vector<int>> region_labels;
    for (auto& [root, members] : regions) {
        std::vector<int> labs;
        for (int m : members)
            for (int l : comps[m].own_labels) labs.push_back(l);
        std::sort(labs.begin(), labs.end());
        region_labels[root] = std::move(labs);
    }
    ordinary_count = 0;
    crushed_count = static_cast<int>(regions.size());
    for (auto& [root, labs] : region_labels) {
        (void)root;
        bouquet_levels.push_back(static_cast<int>(labs.size()));
    }
    std::sort(bouquet_levels.begin(), bouquet_levels.end());

    // neighbor lookup across an edge: the component on the other side
    auto other_side = [&](int comp, const TreePunc& pp) -> int {
        if (pp.kind == TreePunc::toward_child) return pp.child;
        // toward_parent: the tree parent, or the root link partner
        if (comps[comp].parent >= 0) return comps[comp].parent;
        for (auto& l : tb.root_link) {
            if (l.first == comp) return l.second;
            if (l.second == comp) return l.first;
        }
        throw Error(ErrorCode::internal, "assemble: dangling far-side puncture");
    };

    NodedFunction<Complex> nf;
    auto& sph = nf.structure.crush.sphere;
    int next_pid = 0;

    // ordinary components first, in tree order
    std::map<int, int> new_comp_id;
    struct PuncRef {
        int tree_comp;
        size_t tree_punc;
        int pid;
    };
    std::vector<PuncRef> toward_region_puncs;  // ordinary punctures meeting a region
    std::map<int, std::map<int, int>> node_pid;  // tree comp -> neighbor comp -> pid

    for (size_t i = 0; i < nc; ++i) {
        if (comps[i].crushed) continue;
        SphereComponent<Complex> sc;
        sc.id = static_cast<int>(sph.components.size());
        new_comp_id[static_cast<int>(i)] = sc.id;
        ++ordinary_count;
        for (size_t q = 0; q < comps[i].punctures.size(); ++q) {
            const TreePunc& pp = comps[i].punctures[q];
            Puncture<Complex> out;
            out.id = next_pid++;
            out.pos = pp.pos;
            if (pp.kind != TreePunc::own_label) {
                int nb = other_side(static_cast<int>(i), pp);
                if (comps[nb].crushed)
                    toward_region_puncs.push_back({static_cast<int>(i), q, out.id});
                else
                    node_pid[static_cast<int>(i)][nb] = out.id;
            }
            sc.punctures.push_back(std::move(out));
        }
        sph.components.push_back(std::move(sc));
        nf.structure.crush.ordinary_ids.push_back(new_comp_id[static_cast<int>(i)]);
    }
    if (ordinary_count == 0)
        throw Error(ErrorCode::no_limit,
                    "degeneration: every component crushed (empty limit point)");

    // retained nodes between ordinary components
    for (auto& e : edges) {
        if (comps[e.first].crushed || comps[e.second].crushed) continue;
        int pa = node_pid.at(e.first).at(e.second);
        int pb = node_pid.at(e.second).at(e.first);
        nf.structure.crush.retained_nodes.push_back(static_cast<int>(sph.nodes.size()));
        sph.nodes.push_back({pa, pb});
    }
    // crushed regions become single crushed components
    for (auto& [root, members] : regions) {
        SphereComponent<Complex> sc;
        sc.id = static_cast<int>(sph.components.size());
        std::set<int> member_set(members.begin(), members.end());
        // nodal punctures: one per ordinary puncture adjacent to the region
        for (auto& pr : toward_region_puncs) {
            const TreePunc& pp = comps[pr.tree_comp].punctures[pr.tree_punc];
            int nb = other_side(pr.tree_comp, pp);
            if (!member_set.count(nb) && find(nb) != root) continue;
            Puncture<Complex> q;
            q.id = next_pid++;
            q.pos = CPoint(Complex(static_cast<double>(q.id), -1.0, cfg.prec));
            sph.nodes.push_back({pr.pid, q.id});
            sc.punctures.push_back(std::move(q));
        }
        for (size_t k = 0; k < region_labels[root].size(); ++k) {
            Puncture<Complex> q;
            q.id = next_pid++;
            q.pos = CPoint(Complex(static_cast<double>(q.id), 1.0, cfg.prec));
            sc.punctures.push_back(std::move(q));
        }
        sph.components.push_back(std::move(sc));
    }
    sph.level_n = static_cast<int>(tb.samples->front().data.entries.size());

    // marking: q punctures carry their own label, bouquets their region labels
    std::map<int, std::vector<int>> labels_of_pid;
    for (size_t i = 0; i < nc; ++i) {
        if (comps[i].crushed) continue;
        int cid = new_comp_id[static_cast<int>(i)];
        for (size_t q = 0; q < comps[i].punctures.size(); ++q) {
            const TreePunc& pp = comps[i].punctures[q];
            int pid = sph.components[cid].punctures[q].id;
            if (pp.kind == TreePunc::own_label) {
                labels_of_pid[pid] = {pp.label + 1};
            } else {
                int nb = other_side(static_cast<int>(i), pp);
                if (comps[nb].crushed) {
                    std::vector<int> labs = region_labels[find(nb)];
                    for (auto& l : labs) ++l;
                    labels_of_pid[pid] = std::move(labs);
                }
            }
        }
    }
    CrushData cd = crush_data(nf.structure.crush);
    auto xs = x_enumeration(nf.structure.crush, cd);
    for (auto& x : xs) {
        if (x.is_bouquet)
            nf.structure.marking.parts.push_back(
                labels_of_pid.at(cd.bouquets[x.bouquet_index].punctures[0]));
        else
            nf.structure.marking.parts.push_back(labels_of_pid.at(x.puncture_id));
    }

    // maps on ordinary components from the extrapolated decorations
    for (size_t i = 0; i < nc; ++i) {
        if (comps[i].crushed) continue;
        std::vector<PolePart<Complex>> parts;
        for (auto& pp : comps[i].punctures) {
            if (pp.pos.is_inf())
                throw Error(ErrorCode::internal, "assemble: puncture at infinity in a chart");
            if (pp.kind == TreePunc::own_label) {
                if (pp.index_inf)
                    throw Error(ErrorCode::internal, "assemble: infinite index on ordinary part");
                // an index below its own extrapolation noise means the
                // puncture is unfixed in the limit
                if (FieldOps<Complex>::mag(pp.index) <=
                    std::max(cfg.residual_tol, 8.0 * pp.index_err))
                    continue;
                parts.push_back({pp.pos.value(), {pp.index}});
            } else {
                int nb = other_side(static_cast<int>(i), pp);
                size_t order = comps[nb].crushed
                                   ? region_labels[find(nb)].size()
                                   : 1;
                std::vector<Complex> cs;
                std::vector<double> ce;
                for (size_t l = 0; l < order && l < pp.moments.size(); ++l) {
                    if (pp.moment_inf[l])
                        throw Error(ErrorCode::internal,
                                    "assemble: infinite moment on ordinary part");
                    cs.push_back(pp.moments[l]);
                    ce.push_back(pp.moment_err[l]);
                }
                // drop trailing entries indistinguishable from noise
                while (!cs.empty() && FieldOps<Complex>::mag(cs.back()) <=
                                          std::max(cfg.residual_tol, 8.0 * ce.back())) {
                    cs.pop_back();
                    ce.pop_back();
                }
                if (cs.empty()) continue;
                parts.push_back({pp.pos.value(), std::move(cs)});
            }
        }
        nf.maps.emplace(new_comp_id[static_cast<int>(i)],
                        map_from_principal_parts(parts, cfg.residual_tol));
    }
    return nf;
}

}  // namespace detail

// Deviation of each tracked sequence from its extrapolated limit, per
// sample; plot-ready and decreasing on the tail for convergent families.
inline std::vector<std::pair<long, double>> residual_trace_of(
    const std::vector<FamilySample>& samples, const DegenConfig& cfg) {
    std::vector<std::pair<long, double>> trace;
    detail::check_family(samples, 2);
    size_t n = samples[0].data.entries.size();
    std::vector<double> res(samples.size(), 0.0);
    auto track = [&](const std::vector<Complex>& seq) {
        SeqLimit l = extrapolate(seq, cfg.extrap());
        if (!l.finite()) return;  // divergent entries are excluded from the trace
        for (size_t t = 0; t < seq.size(); ++t)
            res[t] = std::max(res[t], FieldOps<Complex>::mag(seq[t] - l.value));
    };
    for (size_t j = 0; j < n; ++j) {
        std::vector<Complex> pseq, iseq;
        for (auto& s : samples) {
            pseq.push_back(s.data.entries[j].first);
            iseq.push_back(s.data.entries[j].second);
        }
        track(pseq);
        track(iseq);
    }
    for (size_t t = 0; t < samples.size(); ++t) trace.emplace_back(samples[t].k, res[t]);
    return trace;
}

struct DegenerationReport {
    std::vector<Cluster> top_clusters;
    bool assembled = false;
    std::optional<NodedFunction<Complex>> limit;
    std::string failure;
    std::vector<std::pair<long, double>> residual_trace;
    int ordinary_components = 0;
    int crushed_components = 0;
    std::vector<int> bouquet_levels;
    bool hint_matched = false;
    std::vector<std::string> notes;
};

// Full pipeline: structure tree, classification, contraction of adjacent
// crushed bubbles, assembly of component maps from the extrapolated
// decorations, and validation of the result.
inline DegenerationReport classify_and_assemble(
    const std::vector<FamilySample>& samples, const DegenConfig& cfg = {},
    const std::optional<MarkedCrush<Complex>>& hint = std::nullopt) {
    detail::check_family(samples, 3);
    DegenerationReport rep;
    rep.top_clusters = cluster_fixed_points(samples, cfg.cluster_tol, cfg);
    for (auto& c : rep.top_clusters)
        if (c.size() > 1) limit_decoration(samples, c, cfg);

    detail::TreeBuild tb;
    tb.samples = &samples;
    tb.cfg = cfg;

    size_t n = samples[0].data.entries.size();
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);

    try {
        detail::PosMatrix pos = detail::positions_of(samples);
        // top-level split
        auto limits = extrapolate_points(samples, cfg);
        auto groups = detail::cluster_labels(limits, all, cfg.cluster_tol);
        int renorms = 0;
        while (groups.size() == 1 && renorms < 3) {
            // everything collides at one point: renormalize the whole family
            pos = tb.rescaled_chart(pos, all);
            std::vector<Complex> lims;
            for (size_t j = 0; j < n; ++j) {
                std::vector<Complex> seq;
                for (size_t t = 0; t < samples.size(); ++t) seq.push_back(pos[t][j]);
                SeqLimit l = extrapolate(seq, cfg.extrap());
                if (!l.finite())
                    throw Error(ErrorCode::no_limit,
                                "degeneration: renormalized positions do not converge");
                lims.push_back(l.value);
            }
            groups = detail::cluster_labels(lims, all, cfg.cluster_tol);
            ++renorms;
        }
        if (groups.size() == 1)
            throw Error(ErrorCode::no_limit, "degeneration: family does not separate");

        if (groups.size() == 2 &&
            std::min(groups[0].size(), groups[1].size()) == 1) {
            // a lone label against the rest: the limit is carried by the
            // big cluster's sphere with the lone label at the far slot
            const auto& big = groups[0].size() > 1 ? groups[0] : groups[1];
            const auto& lone = groups[0].size() > 1 ? groups[1] : groups[0];
            detail::PosMatrix sub = tb.rescaled_chart(pos, big);
            tb.build(sub, big, lone, 0);
        } else if (groups.size() == 2) {
            detail::PosMatrix sub_a = tb.rescaled_chart(pos, groups[0]);
            int a = tb.build(sub_a, groups[0], groups[1], 0);
            detail::PosMatrix sub_b = tb.rescaled_chart(pos, groups[1]);
            int b = tb.build(sub_b, groups[1], groups[0], 0);
            tb.root_link.emplace_back(a, b);
        } else {
            tb.build(pos, all, {}, 0);
        }

        rep.limit = detail::assemble_tree(tb, cfg, rep.ordinary_components,
                                          rep.crushed_components, rep.bouquet_levels);
        rep.assembled = true;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::no_limit) {
            rep.failure = e.what();
            rep.assembled = false;
        } else {
            throw;
        }
    }

    if (rep.assembled) {
        auto vr = validate_noded_function(
            *rep.limit, ValidateOpts(cfg.residual_tol, 10 * cfg.residual_tol));
        if (!vr.ok()) {
            std::ostringstream os;
            os << "assembled object failed validation: " << vr.violations.front();
            rep.failure = os.str();
            rep.assembled = false;
            rep.notes = vr.violations;
        }
    }
    if (rep.assembled && hint) {
        rep.hint_matched = canonical_equal(rep.limit->structure, *hint, cfg.residual_tol);
    }
    rep.residual_trace = residual_trace_of(samples, cfg);
    return rep;
}

}  // namespace nrat
