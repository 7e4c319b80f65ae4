#pragma once

// JSON schemas ("schema": "noded-rational/1").  Complex scalars serialize
// as two-element arrays of decimal strings, the point at infinity as the
// string "inf"; polynomials as coefficient arrays, lowest degree first.

#include <json.hpp>

#include "nrat/degeneration.hpp"
#include "nrat/obstruction.hpp"

#include <fstream>
#include <sstream>

namespace nrat {

using Json = nlohmann::json;

inline const char* kSchemaTag = "noded-rational/1";

// ---------------------------------------------------------------------------
// scalars

inline Json to_json(const Complex& z) { return Json::array({z.re().str(), z.im().str()}); }

inline Json to_json(const CPoint& p) {
    if (p.is_inf()) return Json("inf");
    return to_json(p.value());
}

inline Complex complex_from_json(const Json& j, Prec prec) {
    if (!j.is_array() || j.size() != 2)
        throw Error(ErrorCode::validation, "scalar: expected [re, im]");
    auto part = [&](const Json& v) -> Real {
        try {
            if (v.is_string()) return Real(v.get<std::string>(), prec);
            if (v.is_number()) return Real(v.get<double>(), prec);
        } catch (const std::invalid_argument& e) {
            throw Error(ErrorCode::validation, e.what());
        }
        throw Error(ErrorCode::validation, "scalar: parts must be decimal strings or numbers");
    };
    return Complex(part(j[0]), part(j[1]));
}

inline CPoint point_from_json(const Json& j, Prec prec) {
    if (j.is_string() && j.get<std::string>() == "inf") return CPoint::infinity();
    return CPoint(complex_from_json(j, prec));
}

inline Json to_json(const Poly<Complex>& p) {
    Json a = Json::array();
    for (int i = 0; i <= p.degree(); ++i) a.push_back(to_json(p[i]));
    return a;
}

inline Poly<Complex> poly_from_json(const Json& j, Prec prec) {
    if (!j.is_array()) throw Error(ErrorCode::validation, "poly: expected coefficient array");
    std::vector<Complex> c;
    for (auto& v : j) c.push_back(complex_from_json(v, prec));
    Poly<Complex> p(std::move(c));
    p.trim();
    return p;
}

// ---------------------------------------------------------------------------
// fixed-point data and families

inline Json to_json(const FixedPointData<Complex>& d) {
    Json entries = Json::array();
    for (auto& [pt, idx] : d.entries) entries.push_back(Json::array({to_json(pt), to_json(idx)}));
    return Json{{"schema", kSchemaTag}, {"kind", "fixed-point-data"}, {"entries", entries}};
}

inline FixedPointData<Complex> fixed_point_data_from_json(const Json& j, Prec prec) {
    if (!j.contains("entries") || !j["entries"].is_array())
        throw Error(ErrorCode::validation, "fixed-point-data: missing entries");
    FixedPointData<Complex> d;
    for (auto& e : j["entries"]) {
        if (!e.is_array() || e.size() != 2)
            throw Error(ErrorCode::validation, "fixed-point-data: entries are [point, index]");
        d.entries.emplace_back(complex_from_json(e[0], prec), complex_from_json(e[1], prec));
    }
    return d;
}

inline Json to_json(const std::vector<FamilySample>& fam) {
    Json samples = Json::array();
    for (auto& s : fam) {
        Json entries = Json::array();
        for (auto& [pt, idx] : s.data.entries)
            entries.push_back(Json::array({to_json(pt), to_json(idx)}));
        samples.push_back(Json{{"k", s.k}, {"entries", entries}});
    }
    return Json{{"schema", kSchemaTag}, {"kind", "family"}, {"samples", samples}};
}

inline std::vector<FamilySample> family_from_json(const Json& j, Prec prec) {
    if (!j.contains("samples") || !j["samples"].is_array())
        throw Error(ErrorCode::validation, "family: missing samples");
    std::vector<FamilySample> fam;
    for (auto& sj : j["samples"]) {
        FamilySample s;
        if (!sj.contains("k") || !sj.contains("entries"))
            throw Error(ErrorCode::validation, "family: samples carry k and entries");
        s.k = sj["k"].get<long>();
        for (auto& e : sj["entries"])
            s.data.entries.emplace_back(complex_from_json(e[0], prec),
                                        complex_from_json(e[1], prec));
        fam.push_back(std::move(s));
    }
    return fam;
}

// ---------------------------------------------------------------------------
// noded spheres and functions

inline Json to_json(const NodedFunction<Complex>& nf) {
    const auto& pc = nf.structure.crush;
    Json comps = Json::array();
    for (auto& c : pc.sphere.components) {
        Json ps = Json::array();
        for (auto& p : c.punctures) ps.push_back(Json{{"id", p.id}, {"pos", to_json(p.pos)}});
        comps.push_back(Json{{"id", c.id}, {"punctures", ps}});
    }
    Json nodes = Json::array();
    for (auto& n : pc.sphere.nodes) nodes.push_back(Json::array({n.first, n.second}));
    Json marking = Json::array();
    for (auto& part : nf.structure.marking.parts) marking.push_back(part);
    Json maps = Json::object();
    for (auto& [cid, f] : nf.maps)
        maps[std::to_string(cid)] = Json{{"num", to_json(f.num)}, {"den", to_json(f.den)}};
    return Json{{"schema", kSchemaTag}, {"kind", "noded-function"},
                {"components", comps},  {"nodes", nodes},
                {"ordinary", pc.ordinary_ids}, {"marking", marking},
                {"maps", maps}};
}

inline NodedFunction<Complex> noded_function_from_json(const Json& j, Prec prec) {
    NodedFunction<Complex> nf;
    auto& sph = nf.structure.crush.sphere;
    if (!j.contains("components"))
        throw Error(ErrorCode::validation, "noded-function: missing components");
    for (auto& cj : j["components"]) {
        SphereComponent<Complex> c;
        c.id = cj.at("id").get<int>();
        for (auto& pj : cj.at("punctures"))
            c.punctures.push_back(
                {pj.at("id").get<int>(), point_from_json(pj.at("pos"), prec)});
        sph.components.push_back(std::move(c));
    }
    if (j.contains("nodes"))
        for (auto& njn : j["nodes"]) sph.nodes.push_back({njn[0].get<int>(), njn[1].get<int>()});
    nf.structure.crush.ordinary_ids = j.at("ordinary").get<std::vector<int>>();
    for (auto& part : j.at("marking"))
        nf.structure.marking.parts.push_back(part.get<std::vector<int>>());
    // n and the retained nodes are derived, not stored
    long total = 0;
    for (auto& c : sph.components) total += static_cast<long>(c.punctures.size());
    sph.level_n = static_cast<int>(total - 2 * static_cast<long>(sph.nodes.size()));
    std::set<int> ordinary(nf.structure.crush.ordinary_ids.begin(),
                           nf.structure.crush.ordinary_ids.end());
    auto loc = detail::puncture_locator(sph);
    for (size_t ni = 0; ni < sph.nodes.size(); ++ni) {
        auto& nd = sph.nodes[ni];
        if (!loc.count(nd.first) || !loc.count(nd.second))
            throw Error(ErrorCode::validation, "noded-function: node references unknown puncture");
        bool a = ordinary.count(sph.components[loc[nd.first].first].id) > 0;
        bool b = ordinary.count(sph.components[loc[nd.second].first].id) > 0;
        if (a && b) nf.structure.crush.retained_nodes.push_back(static_cast<int>(ni));
    }
    if (j.contains("maps"))
        for (auto& [key, mj] : j["maps"].items())
            nf.maps.emplace(std::stoi(key),
                            RatMap<Complex>(poly_from_json(mj.at("num"), prec),
                                            poly_from_json(mj.at("den"), prec)));
    return nf;
}

// ---------------------------------------------------------------------------
// reports

inline Json to_json(const DegenerationReport& rep) {
    Json clusters = Json::array();
    for (auto& c : rep.top_clusters) {
        Json labels = Json::array();
        for (int l : c.labels) labels.push_back(l + 1);
        Json moments = Json::array();
        for (size_t i = 0; i < c.moments.size(); ++i)
            moments.push_back(c.moment_inf[i] ? Json("inf") : to_json(c.moments[i]));
        clusters.push_back(Json{{"labels", labels},
                                {"limit", to_json(c.limit)},
                                {"moments", moments}});
    }
    Json trace = Json::array();
    for (auto& [k, r] : rep.residual_trace) trace.push_back(Json::array({k, r}));
    Json out{{"schema", kSchemaTag},
             {"kind", "degeneration-report"},
             {"assembled", rep.assembled},
             {"clusters", clusters},
             {"ordinary_components", rep.ordinary_components},
             {"crushed_components", rep.crushed_components},
             {"bouquet_levels", rep.bouquet_levels},
             {"residual_trace", trace}};
    if (!rep.failure.empty()) out["failure"] = rep.failure;
    if (rep.limit) out["limit"] = to_json(*rep.limit);
    return out;
}

inline Json to_json(const SweepReport& rep, const SweepConfig& cfg) {
    return Json{{"schema", kSchemaTag},
                {"kind", "sweep-report"},
                {"target", cfg.d5_control ? "d5-control" : "d6-level3"},
                {"min_residual", rep.min_residual},
                {"stage_minima", rep.stage_minima},
                {"argmin", rep.argmin},
                {"evaluations", rep.evals},
                {"partial", rep.partial},
                {"margin", cfg.margin},
                {"exceeds_margin", rep.exceeds_margin},
                {"note", "numerical evidence at desk scale, not a proof"}};
}

inline void write_residual_csv(std::ostream& os,
                               const std::vector<std::pair<long, double>>& trace) {
    os << "k,residual\n";
    for (auto& [k, r] : trace) {
        std::ostringstream line;
        line.precision(17);
        line << k << "," << r << "\n";
        os << line.str();
    }
}

inline Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::validation, "cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::validation, std::string("JSON parse error: ") + e.what());
    }
    return j;
}

inline void save_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::validation, "cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace nrat
