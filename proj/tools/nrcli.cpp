// Command-line front end: parametrize fixed-point data, degenerate
// families, reopen noded functions, and run the boundary-obstruction
// sweeps.  All I/O is JSON (schema "noded-rational/1") plus CSV residual
// traces; exit codes: 0 ok, 2 validation, 3 no limit, 4 unsupported,
// 5 budget exhausted.

#include <CLI11.hpp>

#include "nrat/json_io.hpp"

#include <iostream>

using namespace nrat;

namespace {

int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::validation: return 2;
        case ErrorCode::no_limit: return 3;
        case ErrorCode::unsupported: return 4;
        case ErrorCode::budget: return 5;
        case ErrorCode::internal: return 1;
    }
    return 1;
}

void emit(const Json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << std::endl;
    else
        save_json(out_path, j);
}

void emit_trace(const std::vector<std::pair<long, double>>& trace, const std::string& path) {
    if (path.empty()) return;
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::validation, "cannot write " + path);
    write_residual_csv(os, trace);
}

struct CommonOpts {
    long precision = kDefaultPrec;
    double tol = 1e-4;
    std::string out, trace;

    void attach(CLI::App* app) {
        app->add_option("--precision", precision, "working precision in bits (>= 64)");
        app->add_option("--tol", tol, "clustering/validation tolerance");
        app->add_option("--out", out, "output JSON path (default: stdout)");
        app->add_option("--trace", trace, "residual trace CSV path");
    }
    void check() const {
        if (precision < 64)
            throw Error(ErrorCode::validation, "precision must be at least 64 bits");
        if (tol <= 0) throw Error(ErrorCode::validation, "tolerance must be positive");
    }
};

int cmd_parametrize(const CommonOpts& o, const std::string& in_path) {
    o.check();
    Json j = load_json(in_path);
    auto data = fixed_point_data_from_json(j, o.precision);
    auto f = from_fixed_point_data(data);
    Json indices = Json::array();
    for (auto& [pt, idx] : data.entries) {
        (void)idx;
        indices.push_back(to_json(dynamical_index(f, CPoint(pt))));
    }
    Json out{{"schema", kSchemaTag},
             {"kind", "rational-map"},
             {"num", to_json(f.num)},
             {"den", to_json(f.den)},
             {"degree", f.degree()},
             {"indices", indices}};
    emit(out, o.out);
    return 0;
}

int cmd_degenerate(const CommonOpts& o, const std::string& family_path,
                   const std::string& builtin, long k0, int samples) {
    o.check();
    DegenConfig cfg;
    cfg.prec = o.precision;
    cfg.cluster_tol = o.tol;
    std::vector<FamilySample> fam;
    std::optional<MarkedCrush<Complex>> hint;
    if (!builtin.empty()) {
        if (builtin == "d5-boundary") {
            auto t = default_d5_targets(o.precision);
            fam = build_d5_schedule(t, k0, samples);
            hint = d5_target(t).structure;
        } else {
            throw Error(ErrorCode::validation, "unknown builtin family '" + builtin +
                                                   "' (available: d5-boundary)");
        }
    } else if (!family_path.empty()) {
        fam = family_from_json(load_json(family_path), o.precision);
    } else {
        throw Error(ErrorCode::validation, "degenerate needs --family or --builtin");
    }
    auto rep = classify_and_assemble(fam, cfg, hint);
    Json out = to_json(rep);
    if (hint) out["target_matched"] = rep.hint_matched;
    emit(out, o.out);
    emit_trace(rep.residual_trace, o.trace);
    return rep.assembled ? 0 : 3;
}

int cmd_reopen(const CommonOpts& o, const std::string& in_path, int steps, double ratio) {
    o.check();
    auto nf = noded_function_from_json(load_json(in_path), o.precision);
    ReopeningPlan plan;
    plan.steps = steps;
    plan.ratio = ratio;
    plan.prec = o.precision;
    auto fams = reopen_family(nf, plan);
    if (fams.size() == 1) {
        emit(to_json(fams.begin()->second), o.out);
    } else {
        Json set = Json::object();
        for (auto& [cid, fam] : fams) set[std::to_string(cid)] = to_json(fam);
        emit(Json{{"schema", kSchemaTag}, {"kind", "family-set"}, {"families", set}}, o.out);
    }
    return 0;
}

int cmd_obstruction(const CommonOpts& o, const std::string& target, SweepConfig cfg) {
    o.check();
    if (target == "d6-pinned") {
        auto rep = d6_pinned_check();
        Json grid = Json::array();
        for (auto& [e1, e2, r] : rep.grid) grid.push_back(Json::array({e1, e2, r}));
        emit(Json{{"schema", kSchemaTag},
                  {"kind", "pinned-check-report"},
                  {"min_residual", rep.min_residual},
                  {"grid", grid},
                  {"note", "numerical evidence at desk scale, not a proof"}},
             o.out);
        return 0;
    }
    if (target == "d5-control")
        cfg.d5_control = true;
    else if (target != "d6-level3")
        throw Error(ErrorCode::validation,
                    "unknown target '" + target +
                        "' (available: d6-level3, d5-control, d6-pinned)");
    auto rep = d6_sweep(cfg);
    emit(to_json(rep, cfg), o.out);
    if (!o.trace.empty()) {
        std::vector<std::pair<long, double>> tr;
        for (size_t i = 0; i < rep.stage_minima.size(); ++i)
            tr.emplace_back(static_cast<long>(i), rep.stage_minima[i]);
        emit_trace(tr, o.trace);
    }
    return rep.partial ? 5 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rational functions with nodes: parametrization, degeneration, "
                 "reopening and boundary obstruction experiments"};
    app.require_subcommand(1);

    CommonOpts po;
    std::string p_in;
    auto* parametrize = app.add_subcommand(
        "parametrize", "build a rational map from fixed-point/index data");
    parametrize->add_option("--in", p_in, "fixed-point data JSON")->required();
    po.attach(parametrize);

    CommonOpts dg;
    std::string d_family, d_builtin;
    long d_k0 = 16;
    int d_samples = 7;
    auto* degenerate = app.add_subcommand(
        "degenerate", "cluster, extrapolate and assemble the limit of a family");
    degenerate->add_option("--family", d_family, "family JSON");
    degenerate->add_option("--builtin", d_builtin, "named built-in family (d5-boundary)");
    degenerate->add_option("--k0", d_k0, "first schedule parameter for built-ins");
    degenerate->add_option("--samples,--schedule", d_samples,
                           "schedule length for built-ins");
    dg.attach(degenerate);

    CommonOpts ro;
    std::string r_in;
    int r_steps = 14;
    double r_ratio = 0.5;
    auto* reopen = app.add_subcommand(
        "reopen", "split singular punctures into families of generic maps");
    reopen->add_option("--in", r_in, "noded-function JSON")->required();
    reopen->add_option("--steps,--schedule", r_steps, "schedule length");
    reopen->add_option("--ratio", r_ratio, "schedule contraction ratio");
    ro.attach(reopen);

    CommonOpts ob;
    std::string o_target = "d6-level3";
    SweepConfig sw;
    auto* obstruction = app.add_subcommand(
        "obstruction", "sweep for approximating families of a boundary target");
    obstruction->add_option("--target", o_target,
                            "d6-level3 | d5-control | d6-pinned");
    obstruction->add_option("--starts", sw.starts, "multi-start count");
    obstruction->add_option("--stages,--schedule", sw.stages,
                            "shrinking schedule length");
    obstruction->add_option("--evals", sw.evals_per_start, "pattern-search budget per start");
    obstruction->add_option("--budget", sw.total_budget, "global evaluation cap (-1 = none)");
    obstruction->add_option("--seed", sw.seed, "random seed");
    obstruction->add_option("--jobs", sw.jobs, "parallel workers");
    obstruction->add_option("--margin", sw.margin, "evidence margin");
    obstruction->add_flag("--fix-lambda-sum", sw.fix_lambda_sum,
                          "pin the bouquet index sum to -3 (d6 only)");
    ob.attach(obstruction);

    CLI11_PARSE(app, argc, argv);

    try {
        if (parametrize->parsed()) return cmd_parametrize(po, p_in);
        if (degenerate->parsed())
            return cmd_degenerate(dg, d_family, d_builtin, d_k0, d_samples);
        if (reopen->parsed()) return cmd_reopen(ro, r_in, r_steps, r_ratio);
        if (obstruction->parsed()) return cmd_obstruction(ob, o_target, sw);
    } catch (const Error& e) {
        Json err{{"schema", kSchemaTag},
                 {"kind", "error"},
                 {"message", e.what()},
                 {"exit", exit_code(e.code())}};
        std::cout << err.dump(2) << std::endl;
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 1;
}
