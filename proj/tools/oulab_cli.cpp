// oulab: reductions, eigenfunction solves, residual surveys, Monte Carlo checks and the
// acceptance suite from the command line.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure,
// 3 a check or acceptance criterion failed.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oulab/acceptance.hpp"
#include "oulab/eigenfn/weyl.hpp"
#include "oulab/lift_mc.hpp"
#include "oulab/survey.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace oulab;

constexpr int kOk = 0, kConfig = 1, kNumeric = 2, kFailed = 3;

/// Flags shared by reduce, eigen and survey; applied on top of --config.
struct SourceFlags {
    std::string config, builtin, model, gamma, q, reduction;

    void add(CLI::App* app) {
        app->add_option("--config", config, "key = value configuration file");
        app->add_option("--builtin", builtin, "builtin model: demo1d, demo2d_iso, demo2d_general, bigmodel");
        app->add_option("--model", model, "model file (n, A, B, optional gamma, x0)");
        app->add_option("--gamma", gamma, "one-dimensional reduction without a model: eigenvalue gamma < 0");
        app->add_option("--q", q, "one-dimensional reduction without a model: variance rate q > 0");
        app->add_option("--reduction", reduction, "auto, 1d or 2d");
    }

    SurveyConfig resolve(const KeyValues& extra) const {
        SurveyConfig cfg;
        if (!config.empty()) cfg.apply(KeyValues::load(config), config);
        if (!builtin.empty() || !model.empty() || !gamma.empty() || !q.empty()) {
            cfg.builtin.clear();
            cfg.model_file.clear();
            cfg.gamma.reset();
            cfg.q.reset();
        }
        KeyValues kv = extra;
        if (!builtin.empty()) kv.set("builtin", builtin);
        if (!model.empty()) kv.set("model", model);
        if (!gamma.empty()) kv.set("gamma", gamma);
        if (!q.empty()) kv.set("q", q);
        if (!reduction.empty()) kv.set("reduction", reduction);
        cfg.apply(kv, "command line");
        return cfg;
    }
};

json mat_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

std::string complex_text(cplx z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
    return buf;
}

void emit(const json& j, const std::string& path) {
    if (path.empty()) std::cout << j.dump(2) << "\n";
    else write_file(path, j.dump(2) + "\n");
}

int cmd_reduce(const SourceFlags& src, const std::string& out_json) {
    const SurveyConfig cfg = src.resolve({});
    const SurveyProblem p = resolve_problem(cfg);
    json j;
    j["model"] = p.model_name;
    bool ok = true;
    if (p.kind == ProblemKind::one_d) {
        j["reduction"] = "1d";
        j["gamma"] = p.spec1.gamma;
        j["q"] = p.spec1.q;
        if (!cfg.gamma) {
            const ModelSource m = survey_model(cfg);
            const IdentityReport r = variance_identity_check(p.spec1, m.model);
            j["variance_identity"] = {{"projected_variance", r.lhs}, {"closed_form", r.rhs}, {"relative_deviation", r.deviation},
                                      {"passed", r.passed}};
            ok = r.passed;
        }
    } else {
        j["reduction"] = p.kind == ProblemKind::two_d_isotropic ? "2d isotropic" : "2d general";
        j["a"] = p.spec2.a;
        j["b"] = p.spec2.b;
        j["R"] = mat_json(p.spec2.r);
        const ModelSource m = survey_model(cfg);
        const RinfReport r = rinf_identity_check(p.spec2, m.model, {0.1, 0.5, 1.0, 2.0});
        j["covariance_identity"] = {{"R_inf", mat_json(r.rinf)}, {"finite_s_deviation", r.finite_s_deviation},
                                    {"rinf_deviation", r.rinf_deviation}, {"passed", r.passed}};
        ok = r.passed;
    }
    emit(j, out_json);
    return ok ? kOk : kFailed;
}

int cmd_eigen(const SourceFlags& src, const std::string& lambda_text, const std::string& times, const std::string& out_json) {
    KeyValues extra;
    if (!times.empty()) extra.set("times", times);
    const SurveyConfig cfg = src.resolve(extra);
    const SurveyProblem p = resolve_problem(cfg);
    const cplx lambda = parse_complex(lambda_text, "--lambda");
    if (!(lambda.real() < 0.0)) throw ConfigError("--lambda must lie in the open left half-plane");
    eigenfn::ResidualReport rep;
    std::string method;
    if (p.kind == ProblemKind::one_d) {
        eigenfn::Solve1DOptions o;
        o.rtol = cfg.ode_rtol;
        o.atol = cfg.ode_atol;
        rep = eigenfn::report_1d(p.spec1, eigenfn::solve_1d(p.spec1, lambda, o), cfg.times, cfg.gen_tol, cfg.semi_tol, cfg.quad);
        method = "1d";
    } else if (p.kind == ProblemKind::two_d_isotropic) {
        eigenfn::Solve2DOptions o;
        o.rtol = cfg.ode_rtol;
        o.atol = cfg.ode_atol;
        rep = eigenfn::report_2d(p.spec2, eigenfn::solve_2d_isotropic(p.spec2, lambda, std::nullopt, o), cfg.times, cfg.gen_tol,
                                 cfg.semi_tol, cfg.quad);
        method = "2d isotropic";
    } else {
        const auto w = eigenfn::weyl_residual_minimize(p.spec2, lambda);
        rep = w;
        rep.passed = w.gen_residual <= cfg.weyl_tol;
        method = w.used_polynomial ? "2d polynomial" : "2d weyl";
    }
    std::printf("lambda=%s method=%s gen_residual=%.6e", complex_text(lambda).c_str(), method.c_str(), rep.gen_residual);
    for (const auto& [t, r] : rep.semigroup_residual) std::printf(" semi_residual(t=%g)=%.6e", t, r);
    if (p.kind != ProblemKind::two_d_general) std::printf(" l1_norm=%.12g", rep.l1_norm);
    std::printf(" pass=%d\n", int(rep.passed));
    if (!out_json.empty()) {
        json j;
        j["lambda_re"] = lambda.real();
        j["lambda_im"] = lambda.imag();
        j["method"] = method;
        j["gen_residual"] = rep.gen_residual;
        json semi = json::object();
        for (const auto& [t, r] : rep.semigroup_residual) semi[format_g12(t)] = r;
        j["semi_residual"] = semi;
        j["l1_norm"] = oulab::detail::finite_or_null(p.kind == ProblemKind::two_d_general ? NAN : rep.l1_norm);
        j["pass"] = rep.passed;
        write_file(out_json, j.dump(2) + "\n");
    }
    return rep.passed ? kOk : kFailed;
}

struct GridFlags {
    std::string re_min, re_max, im_min, im_max, step, times, seed, jobs, out_csv, out_json;

    void add(CLI::App* app) {
        app->add_option("--re-min", re_min);
        app->add_option("--re-max", re_max);
        app->add_option("--im-min", im_min);
        app->add_option("--im-max", im_max);
        app->add_option("--step", step);
        app->add_option("--times", times, "semigroup residual times, comma separated");
        app->add_option("--seed", seed);
        app->add_option("--jobs", jobs);
        app->add_option("--out-csv", out_csv);
        app->add_option("--out-json", out_json);
    }

    KeyValues keys() const {
        KeyValues kv;
        const std::pair<const char*, const std::string*> pairs[] = {
            {"re_min", &re_min}, {"re_max", &re_max}, {"im_min", &im_min}, {"im_max", &im_max}, {"step", &step},
            {"times", &times},   {"seed", &seed},     {"jobs", &jobs},     {"out_csv", &out_csv}, {"out_json", &out_json}};
        for (const auto& [k, v] : pairs)
            if (!v->empty()) kv.set(k, *v);
        return kv;
    }
};

int cmd_survey(const SourceFlags& src, const GridFlags& grid) {
    const SurveyConfig cfg = src.resolve(grid.keys());
    const SurveyReport rep = run_survey(cfg);
    if (!cfg.out_csv.empty()) emit_csv(rep, cfg.out_csv);
    if (!cfg.out_json.empty()) emit_json(rep, cfg.out_json);
    if (cfg.out_csv.empty() && cfg.out_json.empty()) std::cout << csv_string(rep);
    std::fprintf(stderr, "model=%s rows=%zu pass=%zu pass_rate=%s max_residual=%s runtime=%.2fs\n", rep.model_name.c_str(),
                 rep.summary.n_rows, rep.summary.n_pass, format_g12(rep.summary.pass_rate).c_str(),
                 format_g12(rep.summary.max_residual).c_str(), rep.runtime_s);
    return kOk;
}

int cmd_simulate(const std::string& name, const std::vector<double>& times, int paths, std::uint64_t seed, int jobs,
                 const std::string& out_json) {
    if (name == "demo2d_general") throw ConfigError("simulate supports demo1d, demo2d_iso and bigmodel");
    builtin(name);
    acceptance::Options o;
    o.builtins = {name};
    SimConfig cfg;
    cfg.n_paths = paths;
    cfg.jobs = jobs;
    cfg.validate();
    for (double t : times)
        if (!(t > 0.0)) throw ConfigError("--t values must be positive");
    json rows = json::array();
    bool all = true;
    std::uint64_t k = 0;
    for (const auto& tf : acceptance::bounded_test_functions(o)) {
        for (double t : times) {
            cfg.seed = mix_seed(seed ^ k++);
            const MCComparison c = invariance_test(*tf.model, tf.f, t, cfg);
            all = all && c.passed;
            std::printf("invariance  %-36s t=%-4g diff=%.3e band=%.3e %s\n", tf.label.c_str(), t, c.difference, c.band,
                        c.passed ? "pass" : "FAIL");
            rows.push_back({{"test", "invariance"}, {"function", tf.label}, {"t", t}, {"difference", c.difference},
                            {"band", c.band}, {"passed", c.passed}});
        }
        cfg.seed = mix_seed(seed ^ k++);
        const MCComparison c = pushforward_equivalence_check(*tf.model, tf.f, cfg);
        all = all && c.passed;
        std::printf("pushforward %-36s        diff=%.3e band=%.3e %s\n", tf.label.c_str(), c.difference, c.band,
                    c.passed ? "pass" : "FAIL");
        rows.push_back({{"test", "pushforward"}, {"function", tf.label}, {"difference", c.difference}, {"band", c.band},
                        {"passed", c.passed}});
    }
    if (!out_json.empty())
        write_file(out_json, json{{"builtin", name}, {"seed", seed}, {"n_paths", paths}, {"checks", rows}, {"all_passed", all}}
                                     .dump(2) + "\n");
    return all ? kOk : kFailed;
}

int cmd_check(const std::vector<std::string>& builtins, const std::vector<int>& only, std::uint64_t seed, int jobs,
              const std::string& out_json) {
    acceptance::Options o;
    o.seed = seed;
    o.jobs = jobs;
    o.builtins = builtins;
    if (jobs < 1) throw ConfigError("--jobs must be positive");
    std::vector<int> ids = only.empty() ? acceptance::criteria_for(o) : only;
    std::vector<acceptance::Result> results;
    bool ok = true;
    for (int id : ids) {
        results.push_back(acceptance::run_criterion(id, o));
        ok = ok && results.back().ok();
        std::fprintf(stderr, "%s\n", acceptance::result_line(results.back()).c_str());
    }
    const json j = acceptance::report_json(o, results);
    emit(j, out_json);
    std::fprintf(stderr, "%d/%zu criteria passed\n", int(j["summary"]["passed"]), results.size());
    return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ornstein-Uhlenbeck eigenfunction laboratory"};
    app.require_subcommand(1);

    SourceFlags src;
    std::string out_json, lambda, times;

    auto* reduce = app.add_subcommand("reduce", "reduce a model and check its covariance identities");
    src.add(reduce);
    reduce->add_option("--out-json", out_json);

    SourceFlags esrc;
    auto* eigen = app.add_subcommand("eigen", "solve L f = lambda f at one lambda and report residuals");
    esrc.add(eigen);
    eigen->add_option("--lambda", lambda, "eigenvalue, e.g. -0.5+0.3i")->required();
    eigen->add_option("--times", times, "semigroup residual times, comma separated");
    eigen->add_option("--out-json", out_json);

    SourceFlags ssrc;
    GridFlags grid;
    auto* survey = app.add_subcommand("survey", "residual survey over a lambda grid");
    ssrc.add(survey);
    grid.add(survey);

    std::string sim_builtin = "demo1d";
    std::vector<double> sim_times{0.5, 1.0};
    int sim_paths = 100000, jobs = 1;
    std::uint64_t seed = 42;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo invariance and pushforward checks on a builtin");
    simulate->add_option("--builtin", sim_builtin);
    simulate->add_option("--t", sim_times, "times for the invariance test")->delimiter(',');
    simulate->add_option("--paths", sim_paths);
    simulate->add_option("--seed", seed);
    simulate->add_option("--jobs", jobs);
    simulate->add_option("--out-json", out_json);

    std::vector<std::string> check_builtins;
    std::vector<int> criteria;
    auto* check = app.add_subcommand("check", "run the acceptance criteria on builtin models");
    check->add_option("--builtin", check_builtins, "restrict to these builtins (repeatable)");
    check->add_option("--criteria", criteria, "run only these criteria (1-9)")->delimiter(',');
    check->add_option("--seed", seed);
    check->add_option("--jobs", jobs);
    check->add_option("--out-json", out_json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kConfig;
    }

    try {
        if (*reduce) return cmd_reduce(src, out_json);
        if (*eigen) return cmd_eigen(esrc, lambda, times, out_json);
        if (*survey) return cmd_survey(ssrc, grid);
        if (*simulate) return cmd_simulate(sim_builtin, sim_times, sim_paths, seed, jobs, out_json);
        return cmd_check(check_builtins, criteria, seed, jobs, out_json);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumeric;
    }
}
