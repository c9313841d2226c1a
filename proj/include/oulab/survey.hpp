#pragma once

// Residual surveys over a rectangular grid of eigenvalue candidates, with CSV and
// JSON reports.
//
// Config file (key = value, '#' comments):
//   builtin = demo1d          or  model = path/to/model.txt  or  gamma = -1 / q = 1
//   reduction = auto          auto | 1d | 2d
//   re_min = -2, re_max = -0.5, im_min = -2, im_max = 2, step = 0.5
//   times = 0.1, 0.2
//   gen_tol = 1e-8, semi_tol = 1e-3, weyl_tol = 0.1
//   gh_min_order = 16, gh_max_order = 512, quad_tol = 1e-10
//   ode_rtol = 1e-11, ode_atol = 1e-14
//   seed = 42, jobs = 1, out_csv = ..., out_json = ...

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "oulab/eigenfn/weyl.hpp"
#include "oulab/model_io.hpp"

namespace oulab {

struct SurveyConfig {
    std::string builtin;
    std::string model_file;
    std::optional<double> gamma;  // direct 1D reduction, no model
    std::optional<double> q;
    std::string reduction = "auto";
    double re_min = -2.0, re_max = -0.5, im_min = -2.0, im_max = 2.0, step = 0.5;
    std::vector<double> times{0.1, 0.2};
    double gen_tol = 1e-8;
    double semi_tol = 1e-3;
    double weyl_tol = 0.1;
    QuadSpec quad;
    double ode_rtol = 1e-11;
    double ode_atol = 1e-14;
    std::uint64_t seed = 42;
    int jobs = 1;
    std::string out_csv;
    std::string out_json;

    static const std::vector<std::string>& known_keys() {
        static const std::vector<std::string> keys{
            "builtin", "model",   "gamma",    "q",        "reduction",    "re_min",       "re_max",
            "im_min",  "im_max",  "step",     "times",    "gen_tol",      "semi_tol",     "weyl_tol",
            "gh_min_order", "gh_max_order", "quad_tol", "ode_rtol", "ode_atol", "seed", "jobs",
            "out_csv", "out_json"};
        return keys;
    }

    /// Applies keys on top of the current values.
    void apply(const KeyValues& kv, const std::string& origin) {
        kv.require_known(known_keys(), origin);
        auto real = [&](const char* k, double& dst) {
            if (kv.has(k)) dst = parse_real(kv.get(k), origin + ": " + k);
        };
        if (kv.has("builtin")) builtin = kv.get("builtin");
        if (kv.has("model")) model_file = kv.get("model");
        if (kv.has("gamma")) gamma = parse_real(kv.get("gamma"), origin + ": gamma");
        if (kv.has("q")) q = parse_real(kv.get("q"), origin + ": q");
        if (kv.has("reduction")) reduction = kv.get("reduction");
        real("re_min", re_min);
        real("re_max", re_max);
        real("im_min", im_min);
        real("im_max", im_max);
        real("step", step);
        if (kv.has("times")) times = parse_list(kv.get("times"), origin + ": times");
        real("gen_tol", gen_tol);
        real("semi_tol", semi_tol);
        real("weyl_tol", weyl_tol);
        if (kv.has("gh_min_order")) quad.min_order = int(parse_integer(kv.get("gh_min_order"), origin + ": gh_min_order"));
        if (kv.has("gh_max_order")) quad.max_order = int(parse_integer(kv.get("gh_max_order"), origin + ": gh_max_order"));
        real("quad_tol", quad.tol);
        real("ode_rtol", ode_rtol);
        real("ode_atol", ode_atol);
        if (kv.has("seed")) seed = static_cast<std::uint64_t>(parse_integer(kv.get("seed"), origin + ": seed"));
        if (kv.has("jobs")) jobs = int(parse_integer(kv.get("jobs"), origin + ": jobs"));
        if (kv.has("out_csv")) out_csv = kv.get("out_csv");
        if (kv.has("out_json")) out_json = kv.get("out_json");
    }

    static SurveyConfig from_keys(const KeyValues& kv, const std::string& origin = "config") {
        SurveyConfig c;
        c.apply(kv, origin);
        return c;
    }

    void validate() const {
        const int sources = int(!builtin.empty()) + int(!model_file.empty()) + int(gamma.has_value() || q.has_value());
        if (sources != 1) throw ConfigError("exactly one model source is required: builtin, model, or gamma/q");
        if (gamma.has_value() != q.has_value()) throw ConfigError("gamma and q must be given together");
        if (gamma && !(*gamma < 0.0)) throw ConfigError("gamma must be negative");
        if (q && !(*q > 0.0)) throw ConfigError("q must be positive");
        if (reduction != "auto" && reduction != "1d" && reduction != "2d")
            throw ConfigError("reduction must be auto, 1d or 2d");
        if (!(re_max < 0.0)) throw ConfigError("grid must lie in the open left half-plane");
        if (!(step > 0.0)) throw ConfigError("step must be positive");
        for (double t : times)
            if (!(t > 0.0)) throw ConfigError("times must be positive");
        if (!(gen_tol > 0.0) || !(semi_tol > 0.0) || !(weyl_tol > 0.0) || !(quad.tol > 0.0) || !(ode_rtol > 0.0) ||
            !(ode_atol > 0.0))
            throw ConfigError("tolerances must be positive");
        if (quad.min_order < 2 || quad.max_order < quad.min_order) throw ConfigError("invalid Gauss-Hermite orders");
        if (jobs < 1) throw ConfigError("jobs must be positive");
    }

    /// Canonical echo of everything that determines the report (not jobs or output paths).
    KeyValues echo() const {
        auto num = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        KeyValues kv;
        if (!builtin.empty()) kv.set("builtin", builtin);
        if (!model_file.empty()) kv.set("model", model_file);
        if (gamma) kv.set("gamma", num(*gamma));
        if (q) kv.set("q", num(*q));
        kv.set("reduction", reduction);
        kv.set("re_min", num(re_min));
        kv.set("re_max", num(re_max));
        kv.set("im_min", num(im_min));
        kv.set("im_max", num(im_max));
        kv.set("step", num(step));
        std::string ts;
        for (std::size_t i = 0; i < times.size(); ++i) ts += (i ? ", " : "") + num(times[i]);
        kv.set("times", ts);
        kv.set("gen_tol", num(gen_tol));
        kv.set("semi_tol", num(semi_tol));
        kv.set("weyl_tol", num(weyl_tol));
        kv.set("gh_min_order", std::to_string(quad.min_order));
        kv.set("gh_max_order", std::to_string(quad.max_order));
        kv.set("quad_tol", num(quad.tol));
        kv.set("ode_rtol", num(ode_rtol));
        kv.set("ode_atol", num(ode_atol));
        kv.set("seed", std::to_string(seed));
        return kv;
    }
};

/// Grid points, real part outer, both ascending: re_min + i step, im_min + j step.
inline std::vector<cplx> survey_grid(const SurveyConfig& cfg) {
    auto axis = [&](double lo, double hi) {
        std::vector<double> v;
        if (lo > hi) return v;
        const long n = static_cast<long>(std::floor((hi - lo) / cfg.step + 1e-9)) + 1;
        for (long i = 0; i < n; ++i) v.push_back(lo + double(i) * cfg.step);
        return v;
    };
    std::vector<cplx> out;
    for (double re : axis(cfg.re_min, cfg.re_max))
        for (double im : axis(cfg.im_min, cfg.im_max)) out.emplace_back(re, im == 0.0 ? 0.0 : im);
    return out;
}

enum class ProblemKind { one_d, two_d_isotropic, two_d_general };

struct SurveyProblem {
    ProblemKind kind = ProblemKind::one_d;
    std::string model_name;
    Spec1D spec1;
    Spec2D spec2;
};

inline ModelSource survey_model(const SurveyConfig& cfg) {
    if (!cfg.builtin.empty()) return builtin(cfg.builtin);
    return load_model(cfg.model_file);
}

/// Reduces the configured model; stability and nondegeneracy gates run here.
inline SurveyProblem resolve_problem(const SurveyConfig& cfg) {
    cfg.validate();
    SurveyProblem p;
    if (cfg.gamma) {
        if (cfg.reduction == "2d") throw ConfigError("gamma/q define a one-dimensional reduction");
        p.model_name = "direct";
        p.spec1 = {*cfg.gamma, *cfg.q, Vec::Ones(1)};
        return p;
    }
    const ModelSource src = survey_model(cfg);
    p.model_name = src.name;
    const bool two = src.complex_pair();
    if (cfg.reduction == "1d" && two) throw ConfigError("the model's eigenvalue is complex; use reduction = 2d");
    if (cfg.reduction == "2d" && !two) throw ConfigError("the model's eigenvalue is real; use reduction = 1d");
    stationary_cov(src.model);
    if (!two) {
        p.spec1 = reduce_1d(src.model, src.x0star.real(), src.gamma.real());
        return p;
    }
    p.spec2 = reduce_2d(src.model, src.x0star, src.gamma);
    const double r = 0.5 * p.spec2.r.trace();
    p.kind = (p.spec2.r - r * Mat::Identity(2, 2)).norm() <= 1e-10 * p.spec2.r.norm() ? ProblemKind::two_d_isotropic
                                                                                      : ProblemKind::two_d_general;
    return p;
}

struct SurveyRow {
    cplx lambda;
    double gen_residual = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> semi_residual;  // aligned with the configured times
    double l1_norm = std::numeric_limits<double>::quiet_NaN();
    double l2_trunc_ratio = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    std::string error;  // empty unless this row failed
};

struct SurveySummary {
    std::size_t n_rows = 0;
    std::size_t n_pass = 0;
    double pass_rate = std::numeric_limits<double>::quiet_NaN();  // undefined for an empty grid
    double max_residual = std::numeric_limits<double>::quiet_NaN();
};

struct SurveyReport {
    SurveyConfig config;
    std::string model_name;
    std::vector<SurveyRow> rows;
    SurveySummary summary;
    double runtime_s = 0.0;  // wall clock; not part of the emitted files
};

namespace detail {

inline double l2_ratio(const eigenfn::ResidualReport& rep) {
    double lo = 0.0, hi = 0.0, t_lo = std::numeric_limits<double>::infinity(), t_hi = 0.0;
    for (const auto& [key, v] : rep.lp_truncated_norms) {
        if (key.first != 2.0) continue;
        if (key.second < t_lo) t_lo = key.second, lo = v;
        if (key.second > t_hi) t_hi = key.second, hi = v;
    }
    return hi / lo;
}

inline SurveyRow survey_row(const SurveyProblem& p, const SurveyConfig& cfg, cplx lambda) {
    SurveyRow row;
    row.lambda = lambda;
    row.semi_residual.assign(cfg.times.size(), std::numeric_limits<double>::quiet_NaN());
    try {
        eigenfn::ResidualReport rep;
        if (p.kind == ProblemKind::one_d) {
            eigenfn::Solve1DOptions o;
            o.rtol = cfg.ode_rtol;
            o.atol = cfg.ode_atol;
            const auto ef = eigenfn::solve_1d(p.spec1, lambda, o);
            rep = eigenfn::report_1d(p.spec1, ef, cfg.times, cfg.gen_tol, cfg.semi_tol, cfg.quad);
        } else if (p.kind == ProblemKind::two_d_isotropic) {
            eigenfn::Solve2DOptions o;
            o.rtol = cfg.ode_rtol;
            o.atol = cfg.ode_atol;
            const auto ef = eigenfn::solve_2d_isotropic(p.spec2, lambda, std::nullopt, o);
            rep = eigenfn::report_2d(p.spec2, ef, cfg.times, cfg.gen_tol, cfg.semi_tol, cfg.quad);
        } else {
            const auto w = eigenfn::weyl_residual_minimize(p.spec2, lambda);
            row.gen_residual = w.gen_residual;
            row.pass = w.gen_residual <= cfg.weyl_tol;
            return row;
        }
        row.gen_residual = rep.gen_residual;
        for (std::size_t i = 0; i < cfg.times.size(); ++i) row.semi_residual[i] = rep.semigroup_residual.at(cfg.times[i]);
        row.l1_norm = rep.l1_norm;
        row.l2_trunc_ratio = l2_ratio(rep);
        row.pass = rep.passed;
    } catch (const Error& e) {
        row.pass = false;
        row.error = e.what();
    }
    return row;
}

}  // namespace detail

/// Rows come back in grid order whatever the number of worker threads.
inline SurveyReport run_survey(const SurveyConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const SurveyProblem problem = resolve_problem(cfg);
    SurveyReport rep;
    rep.config = cfg;
    rep.model_name = problem.model_name;
    const std::vector<cplx> grid = survey_grid(cfg);
    rep.rows.resize(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) rep.rows[i] = detail::survey_row(problem, cfg, grid[i]);
    };
    const int n_threads = std::min<int>(cfg.jobs, std::max<std::size_t>(grid.size(), 1));
    std::vector<std::thread> pool;
    for (int w = 1; w < n_threads; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    rep.summary.n_rows = rep.rows.size();
    for (const auto& r : rep.rows) {
        rep.summary.n_pass += r.pass;
        if (std::isfinite(r.gen_residual) &&
            (!std::isfinite(rep.summary.max_residual) || r.gen_residual > rep.summary.max_residual))
            rep.summary.max_residual = r.gen_residual;
    }
    if (!rep.rows.empty()) rep.summary.pass_rate = double(rep.summary.n_pass) / double(rep.rows.size());
    rep.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

// ---- output --------------------------------------------------------------

inline std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_string(const SurveyReport& rep) {
    std::string out = "lambda_re,lambda_im,gen_residual";
    for (double t : rep.config.times) out += ",semi_residual_t" + format_g12(t);
    out += ",l1_norm,l2_trunc_ratio,pass\n";
    for (const auto& r : rep.rows) {
        out += format_g12(r.lambda.real()) + "," + format_g12(r.lambda.imag()) + "," + format_g12(r.gen_residual);
        for (double s : r.semi_residual) out += "," + format_g12(s);
        out += "," + format_g12(r.l1_norm) + "," + format_g12(r.l2_trunc_ratio) + "," + (r.pass ? "1" : "0") + "\n";
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << text;
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

inline void emit_csv(const SurveyReport& rep, const std::string& path) { write_file(path, csv_string(rep)); }

namespace detail {

inline nlohmann::ordered_json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline nlohmann::ordered_json config_json(const KeyValues& kv) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& k : kv.keys()) j[k] = kv.get(k);
    return j;
}

/// {config, model, rows[], summary{}}; keys in this fixed order.
inline nlohmann::ordered_json survey_json(const SurveyReport& rep) {
    using detail::finite_or_null;
    nlohmann::ordered_json j;
    j["config"] = config_json(rep.config.echo());
    j["model"] = rep.model_name;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        nlohmann::ordered_json row;
        row["lambda_re"] = r.lambda.real();
        row["lambda_im"] = r.lambda.imag();
        row["gen_residual"] = finite_or_null(r.gen_residual);
        nlohmann::ordered_json semi = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < r.semi_residual.size(); ++i)
            semi[format_g12(rep.config.times[i])] = finite_or_null(r.semi_residual[i]);
        row["semi_residual"] = semi;
        row["l1_norm"] = finite_or_null(r.l1_norm);
        row["l2_trunc_ratio"] = finite_or_null(r.l2_trunc_ratio);
        row["pass"] = r.pass;
        if (!r.error.empty()) row["error"] = r.error;
        j["rows"].push_back(row);
    }
    j["summary"] = {{"n_rows", rep.summary.n_rows},
                    {"n_pass", rep.summary.n_pass},
                    {"pass_rate", finite_or_null(rep.summary.pass_rate)},
                    {"max_residual", finite_or_null(rep.summary.max_residual)}};
    return j;
}

inline void emit_json(const SurveyReport& rep, const std::string& path) { write_file(path, survey_json(rep).dump(2) + "\n"); }

}  // namespace oulab
