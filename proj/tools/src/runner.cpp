#include "anivar/experiments/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "anivar/campanato.hpp"
#include "anivar/carleson.hpp"
#include "anivar/error.hpp"
#include "anivar/experiments/generators.hpp"
#include "anivar/parallel.hpp"
#include "anivar/tent.hpp"

namespace anivar::experiments {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double tolerance_for(const ExperimentConfig& cfg, const CheckSpec& spec, double fallback)
{
    if (spec.options.contains("tolerance"))
        return spec.options["tolerance"].get<double>();
    auto it = cfg.tolerances.find(spec.kind);
    return it != cfg.tolerances.end() ? it->second : fallback;
}

DilatedBall option_ball(const CheckSpec& spec, int dim)
{
    if (!spec.options.contains("ball"))
        fail(ErrorCode::ConfigError, "check '" + spec.kind + "' needs options.ball");
    DilatedBall b;
    try {
        auto c = spec.options["ball"].at("center").get<std::vector<double>>();
        if (static_cast<int>(c.size()) != dim)
            fail(ErrorCode::ConfigError, "check '" + spec.kind + "': ball center dimension mismatch");
        b.center = Eigen::Map<const Vector>(c.data(), dim);
        b.scale = spec.options["ball"].value("scale", 0);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, "check '" + spec.kind + "': bad options.ball (" + e.what() + ")");
    }
    return b;
}

// Value check: passes unless options.expect is given and missed.
CheckResult value_check(const ExperimentConfig& cfg, const CheckSpec& spec, double value, json values)
{
    values["value"] = value;
    if (!spec.options.contains("expect"))
        return make_check(spec.kind, std::isfinite(value) ? 0.0 : INFINITY, 0, values);
    double expect = spec.options["expect"].get<double>();
    double scale = std::max(std::abs(expect), 1e-300);
    values["expect"] = expect;
    return make_check(spec.kind, std::abs(value - expect) / scale, tolerance_for(cfg, spec, 1e-8), values);
}

SearchOptions search_options(const ExperimentConfig& cfg)
{
    SearchOptions so;
    so.seed = cfg.params.seed.value_or(0);
    so.budget = cfg.params.budget;
    so.scale_min = cfg.params.scale_min;
    so.scale_max = cfg.params.scale_max;
    return so;
}

CampanatoParams campanato_params(const ExperimentConfig& cfg, const Exponent& p)
{
    CampanatoParams prm;
    prm.p = p;
    prm.q = cfg.params.q;
    prm.s = cfg.params.s;
    prm.eta = cfg.params.eta.value_or(p.underline_p());
    prm.epsilon = cfg.params.epsilon;
    return prm;
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

void flatten(const std::string& prefix, const json& j, std::vector<std::pair<std::string, std::string>>& out)
{
    if (j.is_number()) {
        out.emplace_back(prefix, format_number(j.get<double>()));
    } else if (j.is_boolean()) {
        out.emplace_back(prefix, j.get<bool>() ? "1" : "0");
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(prefix + "[" + std::to_string(i) + "]", j[i], out);
    } else if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(prefix.empty() ? it.key() : prefix + "." + it.key(), it.value(), out);
    }
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        fail(ErrorCode::InvalidArgument, "sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string cache_key(const ExperimentConfig& cfg)
{
    return sha256_hex(std::string(kToolVersion) + "\n" + canonical_text(cfg));
}

std::vector<CheckResult> run_check(const ExperimentConfig& cfg, const CheckSpec& spec)
{
    if (spec.kind.rfind("suite:", 0) == 0) {
        SuiteOptions so;
        so.seed = cfg.params.seed.value_or(0);
        so.budget = std::max(1, cfg.params.budget);
        if (cfg.resolution.size() == 1)
            so.resolution = cfg.resolution[0];
        std::vector<CheckResult> out;
        for (SuiteReport& r : verify_suite(spec.kind.substr(6), so)) {
            for (CheckResult& c : r.checks) {
                c.name = r.suite + "/" + c.name;
                out.push_back(std::move(c));
            }
        }
        return out;
    }

    const Grid grid = make_grid(cfg);
    const Dilation d = make_dilation(cfg);
    const Exponent p = make_exponent(cfg, grid);
    const std::uint64_t seed = cfg.params.seed.value_or(0);
    auto fn = [&](const std::string& name) { return make_function(cfg, name, grid, d, p); };

    if (spec.kind == "luxemburg_norm") {
        LuxemburgResult r = luxemburg_solve(fn(spec.function), p);
        return {value_check(cfg, spec, r.norm, {{"iterations", r.iterations}, {"modular_at_norm", r.modular_at_norm}})};
    }
    if (spec.kind == "modular")
        return {value_check(cfg, spec, modular(fn(spec.function), p), json::object())};
    if (spec.kind == "indicator_norm") {
        DilatedBall b = option_ball(spec, grid.dim());
        return {value_check(cfg, spec, indicator_norm(d, b, p), {{"volume", ball_volume(d, b)}})};
    }
    if (spec.kind == "log_holder") {
        LogHolderReport r = check_log_holder(p, d, spec.options.value("pairs", 20000), seed);
        json v = {{"c_log", r.c_log},
                  {"c_inf", r.c_inf},
                  {"c_log_doubled", r.c_log_doubled},
                  {"c_inf_doubled", r.c_inf_doubled},
                  {"stable_under_doubling", r.stable_under_doubling},
                  {"unbounded_growth", r.unbounded_growth},
                  {"truncated", r.truncated}};
        return {make_check(spec.kind, 0, 0, v)};
    }
    if (spec.kind == "classic_functional") {
        ClassicValue c = classic_functional(fn(spec.function), d, option_ball(spec, grid.dim()), p, cfg.params.q,
                                            cfg.params.s);
        return {value_check(cfg, spec, c.value, {{"refined", c.refined}})};
    }
    if (spec.kind == "classic_norm")
        return {value_check(cfg, spec, classic_norm(fn(spec.function), d, campanato_params(cfg, p), search_options(cfg)),
                            json::object())};
    if (spec.kind == "campanato_norm") {
        NormEstimate n = campanato_type_norm(fn(spec.function), d, campanato_params(cfg, p), search_options(cfg));
        json v = {{"value", n.value}, {"best_single", n.best_single}, {"evaluated", n.evaluated},
                  {"balls", n.argmax.entries.size()}};
        return {make_check(spec.kind, std::max(0.0, n.best_single - n.value), 0, v)};
    }
    if (spec.kind == "variant_ratio") {
        GridFunction f = fn(spec.function);
        CampanatoParams prm = campanato_params(cfg, p);
        prm.q = 1;
        CampanatoEvaluator ev(f, d, prm);
        Rng rng = stream(seed, 71);
        const int count = spec.options.value("configurations", 100);
        double worst = INFINITY;
        std::size_t summands = 0;
        for (int i = 0; i < count; ++i) {
            BallConfiguration c = random_configuration(grid, d, cfg.params.scale_min, cfg.params.scale_max,
                                                       spec.options.value("max_balls", 4), rng);
            auto l1 = ev.l1_summands(c), e4 = ev.eps_summands(c);
            for (std::size_t j = 0; j < l1.size(); ++j) {
                if (l1[j] > 0) {
                    worst = std::min(worst, e4[j] / l1[j]);
                    ++summands;
                }
            }
        }
        json v = {{"min_ratio", worst}, {"summands", summands}, {"epsilon", prm.epsilon},
                  {"epsilon_admissible", ev.epsilon_admissible()}};
        return {make_check(spec.kind, std::max(0.0, 0.5 - worst), tolerance_for(cfg, spec, 1e-8), v)};
    }
    if (spec.kind == "duality_chain") {
        Atom a = make_config_atom(cfg, spec.function, grid, d, p);
        FiniteAtomicRep rep{{{spec.options.value("lambda", 1.0), a}}};
        CampanatoParams prm = campanato_params(cfg, p);
        prm.q = a.r;
        prm.s = a.s;
        DualityChainReport r = duality_chain_check(rep, fn(spec.partner), d, prm, 4, seed);
        json v = {{"pairing", r.pairing},           {"triangle_sum", r.triangle_sum},
                  {"holder_sum", r.holder_sum},     {"bound", r.bound},
                  {"campanato_value", r.campanato_value}, {"atomic_norm", r.atomic_norm},
                  {"ratio", r.ratio},               {"slack_vanishing", r.slack_vanishing},
                  {"slack_holder", r.slack_holder}, {"slack_aggregation", r.slack_aggregation}};
        double worst = std::max({0.0, -r.slack_vanishing, -r.slack_holder, -r.slack_aggregation});
        return {make_check(spec.kind, worst, tolerance_for(cfg, spec, 1e-8), v)};
    }
    if (spec.kind == "fubini_residual") {
        ScaleFunction G = random_scale_function(grid, cfg.params.scale_min, cfg.params.scale_max, seed);
        GridFunction a = lusin_area(G, d);
        double lhs = 0, rhs = 0;
        for (double v : a.values())
            lhs += v * v;
        for (double v : G.values())
            rhs += v * v;
        lhs *= grid.cell_volume();
        rhs *= grid.cell_volume();
        double r = std::abs(lhs - rhs) / rhs;
        return {make_check(spec.kind, r, tolerance_for(cfg, spec, 0.02),
                           {{"area_integral", lhs}, {"direct_integral", rhs}})};
    }
    if (spec.kind == "tent_decomposition") {
        ScaleFunction G = random_scale_function(grid, cfg.params.scale_min, cfg.params.scale_max, seed,
                                                spec.options.value("reach", 4.0));
        DecompositionOptions o;
        o.gamma = cfg.params.gamma;
        o.leakage_bound = cfg.params.leakage_bound;
        TentAtomSet s = tent_atomic_decomposition(G, p, d, o);
        json v = {{"atoms", s.atoms.size()},
                  {"levels", {s.level_min, s.level_max}},
                  {"leakage_ratio", s.leakage_ratio},
                  {"reconstruction_residual", s.reconstruction_residual},
                  {"disjoint", s.disjoint},
                  {"support_ok", s.support_ok},
                  {"pointwise_ok", s.pointwise_ok},
                  {"sandwich_violations", s.sandwich_violations},
                  {"max_overlap", s.max_overlap},
                  {"bound_constant", s.bound_constant}};
        double bad = s.reconstruction_residual + (s.disjoint ? 0 : 1) + (s.support_ok ? 0 : 1) +
                     (s.pointwise_ok ? 0 : 1) + static_cast<double>(s.sandwich_violations);
        return {make_check(spec.kind, bad, 0, v)};
    }
    if (spec.kind == "carleson_from_function") {
        AnalyzingFunction phi = build_analyzing_function(grid, d, cfg.params.s);
        ScaleFunction mu = carleson_from_function(fn(spec.function), phi, d, cfg.params.scale_min, cfg.params.scale_max);
        double eta = cfg.params.eta.value_or(p.underline_p());
        NormEstimate n = carleson_functional(mu, p, d, eta, search_options(cfg));
        double mass = 0;
        for (double v : mu.values())
            mass += v;
        mass *= grid.cell_volume();
        json v = {{"functional", n.value},
                  {"best_single", n.best_single},
                  {"total_mass", mass},
                  {"fourier_bound", phi.fourier_bound},
                  {"max_moment", phi.max_moment}};
        return {make_check(spec.kind, std::isfinite(n.value) ? 0.0 : INFINITY, 0, v)};
    }
    if (spec.kind == "carleson_duality") {
        Atom a = make_config_atom(cfg, spec.function, grid, d, p);
        FiniteAtomicRep rep{{{spec.options.value("lambda", 1.0), a}}};
        AnalyzingFunction phi = build_analyzing_function(grid, d, cfg.params.s);
        CarlesonDualityOptions o;
        o.scale_min = cfg.params.scale_min;
        o.scale_max = cfg.params.scale_max;
        o.gamma = cfg.params.gamma;
        CarlesonDualityReport r = carleson_duality_check(rep, fn(spec.partner), phi, d, p, o);
        json v = {{"direct", r.direct}, {"reproduced", r.reproduced}, {"defect", r.defect},
                  {"s0", r.s0},         {"s1", r.s1},                 {"s2", r.s2},
                  {"leak", r.leak},     {"s3", r.s3},                 {"s4", r.s4},
                  {"atoms", r.atoms},   {"leakage_ratio", r.leakage_ratio}};
        return {make_check(spec.kind, std::max(0.0, -r.min_slack()), tolerance_for(cfg, spec, 1e-8), v)};
    }
    fail(ErrorCode::ConfigError, "unknown check '" + spec.kind + "'");
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt)
{
    const auto start = Clock::now();
    RunOutcome out;
    std::filesystem::path cached;
    if (opt.cache_dir && !opt.cache_dir->empty()) {
        cached = std::filesystem::path(*opt.cache_dir) / (cache_key(cfg) + ".json");
        std::ifstream in(cached, std::ios::binary);
        if (in) {
            std::stringstream ss;
            ss << in.rdbuf();
            out.text = ss.str();
            try {
                out.report = json::parse(out.text);
                out.from_cache = true;
                out.passed = out.report.at("summary").at("passed").get<bool>();
                out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
                return out;
            } catch (const json::exception&) {
                out = RunOutcome{};  // unreadable entry, recompute
            }
        }
    }

    json results = json::array();
    json error = nullptr;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < cfg.checks.size(); ++i) {
        const CheckSpec& spec = cfg.checks[i];
        const auto t0 = Clock::now();
        try {
            for (const CheckResult& c : run_check(cfg, spec)) {
                json r = to_json(c);
                if (!spec.function.empty())
                    r["function"] = spec.function;
                if (!spec.partner.empty())
                    r["partner"] = spec.partner;
                if (!c.passed)
                    ++failed;
                results.push_back(std::move(r));
            }
        } catch (const Error& e) {
            error = {{"check_index", i}, {"check", spec.kind}, {"code", to_string(e.code())}, {"message", e.what()}};
        } catch (const std::exception& e) {
            error = {{"check_index", i}, {"check", spec.kind}, {"code", "Internal"}, {"message", e.what()}};
        }
        out.timing.emplace_back(spec.kind, std::chrono::duration<double>(Clock::now() - t0).count());
        if (!error.is_null())
            break;
    }
    out.errored = !error.is_null();
    out.passed = failed == 0 && !out.errored;

    json report = {{"schema_version", kReportSchema},
                   {"tool", {{"name", "anivar"}, {"version", kToolVersion}}},
                   {"config", cfg.source},
                   {"config_hash", sha256_hex(canonical_text(cfg))},
                   {"results", results},
                   {"summary", {{"checks", results.size()}, {"failed", failed}, {"passed", out.passed}}},
                   {"error", error}};
    report["content_hash"] = sha256_hex(report.dump());
    out.report = report;
    out.text = report.dump(2) + "\n";
    out.seconds = std::chrono::duration<double>(Clock::now() - start).count();

    if (!cached.empty() && !out.errored) {
        std::error_code ec;
        std::filesystem::create_directories(cached.parent_path(), ec);
        std::filesystem::path tmp = cached;
        tmp += ".tmp";
        {
            std::ofstream o(tmp, std::ios::binary);
            o << out.text;
        }
        std::filesystem::rename(tmp, cached, ec);
    }
    return out;
}

std::vector<RunOutcome> sweep(const ExperimentConfig& cfg, const std::string& param, const std::vector<json>& values,
                              const RunOptions& opt)
{
    std::vector<ExperimentConfig> cfgs;
    for (const json& v : values)
        cfgs.push_back(with_override(cfg, param, v));
    std::vector<RunOutcome> out(cfgs.size());
    const std::size_t workers = std::max(1u, thread_count());
    for (std::size_t lo = 0; lo < cfgs.size(); lo += workers) {
        std::vector<std::future<RunOutcome>> batch;
        for (std::size_t i = lo; i < std::min(cfgs.size(), lo + workers); ++i)
            batch.push_back(std::async(std::launch::async, [&, i] { return run_experiment(cfgs[i], opt); }));
        for (std::size_t i = 0; i < batch.size(); ++i)
            out[lo + i] = batch[i].get();
    }
    return out;
}

std::string sweep_csv(const std::string& param, const std::vector<json>& values, const std::vector<RunOutcome>& runs)
{
    std::string csv = "parameter,value,check,metric,number\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::string value = values[i].is_string() ? values[i].get<std::string>() : values[i].dump();
        auto row = [&](const std::string& check, const std::string& metric, const std::string& number) {
            csv += csv_field(param) + "," + csv_field(value) + "," + csv_field(check) + "," + csv_field(metric) + "," +
                   number + "\n";
        };
        for (const json& r : runs[i].report.at("results")) {
            const std::string check = r.at("check").get<std::string>();
            row(check, "passed", r.at("passed").get<bool>() ? "1" : "0");
            row(check, "residual", r.at("residual").is_number() ? format_number(r.at("residual").get<double>()) : "nan");
            std::vector<std::pair<std::string, std::string>> flat;
            flatten("", r.at("values"), flat);
            for (const auto& [metric, number] : flat)
                row(check, metric, number);
        }
        if (!runs[i].report.at("error").is_null())
            row("error", runs[i].report["error"].value("code", "error"), "nan");
    }
    return csv;
}

json timing_json(const RunOutcome& run)
{
    json checks = json::array();
    for (const auto& [name, s] : run.timing)
        checks.push_back({{"check", name}, {"seconds", s}});
    return {{"seconds", run.seconds}, {"from_cache", run.from_cache}, {"checks", checks}};
}

}  // namespace anivar::experiments
