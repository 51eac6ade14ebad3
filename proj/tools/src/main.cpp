#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "anivar/error.hpp"
#include "anivar/experiments/checks.hpp"
#include "anivar/experiments/config.hpp"
#include "anivar/experiments/runner.hpp"

namespace ex = anivar::experiments;
using nlohmann::json;

namespace {

enum Exit { Ok = 0, CheckFailed = 1, UsageError = 2, ComputeError = 3 };

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        anivar::fail(anivar::ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    out << text;
}

// Plain numbers stay numbers, anything else is passed as a string.
json parse_value(const std::string& s)
{
    try {
        return json::parse(s);
    } catch (const json::exception&) {
        return s;
    }
}

std::vector<json> split_values(const std::string& list)
{
    std::vector<json> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(parse_value(item));
    return out;
}

ex::RunOptions cache_options(bool no_cache)
{
    ex::RunOptions o;
    if (const char* dir = std::getenv("ANIVAR_CACHE_DIR"); dir && !no_cache)
        o.cache_dir = dir;
    return o;
}

ex::ExperimentConfig apply_flags(ex::ExperimentConfig cfg, const std::optional<std::uint64_t>& seed,
                                 const std::optional<int>& budget, const std::optional<int>& resolution)
{
    if (seed)
        cfg = ex::with_override(cfg, "seed", *seed);
    if (budget)
        cfg = ex::with_override(cfg, "budget", *budget);
    if (resolution)
        cfg = ex::with_override(cfg, "resolution", *resolution);
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"anivar: experiments on anisotropic variable-exponent spaces"};
    app.set_version_flag("--version", std::string(ex::kToolVersion));
    app.require_subcommand(1);

    std::string config_path, out_path, param, values, suite;
    std::optional<std::uint64_t> seed;
    std::optional<int> budget, resolution;
    bool no_cache = false;

    CLI::App* run = app.add_subcommand("run", "run the checks of one config and write a report");
    run->add_option("--config", config_path, "config file (JSON)")->required();
    run->add_option("--out", out_path, "report path, stdout when omitted");
    run->add_option("--seed", seed, "override params.seed");
    run->add_option("--budget", budget, "override params.budget");
    run->add_option("--resolution", resolution, "override grid resolution on every axis");
    run->add_flag("--no-cache", no_cache, "ignore ANIVAR_CACHE_DIR");

    CLI::App* sw = app.add_subcommand("sweep", "rerun a config over parameter values, emit CSV");
    sw->add_option("--config", config_path, "config file (JSON)")->required();
    sw->add_option("--param", param, "parameter to vary")->required();
    sw->add_option("--values", values, "comma separated values")->required();
    sw->add_option("--out", out_path, "CSV path, stdout when omitted");
    sw->add_option("--seed", seed, "override params.seed");
    sw->add_option("--budget", budget, "override params.budget");
    sw->add_option("--resolution", resolution, "override grid resolution");
    sw->add_flag("--no-cache", no_cache, "ignore ANIVAR_CACHE_DIR");

    CLI::App* ver = app.add_subcommand("verify", "run a built-in invariant suite");
    ver->add_option("--suite", suite, "geometry, exponent, projection, campanato, duality, tent, carleson or all")
        ->required();
    ver->add_option("--seed", seed, "random seed");
    ver->add_option("--budget", budget, "search budget multiplier");
    ver->add_option("--resolution", resolution, "1D grid resolution");
    ver->add_option("--out", out_path, "JSON report path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ex::ExperimentConfig cfg = apply_flags(ex::load_config(config_path), seed, budget, resolution);
            ex::RunOutcome r = ex::run_experiment(cfg, cache_options(no_cache));
            if (out_path.empty()) {
                std::cout << r.text;
            } else {
                write_file(out_path, r.text);
                write_file(out_path + ".timing.json", ex::timing_json(r).dump(2) + "\n");
            }
            std::cerr << "checks " << r.report["summary"]["checks"] << ", failed " << r.report["summary"]["failed"]
                      << (r.from_cache ? ", cached" : "") << ", " << r.seconds << " s\n";
            if (r.errored) {
                std::cerr << "error: " << r.report["error"]["message"].get<std::string>() << "\n";
                return ComputeError;
            }
            return r.passed ? Ok : CheckFailed;
        }
        if (*sw) {
            ex::ExperimentConfig cfg = apply_flags(ex::load_config(config_path), seed, budget, resolution);
            std::vector<json> vals = split_values(values);
            if (vals.empty())
                anivar::fail(anivar::ErrorCode::ConfigError, "--values: no values given");
            std::vector<ex::RunOutcome> runs = ex::sweep(cfg, param, vals, cache_options(no_cache));
            std::string csv = ex::sweep_csv(param, vals, runs);
            if (out_path.empty())
                std::cout << csv;
            else
                write_file(out_path, csv);
            bool errored = false, passed = true;
            for (const auto& r : runs) {
                errored = errored || r.errored;
                passed = passed && r.passed;
            }
            return errored ? ComputeError : (passed ? Ok : CheckFailed);
        }
        if (*ver) {
            if (!ex::is_suite(suite))
                anivar::fail(anivar::ErrorCode::UnknownSuite, "unknown suite '" + suite + "'");
            ex::SuiteOptions so;
            so.seed = seed.value_or(0);
            so.budget = budget.value_or(1);
            if (resolution)
                so.resolution = *resolution;
            json report = {{"schema_version", ex::kReportSchema},
                           {"tool", {{"name", "anivar"}, {"version", ex::kToolVersion}}},
                           {"suite", suite},
                           {"seed", so.seed},
                           {"suites", json::array()}};
            bool all = true;
            for (const ex::SuiteReport& s : ex::verify_suite(suite, so)) {
                json checks = json::array();
                for (const ex::CheckResult& c : s.checks) {
                    std::cout << (c.passed ? "PASS " : "FAIL ") << s.suite << "/" << c.name << "  residual "
                              << c.residual << " (tol " << c.tolerance << ")\n";
                    checks.push_back(ex::to_json(c));
                }
                all = all && s.passed();
                report["suites"].push_back({{"suite", s.suite}, {"passed", s.passed()}, {"checks", checks}});
            }
            report["passed"] = all;
            report["content_hash"] = ex::sha256_hex(report.dump());
            if (!out_path.empty())
                write_file(out_path, report.dump(2) + "\n");
            std::cout << (all ? "all checks passed" : "some checks failed") << "\n";
            return all ? Ok : CheckFailed;
        }
    } catch (const anivar::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        bool usage = e.code() == anivar::ErrorCode::ConfigError || e.code() == anivar::ErrorCode::UnknownSuite;
        return usage ? UsageError : ComputeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ComputeError;
    }
    return Ok;
}
