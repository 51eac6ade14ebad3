#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace anivar::experiments {

struct CheckResult {
    std::string name;
    bool passed = false;
    double residual = 0;   // measured violation; counts for exact checks
    double tolerance = 0;
    nlohmann::json values = nlohmann::json::object();
};

// passed iff the residual is finite and <= tolerance
CheckResult make_check(std::string name, double residual, double tolerance,
                       nlohmann::json values = nlohmann::json::object());

struct SuiteOptions {
    std::uint64_t seed = 0;
    int budget = 1;
    int resolution = 4096;  // 1D cells on [-8, 8]; 2D grids use resolution / 16 per axis on [-4, 4]^2
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool passed() const;
};

// geometry exponent projection campanato duality tent carleson
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

// "all" runs every suite in order. Throws UnknownSuite.
std::vector<SuiteReport> verify_suite(const std::string& name, const SuiteOptions& opt);

SuiteReport geometry_suite(const SuiteOptions& opt);
SuiteReport exponent_suite(const SuiteOptions& opt);
SuiteReport projection_suite(const SuiteOptions& opt);
SuiteReport campanato_suite(const SuiteOptions& opt);
SuiteReport duality_suite(const SuiteOptions& opt);
SuiteReport tent_suite(const SuiteOptions& opt);
SuiteReport carleson_suite(const SuiteOptions& opt);

nlohmann::json to_json(const CheckResult& c);

}  // namespace anivar::experiments
