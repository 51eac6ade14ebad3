#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anivar/dilation.hpp"
#include "anivar/exponent.hpp"
#include "anivar/grid.hpp"
#include "anivar/hardy.hpp"

namespace anivar::experiments {

struct Params {
    double q = 2;
    int s = 0;
    std::optional<double> eta;  // defaults to underline_p of the exponent
    double epsilon = 1;
    double gamma = 0.5;
    double leakage_bound = 0.01;
    int scale_min = -3;
    int scale_max = 2;
    int budget = 1;
    std::optional<std::uint64_t> seed;
};

struct CheckSpec {
    std::string kind;
    std::string function;  // name in the functions block, may be empty
    std::string partner;   // second function for pairings
    nlohmann::json options = nlohmann::json::object();
};

struct ExperimentConfig {
    nlohmann::json source;  // validated input with defaults filled in; the report echoes this
    std::string name;
    Matrix dilation;
    std::vector<double> lower, upper;
    std::vector<int> resolution;
    nlohmann::json exponent;
    std::map<std::string, nlohmann::json> functions;
    Params params;
    std::map<std::string, double> tolerances;
    std::vector<CheckSpec> checks;
};

// Check kinds understood by the runner; "suite:<name>" runs an invariant suite.
const std::vector<std::string>& check_kinds();
bool check_is_randomized(const std::string& kind);

// Throws ConfigError naming the field, or line and column for malformed text.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

// Sets one parameter (seed budget resolution q s eta epsilon gamma leakage_bound scale_min scale_max)
// on the source and re-validates.
ExperimentConfig with_override(const ExperimentConfig& cfg, const std::string& param, const nlohmann::json& value);
const std::vector<std::string>& sweep_parameters();

// Sorted keys, no whitespace.
std::string canonical_text(const ExperimentConfig& cfg);

Dilation make_dilation(const ExperimentConfig& cfg);
Grid make_grid(const ExperimentConfig& cfg);
Exponent make_exponent(const ExperimentConfig& cfg, const Grid& grid);
// Evaluates a named function spec: expression, piecewise, random, or atom_seed.
GridFunction make_function(const ExperimentConfig& cfg, const std::string& name, const Grid& grid,
                           const Dilation& d, const Exponent& p);
// The atom of an atom_seed function.
Atom make_config_atom(const ExperimentConfig& cfg, const std::string& name, const Grid& grid, const Dilation& d,
                      const Exponent& p);

}  // namespace anivar::experiments
