#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "anivar/experiments/checks.hpp"
#include "anivar/experiments/config.hpp"

namespace anivar::experiments {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr int kReportSchema = 1;

struct RunOptions {
    std::optional<std::string> cache_dir;  // no caching when empty
};

struct RunOutcome {
    std::string text;  // report bytes as written
    nlohmann::json report;
    bool passed = false;
    bool errored = false;
    bool from_cache = false;
    // wall time per check, kept out of the report so reports stay byte-identical
    std::vector<std::pair<std::string, double>> timing;
    double seconds = 0;
};

std::string sha256_hex(const std::string& data);
std::string cache_key(const ExperimentConfig& cfg);

// Runs every check in order. A computation error stops the run; the report keeps the
// results so far plus the error.
RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

// Results of one check spec; suites expand to one result per invariant.
std::vector<CheckResult> run_check(const ExperimentConfig& cfg, const CheckSpec& spec);

// One run per value; runs may execute concurrently, output order follows values.
std::vector<RunOutcome> sweep(const ExperimentConfig& cfg, const std::string& param,
                              const std::vector<nlohmann::json>& values, const RunOptions& opt = {});

// Long format: parameter,value,check,metric,number
std::string sweep_csv(const std::string& param, const std::vector<nlohmann::json>& values,
                      const std::vector<RunOutcome>& runs);

nlohmann::json timing_json(const RunOutcome& run);

}  // namespace anivar::experiments
