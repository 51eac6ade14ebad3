#include <cmath>

#include "anivar/error.hpp"
#include "anivar/experiments/checks.hpp"

namespace anivar::experiments {

CheckResult make_check(std::string name, double residual, double tolerance, nlohmann::json values)
{
    CheckResult c;
    c.name = std::move(name);
    c.residual = residual;
    c.tolerance = tolerance;
    c.passed = std::isfinite(residual) && residual <= tolerance;
    c.values = std::move(values);
    return c;
}

bool SuiteReport::passed() const
{
    for (const auto& c : checks)
        if (!c.passed)
            return false;
    return true;
}

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"geometry", "exponent", "projection", "campanato",
                                                "duality",  "tent",     "carleson"};
    return names;
}

bool is_suite(const std::string& name)
{
    if (name == "all")
        return true;
    for (const auto& n : suite_names())
        if (n == name)
            return true;
    return false;
}

std::vector<SuiteReport> verify_suite(const std::string& name, const SuiteOptions& opt)
{
    if (!is_suite(name))
        fail(ErrorCode::UnknownSuite, "unknown suite '" + name + "'");
    std::vector<SuiteReport> out;
    auto want = [&](const char* s) { return name == "all" || name == s; };
    if (want("geometry"))
        out.push_back(geometry_suite(opt));
    if (want("exponent"))
        out.push_back(exponent_suite(opt));
    if (want("projection"))
        out.push_back(projection_suite(opt));
    if (want("campanato"))
        out.push_back(campanato_suite(opt));
    if (want("duality"))
        out.push_back(duality_suite(opt));
    if (want("tent"))
        out.push_back(tent_suite(opt));
    if (want("carleson"))
        out.push_back(carleson_suite(opt));
    return out;
}

nlohmann::json to_json(const CheckResult& c)
{
    return {{"check", c.name},
            {"passed", c.passed},
            {"residual", c.residual},
            {"tolerance", c.tolerance},
            {"values", c.values}};
}

}  // namespace anivar::experiments
