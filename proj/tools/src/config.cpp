#include "anivar/experiments/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "anivar/error.hpp"
#include "anivar/expression.hpp"
#include "anivar/experiments/checks.hpp"
#include "anivar/experiments/generators.hpp"

namespace anivar::experiments {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& field, const std::string& what)
{
    fail(ErrorCode::ConfigError, "config field '" + field + "': " + what);
}

void only_keys(const json& j, const std::string& field, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        config_error(field, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || it.key() == a;
        if (!ok)
            config_error(field, "unknown key '" + it.key() + "'");
    }
}

double number(const json& j, const std::string& field)
{
    if (!j.is_number())
        config_error(field, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v))
        config_error(field, "must be finite");
    return v;
}

int integer(const json& j, const std::string& field)
{
    if (!j.is_number_integer())
        config_error(field, "expected an integer");
    return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& field)
{
    if (!j.is_array())
        config_error(field, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

void check_expression(const std::string& text, int dim, const std::string& field)
{
    Expression e;
    try {
        e = Expression::parse(text);
    } catch (const Error& err) {
        config_error(field, err.what());
    }
    if (e.max_axis() >= dim)
        config_error(field, "uses axis x" + std::to_string(e.max_axis()) + " on a " + std::to_string(dim) + "D grid");
}

json validate_piecewise(const json& j, int dim, const std::string& field, bool positive)
{
    only_keys(j, field, {"axis", "breaks", "values"});
    int axis = j.contains("axis") ? integer(j["axis"], field + ".axis") : 0;
    if (axis < 0 || axis >= dim)
        config_error(field + ".axis", "out of range");
    if (!j.contains("breaks") || !j.contains("values"))
        config_error(field, "needs breaks and values");
    auto br = numbers(j["breaks"], field + ".breaks");
    auto vs = numbers(j["values"], field + ".values");
    if (vs.size() != br.size() + 1)
        config_error(field, "values must have one more entry than breaks");
    if (!std::is_sorted(br.begin(), br.end()))
        config_error(field + ".breaks", "must be increasing");
    if (positive)
        for (double v : vs)
            if (!(v > 0))
                config_error(field + ".values", "exponents must be positive");
    return {{"axis", axis}, {"breaks", br}, {"values", vs}};
}

double piecewise_value(const json& j, const Vector& x)
{
    int axis = j["axis"].get<int>();
    const auto& br = j["breaks"];
    std::size_t i = 0;
    while (i < br.size() && x[axis] >= br[i].get<double>())
        ++i;
    return j["values"][i].get<double>();
}

json validate_exponent(const json& j, int dim)
{
    const std::string f = "exponent";
    only_keys(j, f, {"constant", "piecewise", "expression", "p_infinity"});
    int kinds = j.contains("constant") + j.contains("piecewise") + j.contains("expression");
    if (kinds != 1)
        config_error(f, "give exactly one of constant, piecewise, expression");
    json out = json::object();
    if (j.contains("constant")) {
        double q = number(j["constant"], f + ".constant");
        if (!(q > 0))
            config_error(f + ".constant", "must be positive");
        out["constant"] = q;
    } else if (j.contains("piecewise")) {
        out["piecewise"] = validate_piecewise(j["piecewise"], dim, f + ".piecewise", true);
    } else {
        if (!j["expression"].is_string())
            config_error(f + ".expression", "expected a string");
        check_expression(j["expression"].get<std::string>(), dim, f + ".expression");
        out["expression"] = j["expression"];
    }
    if (j.contains("p_infinity")) {
        double v = number(j["p_infinity"], f + ".p_infinity");
        if (!(v > 0))
            config_error(f + ".p_infinity", "must be positive");
        out["p_infinity"] = v;
    }
    return out;
}

json validate_function(const json& j, int dim, const std::string& field)
{
    only_keys(j, field, {"expression", "piecewise", "random", "atom_seed"});
    if (j.size() != 1)
        config_error(field, "give exactly one of expression, piecewise, random, atom_seed");
    if (j.contains("expression")) {
        if (!j["expression"].is_string())
            config_error(field + ".expression", "expected a string");
        check_expression(j["expression"].get<std::string>(), dim, field + ".expression");
        return j;
    }
    if (j.contains("piecewise"))
        return {{"piecewise", validate_piecewise(j["piecewise"], dim, field + ".piecewise", false)}};
    if (j.contains("random")) {
        if (!j["random"].is_number_unsigned() && !(j["random"].is_number_integer() && j["random"].get<long long>() >= 0))
            config_error(field + ".random", "expected a nonnegative integer seed");
        return j;
    }
    const json& a = j["atom_seed"];
    const std::string af = field + ".atom_seed";
    only_keys(a, af, {"expression", "ball", "q", "s"});
    if (!a.contains("expression") || !a["expression"].is_string())
        config_error(af + ".expression", "expected a string");
    check_expression(a["expression"].get<std::string>(), dim, af + ".expression");
    if (!a.contains("ball"))
        config_error(af + ".ball", "missing");
    only_keys(a["ball"], af + ".ball", {"center", "scale"});
    auto c = numbers(a["ball"].value("center", json::array()), af + ".ball.center");
    if (static_cast<int>(c.size()) != dim)
        config_error(af + ".ball.center", "dimension mismatch");
    json out = {{"expression", a["expression"]},
                {"ball", {{"center", c}, {"scale", integer(a["ball"].value("scale", json(0)), af + ".ball.scale")}}},
                {"q", a.contains("q") ? number(a["q"], af + ".q") : 2.0},
                {"s", a.contains("s") ? integer(a["s"], af + ".s") : 0}};
    if (!(out["q"].get<double>() >= 1))
        config_error(af + ".q", "must be at least 1");
    if (out["s"].get<int>() < 0)
        config_error(af + ".s", "must be nonnegative");
    return {{"atom_seed", out}};
}

json params_to_json(const Params& p)
{
    json j = {{"q", p.q},
              {"s", p.s},
              {"epsilon", p.epsilon},
              {"gamma", p.gamma},
              {"leakage_bound", p.leakage_bound},
              {"scale_min", p.scale_min},
              {"scale_max", p.scale_max},
              {"budget", p.budget}};
    if (p.eta)
        j["eta"] = *p.eta;
    if (p.seed)
        j["seed"] = *p.seed;
    return j;
}

Params validate_params(const json& j)
{
    const std::string f = "params";
    only_keys(j, f, {"q", "s", "eta", "epsilon", "gamma", "leakage_bound", "scale_min", "scale_max", "budget", "seed"});
    Params p;
    if (j.contains("q"))
        p.q = number(j["q"], f + ".q");
    if (j.contains("s"))
        p.s = integer(j["s"], f + ".s");
    if (j.contains("eta"))
        p.eta = number(j["eta"], f + ".eta");
    if (j.contains("epsilon"))
        p.epsilon = number(j["epsilon"], f + ".epsilon");
    if (j.contains("gamma"))
        p.gamma = number(j["gamma"], f + ".gamma");
    if (j.contains("leakage_bound"))
        p.leakage_bound = number(j["leakage_bound"], f + ".leakage_bound");
    if (j.contains("scale_min"))
        p.scale_min = integer(j["scale_min"], f + ".scale_min");
    if (j.contains("scale_max"))
        p.scale_max = integer(j["scale_max"], f + ".scale_max");
    if (j.contains("budget"))
        p.budget = integer(j["budget"], f + ".budget");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
            config_error(f + ".seed", "expected a nonnegative integer");
        p.seed = j["seed"].get<std::uint64_t>();
    }
    if (!(p.q > 0))
        config_error(f + ".q", "must be positive");
    if (p.s < 0)
        config_error(f + ".s", "must be nonnegative");
    if (p.eta && !(*p.eta > 0))
        config_error(f + ".eta", "must be positive");
    if (!(p.epsilon > 0))
        config_error(f + ".epsilon", "must be positive");
    if (!(p.gamma > 0 && p.gamma < 1))
        config_error(f + ".gamma", "must lie in (0, 1)");
    if (p.scale_min > p.scale_max)
        config_error(f + ".scale_min", "exceeds scale_max");
    if (p.budget < 0)
        config_error(f + ".budget", "must be nonnegative");
    return p;
}

// kind -> needs function, needs partner, randomized
struct KindInfo {
    const char* kind;
    bool function;
    bool partner;
    bool randomized;
};

const std::vector<KindInfo>& kind_table()
{
    static const std::vector<KindInfo> t{
        {"luxemburg_norm", true, false, false},      {"modular", true, false, false},
        {"indicator_norm", false, false, false},     {"log_holder", false, false, true},
        {"classic_functional", true, false, false},  {"classic_norm", true, false, false},
        {"campanato_norm", true, false, true},       {"variant_ratio", true, false, true},
        {"duality_chain", true, true, true},         {"fubini_residual", false, false, true},
        {"tent_decomposition", false, false, true},  {"carleson_from_function", true, false, true},
        {"carleson_duality", true, true, false},
    };
    return t;
}

const KindInfo* find_kind(const std::string& kind)
{
    for (const auto& k : kind_table())
        if (kind == k.kind)
            return &k;
    return nullptr;
}

}  // namespace

const std::vector<std::string>& check_kinds()
{
    static const std::vector<std::string> kinds = [] {
        std::vector<std::string> v;
        for (const auto& k : kind_table())
            v.push_back(k.kind);
        for (const auto& s : suite_names())
            v.push_back("suite:" + s);
        v.push_back("suite:all");
        return v;
    }();
    return kinds;
}

bool check_is_randomized(const std::string& kind)
{
    if (kind.rfind("suite:", 0) == 0)
        return true;
    const KindInfo* k = find_kind(kind);
    return k && k->randomized;
}

ExperimentConfig parse_config(const json& j)
{
    only_keys(j, "<root>", {"name", "dilation", "grid", "exponent", "functions", "params", "tolerances", "checks"});
    ExperimentConfig cfg;
    json src = json::object();

    if (j.contains("name")) {
        if (!j["name"].is_string())
            config_error("name", "expected a string");
        cfg.name = j["name"].get<std::string>();
    }
    src["name"] = cfg.name;

    if (!j.contains("dilation") || !j["dilation"].is_array() || j["dilation"].empty())
        config_error("dilation", "expected a square matrix as an array of rows");
    const std::size_t n = j["dilation"].size();
    cfg.dilation.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        auto row = numbers(j["dilation"][r], "dilation[" + std::to_string(r) + "]");
        if (row.size() != n)
            config_error("dilation[" + std::to_string(r) + "]", "matrix is not square");
        for (std::size_t c = 0; c < n; ++c)
            cfg.dilation(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    src["dilation"] = j["dilation"];
    const int dim = static_cast<int>(n);

    if (!j.contains("grid"))
        config_error("grid", "missing");
    only_keys(j["grid"], "grid", {"lower", "upper", "resolution"});
    cfg.lower = numbers(j["grid"].value("lower", json::array()), "grid.lower");
    cfg.upper = numbers(j["grid"].value("upper", json::array()), "grid.upper");
    const json& res = j["grid"].value("resolution", json::array());
    if (!res.is_array())
        config_error("grid.resolution", "expected an array of integers");
    for (std::size_t i = 0; i < res.size(); ++i) {
        int r = integer(res[i], "grid.resolution[" + std::to_string(i) + "]");
        if (r < 1)
            config_error("grid.resolution", "must be positive");
        cfg.resolution.push_back(r);
    }
    if (static_cast<int>(cfg.lower.size()) != dim || static_cast<int>(cfg.upper.size()) != dim ||
        static_cast<int>(cfg.resolution.size()) != dim)
        config_error("grid", "lower, upper, resolution must match the dilation dimension");
    for (int a = 0; a < dim; ++a)
        if (!(cfg.lower[a] < cfg.upper[a]))
            config_error("grid", "lower must be below upper on every axis");
    src["grid"] = {{"lower", cfg.lower}, {"upper", cfg.upper}, {"resolution", cfg.resolution}};

    cfg.exponent = validate_exponent(j.value("exponent", json{{"constant", 1.0}}), dim);
    src["exponent"] = cfg.exponent;

    src["functions"] = json::object();
    if (j.contains("functions")) {
        if (!j["functions"].is_object())
            config_error("functions", "expected an object");
        for (auto it = j["functions"].begin(); it != j["functions"].end(); ++it) {
            json spec = validate_function(it.value(), dim, "functions." + it.key());
            cfg.functions[it.key()] = spec;
            src["functions"][it.key()] = spec;
        }
    }

    cfg.params = validate_params(j.value("params", json::object()));

    src["tolerances"] = json::object();
    if (j.contains("tolerances")) {
        if (!j["tolerances"].is_object())
            config_error("tolerances", "expected an object");
        for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it) {
            double t = number(it.value(), "tolerances." + it.key());
            if (!(t >= 0))
                config_error("tolerances." + it.key(), "must be nonnegative");
            cfg.tolerances[it.key()] = t;
            src["tolerances"][it.key()] = t;
        }
    }

    src["checks"] = json::array();
    bool randomized = false;
    if (j.contains("checks")) {
        if (!j["checks"].is_array())
            config_error("checks", "expected an array");
        for (std::size_t i = 0; i < j["checks"].size(); ++i) {
            const std::string field = "checks[" + std::to_string(i) + "]";
            json item = j["checks"][i];
            if (item.is_string())
                item = json{{"kind", item}};
            if (!item.is_object() || !item.contains("kind") || !item["kind"].is_string())
                config_error(field, "expected a kind name or an object with a kind");
            CheckSpec c;
            c.kind = item["kind"].get<std::string>();
            if (c.kind.rfind("suite:", 0) == 0) {
                if (!is_suite(c.kind.substr(6)))
                    fail(ErrorCode::UnknownSuite, "config field '" + field + "': unknown suite '" + c.kind.substr(6) + "'");
            } else if (!find_kind(c.kind)) {
                config_error(field + ".kind", "unknown check '" + c.kind + "'");
            }
            const KindInfo* info = find_kind(c.kind);
            if (item.contains("function")) {
                if (!item["function"].is_string())
                    config_error(field + ".function", "expected a function name");
                c.function = item["function"].get<std::string>();
            }
            if (item.contains("partner")) {
                if (!item["partner"].is_string())
                    config_error(field + ".partner", "expected a function name");
                c.partner = item["partner"].get<std::string>();
            }
            if (info && info->function && c.function.empty())
                config_error(field + ".function", "required for " + c.kind);
            if (info && info->partner && c.partner.empty())
                config_error(field + ".partner", "required for " + c.kind);
            for (const std::string* ref : {&c.function, &c.partner})
                if (!ref->empty() && !cfg.functions.count(*ref))
                    config_error(field, "unknown function '" + *ref + "'");
            if ((c.kind == "duality_chain" || c.kind == "carleson_duality") &&
                !cfg.functions.at(c.function).contains("atom_seed"))
                config_error(field + ".function", c.kind + " needs an atom_seed function");
            if (item.contains("options")) {
                if (!item["options"].is_object())
                    config_error(field + ".options", "expected an object");
                c.options = item["options"];
            }
            only_keys(item, field, {"kind", "function", "partner", "options"});
            randomized = randomized || check_is_randomized(c.kind);
            json echo = {{"kind", c.kind}, {"options", c.options}};
            if (!c.function.empty())
                echo["function"] = c.function;
            if (!c.partner.empty())
                echo["partner"] = c.partner;
            src["checks"].push_back(echo);
            cfg.checks.push_back(std::move(c));
        }
    }
    if (randomized && !cfg.params.seed)
        config_error("params.seed", "required by randomized checks");
    src["params"] = params_to_json(cfg.params);

    cfg.source = src;
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        fail(ErrorCode::ConfigError, origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                         ": malformed JSON (" + e.what() + ")");
    }
    return parse_config(j);
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::ConfigError, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

const std::vector<std::string>& sweep_parameters()
{
    static const std::vector<std::string> p{"seed",  "budget", "resolution",    "q",         "s",        "eta",
                                            "epsilon", "gamma", "leakage_bound", "scale_min", "scale_max"};
    return p;
}

ExperimentConfig with_override(const ExperimentConfig& cfg, const std::string& param, const json& value)
{
    json j = cfg.source;
    if (param == "resolution") {
        if (!value.is_number_integer())
            config_error("resolution", "expected an integer");
        for (auto& r : j["grid"]["resolution"])
            r = value;
    } else if (std::find(sweep_parameters().begin(), sweep_parameters().end(), param) != sweep_parameters().end()) {
        j["params"][param] = value;
    } else {
        config_error(param, "not a sweepable parameter");
    }
    return parse_config(j);
}

std::string canonical_text(const ExperimentConfig& cfg)
{
    return cfg.source.dump();
}

Dilation make_dilation(const ExperimentConfig& cfg)
{
    return Dilation(cfg.dilation);
}

Grid make_grid(const ExperimentConfig& cfg)
{
    return Grid(cfg.lower, cfg.upper, cfg.resolution);
}

Exponent make_exponent(const ExperimentConfig& cfg, const Grid& grid)
{
    const json& e = cfg.exponent;
    if (e.contains("constant")) {
        double q = e["constant"].get<double>();
        return Exponent(GridFunction(grid, q), e.value("p_infinity", q));
    }
    GridFunction v(grid);
    if (e.contains("piecewise")) {
        const json& pw = e["piecewise"];
        v = sample(grid, [&](const Vector& x) { return piecewise_value(pw, x); });
    } else {
        Expression ex = Expression::parse(e["expression"].get<std::string>());
        v = sample(grid, [&](const Vector& x) { return ex(x); });
        for (double p : v.values())
            if (!(p > 0) || !std::isfinite(p))
                config_error("exponent.expression", "must be positive and finite on the grid");
    }
    double pinf = e.contains("p_infinity") ? e["p_infinity"].get<double>()
                                           : *std::min_element(v.values().begin(), v.values().end());
    return Exponent(std::move(v), pinf);
}

GridFunction make_function(const ExperimentConfig& cfg, const std::string& name, const Grid& grid,
                           const Dilation& d, const Exponent& p)
{
    auto it = cfg.functions.find(name);
    if (it == cfg.functions.end())
        config_error("functions", "unknown function '" + name + "'");
    const json& f = it->second;
    if (f.contains("expression")) {
        Expression ex = Expression::parse(f["expression"].get<std::string>());
        return sample(grid, [&](const Vector& x) { return ex(x); });
    }
    if (f.contains("piecewise")) {
        const json& pw = f["piecewise"];
        return sample(grid, [&](const Vector& x) { return piecewise_value(pw, x); });
    }
    if (f.contains("random"))
        return random_smooth(grid, f["random"].get<std::uint64_t>());
    return make_config_atom(cfg, name, grid, d, p).values;
}

Atom make_config_atom(const ExperimentConfig& cfg, const std::string& name, const Grid& grid, const Dilation& d,
                      const Exponent& p)
{
    auto it = cfg.functions.find(name);
    if (it == cfg.functions.end() || !it->second.contains("atom_seed"))
        config_error("functions", "'" + name + "' is not an atom_seed function");
    const json& a = it->second["atom_seed"];
    Expression ex = Expression::parse(a["expression"].get<std::string>());
    GridFunction seed = sample(grid, [&](const Vector& x) { return ex(x); });
    auto c = a["ball"]["center"].get<std::vector<double>>();
    DilatedBall ball{Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size())),
                     a["ball"]["scale"].get<int>()};
    return make_atom(seed, d, ball, a["q"].get<double>(), p, a["s"].get<int>());
}

}  // namespace anivar::experiments
