#include "anivar/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "anivar/error.hpp"

namespace anivar {

namespace {

static_assert(std::endian::native == std::endian::little, "binary blocks assume a little-endian host");

constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in)
{
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in)
        fail(ErrorCode::ConfigError, "truncated binary block");
    return v;
}

void write_header(std::ofstream& out, const char* magic, const Grid& g)
{
    out.write(magic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint32_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) {
        put(out, static_cast<std::int32_t>(g.resolution()[a]));
        put(out, g.lower()[a]);
        put(out, g.upper()[a]);
    }
}

Grid read_header(std::ifstream& in, const char* magic, const std::string& path)
{
    char m[4];
    in.read(m, 4);
    if (!in || std::memcmp(m, magic, 4) != 0)
        fail(ErrorCode::ConfigError, path + ": not a " + std::string(magic, 4) + " block");
    if (get<std::uint32_t>(in) != kVersion)
        fail(ErrorCode::ConfigError, path + ": unsupported block version");
    auto n = get<std::uint32_t>(in);
    if (n == 0 || n > 8)
        fail(ErrorCode::ConfigError, path + ": bad dimension");
    std::vector<double> lo(n), hi(n);
    std::vector<int> res(n);
    for (std::uint32_t a = 0; a < n; ++a) {
        res[a] = get<std::int32_t>(in);
        lo[a] = get<double>(in);
        hi[a] = get<double>(in);
    }
    return Grid(lo, hi, res);
}

void write_values(std::ofstream& out, const std::vector<double>& v)
{
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_values(std::ifstream& in, std::vector<double>& v, const std::string& path)
{
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in)
        fail(ErrorCode::ConfigError, path + ": truncated values");
}

void write_sidecar(const std::string& path, nlohmann::json meta)
{
    std::ofstream out(path + ".json");
    if (!out)
        fail(ErrorCode::ConfigError, "cannot write " + path + ".json");
    out << meta.dump(2) << '\n';
}

}  // namespace

nlohmann::json to_json(const Grid& g)
{
    return {{"lower", g.lower()}, {"upper", g.upper()}, {"resolution", g.resolution()}};
}

Grid grid_from_json(const nlohmann::json& j)
{
    try {
        return Grid(j.at("lower").get<std::vector<double>>(), j.at("upper").get<std::vector<double>>(),
                    j.at("resolution").get<std::vector<int>>());
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("bad grid: ") + e.what());
    }
}

nlohmann::json to_json(const DilatedBall& b)
{
    return {{"center", std::vector<double>(b.center.data(), b.center.data() + b.center.size())},
            {"scale", b.scale}};
}

DilatedBall ball_from_json(const nlohmann::json& j)
{
    try {
        auto c = j.at("center").get<std::vector<double>>();
        DilatedBall b;
        b.center = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
        b.scale = j.at("scale").get<int>();
        return b;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("bad ball: ") + e.what());
    }
}

void write_grid_function(const std::string& path, const GridFunction& f)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::ConfigError, "cannot write " + path);
    write_header(out, "ANVG", f.grid());
    write_values(out, f.values());
    write_sidecar(path, {{"kind", "grid_function"}, {"version", kVersion}, {"grid", to_json(f.grid())},
                         {"count", f.size()}});
}

GridFunction read_grid_function(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::ConfigError, "cannot open " + path);
    Grid g = read_header(in, "ANVG", path);
    GridFunction f(g);
    read_values(in, f.values(), path);
    return f;
}

void write_scale_function(const std::string& path, const ScaleFunction& g)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::ConfigError, "cannot write " + path);
    write_header(out, "ANVS", g.grid());
    put(out, static_cast<std::int32_t>(g.scale_min()));
    put(out, static_cast<std::int32_t>(g.scale_max()));
    write_values(out, g.values());
    write_sidecar(path, {{"kind", "scale_function"}, {"version", kVersion}, {"grid", to_json(g.grid())},
                         {"scale_min", g.scale_min()}, {"scale_max", g.scale_max()}, {"count", g.size()}});
}

ScaleFunction read_scale_function(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::ConfigError, "cannot open " + path);
    Grid grid = read_header(in, "ANVS", path);
    int lo = get<std::int32_t>(in);
    int hi = get<std::int32_t>(in);
    ScaleFunction g(grid, lo, hi);
    read_values(in, g.values(), path);
    return g;
}

nlohmann::json atom_manifest(const FiniteAtomicRep& rep)
{
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [lam, a] : rep.terms) {
        const auto& v = a.validation;
        terms.push_back({{"lambda", lam},
                         {"ball", to_json(a.ball)},
                         {"r", std::isinf(a.r) ? nlohmann::json("inf") : nlohmann::json(a.r)},
                         {"s", a.s},
                         {"validation",
                          {{"outside_max", v.outside_max},
                           {"size", v.size},
                           {"size_bound", v.size_bound},
                           {"moment_residual", v.moment_residual},
                           {"valid", v.valid()}}}});
    }
    return {{"kind", "atomic_representation"}, {"terms", terms}};
}

nlohmann::json tent_manifest(const TentAtomSet& set)
{
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : set.atoms) {
        atoms.push_back({{"level", a.level},
                         {"cover_index", a.cover_index},
                         {"ball", to_json(a.ball)},
                         {"enlargement", a.enlargement},
                         {"lambda", a.lambda},
                         {"lambda_nominal", a.lambda_nominal},
                         {"nodes", a.nodes.size()}});
    }
    return {{"kind", "tent_atom_set"},
            {"grid", to_json(set.grid)},
            {"scale_min", set.scale_min},
            {"scale_max", set.scale_max},
            {"levels", {set.level_min, set.level_max}},
            {"leakage_ratio", set.leakage_ratio},
            {"reconstruction_residual", set.reconstruction_residual},
            {"disjoint", set.disjoint},
            {"support_ok", set.support_ok},
            {"max_overlap", set.max_overlap},
            {"bound_constant", set.bound_constant},
            {"atoms", atoms}};
}

}  // namespace anivar
