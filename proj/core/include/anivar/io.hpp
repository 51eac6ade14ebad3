#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "anivar/dilation.hpp"
#include "anivar/grid.hpp"
#include "anivar/hardy.hpp"
#include "anivar/scale_function.hpp"
#include "anivar/tent.hpp"

namespace anivar {

// Little-endian binary blocks: magic, version, grid header, then doubles. A JSON sidecar
// (path + ".json") carries the same header in readable form.
void write_grid_function(const std::string& path, const GridFunction& f);
GridFunction read_grid_function(const std::string& path);
void write_scale_function(const std::string& path, const ScaleFunction& g);
ScaleFunction read_scale_function(const std::string& path);

nlohmann::json to_json(const Grid& g);
Grid grid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DilatedBall& b);
DilatedBall ball_from_json(const nlohmann::json& j);

nlohmann::json atom_manifest(const FiniteAtomicRep& rep);
nlohmann::json tent_manifest(const TentAtomSet& set);

}  // namespace anivar
