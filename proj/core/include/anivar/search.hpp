#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "anivar/dilation.hpp"
#include "anivar/grid.hpp"

namespace anivar {

struct ConfigEntry {
    DilatedBall ball;
    double weight = 1.0;
};

// Finite family of (ball, lambda_j >= 0).
struct BallConfiguration {
    std::vector<ConfigEntry> entries;

    static BallConfiguration single(const DilatedBall& ball, double weight = 1.0);
    double weight_sum() const;
    bool valid() const;  // nonempty with some positive weight
};

struct SearchOptions {
    int budget = 1;  // number of random multi-ball configurations is 32 * budget
    std::uint64_t seed = 0;
    int scale_min = -4;
    int scale_max = 2;
    int center_stride = 0;  // lattice cells between sweep centres, 0 picks ~64 per axis
    int max_balls = 8;
    bool weight_ascent = true;
    int ascent_rounds = 3;
};

struct SearchResult {
    double value = 0;
    BallConfiguration argmax;
    double best_single = 0;
    DilatedBall best_single_ball;
    std::size_t evaluated = 0;
    std::size_t single_count = 0;
};

// Lattice-centred balls of the sweep whose bounding box lies in the grid box.
std::vector<DilatedBall> candidate_balls(const Grid& grid, const Dilation& d, const SearchOptions& opt);

using ConfigFunctional = std::function<double(const BallConfiguration&)>;

// Max of the functional over: every single candidate ball, then 32*budget random configurations
// (the i-th drawn from its own (seed, i) stream), each optionally improved by greedy weight ascent.
// Strict improvement is required to replace the record, so ties keep the earlier configuration.
SearchResult search_configurations(const std::vector<DilatedBall>& candidates, const SearchOptions& opt,
                                   const ConfigFunctional& functional);

}  // namespace anivar
