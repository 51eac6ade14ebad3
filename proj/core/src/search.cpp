#include "anivar/search.hpp"

#include <cmath>
#include <random>

#include "anivar/error.hpp"

namespace anivar {

BallConfiguration BallConfiguration::single(const DilatedBall& ball, double weight)
{
    BallConfiguration c;
    c.entries.push_back({ball, weight});
    return c;
}

double BallConfiguration::weight_sum() const
{
    double s = 0;
    for (const auto& e : entries)
        s += e.weight;
    return s;
}

bool BallConfiguration::valid() const
{
    for (const auto& e : entries) {
        if (e.weight < 0)
            return false;
    }
    return weight_sum() > 0;
}

std::vector<DilatedBall> candidate_balls(const Grid& grid, const Dilation& d, const SearchOptions& opt)
{
    const int n = grid.dim();
    std::vector<DilatedBall> out;
    std::vector<int> stride(n);
    for (int a = 0; a < n; ++a)
        stride[a] = opt.center_stride > 0 ? opt.center_stride : std::max(1, grid.resolution()[a] / 64);
    for (int k = opt.scale_min; k <= opt.scale_max; ++k) {
        Vector ext = d.half_extent(k);
        std::vector<long> lo(n), hi(n);
        bool empty = false;
        for (int a = 0; a < n; ++a) {
            // centre index range keeping the bounding box inside the box
            double cells = ext[a] / grid.spacing(a);
            lo[a] = static_cast<long>(std::ceil(cells - 0.5));
            hi[a] = grid.resolution()[a] - 1 - lo[a];
            if (lo[a] > hi[a])
                empty = true;
            // align to the stride lattice anchored at the middle cell
            long mid = grid.resolution()[a] / 2;
            long off = ((lo[a] - mid) % stride[a] + stride[a]) % stride[a];
            if (off != 0)
                lo[a] += stride[a] - off;
            if (lo[a] > hi[a])
                empty = true;
        }
        if (empty)
            continue;
        std::vector<long> idx(lo);
        while (true) {
            Vector c(n);
            for (int a = 0; a < n; ++a)
                c[a] = grid.coord(a, idx[a]);
            out.push_back({c, k});
            int a = n - 1;
            while (a >= 0 && idx[a] + stride[a] > hi[a]) {
                idx[a] = lo[a];
                --a;
            }
            if (a < 0)
                break;
            idx[a] += stride[a];
        }
    }
    return out;
}

SearchResult search_configurations(const std::vector<DilatedBall>& candidates, const SearchOptions& opt,
                                   const ConfigFunctional& functional)
{
    SearchResult res;
    bool have = false;
    auto consider = [&](const BallConfiguration& c, double v) {
        ++res.evaluated;
        if (!std::isfinite(v))
            return;
        if (!have || v > res.value) {
            res.value = v;
            res.argmax = c;
            have = true;
        }
    };

    for (const auto& ball : candidates) {
        BallConfiguration c = BallConfiguration::single(ball);
        double v = functional(c);
        ++res.single_count;
        if (std::isfinite(v) && (res.best_single_ball.center.size() == 0 || v > res.best_single)) {
            res.best_single = v;
            res.best_single_ball = ball;
        }
        consider(c, v);
    }
    if (candidates.empty())
        return res;

    const int nrandom = 32 * std::max(1, opt.budget);
    for (int i = 0; i < nrandom; ++i) {
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed & 0xffffffffu),
                          static_cast<std::uint32_t>(opt.seed >> 32), static_cast<std::uint32_t>(i), 0x9e37u};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<int> count(2, std::max(2, opt.max_balls));
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        std::uniform_real_distribution<double> logw(-2.0, 2.0);
        BallConfiguration c;
        int m = count(rng);
        for (int j = 0; j < m; ++j)
            c.entries.push_back({candidates[pick(rng)], std::exp(logw(rng))});
        double v = functional(c);
        if (opt.weight_ascent) {
            for (int round = 0; round < opt.ascent_rounds; ++round) {
                bool moved = false;
                for (std::size_t j = 0; j < c.entries.size(); ++j) {
                    for (double factor : {2.0, 0.5}) {
                        double old = c.entries[j].weight;
                        c.entries[j].weight = old * factor;
                        double t = functional(c);
                        ++res.evaluated;
                        if (t > v) {
                            v = t;
                            moved = true;
                        } else {
                            c.entries[j].weight = old;
                        }
                    }
                }
                if (!moved)
                    break;
            }
        }
        consider(c, v);
    }
    return res;
}

}  // namespace anivar
