#include "anivar/scale_function.hpp"

#include <cmath>

#include "anivar/error.hpp"

namespace anivar {

ScaleFunction::ScaleFunction(const Grid& grid, int scale_min, int scale_max, double fill)
    : grid_(grid), lmin_(scale_min), lmax_(scale_max)
{
    if (scale_max < scale_min)
        fail(ErrorCode::InvalidArgument, "empty scale window");
    values_.assign(static_cast<std::size_t>(scale_count()) * grid.size(), fill);
}

bool ScaleFunction::all_finite() const
{
    for (double v : values_) {
        if (!std::isfinite(v))
            return false;
    }
    return true;
}

bool ScaleFunction::same_shape(const ScaleFunction& o) const
{
    return grid_ == o.grid_ && lmin_ == o.lmin_ && lmax_ == o.lmax_;
}

ScaleFunction& ScaleFunction::operator*=(double c)
{
    for (double& v : values_)
        v *= c;
    return *this;
}

}  // namespace anivar
