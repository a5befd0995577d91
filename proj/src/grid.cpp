#include "lyz/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace lyz {

std::vector<double> linspace(const AxisSpec& axis) {
    if (!std::isfinite(axis.lo) || !std::isfinite(axis.hi))
        throw std::invalid_argument("axis endpoints must be finite");
    if (axis.count < 1) throw std::invalid_argument("axis count must be >= 1");
    if (axis.count == 1) return {axis.lo};
    if (axis.lo > axis.hi) throw std::invalid_argument("axis lo must not exceed hi");
    std::vector<double> xs(static_cast<std::size_t>(axis.count));
    const double step = (axis.hi - axis.lo) / static_cast<double>(axis.count - 1);
    for (int i = 0; i < axis.count; ++i) xs[static_cast<std::size_t>(i)] = axis.lo + step * i;
    xs.back() = axis.hi;
    return xs;
}

}  // namespace lyz
