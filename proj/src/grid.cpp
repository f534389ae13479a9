#include "bbmh/grid.hpp"

#include <cmath>
#include <string>

#include "bbmh/errors.hpp"

namespace bbmh {

GridSpec GridSpec::make(double x_min, double x_max, std::size_t n) {
    if (n < 4) {
        throw ConfigError("grid needs at least 4 nodes, got " + std::to_string(n));
    }
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw ConfigError("grid bounds must be finite with x_max > x_min");
    }
    return GridSpec{x_min, x_max, n};
}

std::vector<double> GridSpec::nodes() const {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = node(j);
    return x;
}

double GridSpec::wrap(double x) const {
    const double len = length();
    double r = std::fmod(x - x_min, len);
    if (r < 0.0) r += len;
    if (r >= len) r -= len;
    return x_min + r;
}

}  // namespace bbmh
