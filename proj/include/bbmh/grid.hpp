#pragma once

#include <cstddef>
#include <vector>

namespace bbmh {

/// Uniform periodic grid on [x_min, x_max); x_max is identified with x_min.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n = 0;

    /// Validating constructor: n >= 4 and x_max > x_min.
    static GridSpec make(double x_min, double x_max, std::size_t n);

    double length() const { return x_max - x_min; }
    double h() const { return length() / static_cast<double>(n); }
    double node(std::size_t j) const { return x_min + static_cast<double>(j) * h(); }
    std::vector<double> nodes() const;

    /// Maps x into [x_min, x_max).
    double wrap(double x) const;

    bool operator==(const GridSpec&) const = default;
};

}  // namespace bbmh
