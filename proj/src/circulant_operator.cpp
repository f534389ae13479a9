#include "bbmh/circulant_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bbmh/errors.hpp"

namespace bbmh {

namespace {

void require_same_size(const CirculantOperator& a, const CirculantOperator& b) {
    if (a.size() != b.size()) {
        throw UsageError("circulant operators act on grids of different size");
    }
}

}  // namespace

CirculantOperator::CirculantOperator(std::size_t n, int first_offset, std::vector<double> weights)
    : n_(n), first_(first_offset), weights_(std::move(weights)) {
    if (weights_.empty()) {
        weights_.push_back(0.0);
    }
    if (n_ == 0) {
        throw ConfigError("circulant operator needs a nonempty grid");
    }
    if (weights_.size() > n_) {
        // Offsets that coincide modulo n act on the same node; fold them.
        std::vector<double> folded(n_, 0.0);
        for (std::size_t k = 0; k < weights_.size(); ++k) folded[k % n_] += weights_[k];
        weights_ = std::move(folded);
    }
}

CirculantOperator CirculantOperator::identity(std::size_t n) { return scaled_identity(n, 1.0); }

CirculantOperator CirculantOperator::scaled_identity(std::size_t n, double value) {
    return CirculantOperator(n, 0, {value});
}

double CirculantOperator::weight(int offset) const {
    const int k = offset - first_;
    if (k < 0 || k >= static_cast<int>(weights_.size())) return 0.0;
    return weights_[static_cast<std::size_t>(k)];
}

void CirculantOperator::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) {
        throw UsageError("operator of size " + std::to_string(n_) + " applied to vector of length " +
                         std::to_string(x.size()));
    }
    const long n = static_cast<long>(n_);
    const long lo = std::max<long>(0, -static_cast<long>(first_));
    const long hi = std::min<long>(n, n - static_cast<long>(last_offset()));
    const std::size_t width = weights_.size();

    auto wrapped_row = [&](long i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < width; ++k) {
            long j = (i + first_ + static_cast<long>(k)) % n;
            if (j < 0) j += n;
            acc += weights_[k] * x[static_cast<std::size_t>(j)];
        }
        y[static_cast<std::size_t>(i)] = acc;
    };

    for (long i = 0; i < std::min(lo, n); ++i) wrapped_row(i);
    for (long i = lo; i < hi; ++i) {
        const double* xs = x.data() + (i + first_);
        double acc = 0.0;
        for (std::size_t k = 0; k < width; ++k) acc += weights_[k] * xs[k];
        y[static_cast<std::size_t>(i)] = acc;
    }
    for (long i = std::max(hi, lo); i < n; ++i) wrapped_row(i);
}

std::vector<double> CirculantOperator::apply(std::span<const double> x) const {
    std::vector<double> y(n_);
    apply(x, y);
    return y;
}

CirculantOperator CirculantOperator::transpose() const {
    std::vector<double> w(weights_.rbegin(), weights_.rend());
    return CirculantOperator(n_, -last_offset(), std::move(w));
}

std::complex<double> CirculantOperator::symbol(std::size_t k) const {
    std::complex<double> acc = 0.0;
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_);
    for (std::size_t m = 0; m < weights_.size(); ++m) {
        const double phase = theta * static_cast<double>(first_ + static_cast<int>(m));
        acc += weights_[m] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return acc;
}

std::vector<double> CirculantOperator::dense() const {
    std::vector<double> a(n_ * n_, 0.0);
    const long n = static_cast<long>(n_);
    for (long i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < weights_.size(); ++k) {
            long j = (i + first_ + static_cast<long>(k)) % n;
            if (j < 0) j += n;
            a[static_cast<std::size_t>(i * n + j)] += weights_[k];
        }
    }
    return a;
}

CirculantOperator operator*(const CirculantOperator& a, const CirculantOperator& b) {
    require_same_size(a, b);
    const auto wa = a.weights();
    const auto wb = b.weights();
    std::vector<double> w(wa.size() + wb.size() - 1, 0.0);
    for (std::size_t i = 0; i < wa.size(); ++i) {
        for (std::size_t j = 0; j < wb.size(); ++j) w[i + j] += wa[i] * wb[j];
    }
    return CirculantOperator(a.size(), a.first_offset() + b.first_offset(), std::move(w));
}

CirculantOperator operator+(const CirculantOperator& a, const CirculantOperator& b) {
    require_same_size(a, b);
    const int first = std::min(a.first_offset(), b.first_offset());
    const int last = std::max(a.last_offset(), b.last_offset());
    std::vector<double> w(static_cast<std::size_t>(last - first + 1));
    for (int o = first; o <= last; ++o) {
        w[static_cast<std::size_t>(o - first)] = a.weight(o) + b.weight(o);
    }
    return CirculantOperator(a.size(), first, std::move(w));
}

CirculantOperator operator-(const CirculantOperator& a, const CirculantOperator& b) {
    return a + (-1.0) * b;
}

CirculantOperator operator*(double s, const CirculantOperator& a) {
    std::vector<double> w(a.weights().begin(), a.weights().end());
    for (double& x : w) x *= s;
    return CirculantOperator(a.size(), a.first_offset(), std::move(w));
}

}  // namespace bbmh
