#include "bbmh/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bbmh/errors.hpp"

namespace bbmh {

State::State(std::size_t n, std::size_t components)
    : n_(n), components_(components), data_(n * components, 0.0) {}

State State::bbm(std::vector<double> eta) {
    State s;
    s.n_ = eta.size();
    s.components_ = 1;
    s.data_ = std::move(eta);
    return s;
}

State State::bbmh(std::span<const double> u, std::span<const double> v, std::span<const double> w) {
    if (u.size() != v.size() || u.size() != w.size()) {
        throw UsageError("state components must have equal length");
    }
    State s(u.size(), 3);
    std::ranges::copy(u, s.u().begin());
    std::ranges::copy(v, s.v().begin());
    std::ranges::copy(w, s.w().begin());
    return s;
}

std::span<double> State::component(std::size_t k) {
    if (k >= components_) throw UsageError("state has no component " + std::to_string(k));
    return std::span<double>(data_).subspan(k * n_, n_);
}

std::span<const double> State::component(std::size_t k) const {
    if (k >= components_) throw UsageError("state has no component " + std::to_string(k));
    return std::span<const double>(data_).subspan(k * n_, n_);
}

bool State::all_finite() const {
    return std::ranges::all_of(data_, [](double x) { return std::isfinite(x); });
}

}  // namespace bbmh
