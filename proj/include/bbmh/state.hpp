#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bbmh {

/// Grid state with one component (BBM: eta) or three components
/// (hyperbolized system: u, v, w), stored contiguously.
class State {
public:
    State() = default;
    State(std::size_t n, std::size_t components);

    static State bbm(std::vector<double> eta);
    static State bbmh(std::span<const double> u, std::span<const double> v,
                      std::span<const double> w);

    std::size_t n() const { return n_; }
    std::size_t components() const { return components_; }
    std::size_t size() const { return data_.size(); }

    std::span<double> component(std::size_t k);
    std::span<const double> component(std::size_t k) const;
    std::span<double> u() { return component(0); }
    std::span<const double> u() const { return component(0); }
    std::span<double> v() { return component(1); }
    std::span<const double> v() const { return component(1); }
    std::span<double> w() { return component(2); }
    std::span<const double> w() const { return component(2); }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool all_finite() const;
    bool same_shape(const State& other) const {
        return n_ == other.n_ && components_ == other.components_;
    }

    bool operator==(const State&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t components_ = 0;
    std::vector<double> data_;
};

}  // namespace bbmh
