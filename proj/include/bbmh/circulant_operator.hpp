#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bbmh {

/// Banded circulant operator on a periodic grid of n nodes,
///   (A x)_i = sum_k weights[k] * x_{(i + first_offset + k) mod n}.
///
/// Stored as a stencil; the dense matrix is only ever built by dense() for
/// validation. Stencils wider than n are folded onto n offsets.
class CirculantOperator {
public:
    CirculantOperator() = default;
    CirculantOperator(std::size_t n, int first_offset, std::vector<double> weights);

    static CirculantOperator identity(std::size_t n);
    static CirculantOperator scaled_identity(std::size_t n, double value);

    std::size_t size() const { return n_; }
    int first_offset() const { return first_; }
    int last_offset() const { return first_ + static_cast<int>(weights_.size()) - 1; }
    std::span<const double> weights() const { return weights_; }

    /// Weight at a given offset, zero outside the stencil.
    double weight(int offset) const;

    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;

    CirculantOperator transpose() const;

    /// Eigenvalue belonging to the Fourier mode exp(2 pi i k j / n).
    std::complex<double> symbol(std::size_t k) const;

    /// Row-major n x n assembly.
    std::vector<double> dense() const;

    friend CirculantOperator operator*(const CirculantOperator& a, const CirculantOperator& b);
    friend CirculantOperator operator+(const CirculantOperator& a, const CirculantOperator& b);
    friend CirculantOperator operator-(const CirculantOperator& a, const CirculantOperator& b);
    friend CirculantOperator operator*(double s, const CirculantOperator& a);

private:
    std::size_t n_ = 0;
    int first_ = 0;
    std::vector<double> weights_;
};

}  // namespace bbmh
