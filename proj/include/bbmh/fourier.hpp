#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bbmh/grid.hpp"

namespace bbmh {

/// Fourier collocation on a periodic grid whose size is a power of two.
///
/// Mode j of the transform corresponds to the integer wavenumber
/// m_j in [-n/2, n/2 - 1], scaled by 2 pi / (x_max - x_min). The transform
/// plans are created once; all member functions are const and may be called
/// from several threads.
class FourierOperator {
public:
    explicit FourierOperator(const GridSpec& grid);
    ~FourierOperator();
    FourierOperator(const FourierOperator&) = delete;
    FourierOperator& operator=(const FourierOperator&) = delete;
    FourierOperator(FourierOperator&& other) noexcept;
    FourierOperator& operator=(FourierOperator&& other) noexcept;

    const GridSpec& grid() const { return grid_; }
    std::size_t n() const { return grid_.n; }

    /// Scaled wavenumber of each transform slot.
    std::span<const double> wavenumbers() const { return k_; }
    /// Integer mode of each transform slot.
    long mode(std::size_t slot) const;

    std::vector<std::complex<double>> forward(std::span<const double> x) const;
    /// Inverse transform including the 1/n normalisation; returns the real part.
    std::vector<double> inverse(std::span<const std::complex<double>> xhat) const;

    /// Spectral derivative of the given order. The Nyquist mode is dropped
    /// for odd orders.
    std::vector<double> derivative(std::span<const double> x, int order = 1) const;

    /// Multiplies every mode by symbol(k) and transforms back.
    template <class Symbol>
    std::vector<double> apply_symbol(std::span<const double> x, Symbol&& symbol) const {
        auto xhat = forward(x);
        for (std::size_t j = 0; j < xhat.size(); ++j) xhat[j] *= symbol(k_[j]);
        return inverse(xhat);
    }

    /// Evaluates the trigonometric interpolant of grid values at arbitrary points.
    std::vector<double> interpolate(std::span<const double> values, std::span<const double> x) const;

private:
    GridSpec grid_;
    std::vector<double> k_;
    void* plan_forward_ = nullptr;
    void* plan_backward_ = nullptr;
};

/// Solves (I + beta d^2/dx^2) y = rhs on the periodic grid by division in
/// transform space. Throws SingularOperatorError naming the offending mode
/// when 1 - beta k^2 vanishes for a resolved wavenumber.
std::vector<double> fourier_inverse_helmholtz(const FourierOperator& fop, double beta,
                                              std::span<const double> rhs);

}  // namespace bbmh
