#include "bbmh/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "bbmh/errors.hpp"

namespace bbmh {

namespace {

// The FFTW planner is not re-entrant; execution on new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

FourierOperator::FourierOperator(const GridSpec& grid) : grid_(grid) {
    if (!is_power_of_two(grid.n)) {
        throw ConfigError("Fourier collocation needs a power-of-two grid, got n = " +
                          std::to_string(grid.n));
    }
    const std::size_t n = grid.n;
    k_.resize(n);
    const double scale = 2.0 * std::numbers::pi / grid.length();
    for (std::size_t j = 0; j < n; ++j) k_[j] = scale * static_cast<double>(mode(j));

    std::vector<std::complex<double>> a(n), b(n);
    std::lock_guard lock(planner_mutex());
    const int ni = static_cast<int>(n);
    plan_forward_ = fftw_plan_dft_1d(ni, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_backward_ = fftw_plan_dft_1d(ni, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_forward_ == nullptr || plan_backward_ == nullptr) {
        throw ConfigError("could not create FFT plans");
    }
}

FourierOperator::~FourierOperator() {
    if (plan_forward_ == nullptr && plan_backward_ == nullptr) return;
    std::lock_guard lock(planner_mutex());
    if (plan_forward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    if (plan_backward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
}

FourierOperator::FourierOperator(FourierOperator&& other) noexcept
    : grid_(other.grid_),
      k_(std::move(other.k_)),
      plan_forward_(std::exchange(other.plan_forward_, nullptr)),
      plan_backward_(std::exchange(other.plan_backward_, nullptr)) {}

FourierOperator& FourierOperator::operator=(FourierOperator&& other) noexcept {
    if (this != &other) {
        std::swap(grid_, other.grid_);
        std::swap(k_, other.k_);
        std::swap(plan_forward_, other.plan_forward_);
        std::swap(plan_backward_, other.plan_backward_);
    }
    return *this;
}

long FourierOperator::mode(std::size_t slot) const {
    const long n = static_cast<long>(grid_.n);
    const long j = static_cast<long>(slot);
    return j < n / 2 ? j : j - n;
}

std::vector<std::complex<double>> FourierOperator::forward(std::span<const double> x) const {
    if (x.size() != grid_.n) throw UsageError("FFT input length does not match the grid");
    std::vector<std::complex<double>> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(grid_.n);
    fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), as_fftw(in.data()), as_fftw(out.data()));
    return out;
}

std::vector<double> FourierOperator::inverse(std::span<const std::complex<double>> xhat) const {
    if (xhat.size() != grid_.n) throw UsageError("FFT input length does not match the grid");
    std::vector<std::complex<double>> in(xhat.begin(), xhat.end());
    std::vector<std::complex<double>> out(grid_.n);
    fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(in.data()), as_fftw(out.data()));
    std::vector<double> x(grid_.n);
    const double inv_n = 1.0 / static_cast<double>(grid_.n);
    for (std::size_t j = 0; j < grid_.n; ++j) x[j] = out[j].real() * inv_n;
    return x;
}

std::vector<double> FourierOperator::derivative(std::span<const double> x, int order) const {
    if (order < 0) throw UsageError("derivative order must be non-negative");
    auto xhat = forward(x);
    const std::complex<double> i(0.0, 1.0);
    const std::size_t nyquist = grid_.n / 2;
    for (std::size_t j = 0; j < xhat.size(); ++j) {
        if (order % 2 == 1 && j == nyquist) {
            xhat[j] = 0.0;
            continue;
        }
        xhat[j] *= std::pow(i * k_[j], order);
    }
    return inverse(xhat);
}

std::vector<double> FourierOperator::interpolate(std::span<const double> values,
                                                 std::span<const double> x) const {
    const auto vhat = forward(values);
    const double inv_n = 1.0 / static_cast<double>(grid_.n);
    std::vector<double> out(x.size());
    for (std::size_t p = 0; p < x.size(); ++p) {
        const double s = x[p] - grid_.x_min;
        double acc = 0.0;
        for (std::size_t j = 0; j < vhat.size(); ++j) {
            const double phase = k_[j] * s;
            acc += vhat[j].real() * std::cos(phase) - vhat[j].imag() * std::sin(phase);
        }
        out[p] = acc * inv_n;
    }
    return out;
}

std::vector<double> fourier_inverse_helmholtz(const FourierOperator& fop, double beta,
                                              std::span<const double> rhs) {
    auto rhat = fop.forward(rhs);
    const auto k = fop.wavenumbers();
    for (std::size_t j = 0; j < rhat.size(); ++j) {
        const double symbol = 1.0 - beta * k[j] * k[j];
        if (std::abs(symbol) < 1e-14) {
            throw SingularOperatorError("Helmholtz symbol vanishes at mode " +
                                            std::to_string(fop.mode(j)),
                                        fop.mode(j));
        }
        rhat[j] /= symbol;
    }
    return fop.inverse(rhat);
}

}  // namespace bbmh
