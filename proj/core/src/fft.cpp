#include "pks/fft.hpp"

#include "pks/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

namespace pks {
namespace {

// Planner calls are not thread-safe in FFTW; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct Fft2d::Impl {
    int nx = 0;
    int ny = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    Impl(int nx_, int ny_) : nx(nx_), ny(ny_) {
        const std::size_t n_real = static_cast<std::size_t>(nx) * ny;
        const std::size_t n_spec = static_cast<std::size_t>(nx / 2 + 1) * ny;
        std::lock_guard lock(planner_mutex());
        real = fftw_alloc_real(n_real);
        spec = fftw_alloc_complex(n_spec);
        if (real == nullptr || spec == nullptr) {
            release();
            throw NumericalError("fft: allocation failed");
        }
        fwd = fftw_plan_dft_r2c_2d(ny, nx, real, spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_2d(ny, nx, spec, real, FFTW_ESTIMATE);
        if (fwd == nullptr || inv == nullptr) {
            release();
            throw NumericalError("fft: plan creation failed");
        }
    }

    void release() {
        if (fwd != nullptr) fftw_destroy_plan(fwd);
        if (inv != nullptr) fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(spec);
        fwd = inv = nullptr;
        real = nullptr;
        spec = nullptr;
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        release();
    }
};

Fft2d::Fft2d(int nx, int ny) {
    if (nx <= 0 || ny <= 0) {
        throw DomainError("fft: sizes must be positive");
    }
    impl_ = std::make_unique<Impl>(nx, ny);
}

Fft2d::~Fft2d() = default;
Fft2d::Fft2d(Fft2d&&) noexcept = default;
Fft2d& Fft2d::operator=(Fft2d&&) noexcept = default;

int Fft2d::nx() const noexcept { return impl_->nx; }
int Fft2d::ny() const noexcept { return impl_->ny; }

void Fft2d::forward(const std::vector<double>& in, std::vector<std::complex<double>>& out) {
    const std::size_t n_real = static_cast<std::size_t>(impl_->nx) * impl_->ny;
    const std::size_t n_spec = static_cast<std::size_t>(spectrum_width()) * impl_->ny;
    if (in.size() != n_real) {
        throw DomainError("fft: input size mismatch");
    }
    std::copy(in.begin(), in.end(), impl_->real);
    fftw_execute(impl_->fwd);
    out.resize(n_spec);
    static_assert(sizeof(std::complex<double>) == sizeof(fftw_complex));
    std::memcpy(static_cast<void*>(out.data()), impl_->spec, n_spec * sizeof(fftw_complex));
}

void Fft2d::inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out) {
    const std::size_t n_real = static_cast<std::size_t>(impl_->nx) * impl_->ny;
    const std::size_t n_spec = static_cast<std::size_t>(spectrum_width()) * impl_->ny;
    if (in.size() != n_spec) {
        throw DomainError("fft: spectrum size mismatch");
    }
    // c2r overwrites its input, so it always runs on the internal buffer.
    std::memcpy(static_cast<void*>(impl_->spec), in.data(), n_spec * sizeof(fftw_complex));
    fftw_execute(impl_->inv);
    out.resize(n_real);
    const double norm = 1.0 / static_cast<double>(n_real);
    for (std::size_t i = 0; i < n_real; ++i) {
        out[i] = impl_->real[i] * norm;
    }
}

}  // namespace pks
