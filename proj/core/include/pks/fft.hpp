#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace pks {

/// Real-to-complex 2D transform on an ny x nx row-major array (x fastest).
/// The half spectrum has ny rows of nx/2 + 1 entries. Each instance owns its
/// plans and buffers, so distinct instances may be used from different threads.
class Fft2d {
public:
    Fft2d(int nx, int ny);
    ~Fft2d();
    Fft2d(Fft2d&&) noexcept;
    Fft2d& operator=(Fft2d&&) noexcept;
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;

    int nx() const noexcept;
    int ny() const noexcept;
    int spectrum_width() const noexcept { return nx() / 2 + 1; }

    void forward(const std::vector<double>& in, std::vector<std::complex<double>>& out);
    /// Normalised: inverse(forward(x)) == x.
    void inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pks
