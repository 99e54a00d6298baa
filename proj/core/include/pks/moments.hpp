#pragma once

#include "pks/vec2.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace pks {

/// Indicator of a disc times a constant amplitude.
struct UniformBall {
    Vec2 center;
    double radius = 1.0;
    double amplitude = 1.0;
};

/// Isotropic Gaussian with per-axis standard deviation `std` and total `mass`.
struct Gaussian {
    Vec2 center;
    double std = 1.0;
    double mass = 1.0;
};

using Primitive = std::variant<UniformBall, Gaussian>;

/// Cell-centred samples on the square box [-L, L]^2, stored row-major with
/// the x index fastest: values[iy * nx + ix].
struct GridDensity {
    double half_width = 1.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> values;

    double dx() const noexcept { return 2.0 * half_width / nx; }
    double dy() const noexcept { return 2.0 * half_width / ny; }
    double cell_area() const noexcept { return dx() * dy(); }
    double x(int ix) const noexcept { return -half_width + (ix + 0.5) * dx(); }
    double y(int iy) const noexcept { return -half_width + (iy + 0.5) * dy(); }
    double& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * nx + ix]; }
    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
};

/// An initial datum: either gridded samples or a sum of analytic primitives.
class Density {
public:
    /// Validates: positive sizes, nonnegative finite samples, at least one
    /// positive entry.
    static Density from_grid(GridDensity grid);
    static Density from_primitives(std::vector<Primitive> primitives);

    bool is_grid() const noexcept { return std::holds_alternative<GridDensity>(data_); }
    const GridDensity& grid() const { return std::get<GridDensity>(data_); }
    const std::vector<Primitive>& primitives() const { return std::get<std::vector<Primitive>>(data_); }

    /// Point value n0(x). Uniform balls use the closed indicator; grids use
    /// the containing cell (zero outside the box).
    double value_at(Vec2 p) const;

private:
    using Storage = std::variant<GridDensity, std::vector<Primitive>>;
    explicit Density(Storage data) : data_(std::move(data)) {}
    Storage data_;
};

struct Moments {
    double mass = 0.0;
    double second_moment = 0.0;  ///< I0 = int |x|^2 n0
    Vec2 center;                 ///< B0 = int x n0 / M
    double variance = 0.0;       ///< V2 = I0/M - |B0|^2
    /// Fraction of the mass within three cells of the box edge (grids only).
    double boundary_mass_fraction = 0.0;
    bool boundary_warning = false;
};

/// Mass fraction near the box edge above which Moments::boundary_warning is set.
inline constexpr double kBoundaryMassWarning = 1e-8;

/// Mass, second moment, center of mass and variance. Primitives use closed
/// forms; grids use compensated midpoint sums. Throws DomainError on zero mass.
Moments compute_moments(const Density& n0);
Moments compute_moments(const GridDensity& grid);

/// Pointwise multiplication by lambda > 0.
Density scale(const Density& n0, double lambda);

/// Translates every primitive (or is rejected for grids, which are fixed to
/// their box).
Density translate(const Density& n0, Vec2 shift);

/// Samples a density on the box [-L, L]^2 with nx x ny cells. Uniform balls
/// are cell-averaged with `supersample`^2 points per cell; Gaussians and
/// grids are sampled at cell centres.
GridDensity rasterize(const Density& n0, double half_width, int nx, int ny, int supersample = 8);

}  // namespace pks
