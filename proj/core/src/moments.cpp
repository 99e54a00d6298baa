#include "pks/moments.hpp"

#include "pks/error.hpp"
#include "pks/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pks {
namespace {

// Neumaier summation; deterministic for a fixed traversal order.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void validate_primitive(const UniformBall& b) {
    if (!(b.radius > 0.0) || !(b.amplitude > 0.0) || !std::isfinite(b.radius) ||
        !std::isfinite(b.amplitude) || !std::isfinite(b.center.x) || !std::isfinite(b.center.y)) {
        throw DomainError("uniform ball needs a finite centre, radius > 0 and amplitude > 0");
    }
}

void validate_primitive(const Gaussian& g) {
    if (!(g.std > 0.0) || !(g.mass > 0.0) || !std::isfinite(g.std) || !std::isfinite(g.mass) ||
        !std::isfinite(g.center.x) || !std::isfinite(g.center.y)) {
        throw DomainError("gaussian needs a finite centre, std > 0 and mass > 0");
    }
}

struct PrimitiveMoments {
    double mass;
    Vec2 center;
    double spread;  // variance about its own centre
};

PrimitiveMoments primitive_moments(const Primitive& p) {
    return std::visit(
        [](const auto& q) -> PrimitiveMoments {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, UniformBall>) {
                // int_{|x|<R} |x|^2 dx = pi R^4 / 2, so the spread is R^2 / 2.
                return {kPi * q.radius * q.radius * q.amplitude, q.center, 0.5 * q.radius * q.radius};
            } else {
                return {q.mass, q.center, 2.0 * q.std * q.std};
            }
        },
        p);
}

double ball_cell_average(const UniformBall& b, double x0, double y0, double dx, double dy,
                         int supersample) {
    // Fully inside / outside tests on the cell's farthest and nearest points.
    const double cx = std::clamp(b.center.x, x0, x0 + dx);
    const double cy = std::clamp(b.center.y, y0, y0 + dy);
    const double near2 = (cx - b.center.x) * (cx - b.center.x) + (cy - b.center.y) * (cy - b.center.y);
    const double r2 = b.radius * b.radius;
    if (near2 >= r2) {
        return 0.0;
    }
    const double fx = std::max(std::abs(x0 - b.center.x), std::abs(x0 + dx - b.center.x));
    const double fy = std::max(std::abs(y0 - b.center.y), std::abs(y0 + dy - b.center.y));
    if (fx * fx + fy * fy <= r2) {
        return b.amplitude;
    }
    int inside = 0;
    for (int j = 0; j < supersample; ++j) {
        const double y = y0 + (j + 0.5) * dy / supersample - b.center.y;
        for (int i = 0; i < supersample; ++i) {
            const double x = x0 + (i + 0.5) * dx / supersample - b.center.x;
            if (x * x + y * y <= r2) {
                ++inside;
            }
        }
    }
    return b.amplitude * inside / static_cast<double>(supersample * supersample);
}

double gaussian_value(const Gaussian& g, Vec2 p) {
    const double s2 = g.std * g.std;
    return g.mass / (2.0 * kPi * s2) * std::exp(-norm2(p - g.center) / (2.0 * s2));
}

}  // namespace

Density Density::from_grid(GridDensity grid) {
    if (grid.nx <= 0 || grid.ny <= 0 || !(grid.half_width > 0.0) || !std::isfinite(grid.half_width)) {
        throw DomainError("grid density needs nx, ny > 0 and L > 0");
    }
    if (grid.values.size() != static_cast<std::size_t>(grid.nx) * grid.ny) {
        throw DomainError("grid density: expected " + std::to_string(grid.nx * grid.ny) +
                          " values, got " + std::to_string(grid.values.size()));
    }
    bool any_positive = false;
    for (double v : grid.values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw DomainError("grid density values must be finite and nonnegative");
        }
        any_positive = any_positive || v > 0.0;
    }
    if (!any_positive) {
        throw DomainError("grid density has zero mass");
    }
    return Density(std::move(grid));
}

Density Density::from_primitives(std::vector<Primitive> primitives) {
    if (primitives.empty()) {
        throw DomainError("analytic density needs at least one primitive");
    }
    for (const auto& p : primitives) {
        std::visit([](const auto& q) { validate_primitive(q); }, p);
    }
    return Density(std::move(primitives));
}

double Density::value_at(Vec2 p) const {
    if (is_grid()) {
        const GridDensity& g = grid();
        const int ix = static_cast<int>(std::floor((p.x + g.half_width) / g.dx()));
        const int iy = static_cast<int>(std::floor((p.y + g.half_width) / g.dy()));
        if (ix < 0 || iy < 0 || ix >= g.nx || iy >= g.ny) {
            return 0.0;
        }
        return g.at(ix, iy);
    }
    double sum = 0.0;
    for (const auto& prim : primitives()) {
        sum += std::visit(
            [p](const auto& q) -> double {
                using T = std::decay_t<decltype(q)>;
                if constexpr (std::is_same_v<T, UniformBall>) {
                    return norm2(p - q.center) <= q.radius * q.radius ? q.amplitude : 0.0;
                } else {
                    return gaussian_value(q, p);
                }
            },
            prim);
    }
    return sum;
}

Moments compute_moments(const GridDensity& g) {
    const double area = g.cell_area();
    CompensatedSum mass;
    CompensatedSum mx;
    CompensatedSum my;
    CompensatedSum second;
    CompensatedSum edge;
    constexpr int kEdgeCells = 3;
    for (int iy = 0; iy < g.ny; ++iy) {
        const double y = g.y(iy);
        const bool edge_row = iy < kEdgeCells || iy >= g.ny - kEdgeCells;
        for (int ix = 0; ix < g.nx; ++ix) {
            const double w = g.at(ix, iy) * area;
            const double x = g.x(ix);
            mass.add(w);
            mx.add(w * x);
            my.add(w * y);
            second.add(w * (x * x + y * y));
            if (edge_row || ix < kEdgeCells || ix >= g.nx - kEdgeCells) {
                edge.add(w);
            }
        }
    }
    Moments m;
    m.mass = mass.value();
    if (!(m.mass > 0.0)) {
        throw DomainError("compute_moments: density has zero total mass");
    }
    m.center = {mx.value() / m.mass, my.value() / m.mass};
    m.second_moment = second.value();

    // Second pass about the centre of mass avoids cancellation in I0/M - |B0|^2.
    CompensatedSum central;
    for (int iy = 0; iy < g.ny; ++iy) {
        const double dy = g.y(iy) - m.center.y;
        for (int ix = 0; ix < g.nx; ++ix) {
            const double dx = g.x(ix) - m.center.x;
            central.add(g.at(ix, iy) * area * (dx * dx + dy * dy));
        }
    }
    m.variance = std::max(0.0, central.value() / m.mass);
    m.boundary_mass_fraction = edge.value() / m.mass;
    m.boundary_warning = m.boundary_mass_fraction > kBoundaryMassWarning;
    return m;
}

Moments compute_moments(const Density& n0) {
    if (n0.is_grid()) {
        return compute_moments(n0.grid());
    }
    CompensatedSum mass;
    CompensatedSum mx;
    CompensatedSum my;
    std::vector<PrimitiveMoments> parts;
    for (const auto& p : n0.primitives()) {
        parts.push_back(primitive_moments(p));
        mass.add(parts.back().mass);
        mx.add(parts.back().mass * parts.back().center.x);
        my.add(parts.back().mass * parts.back().center.y);
    }
    Moments m;
    m.mass = mass.value();
    if (!(m.mass > 0.0)) {
        throw DomainError("compute_moments: density has zero total mass");
    }
    m.center = {mx.value() / m.mass, my.value() / m.mass};
    CompensatedSum second;
    CompensatedSum central;
    for (const auto& part : parts) {
        second.add(part.mass * (norm2(part.center) + part.spread));
        central.add(part.mass * (norm2(part.center - m.center) + part.spread));
    }
    m.second_moment = second.value();
    m.variance = central.value() / m.mass;
    return m;
}

Density scale(const Density& n0, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("scale: lambda must be finite and > 0");
    }
    if (n0.is_grid()) {
        GridDensity g = n0.grid();
        for (double& v : g.values) {
            v *= lambda;
        }
        return Density::from_grid(std::move(g));
    }
    std::vector<Primitive> out = n0.primitives();
    for (auto& p : out) {
        std::visit(
            [lambda](auto& q) {
                using T = std::decay_t<decltype(q)>;
                if constexpr (std::is_same_v<T, UniformBall>) {
                    q.amplitude *= lambda;
                } else {
                    q.mass *= lambda;
                }
            },
            p);
    }
    return Density::from_primitives(std::move(out));
}

Density translate(const Density& n0, Vec2 shift) {
    if (n0.is_grid()) {
        throw DomainError("translate: grid densities are tied to their box");
    }
    std::vector<Primitive> out = n0.primitives();
    for (auto& p : out) {
        std::visit([shift](auto& q) { q.center += shift; }, p);
    }
    return Density::from_primitives(std::move(out));
}

GridDensity rasterize(const Density& n0, double half_width, int nx, int ny, int supersample) {
    if (nx <= 0 || ny <= 0 || !(half_width > 0.0) || supersample <= 0) {
        throw DomainError("rasterize: invalid grid geometry");
    }
    GridDensity g{half_width, nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * ny, 0.0)};
    const double dx = g.dx();
    const double dy = g.dy();
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Vec2 centre{g.x(ix), g.y(iy)};
            if (n0.is_grid()) {
                g.at(ix, iy) = n0.value_at(centre);
                continue;
            }
            double v = 0.0;
            for (const auto& prim : n0.primitives()) {
                if (const auto* ball = std::get_if<UniformBall>(&prim)) {
                    v += ball_cell_average(*ball, centre.x - 0.5 * dx, centre.y - 0.5 * dy, dx, dy,
                                           supersample);
                } else {
                    v += gaussian_value(std::get<Gaussian>(prim), centre);
                }
            }
            g.at(ix, iy) = v;
        }
    }
    return g;
}

}  // namespace pks
