#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ectstat/shape.hpp"

namespace ectstat {

/// Closed cubical complex of a binary shape: one face per foreground pixel
/// plus the deduplicated edges and lattice vertices on pixel boundaries.
struct CubicalComplex {
    std::vector<Point2> vertices;
    std::vector<std::array<std::uint32_t, 2>> edges;
    /// Corners in counter-clockwise order starting at the lower-left.
    std::vector<std::array<std::uint32_t, 4>> faces;

    /// #V - #E + #F of the whole complex.
    std::int64_t euler_characteristic() const {
        return static_cast<std::int64_t>(vertices.size()) - static_cast<std::int64_t>(edges.size()) +
               static_cast<std::int64_t>(faces.size());
    }
};

CubicalComplex build_complex(const GridShape& shape);

/// Piecewise-constant, right-continuous Euler characteristic curve on [0, T].
///
/// The value is 0 on [0, breakpoints[0]), values[k] on
/// [breakpoints[k], breakpoints[k+1]) and values.back() on [breakpoints.back(), T].
class StepFunction {
public:
    StepFunction(std::vector<double> breakpoints, std::vector<std::int64_t> values, double horizon);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<std::int64_t>& values() const { return values_; }
    double horizon() const { return horizon_; }

    std::int64_t leading_value() const { return 0; }
    std::int64_t trailing_value() const { return values_.empty() ? 0 : values_.back(); }

    /// Value at t. Breakpoints within `tie_tolerance()` above t count as
    /// reached, so lattice heights landing on a level are included.
    std::int64_t value_at(double t) const;
    /// Exact integral of the curve over [0, t].
    double integral(double t) const;

    /// Filtration values closer than this are one breakpoint.
    double tie_tolerance() const { return 1e-12 * horizon_; }

private:
    std::vector<double> breakpoints_;
    std::vector<std::int64_t> values_;
    double horizon_;
};

/// Exact sublevel sweep of the height x . nu + R over the complex. Each cell
/// enters at the maximum height of its vertices.
StepFunction ec_curve(const CubicalComplex& complex, const Direction& direction, double radius);

} // namespace ectstat
