#include "ectstat/complex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ectstat/errors.hpp"

namespace ectstat {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

} // namespace

CubicalComplex build_complex(const GridShape& shape) {
    const std::size_t w = shape.width();
    const std::size_t h = shape.height();
    const Frame& frame = shape.frame();

    // Lattice-indexed id tables deduplicate shared cells.
    std::vector<std::uint32_t> vertex_id((w + 1) * (h + 1), kNone);
    std::vector<std::uint32_t> hedge_id(w * (h + 1), kNone); // (i,j)-(i+1,j)
    std::vector<std::uint32_t> vedge_id((w + 1) * h, kNone); // (i,j)-(i,j+1)

    CubicalComplex cx;
    const std::size_t fg = shape.foreground_count();
    cx.faces.reserve(fg);
    cx.edges.reserve(2 * fg + w + h);
    cx.vertices.reserve(fg + w + h + 1);

    auto vertex = [&](std::size_t i, std::size_t j) {
        std::uint32_t& id = vertex_id[j * (w + 1) + i];
        if (id == kNone) {
            id = static_cast<std::uint32_t>(cx.vertices.size());
            cx.vertices.push_back(frame.lattice_point(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)));
        }
        return id;
    };
    auto hedge = [&](std::size_t i, std::size_t j, std::uint32_t a, std::uint32_t b) {
        std::uint32_t& id = hedge_id[j * w + i];
        if (id == kNone) {
            id = static_cast<std::uint32_t>(cx.edges.size());
            cx.edges.push_back({a, b});
        }
    };
    auto vedge = [&](std::size_t i, std::size_t j, std::uint32_t a, std::uint32_t b) {
        std::uint32_t& id = vedge_id[j * (w + 1) + i];
        if (id == kNone) {
            id = static_cast<std::uint32_t>(cx.edges.size());
            cx.edges.push_back({a, b});
        }
    };

    for (std::size_t j = 0; j < h; ++j) {
        for (std::size_t i = 0; i < w; ++i) {
            if (!shape.at(i, j)) continue;
            const std::uint32_t v00 = vertex(i, j);
            const std::uint32_t v10 = vertex(i + 1, j);
            const std::uint32_t v11 = vertex(i + 1, j + 1);
            const std::uint32_t v01 = vertex(i, j + 1);
            hedge(i, j, v00, v10);
            hedge(i, j + 1, v01, v11);
            vedge(i, j, v00, v01);
            vedge(i + 1, j, v10, v11);
            cx.faces.push_back({v00, v10, v11, v01});
        }
    }
    return cx;
}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<std::int64_t> values, double horizon)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), horizon_(horizon) {
    if (!(horizon > 0.0)) throw InvalidArgument("step function horizon must be positive");
    if (breakpoints_.size() != values_.size()) throw InvalidArgument("one value per breakpoint required");
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
        if (breakpoints_[k] < 0.0 || breakpoints_[k] > horizon_) {
            throw InvalidArgument("breakpoints must lie in [0, T]");
        }
        if (k > 0 && !(breakpoints_[k] > breakpoints_[k - 1])) {
            throw InvalidArgument("breakpoints must be strictly increasing");
        }
    }
}

std::int64_t StepFunction::value_at(double t) const {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t + tie_tolerance());
    if (it == breakpoints_.begin()) return 0;
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double StepFunction::integral(double t) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < breakpoints_.size() && breakpoints_[k] < t; ++k) {
        const double end = (k + 1 < breakpoints_.size()) ? std::min(t, breakpoints_[k + 1]) : t;
        sum += static_cast<double>(values_[k]) * (end - breakpoints_[k]);
    }
    return sum;
}

StepFunction ec_curve(const CubicalComplex& complex, const Direction& direction, double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
    const double horizon = 2.0 * radius;
    const double tol = 1e-12 * horizon;
    const std::size_t nv = complex.vertices.size();

    std::vector<double> height(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        const double hv = direction.dot(complex.vertices[v]) + radius;
        if (hv < -tol || hv > horizon + tol) {
            std::ostringstream os;
            os.precision(17);
            os << "shape exceeds ball: vertex (" << complex.vertices[v][0] << ", " << complex.vertices[v][1]
               << ") has height " << hv << " outside [0, " << horizon << "]";
            throw ShapeExceedsBall(os.str());
        }
        height[v] = std::clamp(hv, 0.0, horizon);
    }

    // Each cell enters with its highest vertex, so its (-1)^dim is charged to
    // that vertex and only vertices need sorting.
    std::vector<std::int64_t> charge(nv, 1);
    auto highest = [&](auto const& cell) {
        std::uint32_t best = cell[0];
        for (std::uint32_t v : cell) {
            if (height[v] > height[best]) best = v;
        }
        return best;
    };
    for (const auto& e : complex.edges) charge[highest(e)] -= 1;
    for (const auto& f : complex.faces) charge[highest(f)] += 1;

    std::vector<std::uint32_t> order(nv);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return height[a] < height[b]; });

    std::vector<double> breakpoints;
    std::vector<std::int64_t> values;
    std::int64_t running = 0;
    for (std::size_t k = 0; k < nv;) {
        const double start = height[order[k]];
        while (k < nv && height[order[k]] - start <= tol) {
            running += charge[order[k]];
            ++k;
        }
        breakpoints.push_back(start);
        values.push_back(running);
    }
    return StepFunction(std::move(breakpoints), std::move(values), horizon);
}

} // namespace ectstat
