#include "ectstat/transform.hpp"

#include <algorithm>
#include <array>
#include <deque>

namespace ectstat {

namespace {

void check_levels(const StepFunction& curve, const LevelGrid& levels) {
    for (double t : levels.levels()) {
        if (t < 0.0 || t > curve.horizon() + curve.tie_tolerance()) {
            throw InvalidArgument("level outside [0, T]");
        }
    }
}

} // namespace

std::vector<std::int64_t> sample_ec(const StepFunction& curve, const LevelGrid& levels) {
    check_levels(curve, levels);
    std::vector<std::int64_t> out;
    out.reserve(levels.size());
    for (double t : levels.levels()) out.push_back(curve.value_at(t));
    return out;
}

std::vector<double> sect_curve(const StepFunction& curve, const LevelGrid& levels) {
    check_levels(curve, levels);
    const double horizon = curve.horizon();
    const double total = curve.integral(horizon);
    std::vector<double> out;
    out.reserve(levels.size());
    for (double t : levels.levels()) {
        const double tt = std::min(t, horizon);
        out.push_back(curve.integral(tt) - (tt / horizon) * total);
    }
    return out;
}

std::vector<StepFunction> ec_curves(const GridShape& shape, const DirectionGrid& dirs) {
    const CubicalComplex cx = build_complex(shape);
    std::vector<StepFunction> curves;
    curves.reserve(dirs.size());
    for (const Direction& d : dirs.directions()) curves.push_back(ec_curve(cx, d, shape.frame().radius()));
    return curves;
}

ECTMatrix ect_from_curves(std::span<const StepFunction> curves, const DirectionGrid& dirs, const LevelGrid& levels) {
    if (curves.size() != dirs.size()) throw InvalidArgument("one curve per direction required");
    ECTMatrix m(dirs, levels);
    for (std::size_t p = 0; p < dirs.size(); ++p) {
        const auto row = sample_ec(curves[p], levels);
        std::copy(row.begin(), row.end(), m.row(p).begin());
    }
    return m;
}

SECTMatrix sect_from_curves(std::span<const StepFunction> curves, const DirectionGrid& dirs,
                            const LevelGrid& levels) {
    if (curves.size() != dirs.size()) throw InvalidArgument("one curve per direction required");
    SECTMatrix m(dirs, levels);
    for (std::size_t p = 0; p < dirs.size(); ++p) {
        const auto row = sect_curve(curves[p], levels);
        std::copy(row.begin(), row.end(), m.row(p).begin());
    }
    return m;
}

ECTMatrix ect(const GridShape& shape, const DirectionGrid& dirs, const LevelGrid& levels) {
    const auto curves = ec_curves(shape, dirs);
    return ect_from_curves(curves, dirs, levels);
}

SECTMatrix sect(const GridShape& shape, const DirectionGrid& dirs, const LevelGrid& levels) {
    const auto curves = ec_curves(shape, dirs);
    return sect_from_curves(curves, dirs, levels);
}

std::int64_t oracle_euler(const GridShape& shape) {
    const auto w = static_cast<std::int64_t>(shape.width());
    const auto h = static_cast<std::int64_t>(shape.height());

    // Foreground components, 8-connected.
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w * h), 0);
    std::int64_t components = 0;
    std::deque<std::array<std::int64_t, 2>> queue;
    for (std::int64_t j = 0; j < h; ++j) {
        for (std::int64_t i = 0; i < w; ++i) {
            if (!shape.at_or_background(i, j) || seen[static_cast<std::size_t>(j * w + i)]) continue;
            ++components;
            seen[static_cast<std::size_t>(j * w + i)] = 1;
            queue.push_back({i, j});
            while (!queue.empty()) {
                const auto [ci, cj] = queue.front();
                queue.pop_front();
                for (std::int64_t dj = -1; dj <= 1; ++dj) {
                    for (std::int64_t di = -1; di <= 1; ++di) {
                        const std::int64_t ni = ci + di;
                        const std::int64_t nj = cj + dj;
                        if (!shape.at_or_background(ni, nj)) continue;
                        auto& s = seen[static_cast<std::size_t>(nj * w + ni)];
                        if (!s) {
                            s = 1;
                            queue.push_back({ni, nj});
                        }
                    }
                }
            }
        }
    }

    // Background components, 4-connected, on a grid padded by one pixel; the
    // one containing the padding is the outside, the rest are holes.
    const std::int64_t pw = w + 2;
    const std::int64_t ph = h + 2;
    std::vector<std::uint8_t> bseen(static_cast<std::size_t>(pw * ph), 0);
    auto is_bg = [&](std::int64_t pi, std::int64_t pj) { return !shape.at_or_background(pi - 1, pj - 1); };
    std::int64_t background = 0;
    for (std::int64_t pj = 0; pj < ph; ++pj) {
        for (std::int64_t pi = 0; pi < pw; ++pi) {
            if (!is_bg(pi, pj) || bseen[static_cast<std::size_t>(pj * pw + pi)]) continue;
            ++background;
            bseen[static_cast<std::size_t>(pj * pw + pi)] = 1;
            queue.push_back({pi, pj});
            while (!queue.empty()) {
                const auto [ci, cj] = queue.front();
                queue.pop_front();
                constexpr std::array<std::array<std::int64_t, 2>, 4> steps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
                for (const auto& s : steps) {
                    const std::int64_t ni = ci + s[0];
                    const std::int64_t nj = cj + s[1];
                    if (ni < 0 || nj < 0 || ni >= pw || nj >= ph || !is_bg(ni, nj)) continue;
                    auto& b = bseen[static_cast<std::size_t>(nj * pw + ni)];
                    if (!b) {
                        b = 1;
                        queue.push_back({ni, nj});
                    }
                }
            }
        }
    }
    const std::int64_t holes = background - 1;
    return components - holes;
}

} // namespace ectstat
