#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <random>
#include <vector>

#include <ectstat/shape.hpp>

namespace testsupport {

/// Random mask of the given size with foreground probability `fill`,
/// guaranteed nonempty, placed well inside a ball.
inline ectstat::GridShape random_shape(std::mt19937_64& rng, std::size_t w, std::size_t h, double fill) {
    std::bernoulli_distribution bit(fill);
    std::vector<std::uint8_t> mask(w * h);
    for (auto& m : mask) m = bit(rng) ? 1 : 0;
    mask[(h / 2) * w + w / 2] = 1;
    const double pitch = 1.0;
    const double radius = 1.01 * std::hypot(double(w), double(h)) / 2.0 + 1.0;
    return {w, h, std::move(mask),
            ectstat::Frame(radius, pitch, {-0.5 * double(w) * pitch, -0.5 * double(h) * pitch})};
}

inline ectstat::GridShape from_rows(const std::vector<const char*>& rows, double pitch = 1.0, double radius = 0.0) {
    // rows[0] is the top row; '#' is foreground.
    const std::size_t h = rows.size();
    const std::size_t w = std::char_traits<char>::length(rows[0]);
    std::vector<std::uint8_t> mask(w * h, 0);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t i = 0; i < w; ++i) mask[(h - 1 - r) * w + i] = rows[r][i] == '#' ? 1 : 0;
    }
    if (radius == 0.0) radius = std::hypot(double(w), double(h)) * pitch;
    return {w, h, std::move(mask),
            ectstat::Frame(radius, pitch, {-0.5 * double(w) * pitch, -0.5 * double(h) * pitch})};
}

} // namespace testsupport
