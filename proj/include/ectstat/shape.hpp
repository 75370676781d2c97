#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ectstat {

using Point2 = std::array<double, 2>;

/// Physical embedding of a pixel grid.
///
/// Pixel (i, j) is the closed square with corners origin + (i, j) * pitch and
/// origin + (i + 1, j + 1) * pitch, so every cell vertex sits on the lattice
/// origin + Z^2 * pitch. Shapes must lie in the open ball B(0, radius).
class Frame {
public:
    Frame(double radius, double pitch, Point2 origin);

    /// Square frame of `resolution` pixels per side covering [-R, R]^2.
    static Frame centered(double radius, std::size_t resolution);

    double radius() const { return radius_; }
    double pitch() const { return pitch_; }
    const Point2& origin() const { return origin_; }
    /// Filtration horizon T = 2R.
    double horizon() const { return 2.0 * radius_; }

    Point2 lattice_point(std::int64_t i, std::int64_t j) const {
        return {origin_[0] + static_cast<double>(i) * pitch_,
                origin_[1] + static_cast<double>(j) * pitch_};
    }
    Point2 pixel_center(std::size_t i, std::size_t j) const {
        return {origin_[0] + (static_cast<double>(i) + 0.5) * pitch_,
                origin_[1] + (static_cast<double>(j) + 0.5) * pitch_};
    }

private:
    double radius_;
    double pitch_;
    Point2 origin_;
};

/// Nonempty binary pixel mask embedded in the plane by a Frame.
///
/// Construction rejects empty masks and masks whose foreground pixels have a
/// corner at or beyond the ball radius. Immutable afterwards.
class GridShape {
public:
    /// `mask` is indexed as mask[j * width + i]; nonzero means foreground.
    GridShape(std::size_t width, std::size_t height, std::vector<std::uint8_t> mask, Frame frame);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    const Frame& frame() const { return frame_; }
    std::span<const std::uint8_t> mask() const { return mask_; }

    bool at(std::size_t i, std::size_t j) const { return mask_[j * width_ + i] != 0; }
    /// Out-of-range coordinates read as background.
    bool at_or_background(std::int64_t i, std::int64_t j) const;

    std::size_t foreground_count() const;

    /// Corner (i + di, j + dj) of pixel (i, j), di, dj in {0, 1}.
    Point2 corner(std::size_t i, std::size_t j, int di, int dj) const {
        return frame_.lattice_point(static_cast<std::int64_t>(i) + di, static_cast<std::int64_t>(j) + dj);
    }

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<std::uint8_t> mask_;
    Frame frame_;
};

/// Throws ShapeExceedsBall naming the first foreground pixel with a corner
/// of norm >= R.
void validate_in_ball(std::size_t width, std::size_t height, std::span<const std::uint8_t> mask,
                      const Frame& frame);
void validate_in_ball(const GridShape& shape);

/// Unit vector in the plane, with the angle it was built from.
class Direction {
public:
    Direction(double x, double y);
    static Direction from_angle(double radians);

    double x() const { return x_; }
    double y() const { return y_; }
    /// atan2 angle normalised to [0, 2 pi).
    double angle() const;
    double dot(const Point2& p) const { return x_ * p[0] + y_ * p[1]; }

private:
    double x_;
    double y_;
};

class DirectionGrid {
public:
    explicit DirectionGrid(std::vector<Direction> directions);

    std::size_t size() const { return directions_.size(); }
    const Direction& operator[](std::size_t p) const { return directions_[p]; }
    const std::vector<Direction>& directions() const { return directions_; }

    /// Componentwise equality within `tol`.
    bool matches(const DirectionGrid& other, double tol = 1e-12) const;

private:
    std::vector<Direction> directions_;
};

class LevelGrid {
public:
    LevelGrid(std::vector<double> levels, double horizon);

    std::size_t size() const { return levels_.size(); }
    double operator[](std::size_t q) const { return levels_[q]; }
    const std::vector<double>& levels() const { return levels_; }
    double horizon() const { return horizon_; }

    bool matches(const LevelGrid& other, double tol = 1e-12) const;

private:
    std::vector<double> levels_;
    double horizon_;
};

/// nu_p = (cos(2 pi (p-1)/count), sin(2 pi (p-1)/count)), p = 1..count.
DirectionGrid uniform_directions(std::size_t count);
DirectionGrid directions_from_angles(std::span<const double> radians);
/// t_q = q * horizon / count, q = 1..count.
LevelGrid uniform_levels(std::size_t count, double horizon);

} // namespace ectstat
