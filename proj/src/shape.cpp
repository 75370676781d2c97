#include "ectstat/shape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ectstat/errors.hpp"

namespace ectstat {

namespace {

std::string describe_exceeds(std::size_t i, std::size_t j, double norm, double radius) {
    std::ostringstream os;
    os.precision(17);
    os << "shape exceeds ball: pixel (" << i << ", " << j << ") has a corner at distance " << norm
       << " >= R = " << radius;
    return os.str();
}

} // namespace

ShapeExceedsBall::ShapeExceedsBall(std::size_t i, std::size_t j, double norm, double radius)
    : std::runtime_error(describe_exceeds(i, j, norm, radius)), i_(i), j_(j) {}

ShapeExceedsBall::ShapeExceedsBall(const std::string& what) : std::runtime_error(what) {}

Frame::Frame(double radius, double pitch, Point2 origin) : radius_(radius), pitch_(pitch), origin_(origin) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("frame radius must be positive");
    if (!(pitch > 0.0) || !std::isfinite(pitch)) throw InvalidArgument("pixel pitch must be positive");
    if (!std::isfinite(origin[0]) || !std::isfinite(origin[1])) throw InvalidArgument("frame origin must be finite");
}

Frame Frame::centered(double radius, std::size_t resolution) {
    if (resolution == 0) throw InvalidArgument("resolution must be positive");
    return Frame(radius, 2.0 * radius / static_cast<double>(resolution), {-radius, -radius});
}

GridShape::GridShape(std::size_t width, std::size_t height, std::vector<std::uint8_t> mask, Frame frame)
    : width_(width), height_(height), mask_(std::move(mask)), frame_(frame) {
    if (width == 0 || height == 0) throw InvalidArgument("grid dimensions must be positive");
    if (mask_.size() != width * height) throw InvalidArgument("mask size does not match width x height");
    if (std::none_of(mask_.begin(), mask_.end(), [](std::uint8_t v) { return v != 0; })) {
        throw InvalidArgument("shape has no foreground pixels");
    }
    validate_in_ball(width_, height_, mask_, frame_);
}

bool GridShape::at_or_background(std::int64_t i, std::int64_t j) const {
    if (i < 0 || j < 0 || i >= static_cast<std::int64_t>(width_) || j >= static_cast<std::int64_t>(height_)) {
        return false;
    }
    return at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
}

std::size_t GridShape::foreground_count() const {
    return static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(), [](std::uint8_t v) { return v != 0; }));
}

void validate_in_ball(std::size_t width, std::size_t height, std::span<const std::uint8_t> mask,
                      const Frame& frame) {
    const double r = frame.radius();
    for (std::size_t j = 0; j < height; ++j) {
        for (std::size_t i = 0; i < width; ++i) {
            if (mask[j * width + i] == 0) continue;
            for (int dj = 0; dj < 2; ++dj) {
                for (int di = 0; di < 2; ++di) {
                    const Point2 c = frame.lattice_point(static_cast<std::int64_t>(i) + di,
                                                         static_cast<std::int64_t>(j) + dj);
                    const double norm = std::hypot(c[0], c[1]);
                    if (!(norm < r)) throw ShapeExceedsBall(i, j, norm, r);
                }
            }
        }
    }
}

void validate_in_ball(const GridShape& shape) {
    validate_in_ball(shape.width(), shape.height(), shape.mask(), shape.frame());
}

Direction::Direction(double x, double y) : x_(x), y_(y) {
    if (!(std::abs(std::hypot(x, y) - 1.0) < 1e-12)) throw InvalidArgument("direction must be a unit vector");
}

Direction Direction::from_angle(double radians) {
    if (!std::isfinite(radians)) throw InvalidArgument("direction angle must be finite");
    return Direction(std::cos(radians), std::sin(radians));
}

double Direction::angle() const {
    double a = std::atan2(y_, x_);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    if (a >= 2.0 * std::numbers::pi) a = 0.0;
    return a;
}

DirectionGrid::DirectionGrid(std::vector<Direction> directions) : directions_(std::move(directions)) {
    if (directions_.empty()) throw InvalidArgument("direction grid must be nonempty");
}

bool DirectionGrid::matches(const DirectionGrid& other, double tol) const {
    if (size() != other.size()) return false;
    for (std::size_t p = 0; p < size(); ++p) {
        if (std::abs(directions_[p].x() - other[p].x()) > tol || std::abs(directions_[p].y() - other[p].y()) > tol) {
            return false;
        }
    }
    return true;
}

LevelGrid::LevelGrid(std::vector<double> levels, double horizon) : levels_(std::move(levels)), horizon_(horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("level horizon must be positive");
    if (levels_.empty()) throw InvalidArgument("level grid must be nonempty");
    if (!(levels_.front() > 0.0)) throw InvalidArgument("levels must be positive");
    if (levels_.back() > horizon) throw InvalidArgument("levels must not exceed the horizon");
    for (std::size_t q = 1; q < levels_.size(); ++q) {
        if (!(levels_[q] > levels_[q - 1])) throw InvalidArgument("levels must be strictly increasing");
    }
}

bool LevelGrid::matches(const LevelGrid& other, double tol) const {
    if (size() != other.size()) return false;
    for (std::size_t q = 0; q < size(); ++q) {
        if (std::abs(levels_[q] - other[q]) > tol) return false;
    }
    return true;
}

DirectionGrid uniform_directions(std::size_t count) {
    if (count == 0) throw InvalidArgument("direction count must be positive");
    std::vector<Direction> dirs;
    dirs.reserve(count);
    for (std::size_t p = 0; p < count; ++p) {
        dirs.push_back(Direction::from_angle(2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(count)));
    }
    return DirectionGrid(std::move(dirs));
}

DirectionGrid directions_from_angles(std::span<const double> radians) {
    std::vector<Direction> dirs;
    dirs.reserve(radians.size());
    for (double a : radians) dirs.push_back(Direction::from_angle(a));
    return DirectionGrid(std::move(dirs));
}

LevelGrid uniform_levels(std::size_t count, double horizon) {
    if (count == 0) throw InvalidArgument("level count must be positive");
    if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
    std::vector<double> levels(count);
    for (std::size_t q = 0; q < count; ++q) {
        levels[q] = static_cast<double>(q + 1) * horizon / static_cast<double>(count);
    }
    // (n * T) / n can round one ulp away from T.
    levels.back() = horizon;
    return LevelGrid(std::move(levels), horizon);
}

} // namespace ectstat
