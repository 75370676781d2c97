#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ectstat {

/// Bad argument to a constructor or operation (counts, levels, tolerances).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A foreground cell of a shape reaches outside the open ball B(0, R).
class ShapeExceedsBall : public std::runtime_error {
public:
    ShapeExceedsBall(std::size_t i, std::size_t j, double norm, double radius);
    /// For cells that cannot be traced back to a pixel.
    explicit ShapeExceedsBall(const std::string& what);

    std::size_t pixel_i() const { return i_; }
    std::size_t pixel_j() const { return j_; }

private:
    std::size_t i_ = static_cast<std::size_t>(-1);
    std::size_t j_ = static_cast<std::size_t>(-1);
};

/// Two transforms were sampled on different direction or level grids.
class IncompatibleGrids : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A group has fewer than two members.
class DegenerateGroup : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Test or experiment configuration cannot be honoured.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. The message carries the file and line.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ectstat
