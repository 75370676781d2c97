#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ectstat/nhst.hpp"
#include "ectstat/random.hpp"
#include "ectstat/shape.hpp"

namespace ectstat {

/// One elliptical arc (center_x + a cos t, b sin t), t in [angle_lo, angle_hi].
struct Arc {
    double center_x = 0.0;
    double axis_a = 1.0;
    double axis_b = 1.0;
    double angle_lo = 0.0;
    double angle_hi = 0.0;

    Point2 at(double t) const;
};

/// Two-armed arc set S; the shape is its closed tube of radius tube_radius.
struct ArcSpec {
    std::array<Arc, 2> arms;
    double tube_radius = 0.2;
};

struct EpsilonConfig {
    double epsilon = 0.0;
    double noise_mean = 1.0;
    double noise_sd = 0.05;

    void validate() const;
};

/// Draws the axes of both arms from Normal(noise_mean, noise_sd^2); the
/// angular range of arm 1 widens with epsilon.
ArcSpec sample_arcspec(const EpsilonConfig& cfg, Engine& rng);

/// Distance from p to the arc set, refined to ~1e-6 in the arc parameter.
double distance_to_arcs(const ArcSpec& spec, const Point2& p);

/// Fills background pixels whose 4-connected background component reaches a
/// larger background region only through pixel corners. Under the closed
/// pixel convention such pixels are holes that the continuous shape does not
/// have (the tip of a narrow wedge between two tubes). Returns the number of
/// pixels filled.
std::size_t close_diagonal_pinches(std::vector<std::uint8_t>& mask, std::size_t width, std::size_t height);

/// Raw tube raster on a resolution x resolution frame: foreground iff the
/// pixel center is within tube_radius of the arcs.
std::vector<std::uint8_t> tube_mask(const ArcSpec& spec, const Frame& frame, std::size_t resolution);

/// Fills enclosed background components whose pixel centers all lie within
/// one pitch of the tube: slivers of a narrow wedge that the raster cut off
/// from the outside. Real holes have centers far from the arcs. Returns the
/// number of pixels filled.
std::size_t close_slivers(const ArcSpec& spec, const Frame& frame, std::vector<std::uint8_t>& mask,
                          std::size_t resolution);

/// tube_mask with diagonal pinches and slivers closed. The frame is resolution x resolution pixels covering [-R, R]^2.
GridShape rasterize(const ArcSpec& spec, std::size_t resolution, double radius);

enum class Method { SECT, ECT };

const char* to_string(Method m);

struct ExperimentConfig {
    std::vector<double> epsilons{0.0, 0.0125, 0.025, 0.0375, 0.05, 0.075, 0.1};
    std::size_t n_per_group = 100;
    std::size_t replicates = 100;
    /// Half-circle grid (p - 1) pi / 4, p = 1..4.
    std::vector<double> direction_angles{0.0, 0.25 * 3.14159265358979323846, 0.5 * 3.14159265358979323846,
                                         0.75 * 3.14159265358979323846};
    std::size_t levels = 50;
    double radius = 1.8;
    std::size_t resolution = 180;
    double noise_mean = 1.0;
    double noise_sd = 0.05;
    double alpha = 0.05;
    std::size_t permutations = 1000;
    std::uint64_t seed = 20240101;

    void validate() const;
    DirectionGrid direction_grid() const;
    LevelGrid level_grid() const;
};

struct ReplicateRecord {
    double epsilon = 0.0;
    std::size_t replicate = 0;
    Method method = Method::SECT;
    double p_value = 1.0;
    double observed_loss = 0.0;
    Decision decision = Decision::Accept;
};

struct RejectionRow {
    double epsilon = 0.0;
    std::size_t rejections = 0;
    std::size_t replicates = 0;

    double rate() const { return replicates == 0 ? 0.0 : static_cast<double>(rejections) / replicates; }
};

struct RejectionTable {
    Method method = Method::SECT;
    std::vector<RejectionRow> rows;

    /// Rate at the given epsilon; throws InvalidArgument if absent.
    double rate(double epsilon) const;
};

/// One SECT curve set of an example shape per epsilon, for plotting.
struct ExampleCurves {
    double epsilon = 0.0;
    SECTMatrix sect;
};

struct ExperimentResult {
    std::vector<RejectionTable> tables;
    std::vector<ReplicateRecord> records;
    std::vector<ExampleCurves> examples;

    const RejectionTable& table(Method m) const;
};

/// Draws the cohorts of one (epsilon, replicate) cell; exposed for tests.
struct Cohorts {
    std::vector<GridShape> reference;
    std::vector<GridShape> shifted;
};
Cohorts draw_cohorts(const ExperimentConfig& cfg, double epsilon, std::size_t replicate);

/// Per epsilon and replicate: draw n shapes from P(0) and n from P(epsilon),
/// transform them and run the requested tests. Both methods share shapes.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<Method>& methods);
RejectionTable run_experiment(const ExperimentConfig& cfg, Method method);

} // namespace ectstat
