#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ectstat/metrics.hpp"

namespace ectstat {

struct TestConfig {
    double alpha = 0.05;
    std::size_t num_permutations = 1000;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class Decision { Accept, Reject };

const char* to_string(Decision d);

struct TestResult {
    double observed_loss = 0.0;
    /// Loss of relabeling k = 1..Pi, in draw order.
    std::vector<double> permuted_losses;
    /// Largest integer strictly below alpha * Pi (1-based order statistic).
    std::size_t threshold_index = 0;
    Decision decision = Decision::Accept;
    /// (1 + #{k : loss_k <= observed}) / (Pi + 1).
    double p_value = 1.0;

    bool operator==(const TestResult&) const = default;
};

/// Largest integer strictly smaller than alpha * permutations. Throws
/// ConfigError when that is below 1.
std::size_t threshold_index(double alpha, std::size_t permutations);

/// Randomization test on a precomputed distance matrix: reject when the
/// observed within-group loss is strictly below the k*-th smallest permuted
/// loss. Deterministic in (dist, labels, config.seed) and independent of the
/// worker count.
TestResult permutation_test(const DistanceMatrix& dist, const GroupLabels& labels, const TestConfig& config);

TestResult nhst_sect(std::span<const GridShape> group1, std::span<const GridShape> group2,
                     const DirectionGrid& dirs, const LevelGrid& levels, const TestConfig& config);
TestResult nhst_ect(std::span<const GridShape> group1, std::span<const GridShape> group2,
                    const DirectionGrid& dirs, const LevelGrid& levels, const TestConfig& config);

} // namespace ectstat
