#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ectstat/transform.hpp"

namespace ectstat {

/// Symmetric N x N matrix of pairwise shape distances with zero diagonal.
class DistanceMatrix {
public:
    explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}
    /// Row-major entries; must be symmetric, nonnegative, zero on the diagonal.
    DistanceMatrix(std::size_t n, std::vector<double> entries);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    /// Sets both (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, double v);

    DistanceMatrix scaled(double c) const;

private:
    std::size_t n_;
    std::vector<double> d_;
};

/// Group membership (1 or 2) for each pooled shape; both groups need >= 2.
class GroupLabels {
public:
    explicit GroupLabels(std::vector<std::uint8_t> labels);
    /// First n1 shapes in group 1, next n2 in group 2.
    static GroupLabels from_sizes(std::size_t n1, std::size_t n2);

    std::size_t size() const { return labels_.size(); }
    std::size_t n1() const { return n1_; }
    std::size_t n2() const { return n2_; }
    std::uint8_t operator[](std::size_t i) const { return labels_[i]; }
    std::span<const std::uint8_t> labels() const { return labels_; }

private:
    std::vector<std::uint8_t> labels_;
    std::size_t n1_ = 0;
    std::size_t n2_ = 0;
};

/// max_p sqrt(sum_q |a[p,q] - b[p,q]|^2). No level-spacing weight.
double rho_hat(const SECTMatrix& a, const SECTMatrix& b);
/// Same estimator on integer ECT matrices.
double theta_hat(const ECTMatrix& a, const ECTMatrix& b);

DistanceMatrix pairwise_distances(std::span<const SECTMatrix> transforms);
DistanceMatrix pairwise_distances(std::span<const ECTMatrix> transforms);

/// sum_j 1/(2 n_j (n_j - 1)) sum_{k,l in group j} d(k, l): half the mean
/// within-group pairwise distance, summed over the two groups.
double loss_from_labels(const DistanceMatrix& dist, const GroupLabels& labels);

/// Unchecked variant for the permutation loop: `labels` holds 1/2 values
/// with group sizes n1, n2 >= 2.
double within_group_loss(const DistanceMatrix& dist, std::span<const std::uint8_t> labels, std::size_t n1,
                         std::size_t n2);

} // namespace ectstat
