#include "ectstat/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ectstat/parallel.hpp"

namespace ectstat {

namespace {

template <typename T>
double max_row_l2(const TransformMatrix<T>& a, const TransformMatrix<T>& b) {
    if (!a.same_grids(b)) throw IncompatibleGrids("transforms were sampled on different grids");
    double best = 0.0;
    for (std::size_t p = 0; p < a.rows(); ++p) {
        const auto ra = a.row(p);
        const auto rb = b.row(p);
        double ss = 0.0;
        for (std::size_t q = 0; q < ra.size(); ++q) {
            const double d = static_cast<double>(ra[q]) - static_cast<double>(rb[q]);
            ss += d * d;
        }
        best = std::max(best, std::sqrt(ss));
    }
    return best;
}

template <typename T>
DistanceMatrix pairwise(std::span<const TransformMatrix<T>> transforms) {
    const std::size_t n = transforms.size();
    if (n < 2) throw InvalidArgument("at least two transforms are required");
    for (std::size_t i = 1; i < n; ++i) {
        if (!transforms[0].same_grids(transforms[i])) {
            throw IncompatibleGrids("transform " + std::to_string(i) + " uses a different grid");
        }
    }
    DistanceMatrix dist(n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) dist.set(i, j, max_row_l2(transforms[i], transforms[j]));
    });
    return dist;
}

} // namespace

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> entries) : n_(n), d_(std::move(entries)) {
    if (d_.size() != n * n) throw InvalidArgument("distance matrix must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
        if (d_[i * n + i] != 0.0) throw InvalidArgument("distance matrix diagonal must be zero");
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d_[i * n + j];
            if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("distances must be finite and nonnegative");
            if (v != d_[j * n + i]) throw InvalidArgument("distance matrix must be symmetric");
        }
    }
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
}

DistanceMatrix DistanceMatrix::scaled(double c) const {
    if (!(c > 0.0)) throw InvalidArgument("scale must be positive");
    DistanceMatrix out(*this);
    for (double& v : out.d_) v *= c;
    return out;
}

GroupLabels::GroupLabels(std::vector<std::uint8_t> labels) : labels_(std::move(labels)) {
    for (std::uint8_t l : labels_) {
        if (l == 1) {
            ++n1_;
        } else if (l == 2) {
            ++n2_;
        } else {
            throw InvalidArgument("group labels must be 1 or 2");
        }
    }
    if (n1_ < 2 || n2_ < 2) {
        throw DegenerateGroup("each group needs at least 2 shapes (got n1 = " + std::to_string(n1_) +
                              ", n2 = " + std::to_string(n2_) + ")");
    }
}

GroupLabels GroupLabels::from_sizes(std::size_t n1, std::size_t n2) {
    std::vector<std::uint8_t> labels(n1 + n2, 2);
    std::fill_n(labels.begin(), n1, std::uint8_t{1});
    return GroupLabels(std::move(labels));
}

double rho_hat(const SECTMatrix& a, const SECTMatrix& b) { return max_row_l2(a, b); }

double theta_hat(const ECTMatrix& a, const ECTMatrix& b) { return max_row_l2(a, b); }

DistanceMatrix pairwise_distances(std::span<const SECTMatrix> transforms) { return pairwise(transforms); }

DistanceMatrix pairwise_distances(std::span<const ECTMatrix> transforms) { return pairwise(transforms); }

double within_group_loss(const DistanceMatrix& dist, std::span<const std::uint8_t> labels, std::size_t n1,
                         std::size_t n2) {
    const std::size_t n = labels.size();
    double sum1 = 0.0;
    double sum2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint8_t lk = labels[k];
        double acc = 0.0;
        for (std::size_t l = k + 1; l < n; ++l) {
            if (labels[l] == lk) acc += dist(k, l);
        }
        (lk == 1 ? sum1 : sum2) += acc;
    }
    // Unordered sums; the ordered double sum is twice these.
    const double m1 = static_cast<double>(n1);
    const double m2 = static_cast<double>(n2);
    return sum1 / (m1 * (m1 - 1.0)) + sum2 / (m2 * (m2 - 1.0));
}

double loss_from_labels(const DistanceMatrix& dist, const GroupLabels& labels) {
    if (dist.size() != labels.size()) throw InvalidArgument("labels and distance matrix sizes differ");
    return within_group_loss(dist, labels.labels(), labels.n1(), labels.n2());
}

} // namespace ectstat
