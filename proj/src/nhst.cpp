#include "ectstat/nhst.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ectstat/parallel.hpp"
#include "ectstat/random.hpp"

namespace ectstat {

void TestConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (num_permutations == 0) throw ConfigError("the number of permutations must be positive");
}

const char* to_string(Decision d) { return d == Decision::Reject ? "Reject" : "Accept"; }

std::size_t threshold_index(double alpha, std::size_t permutations) {
    const double x = alpha * static_cast<double>(permutations);
    const double nearest = std::round(x);
    // alpha * Pi can land a rounding error away from an integer (0.05 * 300).
    const bool integral = std::abs(x - nearest) <= 1e-9 * std::max(1.0, x);
    const double k = integral ? nearest - 1.0 : std::floor(x);
    if (k < 1.0) {
        throw ConfigError("alpha * permutations = " + std::to_string(x) +
                          " leaves no order statistic below it; increase the number of permutations");
    }
    return static_cast<std::size_t>(k);
}

TestResult permutation_test(const DistanceMatrix& dist, const GroupLabels& labels, const TestConfig& config) {
    config.validate();
    if (dist.size() != labels.size()) throw InvalidArgument("labels and distance matrix sizes differ");
    const std::size_t k_star = threshold_index(config.alpha, config.num_permutations);

    TestResult result;
    result.threshold_index = k_star;
    result.observed_loss = loss_from_labels(dist, labels);
    result.permuted_losses.assign(config.num_permutations, 0.0);

    const std::vector<std::uint8_t> base(labels.labels().begin(), labels.labels().end());
    parallel_for(config.num_permutations, [&](std::size_t k) {
        // Substream per permutation index keeps results independent of scheduling.
        Engine rng(derive_seed(config.seed, {static_cast<std::uint64_t>(k + 1)}));
        std::vector<std::uint8_t> perm = base;
        for (std::size_t i = perm.size() - 1; i > 0; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i);
            std::swap(perm[i], perm[pick(rng)]);
        }
        result.permuted_losses[k] = within_group_loss(dist, perm, labels.n1(), labels.n2());
    });

    std::vector<double> sorted = result.permuted_losses;
    std::sort(sorted.begin(), sorted.end());
    result.decision = result.observed_loss < sorted[k_star - 1] ? Decision::Reject : Decision::Accept;
    const auto at_most = static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), result.observed_loss) - sorted.begin());
    result.p_value = static_cast<double>(1 + at_most) / static_cast<double>(config.num_permutations + 1);
    return result;
}

namespace {

template <typename Matrix, typename TransformFn>
TestResult run_nhst(std::span<const GridShape> group1, std::span<const GridShape> group2, const DirectionGrid& dirs,
                    const LevelGrid& levels, const TestConfig& config, TransformFn transform) {
    config.validate();
    if (group1.size() < 2 || group2.size() < 2) throw DegenerateGroup("each group needs at least 2 shapes");
    const std::size_t n = group1.size() + group2.size();
    std::vector<std::optional<Matrix>> slots(n);
    parallel_for(n, [&](std::size_t i) {
        const GridShape& s = i < group1.size() ? group1[i] : group2[i - group1.size()];
        slots[i].emplace(transform(s, dirs, levels));
    });
    std::vector<Matrix> transforms;
    transforms.reserve(n);
    for (auto& s : slots) transforms.push_back(std::move(*s));
    const DistanceMatrix dist = pairwise_distances(std::span<const Matrix>(transforms));
    return permutation_test(dist, GroupLabels::from_sizes(group1.size(), group2.size()), config);
}

} // namespace

TestResult nhst_sect(std::span<const GridShape> group1, std::span<const GridShape> group2, const DirectionGrid& dirs,
                     const LevelGrid& levels, const TestConfig& config) {
    return run_nhst<SECTMatrix>(group1, group2, dirs, levels, config,
                                [](const GridShape& s, const DirectionGrid& d, const LevelGrid& l) {
                                    return sect(s, d, l);
                                });
}

TestResult nhst_ect(std::span<const GridShape> group1, std::span<const GridShape> group2, const DirectionGrid& dirs,
                    const LevelGrid& levels, const TestConfig& config) {
    return run_nhst<ECTMatrix>(group1, group2, dirs, levels, config,
                               [](const GridShape& s, const DirectionGrid& d, const LevelGrid& l) {
                                   return ect(s, d, l);
                               });
}

} // namespace ectstat
