#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ectstat/complex.hpp"
#include "ectstat/errors.hpp"
#include "ectstat/shape.hpp"

namespace ectstat {

/// Directions x levels sample of a transform, stored row-major.
template <typename T>
class TransformMatrix {
public:
    using value_type = T;

    TransformMatrix(DirectionGrid directions, LevelGrid levels)
        : directions_(std::move(directions)), levels_(std::move(levels)),
          values_(directions_.size() * levels_.size(), T{}) {}

    TransformMatrix(DirectionGrid directions, LevelGrid levels, std::vector<T> values)
        : directions_(std::move(directions)), levels_(std::move(levels)), values_(std::move(values)) {
        if (values_.size() != directions_.size() * levels_.size()) {
            throw InvalidArgument("transform matrix size does not match its grids");
        }
    }

    std::size_t rows() const { return directions_.size(); }
    std::size_t cols() const { return levels_.size(); }
    const DirectionGrid& direction_grid() const { return directions_; }
    const LevelGrid& level_grid() const { return levels_; }

    T& operator()(std::size_t p, std::size_t q) { return values_[p * cols() + q]; }
    const T& operator()(std::size_t p, std::size_t q) const { return values_[p * cols() + q]; }

    std::span<const T> row(std::size_t p) const { return {values_.data() + p * cols(), cols()}; }
    std::span<T> row(std::size_t p) { return {values_.data() + p * cols(), cols()}; }
    const std::vector<T>& values() const { return values_; }

    bool same_grids(const TransformMatrix& other) const {
        return directions_.matches(other.directions_) && levels_.matches(other.levels_);
    }

private:
    DirectionGrid directions_;
    LevelGrid levels_;
    std::vector<T> values_;
};

using ECTMatrix = TransformMatrix<std::int64_t>;
using SECTMatrix = TransformMatrix<double>;

/// Curve values at each level (right-continuous).
std::vector<std::int64_t> sample_ec(const StepFunction& curve, const LevelGrid& levels);

/// SECT(t_q) = I(t_q) - (t_q / T) I(T) with I the exact running integral.
std::vector<double> sect_curve(const StepFunction& curve, const LevelGrid& levels);

/// One Euler curve per direction, sharing a single complex.
std::vector<StepFunction> ec_curves(const GridShape& shape, const DirectionGrid& dirs);

ECTMatrix ect(const GridShape& shape, const DirectionGrid& dirs, const LevelGrid& levels);
SECTMatrix sect(const GridShape& shape, const DirectionGrid& dirs, const LevelGrid& levels);

ECTMatrix ect_from_curves(std::span<const StepFunction> curves, const DirectionGrid& dirs,
                          const LevelGrid& levels);
SECTMatrix sect_from_curves(std::span<const StepFunction> curves, const DirectionGrid& dirs,
                            const LevelGrid& levels);

/// Components (8-connected foreground) minus holes (4-connected background
/// regions not touching the border), by flood fill. Independent of the
/// cubical complex; used to cross-check it.
std::int64_t oracle_euler(const GridShape& shape);

} // namespace ectstat
