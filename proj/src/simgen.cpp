#include "ectstat/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

#include "ectstat/parallel.hpp"
#include "ectstat/transform.hpp"

namespace ectstat {

namespace {

constexpr std::size_t kArcSamples = 4096;
// Stamping only has to be finer than the pixel pitch; the band below the
// sample spacing is refined exactly.
constexpr std::size_t kStampSamples = 512;
constexpr double kParamTolerance = 1e-7;

double sq(double v) { return v * v; }

double dist2(const Point2& a, const Point2& b) { return sq(a[0] - b[0]) + sq(a[1] - b[1]); }

double arc_param(const Arc& arc, std::size_t k, std::size_t count) {
    return arc.angle_lo + (arc.angle_hi - arc.angle_lo) * static_cast<double>(k) / static_cast<double>(count - 1);
}

/// Golden-section minimum of |arc(t) - p|^2 on [lo, hi].
double refine(const Arc& arc, const Point2& p, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    auto f = [&](double t) { return dist2(arc.at(t), p); };
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > kParamTolerance) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return std::min({f(lo), f(hi), f(0.5 * (a + b))});
}

double refined_distance2(const Arc& arc, const Point2& p, std::size_t k, std::size_t count) {
    const double lo = arc_param(arc, k == 0 ? 0 : k - 1, count);
    const double hi = arc_param(arc, std::min(k + 1, count - 1), count);
    return refine(arc, p, lo, hi);
}

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

double draw_axis(const EpsilonConfig& cfg, Engine& rng) {
    std::normal_distribution<double> normal(cfg.noise_mean, cfg.noise_sd);
    for (;;) {
        const double v = normal(rng);
        if (v > 0.0) return v;
        std::clog << "ectstat: resampling nonpositive arc axis " << v << '\n';
    }
}

} // namespace

Point2 Arc::at(double t) const { return {center_x + axis_a * std::cos(t), axis_b * std::sin(t)}; }

void EpsilonConfig::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 0.1)) throw InvalidArgument("epsilon must lie in [0, 0.1]");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw InvalidArgument("noise sd must be nonnegative");
    if (!(noise_mean > 0.0) || !std::isfinite(noise_mean)) throw InvalidArgument("noise mean must be positive");
}

ArcSpec sample_arcspec(const EpsilonConfig& cfg, Engine& rng) {
    cfg.validate();
    constexpr double pi = std::numbers::pi;
    // Draw order a1, a2, b1, b2.
    const double a1 = draw_axis(cfg, rng);
    const double a2 = draw_axis(cfg, rng);
    const double b1 = draw_axis(cfg, rng);
    const double b2 = draw_axis(cfg, rng);
    ArcSpec spec;
    spec.arms[0] = Arc{0.4, a1, b1, (1.0 - cfg.epsilon) * pi / 5.0, (9.0 + cfg.epsilon) * pi / 5.0};
    spec.arms[1] = Arc{-0.4, a2, b2, 6.0 * pi / 5.0, 14.0 * pi / 5.0};
    spec.tube_radius = 0.2;
    return spec;
}

double distance_to_arcs(const ArcSpec& spec, const Point2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Arc& arc : spec.arms) {
        std::size_t best_k = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < kArcSamples; ++k) {
            const double d2 = dist2(arc.at(arc_param(arc, k, kArcSamples)), p);
            if (d2 < best_d2) {
                best_d2 = d2;
                best_k = k;
            }
        }
        best = std::min({best, best_d2, refined_distance2(arc, p, best_k, kArcSamples)});
    }
    return std::sqrt(best);
}

std::vector<std::uint8_t> tube_mask(const ArcSpec& spec, const Frame& frame, std::size_t resolution) {
    const double pitch = frame.pitch();
    const double r = spec.tube_radius;
    const std::size_t npix = resolution * resolution;
    const auto res = static_cast<std::int64_t>(resolution);

    struct Nearest {
        double d2 = std::numeric_limits<double>::infinity();
        std::uint32_t k = 0;
    };
    std::array<std::vector<Nearest>, 2> nearest{std::vector<Nearest>(npix), std::vector<Nearest>(npix)};
    std::array<double, 2> spacing{};

    // Stamp every arc sample onto the pixels whose centers it could reach.
    for (std::size_t m = 0; m < 2; ++m) {
        const Arc& arc = spec.arms[m];
        std::vector<Point2> pts(kStampSamples);
        for (std::size_t k = 0; k < kStampSamples; ++k) pts[k] = arc.at(arc_param(arc, k, kStampSamples));
        double h = 0.0;
        for (std::size_t k = 1; k < kStampSamples; ++k) h = std::max(h, std::sqrt(dist2(pts[k], pts[k - 1])));
        spacing[m] = h;
        const double reach = r + h;
        auto& near = nearest[m];
        for (std::size_t k = 0; k < kStampSamples; ++k) {
            const Point2& s = pts[k];
            const auto to_index = [&](double x, double o) { return (x - o) / pitch - 0.5; };
            const std::int64_t i0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(to_index(s[0] - reach, frame.origin()[0]))));
            const std::int64_t i1 = std::min<std::int64_t>(res - 1, static_cast<std::int64_t>(std::floor(to_index(s[0] + reach, frame.origin()[0]))));
            const std::int64_t j0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(to_index(s[1] - reach, frame.origin()[1]))));
            const std::int64_t j1 = std::min<std::int64_t>(res - 1, static_cast<std::int64_t>(std::floor(to_index(s[1] + reach, frame.origin()[1]))));
            for (std::int64_t j = j0; j <= j1; ++j) {
                const double cy = frame.origin()[1] + (static_cast<double>(j) + 0.5) * pitch;
                for (std::int64_t i = i0; i <= i1; ++i) {
                    const double cx = frame.origin()[0] + (static_cast<double>(i) + 0.5) * pitch;
                    const double d2 = sq(cx - s[0]) + sq(cy - s[1]);
                    Nearest& n = near[static_cast<std::size_t>(j * res + i)];
                    if (d2 < n.d2) {
                        n.d2 = d2;
                        n.k = static_cast<std::uint32_t>(k);
                    }
                }
            }
        }
    }

    // Sample distances overestimate the true distance by less than the sample
    // spacing; only pixels inside that band need refinement.
    std::vector<std::uint8_t> mask(npix, 0);
    for (std::size_t idx = 0; idx < npix; ++idx) {
        const double c0 = std::sqrt(nearest[0][idx].d2);
        const double c1 = std::sqrt(nearest[1][idx].d2);
        if (std::min(c0, c1) <= r) {
            mask[idx] = 1;
            continue;
        }
        const bool near0 = c0 <= r + spacing[0];
        const bool near1 = c1 <= r + spacing[1];
        if (!near0 && !near1) continue;
        const Point2 p = frame.pixel_center(idx % resolution, idx / resolution);
        double best = std::numeric_limits<double>::infinity();
        if (near0) best = std::min(best, refined_distance2(spec.arms[0], p, nearest[0][idx].k, kStampSamples));
        if (near1) best = std::min(best, refined_distance2(spec.arms[1], p, nearest[1][idx].k, kStampSamples));
        if (std::sqrt(best) <= r) mask[idx] = 1;
    }
    return mask;
}

std::size_t close_slivers(const ArcSpec& spec, const Frame& frame, std::vector<std::uint8_t>& mask,
                          std::size_t resolution) {
    const std::size_t n = resolution * resolution;
    const double limit = spec.tube_radius + frame.pitch();
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::size_t> comp;
    std::vector<std::size_t> stack;
    std::size_t filled = 0;
    for (std::size_t start = 0; start < n; ++start) {
        if (mask[start] != 0 || seen[start] != 0) continue;
        comp.clear();
        stack.assign(1, start);
        seen[start] = 1;
        bool enclosed = true;
        while (!stack.empty()) {
            const std::size_t id = stack.back();
            stack.pop_back();
            comp.push_back(id);
            const std::size_t i = id % resolution;
            const std::size_t j = id / resolution;
            if (i == 0 || j == 0 || i + 1 == resolution || j + 1 == resolution) enclosed = false;
            auto visit = [&](std::size_t nb) {
                if (mask[nb] == 0 && seen[nb] == 0) {
                    seen[nb] = 1;
                    stack.push_back(nb);
                }
            };
            if (i > 0) visit(id - 1);
            if (i + 1 < resolution) visit(id + 1);
            if (j > 0) visit(id - resolution);
            if (j + 1 < resolution) visit(id + resolution);
        }
        if (!enclosed) continue;
        const bool thin = std::all_of(comp.begin(), comp.end(), [&](std::size_t id) {
            return distance_to_arcs(spec, frame.pixel_center(id % resolution, id / resolution)) < limit;
        });
        if (!thin) continue;
        for (std::size_t id : comp) mask[id] = 1;
        filled += comp.size();
    }
    return filled;
}

GridShape rasterize(const ArcSpec& spec, std::size_t resolution, double radius) {
    if (resolution < 16) throw InvalidArgument("raster resolution must be at least 16");
    const Frame frame = Frame::centered(radius, resolution);
    std::vector<std::uint8_t> mask = tube_mask(spec, frame, resolution);
    close_diagonal_pinches(mask, resolution, resolution);
    close_slivers(spec, frame, mask, resolution);
    return GridShape(resolution, resolution, std::move(mask), frame);
}

std::size_t close_diagonal_pinches(std::vector<std::uint8_t>& mask, std::size_t width, std::size_t height) {
    const std::size_t n = width * height;
    // Background 4-components; index n stands for everything outside the grid.
    DisjointSets four(n + 1);
    auto bg = [&](std::size_t i, std::size_t j) { return mask[j * width + i] == 0; };
    for (std::size_t j = 0; j < height; ++j) {
        for (std::size_t i = 0; i < width; ++i) {
            if (!bg(i, j)) continue;
            const std::size_t id = j * width + i;
            if (i == 0 || j == 0 || i + 1 == width || j + 1 == height) four.unite(id, n);
            if (i + 1 < width && bg(i + 1, j)) four.unite(id, id + 1);
            if (j + 1 < height && bg(i, j + 1)) four.unite(id, id + width);
        }
    }
    // Merge 4-components touching diagonally into 8-components.
    std::vector<std::size_t> comp(n + 1);
    for (std::size_t id = 0; id <= n; ++id) comp[id] = four.find(id);
    DisjointSets eight(n + 1);
    for (std::size_t j = 0; j + 1 < height; ++j) {
        for (std::size_t i = 0; i < width; ++i) {
            if (!bg(i, j)) continue;
            const std::size_t id = j * width + i;
            if (i + 1 < width && bg(i + 1, j + 1)) eight.unite(comp[id], comp[id + width + 1]);
            if (i > 0 && bg(i - 1, j + 1)) eight.unite(comp[id], comp[id + width - 1]);
        }
    }
    // Within each 8-component keep the largest 4-component (the outside wins
    // outright) and fill the rest.
    std::vector<std::size_t> size(n + 1, 0);
    for (std::size_t id = 0; id < n; ++id) {
        if (mask[id] == 0) ++size[comp[id]];
    }
    size[comp[n]] = n + 1;
    std::vector<std::size_t> keep(n + 1, n + 1);
    for (std::size_t id = 0; id <= n; ++id) {
        if (id < n && mask[id] != 0) continue;
        const std::size_t c = comp[id];
        const std::size_t g = eight.find(c);
        if (keep[g] == n + 1 || size[c] > size[keep[g]]) keep[g] = c;
    }
    std::size_t filled = 0;
    for (std::size_t id = 0; id < n; ++id) {
        if (mask[id] != 0) continue;
        if (comp[id] != keep[eight.find(comp[id])]) {
            mask[id] = 1;
            ++filled;
        }
    }
    return filled;
}

const char* to_string(Method m) { return m == Method::SECT ? "sect" : "ect"; }

void ExperimentConfig::validate() const {
    if (epsilons.empty()) throw ConfigError("at least one epsilon is required");
    for (double e : epsilons) {
        if (!(e >= 0.0 && e <= 0.1)) throw ConfigError("epsilon values must lie in [0, 0.1]");
    }
    if (n_per_group < 2) throw ConfigError("n_per_group must be at least 2");
    if (replicates == 0) throw ConfigError("replicates must be positive");
    if (direction_angles.empty()) throw ConfigError("at least one direction is required");
    if (levels == 0) throw ConfigError("levels must be positive");
    if (!(radius > 0.0)) throw ConfigError("radius must be positive");
    if (resolution < 16) throw ConfigError("resolution must be at least 16");
    if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be nonnegative");
    if (!(noise_mean > 0.0)) throw ConfigError("noise_mean must be positive");
    TestConfig{alpha, permutations, seed}.validate();
    threshold_index(alpha, permutations);
}

DirectionGrid ExperimentConfig::direction_grid() const { return directions_from_angles(direction_angles); }

LevelGrid ExperimentConfig::level_grid() const { return uniform_levels(levels, 2.0 * radius); }

double RejectionTable::rate(double epsilon) const {
    for (const auto& row : rows) {
        if (row.epsilon == epsilon) return row.rate();
    }
    throw InvalidArgument("epsilon not present in rejection table");
}

const RejectionTable& ExperimentResult::table(Method m) const {
    for (const auto& t : tables) {
        if (t.method == m) return t;
    }
    throw InvalidArgument(std::string("no table for method ") + to_string(m));
}

namespace {

GridShape draw_shape(const ExperimentConfig& cfg, double epsilon, std::size_t replicate, std::uint64_t group,
                     std::size_t index) {
    Engine rng(derive_seed(cfg.seed, {key_of(epsilon), replicate, group, index}));
    const EpsilonConfig ec{group == 0 ? 0.0 : epsilon, cfg.noise_mean, cfg.noise_sd};
    return rasterize(sample_arcspec(ec, rng), cfg.resolution, cfg.radius);
}

struct CellOutcome {
    std::vector<ReplicateRecord> records;
};

} // namespace

Cohorts draw_cohorts(const ExperimentConfig& cfg, double epsilon, std::size_t replicate) {
    const std::size_t n = cfg.n_per_group;
    std::vector<std::optional<GridShape>> slots(2 * n);
    parallel_for(2 * n, [&](std::size_t i) {
        const std::uint64_t group = i < n ? 0 : 1;
        slots[i].emplace(draw_shape(cfg, epsilon, replicate, group, i % n));
    });
    Cohorts c;
    c.reference.reserve(n);
    c.shifted.reserve(n);
    for (std::size_t i = 0; i < 2 * n; ++i) (i < n ? c.reference : c.shifted).push_back(std::move(*slots[i]));
    return c;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::vector<Method>& methods) {
    cfg.validate();
    if (methods.empty()) throw ConfigError("at least one method is required");
    const DirectionGrid dirs = cfg.direction_grid();
    const LevelGrid levels = cfg.level_grid();
    const std::size_t n = cfg.n_per_group;
    const std::size_t cells = cfg.epsilons.size() * cfg.replicates;

    std::vector<CellOutcome> outcomes(cells);
    parallel_for(cells, [&](std::size_t cell) {
        const double eps = cfg.epsilons[cell / cfg.replicates];
        const std::size_t rep = cell % cfg.replicates;
        const Cohorts cohorts = draw_cohorts(cfg, eps, rep);

        std::vector<std::vector<StepFunction>> curves;
        curves.reserve(2 * n);
        for (const auto& s : cohorts.reference) curves.push_back(ec_curves(s, dirs));
        for (const auto& s : cohorts.shifted) curves.push_back(ec_curves(s, dirs));

        const GroupLabels labels = GroupLabels::from_sizes(n, n);
        const TestConfig tc{cfg.alpha, cfg.permutations, derive_seed(cfg.seed, {key_of(eps), rep, 0x7e57})};
        for (Method m : methods) {
            std::optional<DistanceMatrix> dist;
            if (m == Method::SECT) {
                std::vector<SECTMatrix> mats;
                mats.reserve(2 * n);
                for (const auto& c : curves) mats.push_back(sect_from_curves(c, dirs, levels));
                dist.emplace(pairwise_distances(std::span<const SECTMatrix>(mats)));
            } else {
                std::vector<ECTMatrix> mats;
                mats.reserve(2 * n);
                for (const auto& c : curves) mats.push_back(ect_from_curves(c, dirs, levels));
                dist.emplace(pairwise_distances(std::span<const ECTMatrix>(mats)));
            }
            const TestResult r = permutation_test(*dist, labels, tc);
            outcomes[cell].records.push_back({eps, rep, m, r.p_value, r.observed_loss, r.decision});
        }
    });

    ExperimentResult result;
    for (Method m : methods) {
        RejectionTable table;
        table.method = m;
        for (double eps : cfg.epsilons) table.rows.push_back({eps, 0, 0});
        result.tables.push_back(std::move(table));
    }
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const std::size_t e = cell / cfg.replicates;
        for (const auto& rec : outcomes[cell].records) {
            result.records.push_back(rec);
            for (auto& t : result.tables) {
                if (t.method != rec.method) continue;
                t.rows[e].replicates += 1;
                if (rec.decision == Decision::Reject) t.rows[e].rejections += 1;
            }
        }
    }
    for (double eps : cfg.epsilons) {
        const GridShape example = draw_shape(cfg, eps, 0, 1, 0);
        result.examples.push_back({eps, sect(example, dirs, levels)});
    }
    return result;
}

RejectionTable run_experiment(const ExperimentConfig& cfg, Method method) {
    return run_experiment(cfg, std::vector<Method>{method}).tables.front();
}

} // namespace ectstat
