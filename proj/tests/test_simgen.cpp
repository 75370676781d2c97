#include <doctest.h>

#include <cmath>
#include <numbers>

#include <ectstat/errors.hpp>
#include <ectstat/parallel.hpp>
#include <ectstat/simgen.hpp>
#include <ectstat/transform.hpp>

using namespace ectstat;

namespace {

constexpr double pi = std::numbers::pi;

double brute_distance(const ArcSpec& spec, const Point2& p, std::size_t samples = 1000000) {
    double best = INFINITY;
    for (const Arc& a : spec.arms) {
        for (std::size_t k = 0; k < samples; ++k) {
            const double t = a.angle_lo + (a.angle_hi - a.angle_lo) * double(k) / double(samples - 1);
            const Point2 q = a.at(t);
            best = std::min(best, std::hypot(q[0] - p[0], q[1] - p[1]));
        }
    }
    return best;
}

ArcSpec noise_free(double eps) {
    EpsilonConfig cfg;
    cfg.epsilon = eps;
    cfg.noise_sd = 0.0;
    Engine rng(0);
    return sample_arcspec(cfg, rng);
}

} // namespace

TEST_CASE("arc angular ranges") {
    const ArcSpec s0 = noise_free(0.0);
    CHECK(s0.arms[0].angle_lo == doctest::Approx(pi / 5).epsilon(1e-15));
    CHECK(s0.arms[0].angle_hi == doctest::Approx(9 * pi / 5).epsilon(1e-15));
    CHECK(s0.arms[0].center_x == 0.4);
    CHECK(s0.arms[1].angle_lo == doctest::Approx(6 * pi / 5).epsilon(1e-15));
    CHECK(s0.arms[1].angle_hi == doctest::Approx(14 * pi / 5).epsilon(1e-15));
    CHECK(s0.arms[1].center_x == -0.4);
    CHECK(s0.arms[0].axis_a == 1.0);
    CHECK(s0.arms[1].axis_b == 1.0);
    CHECK(s0.tube_radius == 0.2);

    const ArcSpec s1 = noise_free(0.1);
    CHECK(s1.arms[0].angle_lo == doctest::Approx(0.18 * pi).epsilon(1e-14));
    CHECK(s1.arms[0].angle_hi == doctest::Approx(1.82 * pi).epsilon(1e-14));
    CHECK(s1.arms[1].angle_lo == doctest::Approx(6 * pi / 5).epsilon(1e-15));
}

TEST_CASE("epsilon configuration") {
    Engine rng(1);
    CHECK_THROWS_AS(sample_arcspec({-0.01, 1.0, 0.05}, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_arcspec({0.2, 1.0, 0.05}, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_arcspec({0.05, 1.0, -1.0}, rng), InvalidArgument);
}

TEST_CASE("sampling is reproducible and draws positive axes") {
    EpsilonConfig cfg;
    cfg.epsilon = 0.05;
    Engine a(123), b(123);
    for (int k = 0; k < 50; ++k) {
        const ArcSpec x = sample_arcspec(cfg, a);
        const ArcSpec y = sample_arcspec(cfg, b);
        CHECK(x.arms[0].axis_a == y.arms[0].axis_a);
        CHECK(x.arms[1].axis_b == y.arms[1].axis_b);
    }
    // Extreme noise still yields positive axes.
    EpsilonConfig wild{0.0, 0.3, 0.3};
    Engine c(5);
    for (int k = 0; k < 50; ++k) {
        const ArcSpec s = sample_arcspec(wild, c);
        for (const Arc& arc : s.arms) {
            CHECK(arc.axis_a > 0.0);
            CHECK(arc.axis_b > 0.0);
        }
    }
}

TEST_CASE("distance to arcs against dense sampling") {
    EpsilonConfig cfg;
    cfg.epsilon = 0.075;
    Engine rng(8);
    std::uniform_real_distribution<double> u(-1.6, 1.6);
    for (int k = 0; k < 25; ++k) {
        const ArcSpec s = sample_arcspec(cfg, rng);
        const Point2 p{u(rng), u(rng)};
        CHECK(std::abs(distance_to_arcs(s, p) - brute_distance(s, p)) <= 1e-6);
    }
    // Beyond the open end of arm 1: the nearest point is an endpoint, far away.
    const ArcSpec s0 = noise_free(0.0);
    const Point2 q{1.4, 0.0};
    CHECK(distance_to_arcs(s0, q) == doctest::Approx(brute_distance(s0, q)).epsilon(1e-9));
    CHECK(distance_to_arcs(s0, q) > 0.2);
}

TEST_CASE("tube raster matches the center rule") {
    EpsilonConfig cfg;
    cfg.epsilon = 0.0375;
    Engine rng(17);
    const std::size_t res = 180;
    const Frame frame = Frame::centered(1.8, res);
    for (int shape = 0; shape < 2; ++shape) {
        const ArcSpec s = sample_arcspec(cfg, rng);
        const auto mask = tube_mask(s, frame, res);
        // Pixels near the tube boundary are where mistakes would happen.
        std::size_t checked = 0;
        for (std::size_t idx = 0; idx < mask.size() && checked < 60; idx += 7) {
            const Point2 c = frame.pixel_center(idx % res, idx / res);
            const double d = distance_to_arcs(s, c);
            if (std::abs(d - 0.2) > 0.03) continue;
            const double exact = brute_distance(s, c, 200000);
            if (std::abs(exact - 0.2) <= 1e-6) continue;
            CHECK((mask[idx] != 0) == (exact <= 0.2));
            ++checked;
        }
        CHECK(checked == 60);
    }
}

TEST_CASE("noise-free shape is point symmetric") {
    const ArcSpec s = noise_free(0.0);
    const std::size_t res = 180;
    const Frame frame = Frame::centered(1.8, res);
    const auto mask = tube_mask(s, frame, res);
    for (std::size_t j = 0; j < res; ++j) {
        for (std::size_t i = 0; i < res; ++i) {
            const bool a = mask[j * res + i] != 0;
            const bool b = mask[(res - 1 - j) * res + (res - 1 - i)] != 0;
            if (a != b) CHECK(std::abs(distance_to_arcs(s, frame.pixel_center(i, j)) - 0.2) <= 1e-6);
        }
    }
}

TEST_CASE("pinch closing") {
    // Background pixel at (1,1) touches the outside only diagonally.
    std::vector<std::uint8_t> m{
        1, 1, 0, 0,
        1, 0, 1, 0,
        0, 1, 1, 0,
        0, 0, 0, 0,
    };
    CHECK(close_diagonal_pinches(m, 4, 4) == 1);
    CHECK(m[1 * 4 + 1] == 1);

    // A genuine hole surrounded on all eight sides stays open.
    std::vector<std::uint8_t> ring{
        1, 1, 1,
        1, 0, 1,
        1, 1, 1,
    };
    CHECK(close_diagonal_pinches(ring, 3, 3) == 0);
}

TEST_CASE("simulated shapes are one blob or one ring") {
    EpsilonConfig cfg;
    Engine rng(2024);
    std::size_t bad = 0;
    for (int k = 0; k < 1000; ++k) {
        cfg.epsilon = 0.0125 * (k % 9);
        const GridShape s = rasterize(sample_arcspec(cfg, rng), 180, 1.8);
        const std::int64_t chi = oracle_euler(s);
        if (chi != 0 && chi != 1) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("raster refinement stability") {
    EpsilonConfig cfg;
    cfg.epsilon = 0.05;
    Engine rng(3);
    const DirectionGrid dirs =
        directions_from_angles(std::vector<double>{0.0, pi / 4, pi / 2, 3 * pi / 4});
    const LevelGrid levels = uniform_levels(50, 3.6);
    for (int k = 0; k < 4; ++k) {
        const ArcSpec s = sample_arcspec(cfg, rng);
        const SECTMatrix a = sect(rasterize(s, 180, 1.8), dirs, levels);
        const SECTMatrix b = sect(rasterize(s, 360, 1.8), dirs, levels);
        double diff = 0, scale = 0;
        for (std::size_t i = 0; i < a.values().size(); ++i) {
            diff = std::max(diff, std::abs(a.values()[i] - b.values()[i]));
            scale = std::max(scale, std::abs(b.values()[i]));
        }
        CHECK(diff < 0.05 * scale);
    }
}

TEST_CASE("experiment smoke run") {
    ExperimentConfig cfg;
    cfg.epsilons = {0.0, 0.1};
    cfg.n_per_group = 5;
    cfg.replicates = 1;
    cfg.resolution = 90;
    cfg.alpha = 0.2;
    cfg.permutations = 10;

    set_thread_count(1);
    const ExperimentResult a = run_experiment(cfg, {Method::SECT, Method::ECT});
    set_thread_count(3);
    const ExperimentResult b = run_experiment(cfg, {Method::SECT, Method::ECT});
    set_thread_count(0);

    REQUIRE(a.tables.size() == 2);
    for (const auto& t : a.tables) {
        REQUIRE(t.rows.size() == 2);
        for (const auto& row : t.rows) {
            CHECK(row.replicates == 1);
            CHECK((row.rate() == 0.0 || row.rate() == 1.0));
        }
    }
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].p_value == b.records[i].p_value);
        CHECK(a.records[i].observed_loss == b.records[i].observed_loss);
    }
    CHECK(a.examples.size() == 2);
    CHECK_THROWS_AS(a.table(Method::SECT).rate(0.05), InvalidArgument);

    cfg.alpha = 0.05;
    CHECK_THROWS_AS(run_experiment(cfg, Method::SECT), ConfigError);
    cfg.alpha = 0.2;
    cfg.epsilons = {0.2};
    CHECK_THROWS_AS(run_experiment(cfg, Method::SECT), ConfigError);
}

TEST_CASE("cohorts are reproducible") {
    ExperimentConfig cfg;
    cfg.n_per_group = 3;
    cfg.resolution = 60;
    const Cohorts a = draw_cohorts(cfg, 0.05, 2);
    const Cohorts b = draw_cohorts(cfg, 0.05, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::equal(a.shifted[i].mask().begin(), a.shifted[i].mask().end(), b.shifted[i].mask().begin()));
    }
    const Cohorts c = draw_cohorts(cfg, 0.05, 3);
    CHECK_FALSE(std::equal(a.reference[0].mask().begin(), a.reference[0].mask().end(), c.reference[0].mask().begin()));
}
