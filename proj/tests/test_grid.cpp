#include <random>
#include <stdexcept>

#include "doctest.h"
#include "sublift/grid.hpp"

using namespace sublift;
using doctest::Approx;

TEST_CASE("five labels on the unit interval") {
    const LabelGrid g = build_grid(0.0, 1.0, 5);
    REQUIRE(g.labels.size() == 5);
    CHECK(g.k == 4);
    CHECK(g.h == Approx(0.25));
    const double labels[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const double nodes[] = {0.125, 0.375, 0.625, 0.875};
    for (int i = 0; i < 5; ++i) {
        CHECK(g.labels[static_cast<std::size_t>(i)] == Approx(labels[i]));
    }
    REQUIRE(g.dual_nodes.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(g.dual_nodes[static_cast<std::size_t>(i)] == Approx(nodes[i]));
    }
}

TEST_CASE("two labels give a single interval") {
    const LabelGrid g = build_grid(0.0, 1.0, 2);
    CHECK(g.k == 1);
    CHECK(g.h == Approx(1.0));
    CHECK(g.labels.size() == 2);
}

TEST_CASE("ghost labels sit one spacing outside the range") {
    const LabelGrid g = build_grid(-1.0, 3.0, 5);
    CHECK(g.h == Approx(1.0));
    CHECK(g.ghost_low == Approx(-2.0));
    CHECK(g.ghost_high == Approx(4.0));
}

TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(2.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("lift of a value between two labels") {
    const LabelGrid g = build_grid(0.0, 1.0, 5);
    const auto v = lift(0.5 + 0.4 * 0.25, g);
    REQUIRE(v.size() == 4);
    CHECK(v[0] == Approx(1.0));
    CHECK(v[1] == Approx(1.0));
    CHECK(v[2] == Approx(0.4));
    CHECK(v[3] == Approx(0.0));
}

TEST_CASE("lift at the ends of the range and beyond") {
    const LabelGrid g = build_grid(0.0, 1.0, 5);
    for (double e : lift(0.0, g)) {
        CHECK(e == 0.0);
    }
    for (double e : lift(1.0, g)) {
        CHECK(e == 1.0);
    }
    CHECK(lift(-3.0, g) == lift(0.0, g));
    CHECK(lift(7.0, g) == lift(1.0, g));
}

TEST_CASE("sublabel recovery") {
    const LabelGrid g = build_grid(0.0, 1.0, 5);
    const double v[] = {1.0, 1.0, 0.4, 0.0};
    CHECK(recover_sublabel(v, g) == Approx(0.6));
    const double zeros[] = {0.0, 0.0, 0.0, 0.0};
    const double ones[] = {1.0, 1.0, 1.0, 1.0};
    CHECK(recover_sublabel(zeros, g) == Approx(0.0));
    CHECK(recover_sublabel(ones, g) == Approx(1.0));
}

TEST_CASE("recovery inverts the lifting") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double lo = -2.0 + 4.0 * unit(rng);
        const double hi = lo + 0.1 + 3.0 * unit(rng);
        const LabelGrid g = build_grid(lo, hi, 2 + static_cast<int>(unit(rng) * 15));
        const double u = lo + (hi - lo) * unit(rng);
        CHECK(recover_sublabel(lift(u, g), g) == Approx(u).epsilon(1e-12));
    }
}

TEST_CASE("threshold recovery") {
    const LabelGrid g = build_grid(0.0, 1.0, 5);
    const double step[] = {1.0, 1.0, 0.0, 0.0};
    CHECK(recover_threshold(step, g) == Approx(0.5));
    const double partial[] = {1.0, 1.0, 0.4, 0.0};
    CHECK(recover_threshold(partial, g) == Approx(0.5));
    const double zeros[] = {0.0, 0.0, 0.0, 0.0};
    CHECK(recover_threshold(zeros, g) == Approx(0.0));
}

TEST_CASE("threshold recovery agrees with a scan of the reconstruction") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const LabelGrid g = build_grid(0.0, 1.0, 7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(g.k));
        double prev = 1.0;
        for (double& e : v) {
            e = prev * unit(rng);
            prev = e;
        }
        // The reconstruction is 1 left of the range and v[i] on interval i.
        double expected = g.gamma_first;
        for (int i = 0; i < g.k; ++i) {
            if (v[static_cast<std::size_t>(i)] > 0.5) {
                expected = g.interval_hi(i);
            }
        }
        CHECK(recover_threshold(v, g) == Approx(expected));
    }
}
