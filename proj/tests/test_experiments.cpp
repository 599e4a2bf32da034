#include <cmath>
#include <limits>

#include "doctest.h"
#include "sublift/experiments.hpp"

using namespace sublift;
using doctest::Approx;

TEST_CASE("test signals stay in the unit range") {
    for (double v : convex_test_image(32, 24)) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    const auto ph = phantom_image(40, 40);
    CHECK(ph.channels == 3);
    for (double v : ph.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    const auto r = ramp_signal(5, 0.1, 0.9);
    CHECK(r.front() == Approx(0.1));
    CHECK(r.back() == Approx(0.9));
    CHECK(r[2] == Approx(0.5));
}

TEST_CASE("noise is reproducible and has the requested spread") {
    std::vector<double> a(20000, 0.0);
    std::vector<double> b(20000, 0.0);
    add_gaussian_noise(a, 0.3, 5);
    add_gaussian_noise(b, 0.3, 5);
    CHECK(a == b);
    double mean = 0.0;
    double sq = 0.0;
    for (double v : a) {
        mean += v;
        sq += v * v;
    }
    mean /= static_cast<double>(a.size());
    const double sd = std::sqrt(sq / static_cast<double>(a.size()) - mean * mean);
    CHECK(std::abs(mean) < 0.01);
    CHECK(sd == Approx(0.3).epsilon(0.02));
}

TEST_CASE("psnr") {
    const std::vector<double> x{0.0, 0.5, 1.0, 0.25};
    CHECK(std::isinf(psnr(x, x)));
    const std::vector<double> y{0.1, 0.6, 0.9, 0.35};
    CHECK(psnr(y, x) == Approx(20.0));
}

TEST_CASE("label bias score") {
    const LabelGrid g = build_grid(0.0, 1.0, 5);
    const std::vector<double> on{0.0, 0.25, 0.2501, 1.0};
    CHECK(label_bias_score(on, g) == Approx(1.0));
    const std::vector<double> off{0.1, 0.3, 0.25, 0.6};
    CHECK(label_bias_score(off, g) == Approx(0.25));
}

TEST_CASE("noise-free denoising with a dominant data term returns the input") {
    const auto clean = phantom_image(12, 12);
    DenoiseParams p;
    p.data_weight = 100.0;
    p.smooth_weight = 0.01;
    p.jump_cost = 0.001;
    const auto run = run_denoise(clean, &clean, p, 4, DualMode::PiecewiseLinear, SolverConfig{});
    CHECK(run.psnr > 50.0);
}

TEST_CASE("solver keys are read from a config") {
    const Config cfg = Config::parse("max_iters = 12\nstop_tol = 1e-4\ntheta = 0.5\nreference_kernels = true\n");
    const SolverConfig s = solver_config_from(cfg);
    CHECK(s.max_iters == 12);
    CHECK(s.stop_tol == 1e-4);
    CHECK(s.theta == 0.5);
    CHECK(s.reference_kernels);
}

TEST_CASE("unknown keys are rejected by the commands") {
    Config cfg = Config::parse("lenght = 64\n");
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_ramp_bias(cfg, log), ConfigError);
}
