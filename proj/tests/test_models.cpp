#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "sublift/models.hpp"

using namespace sublift;
using doctest::Approx;

namespace {

ModelSpec small_spec(DualMode mode) {
    ModelSpec spec;
    spec.width = 3;
    spec.height = 2;
    spec.grid = build_grid(0.0, 1.0, 4);
    spec.unaries.push_back(QuadraticUnary{1.0, 0.35});
    spec.reg.eta = Norm{0.5};
    spec.reg.kappa = LinearJump{0.5};
    spec.dual_mode = mode;
    return spec;
}

}  // namespace

TEST_CASE("three channels assemble into three scalar models") {
    ModelSpec spec = small_spec(DualMode::PiecewiseLinear);
    spec.channels = 3;
    spec.unaries.clear();
    for (int c = 0; c < 3; ++c) {
        for (int p = 0; p < 6; ++p) {
            spec.unaries.push_back(QuadraticUnary{1.0, 0.1 * c + 0.01 * p});
        }
    }
    const auto models = assemble(spec);
    REQUIRE(models.size() == 3);
    for (int c = 0; c < 3; ++c) {
        const auto& m = models[static_cast<std::size_t>(c)];
        CHECK(m.width == 3);
        CHECK(m.height == 2);
        CHECK(m.unaries.size() == 6);
        CHECK(std::get<QuadraticUnary>(m.unary(4)).target == Approx(0.1 * c + 0.04));
    }
}

TEST_CASE("model validation") {
    ModelSpec spec = small_spec(DualMode::PiecewiseLinear);
    spec.unaries.push_back(QuadraticUnary{});
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);

    spec = small_spec(DualMode::PiecewiseLinear);
    spec.width = 0;
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);

    spec = small_spec(DualMode::PiecewiseLinear);
    spec.unaries = {SampledTable{{-1.0, 2.0}, {0.0, 1.0}}};
    spec.allow_table_surrogate = false;
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    spec.allow_table_surrogate = true;
    CHECK_NOTHROW(validate(spec));
    spec.unaries = {SampledTable{{0.0, 1.0}, {0.0, 1.0}}};
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);

    spec = small_spec(DualMode::PiecewiseLinear);
    spec.reg.kappa = JumpTable{{0.0, 1.0, 2.0}, {0.0, 1.0, 3.0}};  // convex, not concave
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}

TEST_CASE("dual mode names") {
    CHECK(parse_dual_mode("linear") == DualMode::PiecewiseLinear);
    CHECK(parse_dual_mode("baseline") == DualMode::PiecewiseConstant);
    CHECK(std::string(to_string(DualMode::PiecewiseConstant)) == "constant");
    CHECK_THROWS_AS(parse_dual_mode("cubic"), std::invalid_argument);
}

TEST_CASE("piecewise constant duals with a norm regularizer give min-pooled capacities") {
    const ModelSpec spec = small_spec(DualMode::PiecewiseConstant);
    const Model model = assemble_channel(spec, 0);
    const auto cap = capacity_constraints(model, 0);
    const auto pooled = min_pool(spec.unaries[0], spec.grid);
    REQUIRE(cap.size() == pooled.size());
    for (std::size_t i = 0; i < cap.size(); ++i) {
        CHECK(cap[i] == Approx(pooled[i]).epsilon(1e-12));
    }
}

TEST_CASE("linear jump cost is recognized as total variation") {
    const Model model = assemble_channel(small_spec(DualMode::PiecewiseLinear), 0);
    CHECK(model.jumps.linear);
    CHECK(model.jumps.active);
    for (int i = 0; i < model.k(); ++i) {
        for (int j = i; j < model.k(); ++j) {
            CHECK(model.jumps.bound(i, j) == Approx(0.5 * (j - i + 1)));
        }
    }
}

TEST_CASE("integration operator") {
    const LabelGrid g = build_grid(0.0, 1.0, 4);
    const auto I = integration_operator(g);
    REQUIRE(I.size() == 9);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            const double want = r == c ? -g.labels[static_cast<std::size_t>(r)] / g.h : (r > c ? 1.0 : 0.0);
            CHECK(I[static_cast<std::size_t>(r * 3 + c)] == Approx(want));
        }
    }
}

TEST_CASE("primal data term at a label picks the envelope there") {
    const LabelGrid g = build_grid(0.0, 1.0, 4);
    const UnaryModel u = TruncatedQuadraticMixture{{{0.05, 4.0, 0.45}}};
    for (int i = 0; i < g.k; ++i) {
        const auto v = lift(g.labels[static_cast<std::size_t>(i)], g);
        const double want = convex_envelope_eval(u, i, g, g.labels[static_cast<std::size_t>(i)]);
        CHECK(dataterm_primal_oracle(v, g, u, 41) == Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("primal data term with a single interval is the envelope") {
    const LabelGrid g = build_grid(0.0, 1.0, 2);
    const UnaryModel u = TruncatedQuadraticMixture{{{0.05, 4.0, 0.45}, {0.02, 30.0, 0.8}}};
    for (double w : {0.0, 0.2, 0.5, 0.77, 1.0}) {
        const double v[] = {w};
        CHECK(dataterm_primal_oracle(v, g, u, 41) == Approx(convex_envelope_eval(u, 0, g, w)).epsilon(1e-6));
    }
}

TEST_CASE("primal data term of a convex cost at a lifted value") {
    const LabelGrid g = build_grid(0.0, 1.0, 4);
    const UnaryModel u = QuadraticUnary{2.0, 0.6};
    for (double t : {0.1, 0.3333, 0.5, 0.9}) {
        const auto v = lift(t, g);
        CHECK(dataterm_primal_oracle(v, g, u, 41) == Approx(evaluate(u, recover_sublabel(v, g))).epsilon(1e-5));
    }
}

TEST_CASE("dual data term: zero cost and the empty lift") {
    const LabelGrid g = build_grid(0.0, 1.0, 3);
    const UnaryModel zero = QuadraticUnary{0.0, 0.0};
    const double v[] = {0.7, 0.2};
    CHECK(std::abs(dataterm_dual_eval(v, g, zero, 20000).value) <= 1e-6);
    const UnaryModel q = QuadraticUnary{1.0, 0.4};
    const double empty[] = {0.0, 0.0};
    CHECK(dataterm_dual_eval(empty, g, q, 20000).value == Approx(evaluate(q, 0.0)).epsilon(1e-4));
}
