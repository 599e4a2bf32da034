// Fused parallel iteration vs. the serial reference iteration on the same model.

#include <benchmark/benchmark.h>

#include <cmath>

#include "sublift/models.hpp"
#include "sublift/solver.hpp"

namespace {

sublift::Model make_model(int size, int ell, sublift::DualMode mode) {
    sublift::ModelSpec spec;
    spec.width = size;
    spec.height = size;
    spec.grid = sublift::build_grid(0.0, 1.0, ell);
    spec.dual_mode = mode;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double f = 0.5 + 0.4 * std::sin(0.3 * x) * std::cos(0.2 * y);
            spec.unaries.emplace_back(sublift::QuadraticUnary{1.0, f});
        }
    }
    spec.reg.eta = sublift::SquaredNorm{2.0};
    spec.reg.kappa = sublift::ConstantJump{0.1};
    return sublift::assemble_channel(spec, 0);
}

template <bool Reference>
void iterate(benchmark::State& st) {
    const auto mode = st.range(2) ? sublift::DualMode::PiecewiseLinear : sublift::DualMode::PiecewiseConstant;
    const sublift::Model model = make_model(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), mode);
    sublift::SolverConfig cfg;
    const auto steps = sublift::choose_steps(model, cfg);
    sublift::SolverState state = sublift::initial_state(model);
    for (auto _ : st) {
        const double change = Reference ? sublift::pd_iterate_reference(state, model, steps, cfg)
                                        : sublift::pd_iterate(state, model, steps, cfg);
        benchmark::DoNotOptimize(change);
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(model.pixels()));
}

void args(benchmark::internal::Benchmark* b) {
    for (int size : {64, 128}) {
        for (int ell : {2, 4}) {
            for (int linear : {1, 0}) {
                b->Args({size, ell, linear});
            }
        }
    }
    b->ArgNames({"size", "labels", "linear"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(iterate<false>)->Name("pd_iterate")->Apply(args);
BENCHMARK(iterate<true>)->Name("pd_iterate_reference")->Apply(args);

BENCHMARK_MAIN();
