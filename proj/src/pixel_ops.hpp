#pragma once

// Per-pixel helpers shared by the reference and the parallel kernels.

#include <cstddef>
#include <span>

#include "sublift/solver.hpp"

namespace sublift::detail {

struct Layout {
    std::size_t k = 0;
    std::size_t k1 = 0;  // vertical dual entries per pixel
    std::size_t m = 0;   // multipliers per pixel

    explicit Layout(const Model& model)
        : k(static_cast<std::size_t>(model.k())),
          k1(static_cast<std::size_t>(model.k()) + 1),
          m(static_cast<std::size_t>(model.multipliers())) {}
};

/// Projects the dual variables of pixel p in place. Returns false if a
/// Dykstra loop stopped at its sweep limit.
inline bool project_pixel(const Model& model, DualVars& y, std::size_t p,
                          const SolverConfig& config, DykstraWorkspace& ws) {
    const Layout lay(model);
    bool converged = true;
    if (model.mode == DualMode::PiecewiseLinear) {
        for (std::size_t i = 0; i < lay.k; ++i) {
            double& r = y.t[p * lay.k1 + 1 + i];
            double& a = y.a[p * lay.k + i];
            const auto res = project_data_epigraph({r, a}, model.data_view(p, static_cast<int>(i)),
                                                   config.dykstra_tol, config.dykstra_max_iter);
            r = res.point.slope;
            a = res.point.height;
            converged = converged && res.converged;
        }
    }
    const auto rep = project_regularizer_set(
        std::span<double>(y.px.data() + p * 2 * lay.k, 2 * lay.k),
        std::span<double>(y.b.data() + p * lay.k, lay.k), 2, model.eta_conj, model.jumps,
        config.dykstra_tol, config.dykstra_max_iter, ws);
    return converged && rep.converged;
}

}  // namespace sublift::detail
