#include "sublift/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pixel_ops.hpp"

namespace sublift {

using detail::Layout;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t e = 0; e < a.size(); ++e) {
        s += a[e] * b[e];
    }
    return s;
}

double dot(const DualVars& a, const DualVars& b) {
    return dot(a.t, b.t) + dot(a.a, b.a) + dot(a.b, b.b) + dot(a.px, b.px);
}

double dot(const PrimalVars& a, const PrimalVars& b) { return dot(a.v, b.v) + dot(a.mu, b.mu); }

}  // namespace

double estimate_operator_norm(const Model& model, int iters, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    PrimalVars z = initial_state(model).x;
    for (double& e : z.v) {
        e = normal(rng);
    }
    for (double& e : z.mu) {
        e = normal(rng);
    }
    double norm = 0.0;
    DualVars kz;
    PrimalVars ktkz;
    for (int it = 0; it < std::max(iters, 1); ++it) {
        const double zn = std::sqrt(dot(z, z));
        for (double& e : z.v) {
            e /= zn;
        }
        for (double& e : z.mu) {
            e /= zn;
        }
        apply_K(model, z, kz);
        norm = std::sqrt(dot(kz, kz));
        apply_KT(model, kz, ktkz);
        z = ktkz;
    }
    return norm;
}

StepSizes choose_steps(const Model& model, const SolverConfig& config) {
    if (!(config.theta >= 0.0 && config.theta <= 1.0)) {
        throw std::invalid_argument("extrapolation theta must lie in [0, 1]");
    }
    StepSizes steps;
    steps.lipschitz = 1.01 * estimate_operator_norm(model, config.power_iters, config.seed);
    const double lip = steps.lipschitz;
    if (config.primal_step > 0.0 && config.dual_step > 0.0) {
        steps.tau = config.primal_step;
        steps.sigma = config.dual_step;
        if (steps.tau * steps.sigma * lip * lip > 1.0) {
            std::ostringstream os;
            os << "step sizes violate sigma * tau * L^2 <= 1 (L = " << lip << ")";
            throw std::invalid_argument(os.str());
        }
    } else {
        if (!(config.step_ratio > 0.0)) {
            throw std::invalid_argument("step_ratio must be positive");
        }
        steps.tau = config.step_ratio / lip;
        steps.sigma = 1.0 / (config.step_ratio * lip);
    }
    return steps;
}

double saddle_value(const Model& model, const PrimalVars& x, const DualVars& y) {
    DualVars kx;
    apply_K(model, x, kx);
    return dot(kx, y) + dot(dual_linear_term(model), y) + dot(primal_linear_term(model), x);
}

double dual_violation(const Model& model, const DualVars& y) {
    const Layout lay(model);
    const double radius_cap = model.eta_conj.radius;
    double worst = 0.0;
    for (std::size_t p = 0; p < model.pixels(); ++p) {
        if (model.mode == DualMode::PiecewiseLinear) {
            for (std::size_t i = 0; i < lay.k; ++i) {
                const double r = y.t[p * lay.k1 + 1 + i];
                const double a = y.a[p * lay.k + i];
                worst = std::max(worst,
                                 model.data_view(p, static_cast<int>(i)).conjugate(r) - a);
            }
        }
        const double* px = y.px.data() + p * lay.k * 2;
        for (std::size_t i = 0; i < lay.k; ++i) {
            const double n2 = px[2 * i] * px[2 * i] + px[2 * i + 1] * px[2 * i + 1];
            const double norm = std::sqrt(n2);
            double radius = radius_cap;
            if (model.jumps.active) {
                radius = std::min(radius, model.jumps.bound(static_cast<int>(i), static_cast<int>(i)));
            }
            worst = std::max(worst, norm - radius);
            worst = std::max(worst, model.eta_conj.quad * n2 - y.b[p * lay.k + i]);
        }
        const auto jump = check_jump(std::span<const double>(px, lay.k * 2), 2, model.jumps, 0.0);
        worst = std::max(worst, jump.max_violation);
    }
    return worst;
}

std::vector<double> recover(const Model& model, const PrimalVars& x, Recovery method) {
    const Layout lay(model);
    std::vector<double> u(model.pixels());
    for (std::size_t p = 0; p < model.pixels(); ++p) {
        const std::span<const double> coeff(x.v.data() + p * lay.k, lay.k);
        u[p] = method == Recovery::Sublabel ? recover_sublabel(coeff, model.grid)
                                            : recover_threshold(coeff, model.grid);
    }
    return u;
}

SolveResult run(const Model& model, const SolverConfig& config, Recovery recovery) {
    return run(model, config, initial_state(model), recovery);
}

SolveResult run(const Model& model, const SolverConfig& config, SolverState start,
                Recovery recovery) {
    if (config.max_iters < 1 || config.check_every < 1 || config.stable_checks < 1) {
        throw std::invalid_argument("solver needs max_iters, check_every, stable_checks >= 1");
    }
    const Layout lay(model);
    if (start.x.v.size() != model.pixels() * lay.k || start.x.mu.size() != model.pixels() * lay.m ||
        start.y.t.size() != model.pixels() * lay.k1) {
        throw std::invalid_argument("warm start does not match the model");
    }
    SolveResult result;
    result.steps = choose_steps(model, config);
    result.state = std::move(start);
    const auto t0 = std::chrono::steady_clock::now();

    auto record = [&](int iteration) {
        Diagnostics d;
        d.iteration = iteration;
        const auto u = recover(model, result.state.x, recovery);
        d.unlifted_energy = unlifted_energy(u, model);
        d.bilinear_value = saddle_value(model, result.state.x, result.state.y);
        d.gap_bound = std::abs(d.unlifted_energy - d.bilinear_value);
        d.max_constraint_violation = dual_violation(model, result.state.y);
        if (config.record_timing) {
            d.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - t0)
                               .count();
        }
        result.history.push_back(d);
    };

    int stable = 0;
    int it = 0;
    while (it < config.max_iters) {
        ++it;
        const double change = config.reference_kernels
                                  ? pd_iterate_reference(result.state, model, result.steps, config)
                                  : pd_iterate(result.state, model, result.steps, config);
        if (!std::isfinite(change)) {
            throw std::runtime_error("primal-dual iterates diverged");
        }
        if (it % config.check_every == 0) {
            record(it);
            stable = change < config.stop_tol ? stable + 1 : 0;
            if (stable >= config.stable_checks) {
                result.converged = true;
                break;
            }
        }
    }
    if (result.history.empty() || result.history.back().iteration != it) {
        record(it);
    }
    result.iterations = it;
    result.u = recover(model, result.state.x, recovery);
    return result;
}

void write_diagnostics_csv(std::ostream& out, std::span<const Diagnostics> history) {
    out << "iter,bilinear,energy,gap,violation,ms\n";
    std::ostringstream row;
    for (const auto& d : history) {
        row.str("");
        row << d.iteration << ',' << std::setprecision(17) << d.bilinear_value << ','
            << d.unlifted_energy << ',' << d.gap_bound << ',' << d.max_constraint_violation << ','
            << d.runtime_ms << '\n';
        out << row.str();
    }
}

}  // namespace sublift
