#include <algorithm>
#include <cmath>

#include "pixel_ops.hpp"
#include "sublift/operators.hpp"
#include "sublift/solver.hpp"

namespace sublift {

using detail::Layout;

namespace {

DualVars dual_shaped(const Model& model) {
    const Layout lay(model);
    const std::size_t n = model.pixels();
    DualVars y;
    y.t.assign(n * lay.k1, 0.0);
    if (model.mode == DualMode::PiecewiseLinear) {
        y.a.assign(n * lay.k, 0.0);
    }
    y.b.assign(n * lay.k, 0.0);
    y.px.assign(n * lay.k * 2, 0.0);
    return y;
}

PrimalVars primal_shaped(const Model& model) {
    const Layout lay(model);
    PrimalVars x;
    x.v.assign(model.pixels() * lay.k, 0.0);
    x.mu.assign(model.pixels() * lay.m, 0.0);
    return x;
}

}  // namespace

SolverState initial_state(const Model& model) {
    SolverState s;
    s.x = primal_shaped(model);
    s.x_bar = s.x;
    s.y = dual_shaped(model);
    return s;
}

void apply_K(const Model& model, const PrimalVars& x, DualVars& out) {
    const Layout lay(model);
    const int w = model.width;
    const int hgt = model.height;
    const double h = model.grid.h;
    const double g1 = model.grid.gamma_first;
    out = dual_shaped(model);
    for (int yy = 0; yy < hgt; ++yy) {
        for (int xx = 0; xx < w; ++xx) {
            const std::size_t p = static_cast<std::size_t>(yy) * static_cast<std::size_t>(w) +
                                  static_cast<std::size_t>(xx);
            const double* v = x.v.data() + p * lay.k;
            const double* mu = x.mu.data() + p * lay.m;
            double* t = out.t.data() + p * lay.k1;
            if (model.mode == DualMode::PiecewiseLinear) {
                double total = 0.0;
                for (std::size_t i = 0; i < lay.k; ++i) {
                    total += mu[i];
                }
                t[0] = total;
                for (std::size_t j = 0; j < lay.k; ++j) {
                    double tail = 0.0;
                    for (std::size_t i = j + 1; i < lay.k; ++i) {
                        tail += mu[i];
                    }
                    t[1 + j] = h * v[j] - h * tail + (model.grid.labels[j] - g1) * mu[j];
                    out.a[p * lay.k + j] = -mu[j];
                    out.b[p * lay.k + j] = -mu[j];
                }
            } else {
                for (std::size_t j = 0; j < lay.k1; ++j) {
                    double val = 0.0;
                    if (j < lay.k) {
                        val += v[j] + mu[j];
                    }
                    if (j >= 1) {
                        val += -v[j - 1] + mu[lay.k + j - 1];
                    }
                    t[j] = val;
                }
                for (std::size_t i = 0; i < lay.k; ++i) {
                    out.b[p * lay.k + i] = -mu[i] - mu[lay.k + i];
                }
            }
        }
    }
    // spatial part, one interval at a time
    std::vector<double> field(model.pixels());
    std::vector<double> grad(2 * model.pixels());
    for (std::size_t i = 0; i < lay.k; ++i) {
        for (std::size_t p = 0; p < model.pixels(); ++p) {
            field[p] = x.v[p * lay.k + i];
        }
        gradient(field, w, hgt, grad);
        for (std::size_t p = 0; p < model.pixels(); ++p) {
            out.px[(p * lay.k + i) * 2] = h * grad[2 * p];
            out.px[(p * lay.k + i) * 2 + 1] = h * grad[2 * p + 1];
        }
    }
}

void apply_KT(const Model& model, const DualVars& y, PrimalVars& out) {
    const Layout lay(model);
    const double h = model.grid.h;
    const double g1 = model.grid.gamma_first;
    out = primal_shaped(model);
    for (std::size_t p = 0; p < model.pixels(); ++p) {
        const double* t = y.t.data() + p * lay.k1;
        const double* b = y.b.data() + p * lay.k;
        double* v = out.v.data() + p * lay.k;
        double* mu = out.mu.data() + p * lay.m;
        if (model.mode == DualMode::PiecewiseLinear) {
            const double* a = y.a.data() + p * lay.k;
            for (std::size_t i = 0; i < lay.k; ++i) {
                v[i] = h * t[1 + i];
                double head = 0.0;
                for (std::size_t j = 0; j < i; ++j) {
                    head += t[1 + j];
                }
                mu[i] = t[0] - h * head + (model.grid.labels[i] - g1) * t[1 + i] - a[i] - b[i];
            }
        } else {
            for (std::size_t i = 0; i < lay.k; ++i) {
                v[i] = t[i] - t[i + 1];
                mu[i] = t[i] - b[i];
                mu[lay.k + i] = t[i + 1] - b[i];
            }
        }
    }
    std::vector<double> flux(2 * model.pixels());
    std::vector<double> div(model.pixels());
    for (std::size_t i = 0; i < lay.k; ++i) {
        for (std::size_t p = 0; p < model.pixels(); ++p) {
            flux[2 * p] = y.px[(p * lay.k + i) * 2];
            flux[2 * p + 1] = y.px[(p * lay.k + i) * 2 + 1];
        }
        divergence(flux, model.width, model.height, div);
        for (std::size_t p = 0; p < model.pixels(); ++p) {
            out.v[p * lay.k + i] -= h * div[p];
        }
    }
}

DualVars dual_linear_term(const Model& model) {
    const Layout lay(model);
    DualVars g = dual_shaped(model);
    for (std::size_t p = 0; p < model.pixels(); ++p) {
        g.t[p * lay.k1] = -1.0;
    }
    return g;
}

PrimalVars primal_linear_term(const Model& model) {
    const Layout lay(model);
    PrimalVars f = primal_shaped(model);
    if (model.mode == DualMode::PiecewiseConstant) {
        for (std::size_t p = 0; p < model.pixels(); ++p) {
            const std::size_t owner = model.unaries.size() == 1 ? 0 : p;
            for (std::size_t i = 0; i < lay.k; ++i) {
                f.mu[p * lay.m + i] = model.min_left[owner * lay.k + i];
                f.mu[p * lay.m + lay.k + i] = model.min_right[owner * lay.k + i];
            }
        }
    }
    return f;
}

namespace {

void axpy(std::vector<double>& y, double s, const std::vector<double>& x) {
    for (std::size_t e = 0; e < y.size(); ++e) {
        y[e] += s * x[e];
    }
}

}  // namespace

int project_dual(const Model& model, DualVars& y, const SolverConfig& config) {
    DykstraWorkspace ws;
    int stalled = 0;
    for (std::size_t p = 0; p < model.pixels(); ++p) {
        if (!detail::project_pixel(model, y, p, config, ws)) {
            ++stalled;
        }
    }
    return stalled;
}

double pd_iterate_reference(SolverState& state, const Model& model, const StepSizes& steps,
                            const SolverConfig& config) {
    static_cast<void>(config);
    DualVars kx;
    apply_K(model, state.x_bar, kx);
    const DualVars g = dual_linear_term(model);
    auto& y = state.y;
    axpy(y.t, steps.sigma, kx.t);
    axpy(y.t, steps.sigma, g.t);
    axpy(y.a, steps.sigma, kx.a);
    axpy(y.b, steps.sigma, kx.b);
    axpy(y.px, steps.sigma, kx.px);
    project_dual(model, y, config);

    PrimalVars kty;
    apply_KT(model, y, kty);
    const PrimalVars f = primal_linear_term(model);
    const PrimalVars old = state.x;
    auto& x = state.x;
    axpy(x.v, -steps.tau, kty.v);
    axpy(x.mu, -steps.tau, kty.mu);
    axpy(x.mu, -steps.tau, f.mu);
    for (double& e : x.v) {
        e = std::clamp(e, 0.0, 1.0);
    }
    for (double& e : x.mu) {
        e = std::max(e, 0.0);
    }
    const double theta = config.theta;
    for (std::size_t e = 0; e < x.v.size(); ++e) {
        state.x_bar.v[e] = x.v[e] + theta * (x.v[e] - old.v[e]);
    }
    for (std::size_t e = 0; e < x.mu.size(); ++e) {
        state.x_bar.mu[e] = x.mu[e] + theta * (x.mu[e] - old.mu[e]);
    }
    double change = 0.0;
    double norm = 0.0;
    for (std::size_t e = 0; e < x.v.size(); ++e) {
        const double d = x.v[e] - old.v[e];
        change += d * d;
        norm += x.v[e] * x.v[e];
    }
    return std::sqrt(change) / std::max(std::sqrt(norm), 1e-12);
}

}  // namespace sublift
