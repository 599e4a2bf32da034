#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "pixel_ops.hpp"
#include "sublift/operators.hpp"
#include "sublift/solver.hpp"

namespace sublift {

using detail::Layout;

namespace {

void dual_rows(SolverState& state, const Model& model, const StepSizes& steps,
               const SolverConfig& config, std::vector<DykstraWorkspace>& spaces) {
    const Layout lay(model);
    const int w = model.width;
    const int hgt = model.height;
    const double h = model.grid.h;
    const double g1 = model.grid.gamma_first;
    const double sigma = steps.sigma;
    const bool linear = model.mode == DualMode::PiecewiseLinear;
    const double* vb = state.x_bar.v.data();
    const double* mb_all = state.x_bar.mu.data();
    DualVars& y = state.y;

#pragma omp parallel for schedule(static)
    for (int yy = 0; yy < hgt; ++yy) {
        DykstraWorkspace& ws = spaces[static_cast<std::size_t>(omp_get_thread_num())];
        for (int xx = 0; xx < w; ++xx) {
            const std::size_t p = static_cast<std::size_t>(yy) * static_cast<std::size_t>(w) +
                                  static_cast<std::size_t>(xx);
            const double* v = vb + p * lay.k;
            const double* mu = mb_all + p * lay.m;
            double* t = y.t.data() + p * lay.k1;
            double* b = y.b.data() + p * lay.k;
            if (linear) {
                double* a = y.a.data() + p * lay.k;
                double tail = 0.0;
                for (std::size_t j = lay.k; j-- > 0;) {
                    t[1 + j] += sigma * (h * v[j] - h * tail + (model.grid.labels[j] - g1) * mu[j]);
                    a[j] -= sigma * mu[j];
                    b[j] -= sigma * mu[j];
                    tail += mu[j];
                }
                t[0] += sigma * (tail - 1.0);
            } else {
                for (std::size_t j = 0; j < lay.k1; ++j) {
                    double val = 0.0;
                    if (j < lay.k) {
                        val += v[j] + mu[j];
                    }
                    if (j >= 1) {
                        val += -v[j - 1] + mu[lay.k + j - 1];
                    }
                    t[j] += sigma * val;
                }
                t[0] -= sigma;
                for (std::size_t i = 0; i < lay.k; ++i) {
                    b[i] -= sigma * (mu[i] + mu[lay.k + i]);
                }
            }
            double* px = y.px.data() + p * lay.k * 2;
            for (std::size_t i = 0; i < lay.k; ++i) {
                double gx;
                double gy;
                detail::grad_at(vb, w, hgt, xx, yy, lay.k, i, gx, gy);
                px[2 * i] += sigma * h * gx;
                px[2 * i + 1] += sigma * h * gy;
            }
            detail::project_pixel(model, y, p, config, ws);
        }
    }
}

double primal_rows(SolverState& state, const Model& model, const StepSizes& steps,
                   const SolverConfig& config, std::vector<double>& row_change,
                   std::vector<double>& row_norm) {
    const Layout lay(model);
    const int w = model.width;
    const int hgt = model.height;
    const double h = model.grid.h;
    const double g1 = model.grid.gamma_first;
    const double tau = steps.tau;
    const double theta = config.theta;
    const bool linear = model.mode == DualMode::PiecewiseLinear;
    const DualVars& y = state.y;

#pragma omp parallel for schedule(static)
    for (int yy = 0; yy < hgt; ++yy) {
        double change = 0.0;
        double norm = 0.0;
        for (int xx = 0; xx < w; ++xx) {
            const std::size_t p = static_cast<std::size_t>(yy) * static_cast<std::size_t>(w) +
                                  static_cast<std::size_t>(xx);
            const double* t = y.t.data() + p * lay.k1;
            const double* b = y.b.data() + p * lay.k;
            double* v = state.x.v.data() + p * lay.k;
            double* mu = state.x.mu.data() + p * lay.m;
            double* vb = state.x_bar.v.data() + p * lay.k;
            double* mb = state.x_bar.mu.data() + p * lay.m;
            const std::size_t owner = model.unaries.size() == 1 ? 0 : p;
            for (std::size_t i = 0; i < lay.k; ++i) {
                const double div = detail::div_at(y.px.data(), w, hgt, xx, yy, lay.k, i);
                const double grad_v = linear ? h * t[1 + i] - h * div : t[i] - t[i + 1] - h * div;
                const double old = v[i];
                v[i] = std::clamp(old - tau * grad_v, 0.0, 1.0);
                vb[i] = v[i] + theta * (v[i] - old);
                const double d = v[i] - old;
                change += d * d;
                norm += v[i] * v[i];
            }
            if (linear) {
                const double* a = y.a.data() + p * lay.k;
                double head = 0.0;
                for (std::size_t i = 0; i < lay.k; ++i) {
                    const double grad_mu =
                        t[0] - h * head + (model.grid.labels[i] - g1) * t[1 + i] - a[i] - b[i];
                    head += t[1 + i];
                    const double old = mu[i];
                    mu[i] = std::max(0.0, old - tau * grad_mu);
                    mb[i] = mu[i] + theta * (mu[i] - old);
                }
            } else {
                for (std::size_t i = 0; i < lay.k; ++i) {
                    const double left = t[i] - b[i] + model.min_left[owner * lay.k + i];
                    const double right = t[i + 1] - b[i] + model.min_right[owner * lay.k + i];
                    const double old_l = mu[i];
                    const double old_r = mu[lay.k + i];
                    mu[i] = std::max(0.0, old_l - tau * left);
                    mu[lay.k + i] = std::max(0.0, old_r - tau * right);
                    mb[i] = mu[i] + theta * (mu[i] - old_l);
                    mb[lay.k + i] = mu[lay.k + i] + theta * (mu[lay.k + i] - old_r);
                }
            }
        }
        row_change[static_cast<std::size_t>(yy)] = change;
        row_norm[static_cast<std::size_t>(yy)] = norm;
    }
    double change = 0.0;
    double norm = 0.0;
    for (int yy = 0; yy < hgt; ++yy) {
        change += row_change[static_cast<std::size_t>(yy)];
        norm += row_norm[static_cast<std::size_t>(yy)];
    }
    return std::sqrt(change) / std::max(std::sqrt(norm), 1e-12);
}

}  // namespace

double pd_iterate(SolverState& state, const Model& model, const StepSizes& steps,
                  const SolverConfig& config) {
    thread_local std::vector<DykstraWorkspace> spaces;
    thread_local std::vector<double> row_change;
    thread_local std::vector<double> row_norm;
    spaces.resize(static_cast<std::size_t>(std::max(1, omp_get_max_threads())));
    row_change.assign(static_cast<std::size_t>(model.height), 0.0);
    row_norm.assign(static_cast<std::size_t>(model.height), 0.0);
    dual_rows(state, model, steps, config, spaces);
    return primal_rows(state, model, steps, config, row_change, row_norm);
}

}  // namespace sublift
