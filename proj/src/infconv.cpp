#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sublift/operators.hpp"
#include "sublift/solver.hpp"

namespace sublift {

ReferenceSolveResult infconv_reference_solve(const Model& model, const SolverConfig& config) {
    if (model.grid.k != 1) {
        throw std::invalid_argument("infconv_reference_solve needs a two-label model");
    }
    const int w = model.width;
    const int hgt = model.height;
    const std::size_t n = model.pixels();
    const double lo = model.grid.gamma_first;
    const double hi = model.grid.labels.back();
    const double gamma =
        model.jumps.active ? model.jumps.bound(0, 0) : std::numeric_limits<double>::infinity();
    const double radius = std::min(model.eta_conj.radius, gamma);
    const double quad = model.eta_conj.quad;

    // Quadratic unaries use their closed-form prox; every other unary is
    // handled through a dual pair (s, a) in the epigraph of its conjugate
    // restricted to the range.
    std::vector<std::vector<QuadPiece>> pieces(model.unaries.size());
    std::vector<std::vector<CostPoint>> hulls(model.unaries.size());
    bool any_dual = false;
    for (std::size_t o = 0; o < model.unaries.size(); ++o) {
        const auto& unary = model.unaries[o];
        if (std::holds_alternative<QuadraticUnary>(unary)) {
            continue;
        }
        any_dual = true;
        if (const auto* table = std::get_if<SampledTable>(&unary)) {
            hulls[o] = lower_convex_hull(restricted_samples(*table, lo, hi));
        } else {
            pieces[o] = pieces_on(unary, lo, hi, 1e-12 * model.grid.range());
        }
    }
    const double lip = std::sqrt(8.0 + (any_dual ? 1.0 : 0.0));
    const double tau = 1.0 / lip;
    const double sigma = 1.0 / lip;

    std::vector<double> u(n, 0.5 * (lo + hi));
    std::vector<double> u_bar = u;
    std::vector<double> p(2 * n, 0.0);
    std::vector<double> s(n, 0.0);
    std::vector<double> a(n, 0.0);
    std::vector<double> row_change(static_cast<std::size_t>(hgt));
    std::vector<double> row_norm(static_cast<std::size_t>(hgt));

    ReferenceSolveResult res;
    int stable = 0;
    for (int it = 1; it <= config.max_iters; ++it) {
#pragma omp parallel for schedule(static)
        for (int y = 0; y < hgt; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t q = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                                      static_cast<std::size_t>(x);
                double gx;
                double gy;
                detail::grad_at(u_bar.data(), w, hgt, x, y, 1, 0, gx, gy);
                // prox of sigma (c |p|^2 + indicator of the ball)
                double px = (p[2 * q] + sigma * gx) / (1.0 + 2.0 * sigma * quad);
                double py = (p[2 * q + 1] + sigma * gy) / (1.0 + 2.0 * sigma * quad);
                const double norm = std::sqrt(px * px + py * py);
                if (norm > radius) {
                    px *= radius / norm;
                    py *= radius / norm;
                }
                p[2 * q] = px;
                p[2 * q + 1] = py;
                const std::size_t o = model.unaries.size() == 1 ? 0 : q;
                if (!std::holds_alternative<QuadraticUnary>(model.unaries[o])) {
                    const DataEpigraphView view{pieces[o], hulls[o]};
                    const auto proj =
                        project_data_epigraph({s[q] + sigma * u_bar[q], a[q] - sigma}, view,
                                              config.dykstra_tol, config.dykstra_max_iter);
                    s[q] = proj.point.slope;
                    a[q] = proj.point.height;
                }
            }
        }
#pragma omp parallel for schedule(static)
        for (int y = 0; y < hgt; ++y) {
            double change = 0.0;
            double norm = 0.0;
            for (int x = 0; x < w; ++x) {
                const std::size_t q = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                                      static_cast<std::size_t>(x);
                const double div = detail::div_at(p.data(), w, hgt, x, y, 1, 0);
                const double old = u[q];
                double next = old + tau * div;
                const std::size_t o = model.unaries.size() == 1 ? 0 : q;
                if (const auto* quad_unary = std::get_if<QuadraticUnary>(&model.unaries[o])) {
                    const double wt = quad_unary->weight;
                    next = (next + 2.0 * tau * wt * quad_unary->target) / (1.0 + 2.0 * tau * wt);
                } else {
                    next -= tau * s[q];
                }
                next = std::clamp(next, lo, hi);
                u[q] = next;
                u_bar[q] = next + config.theta * (next - old);
                change += (next - old) * (next - old);
                norm += next * next;
            }
            row_change[static_cast<std::size_t>(y)] = change;
            row_norm[static_cast<std::size_t>(y)] = norm;
        }
        double change = 0.0;
        double norm = 0.0;
        for (int y = 0; y < hgt; ++y) {
            change += row_change[static_cast<std::size_t>(y)];
            norm += row_norm[static_cast<std::size_t>(y)];
        }
        const double rel = std::sqrt(change) / std::max(std::sqrt(norm), 1e-12);
        res.iterations = it;
        if (it % config.check_every == 0) {
            stable = rel < config.stop_tol ? stable + 1 : 0;
            if (stable >= config.stable_checks) {
                res.converged = true;
                break;
            }
        }
    }
    res.u = std::move(u);
    return res;
}

}  // namespace sublift
