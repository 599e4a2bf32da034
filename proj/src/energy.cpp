#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sublift/operators.hpp"
#include "sublift/solver.hpp"

namespace sublift {

double unlifted_energy(std::span<const double> u, const Model& model) {
    if (u.size() != model.pixels()) {
        throw std::invalid_argument("unlifted_energy: field size does not match the model");
    }
    const int w = model.width;
    const int hgt = model.height;
    const bool jumps = has_jumps(model.kappa);
    double total = 0.0;
    for (int y = 0; y < hgt; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                                  static_cast<std::size_t>(x);
            double gx;
            double gy;
            detail::grad_at(u.data(), w, hgt, x, y, 1, 0, gx, gy);
            double pair;
            if (!jumps) {
                pair = eta_value(model.eta, gx, gy);
            } else {
                pair = 0.0;
                if (x + 1 < w) {
                    pair += std::min(eta_value_1d(model.eta, gx), kappa_value(model.kappa, std::abs(gx)));
                }
                if (y + 1 < hgt) {
                    pair += std::min(eta_value_1d(model.eta, gy), kappa_value(model.kappa, std::abs(gy)));
                }
            }
            total += evaluate(model.unary(p), u[p]) + pair;
        }
    }
    return total;
}

double quadratic_energy(std::span<const double> u, std::span<const double> f, int width,
                        int height, double lambda) {
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (u.size() != n || f.size() != n) {
        throw std::invalid_argument("quadratic_energy: size mismatch");
    }
    double total = 0.0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                                  static_cast<std::size_t>(x);
            double gx;
            double gy;
            detail::grad_at(u.data(), width, height, x, y, 1, 0, gx, gy);
            const double d = u[p] - f[p];
            total += d * d + lambda * (gx * gx + gy * gy);
        }
    }
    return total;
}

LinearSolveResult direct_quadratic_solve(std::span<const double> f, int width, int height,
                                         double lambda, double tol, int max_iter) {
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (f.size() != n || lambda < 0.0) {
        throw std::invalid_argument("direct_quadratic_solve: bad input");
    }
    std::vector<double> grad(2 * n);
    std::vector<double> lap(n);
    // A u = u - lambda div(grad u)
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        gradient(in, width, height, grad);
        divergence(grad, width, height, lap);
        for (std::size_t e = 0; e < n; ++e) {
            out[e] = in[e] - lambda * lap[e];
        }
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t e = 0; e < a.size(); ++e) {
            s += a[e] * b[e];
        }
        return s;
    };

    LinearSolveResult res;
    res.u.assign(f.begin(), f.end());
    std::vector<double> r(n);
    std::vector<double> ap(n);
    apply(res.u, ap);
    for (std::size_t e = 0; e < n; ++e) {
        r[e] = f[e] - ap[e];
    }
    std::vector<double> dir = r;
    double rr = dot(r, r);
    const double target = tol * tol;
    for (int it = 0; it < max_iter && rr > target; ++it) {
        apply(dir, ap);
        const double alpha = rr / dot(dir, ap);
        for (std::size_t e = 0; e < n; ++e) {
            res.u[e] += alpha * dir[e];
            r[e] -= alpha * ap[e];
        }
        const double rr_next = dot(r, r);
        for (std::size_t e = 0; e < n; ++e) {
            dir[e] = r[e] + (rr_next / rr) * dir[e];
        }
        rr = rr_next;
        res.iterations = it + 1;
    }
    // true residual
    apply(res.u, ap);
    double worst = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
        worst = std::max(worst, std::abs(ap[e] - f[e]));
    }
    res.residual = worst;
    res.converged = std::sqrt(rr) <= tol;
    return res;
}

}  // namespace sublift
