#include "sublift/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sublift {

LabelGrid build_grid(double gamma_first, double gamma_last, int ell) {
    if (ell < 2) {
        throw std::invalid_argument("label grid needs at least 2 labels");
    }
    if (!(gamma_last > gamma_first) || !std::isfinite(gamma_first) || !std::isfinite(gamma_last)) {
        throw std::invalid_argument("label range must be a nonempty finite interval");
    }
    LabelGrid g;
    g.gamma_first = gamma_first;
    g.gamma_last = gamma_last;
    g.ell = ell;
    g.k = ell - 1;
    g.h = (gamma_last - gamma_first) / static_cast<double>(ell - 1);
    g.labels.resize(static_cast<size_t>(ell));
    for (int i = 0; i < ell; ++i) {
        g.labels[static_cast<size_t>(i)] = gamma_first + g.h * static_cast<double>(i);
    }
    g.dual_nodes.resize(static_cast<size_t>(g.k));
    for (int i = 0; i < g.k; ++i) {
        g.dual_nodes[static_cast<size_t>(i)] =
            0.5 * (g.labels[static_cast<size_t>(i)] + g.labels[static_cast<size_t>(i) + 1]);
    }
    g.ghost_low = gamma_first - g.h;
    g.ghost_high = g.labels.back() + g.h;
    return g;
}

void lift_into(double u_value, const LabelGrid& grid, std::span<double> out) {
    const double u = std::clamp(u_value, grid.gamma_first, grid.gamma_last);
    for (int i = 0; i < grid.k; ++i) {
        const double lo = grid.interval_lo(i);
        const double hi = grid.interval_hi(i);
        double c;
        if (hi <= u) {
            c = 1.0;
        } else if (lo >= u) {
            c = 0.0;
        } else {
            c = (u - lo) / grid.h;
        }
        out[static_cast<size_t>(i)] = std::clamp(c, 0.0, 1.0);
    }
}

std::vector<double> lift(double u_value, const LabelGrid& grid) {
    std::vector<double> out(static_cast<size_t>(grid.k));
    lift_into(u_value, grid, out);
    return out;
}

double recover_sublabel(std::span<const double> coefficients, const LabelGrid& grid) {
    double sum = 0.0;
    for (double c : coefficients) {
        sum += c;
    }
    return std::clamp(grid.gamma_first + grid.h * sum, grid.labels.front(), grid.labels.back());
}

double recover_threshold(std::span<const double> coefficients, const LabelGrid& grid,
                         double level) {
    // v is 1 left of the range, so the supremum is at least gamma_1.
    double t = grid.gamma_first;
    for (int i = 0; i < grid.k; ++i) {
        if (coefficients[static_cast<size_t>(i)] > level) {
            t = grid.interval_hi(i);
        }
    }
    return t;
}

}  // namespace sublift
