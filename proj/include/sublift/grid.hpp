#pragma once

#include <span>
#include <vector>

namespace sublift {

/// Primal and dual label complexes on the range [gamma_first, gamma_last].
///
/// Labels are equidistant with spacing h. Interval i (0-based) is
/// [labels[i], labels[i+1]]; dual node i is its midpoint. The ghost labels
/// one spacing beyond either end close the boundary dual cells.
struct LabelGrid {
    double gamma_first = 0.0;
    double gamma_last = 1.0;
    int ell = 2;
    int k = 1;
    double h = 1.0;
    std::vector<double> labels;
    std::vector<double> dual_nodes;
    double ghost_low = -1.0;
    double ghost_high = 2.0;

    [[nodiscard]] double interval_lo(int i) const { return labels[static_cast<size_t>(i)]; }
    [[nodiscard]] double interval_hi(int i) const { return labels[static_cast<size_t>(i) + 1]; }
    [[nodiscard]] double range() const { return gamma_last - gamma_first; }
};

/// Throws std::invalid_argument for ell < 2 or an empty/inverted range.
LabelGrid build_grid(double gamma_first, double gamma_last, int ell);

/// Lifted coefficients of the subgraph indicator of u: the mean of [t < u]
/// over each interval. Values outside the range are clamped.
std::vector<double> lift(double u_value, const LabelGrid& grid);
void lift_into(double u_value, const LabelGrid& grid, std::span<double> out);

/// gamma_1 + h * sum(coefficients), clamped to the range.
double recover_sublabel(std::span<const double> coefficients, const LabelGrid& grid);

/// Largest t where the piecewise-constant reconstruction of v exceeds
/// `level`; the implicit value left of the range is 1.
double recover_threshold(std::span<const double> coefficients, const LabelGrid& grid,
                         double level = 0.5);

}  // namespace sublift
