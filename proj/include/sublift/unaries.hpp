#pragma once

#include <filesystem>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "sublift/grid.hpp"

namespace sublift {

/// rho(t) = weight * (t - target)^2
struct QuadraticUnary {
    double weight = 1.0;
    double target = 0.0;
};

/// One robust term min{nu, alpha (t - f)^2}.
struct TruncatedQuadraticTerm {
    double nu = 1.0;
    double alpha = 1.0;
    double f = 0.0;
};

/// rho(t) = sum_m min{nu_m, alpha_m (t - f_m)^2}
struct TruncatedQuadraticMixture {
    std::vector<TruncatedQuadraticTerm> terms;
};

/// Generic cost sampled on an increasing grid, linearly interpolated in
/// between and held constant beyond the ends.
struct SampledTable {
    std::vector<double> t_samples;
    std::vector<double> values;
};

using UnaryModel = std::variant<QuadraticUnary, TruncatedQuadraticMixture, SampledTable>;

/// q(t) = a t^2 + b t + c restricted to [lo, hi].
struct QuadPiece {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double operator()(double t) const { return (a * t + b) * t + c; }
    /// The same function in the shifted coordinate t' = t - offset.
    [[nodiscard]] QuadPiece shifted(double offset) const;
};

/// A sample point (t, rho(t)) of a piecewise linear cost.
struct CostPoint {
    double t = 0.0;
    double value = 0.0;
};

double evaluate(const UnaryModel& unary, double t);

/// Infimum of rho over the closed interval [lo, hi].
double min_on(const UnaryModel& unary, double lo, double hi);

/// One pooled value per label: the infimum over the dual cell around the
/// label, with half cells at both ends of the range.
std::vector<double> min_pool(const UnaryModel& unary, const LabelGrid& grid);

/// Per interval i: infima over [gamma_i, gamma*_i] and [gamma*_i, gamma_{i+1}].
struct HalfCellMinima {
    std::vector<double> left;
    std::vector<double> right;
};
HalfCellMinima half_cell_minima(const UnaryModel& unary, const LabelGrid& grid);

/// Quadratic pieces whose pointwise minimum is rho on [lo, hi].
/// Throws std::invalid_argument for SampledTable.
std::vector<QuadPiece> pieces_on(const UnaryModel& unary, double lo, double hi,
                                 double dedup_tol);
std::vector<QuadPiece> pieces_on_interval(const UnaryModel& unary, int interval_index,
                                          const LabelGrid& grid);

/// sup over t in [lo, hi] of slope * t - q(t).
double piece_conjugate(const QuadPiece& piece, double slope);

/// Conjugate of rho + indicator of [lo, hi].
double conjugate_on(const UnaryModel& unary, double lo, double hi, double slope);
double conjugate_on_interval(const UnaryModel& unary, int interval_index, const LabelGrid& grid,
                             double slope);

/// Convex envelope of rho restricted to interval i, by brute-force
/// biconjugation over a slope grid. Test and oracle use only.
/// Throws std::out_of_range if t is outside the interval.
double convex_envelope_eval(const UnaryModel& unary, int interval_index, const LabelGrid& grid,
                            double t);

/// Bound on |rho'| over [lo, hi] used to size the slope grid above.
double slope_bound_on(const UnaryModel& unary, double lo, double hi);

/// Table samples inside [lo, hi] with interpolated endpoints prepended and
/// appended.
std::vector<CostPoint> restricted_samples(const SampledTable& table, double lo, double hi);

/// Lower convex hull of points sorted by t.
std::vector<CostPoint> lower_convex_hull(std::span<const CostPoint> points);

/// Flat binary table: u64 little-endian count S, then S (t, value) pairs
/// of little-endian float64.
SampledTable load_table(const std::filesystem::path& path);
void save_table(const SampledTable& table, const std::filesystem::path& path);

/// Throws std::invalid_argument on negative weights or unsorted tables.
void validate(const UnaryModel& unary);

}  // namespace sublift
