#pragma once

#include <span>
#include <vector>

#include "sublift/grid.hpp"
#include "sublift/regularizers.hpp"
#include "sublift/unaries.hpp"

namespace sublift {

/// A point (slope, height) in the plane of a conjugate's epigraph:
/// membership in epi(g*) means height >= g*(slope).
struct EpigraphPoint {
    double slope = 0.0;
    double height = 0.0;
};

/// Parabola r = curvature * (s - center)^2 + offset.
struct ParabolaShift {
    double center = 0.0;
    double offset = 0.0;
};

/// Euclidean projection onto {(s, r) : r >= curvature (s - center)^2 + offset}.
/// The nearest point solves a depressed cubic; the Cardano root is polished
/// by safeguarded Newton inside its known bracket.
EpigraphPoint project_epi_parabola(EpigraphPoint point, double curvature, ParabolaShift shift = {});

/// Projection onto epi(q*) for q = piece restricted to its interval. The
/// boundary of epi(q*) is a parabolic cap between two linear wings (two rays
/// meeting at a kink when a = 0).
EpigraphPoint project_epi_interval_quadratic(EpigraphPoint point, const QuadPiece& piece);

struct EpiMaxResult {
    EpigraphPoint point;
    bool converged = true;
    int sweeps = 0;
};

/// Projection onto the intersection of epi(q_j*) over all pieces, found
/// exactly by enumerating single-piece projections and pairwise crossings
/// of the conjugate graphs. Cyclic Dykstra (tol, max_iter) is only the
/// fallback when rounding leaves no feasible candidate.
EpiMaxResult project_epi_max(EpigraphPoint point, std::span<const QuadPiece> pieces,
                             double tol = 1e-9, int max_iter = 100);

/// Projection onto the epigraph of the conjugate of the piecewise linear
/// function through `hull` (a lower convex hull sorted by t).
EpigraphPoint project_epi_pwl(EpigraphPoint point, std::span<const CostPoint> hull);
double pwl_conjugate(std::span<const CostPoint> hull, double slope);

/// Data-term epigraph of one interval: either quadratic pieces or the hull
/// of a sampled table (exactly one of the two is nonempty).
struct DataEpigraphView {
    std::span<const QuadPiece> pieces;
    std::span<const CostPoint> hull;

    [[nodiscard]] double conjugate(double slope) const;
};

EpiMaxResult project_data_epigraph(EpigraphPoint point, const DataEpigraphView& view,
                                   double tol = 1e-9, int max_iter = 100);

/// Projection of (p, b) in R^n x R onto
/// {b >= quad |p|^2, |p| <= min(radius, extra_radius)}.
void project_epi_eta(std::span<double> p, double& b, const EtaConjugate& conj,
                     double extra_radius);

/// Partial-sum jump constraints |sum_{l=i..j} phi_x(l)| <= bound(i, j),
/// bound(i, j) = kappa(gamma_{j+1} - gamma_i) / h for 0 <= i <= j < k.
struct JumpConstraintSet {
    int k = 0;
    std::vector<double> bounds;  // k x k row-major, upper triangle used
    bool linear = false;         // kappa(a) = slope * a
    bool active = false;         // false when kappa is +inf for all jumps

    [[nodiscard]] double bound(int i, int j) const {
        return bounds[static_cast<size_t>(i) * static_cast<size_t>(k) + static_cast<size_t>(j)];
    }
    static JumpConstraintSet build(const Kappa& kappa, const LabelGrid& grid);
};

struct ProjectionReport {
    bool converged = true;
    int sweeps = 0;
};

/// Scratch buffers for the Dykstra projections; one per worker.
struct DykstraWorkspace {
    std::vector<double> increments;
    std::vector<double> previous;
};

/// Projection of phi_x (k entries of n components, entry-major) onto the
/// jump constraint set by Dykstra over single partial-sum constraints in
/// lexicographic (i, j) order. Linear kappa is projected exactly in one pass.
ProjectionReport project_jump(std::span<double> phi_x, int n, const JumpConstraintSet& constraints,
                              double tol = 1e-9, int max_iter = 100);
ProjectionReport project_jump(std::span<double> phi_x, int n, const JumpConstraintSet& constraints,
                              double tol, int max_iter, DykstraWorkspace& ws);

/// Projection of (phi_x, b) onto the regularizer set: per interval
/// (phi_x(i), b_i) in epi(eta*), jointly with the jump constraints.
ProjectionReport project_regularizer_set(std::span<double> phi_x, std::span<double> b, int n,
                                         const EtaConjugate& conj,
                                         const JumpConstraintSet& constraints, double tol,
                                         int max_iter, DykstraWorkspace& ws);

struct JumpViolation {
    double max_violation = 0.0;
    int worst_i = -1;
    int worst_j = -1;
    [[nodiscard]] bool feasible() const { return worst_i < 0; }
};

/// Exhaustive check of every (i, j); empty report iff feasible within tol.
JumpViolation check_jump(std::span<const double> phi_x, int n, const JumpConstraintSet& constraints,
                         double tol);

/// The jump constraints before reduction to partial sums: for i < j,
/// |(1 - a) phi(i) + sum_{i<l<j} phi(l) + b phi(j)| <= kappa(gamma_j^b - gamma_i^a) / h with
/// gamma_i^a = (1 - a) gamma_i + a gamma_{i+1}; for i = j and a <= b the segment
/// inside one interval gives |(b - a) phi(i)| <= kappa((b - a) h) / h.
/// (a, b) range over a samples x samples grid on [0, 1].
JumpViolation check_jump_continuum(std::span<const double> phi_x, int n, const Kappa& kappa,
                                   const LabelGrid& grid, int samples, double tol);

struct DualViolation {
    double max_violation = 0.0;
    int worst_interval = -1;
    [[nodiscard]] bool feasible() const { return worst_interval < 0; }
};

/// Direct check of the interval constraints with piecewise linear phi_t:
/// inf over t in interval i of phi_t(i)(gamma_{i+1} - t)/h + phi_t(i+1)(t - gamma_i)/h + rho(t)
/// must be >= eta_star[i]. The infimum is taken over `t_samples` points per
/// interval (endpoints included).
DualViolation check_linear_dual_feasibility(std::span<const double> phi_t,
                                            std::span<const double> eta_star,
                                            const UnaryModel& unary, const LabelGrid& grid,
                                            int t_samples, double tol);

/// The same constraints in split form: with r = (phi_t(i) - phi_t(i+1))/h,
/// c = (phi_t(i) gamma_{i+1} - phi_t(i+1) gamma_i)/h, a = c - eta_star[i],
/// the pair (r, a) must lie in epi(rho_i*). Membership is decided by the
/// epigraph projection moving the point by at most tol.
DualViolation check_split_dual_feasibility(std::span<const double> phi_t,
                                           std::span<const double> eta_star,
                                           const UnaryModel& unary, const LabelGrid& grid,
                                           double tol);

}  // namespace sublift
