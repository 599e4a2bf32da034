#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sublift/models.hpp"

namespace sublift {

struct SolverConfig {
    int max_iters = 20000;
    /// Primal and dual steps; 0 selects tau = ratio / L, sigma = 1 / (ratio L).
    double primal_step = 0.0;
    double dual_step = 0.0;
    double step_ratio = 1.0;
    double theta = 1.0;
    /// Relative change of the lifted primal between iterations.
    double stop_tol = 1e-6;
    int check_every = 10;
    /// Consecutive checks below stop_tol required to stop.
    int stable_checks = 10;
    std::uint64_t seed = 0;
    double dykstra_tol = 1e-9;
    int dykstra_max_iter = 100;
    /// Power iterations for the operator norm; the estimate is inflated by 1%.
    int power_iters = 50;
    /// Fill Diagnostics::runtime_ms; off by default so histories are
    /// reproducible byte for byte.
    bool record_timing = false;
    /// Run the serial unfused reference kernels instead of the parallel ones.
    bool reference_kernels = false;
};

/// Primal variables per pixel: v (k coefficients) and the nonnegative
/// multipliers mu of the interval constraints.
struct PrimalVars {
    std::vector<double> v;
    std::vector<double> mu;
};

/// Dual variables per pixel. `t` holds the k + 1 vertical coefficients:
/// (q, r_1..r_k) in linear mode with q = phi_t(1) and
/// r_i = (phi_t(i) - phi_t(i+1)) / h, or phi_t(1..l) in constant mode.
/// `a` (linear mode only) and `b` are the epigraph ordinates of the data
/// term and of eta*, `px` the spatial flux (2 per interval).
struct DualVars {
    std::vector<double> t;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> px;
};

struct SolverState {
    PrimalVars x;
    PrimalVars x_bar;
    DualVars y;
};

struct Diagnostics {
    int iteration = 0;
    double bilinear_value = 0.0;
    double unlifted_energy = 0.0;
    double gap_bound = 0.0;
    double max_constraint_violation = 0.0;
    std::int64_t runtime_ms = 0;
};

struct StepSizes {
    double tau = 0.0;
    double sigma = 0.0;
    double lipschitz = 0.0;
};

// Sublabel inverts the lifting; Threshold takes the upper level set at 1/2.
enum class Recovery { Sublabel, Threshold };

struct SolveResult {
    SolverState state;
    std::vector<Diagnostics> history;
    std::vector<double> u;  // recovered solution, one value per pixel
    StepSizes steps;
    bool converged = false;
    int iterations = 0;
};

SolverState initial_state(const Model& model);

/// Explicit linear operator of the saddle-point problem and its adjoint.
void apply_K(const Model& model, const PrimalVars& x, DualVars& out);
void apply_KT(const Model& model, const DualVars& y, PrimalVars& out);
/// Constant terms <g, y> and <f, x> of the saddle-point function.
DualVars dual_linear_term(const Model& model);
PrimalVars primal_linear_term(const Model& model);

/// Norm of K by power iteration on K^T K from a seeded random start.
double estimate_operator_norm(const Model& model, int iters, std::uint64_t seed);

/// Steps satisfying sigma * tau * L^2 <= 1. Throws std::invalid_argument if
/// explicit steps violate the bound.
StepSizes choose_steps(const Model& model, const SolverConfig& config);

/// Projection of every pixel's dual variables onto the constraint set.
/// Returns the number of pixels whose Dykstra loop hit the sweep limit.
int project_dual(const Model& model, DualVars& y, const SolverConfig& config);

/// One Chambolle-Pock iteration, parallel fused kernels. Returns the
/// relative change of v.
double pd_iterate(SolverState& state, const Model& model, const StepSizes& steps,
                  const SolverConfig& config);
/// The same iteration built from apply_K / apply_KT and whole-vector updates.
double pd_iterate_reference(SolverState& state, const Model& model, const StepSizes& steps,
                            const SolverConfig& config);

/// Saddle-point function value L(x, y) = <Kx, y> + <g, y> + <f, x>.
double saddle_value(const Model& model, const PrimalVars& x, const DualVars& y);
/// Largest violation of the dual constraints over all pixels.
double dual_violation(const Model& model, const DualVars& y);

std::vector<double> recover(const Model& model, const PrimalVars& x,
                            Recovery method = Recovery::Sublabel);

SolveResult run(const Model& model, const SolverConfig& config,
                Recovery recovery = Recovery::Sublabel);
/// Warm-started variant; `start` must match the model's shapes.
SolveResult run(const Model& model, const SolverConfig& config, SolverState start,
                Recovery recovery = Recovery::Sublabel);

/// Discrete energy of an unlifted field: sum of unaries plus, per pixel,
/// eta(grad u) when the model has no jumps, otherwise per forward edge
/// min(eta(du), kappa(|du|)).
double unlifted_energy(std::span<const double> u, const Model& model);

/// E_Q(u) = sum (u - f)^2 + lambda sum |grad u|^2.
double quadratic_energy(std::span<const double> u, std::span<const double> f, int width,
                        int height, double lambda);

struct LinearSolveResult {
    std::vector<double> u;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Solves (I - lambda Laplacian) u = f by conjugate gradients with the
/// Laplacian div(grad) of the solver's finite differences.
LinearSolveResult direct_quadratic_solve(std::span<const double> f, int width, int height,
                                         double lambda, double tol = 1e-10,
                                         int max_iter = 100000);

struct ReferenceSolveResult {
    std::vector<double> u;
    bool converged = false;
    int iterations = 0;
};

/// Unlifted convex problem with the convexified unaries over the whole
/// range and the regularizer eta infimally convolved with gamma |.|,
/// gamma = kappa(h) / h, solved by the primal-dual method on u directly.
/// Requires a two-label model.
ReferenceSolveResult infconv_reference_solve(const Model& model, const SolverConfig& config);

/// Column header: iter,bilinear,energy,gap,violation,ms
void write_diagnostics_csv(std::ostream& out, std::span<const Diagnostics> history);

}  // namespace sublift
