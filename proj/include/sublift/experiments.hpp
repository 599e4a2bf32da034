#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sublift/config.hpp"
#include "sublift/image_io.hpp"
#include "sublift/models.hpp"
#include "sublift/solver.hpp"

namespace sublift {

// Test signals.

/// Smooth sinusoidal pattern plus a tilted plane and a raised disk, in [0, 1].
std::vector<double> convex_test_image(int width, int height);
/// Three-channel piecewise smooth image: shaded background with a disk, a
/// rectangle and a triangle carrying their own smooth color ramps.
ImageBuffer phantom_image(int width, int height);
/// Linear ramp from lo to hi over `length` samples.
std::vector<double> ramp_signal(int length, double lo, double hi);
/// Adds sigma * N(0, 1) noise drawn by Box-Muller from mt19937_64(seed).
void add_gaussian_noise(std::span<double> values, double sigma, std::uint64_t seed);

/// Peak signal to noise ratio for the range [0, 1]; +inf for identical inputs.
double psnr(std::span<const double> estimate, std::span<const double> truth);
/// Fraction of values within h/100 of some label.
double label_bias_score(std::span<const double> u, const LabelGrid& grid);

/// Reads the solver keys (max_iters, stop_tol, check_every, stable_checks,
/// theta, step_ratio, primal_step, dual_step, seed, dykstra_tol,
/// dykstra_max_iter, power_iters, record_timing, reference_kernels).
SolverConfig solver_config_from(const Config& cfg);

struct LiftedRun {
    DualMode mode = DualMode::PiecewiseLinear;
    int ell = 2;
    std::vector<double> u;
    std::vector<Diagnostics> history;
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;
};

/// Lifted solve of sum (u - f)^2 + lambda |grad u|^2 on [0, 1].
LiftedRun solve_quadratic_lifted(std::span<const double> f, int width, int height, double lambda,
                                 int ell, DualMode mode, const SolverConfig& config);

struct ConvexExactRow {
    std::string method;  // "direct", "linear" or "constant"
    int ell = 0;
    double energy = 0.0;
    double ratio = 1.0;
    double rel_error = 0.0;
    int iterations = 0;
    bool converged = true;
};

struct ConvexExactReport {
    double lambda = 0.0;
    double direct_energy = 0.0;
    std::vector<double> direct_u;
    std::vector<ConvexExactRow> rows;
    std::vector<LiftedRun> runs;
    [[nodiscard]] bool all_converged() const;
};

ConvexExactReport run_convex_exact(std::span<const double> f, int width, int height, double lambda,
                                   const std::vector<int>& proposed_labels,
                                   const std::vector<int>& baseline_labels,
                                   const SolverConfig& proposed_config,
                                   const SolverConfig& baseline_config);

/// Channel-separable Mumford-Shah denoising parameters:
/// rho = data_weight (u - f)^2, eta = smooth_weight |g|^2, kappa = jump_cost [a > 0].
struct DenoiseParams {
    double data_weight = 1.0;
    double smooth_weight = 5.0;
    double jump_cost = 0.2;
};

struct DenoiseRun {
    DualMode mode = DualMode::PiecewiseLinear;
    int ell = 2;
    ImageBuffer output;
    std::vector<double> channel_psnr;  // empty without ground truth
    double psnr = 0.0;
    std::vector<double> channel_energy;
    std::vector<int> iterations;
    bool converged = true;
    std::vector<std::vector<Diagnostics>> history;  // per channel
};

DenoiseRun run_denoise(const ImageBuffer& noisy, const ImageBuffer* truth, const DenoiseParams& params,
                       int ell, DualMode mode, const SolverConfig& config);

struct RampRun {
    DualMode mode = DualMode::PiecewiseLinear;
    int ell = 2;
    std::vector<double> u;
    double bias_score = 0.0;
    double max_deviation = 0.0;  // relative to the range
    int iterations = 0;
    bool converged = true;
};

/// Denoises a clean 1D ramp with a weak total variation prior.
RampRun run_ramp(std::span<const double> ramp, double tv_weight, int ell, DualMode mode,
                 const SolverConfig& config);

/// Outcome of a command: exit code 0 or 3 (some solve hit max_iters).
struct CommandResult {
    int exit_code = 0;
    std::vector<std::string> written;
};

CommandResult cmd_convex_exact(const Config& cfg, std::ostream& log);
CommandResult cmd_denoise(const Config& cfg, std::ostream& log);
CommandResult cmd_ramp_bias(const Config& cfg, std::ostream& log);

}  // namespace sublift
