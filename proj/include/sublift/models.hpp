#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sublift/grid.hpp"
#include "sublift/projections.hpp"
#include "sublift/regularizers.hpp"
#include "sublift/unaries.hpp"

namespace sublift {

/// Representation of the vertical dual component phi_t.
enum class DualMode {
    PiecewiseConstant,  // classical lifting, min-pooled unaries (baseline)
    PiecewiseLinear,    // sublabel-accurate lifting (proposed)
};

const char* to_string(DualMode mode);
DualMode parse_dual_mode(const std::string& text);

/// Full problem description. `unaries` holds width * height * channels
/// entries, channel-major (all pixels of channel 0 first), or a single
/// entry shared by every pixel.
struct ModelSpec {
    int width = 1;
    int height = 1;
    int channels = 1;
    LabelGrid grid = build_grid(0.0, 1.0, 2);
    std::vector<UnaryModel> unaries;
    RegularizerSpec reg;
    DualMode dual_mode = DualMode::PiecewiseLinear;
    /// Sampled tables are only admitted in piecewise linear mode through
    /// the exact piecewise linear surrogate of their conjugates.
    bool allow_table_surrogate = true;
};

/// Assembled scalar model for one channel; read-only during a solve.
///
/// Piecewise linear mode works with labels shifted by gamma_1 (so the
/// first shifted label is 0); each interval of each pixel owns either a
/// run of quadratic pieces or a run of hull points, addressed through the
/// offset tables.
struct Model {
    int width = 1;
    int height = 1;
    LabelGrid grid;
    DualMode mode = DualMode::PiecewiseLinear;
    Eta eta;
    Kappa kappa;
    EtaConjugate eta_conj;
    JumpConstraintSet jumps;

    std::vector<UnaryModel> unaries;  // one per pixel, or one shared

    std::vector<QuadPiece> pieces;
    std::vector<std::uint32_t> piece_offsets;  // pixels * k + 1
    std::vector<CostPoint> hull;
    std::vector<std::uint32_t> hull_offsets;  // pixels * k + 1

    std::vector<double> min_left;   // pixels * k, inf over [gamma_i, gamma*_i]
    std::vector<double> min_right;  // pixels * k, inf over [gamma*_i, gamma_{i+1}]

    [[nodiscard]] std::size_t pixels() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    [[nodiscard]] int k() const { return grid.k; }
    /// Primal multipliers per pixel: k (linear) or 2k (constant).
    [[nodiscard]] int multipliers() const {
        return mode == DualMode::PiecewiseLinear ? grid.k : 2 * grid.k;
    }
    [[nodiscard]] const UnaryModel& unary(std::size_t pixel) const {
        return unaries.size() == 1 ? unaries.front() : unaries[pixel];
    }
    /// Data-term epigraph of interval i at a pixel, in shifted labels.
    [[nodiscard]] DataEpigraphView data_view(std::size_t pixel, int i) const;
};

/// Throws std::invalid_argument when the ModelSpec is inconsistent.
void validate(const ModelSpec& spec);

Model assemble_channel(const ModelSpec& spec, int channel);
/// One independent scalar model per channel, sharing the geometry.
std::vector<Model> assemble(const ModelSpec& spec);

/// Per-label capacities of the vertical flow read back from an assembled
/// piecewise constant model at one pixel: -phi_t(i) <= capacity[i].
/// Only meaningful for one-homogeneous eta, where the interval constraints
/// collapse onto the labels.
std::vector<double> capacity_constraints(const Model& model, std::size_t pixel);

/// Lower-triangular integration operator of the data-term primal form:
/// diagonal -gamma_i / h, ones below. Row-major k x k.
std::vector<double> integration_operator(const LabelGrid& grid);

/// Primal form of the sublabel data term by brute force: minimize
/// sum_i x_i rho_i**(y_i / x_i) over the simplex x and offsets y with
/// v_hat = y / h + I^T x, on a grid of `resolution` points per free
/// dimension followed by local zoom. +inf if v_hat is not reachable.
double dataterm_primal_oracle(std::span<const double> v_hat, const LabelGrid& grid,
                              const UnaryModel& unary, int resolution);

struct DataTermDual {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Dual form of the same data term, maximized by a one-pixel primal-dual
/// run with v_hat held fixed.
DataTermDual dataterm_dual_eval(std::span<const double> v_hat, const LabelGrid& grid,
                                const UnaryModel& unary, int inner_iters);

}  // namespace sublift
