#include "sublift/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sublift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint32_t checked_offset(std::size_t n) {
    if (n > std::numeric_limits<std::uint32_t>::max()) {
        throw std::length_error("model too large for 32-bit piece offsets");
    }
    return static_cast<std::uint32_t>(n);
}

}  // namespace

const char* to_string(DualMode mode) {
    return mode == DualMode::PiecewiseLinear ? "linear" : "constant";
}

DualMode parse_dual_mode(const std::string& text) {
    if (text == "linear" || text == "proposed" || text == "piecewise_linear") {
        return DualMode::PiecewiseLinear;
    }
    if (text == "constant" || text == "baseline" || text == "piecewise_constant") {
        return DualMode::PiecewiseConstant;
    }
    throw std::invalid_argument("unknown dual mode '" + text + "'");
}

DataEpigraphView Model::data_view(std::size_t pixel, int i) const {
    const std::size_t owner = unaries.size() == 1 ? 0 : pixel;
    const std::size_t idx = owner * static_cast<std::size_t>(grid.k) + static_cast<std::size_t>(i);
    DataEpigraphView view;
    if (!piece_offsets.empty()) {
        const auto b = piece_offsets[idx];
        const auto e = piece_offsets[idx + 1];
        view.pieces = std::span<const QuadPiece>(pieces.data() + b, e - b);
    }
    if (!hull_offsets.empty()) {
        const auto b = hull_offsets[idx];
        const auto e = hull_offsets[idx + 1];
        view.hull = std::span<const CostPoint>(hull.data() + b, e - b);
    }
    return view;
}

void validate(const ModelSpec& spec) {
    if (spec.width < 1 || spec.height < 1 || spec.channels < 1) {
        throw std::invalid_argument("model needs positive width, height and channel count");
    }
    const std::size_t per_channel =
        static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height);
    if (spec.unaries.size() != 1 &&
        spec.unaries.size() != per_channel * static_cast<std::size_t>(spec.channels)) {
        throw std::invalid_argument("unary count must be 1 or width * height * channels");
    }
    validate(spec.reg);
    const auto& grid = spec.grid;
    for (const auto& unary : spec.unaries) {
        validate(unary);
        if (const auto* table = std::get_if<SampledTable>(&unary)) {
            if (spec.dual_mode == DualMode::PiecewiseLinear && !spec.allow_table_surrogate) {
                throw std::invalid_argument(
                    "sampled tables need the piecewise linear surrogate in linear mode");
            }
            const double slack = 1e-9 * grid.range();
            if (table->t_samples.front() > grid.ghost_low + slack ||
                table->t_samples.back() < grid.ghost_high - slack) {
                throw std::invalid_argument("sampled table must cover one spacing beyond the range");
            }
        }
    }
}

Model assemble_channel(const ModelSpec& spec, int channel) {
    validate(spec);
    if (channel < 0 || channel >= spec.channels) {
        throw std::out_of_range("channel index out of range");
    }
    Model model;
    model.width = spec.width;
    model.height = spec.height;
    model.grid = spec.grid;
    model.mode = spec.dual_mode;
    model.eta = spec.reg.eta;
    model.kappa = spec.reg.kappa;
    model.eta_conj = eta_conjugate(spec.reg.eta);
    model.jumps = JumpConstraintSet::build(spec.reg.kappa, spec.grid);

    const std::size_t per_channel = model.pixels();
    if (spec.unaries.size() == 1) {
        model.unaries = spec.unaries;
    } else {
        const auto first = spec.unaries.begin() +
                           static_cast<std::ptrdiff_t>(per_channel * static_cast<std::size_t>(channel));
        model.unaries.assign(first, first + static_cast<std::ptrdiff_t>(per_channel));
    }

    const int k = spec.grid.k;
    const double shift = spec.grid.gamma_first;
    const std::size_t owners = model.unaries.size();
    if (model.mode == DualMode::PiecewiseLinear) {
        bool any_table = false;
        for (const auto& u : model.unaries) {
            any_table = any_table || std::holds_alternative<SampledTable>(u);
        }
        model.piece_offsets.reserve(owners * static_cast<std::size_t>(k) + 1);
        model.piece_offsets.push_back(0);
        if (any_table) {
            model.hull_offsets.reserve(owners * static_cast<std::size_t>(k) + 1);
            model.hull_offsets.push_back(0);
        }
        for (std::size_t p = 0; p < owners; ++p) {
            const auto& unary = model.unaries[p];
            const auto* table = std::get_if<SampledTable>(&unary);
            for (int i = 0; i < k; ++i) {
                if (table != nullptr) {
                    const auto pts = restricted_samples(*table, spec.grid.interval_lo(i),
                                                        spec.grid.interval_hi(i));
                    for (const auto& pt : lower_convex_hull(pts)) {
                        model.hull.push_back({pt.t - shift, pt.value});
                    }
                } else {
                    for (const auto& piece : pieces_on_interval(unary, i, spec.grid)) {
                        model.pieces.push_back(piece.shifted(shift));
                    }
                }
                model.piece_offsets.push_back(checked_offset(model.pieces.size()));
                if (any_table) {
                    model.hull_offsets.push_back(checked_offset(model.hull.size()));
                }
            }
        }
    } else {
        model.min_left.resize(owners * static_cast<std::size_t>(k));
        model.min_right.resize(owners * static_cast<std::size_t>(k));
        for (std::size_t p = 0; p < owners; ++p) {
            const auto half = half_cell_minima(model.unaries[p], spec.grid);
            std::copy(half.left.begin(), half.left.end(),
                      model.min_left.begin() + static_cast<std::ptrdiff_t>(p * static_cast<std::size_t>(k)));
            std::copy(half.right.begin(), half.right.end(),
                      model.min_right.begin() + static_cast<std::ptrdiff_t>(p * static_cast<std::size_t>(k)));
        }
    }
    return model;
}

std::vector<Model> assemble(const ModelSpec& spec) {
    std::vector<Model> models;
    models.reserve(static_cast<std::size_t>(spec.channels));
    for (int c = 0; c < spec.channels; ++c) {
        models.push_back(assemble_channel(spec, c));
    }
    return models;
}

std::vector<double> capacity_constraints(const Model& model, std::size_t pixel) {
    if (model.mode != DualMode::PiecewiseConstant) {
        throw std::invalid_argument("capacity constraints exist only in piecewise constant mode");
    }
    if (model.eta_conj.quad != 0.0) {
        throw std::invalid_argument("capacity constraints need a one-homogeneous eta");
    }
    const int k = model.grid.k;
    const std::size_t owner = model.unaries.size() == 1 ? 0 : pixel;
    const std::size_t base = owner * static_cast<std::size_t>(k);
    std::vector<double> cap(static_cast<std::size_t>(model.grid.ell), kInf);
    // phi_t(i) meets interval i from the left half cell and interval i-1
    // from the right half cell.
    for (int i = 0; i < k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        cap[ui] = std::min(cap[ui], model.min_left[base + ui]);
        cap[ui + 1] = std::min(cap[ui + 1], model.min_right[base + ui]);
    }
    return cap;
}

std::vector<double> integration_operator(const LabelGrid& grid) {
    const auto k = static_cast<std::size_t>(grid.k);
    std::vector<double> op(k * k, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < r; ++c) {
            op[r * k + c] = 1.0;
        }
        op[r * k + r] = -grid.labels[r] / grid.h;
    }
    return op;
}

}  // namespace sublift
