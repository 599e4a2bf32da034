#include "sublift/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace sublift {

namespace fs = std::filesystem;

std::vector<double> convex_test_image(int width, int height) {
    std::vector<double> f(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    const double pi = std::numbers::pi;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double sx = 64.0 * x / width;
            const double sy = 64.0 * y / height;
            double v = 0.5 + 0.3 * std::sin(2.0 * pi * sx / 64.0) * std::cos(2.0 * pi * sy / 48.0) +
                       0.15 * (sx - sy) / 64.0;
            const double dx = sx - 40.0;
            const double dy = sy - 22.0;
            if (dx * dx + dy * dy < 100.0) {
                v += 0.2;
            }
            f[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
              static_cast<std::size_t>(x)] = std::clamp(v, 0.0, 1.0);
        }
    }
    return f;
}

ImageBuffer phantom_image(int width, int height) {
    std::vector<std::vector<double>> planes(
        3, std::vector<double>(static_cast<std::size_t>(width) * static_cast<std::size_t>(height)));
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double sx = static_cast<double>(x) / std::max(1, width - 1);
            const double sy = static_cast<double>(y) / std::max(1, height - 1);
            double rgb[3] = {0.15 + 0.25 * sx, 0.2 + 0.2 * sy, 0.55 - 0.2 * sx};
            const double dx = sx - 0.32;
            const double dy = sy - 0.35;
            if (dx * dx + dy * dy < 0.05) {
                rgb[0] = 0.85 - 0.3 * sy;
                rgb[1] = 0.35 + 0.2 * sx;
                rgb[2] = 0.2;
            } else if (sx > 0.55 && sx < 0.9 && sy > 0.2 && sy < 0.6) {
                rgb[0] = 0.3;
                rgb[1] = 0.6 + 0.3 * (sx - 0.55);
                rgb[2] = 0.9 - 0.4 * (sy - 0.2);
            } else if (sy > 0.68 && sy < 0.95 && std::abs(sx - 0.5) < 0.9 * (sy - 0.68)) {
                rgb[0] = 0.95 - 0.3 * (sy - 0.68);
                rgb[1] = 0.85;
                rgb[2] = 0.45 + 0.3 * sx;
            }
            const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                                  static_cast<std::size_t>(x);
            for (int c = 0; c < 3; ++c) {
                planes[static_cast<std::size_t>(c)][p] = rgb[c];
            }
        }
    }
    return ImageBuffer::from_planes(width, height, planes);
}

std::vector<double> ramp_signal(int length, double lo, double hi) {
    std::vector<double> r(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) {
        r[static_cast<std::size_t>(i)] = length == 1 ? lo : lo + (hi - lo) * i / (length - 1);
    }
    return r;
}

void add_gaussian_noise(std::span<double> values, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // 53-bit uniforms in (0, 1]; the distribution classes are not portable.
    auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; };
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < values.size(); i += 2) {
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = two_pi * uniform();
        values[i] += sigma * radius * std::cos(angle);
        if (i + 1 < values.size()) {
            values[i + 1] += sigma * radius * std::sin(angle);
        }
    }
}

double psnr(std::span<const double> estimate, std::span<const double> truth) {
    if (estimate.size() != truth.size() || truth.empty()) {
        throw std::invalid_argument("psnr: size mismatch");
    }
    double mse = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = estimate[i] - truth[i];
        mse += d * d;
    }
    mse /= static_cast<double>(truth.size());
    if (mse == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -10.0 * std::log10(mse);
}

double label_bias_score(std::span<const double> u, const LabelGrid& grid) {
    if (u.empty()) {
        return 0.0;
    }
    const double tol = grid.h / 100.0;
    std::size_t near = 0;
    for (double value : u) {
        const double pos = (value - grid.gamma_first) / grid.h;
        const double nearest = std::clamp(std::round(pos), 0.0, static_cast<double>(grid.ell - 1));
        if (std::abs(value - (grid.gamma_first + nearest * grid.h)) <= tol) {
            ++near;
        }
    }
    return static_cast<double>(near) / static_cast<double>(u.size());
}

SolverConfig solver_config_from(const Config& cfg) {
    SolverConfig c;
    c.max_iters = cfg.get_int("max_iters", c.max_iters);
    c.stop_tol = cfg.get_double("stop_tol", c.stop_tol);
    c.check_every = cfg.get_int("check_every", c.check_every);
    c.stable_checks = cfg.get_int("stable_checks", c.stable_checks);
    c.theta = cfg.get_double("theta", c.theta);
    c.step_ratio = cfg.get_double("step_ratio", c.step_ratio);
    c.primal_step = cfg.get_double("primal_step", c.primal_step);
    c.dual_step = cfg.get_double("dual_step", c.dual_step);
    c.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<int>(c.seed)));
    c.dykstra_tol = cfg.get_double("dykstra_tol", c.dykstra_tol);
    c.dykstra_max_iter = cfg.get_int("dykstra_max_iter", c.dykstra_max_iter);
    c.power_iters = cfg.get_int("power_iters", c.power_iters);
    c.record_timing = cfg.get_bool("record_timing", c.record_timing);
    c.reference_kernels = cfg.get_bool("reference_kernels", c.reference_kernels);
    return c;
}

namespace {

// The piecewise constant discretization converges more slowly on the same
// problems, so its runs get a larger default iteration cap.
constexpr int kBaselineMaxIters = 100000;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ModelSpec quadratic_spec(std::span<const double> f, int width, int height, double weight, int ell,
                         DualMode mode) {
    ModelSpec spec;
    spec.width = width;
    spec.height = height;
    spec.grid = build_grid(0.0, 1.0, ell);
    spec.dual_mode = mode;
    spec.unaries.reserve(f.size());
    for (double target : f) {
        spec.unaries.emplace_back(QuadraticUnary{weight, target});
    }
    return spec;
}

std::string mode_tag(DualMode mode) {
    return mode == DualMode::PiecewiseLinear ? "linear" : "constant";
}

std::vector<DualMode> parse_modes(const std::string& text) {
    std::vector<DualMode> modes;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            modes.push_back(parse_dual_mode(item));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (modes.empty()) {
        throw ConfigError("no dual mode given");
    }
    return modes;
}

void write_text(const fs::path& path, const std::string& text, CommandResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw ImageAccessError("cannot write " + path.string());
    }
    result.written.push_back(path.string());
}

void write_history(const fs::path& path, const std::vector<Diagnostics>& history,
                   CommandResult& result) {
    std::ostringstream csv;
    write_diagnostics_csv(csv, history);
    write_text(path, csv.str(), result);
}

void write_image(const fs::path& path, const ImageBuffer& image, CommandResult& result) {
    save_image(image, path);
    result.written.push_back(path.string());
}

void reject_unused(const Config& cfg) {
    const auto unused = cfg.unused_keys();
    if (!unused.empty()) {
        std::string list;
        for (const auto& key : unused) {
            list += (list.empty() ? "" : ", ") + key;
        }
        throw ConfigError("unknown config keys: " + list);
    }
}

fs::path prepare_output(const Config& cfg) {
    const fs::path dir = cfg.get_string("output_dir", "out");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ImageAccessError("cannot create output directory " + dir.string());
    }
    return dir;
}

}  // namespace

LiftedRun solve_quadratic_lifted(std::span<const double> f, int width, int height, double lambda,
                                 int ell, DualMode mode, const SolverConfig& config) {
    ModelSpec spec = quadratic_spec(f, width, height, 1.0, ell, mode);
    spec.reg.eta = SquaredNorm{lambda};
    spec.reg.kappa = NoJumps{};
    const Model model = assemble_channel(spec, 0);
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = run(model, config);
    LiftedRun out;
    out.seconds = seconds_since(t0);
    out.mode = mode;
    out.ell = ell;
    out.u = std::move(res.u);
    out.history = std::move(res.history);
    out.iterations = res.iterations;
    out.converged = res.converged;
    return out;
}

bool ConvexExactReport::all_converged() const {
    return std::all_of(rows.begin(), rows.end(), [](const ConvexExactRow& r) { return r.converged; });
}

ConvexExactReport run_convex_exact(std::span<const double> f, int width, int height, double lambda,
                                   const std::vector<int>& proposed_labels,
                                   const std::vector<int>& baseline_labels,
                                   const SolverConfig& proposed_config,
                                   const SolverConfig& baseline_config) {
    ConvexExactReport rep;
    rep.lambda = lambda;
    const auto direct = direct_quadratic_solve(f, width, height, lambda);
    rep.direct_u = direct.u;
    rep.direct_energy = quadratic_energy(direct.u, f, width, height, lambda);
    rep.rows.push_back({"direct", 0, rep.direct_energy, 1.0, 0.0, direct.iterations, direct.converged});

    auto add = [&](DualMode mode, int ell, const SolverConfig& config) {
        LiftedRun r = solve_quadratic_lifted(f, width, height, lambda, ell, mode, config);
        ConvexExactRow row;
        row.method = mode_tag(mode);
        row.ell = ell;
        row.energy = quadratic_energy(r.u, f, width, height, lambda);
        row.ratio = row.energy / rep.direct_energy;
        row.rel_error = std::abs(row.energy - rep.direct_energy) / rep.direct_energy;
        row.iterations = r.iterations;
        row.converged = r.converged;
        rep.rows.push_back(row);
        rep.runs.push_back(std::move(r));
    };
    for (int ell : proposed_labels) {
        add(DualMode::PiecewiseLinear, ell, proposed_config);
    }
    for (int ell : baseline_labels) {
        add(DualMode::PiecewiseConstant, ell, baseline_config);
    }
    return rep;
}

DenoiseRun run_denoise(const ImageBuffer& noisy, const ImageBuffer* truth, const DenoiseParams& params,
                       int ell, DualMode mode, const SolverConfig& config) {
    if (truth && (truth->width != noisy.width || truth->height != noisy.height ||
                  truth->channels != noisy.channels)) {
        throw std::invalid_argument("ground truth and input differ in shape");
    }
    DenoiseRun out;
    out.mode = mode;
    out.ell = ell;
    out.output = noisy;
    std::vector<double> all_est;
    std::vector<double> all_truth;
    for (int c = 0; c < noisy.channels; ++c) {
        const auto f = noisy.plane(c);
        ModelSpec spec = quadratic_spec(f, noisy.width, noisy.height, params.data_weight, ell, mode);
        spec.reg.eta = SquaredNorm{params.smooth_weight};
        spec.reg.kappa = ConstantJump{params.jump_cost};
        const Model model = assemble_channel(spec, 0);
        SolveResult res = run(model, config);
        out.output.set_plane(c, res.u);
        out.channel_energy.push_back(unlifted_energy(res.u, model));
        out.iterations.push_back(res.iterations);
        out.converged = out.converged && res.converged;
        if (truth) {
            const auto gt = truth->plane(c);
            out.channel_psnr.push_back(psnr(res.u, gt));
            all_est.insert(all_est.end(), res.u.begin(), res.u.end());
            all_truth.insert(all_truth.end(), gt.begin(), gt.end());
        }
        out.history.push_back(std::move(res.history));
    }
    if (truth) {
        out.psnr = psnr(all_est, all_truth);
    }
    return out;
}

RampRun run_ramp(std::span<const double> ramp, double tv_weight, int ell, DualMode mode,
                 const SolverConfig& config) {
    ModelSpec spec = quadratic_spec(ramp, static_cast<int>(ramp.size()), 1, 1.0, ell, mode);
    spec.reg.eta = Norm{tv_weight};
    spec.reg.kappa = LinearJump{tv_weight};
    const Model model = assemble_channel(spec, 0);
    SolveResult res = run(model, config);
    RampRun out;
    out.mode = mode;
    out.ell = ell;
    out.bias_score = label_bias_score(res.u, model.grid);
    for (std::size_t i = 0; i < ramp.size(); ++i) {
        out.max_deviation = std::max(out.max_deviation, std::abs(res.u[i] - ramp[i]) / model.grid.range());
    }
    out.u = std::move(res.u);
    out.iterations = res.iterations;
    out.converged = res.converged;
    return out;
}

CommandResult cmd_convex_exact(const Config& cfg, std::ostream& log) {
    const double lambda = cfg.get_double("lambda", 10.0);
    const auto proposed = cfg.get_int_list("labels", {2, 3, 5});
    const auto baseline = cfg.get_int_list("baseline_labels", {2, 3, 5, 16});
    const std::string input = cfg.get_string("input", "");
    SolverConfig proposed_cfg = solver_config_from(cfg);
    SolverConfig baseline_cfg = proposed_cfg;
    baseline_cfg.max_iters = cfg.get_int("baseline_max_iters", kBaselineMaxIters);
    const fs::path dir = prepare_output(cfg);
    reject_unused(cfg);

    ImageBuffer image;
    if (input.empty()) {
        image = ImageBuffer::from_planes(64, 64, {convex_test_image(64, 64)});
    } else {
        image = load_image(input);
    }
    if (image.channels != 1) {
        throw ConfigError("convex-exact needs a grayscale input");
    }
    const auto f = image.plane(0);
    const auto rep = run_convex_exact(f, image.width, image.height, lambda, proposed, baseline,
                                      proposed_cfg, baseline_cfg);

    CommandResult result;
    std::ostringstream table;
    table << "method,labels,energy,ratio,rel_error,iterations,converged\n";
    for (const auto& row : rep.rows) {
        table << row.method << ',' << row.ell << ',' << std::setprecision(12) << row.energy << ','
              << row.ratio << ',' << row.rel_error << ',' << row.iterations << ','
              << (row.converged ? 1 : 0) << '\n';
        log << std::left << std::setw(9) << row.method << " l=" << std::setw(3) << row.ell
            << " E_Q=" << std::setprecision(8) << row.energy << " ratio=" << row.ratio
            << " iters=" << row.iterations << (row.converged ? "" : " (max_iters)") << '\n';
    }
    write_text(dir / "convex_exact.csv", table.str(), result);
    write_image(dir / "convex_direct.pgm", ImageBuffer::from_planes(image.width, image.height, {rep.direct_u}),
                result);
    for (const auto& r : rep.runs) {
        const std::string stem = "convex_" + mode_tag(r.mode) + "_L" + std::to_string(r.ell);
        write_image(dir / (stem + ".pgm"), ImageBuffer::from_planes(image.width, image.height, {r.u}),
                    result);
        write_history(dir / (stem + "_diagnostics.csv"), r.history, result);
    }
    result.exit_code = rep.all_converged() ? 0 : 3;
    return result;
}

CommandResult cmd_denoise(const Config& cfg, std::ostream& log) {
    const std::string input = cfg.get_string("input", "phantom");
    const std::string truth_path = cfg.get_string("truth", "");
    const int size = cfg.get_int("phantom_size", 64);
    const double sigma = cfg.get_double("noise_sigma", 0.3);
    const auto noise_seed = static_cast<std::uint64_t>(cfg.get_int("noise_seed", 1));
    const auto labels = cfg.get_int_list("labels", {2, 4, 6});
    const auto modes = parse_modes(cfg.get_string("modes", "linear,constant"));
    DenoiseParams params;
    params.data_weight = cfg.get_double("data_weight", params.data_weight);
    params.smooth_weight = cfg.get_double("smooth_weight", params.smooth_weight);
    params.jump_cost = cfg.get_double("jump_cost", params.jump_cost);
    const SolverConfig solver = solver_config_from(cfg);
    SolverConfig baseline_solver = solver;
    baseline_solver.max_iters = cfg.get_int("baseline_max_iters", kBaselineMaxIters);
    int slice_row = cfg.get_int("slice_row", -1);
    const fs::path dir = prepare_output(cfg);
    reject_unused(cfg);

    ImageBuffer clean;
    bool have_truth = false;
    if (input == "phantom") {
        clean = phantom_image(size, size);
        have_truth = true;
    } else {
        clean = load_image(input);
    }
    if (!truth_path.empty()) {
        clean = load_image(truth_path);
        have_truth = true;
    }
    ImageBuffer noisy = input == "phantom" ? clean : load_image(input);
    if (sigma > 0.0) {
        add_gaussian_noise(noisy.values, sigma, noise_seed);
    }
    if (slice_row < 0 || slice_row >= noisy.height) {
        slice_row = noisy.height / 2;
    }

    const std::string ext = noisy.channels == 1 ? ".pgm" : ".ppm";
    CommandResult result;
    write_image(dir / ("denoise_noisy" + ext), noisy, result);
    std::ostringstream table;
    table << "mode,labels,channel,psnr,energy,iterations,converged\n";
    bool converged = true;
    for (DualMode mode : modes) {
        for (int ell : labels) {
            const DenoiseRun r = run_denoise(noisy, have_truth ? &clean : nullptr, params, ell, mode,
                                               mode == DualMode::PiecewiseConstant ? baseline_solver : solver);
            converged = converged && r.converged;
            const std::string stem = "denoise_" + mode_tag(mode) + "_L" + std::to_string(ell);
            for (int c = 0; c < noisy.channels; ++c) {
                const auto cc = static_cast<std::size_t>(c);
                table << mode_tag(mode) << ',' << ell << ',' << c << ',' << std::setprecision(12)
                      << (have_truth ? r.channel_psnr[cc] : std::nan("")) << ','
                      << r.channel_energy[cc] << ',' << r.iterations[cc] << ','
                      << (r.converged ? 1 : 0) << '\n';
                write_history(dir / (stem + "_c" + std::to_string(c) + "_diagnostics.csv"),
                              r.history[cc], result);
            }
            if (have_truth) {
                log << std::left << std::setw(9) << mode_tag(mode) << " l=" << ell
                    << " PSNR=" << std::setprecision(4) << r.psnr << " dB\n";
            }
            write_image(dir / (stem + ext), r.output, result);

            std::ostringstream slice;
            slice << "x,channel,noisy,truth,u\n";
            for (int c = 0; c < noisy.channels; ++c) {
                for (int x = 0; x < noisy.width; ++x) {
                    const std::size_t s =
                        (static_cast<std::size_t>(slice_row) * static_cast<std::size_t>(noisy.width) +
                         static_cast<std::size_t>(x)) *
                            static_cast<std::size_t>(noisy.channels) +
                        static_cast<std::size_t>(c);
                    slice << x << ',' << c << ',' << std::setprecision(12) << noisy.values[s] << ','
                          << (have_truth ? clean.values[s] : std::nan("")) << ','
                          << r.output.values[s] << '\n';
                }
            }
            write_text(dir / (stem + "_slice.csv"), slice.str(), result);
        }
    }
    write_text(dir / "denoise.csv", table.str(), result);
    result.exit_code = converged ? 0 : 3;
    return result;
}

CommandResult cmd_ramp_bias(const Config& cfg, std::ostream& log) {
    const int length = cfg.get_int("length", 128);
    const double lo = cfg.get_double("ramp_low", 0.05);
    const double hi = cfg.get_double("ramp_high", 0.95);
    const double weight = cfg.get_double("tv_weight", 0.02);
    const auto labels = cfg.get_int_list("labels", {4});
    const auto modes = parse_modes(cfg.get_string("modes", "linear,constant"));
    const SolverConfig solver = solver_config_from(cfg);
    SolverConfig baseline_solver = solver;
    baseline_solver.max_iters = cfg.get_int("baseline_max_iters", kBaselineMaxIters);
    const fs::path dir = prepare_output(cfg);
    reject_unused(cfg);

    const auto ramp = ramp_signal(length, lo, hi);
    CommandResult result;
    std::ostringstream table;
    table << "mode,labels,bias_score,max_deviation,iterations,converged\n";
    bool converged = true;
    for (DualMode mode : modes) {
        for (int ell : labels) {
            const RampRun r = run_ramp(ramp, weight, ell, mode,
                                      mode == DualMode::PiecewiseConstant ? baseline_solver : solver);
            converged = converged && r.converged;
            table << mode_tag(mode) << ',' << ell << ',' << std::setprecision(12) << r.bias_score << ','
                  << r.max_deviation << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
            log << std::left << std::setw(9) << mode_tag(mode) << " l=" << ell
                << " bias=" << std::setprecision(4) << r.bias_score << " max_dev=" << r.max_deviation
                << '\n';
            std::ostringstream slice;
            slice << "x,ramp,u\n";
            for (std::size_t i = 0; i < ramp.size(); ++i) {
                slice << i << ',' << std::setprecision(12) << ramp[i] << ',' << r.u[i] << '\n';
            }
            write_text(dir / ("ramp_" + mode_tag(mode) + "_L" + std::to_string(ell) + ".csv"),
                       slice.str(), result);
        }
    }
    write_text(dir / "ramp_bias.csv", table.str(), result);
    result.exit_code = converged ? 0 : 3;
    return result;
}

}  // namespace sublift
