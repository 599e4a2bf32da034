#include "sublift/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "sublift/models.hpp"
#include "sublift/solver.hpp"

namespace sublift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53);
    }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    double normal() {
        const double u1 = uniform(0x1.0p-53, 1.0);
        const double u2 = uniform(0.0, 1.0);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    }

    LabelGrid grid(int ell) {
        const double lo = uniform(-1.0, 1.0);
        return build_grid(lo, lo + uniform(0.5, 3.0), ell);
    }

    Kappa kappa(double range) {
        switch (integer(0, 3)) {
            case 0:
                return LinearJump{uniform(0.2, 2.0)};
            case 1:
                return ConstantJump{uniform(0.1, 2.0)};
            case 2:
                return TruncatedLinearJump{uniform(0.5, 3.0), uniform(0.1, 1.5)};
            default: {
                JumpTable table;
                table.heights.push_back(0.0);
                table.values.push_back(0.0);
                double slope = uniform(0.5, 3.0);
                const int knots = integer(2, 5);
                for (int m = 0; m < knots; ++m) {
                    const double step = uniform(0.05, 0.6) * range;
                    table.heights.push_back(table.heights.back() + step);
                    table.values.push_back(table.values.back() + slope * step);
                    slope *= uniform(0.1, 0.9);
                }
                return table;
            }
        }
    }

    UnaryModel unary(const LabelGrid& grid, bool allow_table) {
        const double lo = grid.gamma_first;
        const double hi = grid.gamma_last;
        const int kind = integer(0, allow_table ? 2 : 1);
        if (kind == 0) {
            return QuadraticUnary{uniform(0.2, 3.0), uniform(lo - 0.2, hi + 0.2)};
        }
        if (kind == 1) {
            TruncatedQuadraticMixture mix;
            const int terms = integer(1, 3);
            for (int m = 0; m < terms; ++m) {
                mix.terms.push_back({uniform(0.05, 0.5), uniform(1.0, 20.0), uniform(lo, hi)});
            }
            return mix;
        }
        SampledTable table;
        const int n = 33;
        for (int s = 0; s < n; ++s) {
            const double t = grid.ghost_low + (grid.ghost_high - grid.ghost_low) * s / (n - 1);
            table.t_samples.push_back(t);
            table.values.push_back(uniform(0.0, 1.0));
        }
        return table;
    }

private:
    std::mt19937_64 rng_;
};

// Smallest t in [lo, hi] with accept(t), for monotone accept.
template <class Accept>
double threshold(Accept accept, double lo, double hi) {
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (accept(mid) ? hi : lo) = mid;
    }
    return hi;
}

// Instances are placed at a random relative distance from the feasibility
// boundary, on either side, so both outcomes are exercised near the edge.
double straddle(Draw& draw, double at) {
    const double margin = draw.uniform(1e-4, 0.3);
    return draw.integer(0, 1) == 1 ? at * (1.0 + margin) : at * (1.0 - margin);
}

std::string ratio_note(int hits, int total, const char* what) {
    std::ostringstream os;
    os << hits << "/" << total << " " << what;
    return os.str();
}

// base + c with the uniform offset c placed near the smallest feasible one.
std::vector<double> shifted_duals(Draw& draw, const std::vector<double>& base,
                                  const std::vector<double>& eta_star, const UnaryModel& unary,
                                  const LabelGrid& grid) {
    auto moved = [&](double c) {
        std::vector<double> out = base;
        for (double& e : out) {
            e += c;
        }
        return out;
    };
    double scale = 1.0;
    for (double e : base) {
        scale = std::max(scale, std::abs(e));
    }
    for (double e : eta_star) {
        scale = std::max(scale, std::abs(e));
    }
    const double span = 100.0 * scale;
    const double edge = threshold(
        [&](double c) { return check_split_dual_feasibility(moved(c), eta_star, unary, grid, 0.0).feasible(); },
        -span, span);
    const double margin = draw.uniform(1e-4, 0.3) * (1.0 + std::abs(edge));
    return moved(draw.integer(0, 1) == 1 ? edge + margin : edge - margin);
}

}  // namespace

SuiteResult suite_jump_reduction(std::uint64_t seed, int instances) {
    SuiteResult res{"jump constraints: partial sums vs continuum", 0, 0, 0.0, ""};
    Draw draw(seed);
    int feasible = 0;
    for (int inst = 0; inst < instances; ++inst) {
        const int k = draw.integer(1, 6);
        const LabelGrid grid = draw.grid(k + 1);
        const Kappa kappa = draw.kappa(grid.range());
        const auto set = JumpConstraintSet::build(kappa, grid);
        const bool aligned = draw.integer(0, 1) == 1;
        const double angle0 = draw.uniform(0.0, 6.283185307179586);
        std::vector<double> dir(static_cast<std::size_t>(2 * k));
        for (int i = 0; i < k; ++i) {
            const double angle = aligned ? angle0 : draw.uniform(0.0, 6.283185307179586);
            const double radius = draw.uniform(0.05, 1.0);
            dir[static_cast<std::size_t>(2 * i)] = radius * std::cos(angle);
            dir[static_cast<std::size_t>(2 * i + 1)] = radius * std::sin(angle);
        }
        auto scaled = [&](double t) {
            std::vector<double> out = dir;
            for (double& e : out) {
                e *= t;
            }
            return out;
        };
        const double limit = threshold(
            [&](double t) { return !check_jump(scaled(t), 2, set, 0.0).feasible(); }, 0.0,
            1e3 * kappa_value(kappa, grid.range()) / grid.h + 1.0);
        const std::vector<double> phi = scaled(straddle(draw, limit));
        const auto reduced = check_jump(phi, 2, set, 1e-9);
        const auto continuum = check_jump_continuum(phi, 2, kappa, grid, 21, 1e-9);
        ++res.cases;
        feasible += reduced.feasible() ? 1 : 0;
        if (reduced.feasible() != continuum.feasible()) {
            ++res.failures;
        }
        res.worst = std::max(res.worst, std::abs(reduced.max_violation - continuum.max_violation));
    }
    res.note = ratio_note(feasible, res.cases, "feasible");
    return res;
}

SuiteResult suite_min_pooling(std::uint64_t seed, int instances) {
    SuiteResult res{"constant duals: min-pooled capacities", 0, 0, 0.0, ""};
    Draw draw(seed);
    for (int inst = 0; inst < instances; ++inst) {
        const int ell = draw.integer(2, 8);
        ModelSpec spec;
        spec.grid = draw.grid(ell);
        spec.unaries.push_back(draw.unary(spec.grid, false));
        spec.reg.eta = Norm{draw.uniform(0.1, 2.0)};
        spec.reg.kappa = LinearJump{std::get<Norm>(spec.reg.eta).weight};
        spec.dual_mode = DualMode::PiecewiseConstant;
        const Model model = assemble_channel(spec, 0);
        const auto cap = capacity_constraints(model, 0);
        const auto& g = spec.grid;
        for (int i = 0; i < ell; ++i) {
            const double lo = i == 0 ? g.labels.front() : g.dual_nodes[static_cast<std::size_t>(i - 1)];
            const double hi = i == ell - 1 ? g.labels.back() : g.dual_nodes[static_cast<std::size_t>(i)];
            double sampled = kInf;
            const int n = 4001;
            for (int s = 0; s < n; ++s) {
                sampled = std::min(sampled, evaluate(spec.unaries.front(), lo + (hi - lo) * s / (n - 1)));
            }
            const double diff = sampled - cap[static_cast<std::size_t>(i)];
            ++res.cases;
            // The sampled minimum can only overshoot the exact one.
            if (diff < -1e-9 || diff > 1e-4) {
                ++res.failures;
            }
            res.worst = std::max(res.worst, std::abs(diff));
        }
    }
    res.note = "per-label capacities";
    return res;
}

SuiteResult suite_epigraph_split(std::uint64_t seed, int instances) {
    SuiteResult res{"interval constraints: epigraph split vs infimum", 0, 0, 0.0, ""};
    Draw draw(seed);
    int feasible = 0;
    for (int inst = 0; inst < instances; ++inst) {
        const int k = draw.integer(1, 5);
        const LabelGrid grid = draw.grid(k + 1);
        const UnaryModel unary = draw.unary(grid, true);
        const double quad = 1.0 / (4.0 * draw.uniform(0.2, 2.0));
        std::vector<double> eta_star(static_cast<std::size_t>(k));
        for (double& e : eta_star) {
            const double px = draw.normal();
            const double py = draw.normal();
            e = quad * (px * px + py * py) * draw.uniform(0.0, 0.5);
        }
        std::vector<double> base(static_cast<std::size_t>(k + 1));
        for (int i = 0; i <= k; ++i) {
            const double rho = evaluate(unary, grid.labels[static_cast<std::size_t>(i)]);
            base[static_cast<std::size_t>(i)] = -rho + 0.3 * (1.0 + std::abs(rho)) * draw.normal();
        }
        const std::vector<double> phi_t = shifted_duals(draw, base, eta_star, unary, grid);
        const auto sampled = check_linear_dual_feasibility(phi_t, eta_star, unary, grid, 201, 1e-6);
        const auto split = check_split_dual_feasibility(phi_t, eta_star, unary, grid, 1e-6);
        ++res.cases;
        feasible += split.feasible() ? 1 : 0;
        if (sampled.feasible() != split.feasible()) {
            ++res.failures;
            res.worst = std::max(res.worst, std::max(sampled.max_violation, split.max_violation));
        }
    }
    res.note = ratio_note(feasible, res.cases, "feasible");
    return res;
}

SuiteResult suite_tv_balls(std::uint64_t seed, int instances) {
    SuiteResult res{"total variation: constraint set vs per-interval balls", 0, 0, 0.0, ""};
    Draw draw(seed);
    int feasible = 0;
    DykstraWorkspace ws;
    for (int inst = 0; inst < instances; ++inst) {
        const int k = draw.integer(1, 6);
        const LabelGrid grid = draw.grid(k + 1);
        const double weight = draw.uniform(0.2, 2.0);
        const UnaryModel unary = draw.unary(grid, false);
        const auto set = JumpConstraintSet::build(LinearJump{weight}, grid);
        const EtaConjugate conj = eta_conjugate(Norm{weight});

        std::vector<double> phi(static_cast<std::size_t>(2 * k));
        const int outside = draw.integer(0, 1) == 1 ? draw.integer(0, k - 1) : -1;
        for (int i = 0; i < k; ++i) {
            const double angle = draw.uniform(0.0, 6.283185307179586);
            const double radius =
                weight * (i == outside ? draw.uniform(1.0001, 1.5) : draw.uniform(0.0, 0.9999));
            phi[static_cast<std::size_t>(2 * i)] = radius * std::cos(angle);
            phi[static_cast<std::size_t>(2 * i + 1)] = radius * std::sin(angle);
        }
        std::vector<double> base(static_cast<std::size_t>(k + 1));
        for (int i = 0; i <= k; ++i) {
            const double rho = evaluate(unary, grid.labels[static_cast<std::size_t>(i)]);
            base[static_cast<std::size_t>(i)] = -rho + 0.2 * (1.0 + std::abs(rho)) * draw.normal();
        }
        const std::vector<double> phi_t =
            shifted_duals(draw, base, std::vector<double>(static_cast<std::size_t>(k), 0.0), unary, grid);

        std::vector<double> eta_star(static_cast<std::size_t>(k));
        bool balls = true;
        for (int i = 0; i < k; ++i) {
            const double norm = std::hypot(phi[static_cast<std::size_t>(2 * i)],
                                           phi[static_cast<std::size_t>(2 * i + 1)]);
            eta_star[static_cast<std::size_t>(i)] = norm <= conj.radius ? 0.0 : kInf;
            balls = balls && norm <= weight;
        }
        const bool full = check_split_dual_feasibility(phi_t, eta_star, unary, grid, 1e-9).feasible() &&
                          check_jump(phi, 2, set, 1e-12).feasible();
        const std::vector<double> zeros(static_cast<std::size_t>(k), 0.0);
        const bool per_ball =
            balls && check_split_dual_feasibility(phi_t, zeros, unary, grid, 1e-9).feasible();
        ++res.cases;
        feasible += full ? 1 : 0;
        if (full != per_ball) {
            ++res.failures;
        }

        // The projection onto the regularizer set must reduce to radial clamps.
        std::vector<double> projected = phi;
        std::vector<double> b(static_cast<std::size_t>(k), 0.0);
        project_regularizer_set(projected, b, 2, conj, set, 1e-12, 1000, ws);
        for (int i = 0; i < k; ++i) {
            const double x = phi[static_cast<std::size_t>(2 * i)];
            const double y = phi[static_cast<std::size_t>(2 * i + 1)];
            const double shrink = std::min(1.0, weight / std::max(std::hypot(x, y), 1e-300));
            const double err = std::max(std::abs(projected[static_cast<std::size_t>(2 * i)] - shrink * x),
                                        std::abs(projected[static_cast<std::size_t>(2 * i + 1)] - shrink * y));
            res.worst = std::max(res.worst, err);
            if (err > 1e-9) {
                ++res.failures;
            }
        }
    }
    res.note = ratio_note(feasible, res.cases, "feasible");
    return res;
}

SuiteResult suite_dataterm_primal(std::uint64_t seed, int instances) {
    SuiteResult res{"data term: dual evaluation vs primal form", 0, 0, 0.0, ""};
    Draw draw(seed);
    for (int inst = 0; inst < instances; ++inst) {
        const int k = draw.integer(1, 3);
        const LabelGrid grid = build_grid(0.0, 1.0, k + 1);
        const UnaryModel unary = draw.unary(grid, false);
        std::vector<double> v(static_cast<std::size_t>(k));
        for (double& e : v) {
            e = draw.uniform(0.0, 1.0);
        }
        std::sort(v.begin(), v.end(), std::greater<>());
        const double primal = dataterm_primal_oracle(v, grid, unary, 41);
        const auto dual = dataterm_dual_eval(v, grid, unary, 40000);
        const double diff = std::abs(primal - dual.value);
        ++res.cases;
        if (!(diff <= 1e-3)) {
            ++res.failures;
        }
        res.worst = std::max(res.worst, diff);
    }
    res.note = "k <= 3";
    return res;
}

SuiteResult suite_infconv(std::uint64_t seed, int instances) {
    SuiteResult res{"two labels: lifted vs infimal convolution", 0, 0, 0.0, ""};
    Draw draw(seed);
    for (int inst = 0; inst < instances; ++inst) {
        ModelSpec spec;
        spec.width = 8;
        spec.height = 8;
        spec.grid = build_grid(0.0, 1.0, 2);
        const double step = draw.uniform(0.2, 0.6);
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) {
                const double base = x < 4 ? 0.3 : 0.3 + step;
                spec.unaries.emplace_back(QuadraticUnary{1.0, base + 0.1 * draw.normal()});
            }
        }
        spec.reg.eta = SquaredNorm{draw.uniform(0.2, 1.0)};
        spec.reg.kappa = ConstantJump{draw.uniform(0.05, 0.3)};
        spec.dual_mode = DualMode::PiecewiseLinear;
        const Model model = assemble_channel(spec, 0);
        SolverConfig cfg;
        cfg.max_iters = 100000;
        cfg.stop_tol = 1e-10;
        const auto lifted = run(model, cfg);
        const auto ref = infconv_reference_solve(model, cfg);
        double diff = 0.0;
        for (std::size_t p = 0; p < lifted.u.size(); ++p) {
            diff = std::max(diff, std::abs(lifted.u[p] - ref.u[p]));
        }
        ++res.cases;
        if (!(diff <= 1e-3)) {
            ++res.failures;
        }
        res.worst = std::max(res.worst, diff);
    }
    res.note = "8x8, quadratic eta, constant kappa";
    return res;
}

std::vector<SuiteResult> run_selftest(std::uint64_t seed) {
    return {
        suite_jump_reduction(seed + 1, 1000), suite_min_pooling(seed + 2, 200),
        suite_epigraph_split(seed + 3, 1000), suite_tv_balls(seed + 4, 1000),
        suite_dataterm_primal(seed + 5, 100), suite_infconv(seed + 6, 4),
    };
}

void print_selftest(std::ostream& out, const std::vector<SuiteResult>& results) {
    out << std::left << std::setw(54) << "suite" << std::setw(8) << "cases" << std::setw(10)
        << "failures" << std::setw(12) << "worst" << "status\n";
    for (const auto& r : results) {
        std::ostringstream worst;
        worst << std::scientific << std::setprecision(2) << r.worst;
        out << std::left << std::setw(54) << r.name << std::setw(8) << r.cases << std::setw(10)
            << r.failures << std::setw(12) << worst.str() << (r.passed() ? "pass" : "FAIL");
        if (!r.note.empty()) {
            out << "  (" << r.note << ")";
        }
        out << '\n';
    }
}

}  // namespace sublift
