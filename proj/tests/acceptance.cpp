// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Run from the repository root (reads data/).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "oracles.hpp"
#include "sublift/experiments.hpp"
#include "sublift/image_io.hpp"
#include "sublift/models.hpp"
#include "sublift/projections.hpp"
#include "sublift/solver.hpp"

#ifndef SUBLIFT_CLI_PATH
#define SUBLIFT_CLI_PATH "sublift"
#endif

using namespace sublift;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.141592653589793;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;
};

int failures = 0;

void report(int id, const std::string& title, const Verdict& v) {
    std::printf("criterion %2d %s  %s: %s\n", id, v.pass ? "PASS" : "FAIL", title.c_str(),
                v.detail.str().c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Sum (u - f)^2 + lambda * sum |grad u|^2 with forward differences.
double energy_q(const std::vector<double>& u, const std::vector<double>& f, int w, int h, double lambda) {
    double e = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto p = static_cast<std::size_t>(y * w + x);
            e += (u[p] - f[p]) * (u[p] - f[p]);
            if (x + 1 < w) e += lambda * std::pow(u[p + 1] - u[p], 2);
            if (y + 1 < h) e += lambda * std::pow(u[p + static_cast<std::size_t>(w)] - u[p], 2);
        }
    }
    return e;
}

double psnr_of(const std::vector<double>& a, const std::vector<double>& b) {
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mse += (a[i] - b[i]) * (a[i] - b[i]);
    }
    mse /= static_cast<double>(a.size());
    return 10.0 * std::log10(1.0 / mse);
}

// Smallest t in [lo, hi] with accept(t), for monotone accept.
double bisect(const std::function<bool(double)>& accept, double lo, double hi) {
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (accept(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    double normal() { return std::normal_distribution<double>()(gen_); }
    bool coin() { return integer(0, 1) == 1; }

    Kappa kappa(double range) {
        switch (integer(0, 3)) {
            case 0:
                return LinearJump{uniform(0.2, 2.0)};
            case 1:
                return ConstantJump{uniform(0.1, 2.0)};
            case 2:
                return TruncatedLinearJump{uniform(0.5, 3.0), uniform(0.1, 1.5)};
            default: {
                JumpTable t{{0.0}, {0.0}};
                double slope = uniform(0.5, 3.0);
                for (int m = integer(2, 5); m > 0; --m) {
                    const double step = uniform(0.05, 0.6) * range;
                    t.heights.push_back(t.heights.back() + step);
                    t.values.push_back(t.values.back() + slope * step);
                    slope *= uniform(0.1, 0.9);
                }
                return t;
            }
        }
    }

    UnaryModel unary(const LabelGrid& g, bool table) {
        switch (integer(0, table ? 2 : 1)) {
            case 0:
                return QuadraticUnary{uniform(0.2, 3.0), uniform(g.gamma_first - 0.2, g.gamma_last + 0.2)};
            case 1: {
                TruncatedQuadraticMixture mix;
                for (int m = integer(1, 3); m > 0; --m) {
                    mix.terms.push_back({uniform(0.05, 0.5), uniform(1.0, 20.0), uniform(g.gamma_first, g.gamma_last)});
                }
                return mix;
            }
            default: {
                SampledTable t;
                for (int s = 0; s < 25; ++s) {
                    t.t_samples.push_back(g.ghost_low + (g.ghost_high - g.ghost_low) * s / 24.0);
                    t.values.push_back(uniform(0.0, 1.0));
                }
                return t;
            }
        }
    }

private:
    std::mt19937_64 gen_;
};

// ---------------------------------------------------------------- 1 and 2

void convex_criteria() {
    const ImageBuffer img = load_image("data/convex64.pgm");
    const auto f = img.plane(0);
    const int w = img.width;
    const int h = img.height;
    const double lambda = 10.0;
    const auto direct = direct_quadratic_solve(f, w, h, lambda);
    const double e_direct = energy_q(direct.u, f, w, h, lambda);

    Verdict exact;
    exact.detail << "E_Q(direct)=" << e_direct;
    for (int ell : {2, 3, 5}) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto run = solve_quadratic_lifted(f, w, h, lambda, ell, DualMode::PiecewiseLinear, SolverConfig{});
        const double secs = elapsed(t0);
        const double rel = std::abs(energy_q(run.u, f, w, h, lambda) - e_direct) / e_direct;
        const bool ok = rel <= 1e-3 && secs <= 120.0;
        exact.pass = exact.pass && ok;
        exact.detail << "; l=" << ell << " rel=" << rel << " (" << secs << " s)";
    }
    report(1, "convex exactness, lambda=10, l in {2,3,5}, rel <= 1e-3, <= 2 min", exact);

    Verdict bias;
    SolverConfig base;
    base.max_iters = 100000;
    double previous = std::numeric_limits<double>::infinity();
    bias.detail << "ratios";
    for (int ell : {2, 3, 5, 16}) {
        const auto run = solve_quadratic_lifted(f, w, h, lambda, ell, DualMode::PiecewiseConstant, base);
        const double ratio = energy_q(run.u, f, w, h, lambda) / e_direct;
        bias.pass = bias.pass && ratio < previous && (ell != 2 || ratio >= 2.0);
        previous = ratio;
        bias.detail << " l=" << ell << ":" << ratio;
    }
    report(2, "classical label bias, ratio(2) >= 2 and strictly decreasing", bias);
}

// ---------------------------------------------------------------------- 3

// Every jump from a point at fraction a inside interval i to fraction b
// inside interval j, on a samples x samples grid.
bool continuum_feasible(const std::vector<double>& phi, int k, const Kappa& kappa, const LabelGrid& g,
                        int samples, double tol) {
    for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
            for (int sa = 0; sa < samples; ++sa) {
                const double a = static_cast<double>(sa) / (samples - 1);
                for (int sb = 0; sb < samples; ++sb) {
                    const double b = static_cast<double>(sb) / (samples - 1);
                    double sx = 0.0;
                    double sy = 0.0;
                    double height = 0.0;
                    if (i == j) {
                        if (b < a) {
                            continue;
                        }
                        sx = (b - a) * phi[static_cast<std::size_t>(2 * i)];
                        sy = (b - a) * phi[static_cast<std::size_t>(2 * i + 1)];
                        height = (b - a) * g.h;
                    } else {
                        for (int l = i; l <= j; ++l) {
                            const double wgt = l == i ? 1.0 - a : (l == j ? b : 1.0);
                            sx += wgt * phi[static_cast<std::size_t>(2 * l)];
                            sy += wgt * phi[static_cast<std::size_t>(2 * l + 1)];
                        }
                        height = (g.labels[static_cast<std::size_t>(j)] + b * g.h) -
                                 (g.labels[static_cast<std::size_t>(i)] + a * g.h);
                    }
                    if (height <= 0.0) {
                        continue;
                    }
                    if (std::hypot(sx, sy) > kappa_value(kappa, height) / g.h + tol) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

void jump_criterion() {
    Rng rng(101);
    Verdict v;
    int mismatches = 0;
    int feasible = 0;
    const int n = 1000;
    for (int inst = 0; inst < n; ++inst) {
        const int k = rng.integer(1, 6);
        const double lo = rng.uniform(-1.0, 1.0);
        const LabelGrid g = build_grid(lo, lo + rng.uniform(0.5, 3.0), k + 1);
        const Kappa kappa = rng.kappa(g.range());
        std::vector<double> dir(static_cast<std::size_t>(2 * k));
        const bool aligned = rng.coin();
        const double a0 = rng.uniform(0.0, 2.0 * kPi);
        for (int i = 0; i < k; ++i) {
            const double ang = aligned ? a0 : rng.uniform(0.0, 2.0 * kPi);
            const double r = rng.uniform(0.05, 1.0);
            dir[static_cast<std::size_t>(2 * i)] = r * std::cos(ang);
            dir[static_cast<std::size_t>(2 * i + 1)] = r * std::sin(ang);
        }
        auto scaled = [&](double t) {
            auto out = dir;
            for (double& e : out) e *= t;
            return out;
        };
        const double edge = bisect(
            [&](double t) { return !continuum_feasible(scaled(t), k, kappa, g, 21, 0.0); }, 0.0,
            1e3 * kappa_value(kappa, g.range()) / g.h + 1.0);
        const double margin = rng.uniform(1e-4, 0.3);
        const auto phi = scaled(rng.coin() ? edge * (1.0 + margin) : edge * (1.0 - margin));
        const auto set = JumpConstraintSet::build(kappa, g);
        const bool reduced = check_jump(phi, 2, set, 1e-9).feasible();
        const bool full = continuum_feasible(phi, k, kappa, g, 21, 1e-9);
        feasible += full ? 1 : 0;
        mismatches += reduced != full ? 1 : 0;
    }
    v.pass = mismatches == 0;
    v.detail << mismatches << " counterexamples in " << n << " instances (" << feasible << " feasible)";
    report(3, "partial-sum jump constraints <=> continuum (a, b) family, tol 1e-9", v);
}

// ---------------------------------------------------------------------- 4

// Candidate points where the interpolated constraint can attain its minimum.
std::vector<double> critical_points(const UnaryModel& u, double lo, double hi) {
    std::vector<double> pts;
    for (int s = 0; s <= 4000; ++s) {
        pts.push_back(lo + (hi - lo) * s / 4000.0);
    }
    if (const auto* t = std::get_if<SampledTable>(&u)) {
        for (double x : t->t_samples) pts.push_back(x);
    } else if (const auto* m = std::get_if<TruncatedQuadraticMixture>(&u)) {
        for (const auto& term : m->terms) {
            const double r = std::sqrt(term.nu / term.alpha);
            for (double x : {term.f - r, term.f, term.f + r}) pts.push_back(x);
        }
    } else {
        pts.push_back(std::get<QuadraticUnary>(u).target);
    }
    std::vector<double> inside;
    for (double x : pts) {
        if (x >= lo && x <= hi) inside.push_back(x);
    }
    return inside;
}

// Smallest slack of inf_t [interpolant(t) + rho(t)] - eta*_i over all intervals.
// Quadratic pieces can also attain the minimum between critical points,
// so every sample is polished by a short golden search.
double interval_slack(const std::vector<double>& phi_t, const std::vector<double>& eta_star, const UnaryModel& u,
                      const LabelGrid& g) {
    double worst = oracle::kInf;
    for (int i = 0; i < g.k; ++i) {
        const double lo = g.interval_lo(i);
        const double hi = g.interval_hi(i);
        auto F = [&](double t) {
            return phi_t[static_cast<std::size_t>(i)] * (hi - t) / g.h +
                   phi_t[static_cast<std::size_t>(i) + 1] * (t - lo) / g.h + evaluate(u, t);
        };
        double best = oracle::kInf;
        double best_t = lo;
        for (double t : critical_points(u, lo, hi)) {
            if (F(t) < best) {
                best = F(t);
                best_t = t;
            }
        }
        double a = std::max(lo, best_t - (hi - lo) / 4000.0);
        double b = std::min(hi, best_t + (hi - lo) / 4000.0);
        for (int it = 0; it < 60; ++it) {
            const double x1 = b - 0.618 * (b - a);
            const double x2 = a + 0.618 * (b - a);
            if (F(x1) < F(x2)) b = x2; else a = x1;
        }
        best = std::min(best, F(0.5 * (a + b)));
        worst = std::min(worst, best - eta_star[static_cast<std::size_t>(i)]);
    }
    return worst;
}

// Base duals shifted uniformly to a random side of the feasibility edge.
std::vector<double> near_edge_duals(Rng& rng, const LabelGrid& g, const UnaryModel& u,
                                    const std::vector<double>& eta_star, double spread) {
    std::vector<double> base(static_cast<std::size_t>(g.k + 1));
    double scale = 1.0;
    for (int i = 0; i <= g.k; ++i) {
        const double rho = evaluate(u, g.labels[static_cast<std::size_t>(i)]);
        base[static_cast<std::size_t>(i)] = -rho + spread * (1.0 + std::abs(rho)) * rng.normal();
        scale = std::max(scale, std::abs(base[static_cast<std::size_t>(i)]));
    }
    for (double e : eta_star) scale = std::max(scale, std::abs(e));
    auto moved = [&](double c) {
        auto out = base;
        for (double& e : out) e += c;
        return out;
    };
    const double edge =
        bisect([&](double c) { return interval_slack(moved(c), eta_star, u, g) >= 0.0; }, -100.0 * scale, 100.0 * scale);
    const double margin = rng.uniform(1e-4, 0.3) * (1.0 + std::abs(edge));
    return moved(rng.coin() ? edge + margin : edge - margin);
}

void split_criterion() {
    Rng rng(202);
    Verdict v;
    int mismatches = 0;
    int feasible = 0;
    const int n = 1000;
    for (int inst = 0; inst < n; ++inst) {
        const int k = rng.integer(1, 5);
        const double lo = rng.uniform(-1.0, 1.0);
        const LabelGrid g = build_grid(lo, lo + rng.uniform(0.5, 3.0), k + 1);
        const UnaryModel u = rng.unary(g, true);
        const double quad = 1.0 / (4.0 * rng.uniform(0.2, 2.0));
        std::vector<double> eta_star(static_cast<std::size_t>(k));
        for (double& e : eta_star) {
            const double px = rng.normal();
            const double py = rng.normal();
            e = quad * (px * px + py * py) * rng.uniform(0.0, 0.5);
        }
        const auto phi_t = near_edge_duals(rng, g, u, eta_star, 0.3);
        const bool sampled = interval_slack(phi_t, eta_star, u, g) >= -1e-6;
        const bool split = check_split_dual_feasibility(phi_t, eta_star, u, g, 1e-6).feasible();
        feasible += split ? 1 : 0;
        mismatches += sampled != split ? 1 : 0;
    }
    v.pass = mismatches == 0;
    v.detail << mismatches << " mismatches in " << n << " duals (" << feasible << " feasible)";
    report(4, "epigraph split form <=> sampled infimum form, tol 1e-6", v);
}

// ---------------------------------------------------------------------- 5

void tv_criterion() {
    Rng rng(303);
    Verdict v;
    int mismatches = 0;
    int feasible = 0;
    double worst_proj = 0.0;
    const int n = 1000;
    DykstraWorkspace ws;
    for (int inst = 0; inst < n; ++inst) {
        const int k = rng.integer(1, 6);
        const double lo = rng.uniform(-1.0, 1.0);
        const LabelGrid g = build_grid(lo, lo + rng.uniform(0.5, 3.0), k + 1);
        const double wgt = rng.uniform(0.2, 2.0);
        const UnaryModel u = rng.unary(g, false);
        std::vector<double> phi(static_cast<std::size_t>(2 * k));
        const int outside = rng.coin() ? rng.integer(0, k - 1) : -1;
        for (int i = 0; i < k; ++i) {
            const double ang = rng.uniform(0.0, 2.0 * kPi);
            const double r = wgt * (i == outside ? rng.uniform(1.0001, 1.5) : rng.uniform(0.0, 0.9999));
            phi[static_cast<std::size_t>(2 * i)] = r * std::cos(ang);
            phi[static_cast<std::size_t>(2 * i + 1)] = r * std::sin(ang);
        }
        const std::vector<double> zeros(static_cast<std::size_t>(k), 0.0);
        const auto phi_t = near_edge_duals(rng, g, u, zeros, 0.2);

        // The full set: interval constraints with eta* = indicator of the
        // weight ball, and every partial-sum jump constraint of kappa = w a.
        const EtaConjugate conj = eta_conjugate(Norm{wgt});
        const auto set = JumpConstraintSet::build(LinearJump{wgt}, g);
        std::vector<double> eta_star(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            const double r = std::hypot(phi[static_cast<std::size_t>(2 * i)], phi[static_cast<std::size_t>(2 * i + 1)]);
            eta_star[static_cast<std::size_t>(i)] = r <= conj.radius ? 0.0 : oracle::kInf;
        }
        const bool full = check_split_dual_feasibility(phi_t, eta_star, u, g, 1e-9).feasible() &&
                          check_jump(phi, 2, set, 1e-12).feasible();
        bool balls = interval_slack(phi_t, zeros, u, g) >= -1e-9;
        for (int i = 0; i < k; ++i) {
            balls = balls && std::hypot(phi[static_cast<std::size_t>(2 * i)], phi[static_cast<std::size_t>(2 * i + 1)]) <= wgt;
        }
        feasible += full ? 1 : 0;
        mismatches += full != balls ? 1 : 0;

        std::vector<double> p = phi;
        std::vector<double> b(static_cast<std::size_t>(k), 0.0);
        project_regularizer_set(p, b, 2, conj, set, 1e-12, 1000, ws);
        for (int i = 0; i < k; ++i) {
            const double x = phi[static_cast<std::size_t>(2 * i)];
            const double y = phi[static_cast<std::size_t>(2 * i + 1)];
            const double s = std::min(1.0, wgt / std::hypot(x, y));
            worst_proj = std::max({worst_proj, std::abs(p[static_cast<std::size_t>(2 * i)] - s * x),
                                   std::abs(p[static_cast<std::size_t>(2 * i + 1)] - s * y)});
        }
    }
    v.pass = mismatches == 0 && worst_proj <= 1e-9;
    v.detail << mismatches << " mismatches in " << n << " duals (" << feasible
             << " feasible); projection vs radial clamp max dev " << worst_proj;
    report(5, "total variation constraint set <=> per-entry balls", v);
}

// ---------------------------------------------------------------------- 6

void dataterm_criterion() {
    Rng rng(404);
    Verdict v;
    double worst = 0.0;
    int bad = 0;
    const int n = 100;
    for (int inst = 0; inst < n; ++inst) {
        const int k = rng.integer(1, 3);
        const LabelGrid g = build_grid(0.0, 1.0, k + 1);
        const UnaryModel u = rng.unary(g, false);
        std::vector<double> vh(static_cast<std::size_t>(k));
        for (double& e : vh) e = rng.uniform(0.0, 1.0);
        std::sort(vh.begin(), vh.end(), std::greater<>());
        const double primal = dataterm_primal_oracle(vh, g, u, 200);
        const double dual = dataterm_dual_eval(vh, g, u, 40000).value;
        const double diff = std::abs(primal - dual);
        worst = std::max(worst, diff);
        bad += diff <= 1e-3 ? 0 : 1;
    }
    v.pass = bad == 0;
    v.detail << bad << " of " << n << " instances off by more than 1e-3; worst " << worst;
    report(6, "dual data term == brute-force primal form, k <= 3", v);
}

// ---------------------------------------------------------------------- 7

// Projected gradient on sum (u - f)^2 + sum huber(|grad u|) over [0, 1],
// huber = alpha |g|^2 below lambda / (2 alpha), lambda |g| - lambda^2/(4 alpha) above.
std::vector<double> huber_solve(const std::vector<double>& f, int w, int h, double alpha, double lambda) {
    const double knee = lambda / (2.0 * alpha);
    const double step = 1.0 / (2.0 + 16.0 * alpha);
    std::vector<double> u = f;
    std::vector<double> grad(u.size());
    for (int it = 0; it < 200000; ++it) {
        for (std::size_t p = 0; p < u.size(); ++p) grad[p] = 2.0 * (u[p] - f[p]);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto p = static_cast<std::size_t>(y * w + x);
                const double gx = x + 1 < w ? u[p + 1] - u[p] : 0.0;
                const double gy = y + 1 < h ? u[p + static_cast<std::size_t>(w)] - u[p] : 0.0;
                const double norm = std::hypot(gx, gy);
                const double scale = norm <= knee ? 2.0 * alpha : lambda / norm;
                if (x + 1 < w) {
                    grad[p + 1] += scale * gx;
                    grad[p] -= scale * gx;
                }
                if (y + 1 < h) {
                    grad[p + static_cast<std::size_t>(w)] += scale * gy;
                    grad[p] -= scale * gy;
                }
            }
        }
        double change = 0.0;
        for (std::size_t p = 0; p < u.size(); ++p) {
            const double next = std::clamp(u[p] - step * grad[p], 0.0, 1.0);
            change = std::max(change, std::abs(next - u[p]));
            u[p] = next;
        }
        if (change < 1e-13) break;
    }
    return u;
}

void infconv_criterion() {
    Rng rng(505);
    Verdict v;
    double worst = 0.0;
    for (int inst = 0; inst < 4; ++inst) {
        const double alpha = rng.uniform(0.5, 3.0);
        const double lambda = rng.uniform(0.05, 0.5);
        ModelSpec spec;
        spec.width = 8;
        spec.height = 8;
        spec.grid = build_grid(0.0, 1.0, 2);
        std::vector<double> f(64);
        for (double& e : f) {
            e = rng.uniform(-0.1, 1.1);
            spec.unaries.push_back(QuadraticUnary{1.0, e});
        }
        spec.reg.eta = SquaredNorm{alpha};
        spec.reg.kappa = ConstantJump{lambda};
        SolverConfig cfg;
        cfg.max_iters = 200000;
        cfg.stop_tol = 1e-11;
        const auto lifted = run(assemble_channel(spec, 0), cfg);
        const auto ref = huber_solve(f, 8, 8, alpha, lambda);
        for (std::size_t p = 0; p < ref.size(); ++p) worst = std::max(worst, std::abs(lifted.u[p] - ref[p]));
    }
    v.pass = worst <= 1e-3;
    v.detail << "max-abs difference " << worst << " over 4 instances (8x8)";
    report(7, "two-label lift == Huber (infimal convolution) solve, 1e-3", v);
}

// ---------------------------------------------------------------------- 8

struct ProjStats {
    double idem = 0.0;
    double expand = 0.0;  // max of |P x - P y| - |x - y|
    double member = 0.0;
    double oracle = 0.0;
    int cases = 0;
    [[nodiscard]] bool pass() const { return idem <= 1e-10 && expand <= 1e-9 && member <= 1e-8 && oracle <= 1e-4; }
};

void projection_criterion() {
    Rng rng(606);
    const char* names[] = {"parabola", "interval quadratic", "max of pieces", "piecewise linear", "eta epigraph",
                           "jump set"};
    ProjStats all[6];
    auto d2 = [](EpigraphPoint a, EpigraphPoint b) { return std::hypot(a.slope - b.slope, a.height - b.height); };

    // Planar epigraph projections: parabola, interval quadratic, several
    // pieces, piecewise linear. Each is described by its projection and the
    // boundary function it projects onto.
    for (int inst = 0; inst < 300; ++inst) {
        const int kind = inst % 4;
        ProjStats& st = all[kind];
        std::function<EpigraphPoint(EpigraphPoint)> P;
        std::function<double(double)> g;
        std::vector<QuadPiece> pieces;
        std::vector<CostPoint> hull;
        if (kind == 0) {
            const double c = rng.uniform(0.1, 3.0);
            const ParabolaShift sh{rng.normal(), rng.normal()};
            P = [=](EpigraphPoint p) { return project_epi_parabola(p, c, sh); };
            g = [=](double s) { return c * (s - sh.center) * (s - sh.center) + sh.offset; };
        } else if (kind == 1 || kind == 2) {
            const double lo = rng.normal();
            const int count = kind == 1 ? 1 : rng.integer(2, 4);
            double at = lo;
            for (int m = 0; m < count; ++m) {
                const double len = rng.uniform(0.05, 1.0);
                pieces.push_back({rng.coin() ? 0.0 : rng.uniform(0.1, 4.0), rng.normal(), rng.normal(), at, at + len});
                at += len * rng.uniform(0.3, 1.0);  // overlapping pieces are allowed
            }
            P = [pieces](EpigraphPoint p) { return project_epi_max(p, pieces).point; };
            g = [pieces](double s) {
                double best = -oracle::kInf;
                for (const auto& q : pieces) {
                    best = std::max(best, oracle::conjugate([&](double t) { return q(t); }, q.lo, q.hi, s, 201));
                }
                return best;
            };
        } else {
            std::vector<oracle::Point2> pts;
            double t = rng.normal();
            for (int m = 0; m < rng.integer(2, 8); ++m) {
                pts.push_back({t, rng.normal()});
                t += rng.uniform(0.05, 1.0);
            }
            for (const auto& p : oracle::lower_hull(pts)) hull.push_back({p.s, p.r});
            P = [hull](EpigraphPoint p) { return project_epi_pwl(p, hull); };
            g = [hull](double s) {
                double best = -oracle::kInf;
                for (const auto& c : hull) best = std::max(best, s * c.t - c.value);
                return best;
            };
        }
        const EpigraphPoint x{3.0 * rng.normal(), 3.0 * rng.normal()};
        const EpigraphPoint y{3.0 * rng.normal(), 3.0 * rng.normal()};
        const EpigraphPoint px = P(x);
        const EpigraphPoint py = P(y);
        st.idem = std::max(st.idem, d2(P(px), px));
        st.expand = std::max(st.expand, d2(px, py) - d2(x, y));
        st.member = std::max(st.member, g(px.slope) - px.height);
        const double above = std::max(0.0, g(x.slope) - x.height);
        oracle::Point2 want{x.slope, x.height};
        if (above > 0.0) {
            want = oracle::nearest_on_graph({x.slope, x.height}, g, x.slope - above, x.slope + above, 2001);
        }
        st.oracle = std::max(st.oracle, oracle::dist({px.slope, px.height}, want));
        ++st.cases;
    }

    // Epigraph of eta* in R^2 x R.
    for (int inst = 0; inst < 200; ++inst) {
        ProjStats& st = all[4];
        const EtaConjugate conj{rng.uniform(0.0, 2.0), rng.coin() ? oracle::kInf : rng.uniform(0.2, 2.0)};
        auto P = [&](std::array<double, 3> z) {
            std::vector<double> p{z[0], z[1]};
            double b = z[2];
            project_epi_eta(p, b, conj, oracle::kInf);
            return std::array<double, 3>{p[0], p[1], b};
        };
        auto dist3 = [](std::array<double, 3> a, std::array<double, 3> b) {
            return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
        };
        const std::array<double, 3> x{2.0 * rng.normal(), 2.0 * rng.normal(), 2.0 * rng.normal()};
        const std::array<double, 3> y{2.0 * rng.normal(), 2.0 * rng.normal(), 2.0 * rng.normal()};
        const auto px = P(x);
        const auto py = P(y);
        st.idem = std::max(st.idem, dist3(P(px), px));
        st.expand = std::max(st.expand, dist3(px, py) - dist3(x, y));
        const double r = std::hypot(px[0], px[1]);
        st.member = std::max({st.member, conj.quad * r * r - px[2], r - conj.radius});
        // Planar oracle in (signed radius, b).
        const double rho = std::hypot(x[0], x[1]);
        const double R = std::min(conj.radius, 1e3);
        oracle::Point2 want{rho, x[2]};
        if (!(rho <= conj.radius && x[2] >= conj.quad * rho * rho)) {
            want = oracle::nearest_on_graph({rho, x[2]}, [&](double s) { return conj.quad * s * s; }, -R, std::min(R, rho + 10.0),
                                            200001);
            if (std::isfinite(conj.radius)) {
                const oracle::Point2 ray{conj.radius, std::max(x[2], conj.quad * conj.radius * conj.radius)};
                if (oracle::dist({rho, x[2]}, ray) < oracle::dist({rho, x[2]}, want)) want = ray;
            }
        }
        st.oracle = std::max(st.oracle, std::hypot(r - want.s, px[2] - want.r));
        ++st.cases;
    }

    // Jump constraint projections: exact polytope oracle for scalar fluxes
    // with three intervals; idempotence and nonexpansiveness for vector fluxes.
    for (int inst = 0; inst < 200; ++inst) {
        ProjStats& st = all[5];
        const int k = inst < 100 ? 3 : rng.integer(1, 6);
        const int n = inst < 100 ? 1 : 2;
        const LabelGrid g = build_grid(0.0, rng.uniform(0.5, 2.0), k + 1);
        const Kappa kappa = rng.kappa(g.range());
        const auto set = JumpConstraintSet::build(kappa, g);
        auto P = [&](std::vector<double> z) {
            project_jump(z, n, set, 1e-12, 100000);
            return z;
        };
        std::vector<double> x(static_cast<std::size_t>(k * n));
        std::vector<double> y(x.size());
        for (std::size_t e = 0; e < x.size(); ++e) {
            x[e] = 2.0 * rng.normal();
            y[e] = 2.0 * rng.normal();
        }
        auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
            double s = 0.0;
            for (std::size_t e = 0; e < a.size(); ++e) s += (a[e] - b[e]) * (a[e] - b[e]);
            return std::sqrt(s);
        };
        const auto px = P(x);
        const auto py = P(y);
        st.idem = std::max(st.idem, dist(P(px), px));
        st.expand = std::max(st.expand, dist(px, py) - dist(x, y));
        st.member = std::max(st.member, check_jump(px, n, set, 0.0).max_violation);
        if (n == 1) {
            std::vector<std::array<double, 3>> A;
            std::vector<double> c;
            for (int i = 0; i < 3; ++i) {
                for (int j = i; j < 3; ++j) {
                    std::array<double, 3> row{};
                    for (int l = i; l <= j; ++l) row[static_cast<std::size_t>(l)] = 1.0;
                    A.push_back(row);
                    A.push_back({-row[0], -row[1], -row[2]});
                    c.push_back(set.bound(i, j));
                    c.push_back(set.bound(i, j));
                }
            }
            const auto want = oracle::project_polytope3({x[0], x[1], x[2]}, A, c);
            st.oracle = std::max(st.oracle, std::hypot(px[0] - want[0], px[1] - want[1], px[2] - want[2]));
        }
        ++st.cases;
    }

    Verdict v;
    int cases = 0;
    for (int f = 0; f < 6; ++f) {
        const ProjStats& st = all[f];
        v.pass = v.pass && st.pass();
        cases += st.cases;
        v.detail << names[f] << " (" << st.cases << "): idem " << st.idem << " expand " << st.expand << " member "
                 << st.member << " oracle " << st.oracle << (st.pass() ? "; " : " [fail]; ");
    }
    v.detail << cases << " instances";
    report(8, "projections: idempotent 1e-10, nonexpansive, member 1e-8, oracle 1e-4", v);
}

// ---------------------------------------------------------------------- 9

void ramp_criterion() {
    const auto ramp = ramp_signal(128, 0.05, 0.95);
    const LabelGrid g = build_grid(0.0, 1.0, 4);
    auto score = [&](const std::vector<double>& u) {
        int near = 0;
        for (double x : u) {
            for (double l : g.labels) {
                if (std::abs(x - l) <= g.h / 100.0) {
                    ++near;
                    break;
                }
            }
        }
        return static_cast<double>(near) / static_cast<double>(u.size());
    };
    SolverConfig base;
    base.max_iters = 100000;
    const auto lin = run_ramp(ramp, 0.02, 4, DualMode::PiecewiseLinear, SolverConfig{});
    const auto con = run_ramp(ramp, 0.02, 4, DualMode::PiecewiseConstant, base);
    double dev = 0.0;
    for (std::size_t i = 0; i < ramp.size(); ++i) dev = std::max(dev, std::abs(lin.u[i] - ramp[i]));
    const double s_lin = score(lin.u);
    const double s_con = score(con.u);
    Verdict v;
    v.pass = dev <= 0.02 && s_lin <= 0.2 && s_con >= 0.9;
    v.detail << "proposed max dev " << dev << ", bias " << s_lin << "; baseline bias " << s_con;
    report(9, "clean ramp, l=4: proposed dev <= 2%, bias <= 0.2; baseline bias >= 0.9", v);
}

// --------------------------------------------------------------------- 10

void denoise_criterion() {
    const ImageBuffer clean = load_image("data/phantom64.ppm");
    ImageBuffer noisy = clean;
    add_gaussian_noise(noisy.values, 0.3, 1);
    DenoiseParams params;
    params.smooth_weight = 5.0;
    params.jump_cost = 0.2;
    SolverConfig base;
    base.max_iters = 100000;
    std::vector<std::vector<double>> lin(3);
    std::vector<double> con2;
    Verdict v;
    for (int ell : {2, 4, 6}) {
        const auto run = run_denoise(noisy, nullptr, params, ell, DualMode::PiecewiseLinear, SolverConfig{});
        for (int c = 0; c < 3; ++c) {
            lin[static_cast<std::size_t>(c)].push_back(psnr_of(run.output.plane(c), clean.plane(c)));
        }
    }
    const auto b2 = run_denoise(noisy, nullptr, params, 2, DualMode::PiecewiseConstant, base);
    for (int c = 0; c < 3; ++c) {
        const auto& p = lin[static_cast<std::size_t>(c)];
        const double b = psnr_of(b2.output.plane(c), clean.plane(c));
        v.pass = v.pass && p[1] >= p[0] && p[2] >= p[1] && p[0] >= b + 5.0;
        v.detail << (c ? "; " : "") << "channel " << c << " proposed " << p[0] << "/" << p[1] << "/" << p[2]
                 << " dB, baseline l=2 " << b << " dB";
    }
    report(10, "denoising: PSNR nondecreasing in l per channel, >= baseline + 5 dB at l=2", v);
}

// --------------------------------------------------------------------- 11

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism_criterion() {
    const fs::path root = fs::temp_directory_path() / "sublift_acceptance";
    fs::remove_all(root);
    const std::string cli = SUBLIFT_CLI_PATH;
    const std::vector<std::string> commands{
        "ramp-bias",
        "convex-exact --labels 2,3 --baseline_labels 2,5 --max_iters 400 --baseline_max_iters 400",
        "denoise --phantom_size 16 --labels 2,4",
    };
    Verdict v;
    int compared = 0;
    for (std::size_t c = 0; c < commands.size(); ++c) {
        std::vector<fs::path> dirs;
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = root / ("cmd" + std::to_string(c) + "_run" + std::to_string(rep));
            const std::string line = cli + " " + commands[c] + " --output_dir " + dir.string() + " > /dev/null";
            // Exit status 3 only reports that max_iters was reached.
            const int status = std::system(line.c_str());
            if (!WIFEXITED(status) || (WEXITSTATUS(status) != 0 && WEXITSTATUS(status) != 3)) {
                v.pass = false;
                v.detail << "'" << commands[c] << "' failed; ";
            }
            dirs.push_back(dir);
        }
        if (!fs::exists(dirs[0])) continue;
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            if (entry.path().extension() != ".csv") continue;
            const fs::path other = dirs[1] / entry.path().filename();
            ++compared;
            if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
                v.pass = false;
                v.detail << entry.path().filename().string() << " differs; ";
            }
        }
    }
    v.pass = v.pass && compared > 0;
    v.detail << compared << " CSV files compared across repeated runs";
    fs::remove_all(root);
    report(11, "determinism: byte-identical CSV diagnostics", v);
}

}  // namespace

int main(int argc, char** argv) {
    // Optional: run a subset, e.g. "acceptance 3 4 8".
    std::vector<int> only;
    for (int a = 1; a < argc; ++a) only.push_back(std::atoi(argv[a]));
    auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

    if (want(1) || want(2)) convex_criteria();
    if (want(3)) jump_criterion();
    if (want(4)) split_criterion();
    if (want(5)) tv_criterion();
    if (want(6)) dataterm_criterion();
    if (want(7)) infconv_criterion();
    if (want(8)) projection_criterion();
    if (want(9)) ramp_criterion();
    if (want(10)) denoise_criterion();
    if (want(11)) determinism_criterion();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
