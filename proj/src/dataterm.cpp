#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sublift/models.hpp"

namespace sublift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kEnvelopeSamples = 513;

// rho_i** sampled on a uniform grid over each interval, linearly
// interpolated in between.
class EnvelopeTable {
public:
    EnvelopeTable(const UnaryModel& unary, const LabelGrid& grid) : grid_(grid) {
        values_.resize(static_cast<std::size_t>(grid.k) * kEnvelopeSamples);
        for (int i = 0; i < grid.k; ++i) {
            for (int m = 0; m < kEnvelopeSamples; ++m) {
                const double t = grid.interval_lo(i) + grid.h * m / (kEnvelopeSamples - 1);
                values_[static_cast<std::size_t>(i) * kEnvelopeSamples + static_cast<std::size_t>(m)] =
                    convex_envelope_eval(unary, i, grid, std::min(t, grid.interval_hi(i)));
            }
        }
    }

    [[nodiscard]] double operator()(int i, double t) const {
        const double pos = std::clamp((t - grid_.interval_lo(i)) / grid_.h, 0.0, 1.0) *
                           (kEnvelopeSamples - 1);
        const int m = std::min(static_cast<int>(pos), kEnvelopeSamples - 2);
        const double w = pos - m;
        const double* row = values_.data() + static_cast<std::size_t>(i) * kEnvelopeSamples;
        return (1.0 - w) * row[m] + w * row[m + 1];
    }

private:
    const LabelGrid& grid_;
    std::vector<double> values_;
};

}  // namespace

double dataterm_primal_oracle(std::span<const double> v_hat, const LabelGrid& grid,
                              const UnaryModel& unary, int resolution) {
    const int k = grid.k;
    if (v_hat.size() != static_cast<std::size_t>(k)) {
        throw std::invalid_argument("dataterm_primal_oracle: v_hat must have k entries");
    }
    if (k - 1 > 3) {
        throw std::invalid_argument("dataterm_primal_oracle: brute force limited to k <= 4");
    }
    constexpr double eps = 1e-12;
    for (int i = 0; i < k; ++i) {
        const double v = v_hat[static_cast<std::size_t>(i)];
        if (v < -eps || v > 1.0 + eps) {
            return kInf;
        }
        if (i > 0 && v > v_hat[static_cast<std::size_t>(i) - 1] + eps) {
            return kInf;
        }
    }
    const EnvelopeTable envelope(unary, grid);
    const auto integ = integration_operator(grid);
    const auto uk = static_cast<std::size_t>(k);

    // Free variables: tail sums s_j = sum_{i >= j} x_i for j = 1..k-1, each
    // confined to [v_hat_j, v_hat_{j-1}] so that every y_i / x_i lies in
    // its interval. x and y follow from the constraint v_hat = y/h + I^T x.
    const int dims = k - 1;
    std::vector<double> lo(static_cast<std::size_t>(dims));
    std::vector<double> hi(static_cast<std::size_t>(dims));
    for (int j = 1; j < k; ++j) {
        lo[static_cast<std::size_t>(j) - 1] = std::clamp(v_hat[static_cast<std::size_t>(j)], 0.0, 1.0);
        hi[static_cast<std::size_t>(j) - 1] = std::clamp(v_hat[static_cast<std::size_t>(j) - 1], 0.0, 1.0);
    }

    std::vector<double> x(uk);
    std::vector<double> tail(uk + 1);
    auto cost = [&](const std::vector<double>& s) {
        tail[0] = 1.0;
        for (int j = 1; j < k; ++j) {
            tail[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j) - 1];
        }
        tail[uk] = 0.0;
        for (std::size_t i = 0; i < uk; ++i) {
            x[i] = std::max(0.0, tail[i] - tail[i + 1]);
        }
        double total = 0.0;
        for (std::size_t i = 0; i < uk; ++i) {
            double it_x = 0.0;  // (I^T x)_i
            for (std::size_t r = 0; r < uk; ++r) {
                it_x += integ[r * uk + i] * x[r];
            }
            const double y = grid.h * (v_hat[i] - it_x);
            if (x[i] <= 0.0) {
                continue;  // y_i = 0 by the bounds on the tail sums
            }
            total += x[i] * envelope(static_cast<int>(i), y / x[i]);
        }
        return total;
    };

    if (dims == 0) {
        return cost({});
    }

    std::vector<double> best_s(static_cast<std::size_t>(dims));
    double best = kInf;
    std::vector<double> s(static_cast<std::size_t>(dims));
    std::vector<int> idx(static_cast<std::size_t>(dims));
    auto scan = [&](const std::vector<double>& a, const std::vector<double>& b, int points) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            for (int d = 0; d < dims; ++d) {
                const auto ud = static_cast<std::size_t>(d);
                s[ud] = points == 1 ? a[ud] : a[ud] + (b[ud] - a[ud]) * idx[ud] / (points - 1);
            }
            const double c = cost(s);
            if (c < best) {
                best = c;
                best_s = s;
            }
            int d = 0;
            while (d < dims && ++idx[static_cast<std::size_t>(d)] == points) {
                idx[static_cast<std::size_t>(d)] = 0;
                ++d;
            }
            if (d == dims) {
                break;
            }
        }
    };

    const int points = std::max(resolution, 2);
    scan(lo, hi, points);
    std::vector<double> width(static_cast<std::size_t>(dims));
    for (int d = 0; d < dims; ++d) {
        width[static_cast<std::size_t>(d)] =
            (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]) / (points - 1);
    }
    // The objective is convex in the tail sums; shrink a box around the
    // incumbent.
    constexpr int kZoomPoints = 21;
    for (int round = 0; round < 40; ++round) {
        std::vector<double> a(static_cast<std::size_t>(dims));
        std::vector<double> b(static_cast<std::size_t>(dims));
        double largest = 0.0;
        for (int d = 0; d < dims; ++d) {
            const auto ud = static_cast<std::size_t>(d);
            a[ud] = std::max(lo[ud], best_s[ud] - width[ud]);
            b[ud] = std::min(hi[ud], best_s[ud] + width[ud]);
            width[ud] *= 0.25;
            largest = std::max(largest, width[ud]);
        }
        scan(a, b, kZoomPoints);
        if (largest < 1e-13) {
            break;
        }
    }
    return best;
}

DataTermDual dataterm_dual_eval(std::span<const double> v_hat, const LabelGrid& grid,
                                const UnaryModel& unary, int inner_iters) {
    const int k = grid.k;
    const auto uk = static_cast<std::size_t>(k);
    if (v_hat.size() != uk) {
        throw std::invalid_argument("dataterm_dual_eval: v_hat must have k entries");
    }
    const double h = grid.h;
    const double g1 = grid.gamma_first;

    // Shifted pieces: labels measured from gamma_1.
    std::vector<std::vector<QuadPiece>> pieces(uk);
    std::vector<std::vector<CostPoint>> hulls(uk);
    const auto* table = std::get_if<SampledTable>(&unary);
    for (int i = 0; i < k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (table != nullptr) {
            for (const auto& pt : lower_convex_hull(
                     restricted_samples(*table, grid.interval_lo(i), grid.interval_hi(i)))) {
                hulls[ui].push_back({pt.t - g1, pt.value});
            }
        } else {
            for (const auto& piece : pieces_on_interval(unary, i, grid)) {
                pieces[ui].push_back(piece.shifted(g1));
            }
        }
    }
    auto view = [&](std::size_t i) { return DataEpigraphView{pieces[i], hulls[i]}; };
    std::vector<double> shifted(uk);
    for (std::size_t i = 0; i < uk; ++i) {
        shifted[i] = grid.labels[i] - g1;
    }

    // Dense K: rows (q, r_1..r_k, a_1..a_k), columns mu_1..mu_k.
    const std::size_t rows = 2 * uk + 1;
    std::vector<double> kmat(rows * uk, 0.0);
    for (std::size_t i = 0; i < uk; ++i) {
        kmat[i] = 1.0;
        for (std::size_t j = 0; j < uk; ++j) {
            double entry = 0.0;
            if (i > j) {
                entry = -h;
            } else if (i == j) {
                entry = shifted[j];
            }
            kmat[(1 + j) * uk + i] = entry;
        }
        kmat[(1 + uk + i) * uk + i] = -1.0;
    }
    // ||K|| by power iteration on K^T K.
    std::vector<double> z(uk, 1.0);
    std::vector<double> kz(rows);
    double norm = 0.0;
    for (int it = 0; it < 200; ++it) {
        for (std::size_t r = 0; r < rows; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < uk; ++c) {
                acc += kmat[r * uk + c] * z[c];
            }
            kz[r] = acc;
        }
        std::vector<double> next(uk, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < uk; ++c) {
                next[c] += kmat[r * uk + c] * kz[r];
            }
        }
        double n2 = 0.0;
        for (double v : next) {
            n2 += v * v;
        }
        const double nn = std::sqrt(n2);
        norm = std::sqrt(nn);
        for (std::size_t c = 0; c < uk; ++c) {
            z[c] = next[c] / nn;
        }
    }
    const double lip = 1.01 * norm;
    const double tau = 1.0 / lip;
    const double sigma = 1.0 / lip;

    std::vector<double> mu(uk, 1.0 / k);
    std::vector<double> mu_bar = mu;
    std::vector<double> y(rows, 0.0);
    // Start from a feasible dual: r = 0, a = max(rho_i*(0)), q = a.
    {
        double amax = -kInf;
        for (std::size_t i = 0; i < uk; ++i) {
            amax = std::max(amax, view(i).conjugate(0.0));
        }
        for (std::size_t i = 0; i < uk; ++i) {
            y[1 + uk + i] = view(i).conjugate(0.0);
        }
        y[0] = amax;
    }

    auto objective = [&]() {
        // value of the dual at r with the optimal q
        double lin = 0.0;
        double worst = -kInf;
        double partial = 0.0;
        for (std::size_t i = 0; i < uk; ++i) {
            const double r = y[1 + i];
            lin += h * v_hat[i] * r;
            worst = std::max(worst, view(i).conjugate(r) + partial - shifted[i] * r);
            partial += h * r;
        }
        return lin - worst;
    };

    DataTermDual out;
    double best = objective();
    double last_check = best;
    int stable = 0;
    std::vector<double> kx(rows);
    for (int it = 1; it <= inner_iters; ++it) {
        for (std::size_t r = 0; r < rows; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < uk; ++c) {
                acc += kmat[r * uk + c] * mu_bar[c];
            }
            kx[r] = acc;
        }
        y[0] += sigma * (kx[0] - 1.0);
        for (std::size_t i = 0; i < uk; ++i) {
            y[1 + i] += sigma * (kx[1 + i] + h * v_hat[i]);
            y[1 + uk + i] += sigma * kx[1 + uk + i];
            const auto proj =
                project_data_epigraph({y[1 + i], y[1 + uk + i]}, view(i), 1e-12, 200).point;
            y[1 + i] = proj.slope;
            y[1 + uk + i] = proj.height;
        }
        for (std::size_t c = 0; c < uk; ++c) {
            double kty = 0.0;
            for (std::size_t r = 0; r < rows; ++r) {
                kty += kmat[r * uk + c] * y[r];
            }
            const double prev = mu[c];
            mu[c] = std::max(0.0, mu[c] - tau * kty);
            mu_bar[c] = 2.0 * mu[c] - prev;
        }
        out.iterations = it;
        if (it % 100 == 0) {
            const double val = objective();
            best = std::max(best, val);
            if (std::abs(val - last_check) <= 1e-9 * std::max(1.0, std::abs(val))) {
                if (++stable >= 10) {
                    out.converged = true;
                    break;
                }
            } else {
                stable = 0;
            }
            last_check = val;
        }
    }
    out.value = std::max(best, objective());
    return out;
}

}  // namespace sublift
