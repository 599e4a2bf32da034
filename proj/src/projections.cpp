#include "sublift/projections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sublift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist2(EpigraphPoint a, EpigraphPoint b) {
    const double ds = a.slope - b.slope;
    const double dr = a.height - b.height;
    return ds * ds + dr * dr;
}

// Root of 2A^2 x^3 + (1 - 2A y0) x - x0 = 0 in [0, x0] for x0 >= 0. The
// cubic is negative at 0 and nonnegative at x0 whenever (x0, y0) lies
// below the parabola, and has a single root on the positive axis.
double parabola_foot(double curv, double x0, double y0) {
    if (x0 <= 0.0) {
        return 0.0;
    }
    const double a3 = 2.0 * curv * curv;
    const double a1 = 1.0 - 2.0 * curv * y0;
    auto f = [&](double x) { return (a3 * x * x + a1) * x - x0; };

    const double p = a1 / a3;
    const double q = -x0 / a3;
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    double x;
    if (disc >= 0.0) {
        const double sd = std::sqrt(disc);
        x = std::cbrt(-0.5 * q + sd) + std::cbrt(-0.5 * q - sd);
    } else {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        x = m * std::cos(std::acos(arg) / 3.0);
    }

    double lo = 0.0;
    double hi = x0;
    x = std::clamp(x, lo, hi);
    for (int it = 0; it < 60; ++it) {
        const double fx = f(x);
        if (fx == 0.0) {
            break;
        }
        if (fx > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        const double dfx = 3.0 * a3 * x * x + a1;
        double next = dfx > 0.0 ? x - fx / dfx : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

// Projection onto the ray anchor + t * dir, t >= 0.
EpigraphPoint project_ray(EpigraphPoint pt, EpigraphPoint anchor, double ds, double dr) {
    const double t =
        std::max(0.0, ((pt.slope - anchor.slope) * ds + (pt.height - anchor.height) * dr) /
                          (ds * ds + dr * dr));
    return {anchor.slope + t * ds, anchor.height + t * dr};
}

// Projection onto the segment [a, b].
EpigraphPoint project_segment(EpigraphPoint pt, EpigraphPoint a, EpigraphPoint b) {
    const double ds = b.slope - a.slope;
    const double dr = b.height - a.height;
    const double len2 = ds * ds + dr * dr;
    if (len2 <= 0.0) {
        return a;
    }
    const double t = std::clamp(
        ((pt.slope - a.slope) * ds + (pt.height - a.height) * dr) / len2, 0.0, 1.0);
    return {a.slope + t * ds, a.height + t * dr};
}

}  // namespace

EpigraphPoint project_epi_parabola(EpigraphPoint point, double curvature, ParabolaShift shift) {
    const double x0 = point.slope - shift.center;
    const double y0 = point.height - shift.offset;
    if (curvature <= 0.0) {
        return {point.slope, std::max(point.height, shift.offset)};
    }
    if (y0 >= curvature * x0 * x0) {
        return point;
    }
    const double x = std::copysign(parabola_foot(curvature, std::abs(x0), y0), x0);
    return {shift.center + x, shift.offset + curvature * x * x};
}

EpigraphPoint project_epi_interval_quadratic(EpigraphPoint point, const QuadPiece& piece) {
#ifdef SUBLIFT_FAULT_INJECTION
    // Negative control: drop the interval restriction.
    if (piece.a > 0.0) {
        return project_epi_parabola(point, 1.0 / (4.0 * piece.a), {piece.b, -piece.c});
    }
    return {piece.b, std::max(point.height, -piece.c)};
#else
    if (point.height >= piece_conjugate(piece, point.slope)) {
        return point;
    }
    const double s_left = 2.0 * piece.a * piece.lo + piece.b;
    const double s_right = 2.0 * piece.a * piece.hi + piece.b;
    const EpigraphPoint left{s_left, piece.lo * s_left - piece(piece.lo)};
    const EpigraphPoint right{s_right, piece.hi * s_right - piece(piece.hi)};

    EpigraphPoint best = project_ray(point, left, -1.0, -piece.lo);
    double best_d = dist2(point, best);
    const EpigraphPoint on_right = project_ray(point, right, 1.0, piece.hi);
    if (const double d = dist2(point, on_right); d < best_d) {
        best = on_right;
        best_d = d;
    }
    if (piece.a > 0.0 && s_right > s_left) {
        const EpigraphPoint cap =
            project_epi_parabola(point, 1.0 / (4.0 * piece.a), {piece.b, -piece.c});
        if (cap.slope >= s_left && cap.slope <= s_right) {
            if (const double d = dist2(point, cap); d < best_d) {
                best = cap;
            }
        }
    }
    return best;
#endif
}

namespace {

// piece* restricted to [lo, hi] in s: A s^2 + B s + C.
struct ConjArc {
    double lo;
    double hi;
    double A;
    double B;
    double C;
};

int conjugate_arcs(const QuadPiece& q, ConjArc out[3]) {
    const double left_c = -q(q.lo);
    const double right_c = -q(q.hi);
    if (q.a > 0.0 && q.hi > q.lo) {
        const double s_left = 2.0 * q.a * q.lo + q.b;
        const double s_right = 2.0 * q.a * q.hi + q.b;
        out[0] = {-kInf, s_left, 0.0, q.lo, left_c};
        out[1] = {s_left, s_right, 1.0 / (4.0 * q.a), -q.b / (2.0 * q.a), q.b * q.b / (4.0 * q.a) - q.c};
        out[2] = {s_right, kInf, 0.0, q.hi, right_c};
        return 3;
    }
    if (q.hi <= q.lo) {
        out[0] = {-kInf, kInf, 0.0, q.lo, left_c};
        return 1;
    }
    const double kink = (q(q.hi) - q(q.lo)) / (q.hi - q.lo);
    out[0] = {-kInf, kink, 0.0, q.lo, left_c};
    out[1] = {kink, kInf, 0.0, q.hi, right_c};
    return 2;
}

double max_conjugate(std::span<const QuadPiece> pieces, double slope) {
    double best = -kInf;
    for (const auto& q : pieces) {
        best = std::max(best, piece_conjugate(q, slope));
    }
    return best;
}

// Dykstra fallback for the (numerically degenerate) case where no exact
// candidate survives the feasibility test.
EpiMaxResult project_epi_max_dykstra(EpigraphPoint point, std::span<const QuadPiece> pieces,
                                     double tol, int max_iter) {
    std::vector<double> inc(2 * pieces.size(), 0.0);
    EpigraphPoint x = point;
    EpiMaxResult result;
    result.converged = false;
    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        double change = 0.0;
        for (size_t j = 0; j < pieces.size(); ++j) {
            const EpigraphPoint y{x.slope + inc[2 * j], x.height + inc[2 * j + 1]};
            const EpigraphPoint z = project_epi_interval_quadratic(y, pieces[j]);
            const double ds = y.slope - z.slope;
            const double dh = y.height - z.height;
            // The iterate can stall for a whole sweep while the increments
            // still move, so both must settle.
            change = std::max({change, std::abs(z.slope - x.slope), std::abs(z.height - x.height),
                               std::abs(ds - inc[2 * j]), std::abs(dh - inc[2 * j + 1])});
            inc[2 * j] = ds;
            inc[2 * j + 1] = dh;
            x = z;
        }
        result.sweeps = sweep;
        if (change < tol) {
            result.converged = true;
            break;
        }
    }
    result.point = x;
    return result;
}

}  // namespace

// The epigraph of max_j piece_j* is the intersection of the single
// epigraphs. In the plane its nearest point is either the projection onto
// one of them (when that lands in all others) or a crossing of two graphs
// on the upper envelope; all candidates are enumerated.
EpiMaxResult project_epi_max(EpigraphPoint point, std::span<const QuadPiece> pieces, double tol,
                             int max_iter) {
    if (pieces.empty()) {
        throw std::invalid_argument("project_epi_max needs at least one piece");
    }
    if (pieces.size() == 1) {
        return {project_epi_interval_quadratic(point, pieces[0]), true, 1};
    }
    if (point.height >= max_conjugate(pieces, point.slope)) {
        return {point, true, 0};
    }

    EpigraphPoint best{};
    double best_d = kInf;
    auto consider = [&](EpigraphPoint z) {
        const double top = max_conjugate(pieces, z.slope);
        if (z.height < top - 1e-12 * std::max(1.0, std::abs(top))) {
            return;
        }
        z.height = std::max(z.height, top);
        if (const double d = dist2(point, z); d < best_d) {
            best = z;
            best_d = d;
        }
    };
    for (const auto& q : pieces) {
        consider(project_epi_interval_quadratic(point, q));
    }
    ConjArc arcs_j[3];
    ConjArc arcs_m[3];
    for (size_t j = 0; j < pieces.size(); ++j) {
        const int nj = conjugate_arcs(pieces[j], arcs_j);
        for (size_t m = j + 1; m < pieces.size(); ++m) {
            const int nm = conjugate_arcs(pieces[m], arcs_m);
            for (int aj = 0; aj < nj; ++aj) {
                for (int am = 0; am < nm; ++am) {
                    const ConjArc& u = arcs_j[aj];
                    const ConjArc& w = arcs_m[am];
                    const double lo = std::max(u.lo, w.lo);
                    const double hi = std::min(u.hi, w.hi);
                    if (!(lo <= hi)) {
                        continue;
                    }
                    const double qa = u.A - w.A;
                    const double qb = u.B - w.B;
                    const double qc = u.C - w.C;
                    double roots[2];
                    int count = 0;
                    if (std::abs(qa) <= 1e-300) {
                        if (qb != 0.0) {
                            roots[count++] = -qc / qb;
                        }
                    } else {
                        const double disc = qb * qb - 4.0 * qa * qc;
                        if (disc >= 0.0) {
                            const double sq = std::sqrt(disc);
                            const double t = -0.5 * (qb + std::copysign(sq, qb));
                            roots[count++] = t / qa;
                            if (t != 0.0) {
                                roots[count++] = qc / t;
                            }
                        }
                    }
                    for (int r = 0; r < count; ++r) {
                        const double sv = roots[r];
                        if (sv >= lo && sv <= hi && std::isfinite(sv)) {
                            consider({sv, (u.A * sv + u.B) * sv + u.C});
                        }
                    }
                }
            }
        }
    }
    if (!(best_d < kInf)) {
        return project_epi_max_dykstra(point, pieces, tol, max_iter);
    }
    return {best, true, 0};
}

double pwl_conjugate(std::span<const CostPoint> hull, double slope) {
    double best = -kInf;
    for (const auto& p : hull) {
        best = std::max(best, slope * p.t - p.value);
    }
    return best;
}

EpigraphPoint project_epi_pwl(EpigraphPoint point, std::span<const CostPoint> hull) {
    if (hull.empty()) {
        throw std::invalid_argument("project_epi_pwl needs a nonempty hull");
    }
    if (point.height >= pwl_conjugate(hull, point.slope)) {
        return point;
    }
    const CostPoint first = hull.front();
    if (hull.size() == 1) {
        // line r = t s - v
        const EpigraphPoint anchor{0.0, -first.value};
        const EpigraphPoint up = project_ray(point, anchor, 1.0, first.t);
        const EpigraphPoint down = project_ray(point, anchor, -1.0, -first.t);
        return dist2(point, up) <= dist2(point, down) ? up : down;
    }
    // Vertex m of the conjugate sits at the slope of hull segment m.
    auto vertex = [&](size_t m) {
        const double s = (hull[m + 1].value - hull[m].value) / (hull[m + 1].t - hull[m].t);
        return EpigraphPoint{s, s * hull[m].t - hull[m].value};
    };
    const size_t segs = hull.size() - 1;
    EpigraphPoint prev = vertex(0);
    EpigraphPoint best = project_ray(point, prev, -1.0, -first.t);
    double best_d = dist2(point, best);
    for (size_t m = 1; m < segs; ++m) {
        const EpigraphPoint cur = vertex(m);
        const EpigraphPoint cand = project_segment(point, prev, cur);
        if (const double d = dist2(point, cand); d < best_d) {
            best = cand;
            best_d = d;
        }
        prev = cur;
    }
    const EpigraphPoint last = project_ray(point, prev, 1.0, hull.back().t);
    if (dist2(point, last) < best_d) {
        best = last;
    }
    return best;
}

double DataEpigraphView::conjugate(double slope) const {
    if (!hull.empty()) {
        return pwl_conjugate(hull, slope);
    }
    double best = -kInf;
    for (const auto& piece : pieces) {
        best = std::max(best, piece_conjugate(piece, slope));
    }
    return best;
}

EpiMaxResult project_data_epigraph(EpigraphPoint point, const DataEpigraphView& view, double tol,
                                   int max_iter) {
    if (!view.hull.empty()) {
        return {project_epi_pwl(point, view.hull), true, 1};
    }
    return project_epi_max(point, view.pieces, tol, max_iter);
}

void project_epi_eta(std::span<double> p, double& b, const EtaConjugate& conj,
                     double extra_radius) {
    const double radius = std::min(conj.radius, extra_radius);
    double norm2 = 0.0;
    for (double v : p) {
        norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    double s = norm;
    if (conj.quad <= 0.0) {
        s = std::min(norm, radius);
        b = std::max(b, 0.0);
    } else {
        const EpigraphPoint proj = project_epi_parabola({norm, b}, conj.quad);
        if (proj.slope <= radius) {
            s = proj.slope;
            b = proj.height;
        } else {
            s = radius;
            b = std::max(b, conj.quad * radius * radius);
        }
    }
    if (s == norm) {
        return;
    }
    if (norm > 0.0) {
        const double scale = s / norm;
        for (double& v : p) {
            v *= scale;
        }
    }
}

JumpConstraintSet JumpConstraintSet::build(const Kappa& kappa, const LabelGrid& grid) {
    JumpConstraintSet set;
    set.k = grid.k;
    set.active = has_jumps(kappa);
    set.linear = is_linear(kappa);
    const auto kk = static_cast<size_t>(grid.k);
    set.bounds.assign(kk * kk, kInf);
    if (set.active) {
        for (int i = 0; i < grid.k; ++i) {
            for (int j = i; j < grid.k; ++j) {
                const double jump = grid.labels[static_cast<size_t>(j) + 1] -
                                    grid.labels[static_cast<size_t>(i)];
                set.bounds[static_cast<size_t>(i) * kk + static_cast<size_t>(j)] =
                    kappa_value(kappa, jump) / grid.h;
            }
        }
    }
    return set;
}

namespace {

size_t pair_index(int i, int j, int k) {
    // row-major upper triangle, diagonal included
    const auto ui = static_cast<size_t>(i);
    return ui * static_cast<size_t>(k) - ui * (ui - 1) / 2 + static_cast<size_t>(j - i);
}

// Projection of the entries i..j of x onto |sum| <= bound. Writes the
// applied per-entry correction into delta.
void project_partial_sum(double* x, int n, int i, int j, double bound, double* sum,
                         double* delta) {
    double norm2 = 0.0;
    for (int c = 0; c < n; ++c) {
        double acc = 0.0;
        for (int l = i; l <= j; ++l) {
            acc += x[l * n + c];
        }
        sum[c] = acc;
        norm2 += acc * acc;
    }
    const double norm = std::sqrt(norm2);
    const double m = static_cast<double>(j - i + 1);
    if (norm <= bound) {
        for (int c = 0; c < n; ++c) {
            delta[c] = 0.0;
        }
        return;
    }
    const double shrink = (bound / norm - 1.0) / m;
    for (int c = 0; c < n; ++c) {
        delta[c] = shrink * sum[c];
        for (int l = i; l <= j; ++l) {
            x[l * n + c] += delta[c];
        }
    }
}

void ball_clamp(double* v, int n, double radius) {
    double norm2 = 0.0;
    for (int c = 0; c < n; ++c) {
        norm2 += v[c] * v[c];
    }
    if (norm2 > radius * radius) {
        const double scale = radius / std::sqrt(norm2);
        for (int c = 0; c < n; ++c) {
            v[c] *= scale;
        }
    }
}

constexpr int kMaxComponents = 8;

}  // namespace

ProjectionReport project_jump(std::span<double> phi_x, int n, const JumpConstraintSet& constraints,
                              double tol, int max_iter) {
    DykstraWorkspace ws;
    return project_jump(phi_x, n, constraints, tol, max_iter, ws);
}

ProjectionReport project_jump(std::span<double> phi_x, int n, const JumpConstraintSet& constraints,
                              double tol, int max_iter, DykstraWorkspace& ws) {
    const int k = constraints.k;
    if (n < 1 || n > kMaxComponents || phi_x.size() != static_cast<size_t>(k * n)) {
        throw std::invalid_argument("project_jump: field shape does not match the constraint set");
    }
    if (!constraints.active) {
        return {};
    }
    double* x = phi_x.data();
    if (constraints.linear) {
        for (int l = 0; l < k; ++l) {
            ball_clamp(x + l * n, n, constraints.bound(l, l));
        }
        return {true, 1};
    }
    if (check_jump(phi_x, n, constraints, 0.0).feasible()) {
        return {true, 0};
    }
    const size_t pairs = static_cast<size_t>(k) * static_cast<size_t>(k + 1) / 2;
    ws.increments.assign(pairs * static_cast<size_t>(n), 0.0);
    ws.previous.resize(phi_x.size());
    double sum[kMaxComponents];
    double delta[kMaxComponents];

    ProjectionReport report{false, 0};
    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        std::copy(phi_x.begin(), phi_x.end(), ws.previous.begin());
        // Increments can keep moving while phi_x stalls for a sweep.
        double change = 0.0;
        for (int i = 0; i < k; ++i) {
            for (int j = i; j < k; ++j) {
                double* inc = ws.increments.data() + pair_index(i, j, k) * static_cast<size_t>(n);
                for (int c = 0; c < n; ++c) {
                    for (int l = i; l <= j; ++l) {
                        x[l * n + c] += inc[c];
                    }
                }
                project_partial_sum(x, n, i, j, constraints.bound(i, j), sum, delta);
                // new increment = y - P(y) = -(applied correction)
                for (int c = 0; c < n; ++c) {
                    change = std::max(change, std::abs(delta[c] + inc[c]));
                    inc[c] = -delta[c];
                }
            }
        }
        for (size_t e = 0; e < phi_x.size(); ++e) {
            change = std::max(change, std::abs(phi_x[e] - ws.previous[e]));
        }
        report.sweeps = sweep;
        if (change < tol) {
            report.converged = true;
            break;
        }
    }
    return report;
}

ProjectionReport project_regularizer_set(std::span<double> phi_x, std::span<double> b, int n,
                                         const EtaConjugate& conj,
                                         const JumpConstraintSet& constraints, double tol,
                                         int max_iter, DykstraWorkspace& ws) {
    const int k = constraints.k;
    if (n < 1 || n > kMaxComponents || phi_x.size() != static_cast<size_t>(k * n) ||
        b.size() != static_cast<size_t>(k)) {
        throw std::invalid_argument("project_regularizer_set: shape mismatch");
    }
    double* x = phi_x.data();
    auto interval = [&](int i) {
        return std::span<double>(x + i * n, static_cast<size_t>(n));
    };
    auto diag_radius = [&](int i) { return constraints.active ? constraints.bound(i, i) : kInf; };

    // Off-diagonal constraints are redundant for linear kappa and absent
    // without jumps, so the per-interval projections are already exact.
    if (!constraints.active || constraints.linear || k == 1) {
        for (int i = 0; i < k; ++i) {
            project_epi_eta(interval(i), b[static_cast<size_t>(i)], conj, diag_radius(i));
        }
        return {true, 1};
    }

    bool feasible = check_jump(phi_x, n, constraints, 0.0).feasible();
    for (int i = 0; i < k && feasible; ++i) {
        double norm2 = 0.0;
        for (double v : interval(i)) {
            norm2 += v * v;
        }
        const double norm = std::sqrt(norm2);
        feasible = norm <= std::min(conj.radius, diag_radius(i)) &&
                   b[static_cast<size_t>(i)] >= conj.quad * norm2;
    }
    if (feasible) {
        return {true, 0};
    }

    // Increments: (n + 1) per interval set, then n per off-diagonal pair.
    const auto un = static_cast<size_t>(n);
    const size_t pairs = static_cast<size_t>(k) * static_cast<size_t>(k - 1) / 2;
    const size_t diag_slots = static_cast<size_t>(k) * (un + 1);
    ws.increments.assign(diag_slots + pairs * un, 0.0);
    ws.previous.resize(phi_x.size() + b.size());
    double sum[kMaxComponents];
    double delta[kMaxComponents];

    ProjectionReport report{false, 0};
    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        std::copy(phi_x.begin(), phi_x.end(), ws.previous.begin());
        std::copy(b.begin(), b.end(), ws.previous.begin() + static_cast<std::ptrdiff_t>(phi_x.size()));
        // Increments can keep moving while (phi_x, b) stalls for a sweep.
        double change = 0.0;
        size_t pair = 0;
        for (int i = 0; i < k; ++i) {
            const auto ui = static_cast<size_t>(i);
            double* dinc = ws.increments.data() + ui * (un + 1);
            double* xi = x + i * n;
            for (int c = 0; c < n; ++c) {
                xi[c] += dinc[c];
            }
            b[ui] += dinc[n];
            double before[kMaxComponents + 1];
            std::copy(xi, xi + n, before);
            before[n] = b[ui];
            project_epi_eta(interval(i), b[ui], conj, diag_radius(i));
            for (int c = 0; c < n; ++c) {
                change = std::max(change, std::abs(before[c] - xi[c] - dinc[c]));
                dinc[c] = before[c] - xi[c];
            }
            change = std::max(change, std::abs(before[n] - b[ui] - dinc[n]));
            dinc[n] = before[n] - b[ui];

            for (int j = i + 1; j < k; ++j, ++pair) {
                double* inc = ws.increments.data() + diag_slots + pair * un;
                for (int c = 0; c < n; ++c) {
                    for (int l = i; l <= j; ++l) {
                        x[l * n + c] += inc[c];
                    }
                }
                project_partial_sum(x, n, i, j, constraints.bound(i, j), sum, delta);
                for (int c = 0; c < n; ++c) {
                    change = std::max(change, std::abs(delta[c] + inc[c]));
                    inc[c] = -delta[c];
                }
            }
        }
        for (size_t e = 0; e < phi_x.size(); ++e) {
            change = std::max(change, std::abs(phi_x[e] - ws.previous[e]));
        }
        for (size_t e = 0; e < b.size(); ++e) {
            change = std::max(change, std::abs(b[e] - ws.previous[phi_x.size() + e]));
        }
        report.sweeps = sweep;
        if (change < tol) {
            report.converged = true;
            break;
        }
    }
    return report;
}

JumpViolation check_jump(std::span<const double> phi_x, int n, const JumpConstraintSet& constraints,
                         double tol) {
    JumpViolation report;
    if (!constraints.active) {
        return report;
    }
    const int k = constraints.k;
    double sum[kMaxComponents];
    for (int i = 0; i < k; ++i) {
        std::fill(sum, sum + n, 0.0);
        for (int j = i; j < k; ++j) {
            double norm2 = 0.0;
            for (int c = 0; c < n; ++c) {
                sum[c] += phi_x[static_cast<size_t>(j * n + c)];
                norm2 += sum[c] * sum[c];
            }
            const double violation = std::sqrt(norm2) - constraints.bound(i, j);
            if (violation > tol && violation > report.max_violation) {
                report.max_violation = violation;
                report.worst_i = i;
                report.worst_j = j;
            }
        }
    }
    return report;
}

JumpViolation check_jump_continuum(std::span<const double> phi_x, int n, const Kappa& kappa,
                                   const LabelGrid& grid, int samples, double tol) {
    JumpViolation report;
    if (!has_jumps(kappa)) {
        return report;
    }
    const int k = grid.k;
    const double h = grid.h;
    auto entry = [&](int l, int c) { return phi_x[static_cast<size_t>(l * n + c)]; };
    auto note = [&](double violation, int i, int j) {
        if (violation > tol && violation > report.max_violation) {
            report.max_violation = violation;
            report.worst_i = i;
            report.worst_j = j;
        }
    };
    double inner[kMaxComponents];
    for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
            std::fill(inner, inner + n, 0.0);
            for (int l = i + 1; l < j; ++l) {
                for (int c = 0; c < n; ++c) {
                    inner[c] += entry(l, c);
                }
            }
            for (int sa = 0; sa < samples; ++sa) {
                const double a = samples == 1 ? 0.0 : static_cast<double>(sa) / (samples - 1);
                for (int sb = 0; sb < samples; ++sb) {
                    const double b = samples == 1 ? 0.0 : static_cast<double>(sb) / (samples - 1);
                    double norm2 = 0.0;
                    double bound = 0.0;
                    if (i == j) {
                        if (b < a) {
                            continue;
                        }
                        for (int c = 0; c < n; ++c) {
                            const double v = (b - a) * entry(i, c);
                            norm2 += v * v;
                        }
                        bound = kappa_value(kappa, (b - a) * h) / h;
                    } else {
                        for (int c = 0; c < n; ++c) {
                            const double v = (1.0 - a) * entry(i, c) + inner[c] + b * entry(j, c);
                            norm2 += v * v;
                        }
                        const double lo = grid.labels[static_cast<size_t>(i)] + a * h;
                        const double hi = grid.labels[static_cast<size_t>(j)] + b * h;
                        bound = kappa_value(kappa, std::max(0.0, hi - lo)) / h;
                    }
                    note(std::sqrt(norm2) - bound, i, j);
                }
            }
        }
    }
    return report;
}

namespace {

// Minimum over t in [lo, hi] of g by a uniform scan refined with a
// golden-section search around the best sample.
template <class F>
double sampled_min(F&& g, double lo, double hi, int samples) {
    const int count = std::max(samples, 2);
    const double step = (hi - lo) / (count - 1);
    double best = kInf;
    int best_j = 0;
    for (int j = 0; j < count; ++j) {
        const double t = j + 1 == count ? hi : lo + step * j;
        const double v = g(t);
        if (v < best) {
            best = v;
            best_j = j;
        }
    }
    double a = std::max(lo, lo + step * (best_j - 1));
    double b = std::min(hi, lo + step * (best_j + 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double gc = g(c);
    double gd = g(d);
    for (int it = 0; it < 60; ++it) {
        if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    return std::min({best, gc, gd});
}

}  // namespace

DualViolation check_linear_dual_feasibility(std::span<const double> phi_t,
                                            std::span<const double> eta_star,
                                            const UnaryModel& unary, const LabelGrid& grid,
                                            int t_samples, double tol) {
    DualViolation report;
    for (int i = 0; i < grid.k; ++i) {
        const auto ui = static_cast<size_t>(i);
        const double lo = grid.interval_lo(i);
        const double hi = grid.interval_hi(i);
        const double left = phi_t[ui];
        const double right = phi_t[ui + 1];
        auto g = [&](double t) {
            return left * (hi - t) / grid.h + right * (t - lo) / grid.h + evaluate(unary, t);
        };
        const double violation = eta_star[ui] - sampled_min(g, lo, hi, t_samples);
        if (violation > tol && violation > report.max_violation) {
            report.max_violation = violation;
            report.worst_interval = i;
        }
    }
    return report;
}

DualViolation check_split_dual_feasibility(std::span<const double> phi_t,
                                           std::span<const double> eta_star,
                                           const UnaryModel& unary, const LabelGrid& grid,
                                           double tol) {
    DualViolation report;
    const auto* table = std::get_if<SampledTable>(&unary);
    for (int i = 0; i < grid.k; ++i) {
        const auto ui = static_cast<size_t>(i);
        const double lo = grid.interval_lo(i);
        const double hi = grid.interval_hi(i);
        double violation;
        if (!std::isfinite(eta_star[ui])) {
            violation = kInf;
        } else {
            const double r = (phi_t[ui] - phi_t[ui + 1]) / grid.h;
            const double c = (phi_t[ui] * hi - phi_t[ui + 1] * lo) / grid.h;
            const EpigraphPoint point{r, c - eta_star[ui]};
            EpigraphPoint proj;
            if (table != nullptr) {
                const auto pts = restricted_samples(*table, lo, hi);
                const auto hull = lower_convex_hull(pts);
                proj = project_epi_pwl(point, hull);
            } else {
                const auto pieces = pieces_on_interval(unary, i, grid);
                proj = project_epi_max(point, pieces, 1e-12, 1000).point;
            }
            violation = std::sqrt(dist2(point, proj));
        }
        if (violation > tol && violation > report.max_violation) {
            report.max_violation = violation;
            report.worst_interval = i;
        }
    }
    return report;
}

}  // namespace sublift
