#include "sublift/unaries.hpp"

#include "sublift/detail/overloaded.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace sublift {

namespace {

using detail::Overloaded;

double table_eval(const SampledTable& table, double t) {
    const auto& ts = table.t_samples;
    const auto& vs = table.values;
    if (t <= ts.front()) {
        return vs.front();
    }
    if (t >= ts.back()) {
        return vs.back();
    }
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const auto j = static_cast<size_t>(it - ts.begin());
    const double w = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
    return (1.0 - w) * vs[j - 1] + w * vs[j];
}

double piece_min(const QuadPiece& p) {
    double best = std::min(p(p.lo), p(p.hi));
    if (p.a > 0.0) {
        const double vertex = -p.b / (2.0 * p.a);
        if (vertex > p.lo && vertex < p.hi) {
            best = std::min(best, p(vertex));
        }
    }
    return best;
}

std::vector<QuadPiece> mixture_pieces(const TruncatedQuadraticMixture& mix, double lo, double hi,
                                      double dedup_tol) {
    std::vector<double> cuts{lo, hi};
    for (const auto& term : mix.terms) {
        const double radius = std::sqrt(term.nu / term.alpha);
        for (double bp : {term.f - radius, term.f + radius}) {
            if (bp > lo + dedup_tol && bp < hi - dedup_tol) {
                cuts.push_back(bp);
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> uniq;
    for (double c : cuts) {
        if (uniq.empty() || c - uniq.back() > dedup_tol) {
            uniq.push_back(c);
        }
    }
    if (uniq.size() == 1) {
        uniq.push_back(hi);
    }
    std::vector<QuadPiece> pieces;
    for (size_t s = 0; s + 1 < uniq.size(); ++s) {
        QuadPiece p;
        p.lo = uniq[s];
        p.hi = uniq[s + 1];
        const double mid = 0.5 * (p.lo + p.hi);
        for (const auto& term : mix.terms) {
            const double d = mid - term.f;
            if (term.alpha * d * d < term.nu) {
                p.a += term.alpha;
                p.b += -2.0 * term.alpha * term.f;
                p.c += term.alpha * term.f * term.f;
            } else {
                p.c += term.nu;
            }
        }
        pieces.push_back(p);
    }
    return pieces;
}

}  // namespace

QuadPiece QuadPiece::shifted(double offset) const {
    // a (t' + g)^2 + b (t' + g) + c
    QuadPiece p;
    p.a = a;
    p.b = 2.0 * a * offset + b;
    p.c = (a * offset + b) * offset + c;
    p.lo = lo - offset;
    p.hi = hi - offset;
    return p;
}

double evaluate(const UnaryModel& unary, double t) {
    return std::visit(
        Overloaded{
            [t](const QuadraticUnary& q) { return q.weight * (t - q.target) * (t - q.target); },
            [t](const TruncatedQuadraticMixture& m) {
                double sum = 0.0;
                for (const auto& term : m.terms) {
                    const double d = t - term.f;
                    sum += std::min(term.nu, term.alpha * d * d);
                }
                return sum;
            },
            [t](const SampledTable& s) { return table_eval(s, t); },
        },
        unary);
}

std::vector<CostPoint> restricted_samples(const SampledTable& table, double lo, double hi) {
    std::vector<CostPoint> pts;
    pts.push_back({lo, table_eval(table, lo)});
    for (size_t j = 0; j < table.t_samples.size(); ++j) {
        const double t = table.t_samples[j];
        if (t > lo && t < hi) {
            pts.push_back({t, table.values[j]});
        }
    }
    if (hi > lo) {
        pts.push_back({hi, table_eval(table, hi)});
    }
    return pts;
}

double min_on(const UnaryModel& unary, double lo, double hi) {
    if (const auto* table = std::get_if<SampledTable>(&unary)) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : restricted_samples(*table, lo, hi)) {
            best = std::min(best, p.value);
        }
        return best;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_on(unary, lo, hi, 1e-12 * std::max(1.0, hi - lo))) {
        best = std::min(best, piece_min(p));
    }
    return best;
}

HalfCellMinima half_cell_minima(const UnaryModel& unary, const LabelGrid& grid) {
    HalfCellMinima m;
    m.left.resize(static_cast<size_t>(grid.k));
    m.right.resize(static_cast<size_t>(grid.k));
    for (int i = 0; i < grid.k; ++i) {
        const auto ui = static_cast<size_t>(i);
        m.left[ui] = min_on(unary, grid.interval_lo(i), grid.dual_nodes[ui]);
        m.right[ui] = min_on(unary, grid.dual_nodes[ui], grid.interval_hi(i));
    }
    return m;
}

std::vector<double> min_pool(const UnaryModel& unary, const LabelGrid& grid) {
    const auto half = half_cell_minima(unary, grid);
    std::vector<double> pooled(static_cast<size_t>(grid.ell));
    for (int i = 0; i < grid.ell; ++i) {
        const auto ui = static_cast<size_t>(i);
        double v = std::numeric_limits<double>::infinity();
        if (i < grid.k) {
            v = std::min(v, half.left[ui]);
        }
        if (i > 0) {
            v = std::min(v, half.right[ui - 1]);
        }
        pooled[ui] = v;
    }
    return pooled;
}

std::vector<QuadPiece> pieces_on(const UnaryModel& unary, double lo, double hi,
                                 double dedup_tol) {
    return std::visit(
        Overloaded{
            [&](const QuadraticUnary& q) {
                QuadPiece p;
                p.a = q.weight;
                p.b = -2.0 * q.weight * q.target;
                p.c = q.weight * q.target * q.target;
                p.lo = lo;
                p.hi = hi;
                return std::vector<QuadPiece>{p};
            },
            [&](const TruncatedQuadraticMixture& m) {
                return mixture_pieces(m, lo, hi, dedup_tol);
            },
            [](const SampledTable&) -> std::vector<QuadPiece> {
                throw std::invalid_argument("sampled tables have no exact quadratic pieces");
            },
        },
        unary);
}

std::vector<QuadPiece> pieces_on_interval(const UnaryModel& unary, int interval_index,
                                          const LabelGrid& grid) {
    return pieces_on(unary, grid.interval_lo(interval_index), grid.interval_hi(interval_index),
                     1e-12 * grid.range());
}

double piece_conjugate(const QuadPiece& piece, double slope) {
    double t;
    if (piece.a > 0.0) {
        t = std::clamp((slope - piece.b) / (2.0 * piece.a), piece.lo, piece.hi);
    } else {
        t = (slope - piece.b) >= 0.0 ? piece.hi : piece.lo;
    }
    return slope * t - piece(t);
}

double conjugate_on(const UnaryModel& unary, double lo, double hi, double slope) {
    double best = -std::numeric_limits<double>::infinity();
    if (const auto* table = std::get_if<SampledTable>(&unary)) {
        for (const auto& p : restricted_samples(*table, lo, hi)) {
            best = std::max(best, slope * p.t - p.value);
        }
        return best;
    }
    for (const auto& p : pieces_on(unary, lo, hi, 1e-12 * std::max(1.0, hi - lo))) {
        best = std::max(best, piece_conjugate(p, slope));
    }
    return best;
}

double conjugate_on_interval(const UnaryModel& unary, int interval_index, const LabelGrid& grid,
                             double slope) {
    return conjugate_on(unary, grid.interval_lo(interval_index), grid.interval_hi(interval_index),
                        slope);
}

double slope_bound_on(const UnaryModel& unary, double lo, double hi) {
    double bound = 0.0;
    if (const auto* table = std::get_if<SampledTable>(&unary)) {
        const auto pts = restricted_samples(*table, lo, hi);
        for (size_t j = 1; j < pts.size(); ++j) {
            const double dt = pts[j].t - pts[j - 1].t;
            if (dt > 0.0) {
                bound = std::max(bound, std::abs((pts[j].value - pts[j - 1].value) / dt));
            }
        }
        return bound;
    }
    for (const auto& p : pieces_on(unary, lo, hi, 1e-12 * std::max(1.0, hi - lo))) {
        bound = std::max(bound, std::abs(2.0 * p.a * p.lo + p.b));
        bound = std::max(bound, std::abs(2.0 * p.a * p.hi + p.b));
    }
    return bound;
}

double convex_envelope_eval(const UnaryModel& unary, int interval_index, const LabelGrid& grid,
                            double t) {
    const double lo = grid.interval_lo(interval_index);
    const double hi = grid.interval_hi(interval_index);
    const double slack = 1e-12 * grid.range();
    if (t < lo - slack || t > hi + slack) {
        throw std::out_of_range("convex_envelope_eval: t outside the interval");
    }
    t = std::clamp(t, lo, hi);
    const double limit = 4.0 * std::max(slope_bound_on(unary, lo, hi), 1.0);
    auto objective = [&](double s) { return s * t - conjugate_on(unary, lo, hi, s); };

    // The objective is concave in s, so golden-section search over the
    // whole slope range finds its maximum.
    double a = -limit;
    double b = limit;
    double best = std::max(objective(a), objective(b));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    for (int it = 0; it < 100; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    return std::max({best, fc, fd});
}

std::vector<CostPoint> lower_convex_hull(std::span<const CostPoint> points) {
    std::vector<CostPoint> hull;
    for (const auto& p : points) {
        while (hull.size() >= 2) {
            const auto& o = hull[hull.size() - 2];
            const auto& m = hull.back();
            const double cross = (m.t - o.t) * (p.value - o.value) - (m.value - o.value) * (p.t - o.t);
            if (cross <= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(p);
    }
    return hull;
}

namespace {

void write_le(std::ofstream& out, std::uint64_t bits) {
    std::array<char, 8> buf{};
    for (int b = 0; b < 8; ++b) {
        buf[static_cast<size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
    }
    out.write(buf.data(), 8);
}

std::uint64_t read_le(std::ifstream& in) {
    std::array<unsigned char, 8> buf{};
    in.read(reinterpret_cast<char*>(buf.data()), 8);
    if (in.gcount() != 8) {
        throw std::runtime_error("sampled table file is truncated");
    }
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(buf[static_cast<size_t>(b)]) << (8 * b);
    }
    return bits;
}

}  // namespace

SampledTable load_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open sampled table " + path.string());
    }
    const std::uint64_t count = read_le(in);
    if (count < 2 || count > (std::uint64_t{1} << 32)) {
        throw std::runtime_error("sampled table has an invalid sample count");
    }
    SampledTable table;
    table.t_samples.resize(count);
    table.values.resize(count);
    for (std::uint64_t j = 0; j < count; ++j) {
        table.t_samples[j] = std::bit_cast<double>(read_le(in));
        table.values[j] = std::bit_cast<double>(read_le(in));
    }
    validate(table);
    return table;
}

void save_table(const SampledTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write sampled table " + path.string());
    }
    write_le(out, table.t_samples.size());
    for (size_t j = 0; j < table.t_samples.size(); ++j) {
        write_le(out, std::bit_cast<std::uint64_t>(table.t_samples[j]));
        write_le(out, std::bit_cast<std::uint64_t>(table.values[j]));
    }
}

void validate(const UnaryModel& unary) {
    std::visit(
        Overloaded{
            [](const QuadraticUnary& q) {
                if (!(q.weight >= 0.0)) {
                    throw std::invalid_argument("quadratic unary weight must be nonnegative");
                }
            },
            [](const TruncatedQuadraticMixture& m) {
                if (m.terms.empty()) {
                    throw std::invalid_argument("mixture unary needs at least one term");
                }
                for (const auto& term : m.terms) {
                    if (!(term.nu > 0.0) || !(term.alpha > 0.0)) {
                        throw std::invalid_argument("mixture terms need nu > 0 and alpha > 0");
                    }
                }
            },
            [](const SampledTable& s) {
                if (s.t_samples.size() < 2 || s.t_samples.size() != s.values.size()) {
                    throw std::invalid_argument("sampled table needs >= 2 matching samples");
                }
                for (size_t j = 1; j < s.t_samples.size(); ++j) {
                    if (!(s.t_samples[j] > s.t_samples[j - 1])) {
                        throw std::invalid_argument("sampled table abscissae must increase");
                    }
                }
            },
        },
        unary);
}

}  // namespace sublift
