#pragma once

#include <cstddef>
#include <span>

namespace sublift {

/// Forward differences with Neumann boundary on a W x H field stored row
/// by row. The output holds (dx, dy) pairs per pixel; differences across
/// the last column or row are zero.
void gradient(std::span<const double> u, int width, int height, std::span<double> grad);

/// Negative adjoint of gradient: <grad u, p> = -<u, div p>.
void divergence(std::span<const double> p, int width, int height, std::span<double> div);

/// Parallel versions of the two operators above; identical results.
void gradient_omp(std::span<const double> u, int width, int height, std::span<double> grad);
void divergence_omp(std::span<const double> p, int width, int height, std::span<double> div);

namespace detail {

// Strided helpers shared by the solver kernels: fields with `stride`
// entries per pixel, component `comp`.

inline void grad_at(const double* u, int width, int height, int x, int y, std::size_t stride,
                    std::size_t comp, double& gx, double& gy) {
    const std::size_t p = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                           static_cast<std::size_t>(x)) *
                              stride +
                          comp;
    const double c = u[p];
    gx = x + 1 < width ? u[p + stride] - c : 0.0;
    gy = y + 1 < height ? u[p + stride * static_cast<std::size_t>(width)] - c : 0.0;
}

// p holds 2 components per (pixel, slot) with `slots` slots per pixel.
inline double div_at(const double* p, int width, int height, int x, int y, std::size_t slots,
                     std::size_t slot) {
    const std::size_t stride = 2 * slots;
    const std::size_t base = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                              static_cast<std::size_t>(x)) *
                                 stride +
                             2 * slot;
    double d = 0.0;
    if (x + 1 < width) {
        d += p[base];
    }
    if (x > 0) {
        d -= p[base - stride];
    }
    if (y + 1 < height) {
        d += p[base + 1];
    }
    if (y > 0) {
        d -= p[base + 1 - stride * static_cast<std::size_t>(width)];
    }
    return d;
}

}  // namespace detail

}  // namespace sublift
