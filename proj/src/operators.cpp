#include "sublift/operators.hpp"

#include <stdexcept>

namespace sublift {

namespace {

void check_shapes(std::size_t scalar, std::size_t vector, int width, int height) {
    const auto pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (width < 1 || height < 1 || scalar != pixels || vector != 2 * pixels) {
        throw std::invalid_argument("finite differences: field size does not match the geometry");
    }
}

void gradient_rows(const double* u, int width, int height, double* grad, int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
        for (int x = 0; x < width; ++x) {
            const auto p = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                           static_cast<std::size_t>(x);
            detail::grad_at(u, width, height, x, y, 1, 0, grad[2 * p], grad[2 * p + 1]);
        }
    }
}

void divergence_rows(const double* p, int width, int height, double* div, int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
        for (int x = 0; x < width; ++x) {
            const auto q = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                           static_cast<std::size_t>(x);
            div[q] = detail::div_at(p, width, height, x, y, 1, 0);
        }
    }
}

}  // namespace

void gradient(std::span<const double> u, int width, int height, std::span<double> grad) {
    check_shapes(u.size(), grad.size(), width, height);
    gradient_rows(u.data(), width, height, grad.data(), 0, height);
}

void divergence(std::span<const double> p, int width, int height, std::span<double> div) {
    check_shapes(div.size(), p.size(), width, height);
    divergence_rows(p.data(), width, height, div.data(), 0, height);
}

void gradient_omp(std::span<const double> u, int width, int height, std::span<double> grad) {
    check_shapes(u.size(), grad.size(), width, height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        gradient_rows(u.data(), width, height, grad.data(), y, y + 1);
    }
}

void divergence_omp(std::span<const double> p, int width, int height, std::span<double> div) {
    check_shapes(div.size(), p.size(), width, height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        divergence_rows(p.data(), width, height, div.data(), y, y + 1);
    }
}

}  // namespace sublift
