#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sublift {

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    double worst = 0.0;  // largest observed discrepancy
    std::string note;
    [[nodiscard]] bool passed() const { return failures == 0 && cases > 0; }
};

// Property suites for the discretization's equivalence results. Each draws
// its instances from mt19937_64(seed) and is deterministic.

/// Partial-sum jump constraints vs. the continuum (a, b) family on a 21 x 21 grid.
SuiteResult suite_jump_reduction(std::uint64_t seed, int instances);
/// Piecewise constant duals with one-homogeneous eta reduce to min-pooled label capacities.
SuiteResult suite_min_pooling(std::uint64_t seed, int instances);
/// Epigraph split form vs. sampled infimum form of the interval constraints.
SuiteResult suite_epigraph_split(std::uint64_t seed, int instances);
/// Total variation: full constraint set vs. independent per-interval balls.
SuiteResult suite_tv_balls(std::uint64_t seed, int instances);
/// Dual evaluation of the sublabel data term vs. its brute-force primal form.
SuiteResult suite_dataterm_primal(std::uint64_t seed, int instances);
/// Two-label lifted solve vs. the unlifted infimal-convolution solve.
SuiteResult suite_infconv(std::uint64_t seed, int instances);

std::vector<SuiteResult> run_selftest(std::uint64_t seed = 2024);
void print_selftest(std::ostream& out, const std::vector<SuiteResult>& results);

}  // namespace sublift
