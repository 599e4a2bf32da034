#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace sublift {

// Smooth regularizers eta(g), convex in the spatial gradient g.

/// eta(g) = weight * |g|^2
struct SquaredNorm {
    double weight = 1.0;
};
/// eta(g) = weight * |g|
struct Norm {
    double weight = 1.0;
};
/// eta(g) = weight * huber_eps(|g|), huber_eps(s) = s^2/(2 eps) below eps, s - eps/2 above.
struct Huber {
    double weight = 1.0;
    double threshold = 0.1;
};

using Eta = std::variant<SquaredNorm, Norm, Huber>;

// Concave jump penalties kappa(a), a = jump height >= 0.

/// kappa(a) = slope * a (total variation)
struct LinearJump {
    double slope = 1.0;
};
/// kappa(a) = lambda * [a > 0] (Mumford-Shah)
struct ConstantJump {
    double lambda = 1.0;
};
/// kappa(a) = min(slope * a, cap)
struct TruncatedLinearJump {
    double slope = 1.0;
    double cap = 1.0;
};
/// Piecewise linear through (heights[m], values[m]); heights[0] = 0,
/// values[0] = 0, held constant past the last sample.
struct JumpTable {
    std::vector<double> heights;
    std::vector<double> values;
};
/// kappa = +inf for every nonzero jump: purely convex models.
struct NoJumps {};

using Kappa = std::variant<LinearJump, ConstantJump, TruncatedLinearJump, JumpTable, NoJumps>;

/// eta*(p) = quad * |p|^2 + indicator(|p| <= radius).
struct EtaConjugate {
    double quad = 0.0;
    double radius = std::numeric_limits<double>::infinity();
};

struct RegularizerSpec {
    Eta eta = SquaredNorm{};
    Kappa kappa = NoJumps{};
};

double eta_value(const Eta& eta, double gx, double gy);
/// Value along a single axis (used by the edge-wise energy surrogate).
double eta_value_1d(const Eta& eta, double g);
EtaConjugate eta_conjugate(const Eta& eta);
bool is_one_homogeneous(const Eta& eta);

double kappa_value(const Kappa& kappa, double a);
bool has_jumps(const Kappa& kappa);
/// kappa(a) = slope * a for all a: the total variation reduction applies.
bool is_linear(const Kappa& kappa);

/// Throws std::invalid_argument if eta has a negative weight or kappa is not
/// concave with kappa(0) = 0 and kappa(a) > 0 for a > 0.
void validate(const RegularizerSpec& reg);

std::string describe(const Eta& eta);
std::string describe(const Kappa& kappa);

}  // namespace sublift
