#include "sublift/regularizers.hpp"

#include "sublift/detail/overloaded.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sublift {

namespace {

using detail::Overloaded;

double huber(double s, double eps) { return s <= eps ? s * s / (2.0 * eps) : s - 0.5 * eps; }

}  // namespace

double eta_value(const Eta& eta, double gx, double gy) {
    const double n2 = gx * gx + gy * gy;
    return std::visit(Overloaded{
                          [n2](const SquaredNorm& e) { return e.weight * n2; },
                          [n2](const Norm& e) { return e.weight * std::sqrt(n2); },
                          [n2](const Huber& e) { return e.weight * huber(std::sqrt(n2), e.threshold); },
                      },
                      eta);
}

double eta_value_1d(const Eta& eta, double g) { return eta_value(eta, g, 0.0); }

EtaConjugate eta_conjugate(const Eta& eta) {
    return std::visit(Overloaded{
                          [](const SquaredNorm& e) {
                              // weight 0 means no smooth penalty: eta* is the indicator of {0}
                              if (e.weight <= 0.0) {
                                  return EtaConjugate{0.0, 0.0};
                              }
                              return EtaConjugate{1.0 / (4.0 * e.weight),
                                                  std::numeric_limits<double>::infinity()};
                          },
                          [](const Norm& e) { return EtaConjugate{0.0, e.weight}; },
                          [](const Huber& e) {
                              if (e.weight <= 0.0) {
                                  return EtaConjugate{0.0, 0.0};
                              }
                              return EtaConjugate{e.threshold / (2.0 * e.weight), e.weight};
                          },
                      },
                      eta);
}

bool is_one_homogeneous(const Eta& eta) { return std::holds_alternative<Norm>(eta); }

double kappa_value(const Kappa& kappa, double a) {
    if (a <= 0.0) {
        return 0.0;
    }
    return std::visit(Overloaded{
                          [a](const LinearJump& k) { return k.slope * a; },
                          [](const ConstantJump& k) { return k.lambda; },
                          [a](const TruncatedLinearJump& k) { return std::min(k.slope * a, k.cap); },
                          [a](const JumpTable& k) {
                              const auto& hs = k.heights;
                              const auto& vs = k.values;
                              if (a >= hs.back()) {
                                  return vs.back();
                              }
                              const auto it = std::upper_bound(hs.begin(), hs.end(), a);
                              const auto j = static_cast<size_t>(it - hs.begin());
                              const double w = (a - hs[j - 1]) / (hs[j] - hs[j - 1]);
                              return (1.0 - w) * vs[j - 1] + w * vs[j];
                          },
                          [](const NoJumps&) { return std::numeric_limits<double>::infinity(); },
                      },
                      kappa);
}

bool has_jumps(const Kappa& kappa) { return !std::holds_alternative<NoJumps>(kappa); }

bool is_linear(const Kappa& kappa) { return std::holds_alternative<LinearJump>(kappa); }

void validate(const RegularizerSpec& reg) {
    std::visit(Overloaded{
                   [](const SquaredNorm& e) {
                       if (!(e.weight >= 0.0)) throw std::invalid_argument("eta weight must be >= 0");
                   },
                   [](const Norm& e) {
                       if (!(e.weight > 0.0)) throw std::invalid_argument("eta weight must be > 0");
                   },
                   [](const Huber& e) {
                       if (!(e.weight >= 0.0) || !(e.threshold > 0.0)) {
                           throw std::invalid_argument("huber needs weight >= 0 and threshold > 0");
                       }
                   },
               },
               reg.eta);
    std::visit(Overloaded{
                   [](const LinearJump& k) {
                       if (!(k.slope > 0.0)) throw std::invalid_argument("kappa slope must be > 0");
                   },
                   [](const ConstantJump& k) {
                       if (!(k.lambda > 0.0)) throw std::invalid_argument("kappa lambda must be > 0");
                   },
                   [](const TruncatedLinearJump& k) {
                       if (!(k.slope > 0.0) || !(k.cap > 0.0)) {
                           throw std::invalid_argument("truncated kappa needs slope, cap > 0");
                       }
                   },
                   [](const JumpTable& k) {
                       const auto& hs = k.heights;
                       const auto& vs = k.values;
                       if (hs.size() < 2 || hs.size() != vs.size() || hs[0] != 0.0 || vs[0] != 0.0) {
                           throw std::invalid_argument("kappa table must start at (0, 0)");
                       }
                       for (size_t j = 1; j < hs.size(); ++j) {
                           if (!(hs[j] > hs[j - 1]) || !(vs[j] > 0.0)) {
                               throw std::invalid_argument("kappa table must be increasing in height and positive");
                           }
                       }
                       // concave: slopes nonincreasing (discrete second differences <= 0)
                       for (size_t j = 2; j < hs.size(); ++j) {
                           const double s0 = (vs[j - 1] - vs[j - 2]) / (hs[j - 1] - hs[j - 2]);
                           const double s1 = (vs[j] - vs[j - 1]) / (hs[j] - hs[j - 1]);
                           if (s1 > s0 + 1e-12 * std::max(1.0, std::abs(s0))) {
                               throw std::invalid_argument("kappa table is not concave");
                           }
                       }
                   },
                   [](const NoJumps&) {},
               },
               reg.kappa);
}

std::string describe(const Eta& eta) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const SquaredNorm& e) { os << "squared_norm(" << e.weight << ")"; },
                   [&](const Norm& e) { os << "norm(" << e.weight << ")"; },
                   [&](const Huber& e) { os << "huber(" << e.weight << "," << e.threshold << ")"; },
               },
               eta);
    return os.str();
}

std::string describe(const Kappa& kappa) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const LinearJump& k) { os << "linear(" << k.slope << ")"; },
                   [&](const ConstantJump& k) { os << "constant(" << k.lambda << ")"; },
                   [&](const TruncatedLinearJump& k) {
                       os << "truncated_linear(" << k.slope << "," << k.cap << ")";
                   },
                   [&](const JumpTable& k) { os << "table(" << k.heights.size() << ")"; },
                   [&](const NoJumps&) { os << "none"; },
               },
               kappa);
    return os.str();
}

}  // namespace sublift
