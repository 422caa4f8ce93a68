#include "einsel/bitmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace einsel {

namespace {
constexpr double kNormTol = 1e-12;
}

BitModelConfig::BitModelConfig(Complex a_, Complex b_, double g_) : a(a_), b(b_), g(g_) {
    if (!(g > 0.0)) throw std::invalid_argument("bit model: coupling g must be positive");
    const double n2 = std::norm(a) + std::norm(b);
    if (std::abs(n2 - 1.0) > kNormTol)
        throw std::invalid_argument("bit model: spin amplitudes must be normalized");
}

Register pair_register() { return Register::qubits({"atom", "spin"}); }

HermitianOperator h_as(double g) {
    if (!(g > 0.0)) throw std::invalid_argument("h_as: coupling g must be positive");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    // kron([[0, i], [-i, 0]], diag(1, -1)) scaled by g.
    m(0, 2) = Complex(0, g);
    m(1, 3) = Complex(0, -g);
    m(2, 0) = Complex(0, -g);
    m(3, 1) = Complex(0, g);
    return HermitianOperator(pair_register(), std::move(m));
}

PureState initial_bitbit(const BitModelConfig& cfg) {
    return tensor({single("atom", qb::xp()), single("spin", {cfg.a, cfg.b})});
}

PureState evolve_bitbit(const BitModelConfig& cfg, double t) {
    const double up = M_PI / 4.0 + cfg.g * t;
    const double down = M_PI / 4.0 - cfg.g * t;
    Eigen::VectorXcd v(4);
    v(0) = cfg.a * std::sin(up);
    v(1) = cfg.b * std::sin(down);
    v(2) = cfg.a * std::cos(up);
    v(3) = cfg.b * std::cos(down);
    return PureState(pair_register(), std::move(v));
}

DensityMatrix rho_pure_as(const BitModelConfig& cfg) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = std::norm(cfg.a);
    m(3, 3) = std::norm(cfg.b);
    m(0, 3) = cfg.a * std::conj(cfg.b);
    m(3, 0) = std::conj(cfg.a) * cfg.b;
    return DensityMatrix(pair_register(), std::move(m));
}

DensityMatrix rho_mix_as(const BitModelConfig& cfg) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = std::norm(cfg.a);
    m(3, 3) = std::norm(cfg.b);
    return DensityMatrix(pair_register(), std::move(m));
}

}  // namespace einsel
