#include "einsel/state.hpp"

#include <cmath>
#include <stdexcept>

namespace einsel {

namespace {
constexpr double kNormTol = 1e-12;
constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPsdTol = -1e-12;
}

PureState::PureState(Register reg, Eigen::VectorXcd amplitudes)
    : reg_(std::move(reg)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != reg_.dim())
        throw std::invalid_argument("pure state: amplitude count does not match register dimension");
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > kNormTol)
        throw std::invalid_argument("pure state: not normalized");
    amps_ /= norm;
}

DensityMatrix::DensityMatrix(Register reg, Eigen::MatrixXcd matrix)
    : reg_(std::move(reg)), m_(std::move(matrix)) {
    if (m_.rows() != m_.cols() || static_cast<std::size_t>(m_.rows()) != reg_.dim())
        throw std::invalid_argument("density matrix: shape does not match register dimension");
    if (max_abs_diff(m_, m_.adjoint().eval()) > kHermTol)
        throw std::invalid_argument("density matrix: not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > kTraceTol || std::abs(m_.trace().imag()) > kTraceTol)
        throw std::invalid_argument("density matrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("density matrix: eigenvalue computation failed");
    eigenvalues_ = solver.eigenvalues();
    if (eigenvalues_.minCoeff() < kPsdTol)
        throw std::invalid_argument("density matrix: negative eigenvalue beyond tolerance");
}

DensityMatrix outer(const PureState& psi) {
    return DensityMatrix(psi.reg(), psi.amplitudes() * psi.amplitudes().adjoint());
}

PureState phase_gauged(const PureState& psi) {
    const auto& v = psi.amplitudes();
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    if (best_mag <= 0.0) return psi;
    const Complex phase = std::conj(v(best)) / best_mag;
    return PureState(psi.reg(), v * phase);
}

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

double max_abs_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace einsel
