#include "einsel/operators.hpp"

#include <stdexcept>

namespace einsel {

namespace {
constexpr double kHermTol = 1e-12;
constexpr double kRoundTripTol = 1e-10;
}

HermitianOperator::HermitianOperator(Register reg, Eigen::MatrixXcd matrix)
    : reg_(std::move(reg)), m_(std::move(matrix)), cache_(std::make_shared<Cache>()) {
    if (m_.rows() != m_.cols() || static_cast<std::size_t>(m_.rows()) != reg_.dim())
        throw std::invalid_argument("operator: shape does not match register dimension");
    if (max_abs_diff(m_, m_.adjoint().eval()) > kHermTol)
        throw std::invalid_argument("operator: not Hermitian");
}

const HermitianOperator::Spectral& HermitianOperator::spectral() const {
    std::call_once(cache_->once, [this] {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("operator: eigendecomposition failed");
        auto s = std::make_unique<Spectral>();
        s->values = solver.eigenvalues();
        s->vectors = solver.eigenvectors();
        const Eigen::MatrixXcd rebuilt =
            s->vectors * s->values.asDiagonal() * s->vectors.adjoint();
        if (max_abs_diff(rebuilt, m_) > kRoundTripTol)
            throw std::runtime_error("operator: spectral round-trip beyond tolerance");
        cache_->value = std::move(s);
    });
    return *cache_->value;
}

HermitianOperator HermitianOperator::scaled(double factor) const {
    return HermitianOperator(reg_, m_ * factor);
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
    if (!a.reg().same_layout(b.reg()))
        throw std::invalid_argument("operator sum: register layouts differ");
    return HermitianOperator(a.reg(), a.matrix() + b.matrix());
}

PureState evolve_exact(const HermitianOperator& h, double t, const PureState& psi0) {
    if (!h.reg().same_layout(psi0.reg()))
        throw std::invalid_argument("evolve: operator and state registers differ");
    const Eigen::VectorXd& e = h.eigenvalues();
    const Eigen::MatrixXcd& v = h.eigenvectors();
    Eigen::VectorXcd coeffs = v.adjoint() * psi0.amplitudes();
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
        coeffs(i) *= std::exp(Complex(0.0, -e(i) * t));
    return PureState(psi0.reg(), v * coeffs);
}

Eigen::MatrixXcd propagator(const HermitianOperator& h, double t) {
    const Eigen::VectorXd& e = h.eigenvalues();
    const Eigen::MatrixXcd& v = h.eigenvectors();
    Eigen::VectorXcd phases(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i)
        phases(i) = std::exp(Complex(0.0, -e(i) * t));
    return v * phases.asDiagonal() * v.adjoint();
}

bool commutes(const HermitianOperator& a, const HermitianOperator& b, double tol) {
    if (!a.reg().same_layout(b.reg()))
        throw std::invalid_argument("commutes: register layouts differ; embed first");
    const Eigen::MatrixXcd ab = a.matrix() * b.matrix();
    const Eigen::MatrixXcd ba = b.matrix() * a.matrix();
    return max_abs_diff(ab, ba) <= tol;
}

HermitianOperator embed(const HermitianOperator& op, const Register& target) {
    const Register& small = op.reg();
    std::vector<std::size_t> pos(small.count());
    for (std::size_t i = 0; i < small.count(); ++i) {
        pos[i] = target.position(small.at(i).label);
        if (target.at(pos[i]).dim != small.at(i).dim)
            throw std::invalid_argument("embed: dimension mismatch for label " + small.at(i).label);
    }

    const std::size_t d_small = small.dim();
    const std::size_t d_target = target.dim();
    const std::size_t d_rest = d_target / d_small;

    // target offsets of each small basis index
    std::vector<std::size_t> small_offset(d_small, 0);
    for (std::size_t a = 0; a < d_small; ++a)
        for (std::size_t i = 0; i < small.count(); ++i)
            small_offset[a] += small.digit(a, i) * target.stride(pos[i]);

    // enumerate the complementary subsystems
    std::vector<std::size_t> rest_pos;
    for (std::size_t i = 0; i < target.count(); ++i) {
        bool used = false;
        for (std::size_t p : pos) used |= (p == i);
        if (!used) rest_pos.push_back(i);
    }

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d_target),
                                                  static_cast<Eigen::Index>(d_target));
    const Eigen::MatrixXcd& m = op.matrix();
    for (std::size_t r = 0; r < d_rest; ++r) {
        std::size_t base = 0, rem = r;
        for (std::size_t j = rest_pos.size(); j-- > 0;) {
            const std::size_t dim_j = target.at(rest_pos[j]).dim;
            base += (rem % dim_j) * target.stride(rest_pos[j]);
            rem /= dim_j;
        }
        for (std::size_t a = 0; a < d_small; ++a)
            for (std::size_t b = 0; b < d_small; ++b)
                out(static_cast<Eigen::Index>(base + small_offset[a]),
                    static_cast<Eigen::Index>(base + small_offset[b])) =
                    m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
    return HermitianOperator(target, std::move(out));
}

}  // namespace einsel
