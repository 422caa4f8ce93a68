#include "einsel/qcore.hpp"

#include <stdexcept>

namespace einsel {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kOrthoTol = 1e-10;
constexpr double kNullBranchTol = 1e-12;

// Basis-index offsets contributed by the listed positions, enumerated in
// register order over those positions' digits.
std::vector<std::size_t> offsets_for(const Register& reg, const std::vector<std::size_t>& pos) {
    std::size_t d = 1;
    for (std::size_t p : pos) d *= reg.at(p).dim;
    std::vector<std::size_t> out(d, 0);
    for (std::size_t lin = 0; lin < d; ++lin) {
        std::size_t rem = lin;
        for (std::size_t j = pos.size(); j-- > 0;) {
            const std::size_t dim_j = reg.at(pos[j]).dim;
            out[lin] += (rem % dim_j) * reg.stride(pos[j]);
            rem /= dim_j;
        }
    }
    return out;
}

struct SplitPositions {
    std::vector<std::size_t> keep;
    std::vector<std::size_t> rest;
};

SplitPositions split_positions(const Register& reg, const std::vector<std::string>& keep_labels) {
    Register sub = reg.subset(keep_labels);  // validates labels, dedups order
    SplitPositions out;
    for (std::size_t i = 0; i < reg.count(); ++i) {
        if (sub.contains(reg.at(i).label))
            out.keep.push_back(i);
        else
            out.rest.push_back(i);
    }
    return out;
}

}  // namespace

PureState single(const std::string& label, const Eigen::Vector2cd& amplitudes) {
    return PureState(Register::qubits({label}), amplitudes);
}

PureState tensor(const std::vector<PureState>& factors) {
    if (factors.empty()) throw std::invalid_argument("tensor: no factors");
    std::vector<Subsystem> subs;
    for (const auto& f : factors)
        for (const auto& s : f.reg().subsystems()) subs.push_back(s);
    Register reg(std::move(subs));  // rejects label collisions

    Eigen::VectorXcd amps = factors[0].amplitudes();
    for (std::size_t i = 1; i < factors.size(); ++i) {
        const Eigen::VectorXcd& b = factors[i].amplitudes();
        Eigen::VectorXcd next(amps.size() * b.size());
        for (Eigen::Index j = 0; j < amps.size(); ++j)
            next.segment(j * b.size(), b.size()) = amps(j) * b;
        amps = std::move(next);
    }
    return PureState(std::move(reg), std::move(amps));
}

DensityMatrix partial_trace(const PureState& psi, const std::vector<std::string>& keep) {
    const Register& reg = psi.reg();
    const SplitPositions pos = split_positions(reg, keep);
    const auto keep_off = offsets_for(reg, pos.keep);
    const auto rest_off = offsets_for(reg, pos.rest);
    const std::size_t dk = keep_off.size();

    const Eigen::VectorXcd& v = psi.amplitudes();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dk),
                                                  static_cast<Eigen::Index>(dk));
    for (std::size_t r = 0; r < dk; ++r)
        for (std::size_t c = 0; c < dk; ++c) {
            Complex sum = 0;
            for (std::size_t e : rest_off)
                sum += v(static_cast<Eigen::Index>(keep_off[r] + e)) *
                       std::conj(v(static_cast<Eigen::Index>(keep_off[c] + e)));
            rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
        }
    return DensityMatrix(reg.subset(keep), std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
    const Register& reg = rho.reg();
    const SplitPositions pos = split_positions(reg, keep);
    const auto keep_off = offsets_for(reg, pos.keep);
    const auto rest_off = offsets_for(reg, pos.rest);
    const std::size_t dk = keep_off.size();

    const Eigen::MatrixXcd& m = rho.matrix();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dk),
                                                  static_cast<Eigen::Index>(dk));
    for (std::size_t r = 0; r < dk; ++r)
        for (std::size_t c = 0; c < dk; ++c) {
            Complex sum = 0;
            for (std::size_t e : rest_off)
                sum += m(static_cast<Eigen::Index>(keep_off[r] + e),
                         static_cast<Eigen::Index>(keep_off[c] + e));
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
        }
    return DensityMatrix(reg.subset(keep), std::move(out));
}

double purity(const DensityMatrix& rho) {
    // Tr rho^2 = sum |rho_ij|^2 for Hermitian rho.
    return rho.matrix().squaredNorm();
}

ProductCheck is_product(const PureState& psi, const Partition& partition) {
    ProductCheck out;
    out.is_product = true;
    for (const auto& block : partition.blocks()) {
        const DensityMatrix reduced = partial_trace(psi, block);
        const Eigen::VectorXd& ev = reduced.eigenvalues();
        std::size_t rank = 0;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev(i) > kRankTol) ++rank;
        out.block_ranks.push_back(rank);
        if (ev.maxCoeff() < 1.0 - kRankTol) out.is_product = false;
    }
    return out;
}

RelativeStateDecomposition relative_states(const PureState& psi, const Partition& cut,
                                           const std::vector<Eigen::VectorXcd>& apparatus_basis) {
    if (cut.block_count() != 2)
        throw std::invalid_argument("relative states: cut must have exactly two blocks");
    const Register& reg = psi.reg();
    const Register app_reg = reg.subset(cut.blocks()[0]);
    const Register sys_reg = reg.subset(cut.blocks()[1]);
    const std::size_t da = app_reg.dim();
    const std::size_t ds = sys_reg.dim();

    if (apparatus_basis.size() != da)
        throw std::invalid_argument("relative states: basis must span the apparatus block");
    for (std::size_t p = 0; p < da; ++p) {
        if (static_cast<std::size_t>(apparatus_basis[p].size()) != da)
            throw std::invalid_argument("relative states: basis vector dimension mismatch");
        for (std::size_t q = 0; q <= p; ++q) {
            const Complex ip = apparatus_basis[q].adjoint() * apparatus_basis[p];
            const double expect = (p == q) ? 1.0 : 0.0;
            if (std::abs(ip - expect) > kOrthoTol)
                throw std::invalid_argument("relative states: basis is not orthonormal");
        }
    }

    std::vector<std::size_t> app_pos, sys_pos;
    for (std::size_t i = 0; i < reg.count(); ++i) {
        if (app_reg.contains(reg.at(i).label))
            app_pos.push_back(i);
        else
            sys_pos.push_back(i);
    }
    const auto app_off = offsets_for(reg, app_pos);
    const auto sys_off = offsets_for(reg, sys_pos);

    RelativeStateDecomposition out;
    out.apparatus_reg = app_reg;
    out.system_reg = sys_reg;
    out.apparatus_basis = apparatus_basis;
    const Eigen::VectorXcd& v = psi.amplitudes();
    for (std::size_t p = 0; p < da; ++p) {
        Eigen::VectorXcd partial = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ds));
        for (std::size_t s = 0; s < ds; ++s) {
            Complex sum = 0;
            for (std::size_t a = 0; a < da; ++a)
                sum += std::conj(apparatus_basis[p](static_cast<Eigen::Index>(a))) *
                       v(static_cast<Eigen::Index>(app_off[a] + sys_off[s]));
            partial(static_cast<Eigen::Index>(s)) = sum;
        }
        const double norm = partial.norm();
        out.coefficients.push_back(Complex(norm, 0.0));
        if (norm <= kNullBranchTol)
            out.relative_states.push_back(std::nullopt);
        else
            out.relative_states.push_back(PureState(sys_reg, partial / norm));
    }
    return out;
}

PureState apply_local(const PureState& psi, const std::string& label, const Eigen::Matrix2cd& u) {
    if ((u * u.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("apply_local: matrix is not unitary");
    const Register& reg = psi.reg();
    const std::size_t p = reg.position(label);
    if (reg.at(p).dim != 2)
        throw std::invalid_argument("apply_local: subsystem is not two-level");
    const std::size_t st = reg.stride(p);

    Eigen::VectorXcd v = psi.amplitudes();
    for (std::size_t i = 0; i < reg.dim(); ++i) {
        if (reg.digit(i, p) != 0) continue;
        const Eigen::Index i0 = static_cast<Eigen::Index>(i);
        const Eigen::Index i1 = static_cast<Eigen::Index>(i + st);
        const Complex a0 = v(i0), a1 = v(i1);
        v(i0) = u(0, 0) * a0 + u(0, 1) * a1;
        v(i1) = u(1, 0) * a0 + u(1, 1) * a1;
    }
    return PureState(reg, std::move(v));
}

}  // namespace einsel
