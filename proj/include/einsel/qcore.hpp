#pragma once

#include <optional>
#include <vector>

#include "einsel/operators.hpp"

// Register-level kinematics: products, reductions, factorization tests, and
// relative-state decompositions. Everything here is exact linear algebra;
// model-specific closed forms live in their own headers and are validated
// against these primitives.

namespace einsel {

// Named single-qubit states and gates. z0/z1 is the computational pair; the
// x and y pairs are the usual conjugate bases.
namespace qb {

inline Eigen::Vector2cd z0() { return {Complex(1, 0), Complex(0, 0)}; }
inline Eigen::Vector2cd z1() { return {Complex(0, 0), Complex(1, 0)}; }
inline Eigen::Vector2cd xp() { return {Complex(M_SQRT1_2, 0), Complex(M_SQRT1_2, 0)}; }
inline Eigen::Vector2cd xm() { return {Complex(M_SQRT1_2, 0), Complex(-M_SQRT1_2, 0)}; }
inline Eigen::Vector2cd yp() { return {Complex(M_SQRT1_2, 0), Complex(0, M_SQRT1_2)}; }
inline Eigen::Vector2cd ym() { return {Complex(M_SQRT1_2, 0), Complex(0, -M_SQRT1_2)}; }

inline Eigen::Matrix2cd id() { return Eigen::Matrix2cd::Identity(); }
inline Eigen::Matrix2cd px() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}
inline Eigen::Matrix2cd py() {
    Eigen::Matrix2cd m;
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}
inline Eigen::Matrix2cd pz() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}
inline Eigen::Matrix2cd hadamard() {
    Eigen::Matrix2cd m;
    m << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2;
    return m;
}

}  // namespace qb

// Single-subsystem pure state, the tensor() building block.
PureState single(const std::string& label, const Eigen::Vector2cd& amplitudes);

// Kronecker product; the result register concatenates the factors' registers
// in argument order (first factor most significant). Throws on label
// collisions.
PureState tensor(const std::vector<PureState>& factors);

// Reduced density matrix over the kept labels (a set; the reduced register
// preserves the source register's order).
DensityMatrix partial_trace(const PureState& psi, const std::vector<std::string>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

// Tr rho^2 in (0, 1]; 1 exactly on pure states.
double purity(const DensityMatrix& rho);

struct ProductCheck {
    bool is_product = false;
    // Schmidt rank of each partition block's cut (eigenvalues above 1e-10).
    std::vector<std::size_t> block_ranks;
};

// True iff every block's reduced state is pure to within 1e-10 of its top
// eigenvalue.
ProductCheck is_product(const PureState& psi, const Partition& partition);

struct RelativeStateDecomposition {
    Register apparatus_reg;
    Register system_reg;
    std::vector<Eigen::VectorXcd> apparatus_basis;
    // b_p = norm of the partial inner product <A_p|psi> (real >= 0).
    std::vector<Complex> coefficients;
    // Normalized relative states; empty optional marks a b_p = 0 branch.
    std::vector<std::optional<PureState>> relative_states;
};

// Decomposes psi over an orthonormal basis of the first block of a two-block
// cut: psi = sum_p b_p |A_p> (x) |rel_p>. Basis vectors are given in the
// apparatus sub-register's coordinates; orthonormality is checked to 1e-10
// and the basis must span the block.
RelativeStateDecomposition relative_states(const PureState& psi, const Partition& cut,
                                           const std::vector<Eigen::VectorXcd>& apparatus_basis);

// Applies a single-subsystem unitary in place of the labeled qubit.
PureState apply_local(const PureState& psi, const std::string& label, const Eigen::Matrix2cd& u);

}  // namespace einsel
