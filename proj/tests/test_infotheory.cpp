#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "einsel/bitmodel.hpp"
#include "einsel/infotheory.hpp"
#include "einsel/qcore.hpp"
#include "test_util.hpp"

using namespace einsel;

namespace {

const double kLn2 = std::log(2.0);
const double kLn4 = std::log(4.0);
// ln 2 + (3/4) ln (3/4) + (1/4) ln (1/4), the one-sided information of a
// sharp record with weights (3/4, 1/4)
const double kSkewInfo = 0.130812035941137;

DensityMatrix qubit_diag(double p) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = p;
    m(1, 1) = 1.0 - p;
    return DensityMatrix(Register::qubits({"spin"}), m);
}

}  // namespace

TEST_CASE("entropy vanishes for pure states and peaks on the flat mixture") {
    CHECK(std::abs(entropy(outer(single("spin", {Complex(0.6, 0), Complex(0, 0.8)})))) < 1e-12);
    CHECK(entropy(qubit_diag(0.5)) == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(entropy(qubit_diag(0.75)) == doctest::Approx(0.5623351446188083).epsilon(1e-12));
    // weights in the 0 ln 0 limit contribute exactly zero instead of NaN
    CHECK(entropy(qubit_diag(1.0)) == 0.0);
}

TEST_CASE("information is dimension minus entropy with the two standard pins") {
    const RandomStream s{60};
    std::uint64_t c = 0;
    const Register reg = Register::qubits({"p", "q"});
    const PureState psi(reg, testutil::random_unit_vector(s, c, 4));
    CHECK(info_total(outer(psi)) == doctest::Approx(kLn4).epsilon(1e-12));
    CHECK(std::abs(info_total(qubit_diag(0.5))) < 1e-12);
    CHECK(info_total(qubit_diag(0.75)) == doctest::Approx(kSkewInfo).epsilon(1e-12));
}

TEST_CASE("a product state keeps all information inside the blocks") {
    const PureState psi = tensor({single("atom", {Complex(1, 0), Complex(0, 0)}),
                                  single("spin", {Complex(M_SQRT1_2, 0), Complex(M_SQRT1_2, 0)})});
    const Partition cut(psi.reg(), {{"atom"}, {"spin"}});
    const InfoReport rep = info_report(psi, cut);
    CHECK(rep.total == doctest::Approx(kLn4).epsilon(1e-12));
    REQUIRE(rep.per_block.size() == 2);
    CHECK(rep.per_block[0] == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(rep.per_block[1] == doctest::Approx(kLn2).epsilon(1e-12));
    CHECK(rep.aggregate == doctest::Approx(kLn4).epsilon(1e-12));
    CHECK(std::abs(rep.correlation) < 1e-12);

    const InfoReport via_density = info_report(outer(psi), cut);
    CHECK(std::abs(via_density.total - rep.total) < 1e-12);
    CHECK(std::abs(via_density.correlation - rep.correlation) < 1e-12);
}

TEST_CASE("a completed balanced record moves all information into correlations") {
    const BitModelConfig cfg(Complex(M_SQRT1_2, 0), Complex(M_SQRT1_2, 0), 1.0);
    const PureState rec = evolve_bitbit(cfg, cfg.tau());
    const Partition cut(rec.reg(), {{"atom"}, {"spin"}});
    const InfoReport rep = info_report(rec, cut);
    CHECK(rep.total == doctest::Approx(kLn4).epsilon(1e-12));
    CHECK(std::abs(rep.per_block[0]) < 1e-12);
    CHECK(std::abs(rep.per_block[1]) < 1e-12);
    CHECK(std::abs(rep.aggregate) < 1e-12);
    CHECK(rep.correlation == doctest::Approx(kLn4).epsilon(1e-12));
}

TEST_CASE("a skewed record leaves the one-sided deficit in each block") {
    const Complex a(std::sqrt(0.75), 0.0), b(0.0, 0.5);
    const BitModelConfig cfg(a, b, 2.0);
    const PureState rec = evolve_bitbit(cfg, cfg.tau());
    const InfoReport rep = info_report(rec, Partition(rec.reg(), {{"atom"}, {"spin"}}));
    CHECK(rep.per_block[0] == doctest::Approx(kSkewInfo).epsilon(1e-12));
    CHECK(rep.per_block[1] == doctest::Approx(kSkewInfo).epsilon(1e-12));
    CHECK(rep.correlation == doctest::Approx(kLn4 - 2.0 * kSkewInfo).epsilon(1e-12));
}

TEST_CASE("correlation information of a pure state is never negative") {
    const RandomStream s{61};
    std::uint64_t c = 0;
    const Register reg = Register::qubits({"p", "q", "r"});
    for (int rep = 0; rep < 20; ++rep) {
        const PureState psi(reg, testutil::random_unit_vector(s, c, 8));
        CHECK(info_report(psi, Partition(reg, {{"p"}, {"q"}, {"r"}})).correlation >= -1e-10);
        CHECK(info_report(psi, Partition(reg, {{"p", "q"}, {"r"}})).correlation >= -1e-10);
    }
}

TEST_CASE("unitary evolution conserves total information") {
    const RandomStream s{62};
    std::uint64_t c = 0;
    const Register reg = Register::qubits({"p", "q", "r"});
    for (int rep = 0; rep < 5; ++rep) {
        const HermitianOperator h(reg, testutil::random_hermitian(s, c, 8));
        const PureState psi(reg, testutil::random_unit_vector(s, c, 8));
        CHECK(info_conservation_check(h, psi, {0.3, 1.1, 2.7, 6.9}) <= 1e-10);
    }
}

TEST_CASE("detection shifts information into correlations at constant total") {
    const BitModelConfig cfg(Complex(M_SQRT1_2, 0), Complex(M_SQRT1_2, 0), 1.0);
    const PureState psi0 = initial_bitbit(cfg);
    const HermitianOperator h = h_as(cfg.g);
    const Partition cut(psi0.reg(), {{"atom"}, {"spin"}});

    CHECK(info_conservation_check(h, psi0, {0.1, 0.3, cfg.tau(), 2.0}) <= 1e-10);
    CHECK(std::abs(info_report(psi0, cut).correlation) < 1e-12);
    const double at_tau = info_report(evolve_exact(h, cfg.tau(), psi0), cut).correlation;
    CHECK(at_tau == doctest::Approx(kLn4).epsilon(1e-12));
}

TEST_CASE("zero correlation coincides with a product split") {
    const BitModelConfig cfg(Complex(0.6, 0), Complex(0, 0.8), 1.0);
    const PureState product = initial_bitbit(cfg);
    const PureState entangled = evolve_bitbit(cfg, cfg.tau());
    const Partition cut(product.reg(), {{"atom"}, {"spin"}});
    CHECK(is_product(product, cut).is_product);
    CHECK(std::abs(info_report(product, cut).correlation) < 1e-12);
    CHECK(!is_product(entangled, cut).is_product);
    CHECK(info_report(entangled, cut).correlation > 0.1);
}

TEST_CASE("preparations validate weights and register layouts") {
    const PureState up = single("spin", {Complex(1, 0), Complex(0, 0)});
    const PureState down = single("spin", {Complex(0, 0), Complex(1, 0)});
    const PureState other = single("atom", {Complex(1, 0), Complex(0, 0)});
    using Comp = std::vector<std::pair<double, PureState>>;
    CHECK_THROWS_AS(Preparation(Comp{{0.5, up}, {0.6, down}}), std::invalid_argument);
    CHECK_THROWS_AS(Preparation(Comp{{-0.1, up}, {1.1, down}}), std::invalid_argument);
    CHECK_THROWS_AS(Preparation(Comp{{0.5, up}, {0.5, other}}), std::invalid_argument);
    CHECK_THROWS_AS(Preparation(Comp{}), std::invalid_argument);
    CHECK_NOTHROW(Preparation(Comp{{0.75, up}, {0.25, down}}));
}

TEST_CASE("distinct preparations can land on the same density matrix") {
    const PureState up = single("spin", {Complex(1, 0), Complex(0, 0)});
    const PureState down = single("spin", {Complex(0, 0), Complex(1, 0)});
    const PureState plus = single("spin", {Complex(M_SQRT1_2, 0), Complex(M_SQRT1_2, 0)});
    const PureState minus = single("spin", {Complex(M_SQRT1_2, 0), Complex(-M_SQRT1_2, 0)});

    const DensityMatrix a = ensemble_density(Preparation({{0.75, up}, {0.25, down}}));
    const DensityMatrix b =
        ensemble_density(Preparation({{0.5, up}, {0.25, plus}, {0.25, minus}}));
    CHECK(max_abs_diff(a.matrix(), b.matrix()) <= 1e-12);
    CHECK(std::abs(a.matrix()(0, 0).real() - 0.75) < 1e-12);
    CHECK(std::abs(entropy(a) - entropy(b)) < 1e-12);

    const Partition whole(a.reg(), {{"spin"}});
    const InfoReport ra = info_report(a, whole), rb = info_report(b, whole);
    CHECK(std::abs(ra.total - rb.total) < 1e-12);
    CHECK(std::abs(ra.correlation) < 1e-12);
}

TEST_CASE("a single-component preparation is the pure projector") {
    const PureState psi = single("spin", {Complex(0.6, 0), Complex(0, 0.8)});
    CHECK(max_abs_diff(ensemble_density(Preparation({{1.0, psi}})).matrix(),
                       outer(psi).matrix()) < 1e-15);
}
