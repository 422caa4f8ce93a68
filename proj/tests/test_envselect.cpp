#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "einsel/envselect.hpp"
#include "einsel/qcore.hpp"
#include "test_util.hpp"

using namespace einsel;

namespace {

double gauged_diff(const PureState& x, const PureState& y) {
    return max_abs_diff(phase_gauged(x).amplitudes(), phase_gauged(y).amplitudes());
}

EnvironmentSpec random_spec(const RandomStream& s, std::uint64_t& c, std::size_t n) {
    std::vector<EnvAtom> atoms;
    for (std::size_t k = 0; k < n; ++k) {
        const double g = s.uniform01(c++);
        const double th = 2.0 * M_PI * s.uniform01(c++);
        const double ph = 2.0 * M_PI * s.uniform01(c++);
        atoms.emplace_back(g, Complex(std::cos(th), 0.0), std::polar(std::sin(th), ph));
    }
    return EnvironmentSpec(std::move(atoms));
}

}  // namespace

TEST_CASE("environment atoms validate their amplitudes and couplings") {
    CHECK_THROWS_AS(EnvAtom(0.0, Complex(1, 0), Complex(0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(EnvAtom(1.0, Complex(1, 0), Complex(0.2, 0)), std::invalid_argument);
    CHECK_THROWS_AS(EnvAtom::from_gamma(1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(EnvAtom::from_gamma(1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(EnvironmentSpec({}), std::invalid_argument);

    const EnvAtom balanced = EnvAtom::from_gamma(0.5, 0.0);
    CHECK(std::abs(balanced.alpha - Complex(M_SQRT1_2, 0)) < 1e-15);
    CHECK(std::abs(balanced.beta - Complex(M_SQRT1_2, 0)) < 1e-15);
    CHECK(balanced.gamma() == doctest::Approx(0.0).epsilon(1e-15));

    const EnvAtom frozen = EnvAtom::from_gamma(0.5, 1.0);
    CHECK(std::abs(frozen.alpha - Complex(1, 0)) < 1e-15);
    CHECK(frozen.gamma() == doctest::Approx(1.0).epsilon(1e-15));

    const EnvAtom skew(2.0, Complex(0, 0.8), Complex(0.6, 0));
    CHECK(skew.gamma() == doctest::Approx(0.28).epsilon(1e-12));
}

TEST_CASE("registers lay out atom then spin then environment atoms") {
    CHECK(env_register(2).labels() == std::vector<std::string>{"atom", "spin", "env_1", "env_2"});
    CHECK(coupling_register(2).labels() == std::vector<std::string>{"atom", "env_1", "env_2"});
}

TEST_CASE("monitoring terms are diagonal mutually commuting couplings") {
    const EnvironmentSpec spec({EnvAtom::from_gamma(1.0, 0.3), EnvAtom::from_gamma(0.7, 0.9)});
    const HermitianOperator h1 = h_ae_k(1, spec);
    const HermitianOperator h2 = h_ae_k(2, spec);
    CHECK(commutes(h1, h2));
    CHECK(max_abs_diff(h_ae_total(spec).matrix(), h1.matrix() + h2.matrix()) == 0.0);
    CHECK_THROWS_AS(h_ae_k(0, spec), std::domain_error);
    CHECK_THROWS_AS(h_ae_k(3, spec), std::domain_error);

    // single-atom spectrum is two levels, each twice
    const EnvironmentSpec one({EnvAtom::from_gamma(1.0, 0.0)});
    Eigen::VectorXd ev = h_ae_k(1, one).eigenvalues();
    std::vector<double> sorted(ev.data(), ev.data() + ev.size());
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(sorted[1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(sorted[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sorted[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("monitoring is nondemolition for the pointer but not for the detection coupling") {
    const EnvironmentSpec spec({EnvAtom::from_gamma(0.4, 0.0), EnvAtom::from_gamma(0.9, 0.5)});
    const Register cr = coupling_register(2);

    Eigen::Matrix2cd pointer_up = Eigen::Matrix2cd::Zero();
    pointer_up(0, 0) = 1.0;
    const HermitianOperator proj(Register::qubits({"atom"}), pointer_up);
    CHECK(commutes(h_ae_k(1, spec), embed(proj, cr)));
    CHECK(commutes(h_ae_k(2, spec), embed(proj, cr)));

    // the detection-stage coupling rotates the atom's pointer, so the two
    // stages do not commute; running them sequentially is what the closed
    // forms assume
    const Register er = env_register(2);
    const HermitianOperator detect = embed(h_as(1.0), er);
    const HermitianOperator monitor = embed(h_ae_total(spec), er);
    CHECK(!commutes(detect, monitor));
}

TEST_CASE("the closed form starts from the dressed record") {
    const Complex a(0.6, 0.0), b(0.0, 0.8);
    const EnvAtom e1(0.5, Complex(0.28, 0.0), Complex(0.0, 0.96));
    const EnvAtom e2(1.5, Complex(M_SQRT1_2, 0.0), Complex(M_SQRT1_2, 0.0));
    const EnvironmentSpec spec({e1, e2});

    Eigen::VectorXcd rec = Eigen::VectorXcd::Zero(4);
    rec(0) = a;
    rec(3) = b;
    const PureState want = tensor({PureState(pair_register(), rec),
                                   single("env_1", {e1.alpha, e1.beta}),
                                   single("env_2", {e2.alpha, e2.beta})});
    CHECK(max_abs_diff(evolve_env(spec, a, b, 0.0).amplitudes(), want.amplitudes()) < 1e-15);
    CHECK_THROWS_AS(evolve_env(spec, Complex(1, 0), Complex(0.3, 0), 1.0), std::invalid_argument);
}

TEST_CASE("closed-form monitoring matches the spectral propagator") {
    const RandomStream s{40};
    std::uint64_t c = 0;
    for (std::size_t n : {1, 2, 3, 5}) {
        const EnvironmentSpec spec = random_spec(s, c, n);
        const double th = 0.3 + 0.9 * s.uniform01(c++);
        const Complex a(std::cos(th), 0.0);
        const Complex b = std::polar(std::sin(th), 2.0 * M_PI * s.uniform01(c++));
        const double t = 15.0 * s.uniform01(c++);
        const HermitianOperator h = embed(h_ae_total(spec), env_register(n));
        const PureState oracle = evolve_exact(h, t, evolve_env(spec, a, b, 0.0));
        CHECK(gauged_diff(evolve_env(spec, a, b, t), oracle) < 1e-10);
    }
}

TEST_CASE("a frozen environment atom never entangles with the record") {
    const EnvironmentSpec spec({EnvAtom(0.8, Complex(1, 0), Complex(0, 0))});
    const Partition cut(env_register(1), {{"atom", "spin"}, {"env_1"}});
    for (double t : {0.0, 0.7, 2.9, 11.3}) {
        const PureState psi = evolve_env(spec, Complex(0.6, 0), Complex(0.8, 0), t);
        CHECK(is_product(psi, cut).is_product);
    }
}

TEST_CASE("a balanced environment atom reaches orthogonal branches at a quarter turn") {
    const double g = 0.9;
    const EnvironmentSpec spec({EnvAtom::from_gamma(g, 0.0)});
    const Complex a(0.6, 0.0), b(0.8, 0.0);
    const double t = M_PI / (4.0 * g);
    const PureState psi = evolve_env(spec, a, b, t);
    // up branch lives at (atom,spin) = 00, down branch at 11
    const Complex up0 = psi.amplitude(0) / a, up1 = psi.amplitude(1) / a;
    const Complex dn0 = psi.amplitude(6) / b, dn1 = psi.amplitude(7) / b;
    const Complex overlap = std::conj(up0) * dn0 + std::conj(up1) * dn1;
    CHECK(std::abs(overlap) < 1e-12);
    CHECK(std::abs(std::abs(z_of_t(spec, t))) < 1e-12);
    const Partition cut(env_register(1), {{"atom", "spin"}, {"env_1"}});
    CHECK(!is_product(psi, cut).is_product);
}

TEST_CASE("the damping factor is the literal per-atom product") {
    const EnvironmentSpec spec({EnvAtom::from_gamma(0.5, 0.0)});
    CHECK(z_of_t(spec, 0.0) == Complex(1.0, 0.0));
    CHECK(std::abs(z_of_t(spec, M_PI / 2.0)) < 1e-12);  // cos(pi/2)

    // an eigenstate atom only contributes a phase
    const EnvironmentSpec frozen({EnvAtom(0.7, Complex(1, 0), Complex(0, 0))});
    for (double t : {0.3, 1.9, 7.7}) {
        const Complex z = z_of_t(frozen, t);
        CHECK(std::abs(z - std::polar(1.0, 2.0 * 0.7 * t)) < 1e-14);
        CHECK(std::abs(std::abs(z) - 1.0) < 1e-14);
    }
}

TEST_CASE("the damping factor multiplies over concatenated environments") {
    const RandomStream s{41};
    std::uint64_t c = 0;
    const EnvironmentSpec whole = random_spec(s, c, 5);
    const EnvironmentSpec head(
        std::vector<EnvAtom>(whole.atoms.begin(), whole.atoms.begin() + 3));
    const EnvironmentSpec tail(std::vector<EnvAtom>(whole.atoms.begin() + 3, whole.atoms.end()));
    for (double t : {0.4, 2.2, 9.1})
        CHECK(std::abs(z_of_t(whole, t) - z_of_t(head, t) * z_of_t(tail, t)) < 1e-15);
}

TEST_CASE("the damping factor never leaves the unit disk") {
    const RandomStream s{42};
    std::uint64_t c = 0;
    const EnvironmentSpec spec = random_spec(s, c, 8);
    bool all_frozen_unit = true;
    for (int i = 0; i < 300; ++i) {
        const double t = 60.0 * s.uniform01(c++);
        CHECK(std::abs(z_of_t(spec, t)) <= 1.0 + 1e-12);
    }
    // unit modulus for all t exactly when every atom is frozen
    std::vector<EnvAtom> frozen;
    for (const EnvAtom& atom : spec.atoms) frozen.push_back(EnvAtom::from_gamma(atom.g, 1.0));
    const EnvironmentSpec unit(std::move(frozen));
    for (int i = 0; i < 50; ++i) {
        const double t = 60.0 * s.uniform01(c++);
        all_frozen_unit = all_frozen_unit && std::abs(std::abs(z_of_t(unit, t)) - 1.0) <= 1e-12;
    }
    CHECK(all_frozen_unit);
    // and strictly inside at some time otherwise
    double dip = 1.0;
    for (int i = 0; i < 200; ++i) dip = std::min(dip, std::abs(z_of_t(spec, 0.3 * (i + 1))));
    CHECK(dip < 0.9);
}

TEST_CASE("the reduced record matrix carries the damping factor in its corners") {
    const RandomStream s{43};
    std::uint64_t c = 0;
    const Complex a(0.48, 0.36), b(0.0, 0.8);
    for (std::size_t n : {1, 2, 4}) {
        const EnvironmentSpec spec = random_spec(s, c, n);
        for (double t : {0.0, 1.7, 6.3}) {
            const DensityMatrix analytic = rho_as_analytic(spec, a, b, t);
            const DensityMatrix traced =
                partial_trace(evolve_env(spec, a, b, t), {"atom", "spin"});
            CHECK(max_abs_diff(analytic.matrix(), traced.matrix()) < 1e-10);
            const Complex corner = analytic.matrix()(0, 3) / (a * std::conj(b));
            CHECK(std::abs(corner - z_of_t(spec, t)) < 1e-10);
        }
    }
}

TEST_CASE("frozen environments keep the record pure at all times") {
    const EnvironmentSpec spec({EnvAtom::from_gamma(0.3, 1.0), EnvAtom::from_gamma(0.9, 1.0),
                                EnvAtom::from_gamma(1.7, 1.0)});
    const Complex a(0.6, 0.0), b(0.48, 0.64);
    for (double t : {0.0, 0.9, 3.3, 12.8}) {
        CHECK(std::abs(std::abs(z_of_t(spec, t)) - 1.0) < 1e-12);
        CHECK(std::abs(purity(rho_as_analytic(spec, a, b, t)) - 1.0) < 1e-10);
    }
}

TEST_CASE("at the initial instant the reduced record equals the projector record") {
    const Complex a(0.28, 0.96 * 0.6), b(0.0, 0.96 * 0.8);
    const RandomStream s{44};
    std::uint64_t c = 0;
    const EnvironmentSpec spec = random_spec(s, c, 3);
    const BitModelConfig cfg(a, b, 1.0);
    CHECK(max_abs_diff(rho_as_analytic(spec, a, b, 0.0).matrix(), rho_pure_as(cfg).matrix()) <
          1e-14);
}

TEST_CASE("trace sampling fills the grid and its summary deterministically") {
    const RandomStream s{45};
    std::uint64_t c = 0;
    const EnvironmentSpec spec = random_spec(s, c, 4);
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(0.05 * i);

    const ZTrace tr = ztrace(spec, grid, 1);
    REQUIRE(tr.times.size() == grid.size());
    CHECK(tr.values[0] == Complex(1.0, 0.0));
    CHECK(tr.burn_in_time == doctest::Approx(1.0 / spec.min_g()).epsilon(1e-15));

    Complex mean(0, 0);
    double mean_sq = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex z = z_of_t(spec, grid[i]);
        CHECK(tr.values[i] == z);
        mean += z;
        mean_sq += std::norm(z);
        if (grid[i] >= tr.burn_in_time) peak = std::max(peak, std::abs(z));
    }
    mean /= static_cast<double>(grid.size());
    mean_sq /= static_cast<double>(grid.size());
    CHECK(std::abs(tr.mean_z - mean) < 1e-12);
    CHECK(std::abs(tr.mean_abs_sq - mean_sq) < 1e-12);
    if (tr.burn_in_time <= grid.back())
        CHECK(tr.max_abs_after_burn_in == doctest::Approx(peak).epsilon(1e-12));

    const ZTrace tr4 = ztrace(spec, grid, 4);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(tr.values[i] == tr4.values[i]);

    CHECK_THROWS_AS(ztrace(spec, {}, 1), std::invalid_argument);
    CHECK_THROWS_AS(ztrace(spec, {1.0, 0.5}, 1), std::invalid_argument);
}

TEST_CASE("a balanced environment keeps the sampled trace purely real") {
    const RandomStream s{46};
    std::vector<EnvAtom> atoms;
    for (std::size_t k = 0; k < 6; ++k) atoms.push_back(EnvAtom::from_gamma(s.uniform01(k), 0.0));
    const EnvironmentSpec spec(std::move(atoms));
    std::vector<double> grid;
    for (int i = 0; i <= 300; ++i) grid.push_back(0.1 * i);
    const ZTrace tr = ztrace(spec, grid);
    for (const Complex& z : tr.values) CHECK(std::abs(z.imag()) <= 1e-12);
}

TEST_CASE("a short grid reports no post-burn-in peak") {
    const EnvironmentSpec spec({EnvAtom::from_gamma(0.01, 0.0)});  // burn-in at t = 100
    const ZTrace tr = ztrace(spec, {0.0, 1.0, 2.0});
    CHECK(std::isnan(tr.max_abs_after_burn_in));
}

TEST_CASE("sampled moments reproduce the ensemble prediction") {
    const EnvironmentSpec spec({EnvAtom::from_gamma(0.37, 0.0), EnvAtom::from_gamma(0.81, 1.0)});
    const ZStats st =
        z_stats(spec, 1e4, 100000, RandomStream{7777}.substream("zstats"), AverageMode::time_points);
    CHECK(st.predicted_abs_sq == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(st.mean_abs_sq - 0.5) < 0.05);
    CHECK(std::abs(st.mean_z) < 3.0 * st.std_error);
    CHECK(st.samples == 100000);
}

TEST_CASE("frozen atoms make the second moment deterministic") {
    const EnvironmentSpec spec({EnvAtom::from_gamma(0.2, 1.0), EnvAtom::from_gamma(1.4, 1.0)});
    const ZStats st = z_stats(spec, 1e3, 20000, RandomStream{8});
    CHECK(std::abs(st.mean_abs_sq - 1.0) < 1e-10);
    CHECK(st.predicted_abs_sq == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("redrawing couplings per sample matches the same product law") {
    std::vector<EnvAtom> atoms;
    for (int k = 0; k < 5; ++k) atoms.push_back(EnvAtom::from_gamma(0.5, 0.0));
    const EnvironmentSpec spec(std::move(atoms));
    const ZStats st = z_stats(spec, 1e4, 100000, RandomStream{9}.substream("zstats"),
                              AverageMode::coupling_ensemble);
    CHECK(st.predicted_abs_sq == doctest::Approx(1.0 / 32.0).epsilon(1e-15));
    CHECK(std::abs(st.mean_abs_sq - 1.0 / 32.0) / (1.0 / 32.0) < 0.2);
}

TEST_CASE("sampled moments are identical for any worker count") {
    const RandomStream s{47};
    std::uint64_t c = 0;
    const EnvironmentSpec spec = random_spec(s, c, 3);
    const RandomStream stream = RandomStream{321}.substream("zstats");
    const ZStats one = z_stats(spec, 500.0, 30000, stream, AverageMode::time_points, 1);
    for (int threads : {2, 4, 8}) {
        const ZStats many = z_stats(spec, 500.0, 30000, stream, AverageMode::time_points, threads);
        CHECK(one.mean_z == many.mean_z);
        CHECK(one.mean_abs_sq == many.mean_abs_sq);
        CHECK(one.std_error == many.std_error);
    }
    CHECK_THROWS_AS(z_stats(spec, 0.0, 10, stream), std::invalid_argument);
    CHECK_THROWS_AS(z_stats(spec, 1.0, 0, stream), std::invalid_argument);
}

TEST_CASE("commensurable couplings recur at the common period") {
    const EnvironmentSpec spec({EnvAtom::from_gamma(0.1, 0.4), EnvAtom::from_gamma(0.2, 0.4),
                                EnvAtom::from_gamma(0.3, 0.4)});
    const auto t = recurrence_time(spec);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(M_PI / 0.1).epsilon(1e-12));
    CHECK(std::abs(z_of_t(spec, *t) - Complex(1.0, 0.0)) <= 1e-10);

    const EnvironmentSpec single_atom({EnvAtom::from_gamma(1.0, 0.0)});
    const auto t1 = recurrence_time(single_atom);
    REQUIRE(t1.has_value());
    CHECK(*t1 == doctest::Approx(M_PI).epsilon(1e-12));

    const EnvironmentSpec quarters({EnvAtom::from_gamma(0.25, 0.0), EnvAtom::from_gamma(0.75, 0.0)});
    const auto tq = recurrence_time(quarters);
    REQUIRE(tq.has_value());
    CHECK(*tq == doctest::Approx(M_PI / 0.25).epsilon(1e-12));
}

TEST_CASE("periodicity holds along the whole commensurable trace") {
    const EnvironmentSpec spec({EnvAtom::from_gamma(0.1, 0.6), EnvAtom::from_gamma(0.2, 0.0),
                                EnvAtom::from_gamma(0.3, 0.3)});
    const double period = M_PI / 0.1;
    for (double t : {0.0, 0.7, 3.1, 14.9})
        CHECK(std::abs(z_of_t(spec, t + period) - z_of_t(spec, t)) < 1e-10);
}

TEST_CASE("incommensurable couplings report no recurrence") {
    const EnvironmentSpec spec({EnvAtom::from_gamma(1.0, 0.0), EnvAtom::from_gamma(M_SQRT2, 0.0)});
    CHECK(!recurrence_time(spec).has_value());
}

TEST_CASE("coupling draws are deterministic and land in the open unit interval") {
    const RandomStream stream = RandomStream{55}.substream("couplings");
    const std::vector<double> g1 = draw_couplings(64, stream);
    const std::vector<double> g2 = draw_couplings(64, stream);
    REQUIRE(g1.size() == 64);
    CHECK(g1 == g2);
    for (double g : g1) {
        CHECK(g > 0.0);
        CHECK(g < 1.0);
    }
}
