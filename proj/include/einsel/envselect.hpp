#pragma once

#include <optional>
#include <vector>

#include "einsel/bitmodel.hpp"
#include "einsel/rng.hpp"

// Environment monitoring of the detector atom: N noninteracting environment
// atoms couple to the atom's pointer observable, damping the coherence
// between the two record branches by the closed-form factor z(t). The spin
// is a spectator throughout.

namespace einsel {

// One environment atom: coupling strength and initial amplitudes in the
// coupling eigenbasis (its register digits 0 and 1).
struct EnvAtom {
    double g;
    Complex alpha;
    Complex beta;

    // Requires g > 0 and |alpha|^2 + |beta|^2 = 1 within 1e-12.
    EnvAtom(double g, Complex alpha, Complex beta);

    // Real-amplitude atom with |alpha|^2 - |beta|^2 = gamma, gamma in [0, 1].
    static EnvAtom from_gamma(double g, double gamma);

    // | |alpha|^2 - |beta|^2 |: 1 freezes the atom (an eigenstate of the
    // coupling), 0 damps hardest.
    double gamma() const;
};

struct EnvironmentSpec {
    std::vector<EnvAtom> atoms;

    // Requires at least one atom.
    explicit EnvironmentSpec(std::vector<EnvAtom> atoms_);

    std::size_t size() const { return atoms.size(); }
    double min_g() const;
};

// Full register (atom, spin, env_1..env_n).
Register env_register(std::size_t n_env);

// Monitoring register (atom, env_1..env_n); h_ae_k terms live here.
Register coupling_register(std::size_t n_env);

// Coupling of environment atom k (1-based) to the detector atom:
// -g_k sigma_z(atom) (x) sigma_z(env_k), identity elsewhere, on
// coupling_register(spec.size()). Diagonal, so all terms commute pairwise
// and with the atom's pointer projector: monitoring is nondemolition.
HermitianOperator h_ae_k(std::size_t k, const EnvironmentSpec& spec);

// Sum of all h_ae_k terms.
HermitianOperator h_ae_total(const EnvironmentSpec& spec);

// Closed-form state at time t, starting from the sharp record
// (a |atom0 spin0> + b |atom1 spin1>) dressed with each atom's initial
// state: in the atom0 branch env atom k picks up phases e^{+i g_k t} on
// alpha_k and e^{-i g_k t} on beta_k; the atom1 branch conjugates them.
PureState evolve_env(const EnvironmentSpec& spec, Complex a, Complex b, double t);

// Correlation-damping factor
//   z(t) = prod_k [cos 2 g_k t + i (|alpha_k|^2 - |beta_k|^2) sin 2 g_k t],
// the overlap of the two branch environments. |z| <= 1; z(0) = 1 exactly.
Complex z_of_t(const EnvironmentSpec& spec, double t);

// Reduced (atom, spin) matrix at time t: diagonal (|a|^2, 0, 0, |b|^2) with
// corners z(t) a b* and its conjugate. Must agree with tracing the
// environment out of evolve_env.
DensityMatrix rho_as_analytic(const EnvironmentSpec& spec, Complex a, Complex b, double t);

// Sampled damping-factor trajectory. Summary statistics run over the whole
// grid; the max runs from the first grid point at or past the burn-in time
// 1/min g_k (NaN if the grid ends before burn-in).
struct ZTrace {
    std::vector<double> times;
    std::vector<Complex> values;
    Complex mean_z{0.0, 0.0};
    double mean_abs_sq = 0.0;
    double burn_in_time = 0.0;
    double max_abs_after_burn_in = 0.0;
};

// Evaluates z on a sorted grid. Grid slots are filled independently, so the
// result is identical for any thread count.
ZTrace ztrace(const EnvironmentSpec& spec, const std::vector<double>& t_grid, int threads = 1);

// What the angle brackets average over: sampled times at fixed couplings,
// or freshly drawn couplings at a fixed time.
enum class AverageMode { time_points, coupling_ensemble };

struct ZStats {
    Complex mean_z{0.0, 0.0};
    double mean_abs_sq = 0.0;
    // Standard error of the complex mean: sqrt((var Re + var Im) / n).
    double std_error = 0.0;
    // prod_k (1 + gamma_k^2) / 2, the long-time prediction for mean_abs_sq.
    double predicted_abs_sq = 0.0;
    std::size_t samples = 0;
};

// Monte Carlo moments of z. time_points draws t uniformly inside (0, T);
// coupling_ensemble holds t = T and redraws each g_k uniformly inside (0, 1)
// per sample, keeping the atoms' amplitudes. Counter-indexed draws plus a
// fixed-order chunk reduction keep results byte-stable for any thread count.
ZStats z_stats(const EnvironmentSpec& spec, double horizon, std::size_t samples,
               const RandomStream& stream, AverageMode mode = AverageMode::time_points,
               int threads = 1);

// Smallest t with z(t) = 1 when the couplings share a common measure:
// fits each g_k / min g as a rational (first continued-fraction convergent
// within relative 1e-9, denominators capped at 1e6), rebuilds the common
// unit, and only reports pi / g0 if |z(pi / g0) - 1| <= 1e-10 actually
// holds. Returns nullopt otherwise (incommensurable or uncertifiable).
std::optional<double> recurrence_time(const EnvironmentSpec& spec);

// n couplings drawn uniformly from the open interval (0, 1), counter-indexed
// off the given stream.
std::vector<double> draw_couplings(std::size_t n, const RandomStream& stream);

}  // namespace einsel
