#include "einsel/envselect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "einsel/parallel.hpp"

namespace einsel {

namespace {

constexpr double kNormTol = 1e-12;

std::string env_label(std::size_t k) { return "env_" + std::to_string(k); }

Complex z_factor(double g, double d, double t) {
    const double th = 2.0 * g * t;
    return Complex(std::cos(th), d * std::sin(th));
}

// Signed |alpha|^2 - |beta|^2 per atom.
std::vector<double> signed_gammas(const EnvironmentSpec& spec) {
    std::vector<double> d;
    d.reserve(spec.size());
    for (const auto& atom : spec.atoms) d.push_back(std::norm(atom.alpha) - std::norm(atom.beta));
    return d;
}

void check_branch_amplitudes(Complex a, Complex b) {
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > kNormTol)
        throw std::invalid_argument("branch amplitudes must be normalized");
}

}  // namespace

EnvAtom::EnvAtom(double g_, Complex alpha_, Complex beta_) : g(g_), alpha(alpha_), beta(beta_) {
    if (!(g > 0.0)) throw std::invalid_argument("environment atom: coupling g must be positive");
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTol)
        throw std::invalid_argument("environment atom: amplitudes must be normalized");
}

EnvAtom EnvAtom::from_gamma(double g, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("environment atom: gamma must lie in [0, 1]");
    return EnvAtom(g, Complex(std::sqrt((1.0 + gamma) / 2.0), 0.0),
                   Complex(std::sqrt((1.0 - gamma) / 2.0), 0.0));
}

double EnvAtom::gamma() const { return std::abs(std::norm(alpha) - std::norm(beta)); }

EnvironmentSpec::EnvironmentSpec(std::vector<EnvAtom> atoms_) : atoms(std::move(atoms_)) {
    if (atoms.empty()) throw std::invalid_argument("environment: need at least one atom");
}

double EnvironmentSpec::min_g() const {
    double m = atoms.front().g;
    for (const auto& atom : atoms) m = std::min(m, atom.g);
    return m;
}

Register env_register(std::size_t n_env) {
    std::vector<std::string> labels{"atom", "spin"};
    for (std::size_t k = 1; k <= n_env; ++k) labels.push_back(env_label(k));
    return Register::qubits(labels);
}

Register coupling_register(std::size_t n_env) {
    std::vector<std::string> labels{"atom"};
    for (std::size_t k = 1; k <= n_env; ++k) labels.push_back(env_label(k));
    return Register::qubits(labels);
}

HermitianOperator h_ae_k(std::size_t k, const EnvironmentSpec& spec) {
    if (k < 1 || k > spec.size())
        throw std::domain_error("h_ae_k: atom index out of range");
    const double g = spec.atoms[k - 1].g;
    // -g kron(sigma_z, sigma_z) on (atom, env_k).
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = -g;
    m(1, 1) = g;
    m(2, 2) = g;
    m(3, 3) = -g;
    HermitianOperator pair(Register::qubits({"atom", env_label(k)}), std::move(m));
    return embed(pair, coupling_register(spec.size()));
}

HermitianOperator h_ae_total(const EnvironmentSpec& spec) {
    HermitianOperator total = h_ae_k(1, spec);
    for (std::size_t k = 2; k <= spec.size(); ++k) total = total + h_ae_k(k, spec);
    return total;
}

PureState evolve_env(const EnvironmentSpec& spec, Complex a, Complex b, double t) {
    check_branch_amplitudes(a, b);
    const std::size_t n = spec.size();
    const Register reg = env_register(n);
    const std::size_t denv = std::size_t{1} << n;

    // Per-branch environment product amplitudes, doubled in place atom by
    // atom (downward sweep keeps reads ahead of writes).
    std::vector<Complex> up(denv), dn(denv);
    up[0] = Complex(1.0, 0.0);
    dn[0] = Complex(1.0, 0.0);
    std::size_t cur = 1;
    for (const auto& atom : spec.atoms) {
        const Complex phase = std::polar(1.0, atom.g * t);
        const Complex ua = atom.alpha * phase, ub = atom.beta * std::conj(phase);
        const Complex da = atom.alpha * std::conj(phase), db = atom.beta * phase;
        for (std::size_t j = cur; j-- > 0;) {
            const Complex u = up[j], d = dn[j];
            up[2 * j] = u * ua;
            up[2 * j + 1] = u * ub;
            dn[2 * j] = d * da;
            dn[2 * j + 1] = d * db;
        }
        cur *= 2;
    }

    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(4 * denv));
    for (std::size_t e = 0; e < denv; ++e) {
        v(static_cast<Eigen::Index>(e)) = a * up[e];
        v(static_cast<Eigen::Index>(3 * denv + e)) = b * dn[e];
    }
    return PureState(reg, std::move(v));
}

Complex z_of_t(const EnvironmentSpec& spec, double t) {
    Complex z(1.0, 0.0);
    for (const auto& atom : spec.atoms)
        z *= z_factor(atom.g, std::norm(atom.alpha) - std::norm(atom.beta), t);
    return z;
}

DensityMatrix rho_as_analytic(const EnvironmentSpec& spec, Complex a, Complex b, double t) {
    check_branch_amplitudes(a, b);
    const Complex z = z_of_t(spec, t);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = std::norm(a);
    m(3, 3) = std::norm(b);
    m(0, 3) = z * a * std::conj(b);
    m(3, 0) = std::conj(m(0, 3));
    return DensityMatrix(pair_register(), std::move(m));
}

ZTrace ztrace(const EnvironmentSpec& spec, const std::vector<double>& t_grid, int threads) {
    if (t_grid.empty()) throw std::invalid_argument("ztrace: time grid is empty");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] < t_grid[i - 1])
            throw std::invalid_argument("ztrace: time grid must be sorted ascending");

    ZTrace out;
    out.times = t_grid;
    out.values.resize(t_grid.size());
    const std::vector<double> d = signed_gammas(spec);
    std::vector<double> g;
    g.reserve(spec.size());
    for (const auto& atom : spec.atoms) g.push_back(atom.g);

    for_each_chunk(t_grid.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Complex z(1.0, 0.0);
            for (std::size_t k = 0; k < g.size(); ++k) z *= z_factor(g[k], d[k], t_grid[i]);
            out.values[i] = z;
        }
    });

    Complex sum(0.0, 0.0);
    double sum_abs2 = 0.0;
    for (const Complex& z : out.values) {
        sum += z;
        sum_abs2 += std::norm(z);
    }
    const double n = static_cast<double>(out.values.size());
    out.mean_z = sum / n;
    out.mean_abs_sq = sum_abs2 / n;

    out.burn_in_time = 1.0 / spec.min_g();
    out.max_abs_after_burn_in = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        if (out.times[i] < out.burn_in_time) continue;
        double mx = 0.0;
        for (std::size_t j = i; j < out.values.size(); ++j) mx = std::max(mx, std::abs(out.values[j]));
        out.max_abs_after_burn_in = mx;
        break;
    }
    return out;
}

namespace {

struct MomentAccum {
    double re = 0.0, im = 0.0, abs2 = 0.0, re2 = 0.0, im2 = 0.0;
    MomentAccum operator+(const MomentAccum& o) const {
        return {re + o.re, im + o.im, abs2 + o.abs2, re2 + o.re2, im2 + o.im2};
    }
};

}  // namespace

ZStats z_stats(const EnvironmentSpec& spec, double horizon, std::size_t samples,
               const RandomStream& stream, AverageMode mode, int threads) {
    if (!(horizon > 0.0)) throw std::invalid_argument("z_stats: horizon must be positive");
    if (samples < 1) throw std::invalid_argument("z_stats: need at least one sample");

    const std::vector<double> d = signed_gammas(spec);
    std::vector<double> g;
    g.reserve(spec.size());
    for (const auto& atom : spec.atoms) g.push_back(atom.g);
    const std::size_t n_env = spec.size();

    const std::size_t n_chunks = (samples + kChunkSize - 1) / kChunkSize;
    std::vector<MomentAccum> parts(n_chunks);
    for_each_chunk(samples, threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
        MomentAccum acc;
        for (std::size_t i = begin; i < end; ++i) {
            Complex z(1.0, 0.0);
            if (mode == AverageMode::time_points) {
                const double t = horizon * stream.uniform01(i);
                for (std::size_t k = 0; k < n_env; ++k) z *= z_factor(g[k], d[k], t);
            } else {
                for (std::size_t k = 0; k < n_env; ++k)
                    z *= z_factor(stream.uniform01(i * n_env + k), d[k], horizon);
            }
            acc.re += z.real();
            acc.im += z.imag();
            acc.abs2 += std::norm(z);
            acc.re2 += z.real() * z.real();
            acc.im2 += z.imag() * z.imag();
        }
        parts[c] = acc;
    });
    const MomentAccum tot = tree_sum(std::move(parts));

    ZStats out;
    out.samples = samples;
    const double n = static_cast<double>(samples);
    out.mean_z = Complex(tot.re / n, tot.im / n);
    out.mean_abs_sq = tot.abs2 / n;
    if (samples > 1) {
        const double var_re = std::max(0.0, (tot.re2 - n * std::pow(tot.re / n, 2)) / (n - 1.0));
        const double var_im = std::max(0.0, (tot.im2 - n * std::pow(tot.im / n, 2)) / (n - 1.0));
        out.std_error = std::sqrt((var_re + var_im) / n);
    }
    out.predicted_abs_sq = 1.0;
    for (const auto& atom : spec.atoms) {
        const double gm = atom.gamma();
        out.predicted_abs_sq *= (1.0 + gm * gm) / 2.0;
    }
    return out;
}

namespace {

struct RationalFit {
    unsigned long long p = 0, q = 0;
};

// First continued-fraction convergent of x within relative 1e-9, with the
// denominator capped at 1e6. Best-convergent fitting is deliberately not
// used: it can certify near-misses that the z check below must reject.
std::optional<RationalFit> fit_first_convergent(double x) {
    constexpr double kRelTol = 1e-9;
    constexpr unsigned long long kMaxDen = 1000000;
    double xi = x;
    unsigned long long p1 = 1, p2 = 0, q1 = 0, q2 = 1;
    for (int iter = 0; iter < 64; ++iter) {
        const double fa = std::floor(xi);
        if (!(fa >= 0.0) || fa > 9.0e18) return std::nullopt;
        const unsigned long long a = static_cast<unsigned long long>(fa);
        unsigned long long p = 0, q = 0, tmp = 0;
        if (__builtin_mul_overflow(a, p1, &tmp) || __builtin_add_overflow(tmp, p2, &p))
            return std::nullopt;
        if (__builtin_mul_overflow(a, q1, &tmp) || __builtin_add_overflow(tmp, q2, &q))
            return std::nullopt;
        if (q > kMaxDen) return std::nullopt;
        if (q > 0 && std::abs(x - static_cast<double>(p) / static_cast<double>(q)) <= kRelTol * x)
            return RationalFit{p, q};
        const double frac = xi - fa;
        if (frac < 1e-15) return std::nullopt;
        xi = 1.0 / frac;
        p2 = p1;
        p1 = p;
        q2 = q1;
        q1 = q;
    }
    return std::nullopt;
}

}  // namespace

std::optional<double> recurrence_time(const EnvironmentSpec& spec) {
    const double gmin = spec.min_g();
    std::vector<RationalFit> fits;
    fits.reserve(spec.size());
    for (const auto& atom : spec.atoms) {
        const auto fit = fit_first_convergent(atom.g / gmin);
        if (!fit) return std::nullopt;
        fits.push_back(*fit);
    }

    // Common unit gmin / L with L = lcm of the denominators; each coupling
    // is then m_k units, and the greatest common measure is gcd(m_k) units.
    unsigned long long lcm = 1;
    for (const auto& fit : fits) {
        const unsigned long long reduced = lcm / std::gcd(lcm, fit.q);
        if (__builtin_mul_overflow(reduced, fit.q, &lcm)) return std::nullopt;
    }
    unsigned long long common = 0;
    for (const auto& fit : fits) {
        unsigned long long m = 0;
        if (__builtin_mul_overflow(fit.p, lcm / fit.q, &m)) return std::nullopt;
        common = std::gcd(common, m);
    }

    const double g0 = gmin * static_cast<double>(common) / static_cast<double>(lcm);
    const double t_rec = M_PI / g0;
    // The fit is a certificate only if the damping factor actually returns.
    if (std::abs(z_of_t(spec, t_rec) - Complex(1.0, 0.0)) > 1e-10) return std::nullopt;
    return t_rec;
}

std::vector<double> draw_couplings(std::size_t n, const RandomStream& stream) {
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = stream.uniform01(k);
    return g;
}

}  // namespace einsel
