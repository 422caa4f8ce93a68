#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "einsel/envselect.hpp"

// Config-driven experiment runner behind the command-line tool: strict JSON
// parsing, deterministic seeded runs, atomic CSV artifacts, and a manifest
// hashing every output.

namespace einsel {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitContract = 3;

// Invalid or unknown configuration; the message names the offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical invariant failed while running (not a user error).
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
    ztrace,
    zstats,
    collapse,
    info_timeseries,
    redundancy,
    recurrence,
    ensemble_demo,
};

const char* experiment_name(ExperimentKind kind);

// Uniform grid start + i * step for i = 0 .. floor((stop-start)/step + eps).
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
    std::vector<double> points() const;
};

// A fully validated run description. Physics parameters have no defaults;
// only output_dir defaults (to out/<experiment>).
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ztrace;
    std::uint64_t seed = 0;
    std::string output_dir;

    // Environment construction (ztrace, zstats, collapse, recurrence):
    // exactly one coupling source and one amplitude source.
    std::optional<std::vector<double>> g_list;
    std::optional<std::size_t> g_random_n;
    std::optional<double> gamma_scalar;
    std::optional<std::vector<double>> gamma_list;
    std::optional<std::vector<std::array<double, 4>>> alpha_beta;  // re/im alpha, re/im beta

    std::optional<GridSpec> grid;           // ztrace, collapse, info_timeseries
    Complex a{0.0, 0.0}, b{0.0, 0.0};       // collapse, info_timeseries
    double bit_g = 0.0;                     // info_timeseries
    double horizon = 0.0;                   // zstats
    std::size_t samples = 0;                // zstats
    AverageMode mode = AverageMode::time_points;  // zstats
    std::vector<std::size_t> n_list;        // redundancy
    std::optional<std::size_t> flip_count;  // redundancy (exactly one flip key)
    std::optional<double> flip_rate;
    std::size_t trials = 0;  // redundancy
    double w_up = 0.0;       // ensemble_demo
};

// Parses and validates config text. Throws ConfigError with the offending
// key in the message; unknown keys anywhere are rejected.
ExperimentConfig parse_config(const std::string& json_text);

// The environment described by the config; random couplings come from the
// seed's "couplings" substream.
EnvironmentSpec build_environment(const ExperimentConfig& cfg);

// Runs the config and writes CSV artifacts plus manifest.json under the
// resolved output directory (EINSEL_OUTPUT_ROOT prefixes relative paths).
// Returns kExitOk, or kExitIo / kExitConfig / kExitContract on failure.
int run_config_file(const std::filesystem::path& config_path, int threads, std::ostream& out,
                    std::ostream& err);

// Fast invariant suite; one line per check, kExitOk iff all pass.
int selfcheck(std::ostream& out);

void print_schema(std::ostream& out);

// Full command-line surface: run <config> [--threads n] | selfcheck | schema.
int main_entry(int argc, char** argv);

namespace detail {
// invert_info_pin is a test hook: it corrupts the information sign
// convention on purpose so the negative-control test can watch the
// "info convention pin" check fail.
int selfcheck_impl(std::ostream& out, bool invert_info_pin);
}  // namespace detail

}  // namespace einsel
