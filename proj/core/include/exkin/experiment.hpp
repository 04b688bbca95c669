#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exkin/model_params.hpp"

namespace exkin {

inline constexpr const char* kVersion = "0.1.0";

enum class Mode { Abm, MeanField, Equilibrium, Linearize, GiniSweep, Compare };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// Raised for malformed or invalid configuration; the CLI maps it to exit
/// code 2. The message names the offending key.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    Mode mode = Mode::Equilibrium;
    double mu = 10.0;
    double nu = 0.4;
    std::int64_t n_agents = 1000;
    double lambda = 1.0;
    std::uint64_t events = 100000;
    std::uint64_t seed = 12345;
    int replicas = 1;
    double dt = 0.01;
    std::string scheme = "rk4";
    double t_end = 100.0;
    double tail_threshold = 1e-14;
    std::string out = "out";
    std::string preset;  // empty, or fig2 | fig5 | fig6

    ModelParams params() const { return {n_agents, mu, nu, lambda}; }
    bool operator==(const ExperimentConfig&) const = default;
};

// key -> value pairs from flat "key = value" text; '#' starts a comment
std::map<std::string, std::string> read_config_kv(const std::string& text);

/// Builds a config from defaults, then the preset named in file or flags,
/// then file values, then flag values (flags override the file). Unknown or
/// invalid keys raise ConfigError naming the key.
ExperimentConfig build_config(const std::optional<std::string>& config_file_text,
                              const std::map<std::string, std::string>& flag_overrides);

// round-trips through build_config
std::string serialize_config(const ExperimentConfig& cfg);

// fig2: bank-depletion agent run; fig5: two-phase relaxation; fig6: Gini
// comparison with a large bank
ExperimentConfig preset_config(const std::string& name);

struct CompareSnapshot {
    double t = 0.0;
    std::uint64_t event = 0;
    double tv = 0.0;
};

struct CompareReport {
    std::vector<CompareSnapshot> snapshots;
    double max_tv = 0.0;
    bool finite_size_warning = false;
    int replicas = 1;
    std::uint64_t seed = 0;
};

/// Runs the agent simulation (replica-averaged) and the deterministic
/// integrator with matched parameters and start, aligns time via
/// t = events / (lambda N), and reports the total-variation distance
/// between the empirical and integrated distributions at each snapshot.
CompareReport compare_abm_meanfield(const ExperimentConfig& cfg);

/// Dispatches the experiment and writes all CSV/JSON outputs plus
/// manifest.json under cfg.out. Returns 0 on success; configuration
/// errors surface as ConfigError, runtime failures as other exceptions.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace exkin
