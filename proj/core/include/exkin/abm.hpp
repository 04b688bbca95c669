#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exkin/model_params.hpp"
#include "exkin/rng.hpp"
#include "exkin/wealth_pmf.hpp"

namespace exkin {

enum class TimeMode { EventCount, ExponentialClock };

std::string to_string(TimeMode m);
TimeMode time_mode_from_string(const std::string& s);

/// Full state of the N-agent system plus the bank ledger. The bank is
/// bookkept through the single rule  bank_cash = B* - sum_i S_i^-,
/// updated incrementally from the giver/receiver wealth deltas.
struct AgentEnsemble {
    std::vector<std::int64_t> wealth;
    std::int64_t bank_total = 0;     // B* = N mu nu, constant
    std::int64_t bank_cash = 0;      // B_c
    std::int64_t bank_debt = 0;      // B_d = sum_i S_i^-
    double elapsed_time = 0.0;
    std::uint64_t event_count = 0;

    std::int64_t n_agents() const { return static_cast<std::int64_t>(wealth.size()); }
    std::int64_t total_wealth() const;
    std::int64_t total_agent_debt() const { return bank_debt; }
};

struct RunConfig {
    ModelParams params;
    std::uint64_t max_events = 0;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> snapshot_schedule;  // event counts, ascending
    TimeMode time_mode = TimeMode::EventCount;
    std::uint64_t record_stride = 0;  // 0 -> max(1, max_events / 2000)

    void validate() const;
};

struct AbmSample {
    std::uint64_t event = 0;
    double time = 0.0;
    std::int64_t bank_cash = 0;
    std::int64_t bank_debt = 0;
    std::int64_t total_agent_debt = 0;
    double gini = 0.0;
};

struct RunResult {
    AgentEnsemble final_state;
    std::vector<AbmSample> trajectory;
    std::vector<std::pair<std::uint64_t, WealthPMF>> snapshots;
    std::optional<std::uint64_t> first_bank_empty_event;
    double wall_seconds = 0.0;
};

// replica-averaged observables; bank columns become fractional
struct EnsembleSample {
    std::uint64_t event = 0;
    double time = 0.0;
    double bank_cash = 0.0;
    double bank_debt = 0.0;
    double total_agent_debt = 0.0;
    double gini = 0.0;
};

struct EnsembleResult {
    std::vector<EnsembleSample> trajectory;
    std::vector<std::pair<std::uint64_t, WealthPMF>> snapshots;  // averaged per scheduled event
    std::vector<std::uint64_t> seeds;
    std::vector<std::optional<std::uint64_t>> first_bank_empty_events;
    double wall_seconds = 0.0;
};

// every agent starts with exactly mu dollars (mu must be integral),
// bank starts all-cash: B_c = B*, B_d = 0
AgentEnsemble init_ensemble(const ModelParams& params);
// explicit non-negative initial wealth summing to N*mu
AgentEnsemble init_ensemble(const ModelParams& params, std::vector<std::int64_t> wealth);

/// One forced exchange attempt giver -> receiver. Executes when the giver
/// has a dollar or the bank has cash; returns whether money moved. Does not
/// advance time or the event counter.
bool apply_exchange(AgentEnsemble& e, std::size_t giver, std::size_t receiver);

/// One event: draw an ordered pair (i != j) uniformly, attempt the exchange,
/// advance event count and time.
void step_event(AgentEnsemble& e, Xoshiro256pp& rng, double lambda, TimeMode mode);

RunResult run(const RunConfig& cfg);

// p_n = #{i : S_i = n} / N
WealthPMF empirical_pmf(const AgentEnsemble& e);

// replica r runs with seed cfg.seed + r * seed_stride; observables and
// snapshot PMFs are averaged pointwise in replica order (seed_stride 0
// forces identical replicas, useful for averaging checks)
EnsembleResult run_ensemble(const RunConfig& cfg, int replicas, std::uint64_t seed_stride = 1);

}  // namespace exkin
