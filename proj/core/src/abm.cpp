#include "exkin/abm.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "exkin/threads.hpp"

namespace exkin {

std::string to_string(TimeMode m) {
    return m == TimeMode::EventCount ? "event-count" : "exponential-clock";
}

TimeMode time_mode_from_string(const std::string& s) {
    if (s == "event-count") return TimeMode::EventCount;
    if (s == "exponential-clock") return TimeMode::ExponentialClock;
    throw std::invalid_argument("unknown time mode: " + s);
}

std::int64_t AgentEnsemble::total_wealth() const {
    return std::accumulate(wealth.begin(), wealth.end(), std::int64_t{0});
}

void RunConfig::validate() const {
    params.validate_abm();
    if (!std::is_sorted(snapshot_schedule.begin(), snapshot_schedule.end()))
        throw std::invalid_argument("snapshot_schedule must be sorted ascending");
}

AgentEnsemble init_ensemble(const ModelParams& params) {
    params.validate_abm();
    if (std::abs(params.mu - std::round(params.mu)) > 1e-9)
        throw std::invalid_argument("uniform-at-mu initialization needs integer mu; pass an explicit wealth vector");
    const auto m = static_cast<std::int64_t>(std::llround(params.mu));
    AgentEnsemble e;
    e.wealth.assign(static_cast<std::size_t>(params.n_agents), m);
    e.bank_total = params.bank_total();
    e.bank_cash = e.bank_total;
    e.bank_debt = 0;
    return e;
}

AgentEnsemble init_ensemble(const ModelParams& params, std::vector<std::int64_t> wealth) {
    params.validate_abm();
    if (static_cast<std::int64_t>(wealth.size()) != params.n_agents)
        throw std::invalid_argument("explicit wealth vector has wrong length");
    std::int64_t total = 0;
    for (const auto w : wealth) {
        if (w < 0) throw std::invalid_argument("initial debt is not supported: negative initial wealth");
        total += w;
    }
    if (total != params.total_money())
        throw std::invalid_argument("explicit wealth must sum to N*mu");
    AgentEnsemble e;
    e.wealth = std::move(wealth);
    e.bank_total = params.bank_total();
    e.bank_cash = e.bank_total;
    e.bank_debt = 0;
    return e;
}

bool apply_exchange(AgentEnsemble& e, std::size_t giver, std::size_t receiver) {
    const std::int64_t si = e.wealth[giver];
    if (si < 1 && e.bank_cash < 1) return false;  // giver broke, bank empty
    const std::int64_t sj = e.wealth[receiver];
    e.wealth[giver] = si - 1;
    e.wealth[receiver] = sj + 1;
    // delta of sum S_i^-: giving from S_i <= 0 deepens debt, receiving while
    // in debt repays one unit; B_c = B* - sum S^- follows
    std::int64_t dneg = 0;
    if (si <= 0) ++dneg;
    if (sj < 0) --dneg;
    e.bank_debt += dneg;
    e.bank_cash -= dneg;
    return true;
}

void step_event(AgentEnsemble& e, Xoshiro256pp& rng, double lambda, TimeMode mode) {
    const auto n = static_cast<std::uint64_t>(e.wealth.size());
    const std::size_t i = static_cast<std::size_t>(rng.uniform_below(n));
    std::size_t j = static_cast<std::size_t>(rng.uniform_below(n - 1));
    if (j >= i) ++j;  // ordered pair, i != j
    apply_exchange(e, i, j);
    e.event_count += 1;
    const double rate = lambda * static_cast<double>(n);
    if (mode == TimeMode::EventCount)
        e.elapsed_time = static_cast<double>(e.event_count) / rate;
    else
        e.elapsed_time += rng.exponential(rate);
}

WealthPMF empirical_pmf(const AgentEnsemble& e) {
    if (e.wealth.empty()) throw std::invalid_argument("empirical_pmf: empty ensemble");
    const auto [lo_it, hi_it] = std::minmax_element(e.wealth.begin(), e.wealth.end());
    const auto lo = *lo_it;
    const auto hi = *hi_it;
    std::vector<double> counts(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (const auto w : e.wealth) counts[static_cast<std::size_t>(w - lo)] += 1.0;
    return WealthPMF::normalized(static_cast<int>(lo), std::move(counts));
}

namespace {

AbmSample sample_state(const AgentEnsemble& e) {
    AbmSample s;
    s.event = e.event_count;
    s.time = e.elapsed_time;
    s.bank_cash = e.bank_cash;
    s.bank_debt = e.bank_debt;
    s.total_agent_debt = e.bank_debt;
    s.gini = gini(empirical_pmf(e));
    return s;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    RunResult res;
    AgentEnsemble e = init_ensemble(cfg.params);
    Xoshiro256pp rng(cfg.seed);

    const std::uint64_t stride =
        cfg.record_stride > 0 ? cfg.record_stride : std::max<std::uint64_t>(1, cfg.max_events / 2000);

    res.trajectory.push_back(sample_state(e));
    std::size_t snap_idx = 0;
    while (snap_idx < cfg.snapshot_schedule.size() && cfg.snapshot_schedule[snap_idx] == 0) {
        res.snapshots.emplace_back(0, empirical_pmf(e));
        ++snap_idx;
    }

    for (std::uint64_t k = 1; k <= cfg.max_events; ++k) {
        step_event(e, rng, cfg.params.lambda, cfg.time_mode);
        if (!res.first_bank_empty_event && e.bank_total > 0 && e.bank_cash == 0)
            res.first_bank_empty_event = k;
        if (k % stride == 0 || k == cfg.max_events) res.trajectory.push_back(sample_state(e));
        while (snap_idx < cfg.snapshot_schedule.size() && cfg.snapshot_schedule[snap_idx] == k) {
            res.snapshots.emplace_back(k, empirical_pmf(e));
            ++snap_idx;
        }
    }

    res.final_state = std::move(e);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

namespace {

WealthPMF average_pmfs(const std::vector<const WealthPMF*>& pmfs) {
    int lo = pmfs.front()->n_min(), hi = pmfs.front()->n_max();
    for (const auto* p : pmfs) {
        lo = std::min(lo, p->n_min());
        hi = std::max(hi, p->n_max());
    }
    std::vector<double> acc(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (const auto* p : pmfs)
        for (std::size_t i = 0; i < p->size(); ++i) acc[static_cast<std::size_t>(p->wealth_of(i) - lo)] += p->slot(i);
    return WealthPMF::normalized(lo, std::move(acc));
}

}  // namespace

EnsembleResult run_ensemble(const RunConfig& cfg, int replicas, std::uint64_t seed_stride) {
    if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<RunResult> results(static_cast<std::size_t>(replicas));
    const int workers = std::min(replicas, worker_thread_cap());
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int r = w; r < replicas; r += workers) {
                RunConfig c = cfg;
                c.seed = cfg.seed + static_cast<std::uint64_t>(r) * seed_stride;
                results[static_cast<std::size_t>(r)] = run(c);
            }
        });
    }
    for (auto& th : pool) th.join();

    EnsembleResult out;
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto rows = results.front().trajectory.size();
    for (const auto& rr : results)
        if (rr.trajectory.size() != rows)
            throw std::logic_error("replica trajectories misaligned");
    out.trajectory.resize(rows);
    const double inv = 1.0 / static_cast<double>(replicas);
    for (std::size_t i = 0; i < rows; ++i) {
        EnsembleSample& s = out.trajectory[i];
        s.event = results.front().trajectory[i].event;
        for (const auto& rr : results) {
            const AbmSample& a = rr.trajectory[i];
            s.time += a.time * inv;
            s.bank_cash += static_cast<double>(a.bank_cash) * inv;
            s.bank_debt += static_cast<double>(a.bank_debt) * inv;
            s.total_agent_debt += static_cast<double>(a.total_agent_debt) * inv;
            s.gini += a.gini * inv;
        }
    }
    for (std::size_t si = 0; si < results.front().snapshots.size(); ++si) {
        std::vector<const WealthPMF*> pmfs;
        pmfs.reserve(static_cast<std::size_t>(replicas));
        for (const auto& rr : results) pmfs.push_back(&rr.snapshots[si].second);
        out.snapshots.emplace_back(results.front().snapshots[si].first, average_pmfs(pmfs));
    }
    for (int r = 0; r < replicas; ++r) {
        out.seeds.push_back(cfg.seed + static_cast<std::uint64_t>(r) * seed_stride);
        out.first_bank_empty_events.push_back(results[static_cast<std::size_t>(r)].first_bank_empty_event);
    }
    return out;
}

}  // namespace exkin
