#include "doctest.h"

#include <array>
#include <cstdint>
#include <numeric>

#include "exkin/abm.hpp"

using namespace exkin;

namespace {

void check_invariants(const AgentEnsemble& e, const ModelParams& p) {
    CHECK(e.total_wealth() == p.total_money());
    CHECK(e.bank_cash + e.bank_debt == p.bank_total());
    std::int64_t sum_neg = 0;
    for (const auto w : e.wealth)
        if (w < 0) sum_neg -= w;
    CHECK(e.bank_debt == sum_neg);
    CHECK(e.bank_cash == p.bank_total() - sum_neg);
    CHECK(e.bank_cash >= 0);
    CHECK(e.bank_debt >= 0);
}

// stationary vector of a 3x3 stochastic matrix by solving (P^T - I) pi = 0
// with the normalization row, plain Gaussian elimination
std::array<double, 3> stationary_3state(const std::array<std::array<double, 3>, 3>& p) {
    double a[3][4] = {
        {p[0][0] - 1.0, p[1][0], p[2][0], 0.0},
        {p[0][1], p[1][1] - 1.0, p[2][1], 0.0},
        {1.0, 1.0, 1.0, 1.0},
    };
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
}

}  // namespace

TEST_CASE("init_ensemble") {
    SUBCASE("uniform at mu") {
        const AgentEnsemble e = init_ensemble({4, 10.0, 0.5, 1.0});
        CHECK(e.wealth == std::vector<std::int64_t>{10, 10, 10, 10});
        CHECK(e.bank_cash == 20);
        CHECK(e.bank_debt == 0);
        CHECK(e.elapsed_time == 0.0);
    }
    SUBCASE("no bank") {
        const AgentEnsemble e = init_ensemble({2, 1.0, 0.0, 1.0});
        CHECK(e.wealth == std::vector<std::int64_t>{1, 1});
        CHECK(e.bank_cash == 0);
    }
    SUBCASE("explicit vector") {
        const AgentEnsemble e = init_ensemble({3, 2.0, 0.5, 1.0}, {6, 0, 0});
        CHECK(e.wealth == std::vector<std::int64_t>{6, 0, 0});
        CHECK(e.bank_cash == 3);  // B* = N mu nu
        CHECK(e.bank_debt == 0);
    }
    SUBCASE("rejections") {
        CHECK_THROWS(init_ensemble({3, 0.5, 0.0, 1.0}));            // N*mu = 1.5
        CHECK_THROWS(init_ensemble({2, 1.0, 0.3, 1.0}));            // N*mu*nu = 0.6
        CHECK_THROWS(init_ensemble({3, 2.0, 0.5, 1.0}, {7, 0, 0})); // wrong total
        CHECK_THROWS(init_ensemble({3, 2.0, 0.5, 1.0}, {8, -2, 0}));// initial debt
    }
}

TEST_CASE("apply_exchange cases") {
    const ModelParams params{2, 1.0, 0.0, 1.0};

    SUBCASE("rich giver") {
        AgentEnsemble e = init_ensemble(params);
        CHECK(apply_exchange(e, 0, 1));
        CHECK(e.wealth == std::vector<std::int64_t>{0, 2});
        CHECK(e.bank_cash == 0);
        CHECK(e.bank_debt == 0);
    }
    SUBCASE("broke giver, bank lends") {
        const ModelParams with_bank{2, 1.0, 0.5, 1.0};  // B* = 1
        AgentEnsemble e = init_ensemble(with_bank, {0, 2});
        CHECK(e.bank_cash == 1);
        CHECK(apply_exchange(e, 0, 1));
        CHECK(e.wealth == std::vector<std::int64_t>{-1, 3});
        CHECK(e.bank_cash == 0);
        CHECK(e.bank_debt == 1);
        check_invariants(e, with_bank);
    }
    SUBCASE("broke giver, empty bank: nothing happens") {
        AgentEnsemble e = init_ensemble(params, {0, 2});
        CHECK_FALSE(apply_exchange(e, 0, 1));
        CHECK(e.wealth == std::vector<std::int64_t>{0, 2});
    }
    SUBCASE("receiver in debt repays the bank") {
        // S = (2, -1), B* = 1 all lent out; the transfer clears the debt
        const ModelParams p2{2, 0.5, 1.0, 1.0};  // N mu = 1, B* = 1
        AgentEnsemble e = init_ensemble(p2, {1, 0});
        REQUIRE(apply_exchange(e, 1, 0));  // (2,-1) after: wealth (2,-1)
        CHECK(e.wealth == std::vector<std::int64_t>{2, -1});
        CHECK(e.bank_cash == 0);
        CHECK(e.bank_debt == 1);
        CHECK(apply_exchange(e, 0, 1));
        CHECK(e.wealth == std::vector<std::int64_t>{1, 0});
        CHECK(e.bank_cash == 1);
        CHECK(e.bank_debt == 0);
        check_invariants(e, p2);
    }
}

TEST_CASE("conservation and guards over random events") {
    const ModelParams params{50, 3.0, 0.4, 1.0};  // B* = 60
    AgentEnsemble e = init_ensemble(params);
    Xoshiro256pp rng(99);
    for (int k = 0; k < 20000; ++k) {
        step_event(e, rng, params.lambda, TimeMode::EventCount);
        if (k % 500 == 0) check_invariants(e, params);
    }
    check_invariants(e, params);
    CHECK(e.event_count == 20000);
    CHECK(e.elapsed_time == doctest::Approx(20000.0 / 50.0));
}

TEST_CASE("no debt without a bank") {
    const ModelParams params{20, 2.0, 0.0, 1.0};
    AgentEnsemble e = init_ensemble(params);
    Xoshiro256pp rng(5);
    for (int k = 0; k < 50000; ++k) {
        step_event(e, rng, params.lambda, TimeMode::EventCount);
    }
    for (const auto w : e.wealth) CHECK(w >= 0);
    CHECK(e.bank_debt == 0);
}

TEST_CASE("empirical_pmf") {
    AgentEnsemble e;
    e.wealth = {10, 10, 10, 10};
    const WealthPMF d = empirical_pmf(e);
    CHECK(d.n_min() == 10);
    CHECK(d.size() == 1);
    e.wealth = {0, 2};
    const WealthPMF two = empirical_pmf(e);
    CHECK(two.at(0) == 0.5);
    CHECK(two.at(2) == 0.5);
    e.wealth = {-1, 1, 3};
    const WealthPMF three = empirical_pmf(e);
    CHECK(three.at(-1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(three.at(1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(three.at(3) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(mass(three) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mean(three) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("run with zero events returns the initial row only") {
    RunConfig cfg;
    cfg.params = {4, 10.0, 0.5, 1.0};
    cfg.max_events = 0;
    cfg.seed = 1;
    const RunResult res = run(cfg);
    REQUIRE(res.trajectory.size() == 1);
    CHECK(res.trajectory[0].event == 0);
    CHECK(res.trajectory[0].time == 0.0);
    CHECK(res.final_state.wealth == std::vector<std::int64_t>{10, 10, 10, 10});
}

TEST_CASE("determinism: same seed, same trajectory") {
    RunConfig cfg;
    cfg.params = {100, 5.0, 0.2, 1.0};
    cfg.max_events = 50000;
    cfg.seed = 20240605;
    cfg.record_stride = 1000;
    const RunResult a = run(cfg);
    const RunResult b = run(cfg);
    CHECK(a.final_state.wealth == b.final_state.wealth);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
        CHECK(a.trajectory[i].bank_cash == b.trajectory[i].bank_cash);
        CHECK(a.trajectory[i].gini == b.trajectory[i].gini);
    }
    const RunResult c = [&] {
        RunConfig c2 = cfg;
        c2.seed += 1;
        return run(c2);
    }();
    CHECK(a.final_state.wealth != c.final_state.wealth);
}

TEST_CASE("exponential clock advances stochastically with the right mean") {
    const ModelParams params{100, 2.0, 0.0, 1.0};
    AgentEnsemble e = init_ensemble(params);
    Xoshiro256pp rng(3);
    const int events = 200000;
    for (int k = 0; k < events; ++k) step_event(e, rng, params.lambda, TimeMode::ExponentialClock);
    // mean waiting time 1/(lambda N); relative sd ~ 1/sqrt(events)
    CHECK(e.elapsed_time == doctest::Approx(events / 100.0).epsilon(0.02));
}

TEST_CASE("two agents, one coin: occupancy matches the exact stationary law") {
    // states by wealth of agent 0: {0, 1, 2}; transition matrix of the
    // embedded chain, row-stochastic
    const std::array<std::array<double, 3>, 3> p{{
        {0.5, 0.5, 0.0},
        {0.5, 0.0, 0.5},
        {0.0, 0.5, 0.5},
    }};
    const std::array<double, 3> pi = stationary_3state(p);
    CHECK(pi[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));

    const ModelParams params{2, 1.0, 0.0, 1.0};
    AgentEnsemble e = init_ensemble(params);
    Xoshiro256pp rng(77);
    std::array<std::int64_t, 3> counts{0, 0, 0};
    const int burn_in = 10000, samples = 400000;
    for (int k = 0; k < burn_in; ++k) step_event(e, rng, params.lambda, TimeMode::EventCount);
    for (int k = 0; k < samples; ++k) {
        step_event(e, rng, params.lambda, TimeMode::EventCount);
        counts[static_cast<std::size_t>(e.wealth[0])] += 1;
    }
    for (int s = 0; s < 3; ++s)
        CHECK(static_cast<double>(counts[static_cast<std::size_t>(s)]) / samples ==
              doctest::Approx(pi[static_cast<std::size_t>(s)]).epsilon(0.02));
}

TEST_CASE("run_ensemble") {
    RunConfig cfg;
    cfg.params = {50, 2.0, 0.5, 1.0};
    cfg.max_events = 5000;
    cfg.seed = 42;
    cfg.record_stride = 500;
    cfg.snapshot_schedule = {5000};

    SUBCASE("one replica equals a plain run") {
        const RunResult single = run(cfg);
        const EnsembleResult ens = run_ensemble(cfg, 1);
        REQUIRE(ens.trajectory.size() == single.trajectory.size());
        for (std::size_t i = 0; i < ens.trajectory.size(); ++i) {
            CHECK(ens.trajectory[i].bank_cash == static_cast<double>(single.trajectory[i].bank_cash));
            CHECK(ens.trajectory[i].gini == single.trajectory[i].gini);
        }
    }
    SUBCASE("forced equal seeds average to either replica") {
        const RunResult single = run(cfg);
        const EnsembleResult ens = run_ensemble(cfg, 2, /*seed_stride=*/0);
        for (std::size_t i = 0; i < ens.trajectory.size(); ++i)
            CHECK(ens.trajectory[i].bank_cash == doctest::Approx(static_cast<double>(single.trajectory[i].bank_cash)));
        CHECK(tv_distance(ens.snapshots.back().second, single.snapshots.back().second) ==
              doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("distinct seeds recorded") {
        const EnsembleResult ens = run_ensemble(cfg, 3);
        CHECK(ens.seeds == std::vector<std::uint64_t>{42, 43, 44});
    }
}
