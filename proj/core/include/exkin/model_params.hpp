#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace exkin {

/// Experiment parameters: N agents holding mu dollars each on average, a
/// bank endowed with B* = N mu nu dollars of cash, exchange rate lambda.
struct ModelParams {
    std::int64_t n_agents = 0;
    double mu = 0.0;
    double nu = 0.0;
    double lambda = 1.0;

    double bank_endowment() const { return static_cast<double>(n_agents) * mu * nu; }

    // mean-field usage only needs positive reals
    void validate_meanfield() const {
        if (!(mu > 0.0)) throw std::invalid_argument("mu must be > 0");
        if (!(nu >= 0.0)) throw std::invalid_argument("nu must be >= 0");
        if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    }

    // the agent system additionally needs N >= 2 and integer total money
    // N*mu and integer bank endowment N*mu*nu
    void validate_abm() const {
        validate_meanfield();
        if (n_agents < 2) throw std::invalid_argument("n_agents must be >= 2");
        if (!is_integral(static_cast<double>(n_agents) * mu))
            throw std::invalid_argument("N*mu must be a positive integer (got " +
                                        std::to_string(static_cast<double>(n_agents) * mu) + ")");
        if (!is_integral(bank_endowment()))
            throw std::invalid_argument("N*mu*nu must be a non-negative integer (got " +
                                        std::to_string(bank_endowment()) + ")");
    }

    std::int64_t total_money() const { return llround_checked(static_cast<double>(n_agents) * mu); }
    std::int64_t bank_total() const { return llround_checked(bank_endowment()); }

private:
    static bool is_integral(double x) { return std::abs(x - std::round(x)) < 1e-9; }
    static std::int64_t llround_checked(double x) {
        if (!is_integral(x)) throw std::invalid_argument("expected integral value, got " + std::to_string(x));
        return static_cast<std::int64_t>(std::llround(x));
    }
};

}  // namespace exkin
