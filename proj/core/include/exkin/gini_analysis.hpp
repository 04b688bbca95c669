#pragma once

#include <vector>

#include "exkin/meanfield.hpp"
#include "exkin/wealth_pmf.hpp"

namespace exkin {

/// Consistency probe for the phase-I Gini growth law. finite_difference is
/// the Gini increment along one small explicit step of the free-walk
/// operator divided by dt; tie_rate is the closed-form rate 2 z0 / mu with
/// z0 = sum_n p_n^2 the tie probability of two independent copies. The two
/// agree to O(dt); neither is asserted here, both are returned.
struct GiniRateCheck {
    double finite_difference = 0.0;
    double tie_rate = 0.0;
};

GiniRateCheck gini_phase1_derivative_check(const WealthPMF& p, double dt = 1e-6);

struct GiniComparisonRow {
    double t = 0.0;
    double banked = 0.0;
    double bankless = 0.0;
};

struct GiniComparison {
    std::vector<GiniComparisonRow> rows;
    double max_banked = 0.0;
    double max_bankless = 0.0;
    bool banked_exceeds_one = false;
    // true when banked >= bankless at every recorded time (reported, not a theorem)
    bool banked_dominates = false;
};

/// Runs the banked dynamics at (mu, nu) and the bankless dynamics (nu = 0)
/// from the same point mass at mu, and pairs the Gini trajectories on the
/// shared record grid. mu must be integral (point-mass initial condition).
GiniComparison compare_gini_vs_vanilla(double mu, double nu, const IntegratorConfig& cfg);

}  // namespace exkin
