#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exkin/equilibrium.hpp"
#include "exkin/model_params.hpp"
#include "exkin/wealth_pmf.hpp"

namespace exkin {

enum class Phase { PhaseI, PhaseII, Vanilla };

std::string to_string(Phase phase);

enum class Scheme { RK4, Euler };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct IntegratorConfig {
    double dt = 0.01;
    Scheme scheme = Scheme::RK4;
    double tail_threshold = 1e-14;
    double t_end = 100.0;
    double record_stride = 1.0;
    std::vector<double> snapshot_times;
    std::size_t max_window = std::size_t{1} << 22;  // hard cap on window slots

    void validate() const;
};

struct MeanFieldState {
    WealthPMF pmf;
    double time = 0.0;
    Phase phase = Phase::PhaseI;
    double accumulated_debt = 0.0;  // D[p] = -sum_{n<=-1} n p_n
    std::optional<double> t_star;
};

struct MfSample {
    double t = 0.0;
    Phase phase = Phase::PhaseI;
    double mass = 0.0;
    double mean = 0.0;
    double debt = 0.0;
    double dkl_to_eq = 0.0;
    double gini = 0.0;
};

struct WindowChange {
    double t = 0.0;
    int n_min = 0;
    int n_max = 0;
};

struct MeanFieldResult {
    std::vector<MfSample> trajectory;
    MeanFieldState final_state;
    std::vector<std::pair<double, WealthPMF>> snapshots;
    std::vector<WindowChange> window_history;
    std::uint64_t clamped_entries = 0;
    std::optional<double> t_star;
};

// -- operators -----------------------------------------------------------
// Each returns the exact rate vector on the input window grown by one slot
// per open side; entries sum to 0 and the first moment is conserved.

// free random walk: Q1[p]_n = p_{n+1} + p_{n-1} - 2 p_n
WealthVector q1_apply(const WealthPMF& p);

// bank-constrained dynamics with coefficients from r = sum_{n>=1} p_n,
// d = sum_{n<=-1} p_n, p_0; throws std::domain_error when r + p_0 or
// d + p_0 is degenerate (< 1e-300)
WealthVector q2_apply(const WealthPMF& p);

// bankless model on non-negative support: Q[q]_n = q_{n+1} + rbar q_{n-1}
// - (1 + rbar) q_n for n >= 1 and q_1 - rbar q_0 at n = 0
WealthVector q_vanilla_apply(const WealthPMF& q);

// -- integration ---------------------------------------------------------

/// One explicit time step of d/dt p = lambda * Q_phase[p]. Auto-extends the
/// window when a boundary slot exceeds cfg.tail_threshold, clamps negative
/// round-off entries and renormalizes. Does not switch phases.
MeanFieldState step(const MeanFieldState& state, const ModelParams& params, const IntegratorConfig& cfg);

/// First crossing time of the debt series through `threshold`: binary search
/// for the bracketing samples, then linear interpolation. Samples must be
/// non-decreasing in debt; throws std::runtime_error when the threshold is
/// never reached.
double detect_t_star(const std::vector<std::pair<double, double>>& time_debt, double threshold);

/// Full run: phase I until the debt functional reaches mu*nu, then phase II
/// until t_end. nu = 0 routes to the bankless operator for the whole run.
/// The operator switch applies from the step following the interpolated t*;
/// the state is not re-projected.
MeanFieldResult integrate_two_phase(const WealthPMF& p0, const ModelParams& params, const IntegratorConfig& cfg);

}  // namespace exkin
