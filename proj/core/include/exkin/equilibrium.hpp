#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "exkin/wealth_pmf.hpp"

namespace exkin {

/// Closed-form equilibrium of the bank-constrained dynamics: a two-sided
/// geometric distribution with peak p0_star at zero wealth and decay ratios
/// ratio_right / ratio_left on the two sides.
struct EquilibriumSpec {
    double mu = 0.0;
    double nu = 0.0;
    double p0_star = 0.0;
    double r_star = 0.0;
    double d_star = 0.0;
    double ratio_right = 0.0;  // r*/(r* + p0*)
    double ratio_left = 0.0;   // d*/(d* + p0*), 0 when nu = 0
};

EquilibriumSpec equilibrium_spec(double mu, double nu);

// equilibrium probability at wealth n, evaluated from the closed form
double equilibrium_prob(const EquilibriumSpec& eq, int n);

/// Equilibrium PMF on a window wide enough that every truncated slot is
/// below slot_eps (tail mass far below 1e-14 at the default); mass, mean mu
/// and debt mu*nu hold within 1e-10.
std::pair<EquilibriumSpec, WealthPMF> equilibrium_pmf(double mu, double nu, double slot_eps = 1e-18);

// KL(p || p*) with p* evaluated analytically (no window truncation of p*)
double kl_to_equilibrium(const WealthPMF& p, const EquilibriumSpec& eq);

/// Continuous asymmetric-Laplace parameters approximating the equilibrium
/// for mu >> 1: rho(x) = rho0 e^{-alpha x} (x >= 0), rho0 e^{beta x} (x <= 0).
struct LaplaceParams {
    double rho0 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

// throws std::domain_error for nu = 0 (beta diverges)
LaplaceParams laplace_params(double mu, double nu);

/// d/dt KL(p(t) || p*) along the phase-II flow, evaluated from p alone
/// (r, d, p_0 are read off p); always <= 0, zero exactly at equilibrium.
/// The EquilibriumSpec argument names the Lyapunov target; the rate itself
/// does not depend on it.
double entropy_dissipation_rate(const WealthPMF& p, const EquilibriumSpec& eq);

struct DecayFit {
    double c1 = 0.0;
    double c2 = 0.0;
    double rms_log_residual = 0.0;
    std::size_t n_samples = 0;
};

/// Least-squares fit of log d = log c1 - c2 sqrt(t) to (t, d) samples with
/// d > 0; needs >= 8 samples. Deterministic linear regression, no nonlinear
/// iteration.
DecayFit fit_sqrt_exponential_decay(const std::vector<std::pair<double, double>>& series);

/// Constants of the near-equilibrium linearization and the exponential-decay
/// sufficiency margin C4 - C3 - gamma (C1 - C2) 1{C1 > C2}.
struct LinearizationReport {
    double mu = 0.0;
    double nu = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    double gamma = 0.0;
    double margin = 0.0;
    bool in_g = false;  // margin > 0: linearized entropy decays exponentially
};

LinearizationReport linearization_report(double mu, double nu);

}  // namespace exkin
