#include "doctest.h"

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "exkin/equilibrium.hpp"
#include "exkin/gini_analysis.hpp"
#include "exkin/meanfield.hpp"

#include "oracles.hpp"

using namespace exkin;

namespace {

// Independent route to (p0*, r*, d*): for a trial p0, the side masses follow
// from the constraint quadratics; bisect on total mass = 1.
struct EqTriple {
    long double p0, r, d;
};

EqTriple solve_equilibrium_by_bisection(long double mu, long double nu) {
    const auto side = [](long double p0, long double rhs) {
        return (-p0 + std::sqrt(p0 * p0 + 4.0L * rhs)) / 2.0L;  // x(x+p0) = rhs
    };
    const auto total = [&](long double p0) {
        return p0 + side(p0, p0 * mu * (nu + 1.0L)) + side(p0, p0 * mu * nu);
    };
    long double lo = 1e-12L, hi = 1.0L;
    for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        (total(mid) < 1.0L ? lo : hi) = mid;
    }
    const long double p0 = 0.5L * (lo + hi);
    return {p0, side(p0, p0 * mu * (nu + 1.0L)), side(p0, p0 * mu * nu)};
}

// Independent long-double transcription of the linearization constants.
struct LinOracle {
    long double c1, c2, c3, c4, gamma, margin;
};

LinOracle linearization_oracle(long double mu, long double nu) {
    const EqTriple e = solve_equilibrium_by_bisection(mu, nu);
    const long double p0 = e.p0, r = e.r, d = e.d;
    const long double t1 = r / (2.0L * r + p0);
    const long double t2 = r * d * d / ((2.0L * d + p0) * (r + p0) * (r + p0));
    const long double t3 = r * d / ((r + p0) * (2.0L * d + p0));
    const long double t4 = r * r * r * d / ((r + p0) * (2.0L * r + p0) * (d + p0) * (d + p0));
    LinOracle o;
    o.c1 = 1.0L - r * d / ((r + p0) * (d + p0)) - t1 - t2 - t3 - t4;
    o.c3 = t1 + t2 + t3 + t4;
    const long double x1 = std::pow((std::sqrt(r + p0) - std::sqrt(r)) / std::sqrt(r + p0), 2.0L);
    const long double x2 = (r / (r + p0)) * std::pow((std::sqrt(d + p0) - std::sqrt(d)) / std::sqrt(d + p0), 2.0L);
    o.c2 = std::max(x1, x2);
    o.c4 = std::min(x1, x2);
    const long double g = r * r / (2.0L * r + p0) + d * d / (2.0L * d + p0);
    o.gamma = g / (p0 + g);
    o.margin = o.c4 - o.c3 - (o.c1 > o.c2 ? o.gamma * (o.c1 - o.c2) : 0.0L);
    return o;
}

// random member of the constraint set of p*: same mass, mean and
// negative-side moment; strictly positive
WealthPMF random_constrained_member(std::mt19937_64& gen, const WealthPMF& pstar) {
    const std::size_t w = pstar.size();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> noise(w);
    for (std::size_t i = 0; i < w; ++i) noise[i] = u(gen) * pstar.slot(i);

    // project out the three conserved functionals (euclidean projection)
    std::array<std::vector<double>, 3> basis;
    for (auto& b : basis) b.assign(w, 0.0);
    for (std::size_t i = 0; i < w; ++i) {
        const int n = pstar.wealth_of(i);
        basis[0][i] = 1.0;
        basis[1][i] = n;
        basis[2][i] = n <= 0 ? n : 0.0;
    }
    // Gram-Schmidt
    for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < k; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < w; ++i) dot += basis[static_cast<std::size_t>(k)][i] * basis[static_cast<std::size_t>(j)][i];
            for (std::size_t i = 0; i < w; ++i) basis[static_cast<std::size_t>(k)][i] -= dot * basis[static_cast<std::size_t>(j)][i];
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < w; ++i) nrm += basis[static_cast<std::size_t>(k)][i] * basis[static_cast<std::size_t>(k)][i];
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < w; ++i) basis[static_cast<std::size_t>(k)][i] /= nrm;
    }
    for (int k = 0; k < 3; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < w; ++i) dot += noise[i] * basis[static_cast<std::size_t>(k)][i];
        for (std::size_t i = 0; i < w; ++i) noise[i] -= dot * basis[static_cast<std::size_t>(k)][i];
    }
    // keep positivity with room to spare
    double scale = 1.0;
    for (std::size_t i = 0; i < w; ++i)
        if (noise[i] < 0.0) scale = std::min(scale, 0.5 * pstar.slot(i) / -noise[i]);
    std::vector<double> probs(w);
    for (std::size_t i = 0; i < w; ++i) probs[i] = pstar.slot(i) + scale * noise[i];
    return WealthPMF::normalized(pstar.n_min(), std::move(probs));
}

}  // namespace

TEST_CASE("equilibrium closed forms") {
    SUBCASE("mu = 1 reduces to 1/(4 nu + 2)") {
        for (const double nu : {0.1, 0.25, 0.5, 1.0, 2.0, 5.0})
            CHECK(equilibrium_spec(1.0, nu).p0_star == 1.0 / (4.0 * nu + 2.0));
    }
    SUBCASE("mu = 1, nu = 0.5") {
        const EquilibriumSpec eq = equilibrium_spec(1.0, 0.5);
        CHECK(eq.p0_star == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(eq.r_star == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(eq.d_star == doctest::Approx(0.25).epsilon(1e-14));
    }
    SUBCASE("mu = 10, nu = 0.4 in exact rationals") {
        const EquilibriumSpec eq = equilibrium_spec(10.0, 0.4);
        CHECK(eq.p0_star == doctest::Approx(1.0 / 33.0).epsilon(1e-15));
        CHECK(eq.r_star == doctest::Approx(7.0 / 11.0).epsilon(1e-15));
        CHECK(eq.d_star == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(eq.ratio_right == doctest::Approx(21.0 / 22.0).epsilon(1e-15));
        CHECK(eq.ratio_left == doctest::Approx(11.0 / 12.0).epsilon(1e-15));
    }
    SUBCASE("agrees with the independent bisection solver") {
        for (const double mu : {0.5, 1.0, 2.0, 10.0})
            for (const double nu : {0.1, 0.4, 1.0, 5.0}) {
                const EquilibriumSpec eq = equilibrium_spec(mu, nu);
                const EqTriple o = solve_equilibrium_by_bisection(mu, nu);
                CHECK(eq.p0_star == doctest::Approx(static_cast<double>(o.p0)).epsilon(1e-12));
                CHECK(eq.r_star == doctest::Approx(static_cast<double>(o.r)).epsilon(1e-12));
                CHECK(eq.d_star == doctest::Approx(static_cast<double>(o.d)).epsilon(1e-12));
            }
    }
    SUBCASE("constraint identities on the grid") {
        for (const double mu : {0.5, 1.0, 2.0, 10.0})
            for (const double nu : {0.1, 0.4, 1.0, 5.0}) {
                const EquilibriumSpec eq = equilibrium_spec(mu, nu);
                CHECK(eq.r_star + eq.p0_star + eq.d_star == doctest::Approx(1.0).epsilon(1e-14));
                CHECK(eq.r_star * (eq.r_star + eq.p0_star) ==
                      doctest::Approx(eq.p0_star * mu * (nu + 1.0)).epsilon(1e-12));
                CHECK(eq.d_star * (eq.d_star + eq.p0_star) == doctest::Approx(eq.p0_star * mu * nu).epsilon(1e-12));
                CHECK(eq.ratio_right >= 0.0);
                CHECK(eq.ratio_right < 1.0);
                CHECK(eq.ratio_left >= 0.0);
                CHECK(eq.ratio_left < 1.0);
            }
    }
    SUBCASE("nu = 0 degenerates to the one-sided geometric") {
        const EquilibriumSpec eq = equilibrium_spec(10.0, 0.0);
        CHECK(eq.d_star == 0.0);
        CHECK(eq.ratio_left == 0.0);
        CHECK(eq.p0_star == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
        CHECK(eq.ratio_right == doctest::Approx(10.0 / 11.0).epsilon(1e-14));
        CHECK(equilibrium_prob(eq, -1) == 0.0);
    }
    CHECK_THROWS_AS(equilibrium_spec(-1.0, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(equilibrium_spec(10.0, -0.1), std::invalid_argument);
}

TEST_CASE("equilibrium pmf hits its moments") {
    const auto [eq, pmf] = equilibrium_pmf(10.0, 0.4);
    CHECK(mass(pmf) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean(pmf) == doctest::Approx(10.0).epsilon(1e-10));
    CHECK(debt(pmf) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(pmf.window_sufficient(1e-14));
    SUBCASE("windowed pmf agrees with the analytic values") {
        for (int n = pmf.n_min(); n <= pmf.n_max(); ++n)
            CHECK(pmf.at(n) == doctest::Approx(equilibrium_prob(eq, n)).epsilon(1e-15));
    }
    SUBCASE("kl_to_equilibrium consistent with the generic kl") {
        std::mt19937_64 gen(31);
        const WealthPMF p = oracle::random_pmf(gen, -8, 12);
        CHECK(kl_to_equilibrium(p, eq) == doctest::Approx(kl_divergence(p, pmf)).epsilon(1e-12));
    }
}

TEST_CASE("laplace parameters") {
    SUBCASE("frozen values at mu = 10, nu = 0.4") {
        const LaplaceParams lp = laplace_params(10.0, 0.4);
        CHECK(lp.rho0 == doctest::Approx(0.030333704529042345).epsilon(1e-14));
        CHECK(lp.alpha == doctest::Approx(0.046547751617515123).epsilon(1e-14));
        CHECK(lp.beta == doctest::Approx(0.087082869338697069).epsilon(1e-14));
    }
    SUBCASE("1/mu scaling") {
        const LaplaceParams a = laplace_params(10.0, 0.7);
        const LaplaceParams b = laplace_params(30.0, 0.7);
        CHECK(b.rho0 == doctest::Approx(a.rho0 / 3.0).epsilon(1e-14));
        CHECK(b.alpha == doctest::Approx(a.alpha / 3.0).epsilon(1e-14));
        CHECK(b.beta == doctest::Approx(a.beta / 3.0).epsilon(1e-14));
    }
    SUBCASE("alpha and beta shrink as the bank grows") {
        double prev_a = 1e300, prev_b = 1e300;
        for (const double nu : {0.5, 1.0, 2.0, 8.0, 32.0}) {
            const LaplaceParams lp = laplace_params(10.0, nu);
            CHECK(lp.alpha < prev_a);
            CHECK(lp.beta < prev_b);
            CHECK(lp.alpha > 0.0);
            CHECK(lp.beta > 0.0);
            prev_a = lp.alpha;
            prev_b = lp.beta;
        }
    }
    CHECK_THROWS_AS(laplace_params(10.0, 0.0), std::domain_error);

    SUBCASE("asymptotic rates approach the exact ones") {
        struct Case {
            double mu, tol;
        };
        for (const Case c : {Case{50.0, 0.05}, Case{100.0, 0.025}}) {
            const EquilibriumSpec eq = equilibrium_spec(c.mu, 0.4);
            const LaplaceParams lp = laplace_params(c.mu, 0.4);
            const double alpha_exact = std::log((eq.r_star + eq.p0_star) / eq.r_star);
            const double beta_exact = std::log((eq.d_star + eq.p0_star) / eq.d_star);
            CHECK(std::abs(alpha_exact - lp.alpha) / alpha_exact < c.tol);
            CHECK(std::abs(beta_exact - lp.beta) / beta_exact < c.tol);
        }
    }
}

TEST_CASE("entropy dissipation rate") {
    const auto [eq, pstar] = equilibrium_pmf(10.0, 0.4);
    SUBCASE("vanishes at equilibrium") {
        CHECK(std::abs(entropy_dissipation_rate(pstar, eq)) < 1e-12);
    }
    SUBCASE("strictly negative off equilibrium, non-positive always") {
        std::mt19937_64 gen(32);
        for (int k = 0; k < 100; ++k) {
            const WealthPMF p = random_constrained_member(gen, pstar);
            const double rate = entropy_dissipation_rate(p, eq);
            CHECK(rate <= 0.0);
            if (tv_distance(p, pstar) > 1e-6) CHECK(rate < 0.0);
        }
    }
    SUBCASE("matches the finite-difference KL slope along a phase-II run") {
        std::mt19937_64 gen(33);
        const WealthPMF p0 = random_constrained_member(gen, pstar);
        const ModelParams params{0, 10.0, 0.4, 1.0};
        IntegratorConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 0.2;
        cfg.record_stride = 1e-3;
        cfg.snapshot_times = {0.1};
        const MeanFieldResult res = integrate_two_phase(p0, params, cfg);
        REQUIRE(res.final_state.phase == Phase::PhaseII);
        REQUIRE(res.snapshots.size() == 1);
        // central difference of the recorded KL against the analytic rate
        const auto& rows = res.trajectory;
        std::size_t mid = 0;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (std::abs(rows[i].t - 0.1) < 1e-9) mid = i;
        REQUIRE(mid > 0);
        REQUIRE(mid + 1 < rows.size());
        const double fd = (rows[mid + 1].dkl_to_eq - rows[mid - 1].dkl_to_eq) /
                          (rows[mid + 1].t - rows[mid - 1].t);
        const double analytic = entropy_dissipation_rate(res.snapshots[0].second, eq);
        CHECK(analytic < 0.0);
        CHECK(fd == doctest::Approx(analytic).epsilon(0.02));
    }
    SUBCASE("degenerate inputs are rejected") {
        CHECK_THROWS_AS(entropy_dissipation_rate(WealthPMF::delta(5), eq), std::domain_error);
    }
}

TEST_CASE("sqrt-exponential decay fit") {
    SUBCASE("exact recovery") {
        std::vector<std::pair<double, double>> series;
        for (int k = 0; k < 20; ++k) {
            const double t = 200.0 + 250.0 * k;
            series.emplace_back(t, 0.674 * std::exp(-0.182 * std::sqrt(t)));
        }
        const DecayFit fit = fit_sqrt_exponential_decay(series);
        CHECK(fit.c1 == doctest::Approx(0.674).epsilon(1e-10));
        CHECK(fit.c2 == doctest::Approx(0.182).epsilon(1e-10));
        CHECK(fit.rms_log_residual < 1e-12);
    }
    SUBCASE("constant series") {
        std::vector<std::pair<double, double>> series;
        for (int k = 0; k < 10; ++k) series.emplace_back(10.0 * k + 1.0, 0.5);
        const DecayFit fit = fit_sqrt_exponential_decay(series);
        CHECK(fit.c2 == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(fit.c1 == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("multiplicative noise keeps coefficients within 5%") {
        std::mt19937_64 gen(34);
        std::normal_distribution<double> noise(0.0, 0.01);
        std::vector<std::pair<double, double>> series;
        for (int k = 0; k < 200; ++k) {
            const double t = 200.0 + 24.0 * k;
            series.emplace_back(t, 0.674 * std::exp(-0.182 * std::sqrt(t)) * (1.0 + noise(gen)));
        }
        const DecayFit fit = fit_sqrt_exponential_decay(series);
        CHECK(fit.c1 == doctest::Approx(0.674).epsilon(0.05));
        CHECK(fit.c2 == doctest::Approx(0.182).epsilon(0.05));
    }
    SUBCASE("input validation") {
        std::vector<std::pair<double, double>> tiny{{1.0, 0.5}, {2.0, 0.4}};
        CHECK_THROWS_AS(fit_sqrt_exponential_decay(tiny), std::invalid_argument);
        std::vector<std::pair<double, double>> bad;
        for (int k = 0; k < 10; ++k) bad.emplace_back(k + 1.0, k == 5 ? 0.0 : 0.5);
        CHECK_THROWS_AS(fit_sqrt_exponential_decay(bad), std::invalid_argument);
    }
}

TEST_CASE("linearization report") {
    SUBCASE("frozen example: (mu, nu) = (0.01, 0.001)") {
        const LinearizationReport rep = linearization_report(0.01, 0.001);
        CHECK(rep.margin == doctest::Approx(1.6647226954568657e-05).epsilon(1e-9));
        CHECK(rep.in_g);
        CHECK(rep.gamma == doctest::Approx(9.8225864150453413e-05).epsilon(1e-9));
    }
    SUBCASE("agrees with the independent long-double transcription at (10, 0.4)") {
        const LinearizationReport rep = linearization_report(10.0, 0.4);
        const LinOracle o = linearization_oracle(10.0L, 0.4L);
        CHECK(rep.c1 == doctest::Approx(static_cast<double>(o.c1)).epsilon(1e-12));
        CHECK(rep.c2 == doctest::Approx(static_cast<double>(o.c2)).epsilon(1e-12));
        CHECK(rep.c3 == doctest::Approx(static_cast<double>(o.c3)).epsilon(1e-12));
        CHECK(rep.c4 == doctest::Approx(static_cast<double>(o.c4)).epsilon(1e-12));
        CHECK(rep.gamma == doctest::Approx(static_cast<double>(o.gamma)).epsilon(1e-12));
        CHECK(rep.margin == doctest::Approx(static_cast<double>(o.margin)).epsilon(1e-10));
        CHECK_FALSE(rep.in_g);
    }
    SUBCASE("structural bounds on a parameter grid") {
        for (const double mu : {0.05, 0.5, 1.0, 2.0, 10.0})
            for (const double nu : {0.01, 0.1, 0.4, 1.0, 5.0}) {
                const LinearizationReport rep = linearization_report(mu, nu);
                CHECK(rep.c2 >= rep.c4);
                CHECK(rep.gamma > 0.0);
                CHECK(rep.gamma < 1.0);
                // C1 + C3 + r d /((r+p0)(d+p0)) = 1 by construction
                const EquilibriumSpec eq = equilibrium_spec(mu, nu);
                const double cross = eq.r_star * eq.d_star /
                                     ((eq.r_star + eq.p0_star) * (eq.d_star + eq.p0_star));
                CHECK(rep.c1 + rep.c3 + cross == doctest::Approx(1.0).epsilon(1e-12));
            }
    }
    CHECK_THROWS_AS(linearization_report(10.0, 0.0), std::invalid_argument);
}

TEST_CASE("phase-I gini growth identity") {
    SUBCASE("point mass: rate 2/mu") {
        const GiniRateCheck chk = gini_phase1_derivative_check(WealthPMF::delta(10), 1e-6);
        CHECK(chk.tie_rate == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(chk.finite_difference == doctest::Approx(chk.tie_rate).epsilon(1e-5));
    }
    SUBCASE("symmetric two-point: rate 1/mu") {
        const WealthPMF p = WealthPMF::from_points({{9, 0.5}, {11, 0.5}});
        const GiniRateCheck chk = gini_phase1_derivative_check(p, 1e-6);
        CHECK(chk.tie_rate == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(chk.finite_difference == doctest::Approx(chk.tie_rate).epsilon(1e-5));
    }
    SUBCASE("random distributions at dt = 1e-6") {
        std::mt19937_64 gen(35);
        for (int k = 0; k < 20; ++k) {
            const WealthPMF p = oracle::random_pmf(gen, -4, 14);
            const GiniRateCheck chk = gini_phase1_derivative_check(p, 1e-6);
            CHECK(std::abs(chk.finite_difference - chk.tie_rate) < 1e-6);
        }
    }
    SUBCASE("first-order convergence in dt") {
        std::mt19937_64 gen(36);
        const WealthPMF p = oracle::random_pmf(gen, -3, 11);
        const double e3 = std::abs(gini_phase1_derivative_check(p, 1e-3).finite_difference -
                                   gini_phase1_derivative_check(p, 1e-3).tie_rate);
        const double e5 = std::abs(gini_phase1_derivative_check(p, 1e-5).finite_difference -
                                   gini_phase1_derivative_check(p, 1e-5).tie_rate);
        CHECK(e5 < e3 / 10.0);  // order >= 1
    }
}

TEST_CASE("banked vs bankless gini comparison") {
    IntegratorConfig cfg;
    cfg.t_end = 30.0;
    cfg.record_stride = 2.0;
    SUBCASE("nu = 0 against itself is identical") {
        const GiniComparison cmp = compare_gini_vs_vanilla(5.0, 0.0, cfg);
        for (const auto& row : cmp.rows) CHECK(row.banked == row.bankless);
        CHECK(cmp.banked_dominates);
    }
    SUBCASE("a bank never lowers the recorded gini in this run") {
        IntegratorConfig longer = cfg;
        longer.t_end = 120.0;  // crosses into the bank-constrained phase
        longer.record_stride = 4.0;
        const GiniComparison cmp = compare_gini_vs_vanilla(10.0, 0.25, longer);
        CHECK(cmp.banked_dominates);  // observed for this configuration, conjectured in general
        CHECK(cmp.max_banked >= cmp.max_bankless);
    }
}
