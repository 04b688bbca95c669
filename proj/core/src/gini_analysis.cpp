#include "exkin/gini_analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "exkin/model_params.hpp"

namespace exkin {

GiniRateCheck gini_phase1_derivative_check(const WealthPMF& p, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("gini_phase1_derivative_check: dt must be > 0");
    const double mu = mean(p);
    if (!(mu > 0.0)) throw std::domain_error("gini_phase1_derivative_check: mean must be positive");

    const WealthVector rate = q1_apply(p);
    std::vector<double> stepped(rate.size());
    for (std::size_t i = 0; i < rate.size(); ++i)
        stepped[i] = p.at(rate.wealth_of(i)) + dt * rate.slot(i);
    const WealthPMF p_next = WealthPMF::normalized(rate.n_min(), std::move(stepped));

    GiniRateCheck out;
    out.finite_difference = (gini(p_next) - gini(p)) / dt;
    double z0 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) z0 += p.slot(i) * p.slot(i);
    out.tie_rate = 2.0 * z0 / mu;
    return out;
}

GiniComparison compare_gini_vs_vanilla(double mu, double nu, const IntegratorConfig& cfg) {
    if (std::abs(mu - std::round(mu)) > 1e-9)
        throw std::invalid_argument("compare_gini_vs_vanilla: point-mass start needs integer mu");
    const WealthPMF p0 = WealthPMF::delta(static_cast<int>(std::llround(mu)));

    ModelParams banked{.n_agents = 0, .mu = mu, .nu = nu, .lambda = 1.0};
    ModelParams bankless{.n_agents = 0, .mu = mu, .nu = 0.0, .lambda = 1.0};
    const MeanFieldResult a = integrate_two_phase(p0, banked, cfg);
    const MeanFieldResult b = integrate_two_phase(p0, bankless, cfg);
    if (a.trajectory.size() != b.trajectory.size())
        throw std::logic_error("compare_gini_vs_vanilla: record grids diverged");

    GiniComparison cmp;
    cmp.banked_dominates = true;
    cmp.rows.reserve(a.trajectory.size());
    for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
        GiniComparisonRow row;
        row.t = a.trajectory[i].t;
        row.banked = a.trajectory[i].gini;
        row.bankless = b.trajectory[i].gini;
        cmp.rows.push_back(row);
        cmp.max_banked = std::max(cmp.max_banked, row.banked);
        cmp.max_bankless = std::max(cmp.max_bankless, row.bankless);
        if (row.banked > 1.0) cmp.banked_exceeds_one = true;
        if (row.banked < row.bankless - 1e-12) cmp.banked_dominates = false;
    }
    return cmp;
}

}  // namespace exkin
