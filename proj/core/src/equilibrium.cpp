#include "exkin/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exkin {

EquilibriumSpec equilibrium_spec(double mu, double nu) {
    if (!(mu > 0.0)) throw std::invalid_argument("equilibrium_spec: mu must be > 0");
    if (!(nu >= 0.0)) throw std::invalid_argument("equilibrium_spec: nu must be >= 0");
    EquilibriumSpec eq;
    eq.mu = mu;
    eq.nu = nu;
    // rationalized peak value, continuous at mu = 1 where it reduces to
    // 1/(4 nu + 2); avoids the cancellation of the (mu^2 - 1) form
    const double root = std::sqrt(mu * mu * nu * nu + mu * mu * nu + 0.25);
    eq.p0_star = 1.0 / (2.0 * (mu * (nu + 0.5) + root));
    eq.r_star = ((mu - 1.0) * eq.p0_star + 1.0) / 2.0;
    eq.d_star = 1.0 - eq.p0_star - eq.r_star;
    if (eq.d_star < 0.0) eq.d_star = 0.0;  // nu = 0 round-off
    eq.ratio_right = eq.r_star / (eq.r_star + eq.p0_star);
    eq.ratio_left = eq.d_star > 0.0 ? eq.d_star / (eq.d_star + eq.p0_star) : 0.0;
    return eq;
}

double equilibrium_prob(const EquilibriumSpec& eq, int n) {
    if (n >= 0) return eq.p0_star * std::pow(eq.ratio_right, n);
    if (eq.ratio_left == 0.0) return 0.0;
    return eq.p0_star * std::pow(eq.ratio_left, -n);
}

std::pair<EquilibriumSpec, WealthPMF> equilibrium_pmf(double mu, double nu, double slot_eps) {
    const EquilibriumSpec eq = equilibrium_spec(mu, nu);
    const auto side_extent = [&](double ratio) -> int {
        if (ratio <= 0.0) return 0;
        // smallest k with p0 ratio^k < slot_eps
        const int k = static_cast<int>(std::ceil(std::log(slot_eps / eq.p0_star) / std::log(ratio)));
        return std::max(k, 1);
    };
    const int hi = side_extent(eq.ratio_right);
    const int lo = -side_extent(eq.ratio_left);
    std::vector<double> probs(static_cast<std::size_t>(hi - lo + 1));
    for (int n = lo; n <= hi; ++n) probs[static_cast<std::size_t>(n - lo)] = equilibrium_prob(eq, n);
    return {eq, WealthPMF(lo, std::move(probs))};
}

double kl_to_equilibrium(const WealthPMF& p, const EquilibriumSpec& eq) {
    const double log_p0 = std::log(eq.p0_star);
    const double log_rr = std::log(eq.ratio_right);
    const double log_rl = eq.ratio_left > 0.0 ? std::log(eq.ratio_left) : 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pn = p.slot(i);
        if (pn == 0.0) continue;
        const int n = p.wealth_of(i);
        if (n < 0 && eq.ratio_left == 0.0)
            throw std::domain_error("kl_to_equilibrium: p has negative-wealth mass but the equilibrium does not");
        const double log_q = log_p0 + (n >= 0 ? n * log_rr : -n * log_rl);
        s += pn * (std::log(pn) - log_q);
    }
    return s;
}

LaplaceParams laplace_params(double mu, double nu) {
    if (!(mu > 0.0)) throw std::invalid_argument("laplace_params: mu must be > 0");
    if (!(nu > 0.0)) throw std::domain_error("laplace_params: beta diverges as nu -> 0");
    LaplaceParams lp;
    const double s1 = std::sqrt(1.0 + nu);
    const double s0 = std::sqrt(nu);
    lp.rho0 = (s1 - s0) * (s1 - s0) / mu;
    lp.alpha = (1.0 - std::sqrt(nu / (1.0 + nu))) / mu;
    lp.beta = (std::sqrt((1.0 + nu) / nu) - 1.0) / mu;
    return lp;
}

double entropy_dissipation_rate(const WealthPMF& p, const EquilibriumSpec& /*eq*/) {
    const double r = rich_fraction(p);
    const double d = indebted_fraction(p);
    const double p0 = p.at(0);
    if (r + p0 < 1e-300 || d + p0 < 1e-300)
        throw std::domain_error("entropy_dissipation_rate: degenerate distribution (r + p0 or d + p0 ~ 0)");
    double total = 0.0;
    // right branch, n >= 0: -r (p_{n+1}/r - p_n/(r+p0)) log ratio
    for (int n = std::max(0, p.n_min()); n < p.n_max(); ++n) {
        const double pn = p.at(n), pn1 = p.at(n + 1);
        if (pn <= 0.0 || pn1 <= 0.0) continue;  // truncated tail terms
        const double x = pn1 / r;
        const double y = pn / (r + p0);
        total -= r * (x - y) * std::log(x / y);
    }
    // left branch, n <= -1: -(r d/(r+p0)) (p_{n+1}/(d+p0) - p_n/d) log ratio
    if (d > 0.0) {
        const double w = r * d / (r + p0);
        for (int n = p.n_min(); n <= -1; ++n) {
            const double pn = p.at(n), pn1 = p.at(n + 1);
            if (pn <= 0.0 || pn1 <= 0.0) continue;
            const double x = pn1 / (d + p0);
            const double y = pn / d;
            total -= w * (x - y) * std::log(x / y);
        }
    }
    return total;
}

DecayFit fit_sqrt_exponential_decay(const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 8) throw std::invalid_argument("fit_sqrt_exponential_decay: need >= 8 samples");
    // regression of log d on (1, -sqrt(t))
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(series.size());
    for (const auto& [t, d] : series) {
        if (!(d > 0.0)) throw std::invalid_argument("fit_sqrt_exponential_decay: non-positive sample");
        if (!(t >= 0.0)) throw std::invalid_argument("fit_sqrt_exponential_decay: negative time");
        const double x = std::sqrt(t);
        const double y = std::log(d);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    DecayFit fit;
    fit.n_samples = series.size();
    double a, b;  // y = a - b x
    if (det == 0.0) {  // all samples at one t
        a = sy / n;
        b = 0.0;
    } else {
        b = -(n * sxy - sx * sy) / det;
        a = (sy + b * sx) / n;
    }
    fit.c1 = std::exp(a);
    fit.c2 = b;
    double ss = 0.0;
    for (const auto& [t, d] : series) {
        const double resid = std::log(d) - (a - b * std::sqrt(t));
        ss += resid * resid;
    }
    fit.rms_log_residual = std::sqrt(ss / n);
    return fit;
}

LinearizationReport linearization_report(double mu, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("linearization_report: needs nu > 0 (d* > 0)");
    const EquilibriumSpec eq = equilibrium_spec(mu, nu);
    const double p0 = eq.p0_star, r = eq.r_star, d = eq.d_star;

    const double shared = r / (2.0 * r + p0) + r * d * d / ((2.0 * d + p0) * (r + p0) * (r + p0)) +
                          r * d / ((r + p0) * (2.0 * d + p0)) +
                          r * r * r * d / ((r + p0) * (2.0 * r + p0) * (d + p0) * (d + p0));
    const double c1 = 1.0 - r * d / ((r + p0) * (d + p0)) - shared;
    const double c3 = shared;

    const double right = std::pow((std::sqrt(r + p0) - std::sqrt(r)) / std::sqrt(r + p0), 2.0);
    const double left = (r / (r + p0)) * std::pow((std::sqrt(d + p0) - std::sqrt(d)) / std::sqrt(d + p0), 2.0);
    const double c2 = std::max(right, left);
    const double c4 = std::min(right, left);

    const double gnum = r * r / (2.0 * r + p0) + d * d / (2.0 * d + p0);
    const double gamma = gnum / (p0 + gnum);

    LinearizationReport rep;
    rep.mu = mu;
    rep.nu = nu;
    rep.c1 = c1;
    rep.c2 = c2;
    rep.c3 = c3;
    rep.c4 = c4;
    rep.gamma = gamma;
    rep.margin = c4 - c3 - (c1 > c2 ? gamma * (c1 - c2) : 0.0);
    rep.in_g = rep.margin > 0.0;
    return rep;
}

}  // namespace exkin
