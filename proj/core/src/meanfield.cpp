#include "exkin/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

namespace exkin {

std::string to_string(Phase phase) {
    switch (phase) {
        case Phase::PhaseI: return "phase1";
        case Phase::PhaseII: return "phase2";
        case Phase::Vanilla: return "vanilla";
    }
    return "?";
}

std::string to_string(Scheme s) { return s == Scheme::RK4 ? "rk4" : "euler"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "rk4" || s == "RK4") return Scheme::RK4;
    if (s == "euler" || s == "Euler") return Scheme::Euler;
    throw std::invalid_argument("unknown scheme: " + s + " (expected rk4 or euler)");
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(tail_threshold > 0.0 && tail_threshold <= 1e-8))
        throw std::invalid_argument("tail_threshold must lie in (0, 1e-8]");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
    if (!(record_stride > 0.0)) throw std::invalid_argument("record_stride must be > 0");
    if (max_window < 16) throw std::invalid_argument("max_window too small");
    if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
        throw std::invalid_argument("snapshot_times must be sorted ascending");
}

namespace {

// window-aligned kernels: out has the same window as p, neighbors outside
// the window read as zero (edge flux beyond the window is dropped; the
// integrator keeps boundary slots below tail_threshold so the loss stays
// under the renormalization budget)

void q1_rates(std::span<const double> p, std::span<double> out) {
    const std::size_t w = p.size();
    for (std::size_t i = 0; i < w; ++i) {
        const double up = i + 1 < w ? p[i + 1] : 0.0;
        const double dn = i > 0 ? p[i - 1] : 0.0;
        out[i] = up + dn - 2.0 * p[i];
    }
}

void q2_rates(std::span<const double> p, std::span<double> out, std::ptrdiff_t i0) {
    const auto w = static_cast<std::ptrdiff_t>(p.size());
    double r = 0.0, d = 0.0;
    for (std::ptrdiff_t i = w - 1; i > i0; --i) r += p[static_cast<std::size_t>(i)];
    for (std::ptrdiff_t i = 0; i < std::min(i0, w); ++i) d += p[static_cast<std::size_t>(i)];
    const double p0 = (i0 >= 0 && i0 < w) ? p[static_cast<std::size_t>(i0)] : 0.0;
    if (r + p0 < 1e-300 || d + p0 < 1e-300)
        throw std::domain_error("q2: degenerate distribution (r + p0 or d + p0 below 1e-300)");
    const double coeff_a = r * d / ((r + p0) * (d + p0));
    const double coeff_b = r / (r + p0);
    for (std::ptrdiff_t i = 0; i < w; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double up = i + 1 < w ? p[ui + 1] : 0.0;
        const double dn = i > 0 ? p[ui - 1] : 0.0;
        if (i < i0)
            out[ui] = coeff_a * up + coeff_b * dn - (coeff_a + coeff_b) * p[ui];
        else if (i == i0)
            out[ui] = up + coeff_b * dn - (coeff_a + coeff_b) * p[ui];
        else
            out[ui] = up + coeff_b * dn - (1.0 + coeff_b) * p[ui];
    }
}

void qv_rates(std::span<const double> p, std::span<double> out, std::ptrdiff_t i0) {
    const auto w = static_cast<std::ptrdiff_t>(p.size());
    double rbar = 0.0;
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(i0 + 1, 0); i < w; ++i) rbar += p[static_cast<std::size_t>(i)];
    for (std::ptrdiff_t i = 0; i < w; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double up = i + 1 < w ? p[ui + 1] : 0.0;
        if (i < i0)
            out[ui] = 0.0;
        else if (i == i0)
            out[ui] = up - rbar * p[ui];
        else
            out[ui] = up + rbar * (i > 0 ? p[ui - 1] : 0.0) - (1.0 + rbar) * p[ui];
    }
}

WealthVector padded_copy(const WealthPMF& p, bool pad_left) {
    const int lo = p.n_min() - (pad_left ? 1 : 0);
    WealthVector v = WealthVector::zeros(lo, p.n_max() + 1);
    for (std::size_t i = 0; i < p.size(); ++i)
        v.slot(static_cast<std::size_t>(p.wealth_of(i) - lo)) = p.slot(i);
    return v;
}

// PMF over the tight support window of a working vector
WealthPMF tight_pmf(const WealthVector& v) {
    std::size_t lo = 0, hi = v.size() - 1;
    while (lo < hi && v.slot(lo) <= 0.0) ++lo;
    while (hi > lo && v.slot(hi) <= 0.0) --hi;
    std::vector<double> probs(v.raw().begin() + static_cast<std::ptrdiff_t>(lo),
                              v.raw().begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    return WealthPMF::normalized(v.n_min() + static_cast<int>(lo), std::move(probs));
}

class Stepper {
public:
    Stepper(WealthVector state, Phase phase, double lambda, const IntegratorConfig& cfg)
        : p_(std::move(state)), phase_(phase), lambda_(lambda), cfg_(cfg) {
        resize_buffers();
    }

    void set_phase(Phase ph) { phase_ = ph; }
    const WealthVector& state() const { return p_; }
    std::uint64_t clamped() const { return clamped_; }
    std::vector<WindowChange> take_history() { return std::move(history_); }

    double debt_value() const { return debt(p_); }

    void do_step(double t_now) {
        maybe_extend(t_now);
        const double h = cfg_.dt * lambda_;
        auto& y = p_.raw();
        const std::size_t w = y.size();
        if (cfg_.scheme == Scheme::Euler) {
            rates(y, k1_);
            for (std::size_t i = 0; i < w; ++i) y[i] += h * k1_[i];
        } else {
            rates(y, k1_);
            for (std::size_t i = 0; i < w; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
            rates(tmp_, k2_);
            for (std::size_t i = 0; i < w; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
            rates(tmp_, k3_);
            for (std::size_t i = 0; i < w; ++i) tmp_[i] = y[i] + h * k3_[i];
            rates(tmp_, k4_);
            const double h6 = h / 6.0;
            for (std::size_t i = 0; i < w; ++i)
                y[i] += h6 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
        clamp_and_renormalize();
    }

private:
    void resize_buffers() {
        const std::size_t w = p_.size();
        k1_.resize(w);
        k2_.resize(w);
        k3_.resize(w);
        k4_.resize(w);
        tmp_.resize(w);
    }

    void rates(const std::vector<double>& in, std::vector<double>& out) {
        switch (phase_) {
            case Phase::PhaseI: q1_rates(in, out); break;
            case Phase::PhaseII: q2_rates(in, out, -static_cast<std::ptrdiff_t>(p_.n_min())); break;
            case Phase::Vanilla: qv_rates(in, out, -static_cast<std::ptrdiff_t>(p_.n_min())); break;
        }
    }

    void maybe_extend(double t_now) {
        const bool left = phase_ != Phase::Vanilla && p_.raw().front() > cfg_.tail_threshold;
        const bool right = p_.raw().back() > cfg_.tail_threshold;
        if (!left && !right) return;
        const auto ext = std::max<std::size_t>(8, p_.size() / 4);
        const std::size_t add = (left ? ext : 0) + (right ? ext : 0);
        if (p_.size() + add > cfg_.max_window)
            throw std::runtime_error("meanfield: tail overflow beyond the hard window cap");
        if (left) p_.grow_left(ext);
        if (right) p_.grow_right(ext);
        resize_buffers();
        history_.push_back({t_now, p_.n_min(), p_.n_max()});
    }

    void clamp_and_renormalize() {
        double total = 0.0;
        for (double& v : p_.raw()) {
            if (v < 0.0) {
                if (v < -1e-12)
                    throw std::runtime_error("meanfield: positivity violated beyond round-off; reduce dt");
                v = 0.0;
                ++clamped_;
            }
            total += v;
        }
        const double inv = 1.0 / total;
        for (double& v : p_.raw()) v *= inv;
    }

    WealthVector p_;
    Phase phase_;
    double lambda_;
    IntegratorConfig cfg_;
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
    std::uint64_t clamped_ = 0;
    std::vector<WindowChange> history_;
};

}  // namespace

WealthVector q1_apply(const WealthPMF& p) {
    WealthVector in = padded_copy(p, true);
    WealthVector out = WealthVector::zeros(in.n_min(), in.n_max());
    q1_rates(in.values(), out.raw());
    return out;
}

WealthVector q2_apply(const WealthPMF& p) {
    WealthVector in = padded_copy(p, true);
    WealthVector out = WealthVector::zeros(in.n_min(), in.n_max());
    q2_rates(in.values(), out.raw(), -static_cast<std::ptrdiff_t>(in.n_min()));
    return out;
}

WealthVector q_vanilla_apply(const WealthPMF& q) {
    if (q.n_min() < 0) {
        for (std::size_t i = 0; i < q.size() && q.wealth_of(i) < 0; ++i)
            if (q.slot(i) > 0.0)
                throw std::invalid_argument("q_vanilla_apply: negative support present");
    }
    WealthVector in = padded_copy(q, q.n_min() >= 1);
    WealthVector out = WealthVector::zeros(in.n_min(), in.n_max());
    qv_rates(in.values(), out.raw(), -static_cast<std::ptrdiff_t>(in.n_min()));
    return out;
}

MeanFieldState step(const MeanFieldState& state, const ModelParams& params, const IntegratorConfig& cfg) {
    params.validate_meanfield();
    cfg.validate();
    Stepper st(state.pmf.as_vector(), state.phase, params.lambda, cfg);
    st.do_step(state.time);
    MeanFieldState out;
    out.pmf = tight_pmf(st.state());
    out.time = state.time + cfg.dt;
    out.phase = state.phase;
    out.accumulated_debt = debt(out.pmf);
    out.t_star = state.t_star;
    return out;
}

double detect_t_star(const std::vector<std::pair<double, double>>& time_debt, double threshold) {
    if (time_debt.empty()) throw std::invalid_argument("detect_t_star: empty series");
    if (time_debt.front().second >= threshold) return time_debt.front().first;
    const auto it = std::lower_bound(
        time_debt.begin(), time_debt.end(), threshold,
        [](const std::pair<double, double>& s, double th) { return s.second < th; });
    if (it == time_debt.end())
        throw std::runtime_error("detect_t_star: horizon exceeded before the debt threshold");
    const auto prev = it - 1;
    const double rise = it->second - prev->second;
    if (rise <= 0.0) return it->first;
    return prev->first + (threshold - prev->second) * (it->first - prev->first) / rise;
}

MeanFieldResult integrate_two_phase(const WealthPMF& p0, const ModelParams& params, const IntegratorConfig& cfg) {
    params.validate_meanfield();
    cfg.validate();
    const bool vanilla = params.nu == 0.0;
    if (vanilla && p0.n_min() < 0 && indebted_fraction(p0) > 0.0)
        throw std::invalid_argument("integrate_two_phase: bankless run needs non-negative support");
    const double threshold = params.mu * params.nu;
    const EquilibriumSpec eq = equilibrium_spec(params.mu, params.nu);

    Phase phase = Phase::PhaseI;
    std::optional<double> t_star;
    if (vanilla) {
        phase = Phase::Vanilla;
    } else if (debt(p0) >= threshold * (1.0 - 1e-9)) {  // round-off slack for states on the debt shell
        phase = Phase::PhaseII;
        t_star = 0.0;
    }

    // diffusive window sizing: variance grows like 2 lambda t in phase I
    const int center = static_cast<int>(std::llround(params.mu));
    const int half = static_cast<int>(std::ceil(6.0 * std::sqrt(std::max(cfg.t_end * params.lambda, 1.0))));
    int lo = std::min(p0.n_min(), center - half);
    int hi = std::max(p0.n_max(), center + half);
    if (vanilla) lo = std::min(0, p0.n_min());
    if (static_cast<std::size_t>(hi - lo + 1) > cfg.max_window) {
        if (p0.size() > cfg.max_window)
            throw std::runtime_error("meanfield: initial distribution wider than the window cap");
        const std::size_t budget = cfg.max_window - p0.size();
        lo = std::max(lo, p0.n_min() - static_cast<int>(budget / 2));
        hi = std::min(hi, p0.n_max() + static_cast<int>(budget - budget / 2));
    }
    WealthVector state = WealthVector::zeros(lo, hi);
    for (std::size_t i = 0; i < p0.size(); ++i)
        state.slot(static_cast<std::size_t>(p0.wealth_of(i) - lo)) = p0.slot(i);

    Stepper st(std::move(state), phase, params.lambda, cfg);

    MeanFieldResult res;
    const auto record = [&](double t) {
        const WealthPMF pmf = tight_pmf(st.state());
        MfSample row;
        row.t = t;
        row.phase = phase;
        row.mass = mass(st.state());
        row.mean = mean(st.state());
        row.debt = debt(st.state());
        row.dkl_to_eq = kl_to_equilibrium(pmf, eq);
        row.gini = gini(pmf);
        res.trajectory.push_back(row);
    };

    const auto n_steps = static_cast<std::uint64_t>(std::llround(cfg.t_end / cfg.dt));
    double next_record = 0.0;
    std::size_t snap_idx = 0;
    std::pair<double, double> prev_debt_sample{0.0, debt(p0)};

    for (std::uint64_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        const bool last = (k == n_steps);
        if (t >= next_record - 1e-9 || last) {
            if (res.trajectory.empty() || res.trajectory.back().t < t) record(t);
            while (next_record <= t + 1e-9) next_record += cfg.record_stride;
        }
        while (snap_idx < cfg.snapshot_times.size() && t >= cfg.snapshot_times[snap_idx] - 1e-9) {
            res.snapshots.emplace_back(t, tight_pmf(st.state()));
            ++snap_idx;
        }
        if (last) break;

        st.do_step(t);

        if (phase == Phase::PhaseI) {
            const double t_next = static_cast<double>(k + 1) * cfg.dt;
            const double d_now = st.debt_value();
            if (d_now >= threshold) {
                t_star = detect_t_star({prev_debt_sample, {t_next, d_now}}, threshold);
                phase = Phase::PhaseII;
                st.set_phase(Phase::PhaseII);
            } else {
                prev_debt_sample = {t_next, d_now};
            }
        }
    }

    res.final_state.pmf = tight_pmf(st.state());
    res.final_state.time = static_cast<double>(n_steps) * cfg.dt;
    res.final_state.phase = phase;
    res.final_state.accumulated_debt = debt(res.final_state.pmf);
    res.final_state.t_star = t_star;
    res.t_star = t_star;
    res.window_history = st.take_history();
    res.clamped_entries = st.clamped();
    return res;
}

}  // namespace exkin
