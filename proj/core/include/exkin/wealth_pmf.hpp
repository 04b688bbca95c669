#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace exkin {

/// Dense vector indexed by integer wealth values: slot i holds the value at
/// wealth n = offset + i. Carries no probabilistic invariants; operator
/// outputs (rate vectors) and intermediate integrator states live here.
class WealthVector {
public:
    WealthVector() = default;
    WealthVector(int offset, std::vector<double> values)
        : offset_(offset), v_(std::move(values)) {}

    static WealthVector zeros(int n_min, int n_max);

    int n_min() const { return offset_; }
    int n_max() const { return offset_ + static_cast<int>(v_.size()) - 1; }
    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    // value at wealth n; 0 outside the window
    double at(int n) const {
        const long i = static_cast<long>(n) - offset_;
        return (i >= 0 && i < static_cast<long>(v_.size())) ? v_[static_cast<std::size_t>(i)] : 0.0;
    }
    double& slot(std::size_t i) { return v_[i]; }
    double slot(std::size_t i) const { return v_[i]; }
    int wealth_of(std::size_t i) const { return offset_ + static_cast<int>(i); }

    std::span<const double> values() const { return v_; }
    std::vector<double>& raw() { return v_; }
    const std::vector<double>& raw() const { return v_; }

    void grow_left(std::size_t slots);
    void grow_right(std::size_t slots);

private:
    int offset_ = 0;
    std::vector<double> v_;
};

/// Probability mass function over integer wealth. Entries are non-negative
/// and sum to 1 within 1e-12; construction rejects anything else.
/// Immutable after construction.
class WealthPMF {
public:
    static constexpr double kMassTolerance = 1e-12;

    // point mass at 0
    WealthPMF() : p_{1.0} {}

    // strict: entries must be >= 0 and sum to 1 within kMassTolerance
    WealthPMF(int offset, std::vector<double> probs);

    // rescales non-negative weights to total mass 1 (weights need not sum to 1)
    static WealthPMF normalized(int offset, std::vector<double> weights);
    static WealthPMF delta(int n);
    // sparse literal, e.g. from_points({{-1, 0.25}, {0, 0.5}, {1, 0.25}})
    static WealthPMF from_points(std::initializer_list<std::pair<int, double>> points);

    int n_min() const { return offset_; }
    int n_max() const { return offset_ + static_cast<int>(p_.size()) - 1; }
    std::size_t size() const { return p_.size(); }

    double at(int n) const {
        const long i = static_cast<long>(n) - offset_;
        return (i >= 0 && i < static_cast<long>(p_.size())) ? p_[static_cast<std::size_t>(i)] : 0.0;
    }
    double slot(std::size_t i) const { return p_[i]; }
    int wealth_of(std::size_t i) const { return offset_ + static_cast<int>(i); }
    std::span<const double> values() const { return p_; }

    // true when both boundary slots are below tail_eps, i.e. the window does
    // not visibly truncate the distribution
    bool window_sufficient(double tail_eps = 1e-14) const;

    WealthVector as_vector() const { return WealthVector(offset_, p_); }

private:
    struct unchecked_t {};
    WealthPMF(unchecked_t, int offset, std::vector<double> probs) : offset_(offset), p_(std::move(probs)) {}
    int offset_ = 0;
    std::vector<double> p_;
};

// -- scalar functionals -------------------------------------------------

double mass(const WealthVector& v);
double mass(const WealthPMF& p);

double mean(const WealthVector& v);
double mean(const WealthPMF& p);

// average amount of debt per agent, -sum_{n<=-1} n p_n >= 0
double debt(const WealthVector& v);
double debt(const WealthPMF& p);

// fraction with n >= 1 ("rich") and n <= -1 ("indebted")
double rich_fraction(const WealthPMF& p);
double indebted_fraction(const WealthPMF& p);

// sum p_n log(p_n / q_n), 0 log 0 = 0; throws std::domain_error when
// p_n > 0 meets q_n = 0
double kl_divergence(const WealthPMF& p, const WealthPMF& q);

// Gini index (1/2mu) sum_{i,j} |i-j| p_i p_j, computed in O(W) from the CDF;
// requires mean > 0 (throws std::domain_error otherwise); may exceed 1 when
// negative wealth carries mass
double gini(const WealthPMF& p);

// (sum |p_n - q_n|^e)^(1/e) over the union window, e >= 1
double lp_distance(const WealthPMF& p, const WealthPMF& q, double exponent);

// total variation distance, 0.5 * l1
double tv_distance(const WealthPMF& p, const WealthPMF& q);

// -- CSV schema: header "n,p", one row per wealth value, ascending n ----

void write_pmf_csv(std::ostream& os, const WealthPMF& p);
WealthPMF read_pmf_csv(std::istream& is);

}  // namespace exkin
