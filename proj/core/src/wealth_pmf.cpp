#include "exkin/wealth_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace exkin {

WealthVector WealthVector::zeros(int n_min, int n_max) {
    if (n_max < n_min) throw std::invalid_argument("WealthVector: n_max < n_min");
    return WealthVector(n_min, std::vector<double>(static_cast<std::size_t>(n_max - n_min + 1), 0.0));
}

void WealthVector::grow_left(std::size_t slots) {
    v_.insert(v_.begin(), slots, 0.0);
    offset_ -= static_cast<int>(slots);
}

void WealthVector::grow_right(std::size_t slots) {
    v_.insert(v_.end(), slots, 0.0);
}

WealthPMF::WealthPMF(int offset, std::vector<double> probs) : offset_(offset), p_(std::move(probs)) {
    if (p_.empty()) throw std::invalid_argument("WealthPMF: empty window");
    double total = 0.0;
    for (double x : p_) {
        if (!(x >= 0.0)) throw std::invalid_argument("WealthPMF: negative or NaN entry");
        total += x;
    }
    if (std::abs(total - 1.0) > kMassTolerance)
        throw std::invalid_argument("WealthPMF: mass " + std::to_string(total) + " is not 1 within 1e-12");
}

WealthPMF WealthPMF::normalized(int offset, std::vector<double> weights) {
    if (weights.empty()) throw std::invalid_argument("WealthPMF: empty window");
    double total = 0.0;
    for (double x : weights) {
        if (!(x >= 0.0)) throw std::invalid_argument("WealthPMF: negative or NaN weight");
        total += x;
    }
    if (!(total > 0.0)) throw std::invalid_argument("WealthPMF: weights sum to zero");
    for (double& x : weights) x /= total;
    return WealthPMF(unchecked_t{}, offset, std::move(weights));
}

WealthPMF WealthPMF::delta(int n) { return WealthPMF(n, {1.0}); }

WealthPMF WealthPMF::from_points(std::initializer_list<std::pair<int, double>> points) {
    if (points.size() == 0) throw std::invalid_argument("WealthPMF: no points");
    std::map<int, double> m;
    for (const auto& [n, w] : points) m[n] += w;
    const int lo = m.begin()->first;
    const int hi = m.rbegin()->first;
    std::vector<double> v(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (const auto& [n, w] : m) v[static_cast<std::size_t>(n - lo)] = w;
    return WealthPMF(lo, std::move(v));
}

bool WealthPMF::window_sufficient(double tail_eps) const {
    return p_.front() < tail_eps && p_.back() < tail_eps;
}

namespace {

double sum_values(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double weighted_mean(int offset, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += static_cast<double>(offset + static_cast<int>(i)) * v[i];
    return s;
}

double negative_part(int offset, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const int n = offset + static_cast<int>(i);
        if (n <= -1) s -= static_cast<double>(n) * v[i];
    }
    return s;
}

}  // namespace

double mass(const WealthVector& v) { return sum_values(v.values()); }
double mass(const WealthPMF& p) { return sum_values(p.values()); }

double mean(const WealthVector& v) { return weighted_mean(v.n_min(), v.values()); }
double mean(const WealthPMF& p) { return weighted_mean(p.n_min(), p.values()); }

double debt(const WealthVector& v) { return negative_part(v.n_min(), v.values()); }
double debt(const WealthPMF& p) { return negative_part(p.n_min(), p.values()); }

double rich_fraction(const WealthPMF& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p.wealth_of(i) >= 1) s += p.slot(i);
    return s;
}

double indebted_fraction(const WealthPMF& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p.wealth_of(i) <= -1) s += p.slot(i);
    return s;
}

double kl_divergence(const WealthPMF& p, const WealthPMF& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pn = p.slot(i);
        if (pn == 0.0) continue;
        const double qn = q.at(p.wealth_of(i));
        if (qn == 0.0)
            throw std::domain_error("kl_divergence: p has mass where q vanishes (n = " +
                                    std::to_string(p.wealth_of(i)) + ")");
        s += pn * std::log(pn / qn);
    }
    return s;
}

double gini(const WealthPMF& p) {
    const double mu = mean(p);
    if (!(mu > 0.0)) throw std::domain_error("gini: mean must be positive");
    // E|X - X'| = 2 sum_k F(k) (1 - F(k))
    double cdf = 0.0, acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        cdf += p.slot(i);
        acc += cdf * (1.0 - cdf);
    }
    return acc / mu;
}

double lp_distance(const WealthPMF& p, const WealthPMF& q, double exponent) {
    if (!(exponent >= 1.0)) throw std::invalid_argument("lp_distance: exponent must be >= 1");
    const int lo = std::min(p.n_min(), q.n_min());
    const int hi = std::max(p.n_max(), q.n_max());
    double s = 0.0;
    for (int n = lo; n <= hi; ++n) s += std::pow(std::abs(p.at(n) - q.at(n)), exponent);
    return std::pow(s, 1.0 / exponent);
}

double tv_distance(const WealthPMF& p, const WealthPMF& q) {
    const int lo = std::min(p.n_min(), q.n_min());
    const int hi = std::max(p.n_max(), q.n_max());
    double s = 0.0;
    for (int n = lo; n <= hi; ++n) s += std::abs(p.at(n) - q.at(n));
    return 0.5 * s;
}

void write_pmf_csv(std::ostream& os, const WealthPMF& p) {
    os << "n,p\n";
    char buf[40];
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", p.slot(i));
        os << p.wealth_of(i) << ',' << buf << '\n';
    }
}

WealthPMF read_pmf_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "n,p")
        throw std::runtime_error("pmf csv: missing 'n,p' header");
    std::vector<double> probs;
    bool first = true;
    int offset = 0, prev = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("pmf csv: malformed row: " + line);
        const int n = std::stoi(line.substr(0, comma));
        const double v = std::stod(line.substr(comma + 1));
        if (first) {
            offset = n;
            first = false;
        } else if (n != prev + 1) {
            throw std::runtime_error("pmf csv: rows must ascend in n by 1");
        }
        prev = n;
        probs.push_back(v);
    }
    return WealthPMF(offset, std::move(probs));
}

}  // namespace exkin
