#include "exkin/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace exkin {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_abm_trajectory_csv(std::ostream& os, const std::vector<AbmSample>& rows) {
    os << "event,time,bank_cash,bank_debt,total_agent_debt,gini\n";
    for (const auto& r : rows)
        os << r.event << ',' << format_double(r.time) << ',' << r.bank_cash << ',' << r.bank_debt << ','
           << r.total_agent_debt << ',' << format_double(r.gini) << '\n';
}

void write_ensemble_trajectory_csv(std::ostream& os, const std::vector<EnsembleSample>& rows) {
    os << "event,time,bank_cash,bank_debt,total_agent_debt,gini\n";
    for (const auto& r : rows)
        os << r.event << ',' << format_double(r.time) << ',' << format_double(r.bank_cash) << ','
           << format_double(r.bank_debt) << ',' << format_double(r.total_agent_debt) << ','
           << format_double(r.gini) << '\n';
}

void write_meanfield_trajectory_csv(std::ostream& os, const std::vector<MfSample>& rows) {
    os << "t,phase,mass,mean,debt,dkl_to_eq,gini\n";
    for (const auto& r : rows)
        os << format_double(r.t) << ',' << to_string(r.phase) << ',' << format_double(r.mass) << ','
           << format_double(r.mean) << ',' << format_double(r.debt) << ',' << format_double(r.dkl_to_eq)
           << ',' << format_double(r.gini) << '\n';
}

void write_gini_comparison_csv(std::ostream& os, const GiniComparison& cmp) {
    os << "t,gini_banked,gini_vanilla,diff\n";
    for (const auto& r : cmp.rows)
        os << format_double(r.t) << ',' << format_double(r.banked) << ',' << format_double(r.bankless)
           << ',' << format_double(r.banked - r.bankless) << '\n';
}

nlohmann::json to_json(const EquilibriumSpec& eq) {
    nlohmann::json j{
        {"mu", eq.mu},
        {"nu", eq.nu},
        {"p0_star", eq.p0_star},
        {"r_star", eq.r_star},
        {"d_star", eq.d_star},
        {"ratio_right", eq.ratio_right},
        {"ratio_left", eq.ratio_left},
    };
    if (eq.nu > 0.0) {
        const LaplaceParams lp = laplace_params(eq.mu, eq.nu);
        j["laplace"] = {{"rho0", lp.rho0}, {"alpha", lp.alpha}, {"beta", lp.beta}};
    }
    return j;
}

nlohmann::json to_json(const LinearizationReport& rep) {
    return nlohmann::json{
        {"mu", rep.mu},       {"nu", rep.nu},   {"C1", rep.c1},
        {"C2", rep.c2},       {"C3", rep.c3},   {"C4", rep.c4},
        {"gamma", rep.gamma}, {"margin", rep.margin}, {"in_G", rep.in_g},
    };
}

nlohmann::json to_json(const DecayFit& fit) {
    return nlohmann::json{
        {"c1", fit.c1},
        {"c2", fit.c2},
        {"rms", fit.rms_log_residual},
        {"n_samples", fit.n_samples},
    };
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace exkin
