#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "exkin/abm.hpp"
#include "exkin/equilibrium.hpp"
#include "exkin/gini_analysis.hpp"
#include "exkin/meanfield.hpp"

#include "json.hpp"

namespace exkin {

// 17 significant digits, round-trip exact, locale independent
std::string format_double(double v);

// header: event,time,bank_cash,bank_debt,total_agent_debt,gini
void write_abm_trajectory_csv(std::ostream& os, const std::vector<AbmSample>& rows);
void write_ensemble_trajectory_csv(std::ostream& os, const std::vector<EnsembleSample>& rows);

// header: t,phase,mass,mean,debt,dkl_to_eq,gini
void write_meanfield_trajectory_csv(std::ostream& os, const std::vector<MfSample>& rows);

// header: t,gini_banked,gini_vanilla,diff
void write_gini_comparison_csv(std::ostream& os, const GiniComparison& cmp);

nlohmann::json to_json(const EquilibriumSpec& eq);        // includes laplace block when nu > 0
nlohmann::json to_json(const LinearizationReport& rep);
nlohmann::json to_json(const DecayFit& fit);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace exkin
