#include "exkin/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "exkin/abm.hpp"
#include "exkin/equilibrium.hpp"
#include "exkin/gini_analysis.hpp"
#include "exkin/io.hpp"
#include "exkin/meanfield.hpp"
#include "exkin/rng.hpp"

namespace exkin {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Abm: return "abm";
        case Mode::MeanField: return "meanfield";
        case Mode::Equilibrium: return "equilibrium";
        case Mode::Linearize: return "linearize";
        case Mode::GiniSweep: return "gini-sweep";
        case Mode::Compare: return "compare";
    }
    return "?";
}

Mode mode_from_string(const std::string& s) {
    if (s == "abm") return Mode::Abm;
    if (s == "meanfield") return Mode::MeanField;
    if (s == "equilibrium") return Mode::Equilibrium;
    if (s == "linearize") return Mode::Linearize;
    if (s == "gini-sweep") return Mode::GiniSweep;
    if (s == "compare") return Mode::Compare;
    throw ConfigError("mode: unknown value '" + s +
                      "' (expected abm|meanfield|equilibrium|linearize|gini-sweep|compare)");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not an integer: '" + v + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    if (!v.empty() && v[0] == '-') throw ConfigError(key + ": must be >= 0");
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing junk");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a non-negative integer: '" + v + "'");
    }
}

void apply_kv(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "mode") cfg.mode = mode_from_string(value);
    else if (key == "mu") cfg.mu = parse_real(key, value);
    else if (key == "nu") cfg.nu = parse_real(key, value);
    else if (key == "n-agents") cfg.n_agents = parse_int(key, value);
    else if (key == "lambda") cfg.lambda = parse_real(key, value);
    else if (key == "events") cfg.events = parse_uint(key, value);
    else if (key == "seed") cfg.seed = parse_uint(key, value);
    else if (key == "replicas") cfg.replicas = static_cast<int>(parse_int(key, value));
    else if (key == "dt") cfg.dt = parse_real(key, value);
    else if (key == "scheme") cfg.scheme = value;
    else if (key == "t-end") cfg.t_end = parse_real(key, value);
    else if (key == "tail-threshold") cfg.tail_threshold = parse_real(key, value);
    else if (key == "out") cfg.out = value;
    else if (key == "preset") cfg.preset = value;
    else throw ConfigError("unknown key: '" + key + "'");
}

void validate_config(const ExperimentConfig& cfg) {
    if (!(cfg.mu > 0.0)) throw ConfigError("mu: must be > 0");
    if (!(cfg.nu >= 0.0)) throw ConfigError("nu: must be >= 0 (the bank cannot have negative resources)");
    if (!(cfg.lambda > 0.0)) throw ConfigError("lambda: must be > 0");
    if (cfg.replicas < 1) throw ConfigError("replicas: must be >= 1");
    if (!(cfg.dt > 0.0)) throw ConfigError("dt: must be > 0");
    if (!(cfg.t_end >= 0.0)) throw ConfigError("t-end: must be >= 0");
    if (!(cfg.tail_threshold > 0.0 && cfg.tail_threshold <= 1e-8))
        throw ConfigError("tail-threshold: must lie in (0, 1e-8]");
    try {
        scheme_from_string(cfg.scheme);
    } catch (const std::exception&) {
        throw ConfigError("scheme: expected rk4 or euler, got '" + cfg.scheme + "'");
    }
    if (cfg.mode == Mode::Abm || cfg.mode == Mode::Compare) {
        if (cfg.n_agents < 2) throw ConfigError("n-agents: must be >= 2");
        try {
            cfg.params().validate_abm();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("invalid agent-model parameters: ") + e.what());
        }
    }
}

}  // namespace

std::map<std::string, std::string> read_config_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig cfg;
    if (name == "fig2") {
        cfg.mode = Mode::Abm;
        cfg.n_agents = 10000;
        cfg.mu = 10.0;
        cfg.nu = 0.4;
        cfg.lambda = 1.0;
        cfg.events = 10000000;
    } else if (name == "fig5") {
        cfg.mode = Mode::MeanField;
        cfg.mu = 10.0;
        cfg.nu = 0.4;
        cfg.lambda = 1.0;
        cfg.t_end = 5000.0;
        cfg.dt = 0.01;
        cfg.scheme = "rk4";
    } else if (name == "fig6") {
        cfg.mode = Mode::GiniSweep;
        cfg.mu = 10.0;
        cfg.nu = 1.0;
        cfg.lambda = 1.0;
        cfg.t_end = 5000.0;
        cfg.dt = 0.01;
    } else {
        throw ConfigError("preset: unknown value '" + name + "' (expected fig2|fig5|fig6)");
    }
    cfg.preset = name;
    return cfg;
}

ExperimentConfig build_config(const std::optional<std::string>& config_file_text,
                              const std::map<std::string, std::string>& flag_overrides) {
    std::map<std::string, std::string> file_kv;
    if (config_file_text) file_kv = read_config_kv(*config_file_text);

    // the preset may be named in either source; flags win
    std::string preset;
    if (const auto it = file_kv.find("preset"); it != file_kv.end()) preset = it->second;
    if (const auto it = flag_overrides.find("preset"); it != flag_overrides.end()) preset = it->second;

    ExperimentConfig cfg = preset.empty() ? ExperimentConfig{} : preset_config(preset);
    for (const auto& [k, v] : file_kv) apply_kv(cfg, k, v);
    for (const auto& [k, v] : flag_overrides) apply_kv(cfg, k, v);
    validate_config(cfg);
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "mode = " << to_string(cfg.mode) << '\n';
    os << "mu = " << format_double(cfg.mu) << '\n';
    os << "nu = " << format_double(cfg.nu) << '\n';
    os << "n-agents = " << cfg.n_agents << '\n';
    os << "lambda = " << format_double(cfg.lambda) << '\n';
    os << "events = " << cfg.events << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "replicas = " << cfg.replicas << '\n';
    os << "dt = " << format_double(cfg.dt) << '\n';
    os << "scheme = " << cfg.scheme << '\n';
    os << "t-end = " << format_double(cfg.t_end) << '\n';
    os << "tail-threshold = " << format_double(cfg.tail_threshold) << '\n';
    os << "out = " << cfg.out << '\n';
    if (!cfg.preset.empty()) os << "preset = " << cfg.preset << '\n';
    return os.str();
}

namespace {

json config_echo(const ExperimentConfig& cfg) {
    return json{
        {"mode", to_string(cfg.mode)},
        {"mu", cfg.mu},
        {"nu", cfg.nu},
        {"n_agents", cfg.n_agents},
        {"lambda", cfg.lambda},
        {"events", cfg.events},
        {"seed", cfg.seed},
        {"replicas", cfg.replicas},
        {"dt", cfg.dt},
        {"scheme", cfg.scheme},
        {"t_end", cfg.t_end},
        {"tail_threshold", cfg.tail_threshold},
        {"out", cfg.out},
        {"preset", cfg.preset},
    };
}

IntegratorConfig integrator_config(const ExperimentConfig& cfg) {
    IntegratorConfig ic;
    ic.dt = cfg.dt;
    ic.scheme = scheme_from_string(cfg.scheme);
    ic.tail_threshold = cfg.tail_threshold;
    ic.t_end = cfg.t_end;
    ic.record_stride = std::max(cfg.dt, cfg.t_end / 5000.0);
    return ic;
}

WealthPMF point_mass_at_mu(double mu) {
    if (std::abs(mu - std::round(mu)) > 1e-9)
        throw ConfigError("mu: the default point-mass start needs an integer mu");
    return WealthPMF::delta(static_cast<int>(std::llround(mu)));
}

json meanfield_final_json(const MeanFieldResult& res) {
    const MfSample& last = res.trajectory.back();
    return json{
        {"t", last.t},         {"phase", to_string(last.phase)}, {"mass", last.mass},
        {"mean", last.mean},   {"debt", last.debt},              {"dkl_to_eq", last.dkl_to_eq},
        {"gini", last.gini},   {"window_n_min", res.final_state.pmf.n_min()},
        {"window_n_max", res.final_state.pmf.n_max()},
    };
}

struct OutputWriter {
    fs::path dir;
    std::vector<std::string> names;

    void csv(const std::string& name, const std::function<void(std::ostream&)>& fn) {
        std::ostringstream os;
        fn(os);
        write_text_file(dir / name, os.str());
        names.push_back(name);
    }
    void jsonfile(const std::string& name, const json& j) {
        write_text_file(dir / name, j.dump(2) + "\n");
        names.push_back(name);
    }
};

std::string snapshot_name_for_time(double t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "pmf_t%g.csv", t);
    return buf;
}

void run_abm_mode(const ExperimentConfig& cfg, OutputWriter& out, json& manifest) {
    RunConfig rc;
    rc.params = cfg.params();
    rc.max_events = cfg.events;
    rc.seed = cfg.seed;
    rc.snapshot_schedule = {cfg.events};
    rc.time_mode = TimeMode::EventCount;

    json summary{
        {"params", {{"n_agents", cfg.n_agents}, {"mu", cfg.mu}, {"nu", cfg.nu}, {"lambda", cfg.lambda}}},
        {"seed", cfg.seed},
        {"generator", Xoshiro256pp::kName},
        {"max_events", cfg.events},
        {"time_mode", to_string(rc.time_mode)},
        {"replicas", cfg.replicas},
    };

    if (cfg.replicas == 1) {
        const RunResult res = run(rc);
        out.csv("trajectory.csv", [&](std::ostream& os) { write_abm_trajectory_csv(os, res.trajectory); });
        for (const auto& [event, pmf] : res.snapshots)
            out.csv("pmf_" + std::to_string(event) + ".csv", [&](std::ostream& os) { write_pmf_csv(os, pmf); });
        const AbmSample& last = res.trajectory.back();
        summary["wall_clock_seconds"] = res.wall_seconds;
        summary["final"] = json{{"event", last.event},
                                {"time", last.time},
                                {"bank_cash", last.bank_cash},
                                {"bank_debt", last.bank_debt},
                                {"total_agent_debt", last.total_agent_debt},
                                {"gini", last.gini}};
        if (res.first_bank_empty_event) summary["first_bank_empty_event"] = *res.first_bank_empty_event;
    } else {
        const EnsembleResult res = run_ensemble(rc, cfg.replicas);
        out.csv("trajectory.csv", [&](std::ostream& os) { write_ensemble_trajectory_csv(os, res.trajectory); });
        if (!res.snapshots.empty())
            out.csv("pmf_final_mean.csv",
                    [&](std::ostream& os) { write_pmf_csv(os, res.snapshots.back().second); });
        const EnsembleSample& last = res.trajectory.back();
        summary["wall_clock_seconds"] = res.wall_seconds;
        summary["seeds"] = res.seeds;
        summary["final"] = json{{"event", last.event},
                                {"time", last.time},
                                {"bank_cash", last.bank_cash},
                                {"bank_debt", last.bank_debt},
                                {"total_agent_debt", last.total_agent_debt},
                                {"gini", last.gini}};
        json empties = json::array();
        for (const auto& e : res.first_bank_empty_events)
            empties.push_back(e ? json(*e) : json(nullptr));
        summary["first_bank_empty_events"] = empties;
    }
    out.jsonfile("run_summary.json", summary);
    manifest["seed"] = cfg.seed;
    manifest["generator"] = Xoshiro256pp::kName;
}

void run_meanfield_mode(const ExperimentConfig& cfg, OutputWriter& out) {
    IntegratorConfig ic = integrator_config(cfg);
    ic.snapshot_times = {cfg.t_end};
    const WealthPMF p0 = point_mass_at_mu(cfg.mu);
    const MeanFieldResult res = integrate_two_phase(p0, cfg.params(), ic);

    out.csv("meanfield_trajectory.csv",
            [&](std::ostream& os) { write_meanfield_trajectory_csv(os, res.trajectory); });
    for (const auto& [t, pmf] : res.snapshots)
        out.csv(snapshot_name_for_time(t), [&](std::ostream& os) { write_pmf_csv(os, pmf); });

    json report{
        {"t_star", res.t_star ? json(*res.t_star) : json(nullptr)},
        {"scheme", to_string(ic.scheme)},
        {"dt", ic.dt},
        {"tail_threshold", ic.tail_threshold},
        {"record_stride", ic.record_stride},
        {"clamped_entries", res.clamped_entries},
        {"final", meanfield_final_json(res)},
    };
    json hist = json::array();
    for (const auto& w : res.window_history)
        hist.push_back(json{{"t", w.t}, {"n_min", w.n_min}, {"n_max", w.n_max}});
    report["window_history"] = hist;

    // decay of the relative entropy over the recorded phase-II samples
    std::vector<std::pair<double, double>> series;
    for (const auto& row : res.trajectory)
        if (row.phase == Phase::PhaseII && row.dkl_to_eq > 0.0) series.emplace_back(row.t, row.dkl_to_eq);
    if (series.size() >= 8)
        report["decay_fit"] = to_json(fit_sqrt_exponential_decay(series));
    else
        report["decay_fit"] = nullptr;
    out.jsonfile("meanfield_report.json", report);
}

void run_equilibrium_mode(const ExperimentConfig& cfg, OutputWriter& out) {
    const auto [eq, pmf] = equilibrium_pmf(cfg.mu, cfg.nu);
    out.jsonfile("equilibrium.json", to_json(eq));
    out.csv("pmf_equilibrium.csv", [&](std::ostream& os) { write_pmf_csv(os, pmf); });
}

void run_linearize_mode(const ExperimentConfig& cfg, OutputWriter& out) {
    if (!(cfg.nu > 0.0)) throw ConfigError("nu: linearize mode needs nu > 0");
    out.jsonfile("linearization.json", to_json(linearization_report(cfg.mu, cfg.nu)));
}

void run_gini_sweep_mode(const ExperimentConfig& cfg, OutputWriter& out) {
    const GiniComparison cmp = compare_gini_vs_vanilla(cfg.mu, cfg.nu, integrator_config(cfg));
    out.csv("gini_compare.csv", [&](std::ostream& os) { write_gini_comparison_csv(os, cmp); });
    out.jsonfile("gini_report.json", json{
                                         {"mu", cfg.mu},
                                         {"nu", cfg.nu},
                                         {"t_end", cfg.t_end},
                                         {"max_gini_banked", cmp.max_banked},
                                         {"max_gini_vanilla", cmp.max_bankless},
                                         {"banked_exceeds_one", cmp.banked_exceeds_one},
                                         {"banked_dominates", cmp.banked_dominates},
                                     });
}

void run_compare_mode(const ExperimentConfig& cfg, OutputWriter& out, json& manifest) {
    const CompareReport rep = compare_abm_meanfield(cfg);
    out.csv("tv_compare.csv", [&](std::ostream& os) {
        os << "t,event,tv_distance\n";
        for (const auto& s : rep.snapshots)
            os << format_double(s.t) << ',' << s.event << ',' << format_double(s.tv) << '\n';
    });
    json snaps = json::array();
    for (const auto& s : rep.snapshots) snaps.push_back(json{{"t", s.t}, {"event", s.event}, {"tv", s.tv}});
    out.jsonfile("compare_report.json", json{
                                            {"params",
                                             {{"n_agents", cfg.n_agents},
                                              {"mu", cfg.mu},
                                              {"nu", cfg.nu},
                                              {"lambda", cfg.lambda}}},
                                            {"replicas", rep.replicas},
                                            {"seed", rep.seed},
                                            {"generator", Xoshiro256pp::kName},
                                            {"snapshots", snaps},
                                            {"max_tv", rep.max_tv},
                                            {"finite_size_warning", rep.finite_size_warning},
                                        });
    manifest["seed"] = cfg.seed;
    manifest["generator"] = Xoshiro256pp::kName;
}

}  // namespace

CompareReport compare_abm_meanfield(const ExperimentConfig& cfg) {
    cfg.params().validate_abm();
    if (!(cfg.t_end > 0.0)) throw ConfigError("t-end: compare mode needs t-end > 0");

    // snapshots at 5 evenly spaced times; ABM events aligned via t = events/(lambda N)
    std::vector<double> times;
    for (int i = 1; i <= 5; ++i) times.push_back(cfg.t_end * i / 5.0);

    const double rate = cfg.lambda * static_cast<double>(cfg.n_agents);
    RunConfig rc;
    rc.params = cfg.params();
    rc.seed = cfg.seed;
    rc.time_mode = TimeMode::EventCount;
    for (const double t : times) rc.snapshot_schedule.push_back(static_cast<std::uint64_t>(std::llround(t * rate)));
    rc.max_events = rc.snapshot_schedule.back();
    rc.record_stride = std::max<std::uint64_t>(1, rc.max_events / 200);
    const EnsembleResult abm = run_ensemble(rc, cfg.replicas);

    IntegratorConfig ic = integrator_config(cfg);
    ic.snapshot_times = times;
    const MeanFieldResult mf = integrate_two_phase(point_mass_at_mu(cfg.mu), cfg.params(), ic);
    if (abm.snapshots.size() != times.size() || mf.snapshots.size() != times.size())
        throw std::runtime_error("compare_abm_meanfield: snapshot misalignment");

    CompareReport rep;
    rep.replicas = cfg.replicas;
    rep.seed = cfg.seed;
    rep.finite_size_warning = cfg.n_agents < 100;
    for (std::size_t i = 0; i < times.size(); ++i) {
        CompareSnapshot s;
        s.t = times[i];
        s.event = abm.snapshots[i].first;
        s.tv = tv_distance(abm.snapshots[i].second, mf.snapshots[i].second);
        rep.max_tv = std::max(rep.max_tv, s.tv);
        rep.snapshots.push_back(s);
    }
    return rep;
}

int run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    OutputWriter out;
    out.dir = fs::path(cfg.out);
    std::error_code ec;
    fs::create_directories(out.dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + cfg.out + ": " + ec.message());

    json manifest{
        {"version", kVersion},
        {"mode", to_string(cfg.mode)},
        {"config", config_echo(cfg)},
    };

    switch (cfg.mode) {
        case Mode::Abm: run_abm_mode(cfg, out, manifest); break;
        case Mode::MeanField: run_meanfield_mode(cfg, out); break;
        case Mode::Equilibrium: run_equilibrium_mode(cfg, out); break;
        case Mode::Linearize: run_linearize_mode(cfg, out); break;
        case Mode::GiniSweep: run_gini_sweep_mode(cfg, out); break;
        case Mode::Compare: run_compare_mode(cfg, out, manifest); break;
    }

    manifest["outputs"] = out.names;
    manifest["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text_file(out.dir / "manifest.json", manifest.dump(2) + "\n");
    return 0;
}

}  // namespace exkin
