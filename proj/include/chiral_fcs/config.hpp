// config.hpp - run configuration, JSON (de)serialization and named presets.
//
// All rates are in units of gamma = gamma_left + gamma_right. Unknown keys are
// rejected so that typos surface as usage errors naming the offending field.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chiral_fcs/chain_model.hpp"
#include "chiral_fcs/spectral.hpp"

namespace chiral_fcs {

using json = nlohmann::json;

/// Invalid configuration; `field()` is the dotted path of the offending entry.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

inline const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> names = {"scgf-sweep", "biased-state", "trajectory", "photocurrent",
                                                   "dark-state-check"};
    return names;
}

inline const std::vector<std::string>& known_presets() {
    static const std::vector<std::string> names = {"fig2", "fig3", "fig4"};
    return names;
}

struct SweepSettings {
    bool warm_start = true;
    bool finite_difference = true;  ///< k_fd column (four extra solves per point)
    bool variance = true;           ///< variance_rate column (four extra solves per point)
    double variance_step = 2e-3;
    std::vector<std::pair<int, int>> pairs;  ///< empty: nearest neighbours
};

struct TrajectorySettings {
    double dt = 0.002;
    double horizon = 600.0;
    std::size_t count = 1;
    double bin_width = 5.0;
    std::string initial = "ground";  ///< "ground" or "steady"
    std::vector<double> select_s;    ///< s values for the s-selected record approximation
    double segment_length = 20.0;
    double keep_fraction = 0.2;
};

struct PhotocurrentSettings {
    double t_end = 200.0;
    std::size_t samples = 401;
};

struct RunConfig {
    std::string experiment;
    std::string preset;  ///< empty unless built from a preset
    ChainParams chain;
    GeneratorForm form = GeneratorForm::general;
    std::string detuning_pattern = "custom";  ///< uniform, alternating or custom
    double detuning_delta = 0.0;              ///< magnitude for the named patterns

    std::vector<double> s_grid;
    std::vector<double> omega_grid;          ///< empty: chain.rabi only
    std::vector<double> gamma_unguided_grid; ///< empty: chain.gamma_unguided only
    std::vector<std::string> pattern_grid;   ///< empty: chain.detunings as given

    SpectralOptions spectral;
    SweepSettings sweep;
    TrajectorySettings trajectory;
    PhotocurrentSettings photocurrent;

    std::string output_dir = "out";
    std::uint64_t seed = 0;
    int workers = 1;

    /// Field path -> "published" or "choice"; filled by presets.
    std::map<std::string, std::string> provenance;
};

namespace config_detail {

inline void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where.empty() ? "<root>" : where, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!ok.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown field");
    }
}

inline std::string path(const std::string& where, const char* key) {
    return where.empty() ? std::string(key) : where + "." + key;
}

inline double number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
    return v;
}

inline double nonneg(const json& j, const std::string& field) {
    const double v = number(j, field);
    if (v < 0.0) throw ConfigError(field, "must be >= 0");
    return v;
}

inline double positive(const json& j, const std::string& field) {
    const double v = number(j, field);
    if (!(v > 0.0)) throw ConfigError(field, "must be > 0");
    return v;
}

inline long long integer(const json& j, const std::string& field, long long lo, long long hi) {
    if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
    const auto v = j.get<long long>();
    if (v < lo || v > hi) {
        throw ConfigError(field, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return v;
}

inline bool boolean(const json& j, const std::string& field) {
    if (!j.is_boolean()) throw ConfigError(field, "expected true or false");
    return j.get<bool>();
}

inline std::string string(const json& j, const std::string& field) {
    if (!j.is_string()) throw ConfigError(field, "expected a string");
    return j.get<std::string>();
}

inline std::vector<double> linspace(double start, double stop, std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        v[i] = count == 1 ? start
                          : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    if (count > 1) v.back() = stop;
    return v;
}

/// A grid is a list of numbers or {"start", "stop", "count"}.
inline std::vector<double> grid(const json& j, const std::string& field) {
    if (j.is_array()) {
        std::vector<double> v;
        for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
        if (v.empty()) throw ConfigError(field, "grid must be non-empty");
        return v;
    }
    reject_unknown(j, field, {"start", "stop", "count"});
    for (const char* k : {"start", "stop", "count"}) {
        if (!j.contains(k)) throw ConfigError(path(field, k), "missing");
    }
    return linspace(number(j["start"], field + ".start"), number(j["stop"], field + ".stop"),
                    static_cast<std::size_t>(integer(j["count"], field + ".count", 1, 100000)));
}

inline std::vector<double> pattern_detunings(const std::string& pattern, int n, double delta,
                                             const std::string& field) {
    if (pattern == "uniform") return uniform_detuning(n, delta);
    if (pattern == "alternating") return alternating_detuning(n, delta);
    throw ConfigError(field, "unknown detuning pattern '" + pattern + "' (known: uniform, alternating)");
}

inline void parse_chain(const json& j, RunConfig& cfg) {
    const std::string w = "chain";
    reject_unknown(j, w,
                   {"n_sites", "gamma", "delta_gamma", "gamma_left", "gamma_right", "gamma_unguided", "rabi",
                    "detunings", "positions", "spacing", "wavenumber", "waveguide_distance"});
    ChainParams& p = cfg.chain;
    if (!j.contains("n_sites")) throw ConfigError("chain.n_sites", "missing");
    p.n_sites = static_cast<int>(integer(j["n_sites"], "chain.n_sites", 1, HilbertSpace::kMaxSites));

    const bool has_split = j.contains("gamma_left") || j.contains("gamma_right");
    if (has_split && (j.contains("delta_gamma") || j.contains("gamma"))) {
        throw ConfigError("chain.delta_gamma", "give either gamma/delta_gamma or gamma_left/gamma_right");
    }
    if (has_split) {
        p.gamma_left = j.contains("gamma_left") ? nonneg(j["gamma_left"], "chain.gamma_left") : 0.5;
        p.gamma_right = j.contains("gamma_right") ? nonneg(j["gamma_right"], "chain.gamma_right") : 0.5;
    } else {
        const double g = j.contains("gamma") ? nonneg(j["gamma"], "chain.gamma") : 1.0;
        const double dg = j.contains("delta_gamma") ? number(j["delta_gamma"], "chain.delta_gamma") : 0.0;
        if (std::abs(dg) > g) throw ConfigError("chain.delta_gamma", "|delta_gamma| must not exceed gamma");
        p.gamma_left = 0.5 * (g - dg);
        p.gamma_right = 0.5 * (g + dg);
    }
    p.gamma_unguided = j.contains("gamma_unguided") ? nonneg(j["gamma_unguided"], "chain.gamma_unguided") : 0.0;
    p.rabi = j.contains("rabi") ? nonneg(j["rabi"], "chain.rabi") : 0.0;
    p.wavenumber = j.contains("wavenumber") ? positive(j["wavenumber"], "chain.wavenumber") : 2.0 * std::numbers::pi;
    p.waveguide_distance =
        j.contains("waveguide_distance") ? nonneg(j["waveguide_distance"], "chain.waveguide_distance") : 0.0;

    if (!j.contains("detunings")) throw ConfigError("chain.detunings", "missing");
    const json& d = j["detunings"];
    if (d.is_array()) {
        if (d.size() != static_cast<std::size_t>(p.n_sites)) {
            throw ConfigError("chain.detunings", "expected " + std::to_string(p.n_sites) + " entries");
        }
        p.detunings.clear();
        for (std::size_t i = 0; i < d.size(); ++i) {
            p.detunings.push_back(number(d[i], "chain.detunings[" + std::to_string(i) + "]"));
        }
        cfg.detuning_pattern = "custom";
        cfg.detuning_delta = p.detunings.empty() ? 0.0 : std::abs(p.detunings.front());
    } else {
        reject_unknown(d, "chain.detunings", {"pattern", "delta"});
        if (!d.contains("pattern")) throw ConfigError("chain.detunings.pattern", "missing");
        if (!d.contains("delta")) throw ConfigError("chain.detunings.delta", "missing");
        cfg.detuning_pattern = string(d["pattern"], "chain.detunings.pattern");
        cfg.detuning_delta = number(d["delta"], "chain.detunings.delta");
        p.detunings = pattern_detunings(cfg.detuning_pattern, p.n_sites, cfg.detuning_delta, "chain.detunings.pattern");
    }

    if (j.contains("positions") && j.contains("spacing")) {
        throw ConfigError("chain.spacing", "give either positions or spacing");
    }
    if (j.contains("positions")) {
        const json& x = j["positions"];
        if (!x.is_array() || x.size() != static_cast<std::size_t>(p.n_sites)) {
            throw ConfigError("chain.positions", "expected " + std::to_string(p.n_sites) + " numbers");
        }
        p.positions.clear();
        for (std::size_t i = 0; i < x.size(); ++i) {
            p.positions.push_back(number(x[i], "chain.positions[" + std::to_string(i) + "]"));
        }
    } else {
        const int spacing =
            j.contains("spacing") ? static_cast<int>(integer(j["spacing"], "chain.spacing", 1, 1000)) : 1;
        p.positions = commensurate_positions(p.n_sites, p.wavenumber, spacing);
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("chain", e.what());
    }
}

}  // namespace config_detail

/// Parse a configuration document. `experiment` (from the command line) takes
/// precedence over an "experiment" entry in the document.
inline RunConfig parse_config(const json& j, const std::string& experiment = {}) {
    using namespace config_detail;
    reject_unknown(j, "",
                   {"experiment", "preset", "chain", "generator", "grids", "spectral", "sweep", "trajectory",
                    "photocurrent", "output_dir", "seed", "workers", "provenance"});
    RunConfig cfg;
    cfg.experiment = experiment.empty() && j.contains("experiment") ? string(j["experiment"], "experiment")
                                                                     : experiment;
    if (cfg.experiment.empty()) throw ConfigError("experiment", "missing");
    if (std::find(known_experiments().begin(), known_experiments().end(), cfg.experiment) ==
        known_experiments().end()) {
        std::string known;
        for (const auto& e : known_experiments()) known += (known.empty() ? "" : ", ") + e;
        throw ConfigError("experiment", "unknown experiment '" + cfg.experiment + "' (known: " + known + ")");
    }
    if (j.contains("preset")) cfg.preset = string(j["preset"], "preset");
    if (!j.contains("chain")) throw ConfigError("chain", "missing");
    parse_chain(j["chain"], cfg);

    if (j.contains("generator")) {
        const std::string g = string(j["generator"], "generator");
        if (g == "general") {
            cfg.form = GeneratorForm::general;
        } else if (g == "commensurate") {
            cfg.form = GeneratorForm::commensurate;
        } else {
            throw ConfigError("generator", "expected 'general' or 'commensurate'");
        }
    }

    if (j.contains("grids")) {
        const json& g = j["grids"];
        reject_unknown(g, "grids", {"s", "omega", "gamma_unguided", "detuning_pattern"});
        if (g.contains("s")) cfg.s_grid = grid(g["s"], "grids.s");
        if (g.contains("omega")) {
            cfg.omega_grid = grid(g["omega"], "grids.omega");
            for (double v : cfg.omega_grid) {
                if (v < 0.0) throw ConfigError("grids.omega", "values must be >= 0");
            }
        }
        if (g.contains("gamma_unguided")) {
            cfg.gamma_unguided_grid = grid(g["gamma_unguided"], "grids.gamma_unguided");
            for (double v : cfg.gamma_unguided_grid) {
                if (v < 0.0) throw ConfigError("grids.gamma_unguided", "values must be >= 0");
            }
        }
        if (g.contains("detuning_pattern")) {
            const json& pg = g["detuning_pattern"];
            if (!pg.is_array() || pg.empty()) throw ConfigError("grids.detuning_pattern", "expected a non-empty list");
            for (std::size_t i = 0; i < pg.size(); ++i) {
                const std::string f = "grids.detuning_pattern[" + std::to_string(i) + "]";
                const std::string name = string(pg[i], f);
                pattern_detunings(name, cfg.chain.n_sites, cfg.detuning_delta, f);
                cfg.pattern_grid.push_back(name);
            }
        }
    }
    if ((cfg.experiment == "scgf-sweep" || cfg.experiment == "biased-state") && cfg.s_grid.empty()) {
        throw ConfigError("grids.s", "required and non-empty for " + cfg.experiment);
    }

    if (j.contains("spectral")) {
        const json& s = j["spectral"];
        reject_unknown(s, "spectral", {"tol", "krylov_dim", "max_restarts", "positivity_tol", "residual_limit"});
        if (s.contains("tol")) cfg.spectral.tol = positive(s["tol"], "spectral.tol");
        if (s.contains("krylov_dim")) {
            cfg.spectral.krylov_dim = static_cast<int>(integer(s["krylov_dim"], "spectral.krylov_dim", 4, 2000));
        }
        if (s.contains("max_restarts")) {
            cfg.spectral.max_restarts =
                static_cast<int>(integer(s["max_restarts"], "spectral.max_restarts", 0, 1000000));
        }
        if (s.contains("positivity_tol")) cfg.spectral.positivity_tol = nonneg(s["positivity_tol"], "spectral.positivity_tol");
        if (s.contains("residual_limit")) cfg.spectral.residual_limit = positive(s["residual_limit"], "spectral.residual_limit");
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        reject_unknown(s, "sweep", {"warm_start", "finite_difference", "variance", "variance_step", "pairs"});
        if (s.contains("warm_start")) cfg.sweep.warm_start = boolean(s["warm_start"], "sweep.warm_start");
        if (s.contains("finite_difference")) {
            cfg.sweep.finite_difference = boolean(s["finite_difference"], "sweep.finite_difference");
        }
        if (s.contains("variance")) cfg.sweep.variance = boolean(s["variance"], "sweep.variance");
        if (s.contains("variance_step")) cfg.sweep.variance_step = positive(s["variance_step"], "sweep.variance_step");
        if (s.contains("pairs")) {
            const json& pr = s["pairs"];
            if (!pr.is_array()) throw ConfigError("sweep.pairs", "expected a list of [a, b] pairs");
            for (std::size_t i = 0; i < pr.size(); ++i) {
                const std::string f = "sweep.pairs[" + std::to_string(i) + "]";
                if (!pr[i].is_array() || pr[i].size() != 2) throw ConfigError(f, "expected [a, b]");
                const int a = static_cast<int>(integer(pr[i][0], f, 1, cfg.chain.n_sites));
                const int b = static_cast<int>(integer(pr[i][1], f, 1, cfg.chain.n_sites));
                if (a == b) throw ConfigError(f, "sites must differ");
                cfg.sweep.pairs.emplace_back(a, b);
            }
        }
    }

    if (j.contains("trajectory")) {
        const json& t = j["trajectory"];
        reject_unknown(t, "trajectory",
                       {"dt", "horizon", "count", "bin_width", "initial", "select_s", "segment_length",
                        "keep_fraction"});
        auto& ts = cfg.trajectory;
        if (t.contains("dt")) ts.dt = positive(t["dt"], "trajectory.dt");
        if (t.contains("horizon")) ts.horizon = positive(t["horizon"], "trajectory.horizon");
        if (t.contains("count")) ts.count = static_cast<std::size_t>(integer(t["count"], "trajectory.count", 1, 10000000));
        if (t.contains("bin_width")) ts.bin_width = positive(t["bin_width"], "trajectory.bin_width");
        if (t.contains("initial")) {
            ts.initial = string(t["initial"], "trajectory.initial");
            if (ts.initial != "ground" && ts.initial != "steady") {
                throw ConfigError("trajectory.initial", "expected 'ground' or 'steady'");
            }
        }
        if (t.contains("select_s")) ts.select_s = grid(t["select_s"], "trajectory.select_s");
        if (t.contains("segment_length")) ts.segment_length = positive(t["segment_length"], "trajectory.segment_length");
        if (t.contains("keep_fraction")) {
            ts.keep_fraction = positive(t["keep_fraction"], "trajectory.keep_fraction");
            if (ts.keep_fraction > 1.0) throw ConfigError("trajectory.keep_fraction", "must be in (0, 1]");
        }
        const double scale = cfg.chain.gamma() + cfg.chain.gamma_unguided;
        if (ts.dt > 0.01 / std::max(scale, 1e-300) * (1.0 + 1e-12)) {
            throw ConfigError("trajectory.dt", "must be <= 0.01/(gamma + gamma_unguided)");
        }
        if (ts.horizon < 100.0 * ts.dt * (1.0 - 1e-12)) throw ConfigError("trajectory.horizon", "must be >= 100 dt");
    }

    if (j.contains("photocurrent")) {
        const json& p = j["photocurrent"];
        reject_unknown(p, "photocurrent", {"t_end", "samples"});
        if (p.contains("t_end")) cfg.photocurrent.t_end = positive(p["t_end"], "photocurrent.t_end");
        if (p.contains("samples")) {
            cfg.photocurrent.samples = static_cast<std::size_t>(integer(p["samples"], "photocurrent.samples", 2, 10000000));
        }
    }

    if (j.contains("output_dir")) cfg.output_dir = string(j["output_dir"], "output_dir");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
            throw ConfigError("seed", "expected a non-negative integer");
        }
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("workers")) cfg.workers = static_cast<int>(integer(j["workers"], "workers", 1, 4096));
    if (j.contains("provenance")) {
        const json& pv = j["provenance"];
        if (!pv.is_object()) throw ConfigError("provenance", "expected an object");
        for (const auto& [k, v] : pv.items()) cfg.provenance[k] = string(v, "provenance." + k);
    }
    return cfg;
}

/// Canonical JSON form; parse_config(to_json(c)) reproduces c.
inline json to_json(const RunConfig& c) {
    json chain = {
        {"n_sites", c.chain.n_sites},
        {"gamma_left", c.chain.gamma_left},
        {"gamma_right", c.chain.gamma_right},
        {"gamma_unguided", c.chain.gamma_unguided},
        {"rabi", c.chain.rabi},
        {"positions", c.chain.positions},
        {"wavenumber", c.chain.wavenumber},
        {"waveguide_distance", c.chain.waveguide_distance},
    };
    if (c.detuning_pattern == "custom") {
        chain["detunings"] = c.chain.detunings;
    } else {
        chain["detunings"] = {{"pattern", c.detuning_pattern}, {"delta", c.detuning_delta}};
    }
    json grids = json::object();
    if (!c.s_grid.empty()) grids["s"] = c.s_grid;
    if (!c.omega_grid.empty()) grids["omega"] = c.omega_grid;
    if (!c.gamma_unguided_grid.empty()) grids["gamma_unguided"] = c.gamma_unguided_grid;
    if (!c.pattern_grid.empty()) grids["detuning_pattern"] = c.pattern_grid;
    json pairs = json::array();
    for (const auto& [a, b] : c.sweep.pairs) pairs.push_back({a, b});
    json j = {
        {"experiment", c.experiment},
        {"chain", chain},
        {"generator", c.form == GeneratorForm::general ? "general" : "commensurate"},
        {"grids", grids},
        {"spectral",
         {{"tol", c.spectral.tol},
          {"krylov_dim", c.spectral.krylov_dim},
          {"max_restarts", c.spectral.max_restarts},
          {"positivity_tol", c.spectral.positivity_tol},
          {"residual_limit", c.spectral.residual_limit}}},
        {"sweep",
         {{"warm_start", c.sweep.warm_start},
          {"finite_difference", c.sweep.finite_difference},
          {"variance", c.sweep.variance},
          {"variance_step", c.sweep.variance_step},
          {"pairs", pairs}}},
        {"trajectory",
         {{"dt", c.trajectory.dt},
          {"horizon", c.trajectory.horizon},
          {"count", c.trajectory.count},
          {"bin_width", c.trajectory.bin_width},
          {"initial", c.trajectory.initial},
          {"segment_length", c.trajectory.segment_length},
          {"keep_fraction", c.trajectory.keep_fraction}}},
        {"photocurrent", {{"t_end", c.photocurrent.t_end}, {"samples", c.photocurrent.samples}}},
        {"output_dir", c.output_dir},
        {"seed", c.seed},
        {"workers", c.workers},
    };
    if (!c.trajectory.select_s.empty()) j["trajectory"]["select_s"] = c.trajectory.select_s;
    if (!c.preset.empty()) j["preset"] = c.preset;
    if (!c.provenance.empty()) j["provenance"] = c.provenance;
    return j;
}

/// Parameter sets behind the three figure datasets. Fields with published values
/// are marked "published", everything else "choice".
inline RunConfig preset(const std::string& name, const std::string& experiment = "scgf-sweep") {
    if (std::find(known_presets().begin(), known_presets().end(), name) == known_presets().end()) {
        std::string known;
        for (const auto& p : known_presets()) known += (known.empty() ? "" : ", ") + p;
        throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
    }
    const double delta = 0.1;
    const double rabi = 1.4;
    const std::string pattern = name == "fig2" ? "uniform" : "alternating";
    json j = {
        {"experiment", experiment},
        {"preset", name},
        {"chain",
         {{"n_sites", 6},
          {"gamma", 1.0},
          {"delta_gamma", 2.0 / 3.0},
          {"gamma_unguided", 0.0},
          {"rabi", rabi},
          {"detunings", {{"pattern", pattern}, {"delta", delta}}}}},
        {"grids", {{"s", {{"start", -0.15}, {"stop", 0.15}, {"count", 61}}}}},
        {"trajectory", {{"dt", 0.002}, {"horizon", 600.0}, {"count", 1}, {"bin_width", 5.0}}},
        {"photocurrent", {{"t_end", 200.0}, {"samples", 401}}},
    };
    std::map<std::string, std::string> prov = {
        {"chain.n_sites", "published"},
        {"chain.delta_gamma", "published"},
        {"chain.detunings", "published"},
        {"chain.gamma_unguided", "published"},
        {"chain.positions", "choice"},
        {"generator", "choice"},
        {"grids.s", "choice"},
        {"spectral", "choice"},
        {"sweep", "choice"},
        {"trajectory.dt", "choice"},
        {"trajectory.horizon", "choice"},
        {"trajectory.count", "choice"},
        {"trajectory.bin_width", "choice"},
        {"seed", "choice"},
    };
    if (name == "fig2") {
        j["grids"]["omega"] = {{"start", 0.0}, {"stop", 2.0}, {"count", 41}};
        j["trajectory"]["select_s"] = {-0.01, 0.0, 0.01};
        prov["grids.omega"] = "choice";
        prov["chain.rabi"] = "published";
        prov["trajectory.select_s"] = "published";
        prov["trajectory.segment_length"] = "choice";
        prov["trajectory.keep_fraction"] = "choice";
    } else if (name == "fig3") {
        j["grids"]["omega"] = {{"start", 0.0}, {"stop", 2.0}, {"count", 41}};
        prov["grids.omega"] = "choice";
        prov["chain.rabi"] = "published";
        prov["photocurrent.t_end"] = "choice";
        prov["photocurrent.samples"] = "choice";
    } else {
        j["grids"]["gamma_unguided"] = {0.0, 1.0 / 30.0, 2.0 / 30.0};
        j["grids"]["detuning_pattern"] = {"uniform", "alternating"};
        j["trajectory"]["horizon"] = 2000.0;
        prov["chain.rabi"] = "published";
        prov["grids.gamma_unguided"] = "choice";
        prov["grids.gamma_unguided[2]"] = "published";
        prov["grids.detuning_pattern"] = "published";
    }
    RunConfig cfg = parse_config(j);
    cfg.provenance = std::move(prov);
    return cfg;
}

}  // namespace chiral_fcs
