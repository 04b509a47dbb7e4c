// runner.hpp - experiment drivers behind the chiral-fcs command line tool.
//
// Every experiment iterates over "columns": combinations of detuning pattern,
// unguided rate and Rabi frequency taken from the grids. Work items are
// indexed up front and results are written in index order, so outputs do not
// depend on the worker count.

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chiral_fcs/config.hpp"
#include "chiral_fcs/dynamics.hpp"
#include "chiral_fcs/io.hpp"
#include "chiral_fcs/parallel.hpp"
#include "chiral_fcs/spectral.hpp"
#include "chiral_fcs/state_analysis.hpp"

#ifndef CHIRAL_FCS_VERSION
#define CHIRAL_FCS_VERSION "0.0.0"
#endif

namespace chiral_fcs::runner {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kDarkThreshold = 1e-10;

struct Column {
    std::string pattern;  ///< uniform, alternating or custom
    double omega = 0.0;
    double gamma_unguided = 0.0;
};

struct RunResult {
    int exit_code = 0;
    std::size_t n_points = 0;
    std::size_t n_failed = 0;
    std::filesystem::path manifest_path;
    json manifest;
};

inline std::vector<Column> columns(const RunConfig& cfg) {
    std::vector<std::string> patterns = cfg.pattern_grid;
    if (patterns.empty()) patterns.push_back(cfg.detuning_pattern);
    std::vector<double> gammas = cfg.gamma_unguided_grid;
    if (gammas.empty()) gammas.push_back(cfg.chain.gamma_unguided);
    std::vector<double> omegas = cfg.omega_grid;
    if (omegas.empty()) omegas.push_back(cfg.chain.rabi);
    std::vector<Column> out;
    for (const auto& p : patterns)
        for (double g : gammas)
            for (double w : omegas) out.push_back({p, w, g});
    return out;
}

inline ChainParams chain_for(const RunConfig& cfg, const Column& c) {
    ChainParams p = cfg.chain;
    p.rabi = c.omega;
    p.gamma_unguided = c.gamma_unguided;
    if (c.pattern != "custom") {
        p.detunings = config_detail::pattern_detunings(c.pattern, p.n_sites, cfg.detuning_delta, "grids.detuning_pattern");
    }
    p.validate();
    return p;
}

/// Analytic dimer state for this chain, if N is even and beta is finite.
/// The detuning magnitude is taken from site 1.
inline std::optional<DensityMatrix> dimer_for(const ChainParams& p) {
    if (p.n_sites % 2 != 0) return std::nullopt;
    const DimerParams d{p.rabi, p.detunings.front(), p.delta_gamma(), p.n_sites};
    if (d.detuning == 0.0 && d.delta_gamma == 0.0) return std::nullopt;
    return dimer_state(d);
}

/// Hash of the configuration without the fields that cannot change results.
inline std::string config_hash(const RunConfig& cfg) {
    json j = to_json(cfg);
    j.erase("output_dir");
    j.erase("workers");
    return io::sha256_hex(j.dump());
}

namespace detail {

inline std::string join_flags(const std::vector<std::string>& flags) {
    if (flags.empty()) return "ok";
    std::string s;
    for (const auto& f : flags) s += (s.empty() ? "" : ";") + f;
    return s;
}

inline std::string pair_name(const std::pair<int, int>& p) {
    return "c_" + std::to_string(p.first) + std::to_string(p.second);
}

class Outputs {
  public:
    explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& rel, const std::string& bytes) {
        io::write_file(dir_ / rel, bytes);
        files_.push_back({{"path", rel}, {"sha256", io::sha256_hex(bytes)}, {"bytes", bytes.size()}});
    }
    const std::filesystem::path& dir() const { return dir_; }
    const json& files() const { return files_; }

  private:
    std::filesystem::path dir_;
    json files_ = json::array();
};

inline json column_json(const Column& c) {
    return {{"omega", c.omega}, {"gamma_unguided", c.gamma_unguided}, {"detuning_pattern", c.pattern}};
}

}  // namespace detail

/// One row of a sweep or biased-state table.
struct PointRow {
    std::size_t column = 0;
    double s = 0.0;
    bool converged = false;
    std::string error;
    std::vector<std::string> flags;
    double theta = kNaN, k_hf = kNaN, k_fd = kNaN, variance = kNaN, variance_error = kNaN;
    double purity = kNaN, gap = kNaN, residual = kNaN, fidelity_dimer = kNaN;
    int iterations = 0;
    std::vector<double> concurrence;
    DensityMatrix rho;
};

/// theta(s) and observables on the s grid for every column.
inline std::vector<PointRow> compute_points(const RunConfig& cfg, const std::vector<Column>& cols,
                                            const std::vector<std::pair<int, int>>& pairs, bool keep_states,
                                            std::ostream& log) {
    std::vector<GeneratorSpec> specs;
    specs.reserve(cols.size());
    for (const auto& c : cols) specs.emplace_back(chain_for(cfg, c), cfg.form);

    std::vector<double> index(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) index[i] = static_cast<double>(i);
    SweepOptions so;
    so.spectral = cfg.spectral;
    so.warm_start = cfg.sweep.warm_start;
    so.workers = cfg.workers;
    log << "solving " << cfg.s_grid.size() * cols.size() << " grid points (" << cols.size() << " columns)\n";
    const auto sweep = scgf_sweep([&](double i) { return specs[static_cast<std::size_t>(i)]; }, cfg.s_grid, index, so);

    std::vector<PointRow> rows(sweep.size());
    parallel_for(sweep.size(), cfg.workers, [&](std::size_t k) {
        const SweepPoint& pt = sweep[k];
        PointRow& row = rows[k];
        row.column = static_cast<std::size_t>(pt.secondary);
        row.s = pt.s;
        if (!pt.result) {
            row.error = pt.error;
            row.flags.push_back("failed");
            return;
        }
        const GeneratorSpec& spec = specs[row.column];
        const SpectralResult& r = *pt.result;
        row.converged = true;
        row.theta = r.theta;
        row.gap = r.spectral_gap_estimate;
        row.residual = r.residual_norm;
        row.iterations = r.iterations;
        if (r.quasi_degenerate) row.flags.push_back("quasi_degenerate");
        row.k_hf = photon_rate_hellmann_feynman(r, spec);
        const TiltedGenerator gen(spec, r.tilt);
        if (cfg.sweep.finite_difference) {
            try {
                row.k_fd = photon_rate_finite_difference(r, gen, cfg.spectral);
                if (!photon_rates_agree(row.k_hf, row.k_fd)) row.flags.push_back("k_mismatch");
            } catch (const std::exception&) {
                row.flags.push_back("k_fd_failed");
            }
        }
        if (cfg.sweep.variance) {
            try {
                const VarianceRate v = count_variance_rate(spec, r.tilt, cfg.sweep.variance_step, cfg.spectral, &r);
                row.variance = v.value;
                row.variance_error = v.error_estimate;
                if (v.noisy) row.flags.push_back("noisy_variance");
            } catch (const std::exception&) {
                row.flags.push_back("variance_failed");
            }
        }
        row.purity = purity(r.rho_right);
        try {
            for (const auto& pc : pair_concurrence_map(r.rho_right, pairs)) row.concurrence.push_back(pc.value);
        } catch (const std::exception&) {
            row.concurrence.assign(pairs.size(), kNaN);
            row.flags.push_back("concurrence_failed");
        }
        if (const auto dimer = dimer_for(spec.params())) {
            try {
                row.fidelity_dimer = fidelity_to(r.rho_right, *dimer);
            } catch (const std::exception&) {
                row.flags.push_back("fidelity_failed");
            }
        }
        if (keep_states) row.rho = r.rho_right;
    });
    return rows;
}

inline io::CsvTable points_table(const std::vector<PointRow>& rows, const std::vector<Column>& cols,
                                 const std::vector<std::pair<int, int>>& pairs, bool with_fidelity) {
    std::vector<std::string> header = {"s",       "omega", "theta", "k_hf",     "k_fd", "variance_rate",
                                       "purity",  "gap",   "residual", "flags"};
    for (const auto& p : pairs) header.push_back(detail::pair_name(p));
    header.push_back("gamma_unguided");
    header.push_back("detuning_pattern");
    if (with_fidelity) header.push_back("fidelity_dimer");
    io::CsvTable t(header);
    for (const auto& r : rows) {
        const Column& c = cols[r.column];
        std::vector<std::string> cells = {io::fmt(r.s),       io::fmt(c.omega),  io::fmt(r.theta),
                                          io::fmt(r.k_hf),    io::fmt(r.k_fd),   io::fmt(r.variance),
                                          io::fmt(r.purity),  io::fmt(r.gap),    io::fmt(r.residual),
                                          detail::join_flags(r.flags)};
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            cells.push_back(io::fmt(i < r.concurrence.size() ? r.concurrence[i] : kNaN));
        }
        cells.push_back(io::fmt(c.gamma_unguided));
        cells.push_back(c.pattern);
        if (with_fidelity) cells.push_back(io::fmt(r.fidelity_dimer));
        t.add_row(std::move(cells));
    }
    return t;
}

inline json points_json(const std::vector<PointRow>& rows, const std::vector<Column>& cols) {
    json pts = json::array();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const PointRow& r = rows[k];
        json p = detail::column_json(cols[r.column]);
        p["index"] = k;
        p["s"] = r.s;
        p["converged"] = r.converged;
        p["flags"] = detail::join_flags(r.flags);
        p["iterations"] = r.iterations;
        if (!r.error.empty()) p["error"] = r.error;
        pts.push_back(std::move(p));
    }
    return pts;
}

/// Run one experiment; writes every output below cfg.output_dir.
inline RunResult run(const RunConfig& cfg, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    detail::Outputs out(cfg.output_dir);
    std::filesystem::create_directories(out.dir());
    const std::string hash = config_hash(cfg);
    const std::vector<Column> cols = columns(cfg);
    const auto pairs = cfg.sweep.pairs.empty() ? nearest_neighbour_pairs(cfg.chain.n_sites) : cfg.sweep.pairs;

    json manifest = {
        {"tool", "chiral-fcs"},
        {"version", CHIRAL_FCS_VERSION},
        {"experiment", cfg.experiment},
        {"config_hash", hash},
        {"config", to_json(cfg)},
        {"solver",
         {{"tol", cfg.spectral.tol},
          {"krylov_dim", cfg.spectral.krylov_dim},
          {"max_restarts", cfg.spectral.max_restarts},
          {"residual_limit", cfg.spectral.residual_limit},
          {"note", "spectral outputs are reproducible up to the eigenvalue tolerance tol"}}},
        {"columns", json::array()},
    };
    if (!cfg.preset.empty()) manifest["preset"] = cfg.preset;
    manifest["provenance"] = cfg.provenance;
    for (const auto& c : cols) manifest["columns"].push_back(detail::column_json(c));
    json points = json::array();
    std::size_t n_failed = 0;

    if (cfg.experiment == "scgf-sweep" || cfg.experiment == "biased-state") {
        const bool biased = cfg.experiment == "biased-state";
        const auto rows = compute_points(cfg, cols, pairs, biased, log);
        for (const auto& r : rows) n_failed += r.converged ? 0 : 1;
        out.write(biased ? "biased_state.csv" : "sweep.csv", points_table(rows, cols, pairs, biased).str());
        if (biased) {
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (!rows[k].converged) continue;
                char name[64];
                std::snprintf(name, sizeof name, "states/rho_%05zu.csv", k);
                out.write(name, io::matrix_csv(rows[k].rho));
            }
        }
        points = points_json(rows, cols);
        manifest["grid"] = {{"s_count", cfg.s_grid.size()}, {"column_count", cols.size()}};
    } else if (cfg.experiment == "trajectory") {
        const auto& ts = cfg.trajectory;
        std::vector<GeneratorSpec> specs;
        for (const auto& c : cols) specs.emplace_back(chain_for(cfg, c), cfg.form);
        std::vector<std::optional<DensityMatrix>> steady(cols.size());
        std::vector<std::string> errors(cols.size() * ts.count);
        if (ts.initial == "steady") {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                try {
                    steady[c] = dominant_eigenpair(specs[c], Tilt{}, cfg.spectral).rho_right;
                } catch (const std::exception& e) {
                    for (std::size_t i = 0; i < ts.count; ++i) errors[c * ts.count + i] = e.what();
                }
            }
        }
        const std::size_t n = cols.size() * ts.count;
        std::vector<std::optional<PhotonRecord>> recs(n);
        log << "running " << n << " trajectories\n";
        parallel_for(n, cfg.workers, [&](std::size_t k) {
            const std::size_t c = k / ts.count;
            if (!errors[k].empty()) return;
            TrajectoryConfig tc;
            tc.dt = ts.dt;
            tc.horizon = ts.horizon;
            tc.seed = trajectory_seed(cfg.seed, k);
            tc.initial_mixture = steady[c];
            try {
                recs[k] = run_trajectory(specs[c], tc);
            } catch (const std::exception& e) {
                errors[k] = e.what();
            }
        });
        io::CsvTable summary({"record", "seed", "omega", "gamma_unguided", "detuning_pattern", "count_L",
                              "count_R", "count_U", "longest_zero_run_bins", "max_bin_count"});
        for (std::size_t k = 0; k < n; ++k) {
            const Column& col = cols[k / ts.count];
            json p = detail::column_json(col);
            p["index"] = k;
            p["seed"] = trajectory_seed(cfg.seed, k);
            p["converged"] = recs[k].has_value();
            p["flags"] = recs[k] ? "ok" : "failed";
            if (!recs[k]) {
                p["error"] = errors[k];
                ++n_failed;
                points.push_back(std::move(p));
                continue;
            }
            points.push_back(std::move(p));
            const PhotonRecord& r = *recs[k];
            char name[64];
            std::snprintf(name, sizeof name, "records/record_%05zu.csv", k);
            out.write(name, io::record_csv(r, hash));
            const BinnedSeries b = binned_series(r, ts.bin_width);
            std::snprintf(name, sizeof name, "records/binned_%05zu.csv", k);
            out.write(name, io::binned_csv(b));
            std::size_t nl = 0, nr = 0, nu = 0;
            for (const auto& e : r.events) {
                const std::string& l = r.channel_labels[static_cast<std::size_t>(e.channel)];
                (l == "L" ? nl : l == "R" ? nr : nu) += 1;
            }
            const auto guided = binned_counts(r, ts.bin_width);
            const int max_bin = guided.empty() ? 0 : *std::max_element(guided.begin(), guided.end());
            summary.add_row({std::to_string(k), std::to_string(r.seed), io::fmt(col.omega), io::fmt(col.gamma_unguided),
                             col.pattern, std::to_string(nl), std::to_string(nr), std::to_string(nu),
                             std::to_string(longest_zero_run(guided)), std::to_string(max_bin)});
        }
        out.write("trajectory_summary.csv", summary.str());

        json cumulants = json::array();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            std::vector<PhotonRecord> group;
            for (std::size_t i = 0; i < ts.count; ++i)
                if (recs[c * ts.count + i]) group.push_back(*recs[c * ts.count + i]);
            if (group.size() < 2) continue;
            const EmpiricalCumulants e = empirical_cumulants(group);
            json jc = detail::column_json(cols[c]);
            jc.update({{"mean_rate", e.mean_rate},
                       {"mean_rate_se", e.mean_rate_se},
                       {"variance_rate", e.variance_rate},
                       {"variance_rate_se", e.variance_rate_se},
                       {"n_records", e.n_records}});
            cumulants.push_back(std::move(jc));
        }
        manifest["cumulants"] = cumulants;

        if (!ts.select_s.empty()) {
            json sel = json::array();
            for (std::size_t c = 0; c < cols.size(); ++c) {
                for (std::size_t j = 0; j < ts.select_s.size(); ++j) {
                    const double s = ts.select_s[j];
                    double target = kNaN;
                    try {
                        target = photon_rate_hellmann_feynman(dominant_eigenpair(specs[c], Tilt::guided(s), cfg.spectral),
                                                              specs[c]);
                    } catch (const std::exception& e) {
                        log << "selection target at s=" << s << " failed: " << e.what() << '\n';
                        continue;
                    }
                    io::CsvTable t({"record", "segment_start", "time", "channel"});
                    t.add_comment("label=s-selected approximation");
                    t.add_comment("s=" + io::fmt(s));
                    t.add_comment("target_rate=" + io::fmt(target));
                    t.add_comment("segment_length=" + io::fmt(ts.segment_length));
                    t.add_comment("config_hash=" + hash);
                    std::size_t kept = 0;
                    for (std::size_t i = 0; i < ts.count; ++i) {
                        const std::size_t k = c * ts.count + i;
                        if (!recs[k]) continue;
                        for (const auto& seg :
                             select_segments_by_rate(*recs[k], ts.segment_length, target, ts.keep_fraction)) {
                            ++kept;
                            for (const auto& e : seg.events) {
                                t.add_row({std::to_string(k), io::fmt(seg.start), io::fmt(e.time),
                                           recs[k]->channel_labels[static_cast<std::size_t>(e.channel)]});
                            }
                        }
                    }
                    char name[64];
                    std::snprintf(name, sizeof name, "selected/selected_c%03zu_s%02zu.csv", c, j);
                    out.write(name, t.str());
                    json js = detail::column_json(cols[c]);
                    js.update({{"s", s}, {"target_rate", target}, {"segments", kept}, {"file", name}});
                    sel.push_back(std::move(js));
                }
            }
            manifest["s_selected"] = {{"label", "s-selected approximation"},
                                      {"method", "unbiased records cut into segments; the segments with count "
                                                 "rate closest to k(s) are kept"},
                                      {"entries", sel}};
        }
    } else if (cfg.experiment == "photocurrent") {
        const auto& pc = cfg.photocurrent;
        const std::vector<double> times = config_detail::linspace(0.0, pc.t_end, pc.samples);
        std::vector<std::vector<std::array<double, 4>>> series(cols.size());
        std::vector<std::string> errors(cols.size());
        parallel_for(cols.size(), cfg.workers, [&](std::size_t c) {
            try {
                const GeneratorSpec spec(chain_for(cfg, cols[c]), cfg.form);
                const auto dimer = dimer_for(spec.params());
                const auto states = integrate_master_equation(spec, projector(all_ground_state(spec.space())), times);
                for (const auto& rho : states) {
                    const Photocurrent i = photocurrent(spec, rho);
                    const DensityMatrix unit = rho / rho.trace().real();
                    series[c].push_back({i.guided, i.unguided, purity(unit),
                                         dimer ? fidelity_to(unit, *dimer) : kNaN});
                }
            } catch (const std::exception& e) {
                errors[c] = e.what();
            }
        });
        io::CsvTable t({"t", "omega", "gamma_unguided", "detuning_pattern", "current_guided", "current_unguided",
                        "purity", "fidelity_dimer"});
        for (std::size_t c = 0; c < cols.size(); ++c) {
            json p = detail::column_json(cols[c]);
            p["index"] = c;
            p["converged"] = errors[c].empty();
            p["flags"] = errors[c].empty() ? "ok" : "failed";
            if (!errors[c].empty()) {
                p["error"] = errors[c];
                ++n_failed;
            }
            points.push_back(std::move(p));
            for (std::size_t i = 0; i < series[c].size(); ++i) {
                const auto& v = series[c][i];
                t.add_row({io::fmt(times[i]), io::fmt(cols[c].omega), io::fmt(cols[c].gamma_unguided), cols[c].pattern,
                           io::fmt(v[0]), io::fmt(v[1]), io::fmt(v[2]), io::fmt(v[3])});
            }
        }
        out.write("photocurrent.csv", t.str());
    } else if (cfg.experiment == "dark-state-check") {
        io::CsvTable t({"omega", "gamma_unguided", "detuning_pattern", "residual", "guided_emission_rate", "dark"});
        for (std::size_t c = 0; c < cols.size(); ++c) {
            json p = detail::column_json(cols[c]);
            p["index"] = c;
            try {
                const GeneratorSpec spec(chain_for(cfg, cols[c]), cfg.form);
                const auto dimer = dimer_for(spec.params());
                if (!dimer) throw std::invalid_argument("dimer state needs an even number of sites and a finite beta");
                const DarkStateReport r = dark_state_residual(spec, *dimer);
                const bool dark = r.residual < kDarkThreshold;
                t.add_row({io::fmt(cols[c].omega), io::fmt(cols[c].gamma_unguided), cols[c].pattern, io::fmt(r.residual),
                           io::fmt(r.guided_emission_rate), dark ? "true" : "false"});
                log << "omega=" << cols[c].omega << " gamma_unguided=" << cols[c].gamma_unguided << " pattern="
                    << cols[c].pattern << ": residual " << r.residual << (dark ? " (dark)" : "") << '\n';
                p.update({{"converged", true}, {"flags", "ok"}, {"residual", r.residual}, {"dark", dark}});
            } catch (const std::exception& e) {
                p.update({{"converged", false}, {"flags", "failed"}, {"error", e.what()}});
                ++n_failed;
            }
            points.push_back(std::move(p));
        }
        out.write("dark_state.csv", t.str());
    }

    RunResult res;
    res.n_points = points.size();
    res.n_failed = n_failed;
    res.exit_code = (res.n_points > 0 && 10 * n_failed > res.n_points) ? 1 : 0;
    manifest["points"] = points;
    manifest["n_points"] = res.n_points;
    manifest["n_failed"] = n_failed;
    manifest["files"] = out.files();
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["exit_code"] = res.exit_code;
    res.manifest_path = out.dir() / "manifest.json";
    io::write_file(res.manifest_path, manifest.dump(2) + "\n");
    res.manifest = std::move(manifest);
    log << res.n_points - n_failed << "/" << res.n_points << " points succeeded; manifest at "
        << res.manifest_path.string() << '\n';
    return res;
}

}  // namespace chiral_fcs::runner
