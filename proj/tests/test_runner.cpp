#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "chiral_fcs/runner.hpp"

using namespace chiral_fcs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("chiral_fcs_test_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small(const std::string& experiment, const fs::path& out) {
    json j = json::parse(R"({
        "chain": {"n_sites": 2, "delta_gamma": 0.6667, "rabi": 1.4,
                  "detunings": {"pattern": "alternating", "delta": 0.1}},
        "grids": {"s": [-0.05, 0.0, 0.05], "omega": [0.5, 1.4]},
        "trajectory": {"dt": 0.005, "horizon": 20.0, "count": 3, "bin_width": 2.0, "select_s": [0.0]},
        "photocurrent": {"t_end": 5.0, "samples": 11},
        "seed": 9
    })");
    j["output_dir"] = out.string();
    return parse_config(j, experiment);
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(CHIRAL_FCS_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void expect_manifest_hashes(const fs::path& dir) {
    const json m = json::parse(io::read_file(dir / "manifest.json"));
    ASSERT_FALSE(m["files"].empty());
    for (const auto& f : m["files"]) {
        EXPECT_EQ(io::sha256_hex(io::read_file(dir / f["path"].get<std::string>())), f["sha256"].get<std::string>());
    }
}

}  // namespace

TEST(Runner, ScgfSweepTableAndManifest) {
    const fs::path out = scratch("sweep");
    std::ostringstream log;
    const auto res = runner::run(small("scgf-sweep", out), log);
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_EQ(res.n_points, 6u);
    EXPECT_EQ(res.n_failed, 0u);
    const io::ParsedCsv t = io::parse_csv(io::read_file(out / "sweep.csv"));
    const std::vector<std::string> head(t.header.begin(), t.header.begin() + 10);
    EXPECT_EQ(head, (std::vector<std::string>{"s", "omega", "theta", "k_hf", "k_fd", "variance_rate", "purity", "gap",
                                              "residual", "flags"}));
    EXPECT_EQ(t.header[10], "c_12");
    ASSERT_EQ(t.rows.size(), 6u);
    for (const auto& r : t.rows) {
        if (std::stod(r[0]) == 0.0) EXPECT_LT(std::abs(std::stod(r[t.column("theta")])), 1e-10);
        EXPECT_NEAR(std::stod(r[t.column("k_hf")]), std::stod(r[t.column("k_fd")]), 1e-6);
    }
    const json m = res.manifest;
    EXPECT_EQ(m["experiment"], "scgf-sweep");
    EXPECT_EQ(m["config_hash"].get<std::string>().size(), 64u);
    EXPECT_EQ(m["points"].size(), 6u);
    EXPECT_TRUE(m.contains("wall_clock_seconds"));
    EXPECT_EQ(m["version"], CHIRAL_FCS_VERSION);
    expect_manifest_hashes(out);
}

TEST(Runner, SpectralOutputIndependentOfWorkers) {
    const fs::path a = scratch("w1"), b = scratch("w2");
    RunConfig ca = small("scgf-sweep", a);
    RunConfig cb = small("scgf-sweep", b);
    cb.workers = 2;
    std::ostringstream log;
    runner::run(ca, log);
    runner::run(cb, log);
    EXPECT_EQ(io::read_file(a / "sweep.csv"), io::read_file(b / "sweep.csv"));
    EXPECT_EQ(runner::config_hash(ca), runner::config_hash(cb));
}

TEST(Runner, TrajectoryReproducible) {
    const fs::path a = scratch("traj_a"), b = scratch("traj_b");
    RunConfig ca = small("trajectory", a);
    RunConfig cb = small("trajectory", b);
    cb.workers = 3;
    std::ostringstream log;
    const auto res = runner::run(ca, log);
    runner::run(cb, log);
    EXPECT_EQ(res.n_points, 6u);
    for (const auto& f : res.manifest["files"]) {
        const std::string rel = f["path"];
        EXPECT_EQ(io::read_file(a / rel), io::read_file(b / rel)) << rel;
    }
    const io::ParsedCsv rec = io::parse_csv(io::read_file(a / "records/record_00000.csv"));
    EXPECT_EQ(rec.header, (std::vector<std::string>{"time", "channel"}));
    EXPECT_EQ(rec.comments[3], "config_hash=" + runner::config_hash(ca));
    const io::ParsedCsv bin = io::parse_csv(io::read_file(a / "records/binned_00000.csv"));
    EXPECT_EQ(bin.rows.size(), 10u);
    EXPECT_TRUE(fs::exists(a / "selected/selected_c000_s00.csv"));
    EXPECT_EQ(res.manifest["s_selected"]["label"], "s-selected approximation");
    EXPECT_EQ(res.manifest["cumulants"].size(), 2u);
    expect_manifest_hashes(a);
}

TEST(Runner, Photocurrent) {
    const fs::path out = scratch("pc");
    std::ostringstream log;
    const auto res = runner::run(small("photocurrent", out), log);
    EXPECT_EQ(res.exit_code, 0);
    const io::ParsedCsv t = io::parse_csv(io::read_file(out / "photocurrent.csv"));
    ASSERT_EQ(t.rows.size(), 22u);
    EXPECT_EQ(std::stod(t.rows[0][t.column("current_guided")]), 0.0);
    EXPECT_GT(std::stod(t.rows[5][t.column("current_guided")]), 0.0);
}

TEST(Runner, BiasedStateWritesStates) {
    const fs::path out = scratch("biased");
    std::ostringstream log;
    const auto res = runner::run(small("biased-state", out), log);
    EXPECT_EQ(res.exit_code, 0);
    const io::ParsedCsv t = io::parse_csv(io::read_file(out / "biased_state.csv"));
    EXPECT_EQ(t.header.back(), "fidelity_dimer");
    // s > 0 with alternating detuning: the biased state is the dimer.
    for (const auto& r : t.rows) {
        if (std::stod(r[0]) > 0.0) EXPECT_GT(std::stod(r[t.column("fidelity_dimer")]), 1.0 - 1e-6);
    }
    EXPECT_EQ(io::parse_csv(io::read_file(out / "states/rho_00000.csv")).rows.size(), 16u);
}

TEST(Runner, DarkStateCheck) {
    const fs::path out = scratch("dark");
    std::ostringstream log;
    const auto res = runner::run(small("dark-state-check", out), log);
    EXPECT_EQ(res.exit_code, 0);
    const io::ParsedCsv t = io::parse_csv(io::read_file(out / "dark_state.csv"));
    ASSERT_EQ(t.rows.size(), 2u);
    for (const auto& r : t.rows) {
        EXPECT_LT(std::stod(r[t.column("residual")]), 1e-10);
        EXPECT_EQ(r[t.column("dark")], "true");
    }
}

TEST(Runner, ManyFailuresGiveNonzeroExit) {
    const fs::path out = scratch("fail");
    RunConfig c = small("scgf-sweep", out);
    c.chain = make_chain(4, 1.0, 0.5, alternating_detuning(4, 0.1));
    c.sweep.pairs.clear();
    c.spectral.krylov_dim = 6;
    c.spectral.max_restarts = 1;
    std::ostringstream log;
    const auto res = runner::run(c, log);
    EXPECT_GT(10 * res.n_failed, res.n_points);
    EXPECT_EQ(res.exit_code, 1);
    EXPECT_FALSE(res.manifest["points"][0]["error"].get<std::string>().empty());
}

TEST(Cli, UnknownPresetListsKnown) {
    const fs::path log = scratch("cli_preset.log");
    EXPECT_EQ(run_cli("dark-state-check --preset fig9", log), 2);
    const std::string text = io::read_file(log);
    EXPECT_NE(text.find("fig2, fig3, fig4"), std::string::npos) << text;
}

TEST(Cli, InvalidConfigNamesField) {
    const fs::path dir = scratch("cli_cfg");
    fs::create_directories(dir);
    io::write_file(dir / "bad.json", R"({"chain": {"n_sites": 2, "rabi": -1, "detunings": [0, 0]}})");
    EXPECT_EQ(run_cli("dark-state-check --config " + (dir / "bad.json").string(), dir / "log"), 2);
    EXPECT_NE(io::read_file(dir / "log").find("chain.rabi"), std::string::npos);
    EXPECT_EQ(run_cli("dark-state-check", dir / "log"), 2);
    EXPECT_EQ(run_cli("nonsense --preset fig3", dir / "log"), 2);
}

TEST(Cli, PresetDarkStateCheck) {
    const fs::path dir = scratch("cli_fig3");
    EXPECT_EQ(run_cli("dark-state-check --preset fig3 --workers 1 --out " + dir.string(), dir.string() + ".log"), 0);
    const json m = json::parse(io::read_file(dir / "manifest.json"));
    EXPECT_EQ(m["preset"], "fig3");
    EXPECT_EQ(m["provenance"]["chain.n_sites"], "published");
    EXPECT_EQ(m["provenance"]["grids.omega"], "choice");
    EXPECT_EQ(m["n_failed"], 0);
    for (const auto& p : m["points"]) EXPECT_TRUE(p["dark"].get<bool>());
    expect_manifest_hashes(dir);
}

TEST(Cli, ConfigFileRun) {
    const fs::path dir = scratch("cli_file");
    fs::create_directories(dir);
    json j = to_json(small("dark-state-check", dir / "out"));
    io::write_file(dir / "cfg.json", j.dump(2));
    EXPECT_EQ(run_cli("dark-state-check --config " + (dir / "cfg.json").string() + " --seed 3", dir / "log"), 0);
    const json m = json::parse(io::read_file(dir / "out" / "manifest.json"));
    EXPECT_EQ(m["config"]["seed"], 3);
}
