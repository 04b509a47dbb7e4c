#include <gtest/gtest.h>

#include "chiral_fcs/config.hpp"
#include "chiral_fcs/io.hpp"

using namespace chiral_fcs;

namespace {

json minimal() {
    return json::parse(R"({
        "experiment": "scgf-sweep",
        "chain": {"n_sites": 3, "delta_gamma": 0.5, "rabi": 1.0,
                  "detunings": {"pattern": "alternating", "delta": 0.1}},
        "grids": {"s": {"start": -0.1, "stop": 0.1, "count": 5}}
    })");
}

std::string error_field(const json& j, const std::string& experiment = {}) {
    try {
        parse_config(j, experiment);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

}  // namespace

TEST(Config, MinimalDocument) {
    const RunConfig c = parse_config(minimal());
    EXPECT_EQ(c.experiment, "scgf-sweep");
    EXPECT_EQ(c.chain.n_sites, 3);
    EXPECT_NEAR(c.chain.gamma_left, 0.25, 1e-15);
    EXPECT_NEAR(c.chain.gamma_right, 0.75, 1e-15);
    EXPECT_EQ(c.chain.detunings, (std::vector<double>{0.1, -0.1, 0.1}));
    ASSERT_EQ(c.s_grid.size(), 5u);
    EXPECT_EQ(c.s_grid.front(), -0.1);
    EXPECT_EQ(c.s_grid.back(), 0.1);
    EXPECT_NEAR(c.s_grid[2], 0.0, 1e-17);
    EXPECT_EQ(c.workers, 1);
    EXPECT_EQ(c.form, GeneratorForm::general);
}

TEST(Config, CommandLineExperimentWins) {
    EXPECT_EQ(parse_config(minimal(), "dark-state-check").experiment, "dark-state-check");
}

TEST(Config, ErrorsNameTheField) {
    json j = minimal();
    j["chain"]["rabbi"] = 1.0;
    EXPECT_EQ(error_field(j), "chain.rabbi");

    j = minimal();
    j["chain"].erase("n_sites");
    EXPECT_EQ(error_field(j), "chain.n_sites");

    j = minimal();
    j["chain"]["rabi"] = -1.0;
    EXPECT_EQ(error_field(j), "chain.rabi");

    j = minimal();
    j["chain"]["delta_gamma"] = 1.5;
    EXPECT_EQ(error_field(j), "chain.delta_gamma");

    j = minimal();
    j["grids"]["s"] = json::array();
    EXPECT_EQ(error_field(j), "grids.s");

    j = minimal();
    j["grids"]["s"] = {0.0, "x"};
    EXPECT_EQ(error_field(j), "grids.s[1]");

    j = minimal();
    j["grids"].erase("s");
    EXPECT_EQ(error_field(j), "grids.s");
    EXPECT_EQ(error_field(j, "dark-state-check"), "<no error>");

    j = minimal();
    j["chain"]["detunings"] = {{"pattern", "staggered"}, {"delta", 0.1}};
    EXPECT_EQ(error_field(j), "chain.detunings.pattern");

    j = minimal();
    j["chain"]["detunings"] = {0.1, 0.2};
    EXPECT_EQ(error_field(j), "chain.detunings");

    j = minimal();
    j["workers"] = 0;
    EXPECT_EQ(error_field(j), "workers");

    j = minimal();
    j["trajectory"] = {{"dt", 0.05}};
    EXPECT_EQ(error_field(j), "trajectory.dt");

    j = minimal();
    j["experiment"] = "sweep";
    EXPECT_EQ(error_field(j), "experiment");

    j = minimal();
    j["chain"]["positions"] = {0.0, 2.0, 1.0};
    EXPECT_EQ(error_field(j), "chain");
}

TEST(Config, JsonRoundTrip) {
    json j = minimal();
    j["grids"]["omega"] = {0.0, 0.5};
    j["grids"]["gamma_unguided"] = {0.0, 0.1};
    j["sweep"] = {{"pairs", {{1, 2}, {1, 3}}}, {"variance", false}};
    j["trajectory"] = {{"count", 4}, {"select_s", {-0.01, 0.01}}};
    const RunConfig a = parse_config(j);
    const json ja = to_json(a);
    const RunConfig b = parse_config(ja);
    EXPECT_EQ(to_json(b), ja);
    EXPECT_EQ(b.sweep.pairs, (std::vector<std::pair<int, int>>{{1, 2}, {1, 3}}));
    EXPECT_EQ(b.trajectory.count, 4u);
}

TEST(Preset, Fig2) {
    const RunConfig c = preset("fig2");
    EXPECT_EQ(c.chain.n_sites, 6);
    EXPECT_NEAR(c.chain.delta_gamma(), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.chain.gamma(), 1.0, 1e-15);
    EXPECT_EQ(c.chain.detunings, std::vector<double>(6, 0.1));
    EXPECT_EQ(c.chain.gamma_unguided, 0.0);
    EXPECT_EQ(c.chain.rabi, 1.4);
    EXPECT_EQ(c.s_grid.size(), 61u);
    EXPECT_EQ(c.omega_grid.size(), 41u);
    EXPECT_EQ(c.provenance.at("chain.n_sites"), "published");
    EXPECT_EQ(c.provenance.at("grids.omega"), "choice");
    EXPECT_EQ(c.provenance.at("grids.s"), "choice");
}

TEST(Preset, Fig3Alternating) {
    const RunConfig c = preset("fig3");
    EXPECT_EQ(c.detuning_pattern, "alternating");
    EXPECT_EQ(c.chain.detunings, (std::vector<double>{0.1, -0.1, 0.1, -0.1, 0.1, -0.1}));
}

TEST(Preset, Fig4UnguidedGrid) {
    const RunConfig c = preset("fig4");
    EXPECT_EQ(c.chain.rabi, 1.4);
    ASSERT_EQ(c.gamma_unguided_grid.size(), 3u);
    EXPECT_NEAR(c.gamma_unguided_grid[2], 2.0 / 30.0, 1e-15);
    EXPECT_EQ(c.pattern_grid, (std::vector<std::string>{"uniform", "alternating"}));
    EXPECT_EQ(c.provenance.at("grids.gamma_unguided"), "choice");
    EXPECT_EQ(c.provenance.at("grids.gamma_unguided[2]"), "published");
}

TEST(Preset, UnknownListsKnown) {
    try {
        preset("fig5");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        for (const char* name : {"fig2", "fig3", "fig4"}) EXPECT_NE(msg.find(name), std::string::npos);
    }
}

TEST(Io, Sha256KnownVector) {
    EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Io, FloatFormatRoundTrips) {
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) {
        EXPECT_EQ(std::stod(io::fmt(v)), v);
        EXPECT_NE(io::fmt(v).find('e'), std::string::npos);
    }
    EXPECT_EQ(io::fmt(std::nan("")), "nan");
}

TEST(Io, RecordCsv) {
    PhotonRecord r;
    r.seed = 42;
    r.dt = 0.002;
    r.horizon = 10.0;
    r.channel_labels = {"L", "R", "U1"};
    r.events = {{0.5, 1}, {2.25, 2}};
    const io::ParsedCsv p = io::parse_csv(io::record_csv(r, "abc123"));
    EXPECT_EQ(p.header, (std::vector<std::string>{"time", "channel"}));
    ASSERT_EQ(p.rows.size(), 2u);
    EXPECT_EQ(std::stod(p.rows[0][0]), 0.5);
    EXPECT_EQ(p.rows[1][1], "U1");
    EXPECT_EQ(p.comments[0], "seed=42");
    EXPECT_EQ(std::stod(p.comments[1].substr(3)), 0.002);
    EXPECT_EQ(std::stod(p.comments[2].substr(2)), 10.0);
    EXPECT_EQ(p.comments[3], "config_hash=abc123");
}

TEST(Io, EmptyRecordCsvHasHeaderOnly) {
    PhotonRecord r;
    r.horizon = 1.0;
    const io::ParsedCsv p = io::parse_csv(io::record_csv(r, "h"));
    EXPECT_EQ(p.header.size(), 2u);
    EXPECT_TRUE(p.rows.empty());
}

TEST(Io, BinnedCsv) {
    BinnedSeries s;
    s.bin_start = {0.0, 5.0};
    s.left = {1, 0};
    s.right = {2, 3};
    s.unguided = {0, 1};
    const io::ParsedCsv p = io::parse_csv(io::binned_csv(s));
    EXPECT_EQ(p.header, (std::vector<std::string>{"t_bin_start", "count_L", "count_R", "count_U"}));
    EXPECT_EQ(p.rows[1], (std::vector<std::string>{io::fmt(5.0), "0", "3", "1"}));
}

TEST(Io, CsvTableRejectsRaggedRows) {
    io::CsvTable t({"a", "b"});
    EXPECT_THROW(t.add_row({"1"}), std::logic_error);
}
