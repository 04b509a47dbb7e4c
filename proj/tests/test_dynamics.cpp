#include <gtest/gtest.h>

#include <set>

#include "chiral_fcs/dynamics.hpp"
#include "chiral_fcs/spectral.hpp"
#include "test_support.hpp"

using namespace chiral_fcs;

namespace {

GeneratorSpec single_atom(double rabi, double delta = 0.0) {
    return GeneratorSpec(make_chain(1, rabi, 0.0, uniform_detuning(1, delta)), GeneratorForm::commensurate);
}

PhotonRecord manual_record(std::vector<PhotonEvent> events, double horizon) {
    PhotonRecord r;
    r.dt = 0.002;
    r.horizon = horizon;
    r.channel_labels = {"L", "R", "U1"};
    r.events = std::move(events);
    return r;
}

}  // namespace

TEST(MasterEquation, FreeDecay) {
    const GeneratorSpec spec = single_atom(0.0);
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(1, 1) = 1.0;
    const std::vector<double> t = {0.0, 0.5, 1.0, 3.0};
    const auto out = integrate_master_equation(spec, rho0, t);
    ASSERT_EQ(out.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_NEAR(out[i](1, 1).real(), std::exp(-t[i]), 1e-10);
        EXPECT_NEAR(photocurrent(spec, out[i]).guided, std::exp(-t[i]), 1e-10);
    }
}

TEST(MasterEquation, RelaxesToSteadyState) {
    const GeneratorSpec spec = single_atom(0.5);
    const Matrix rho0 = projector(all_ground_state(spec.space()));
    const auto out = integrate_master_equation(spec, rho0, {0.0, 60.0});
    const Matrix oracle = chiral_fcs::testing::single_atom_steady_state(0.5, 0.0, 1.0);
    EXPECT_LT((out.back() - oracle).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(MasterEquation, MatchesDenseExponential) {
    std::mt19937_64 rng(301);
    const GeneratorSpec spec(make_chain(2, 0.9, 0.4, {0.1, -0.2}, 0.05), GeneratorForm::general);
    const Matrix rho0 = chiral_fcs::testing::random_density(4, rng);
    const auto out = integrate_master_equation(spec, rho0, {0.0, 2.0});
    const Matrix l = tilted_superoperator(spec, Tilt{});
    const Matrix exact = devectorize(Matrix((l * 2.0).exp()) * vectorize(rho0), 4);
    EXPECT_LT((out.back() - exact).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(out.back().trace().real(), 1.0, 1e-12);
    EXPECT_LT(hermitian_deviation(out.back()), 1e-15);
}

TEST(MasterEquation, InvalidInput) {
    const GeneratorSpec spec = single_atom(0.5);
    const Matrix rho0 = projector(all_ground_state(spec.space()));
    EXPECT_THROW(integrate_master_equation(spec, rho0, {0.0, 1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(integrate_master_equation(spec, Matrix::Identity(4, 4), {0.0}), std::invalid_argument);
    EXPECT_TRUE(integrate_master_equation(spec, rho0, {}).empty());
}

TEST(Trajectory, ConfigValidation) {
    const GeneratorSpec spec = single_atom(0.5);
    TrajectoryConfig cfg;
    cfg.dt = 0.02;
    EXPECT_THROW(run_trajectory(spec, cfg), std::invalid_argument);
    cfg.dt = 0.002;
    cfg.horizon = 0.1;
    EXPECT_THROW(run_trajectory(spec, cfg), std::invalid_argument);
    cfg.horizon = 10.0;
    cfg.initial_state = Vector::Ones(4);
    EXPECT_THROW(run_trajectory(spec, cfg), std::invalid_argument);
}

TEST(Trajectory, NoDriveFromGroundIsEmpty) {
    const GeneratorSpec spec(make_chain(3, 0.0, 0.5, uniform_detuning(3, 0.1)), GeneratorForm::general);
    TrajectoryConfig cfg;
    cfg.horizon = 20.0;
    const PhotonRecord r = run_trajectory(spec, cfg);
    EXPECT_TRUE(r.events.empty());
    EXPECT_EQ(r.channel_labels, (std::vector<std::string>{"L", "R"}));
    const auto recs = run_trajectories(spec, cfg, 3);
    const EmpiricalCumulants c = empirical_cumulants(recs);
    EXPECT_EQ(c.mean_rate, 0.0);
    EXPECT_EQ(c.variance_rate, 0.0);
}

TEST(Trajectory, BitwiseReproducibleAndWorkerIndependent) {
    const GeneratorSpec spec(make_chain(2, 1.0, 0.5, uniform_detuning(2, 0.1), 0.05), GeneratorForm::general);
    TrajectoryConfig cfg;
    cfg.horizon = 30.0;
    cfg.seed = 77;
    const auto a = run_trajectories(spec, cfg, 6, 1);
    const auto b = run_trajectories(spec, cfg, 6, 3);
    ASSERT_EQ(a.size(), b.size());
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < a.size(); ++i) {
        seeds.insert(a[i].seed);
        EXPECT_EQ(a[i].seed, b[i].seed);
        ASSERT_EQ(a[i].events.size(), b[i].events.size());
        for (std::size_t e = 0; e < a[i].events.size(); ++e) {
            EXPECT_EQ(a[i].events[e].time, b[i].events[e].time);
            EXPECT_EQ(a[i].events[e].channel, b[i].events[e].channel);
        }
    }
    EXPECT_EQ(seeds.size(), a.size());
    EXPECT_NE(trajectory_seed(1, 0), trajectory_seed(0, 1));
}

TEST(Trajectory, EventsOrderedWithinHorizon) {
    const GeneratorSpec spec(make_chain(2, 1.0, 0.5, uniform_detuning(2, 0.1), 0.05), GeneratorForm::general);
    TrajectoryConfig cfg;
    cfg.horizon = 50.0;
    cfg.seed = 5;
    const PhotonRecord r = run_trajectory(spec, cfg);
    ASSERT_FALSE(r.events.empty());
    for (std::size_t i = 0; i < r.events.size(); ++i) {
        EXPECT_GE(r.events[i].time, 0.0);
        EXPECT_LE(r.events[i].time, cfg.horizon);
        if (i > 0) EXPECT_GE(r.events[i].time, r.events[i - 1].time);
    }
}

// Oracle: an undriven excited atom emits exactly once, at an Exp(gamma) time.
TEST(Trajectory, SingleEmissionWaitingTime) {
    const GeneratorSpec spec = single_atom(0.0);
    TrajectoryConfig cfg;
    cfg.horizon = 30.0;
    cfg.seed = 11;
    Vector excited = Vector::Zero(2);
    excited(1) = 1.0;
    cfg.initial_state = excited;
    const auto recs = run_trajectories(spec, cfg, 2000);
    double mean = 0.0;
    for (const auto& r : recs) {
        ASSERT_EQ(r.events.size(), 1u);
        mean += r.events[0].time;
    }
    mean /= static_cast<double>(recs.size());
    EXPECT_NEAR(mean, 1.0, 3.0 / std::sqrt(2000.0));
}

TEST(Trajectory, SingleAtomMeanRateMatchesSpectral) {
    const GeneratorSpec spec = single_atom(0.5);
    TrajectoryConfig cfg;
    cfg.horizon = 200.0;
    cfg.seed = 3;
    cfg.initial_mixture = chiral_fcs::testing::single_atom_steady_state(0.5, 0.0, 1.0);
    const EmpiricalCumulants c = empirical_cumulants(run_trajectories(spec, cfg, 200));
    EXPECT_NEAR(c.mean_rate, 1.0 / 3.0, 3.0 * c.mean_rate_se);
    EXPECT_NEAR(c.variance_rate, 1.0 / 9.0, 5.0 * c.variance_rate_se);
}

TEST(Trajectory, WeakDriveIsPoissonian) {
    const GeneratorSpec spec = single_atom(0.05);
    TrajectoryConfig cfg;
    cfg.dt = 0.005;
    cfg.horizon = 400.0;
    cfg.seed = 4;
    const EmpiricalCumulants c = empirical_cumulants(run_trajectories(spec, cfg, 300));
    EXPECT_NEAR(c.variance_rate / c.mean_rate, 1.0, 0.25);
}

TEST(Trajectory, LeftChannelRate) {
    const GeneratorSpec spec(make_chain(2, 0.8, 0.5, uniform_detuning(2, 0.1)), GeneratorForm::general);
    const SpectralResult ss = dominant_eigenpair(spec, Tilt{});
    const JumpChannel& left = spec.channels()[0];
    ASSERT_EQ(left.label, "L");
    const double expected = left.rate * (left.op.adjoint() * left.op * ss.rho_right).trace().real();
    TrajectoryConfig cfg;
    cfg.horizon = 200.0;
    cfg.seed = 8;
    cfg.initial_mixture = ss.rho_right;
    const EmpiricalCumulants c = empirical_cumulants(run_trajectories(spec, cfg, 200), {true, false, false});
    EXPECT_NEAR(c.mean_rate, expected, 3.0 * c.mean_rate_se);
}

// Ensemble average of |psi><psi| against the master equation at fixed times.
TEST(Trajectory, EnsembleAverageMatchesMasterEquation) {
    const GeneratorSpec spec(make_chain(2, 1.0, 0.5, {0.1, -0.1}, 0.1), GeneratorForm::general);
    const std::vector<double> times = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0};
    const auto me = integrate_master_equation(spec, projector(all_ground_state(spec.space())), times);
    const std::size_t ntraj = 2000;
    std::vector<std::vector<Vector>> states(ntraj);
    parallel_for(ntraj, 1, [&](std::size_t i) {
        TrajectoryConfig cfg;
        cfg.horizon = 5.0;
        cfg.seed = trajectory_seed(99, i);
        TrajectorySamples s;
        s.times = times;
        run_trajectory(spec, cfg, &s);
        states[i] = s.states;
    });
    int checked = 0, inside = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (Eigen::Index d = 0; d < spec.dim(); ++d) {
            double mean = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < ntraj; ++i) {
                const double p = std::norm(states[i][k](d));
                mean += p;
                m2 += p * p;
            }
            mean /= ntraj;
            const double var = std::max(m2 / ntraj - mean * mean, 1e-12);
            ++checked;
            if (std::abs(mean - me[k](d, d).real()) <= 3.0 * std::sqrt(var / ntraj) + 1e-9) ++inside;
        }
    }
    EXPECT_GE(inside, static_cast<int>(std::ceil(0.95 * checked)));
}

TEST(RecordAnalysis, BinnedCounts) {
    const PhotonRecord r = manual_record({{0.1, 0}, {0.2, 1}, {0.7, 2}, {2.5, 0}, {3.0, 1}}, 3.0);
    EXPECT_EQ(binned_counts(r, 1.0), (std::vector<int>{2, 0, 2}));
    EXPECT_EQ(binned_counts(r, 1.0, ChannelSet::all()), (std::vector<int>{3, 0, 2}));
    const BinnedSeries s = binned_series(r, 1.0);
    EXPECT_EQ(s.left, (std::vector<int>{1, 0, 1}));
    EXPECT_EQ(s.right, (std::vector<int>{1, 0, 1}));
    EXPECT_EQ(s.unguided, (std::vector<int>{1, 0, 0}));
    EXPECT_EQ(s.bin_start, (std::vector<double>{0.0, 1.0, 2.0}));
    EXPECT_THROW(binned_counts(r, 0.0), std::invalid_argument);
}

TEST(RecordAnalysis, EmptyRecord) {
    const PhotonRecord r = manual_record({}, 10.0);
    const auto c = binned_counts(r, 2.5);
    EXPECT_EQ(c, (std::vector<int>(4, 0)));
    EXPECT_EQ(longest_zero_run(c), 4u);
}

TEST(RecordAnalysis, LongestZeroRun) {
    EXPECT_EQ(longest_zero_run({1, 0, 0, 3, 0, 0, 0, 2}), 3u);
    EXPECT_EQ(longest_zero_run({}), 0u);
}

TEST(RecordAnalysis, CumulantsNeedTwoRecords) {
    EXPECT_THROW(empirical_cumulants({manual_record({}, 1.0)}), std::invalid_argument);
    EXPECT_THROW(empirical_cumulants({manual_record({}, 1.0), manual_record({}, 2.0)}), std::invalid_argument);
}

TEST(RecordAnalysis, CumulantsOfKnownCounts) {
    const auto c = empirical_cumulants(
        {manual_record({{0.1, 0}}, 2.0), manual_record({{0.1, 0}, {0.2, 1}, {0.3, 1}}, 2.0)});
    EXPECT_DOUBLE_EQ(c.mean_rate, 1.0);
    EXPECT_DOUBLE_EQ(c.variance_rate, 1.0);
}

TEST(RecordAnalysis, SegmentSelection) {
    std::vector<PhotonEvent> ev;
    for (int i = 0; i < 10; ++i) ev.push_back({0.05 + 0.09 * i, 0});  // 10 photons in [0,1)
    ev.push_back({1.5, 1});                                         // 1 photon in [1,2)
    const PhotonRecord r = manual_record(ev, 4.0);
    const auto low = select_segments_by_rate(r, 1.0, 0.0, 0.5);
    ASSERT_EQ(low.size(), 2u);
    EXPECT_EQ(low[0].start, 2.0);
    EXPECT_EQ(low[1].start, 3.0);
    const auto high = select_segments_by_rate(r, 1.0, 10.0, 0.25);
    ASSERT_EQ(high.size(), 1u);
    EXPECT_EQ(high[0].start, 0.0);
    EXPECT_EQ(high[0].events.size(), 10u);
    EXPECT_THROW(select_segments_by_rate(r, 1.0, 0.0, 0.0), std::invalid_argument);
}
