// dynamics.hpp - master-equation integration, photocurrents and quantum-jump
// photon emission records.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "chiral_fcs/chain_model.hpp"
#include "chiral_fcs/parallel.hpp"
#include "chiral_fcs/tensor_core.hpp"

namespace chiral_fcs {

// ---------------------------------------------------------------------------
// Deterministic evolution
// ---------------------------------------------------------------------------

struct IntegrationOptions {
    double max_step = 0.005;      ///< in units of 1/gamma
    double trace_tolerance = 1e-8;
};

/// rho(t) on t_grid with classical RK4. t_grid[0] is the time of rho0.
inline std::vector<DensityMatrix> integrate_master_equation(const GeneratorSpec& spec, const DensityMatrix& rho0,
                                                            const std::vector<double>& t_grid,
                                                            const IntegrationOptions& opt = {}) {
    check_operator(spec.space(), rho0, "integrate_master_equation");
    if (t_grid.empty()) return {};
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) {
            throw std::invalid_argument("integrate_master_equation: t_grid must be increasing");
        }
    }
    const double gamma = spec.params().gamma() > 0.0 ? spec.params().gamma() : 1.0;
    const double hmax = opt.max_step / gamma;
    const double tr0 = rho0.trace().real();

    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    DensityMatrix rho = hermitian_part(rho0);
    out.push_back(rho);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double span = t_grid[i] - t_grid[i - 1];
        const auto nsteps = static_cast<long>(std::ceil(span / hmax - 1e-12));
        const double h = span / static_cast<double>(nsteps);
        for (long n = 0; n < nsteps; ++n) {
            const Matrix k1 = apply_generator(spec, rho);
            const Matrix k2 = apply_generator(spec, rho + 0.5 * h * k1);
            const Matrix k3 = apply_generator(spec, rho + 0.5 * h * k2);
            const Matrix k4 = apply_generator(spec, rho + h * k3);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        rho = hermitian_part(rho);
        const double drift = std::abs(rho.trace().real() - tr0);
        if (drift > opt.trace_tolerance) {
            throw std::runtime_error("integrate_master_equation: trace drift " + std::to_string(drift) +
                                     " exceeds tolerance; use a smaller max_step");
        }
        out.push_back(rho);
    }
    return out;
}

struct Photocurrent {
    double guided = 0.0;
    double unguided = 0.0;
};

/// I(t) = sum_guided gamma_c Tr[chi_c^dag chi_c rho(t)]; unguided emission reported separately.
inline Photocurrent photocurrent(const GeneratorSpec& spec, const DensityMatrix& rho) {
    return Photocurrent{spec.guided_emission_rate(rho), spec.unguided_emission_rate(rho)};
}

// ---------------------------------------------------------------------------
// Quantum-jump trajectories
// ---------------------------------------------------------------------------

struct PhotonEvent {
    double time;
    int channel;  ///< index into PhotonRecord::channel_labels
};

struct PhotonRecord {
    std::uint64_t seed = 0;
    double dt = 0.0;
    double horizon = 0.0;
    std::vector<std::string> channel_labels;
    std::vector<PhotonEvent> events;

    std::size_t count(int channel) const {
        return static_cast<std::size_t>(std::count_if(events.begin(), events.end(),
                                                      [&](const PhotonEvent& e) { return e.channel == channel; }));
    }
};

/// Which channel groups are counted.
struct ChannelSet {
    bool left = true;
    bool right = true;
    bool unguided = false;

    static ChannelSet guided() { return {}; }
    static ChannelSet all() { return {true, true, true}; }

    bool contains(const std::string& label) const {
        if (label == "L") return left;
        if (label == "R") return right;
        return unguided && !label.empty() && label[0] == 'U';
    }
};

struct TrajectoryConfig {
    double dt = 0.002;       ///< units of 1/gamma
    double horizon = 600.0;  ///< units of 1/gamma
    std::uint64_t seed = 0;
    std::optional<Vector> initial_state;            ///< default: all atoms in |g>
    std::optional<DensityMatrix> initial_mixture;   ///< if set, the start is sampled from its eigen-ensemble

    void validate(const GeneratorSpec& spec) const {
        const double scale = std::max(spec.params().gamma() + spec.params().gamma_unguided, 1e-300);
        if (!(dt > 0.0) || dt > 0.01 / scale * (1.0 + 1e-12)) {
            throw std::invalid_argument("TrajectoryConfig: dt must be in (0, 0.01/gamma]");
        }
        if (!(horizon >= 100.0 * dt * (1.0 - 1e-12))) {
            throw std::invalid_argument("TrajectoryConfig: horizon must be at least 100 dt");
        }
        if (initial_state && initial_state->size() != spec.dim()) {
            throw std::invalid_argument("TrajectoryConfig: initial_state has the wrong dimension");
        }
        if (initial_mixture) check_operator(spec.space(), *initial_mixture, "TrajectoryConfig.initial_mixture");
    }
};

/// Independent stream for trajectory `index` of an ensemble with master seed `seed`.
inline std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

/// Optional state sampling along a trajectory: states after the steps closest to `times`.
struct TrajectorySamples {
    std::vector<double> times;
    std::vector<Vector> states;  ///< normalized, filled by run_trajectory
};

namespace detail {

inline Vector sample_from_mixture(const DensityMatrix& rho, std::mt19937_64& rng) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho));
    const Eigen::VectorXd p = es.eigenvalues().cwiseMax(0.0);
    std::uniform_real_distribution<double> u(0.0, p.sum());
    double x = u(rng);
    Eigen::Index pick = p.size() - 1;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (x < p(i)) {
            pick = i;
            break;
        }
        x -= p(i);
    }
    return es.eigenvectors().col(pick);
}

}  // namespace detail

/// Wavefunction Monte Carlo unravelling of the generator. Between jumps the
/// unnormalized state evolves with exp(-i Heff dt); a jump occurs when the
/// squared norm falls below a uniform threshold, its time refined by linear
/// interpolation of the squared norm inside the step.
inline PhotonRecord run_trajectory(const GeneratorSpec& spec, const TrajectoryConfig& cfg,
                                   TrajectorySamples* samples = nullptr) {
    cfg.validate(spec);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const Matrix propagator = (Matrix(-kI * spec.effective_hamiltonian()) * cfg.dt).exp();
    const auto& channels = spec.channels();

    PhotonRecord rec;
    rec.seed = cfg.seed;
    rec.dt = cfg.dt;
    rec.horizon = cfg.horizon;
    for (const auto& c : channels) rec.channel_labels.push_back(c.label);

    Vector psi;
    if (cfg.initial_mixture) {
        psi = detail::sample_from_mixture(*cfg.initial_mixture, rng);
    } else if (cfg.initial_state) {
        psi = *cfg.initial_state;
    } else {
        psi = all_ground_state(spec.space());
    }
    psi /= psi.norm();

    std::vector<long> sample_steps;
    if (samples) {
        samples->states.clear();
        for (double t : samples->times) sample_steps.push_back(std::lround(t / cfg.dt));
    }
    std::size_t next_sample = 0;
    auto take_samples = [&](long step, const Vector& state) {
        while (samples && next_sample < sample_steps.size() && sample_steps[next_sample] <= step) {
            samples->states.push_back(state / state.norm());
            ++next_sample;
        }
    };
    take_samples(0, psi);

    const auto nsteps = static_cast<long>(std::llround(cfg.horizon / cfg.dt));
    double threshold = uniform(rng);
    double norm2 = 1.0;
    std::vector<double> weights(channels.size());
    for (long n = 0; n < nsteps; ++n) {
        const double t0 = static_cast<double>(n) * cfg.dt;
        Vector next = propagator * psi;
        const double next_norm2 = next.squaredNorm();
        if ((norm2 - next_norm2) / norm2 > 0.1) {
            throw std::runtime_error("run_trajectory: norm dropped by more than 10% in one step; reduce dt");
        }
        if (next_norm2 < threshold) {
            const double frac = (norm2 - threshold) / (norm2 - next_norm2);
            const double tj = std::min(t0 + frac * cfg.dt, cfg.horizon);
            double total = 0.0;
            for (std::size_t c = 0; c < channels.size(); ++c) {
                weights[c] = channels[c].rate * (channels[c].sparse * next).squaredNorm();
                total += weights[c];
            }
            if (total > 0.0) {
                double x = uniform(rng) * total;
                std::size_t pick = channels.size() - 1;
                for (std::size_t c = 0; c < channels.size(); ++c) {
                    if (x < weights[c]) {
                        pick = c;
                        break;
                    }
                    x -= weights[c];
                }
                next = channels[pick].sparse * next;
                rec.events.push_back(PhotonEvent{tj, static_cast<int>(pick)});
            }
            next /= next.norm();
            norm2 = 1.0;
            threshold = uniform(rng);
        } else {
            norm2 = next_norm2;
        }
        psi = std::move(next);
        take_samples(n + 1, psi);
    }
    return rec;
}

/// `count` trajectories with streams derived from (cfg.seed, index), merged by index.
inline std::vector<PhotonRecord> run_trajectories(const GeneratorSpec& spec, const TrajectoryConfig& cfg,
                                                  std::size_t count, int workers = 1) {
    std::vector<PhotonRecord> out(count);
    parallel_for(count, workers, [&](std::size_t i) {
        TrajectoryConfig c = cfg;
        c.seed = trajectory_seed(cfg.seed, i);
        out[i] = run_trajectory(spec, c);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Record analysis
// ---------------------------------------------------------------------------

/// Counts of the selected channels per bin of width `bin_width` over [0, T].
inline std::vector<int> binned_counts(const PhotonRecord& rec, double bin_width, ChannelSet channels = {}) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("binned_counts: bin_width must be > 0");
    const auto nbins = static_cast<std::size_t>(std::max(1.0, std::ceil(rec.horizon / bin_width - 1e-12)));
    std::vector<int> counts(nbins, 0);
    for (const auto& e : rec.events) {
        if (!channels.contains(rec.channel_labels.at(static_cast<std::size_t>(e.channel)))) continue;
        const auto b = std::min(nbins - 1, static_cast<std::size_t>(e.time / bin_width));
        ++counts[b];
    }
    return counts;
}

struct BinnedSeries {
    double bin_width = 0.0;
    std::vector<double> bin_start;
    std::vector<int> left, right, unguided;
};

inline BinnedSeries binned_series(const PhotonRecord& rec, double bin_width) {
    BinnedSeries s;
    s.bin_width = bin_width;
    s.left = binned_counts(rec, bin_width, {true, false, false});
    s.right = binned_counts(rec, bin_width, {false, true, false});
    s.unguided = binned_counts(rec, bin_width, {false, false, true});
    for (std::size_t i = 0; i < s.left.size(); ++i) s.bin_start.push_back(static_cast<double>(i) * bin_width);
    return s;
}

inline std::size_t longest_zero_run(const std::vector<int>& counts) {
    std::size_t best = 0, run = 0;
    for (int c : counts) {
        run = (c == 0) ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

struct EmpiricalCumulants {
    double mean_rate = 0.0;
    double variance_rate = 0.0;
    double mean_rate_se = 0.0;
    double variance_rate_se = 0.0;
    std::size_t n_records = 0;
};

/// Mean and variance of the photon count K over records, divided by T.
inline EmpiricalCumulants empirical_cumulants(const std::vector<PhotonRecord>& records, ChannelSet channels = {}) {
    if (records.size() < 2) throw std::invalid_argument("empirical_cumulants: need at least two records");
    const double horizon = records.front().horizon;
    std::vector<double> k;
    k.reserve(records.size());
    for (const auto& r : records) {
        if (std::abs(r.horizon - horizon) > 1e-12 * std::max(1.0, horizon)) {
            throw std::invalid_argument("empirical_cumulants: records must share a horizon");
        }
        double c = 0;
        for (const auto& e : r.events) {
            if (channels.contains(r.channel_labels.at(static_cast<std::size_t>(e.channel)))) c += 1.0;
        }
        k.push_back(c);
    }
    const auto n = static_cast<double>(k.size());
    double mean = 0.0;
    for (double v : k) mean += v;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : k) {
        const double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double var = m2 / (n - 1.0);
    m4 /= n;
    const double pop_var = m2 / n;

    EmpiricalCumulants out;
    out.n_records = k.size();
    out.mean_rate = mean / horizon;
    out.variance_rate = var / horizon;
    out.mean_rate_se = std::sqrt(var / n) / horizon;
    out.variance_rate_se = std::sqrt(std::max(0.0, m4 - pop_var * pop_var) / n) / horizon;
    return out;
}

/// Window of a record, times relative to the record origin.
struct RecordSegment {
    double start = 0.0;
    double length = 0.0;
    double rate = 0.0;
    std::vector<PhotonEvent> events;
};

/// Approximate s-conditioned records: cut an unbiased record into windows and
/// keep the fraction of windows whose count rate is closest to `target_rate`
/// (e.g. k(s) from the spectral solver). This is a selection surrogate, not
/// sampling of the tilted dynamics.
inline std::vector<RecordSegment> select_segments_by_rate(const PhotonRecord& rec, double segment_length,
                                                          double target_rate, double keep_fraction,
                                                          ChannelSet channels = {}) {
    if (!(segment_length > 0.0)) throw std::invalid_argument("select_segments_by_rate: segment_length must be > 0");
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
        throw std::invalid_argument("select_segments_by_rate: keep_fraction must be in (0, 1]");
    }
    const auto nseg = static_cast<std::size_t>(rec.horizon / segment_length);
    std::vector<RecordSegment> segs(nseg);
    for (std::size_t i = 0; i < nseg; ++i) {
        segs[i].start = static_cast<double>(i) * segment_length;
        segs[i].length = segment_length;
    }
    for (const auto& e : rec.events) {
        const auto i = static_cast<std::size_t>(e.time / segment_length);
        if (i >= nseg) continue;
        segs[i].events.push_back(e);
    }
    for (auto& s : segs) {
        const auto n = std::count_if(s.events.begin(), s.events.end(), [&](const PhotonEvent& e) {
            return channels.contains(rec.channel_labels.at(static_cast<std::size_t>(e.channel)));
        });
        s.rate = static_cast<double>(n) / segment_length;
    }
    std::stable_sort(segs.begin(), segs.end(), [&](const RecordSegment& a, const RecordSegment& b) {
        return std::abs(a.rate - target_rate) < std::abs(b.rate - target_rate);
    });
    const auto keep = static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(nseg)));
    segs.resize(std::min(keep, segs.size()));
    std::sort(segs.begin(), segs.end(), [](const RecordSegment& a, const RecordSegment& b) { return a.start < b.start; });
    return segs;
}

}  // namespace chiral_fcs
