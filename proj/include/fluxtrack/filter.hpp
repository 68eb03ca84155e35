#pragma once

#include <cstdint>
#include <vector>

#include "fluxtrack/fem.hpp"
#include "fluxtrack/fields.hpp"
#include "fluxtrack/mesh.hpp"
#include "fluxtrack/rng.hpp"

namespace fluxtrack {

// Proposal of the transition algorithm: draw s ~ U(0, st), build the
// rectangle whose top-right corner is (x + l1 dx, y + l2 dx) with
// l1 = s0 + s + r1, l2 = s0 + s + r2 and size (2 r1 dx, 2 r2 dx), then draw
// the new vertex uniformly from it.
struct TransitionParams {
    double s0 = 6.0, st = 5.0, r1 = 4.0, r2 = 4.0;
    double dx = 0.01;  // grid step the cell-denominated parameters refer to
};

struct Rect {
    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
};

Rect transition_rect(double x, double y, const TransitionParams& p, double s);

// Draws (s, u, v) from `rng` in that order; the result is clamped so the
// source square [x', x'+side] x [y'-side, y'] stays inside [0,1]^2.
std::pair<double, double> transition_sample(StreamRng& rng, double x, double y,
                                            const TransitionParams& p, double side);

// Gaussian log density of (y_obs - y_pred) under N(0, sigma^2 I), constant
// included. Throws on dimension mismatch.
double log_likelihood(const Vec& y_obs, const Vec& y_pred, double sigma);

// exp-normalize with max subtraction; throws "ensemble collapse" when no
// entry is finite.
std::vector<double> normalize_log_weights(const std::vector<double>& log_w);

// Offspring of systematic resampling for a given u1 in (0, 1/N]:
// U_i = u1 + (i-1)/N, N_j = |{U_i in (cum_{j-1}, cum_j]}| (last bucket
// absorbs any tail so the counts always sum to N). Indices ascend.
// n_out defaults to weights.size().
std::vector<int> systematic_resample(double u1, const std::vector<double>& weights, int n_out = 0);
std::vector<int> systematic_resample(StreamRng& rng, const std::vector<double>& weights, int n_out = 0);

struct Particle {
    double x = 0.0, y = 0.0;  // current square vertex
    FieldState field;
    double log_weight = 0.0;
};

struct ParticleEnsemble {
    std::vector<Particle> particles;
    int interval = 0;  // source intervals assimilated so far
    std::uint64_t seed = 0;
};

// Everything a particle needs to advance one source interval.
struct ForwardModel {
    const Mesh* mesh = nullptr;
    const SpMat* mass = nullptr;
    const Factorization* fact = nullptr;
    const FluxExtractor* flux = nullptr;
    int steps_per_interval = 10;
    double square_side = 0.06;
    double source_amplitude = 1250.0;
    TransitionParams transition;
    int threads = 1;  // 1 = serial reference path
};

struct IntervalEstimate {
    double mean_x = 0, mean_y = 0;  // posterior (weight-averaged) vertex
    double std_x = 0, std_y = 0;
    double ess = 0;  // effective sample size of the pre-resampling weights
};

struct TrajectoryEstimate {
    std::vector<IntervalEstimate> steps;                    // one per assimilated interval
    std::vector<std::vector<std::array<double, 3>>> dump;   // per interval: (weight, x, y) per particle
};

// One SIR update: propose (via the transition for propose_transition=true,
// otherwise keep each particle's current vertex — used for the first
// interval, whose square is pinned by the initial prior), advance each
// particle's field through the interval, weight by the flux likelihood,
// record the weighted estimate, then systematic-resample and reset the
// weights to 1/N. The particle loop runs over model.threads OpenMP threads;
// results are bitwise independent of the thread count.
IntervalEstimate sir_step(ParticleEnsemble& ens, const Vec& obs_k, double sigma,
                          const ForwardModel& model, bool propose_transition,
                          std::vector<std::array<double, 3>>* dump_rows = nullptr);

}  // namespace fluxtrack
