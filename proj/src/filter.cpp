#include "fluxtrack/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fluxtrack {

Rect transition_rect(double x, double y, const TransitionParams& p, double s) {
    const double l1 = p.s0 + s + p.r1;
    const double l2 = p.s0 + s + p.r2;
    Rect r;
    r.x_hi = x + l1 * p.dx;
    r.x_lo = r.x_hi - 2.0 * p.r1 * p.dx;
    r.y_hi = y + l2 * p.dx;
    r.y_lo = r.y_hi - 2.0 * p.r2 * p.dx;
    return r;
}

std::pair<double, double> transition_sample(StreamRng& rng, double x, double y,
                                            const TransitionParams& p, double side) {
    const double s = rng.uniform(0.0, p.st);
    const Rect r = transition_rect(x, y, p, s);
    double nx = rng.uniform(r.x_lo, r.x_hi);
    double ny = rng.uniform(r.y_lo, r.y_hi);
    nx = std::clamp(nx, 0.0, 1.0 - side);
    ny = std::clamp(ny, side, 1.0);
    return {nx, ny};
}

double log_likelihood(const Vec& y_obs, const Vec& y_pred, double sigma) {
    if (y_obs.size() != y_pred.size()) throw std::invalid_argument("log_likelihood: dimension mismatch");
    if (!(sigma > 0.0)) throw std::invalid_argument("log_likelihood: sigma must be positive");
    const double d = static_cast<double>(y_obs.size());
    const double sq = (y_obs - y_pred).squaredNorm();
    return -sq / (2.0 * sigma * sigma) - 0.5 * d * std::log(2.0 * 3.1415926535897932385 * sigma * sigma);
}

std::vector<double> normalize_log_weights(const std::vector<double>& log_w) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double lw : log_w)
        if (lw > mx) mx = lw;
    if (!std::isfinite(mx)) throw std::runtime_error("ensemble collapse");
    std::vector<double> w(log_w.size());
    double sum = 0.0;
    for (size_t i = 0; i < log_w.size(); ++i) {
        w[i] = std::exp(log_w[i] - mx);
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

std::vector<int> systematic_resample(double u1, const std::vector<double>& weights, int n_out) {
    const int m = static_cast<int>(weights.size());
    if (m == 0) throw std::invalid_argument("systematic_resample: empty weights");
    const int n = n_out > 0 ? n_out : m;
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("systematic_resample: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("systematic_resample: weights must sum to 1");
    std::vector<int> idx;
    idx.reserve(n);
    double cum = weights[0];
    int j = 0;
    for (int i = 0; i < n; ++i) {
        const double u = u1 + static_cast<double>(i) / n;
        while (u > cum && j < m - 1) {
            ++j;
            cum += weights[j];
        }
        idx.push_back(j);
    }
    return idx;
}

std::vector<int> systematic_resample(StreamRng& rng, const std::vector<double>& weights, int n_out) {
    const int n = n_out > 0 ? n_out : static_cast<int>(weights.size());
    const double u1 = rng.uniform01_open0() / n;  // (0, 1/N]
    return systematic_resample(u1, weights, n);
}

namespace {

struct ProposalResult {
    double x = 0, y = 0;
    double log_lik = 0;
    FieldState field;
};

ProposalResult advance_particle(const Particle& part, const Vec& obs_k, double sigma,
                                const ForwardModel& model, bool propose_transition,
                                std::uint64_t seed, int interval_index, int particle_index) {
    ProposalResult res;
    if (propose_transition) {
        StreamRng rng = StreamRng::substream(
            seed, {rng_stage::kTransition, static_cast<std::uint64_t>(interval_index),
                   static_cast<std::uint64_t>(particle_index)});
        auto [nx, ny] = transition_sample(rng, part.x, part.y, model.transition, model.square_side);
        res.x = nx;
        res.y = ny;
    } else {
        res.x = part.x;
        res.y = part.y;
    }
    SourceSquare sq;
    sq.x = res.x;
    sq.y = res.y;
    sq.side = model.square_side;
    sq.amplitude = model.source_amplitude;
    const Vec load = project_source(*model.mesh, sq);

    const int steps = model.steps_per_interval;
    const int records = model.flux->record_count();
    Vec predicted(static_cast<Eigen::Index>(records) * steps);
    FieldState state = part.field;
    for (int s = 0; s < steps; ++s) {
        FieldState next = step_backward_euler(state, *model.fact, *model.mass, load);
        predicted.segment(static_cast<Eigen::Index>(s) * records, records) =
            model.flux->step_flux(next.values, state.values, load);
        state = std::move(next);
    }
    res.log_lik = log_likelihood(obs_k, predicted, sigma);
    res.field = std::move(state);
    return res;
}

}  // namespace

IntervalEstimate sir_step(ParticleEnsemble& ens, const Vec& obs_k, double sigma,
                          const ForwardModel& model, bool propose_transition,
                          std::vector<std::array<double, 3>>* dump_rows) {
    const int n = static_cast<int>(ens.particles.size());
    if (n == 0) throw std::invalid_argument("sir_step: empty ensemble");
    const int k_new = ens.interval + 1;

    std::vector<ProposalResult> props(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(std::max(1, model.threads))
#endif
    for (int i = 0; i < n; ++i) {
        props[i] = advance_particle(ens.particles[i], obs_k, sigma, model,
                                    propose_transition, ens.seed, k_new, i);
    }

    std::vector<double> log_w(n);
    for (int i = 0; i < n; ++i) log_w[i] = ens.particles[i].log_weight + props[i].log_lik;
    const std::vector<double> w = normalize_log_weights(log_w);

    IntervalEstimate est;
    double wsq = 0.0;
    for (int i = 0; i < n; ++i) {
        est.mean_x += w[i] * props[i].x;
        est.mean_y += w[i] * props[i].y;
        wsq += w[i] * w[i];
    }
    for (int i = 0; i < n; ++i) {
        est.std_x += w[i] * (props[i].x - est.mean_x) * (props[i].x - est.mean_x);
        est.std_y += w[i] * (props[i].y - est.mean_y) * (props[i].y - est.mean_y);
    }
    est.std_x = std::sqrt(est.std_x);
    est.std_y = std::sqrt(est.std_y);
    est.ess = 1.0 / wsq;

    if (dump_rows) {
        dump_rows->clear();
        dump_rows->reserve(n);
        for (int i = 0; i < n; ++i) dump_rows->push_back({w[i], props[i].x, props[i].y});
    }

    StreamRng rrng = StreamRng::substream(
        ens.seed, {rng_stage::kResample, static_cast<std::uint64_t>(k_new)});
    const std::vector<int> idx = systematic_resample(rrng, w);

    std::vector<Particle> next;
    next.reserve(n);
    const double uniform_logw = -std::log(static_cast<double>(n));
    for (int i = 0; i < n; ++i) {
        const ProposalResult& src = props[idx[i]];
        Particle p;
        p.x = src.x;
        p.y = src.y;
        p.field = src.field;  // duplicated parents share identical snapshots
        p.log_weight = uniform_logw;
        next.push_back(std::move(p));
    }
    ens.particles = std::move(next);
    ens.interval = k_new;
    return est;
}

}  // namespace fluxtrack
