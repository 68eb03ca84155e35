// Times one SIR interval of the exp1 preset: serial reference vs the
// OpenMP particle map, and checks the two produce identical ensembles.
#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fluxtrack/harness.hpp"

using namespace fluxtrack;

namespace {

double time_interval(const ExperimentConfig& c, const ModelBundle& model,
                     const ObservationSet& obs, int threads, ParticleEnsemble* out) {
    ParticleEnsemble ens;
    ens.seed = c.seed;
    ens.particles.resize(c.particles);
    for (auto& p : ens.particles) {
        p.x = 0.12;
        p.y = 0.12;
        p.field = zero_state(model.mesh);
        p.log_weight = -std::log(static_cast<double>(c.particles));
    }
    const ForwardModel fm = model.forward(c, threads);
    const auto t0 = std::chrono::steady_clock::now();
    sir_step(ens, obs.y[0], obs.sigma, fm, false, nullptr);
    sir_step(ens, obs.y[1], obs.sigma, fm, true, nullptr);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out) *out = std::move(ens);
    return dt;
}

bool identical(const ParticleEnsemble& a, const ParticleEnsemble& b) {
    if (a.particles.size() != b.particles.size()) return false;
    for (size_t i = 0; i < a.particles.size(); ++i) {
        const auto& p = a.particles[i];
        const auto& q = b.particles[i];
        if (std::memcmp(&p.x, &q.x, sizeof(double)) || std::memcmp(&p.y, &q.y, sizeof(double)))
            return false;
        if (p.field.values.size() != q.field.values.size()) return false;
        if (std::memcmp(p.field.values.data(), q.field.values.data(),
                        sizeof(double) * p.field.values.size()))
            return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    int particles = 320;
    if (argc > 1) particles = std::atoi(argv[1]);

    ExperimentConfig c = preset("exp1-multifreq");
    c.particles = particles;
    std::printf("building model (mesh %dx%d, %d particles)...\n", c.nx, c.ny, c.particles);
    ModelBundle model = build_model(c);
    TruthRecord truth = generate_truth(c, model);

    ParticleEnsemble serial_ens, parallel_ens;
    const double t_serial = time_interval(c, model, truth.observations, 1, &serial_ens);
    std::printf("%-28s %8.3f s\n", "serial reference (1 thread)", t_serial);

#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif
    for (int t = 2; t <= max_threads; t *= 2) {
        const double dt = time_interval(c, model, truth.observations, t, &parallel_ens);
        std::printf("%-25s %2d %8.3f s   speedup %.2fx   bitwise %s\n", "openmp particle map,", t,
                    dt, t_serial / dt, identical(serial_ens, parallel_ens) ? "identical" : "DIFFERS");
    }
    if (max_threads < 2) std::printf("(single hardware thread: no parallel comparison)\n");
    return 0;
}
