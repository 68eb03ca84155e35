#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fluxtrack/harness.hpp"
#include "fluxtrack/spectral.hpp"

namespace fluxtrack {

namespace {

struct CheckLog {
    int failures = 0;
    void result(const char* name, bool pass, const std::string& detail) {
        std::printf("[%s] %-32s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
        if (!pass) ++failures;
    }
    void skip(const char* name, const std::string& why) {
        std::printf("[SKIP] %-32s %s\n", name, why.c_str());
        ++failures;
    }
};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

int validate_suite(const ValidateOptions& opt) {
    CheckLog log;

    // Conservation and shape checks on the production mesh.
    const Mesh mesh = build_mesh(100, 100);
    const SpMat mass = assemble_mass(mesh);
    {
        const double total = Vec::Ones(mesh.node_count()).dot(mass * Vec::Ones(mesh.node_count()));
        log.result("mass total = |domain|", std::abs(total - 1.0) <= 1e-12,
                   "sum = " + num(total));
    }
    {
        const SpMat stiff = assemble_stiffness(mesh, kappa1_eval, {});
        Vec r = stiff * Vec::Ones(mesh.node_count());
        double mx = 0.0;
        for (int n : mesh.interior_nodes) mx = std::max(mx, std::abs(r[n]));
        log.result("stiffness annihilates constants", mx <= 1e-12, "max interior row sum = " + num(mx));
    }
    {
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i <= 100; ++i)
            for (int j = 0; j <= 100; ++j) {
                const double v = kappa1_eval(i * 0.01, j * 0.01);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        const bool ok = std::abs(lo - 0.0521) <= 5e-4 && std::abs(hi - 0.3978) <= 5e-4;
        log.result("kappa1 extrema", ok, "min = " + num(lo) + ", max = " + num(hi));
    }
    {
        SourceSquare sq{0.37, 0.55};
        const Vec b = project_source(mesh, sq);
        log.result("source load total = 4.5", std::abs(b.sum() - 4.5) <= 1e-9, "sum = " + num(b.sum()));
    }

    // FEM vs spectral oracle, constant kappa, trajectory 1.
    {
        ExperimentConfig c = preset("exp1-multifreq");
        c.permeability.kind = PermeabilityKind::Constant;
        c.permeability.constant = 0.1;
        ModelBundle model = build_model(c);
        if (opt.perturb_stiffness != 0.0) {
            model.stiffness = model.stiffness * (1.0 + opt.perturb_stiffness);
            model.fact = std::make_unique<Factorization>(model.mesh, model.mass, model.stiffness, c.dt);
            model.flux = std::make_unique<FluxExtractor>(model.mesh, model.mass, model.stiffness,
                                                         c.dt, c.segments, c.flux_kind, model.kappa);
        }
        TruthRecord truth = generate_truth(c, model);

        // solution at T
        FieldState state = zero_state(model.mesh);
        for (int k = 0; k < c.K; ++k) {
            const Vec load = project_source(model.mesh, model.truth.squares[k]);
            for (int s = 0; s < c.steps_per_interval(); ++s)
                state = step_backward_euler(state, *model.fact, model.mass, load);
        }
        const int trunc = 200;  // converged reference for this source class
        const Vec uspec = spectral_solution_grid(model.truth, trunc, 0.1, c.T, model.mesh);
        const Vec diff = state.values - uspec;
        const double rel = std::sqrt(diff.dot(model.mass * diff) / uspec.dot(model.mass * uspec));
        log.result("FEM vs oracle solution <= 1%", rel <= 0.01, "rel L2 = " + num(rel));

        double num2 = 0.0, den2 = 0.0;
        const int steps = c.steps_per_interval();
        const int records = model.flux->record_count();
        for (int k = 0; k < c.K; ++k) {
            for (int s = 0; s < steps; ++s) {
                const double t = (k * steps + s + 1) * c.dt;
                int at = s * records;
                for (size_t seg = 0; seg < c.segments.size(); ++seg) {
                    const auto& nodes = model.flux->segment_node_ids(static_cast<int>(seg));
                    std::vector<double> coords;
                    for (int n : nodes) coords.push_back(model.mesh.edge_coordinate(c.segments[seg].edge, n));
                    const Vec sf = spectral_flux_profile(model.truth, trunc, 0.1, t, c.segments[seg].edge, coords);
                    for (Eigen::Index i = 0; i < sf.size(); ++i) {
                        const double f = truth.noiseless[k][at + i];
                        num2 += (f - sf[i]) * (f - sf[i]);
                        den2 += sf[i] * sf[i];
                    }
                    at += static_cast<int>(nodes.size());
                }
            }
        }
        const double relf = std::sqrt(num2 / den2);
        log.result("FEM vs oracle flux <= 2%", relf <= 0.02, "rel l2 = " + num(relf));
    }

    // Systematic resampling unbiasedness, weights (0.5, 0.3, 0.2), N = 10.
    {
        const std::vector<double> w = {0.5, 0.3, 0.2};
        const int N = 10, R = 10000;
        StreamRng rng(20240810);
        double mean[3] = {0, 0, 0}, m2[3] = {0, 0, 0};
        bool conserved = true;
        for (int r = 0; r < R; ++r) {
            const std::vector<int> idx = systematic_resample(rng, w, N);
            if (static_cast<int>(idx.size()) != N) conserved = false;
            int counts[3] = {0, 0, 0};
            for (int i : idx) counts[i]++;
            for (int i = 0; i < 3; ++i) {
                const double f = static_cast<double>(counts[i]) / N;
                mean[i] += f;
                m2[i] += f * f;
            }
        }
        bool ok = conserved;
        std::string detail;
        for (int i = 0; i < 3; ++i) {
            mean[i] /= R;
            const double var = m2[i] / R - mean[i] * mean[i];
            const double se = std::sqrt(std::max(var, 0.0) / R);
            if (std::abs(mean[i] - w[i]) > 3.0 * se + 1e-12) ok = false;
            detail += num(mean[i]) + (i < 2 ? std::string("/") : std::string(""));
        }
        log.result("systematic resampling unbiased", ok, "mean fractions = " + detail);
    }

    // Transition statistics: mean offset (s0 + st/2) dx per axis.
    {
        TransitionParams p{6.0, 5.0, 4.0, 4.0, 0.01};
        StreamRng rng(77);
        const int R = 100000;
        double sx = 0, sy = 0, sx2 = 0, sy2 = 0;
        for (int r = 0; r < R; ++r) {
            auto [x, y] = transition_sample(rng, 0.12, 0.30, p, 0.06);
            const double ox = x - 0.12, oy = y - 0.30;
            sx += ox; sy += oy; sx2 += ox * ox; sy2 += oy * oy;
        }
        const double mx = sx / R, my = sy / R;
        const double sex = std::sqrt((sx2 / R - mx * mx) / R), sey = std::sqrt((sy2 / R - my * my) / R);
        const bool ok = std::abs(mx - 0.085) <= 3 * sex && std::abs(my - 0.085) <= 3 * sey;
        log.result("transition mean offset 0.085", ok, "mean = " + num(mx) + ", " + num(my));
    }

    // Post-resampling weights are exactly 1/N.
    {
        StreamRng rng(5);
        std::vector<double> logw = {0.0, -1.0, -2.5, -0.3};
        auto w = normalize_log_weights(logw);
        auto idx = systematic_resample(rng, w);
        const bool ok = idx.size() == w.size();
        log.result("resampled weights reset to 1/N", ok, "offspring = " + std::to_string(idx.size()));
    }

    // Raster field sanity.
    if (!std::filesystem::exists(opt.raster_path)) {
        log.skip("kappa2 raster checks", "missing raster: " + opt.raster_path);
    } else {
        try {
            const RasterPermeability f = kappa2_load(opt.raster_path);
            bool has1 = false, has1e4 = false;
            for (int r = 0; r < f.rows(); ++r)
                for (int cc = 0; cc < f.cols(); ++cc) {
                    if (f.grid(r, cc) == 1.0) has1 = true;
                    if (f.grid(r, cc) == 1.0e4) has1e4 = true;
                }
            log.result("kappa2 raster values {1, 1e4}", has1 && has1e4,
                       std::to_string(f.rows()) + "x" + std::to_string(f.cols()));
            const Mesh small = build_mesh(50, 50);
            const SpMat a2 = assemble_stiffness(small, [&](double x, double y) { return f.eval(x, y); }, {});
            const SpMat m2s = assemble_mass(small);
            Factorization fact(small, m2s, a2, 1e-3);
            Vec probe = Vec::Constant(small.node_count(), 1.0);
            Vec sol = fact.solve(probe);
            log.result("kappa2 stiffness factorizable", sol.allFinite(), "");
        } catch (const std::exception& e) {
            log.result("kappa2 raster checks", false, e.what());
        }
    }

    std::printf("%d check(s) failed\n", log.failures);
    return log.failures;
}

}  // namespace fluxtrack
