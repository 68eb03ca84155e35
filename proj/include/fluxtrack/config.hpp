#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxtrack/filter.hpp"
#include "fluxtrack/mesh.hpp"

namespace fluxtrack {

enum class PermeabilityKind { Analytic1, Constant, Raster };

struct PermeabilitySpec {
    PermeabilityKind kind = PermeabilityKind::Analytic1;
    double constant = 1.0;   // Constant
    std::string path;        // Raster

    bool operator==(const PermeabilitySpec&) const = default;
};

enum class NoiseKind { RmsFraction, Absolute };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::RmsFraction;
    double value = 0.01;

    bool operator==(const NoiseSpec&) const = default;
};

enum class InitPriorKind { Point, UniformBox };

struct InitPriorSpec {
    InitPriorKind kind = InitPriorKind::Point;
    double half_width = 0.0;  // UniformBox only

    bool operator==(const InitPriorSpec&) const = default;
};

struct ExperimentConfig {
    PermeabilitySpec permeability;
    int trajectory_id = 1;                                // 1|2, or 0 when explicit
    std::vector<std::array<double, 2>> trajectory_vertices;  // explicit list when id == 0
    int nx = 100, ny = 100;
    double dt = 1e-3;
    double T = 0.1;
    int K = 10;
    int particles = 320;
    TransitionParams transition;
    std::vector<BoundarySegment> segments;
    NoiseSpec noise;
    std::uint64_t seed = 1;
    std::string vertex_convention = "left_top";
    FluxKind flux_kind = FluxKind::Conormal;
    InitPriorSpec init_prior;
    double square_side = 0.06;
    double source_amplitude = 1250.0;

    int steps_per_interval() const;
    // Vertices for intervals 1..K (resolves trajectory_id).
    std::vector<std::array<double, 2>> truth_vertices() const;

    bool operator==(const ExperimentConfig&) const;

    // Throws std::invalid_argument on violated invariants
    // (T = K * interval, interval a multiple of dt, valid segments, ...).
    void validate() const;
};

// Strict parser: unknown keys anywhere are errors.
ExperimentConfig parse_config_json(const nlohmann::json& j);
ExperimentConfig parse_config_file(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& c);

// exp1-multifreq, exp1-highcontrast, exp2-multifreq, exp2-highcontrast.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace fluxtrack
