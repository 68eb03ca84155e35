#include "fluxtrack/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace fluxtrack {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + where);
}

PermeabilitySpec parse_permeability(const std::string& s) {
    PermeabilitySpec p;
    if (s == "analytic1") {
        p.kind = PermeabilityKind::Analytic1;
        return p;
    }
    if (s.rfind("constant:", 0) == 0) {
        p.kind = PermeabilityKind::Constant;
        p.constant = std::stod(s.substr(9));
        if (!(p.constant > 0.0)) throw std::invalid_argument("config: constant permeability must be > 0");
        return p;
    }
    if (s.rfind("raster:", 0) == 0) {
        p.kind = PermeabilityKind::Raster;
        p.path = s.substr(7);
        if (p.path.empty()) throw std::invalid_argument("config: empty raster path");
        return p;
    }
    throw std::invalid_argument("config: permeability must be analytic1 | constant:<v> | raster:<path>");
}

std::string permeability_to_string(const PermeabilitySpec& p) {
    switch (p.kind) {
        case PermeabilityKind::Analytic1: return "analytic1";
        case PermeabilityKind::Constant: {
            json v = p.constant;  // shortest round-trip formatting
            return "constant:" + v.dump();
        }
        case PermeabilityKind::Raster: return "raster:" + p.path;
    }
    return {};
}

}  // namespace

int ExperimentConfig::steps_per_interval() const {
    const double interval = T / K;
    return static_cast<int>(std::llround(interval / dt));
}

std::vector<std::array<double, 2>> ExperimentConfig::truth_vertices() const {
    if (trajectory_id == 0) return trajectory_vertices;
    const SemiDiscreteSource src = truth_trajectory(trajectory_id);
    std::vector<std::array<double, 2>> v;
    for (const auto& sq : src.squares) v.push_back({sq.x, sq.y});
    return v;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    auto seg_eq = [](const BoundarySegment& a, const BoundarySegment& b) {
        return a.edge == b.edge && a.a == b.a && a.b == b.b;
    };
    if (segments.size() != o.segments.size()) return false;
    for (size_t i = 0; i < segments.size(); ++i)
        if (!seg_eq(segments[i], o.segments[i])) return false;
    return permeability == o.permeability && trajectory_id == o.trajectory_id &&
           trajectory_vertices == o.trajectory_vertices && nx == o.nx && ny == o.ny &&
           dt == o.dt && T == o.T && K == o.K && particles == o.particles &&
           transition.s0 == o.transition.s0 && transition.st == o.transition.st &&
           transition.r1 == o.transition.r1 && transition.r2 == o.transition.r2 &&
           transition.dx == o.transition.dx && noise == o.noise && seed == o.seed &&
           vertex_convention == o.vertex_convention && flux_kind == o.flux_kind &&
           init_prior == o.init_prior && square_side == o.square_side &&
           source_amplitude == o.source_amplitude;
}

void ExperimentConfig::validate() const {
    if (nx < 2 || ny < 2) throw std::invalid_argument("config: mesh nx, ny must be >= 2");
    if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
    if (K < 0) throw std::invalid_argument("config: K must be >= 0");
    if (particles < 1) throw std::invalid_argument("config: particles must be >= 1");
    if (K > 0) {
        const double interval = T / K;
        const double steps = interval / dt;
        if (std::abs(steps - std::llround(steps)) > 1e-9 || std::llround(steps) < 1)
            throw std::invalid_argument("config: T/K must be a positive multiple of dt");
    }
    if (trajectory_id == 0) {
        if (static_cast<int>(trajectory_vertices.size()) != K)
            throw std::invalid_argument("config: explicit trajectory must list K vertices");
    } else if (trajectory_id != 1 && trajectory_id != 2) {
        throw std::invalid_argument("config: trajectory must be 1, 2, or an explicit vertex list");
    }
    if (vertex_convention != "left_top")
        throw std::invalid_argument("config: vertex_convention must be left_top");
    if (!(transition.s0 > 0 && transition.st > 0 && transition.r1 > 0 && transition.r2 > 0))
        throw std::invalid_argument("config: transition parameters must be positive");
    if (segments.empty()) throw std::invalid_argument("config: at least one observation segment required");
    for (const auto& s : segments)
        if (!(s.a >= 0.0 && s.a < s.b && s.b <= 1.0))
            throw std::invalid_argument("config: segment needs 0 <= a < b <= 1");
    if (noise.value < 0.0) throw std::invalid_argument("config: noise value must be >= 0");
    if (!(square_side > 0.0)) throw std::invalid_argument("config: source side must be positive");
    if (source_amplitude == 0.0) throw std::invalid_argument("config: source amplitude must be nonzero");
    if (init_prior.kind == InitPriorKind::UniformBox && !(init_prior.half_width > 0.0))
        throw std::invalid_argument("config: uniform_box prior needs half_width > 0");
    const auto verts = truth_vertices();
    for (const auto& v : verts) {
        SourceSquare sq{v[0], v[1], square_side, source_amplitude};
        if (!sq.in_domain()) throw std::invalid_argument("config: trajectory square escapes the domain");
    }
}

ExperimentConfig parse_config_json(const json& j) {
    require_keys(j, {"permeability", "trajectory", "mesh", "dt", "T", "K", "particles",
                     "transition", "segments", "noise", "seed", "vertex_convention",
                     "flux_kind", "init_prior", "source"},
                 "top level");
    ExperimentConfig c;
    if (j.contains("permeability")) c.permeability = parse_permeability(j.at("permeability").get<std::string>());
    if (j.contains("trajectory")) {
        const auto& t = j.at("trajectory");
        if (t.is_number_integer()) {
            c.trajectory_id = t.get<int>();
        } else if (t.is_array()) {
            c.trajectory_id = 0;
            for (const auto& v : t) {
                if (!v.is_array() || v.size() != 2)
                    throw std::invalid_argument("config: trajectory vertices must be [x, y] pairs");
                c.trajectory_vertices.push_back({v[0].get<double>(), v[1].get<double>()});
            }
        } else {
            throw std::invalid_argument("config: trajectory must be an id or a vertex list");
        }
    }
    if (j.contains("mesh")) {
        require_keys(j.at("mesh"), {"nx", "ny"}, "mesh");
        c.nx = j.at("mesh").value("nx", c.nx);
        c.ny = j.at("mesh").value("ny", c.ny);
    }
    if (j.contains("dt")) c.dt = j.at("dt").get<double>();
    if (j.contains("T")) c.T = j.at("T").get<double>();
    if (j.contains("K")) c.K = j.at("K").get<int>();
    if (j.contains("particles")) c.particles = j.at("particles").get<int>();
    if (j.contains("transition")) {
        const auto& t = j.at("transition");
        require_keys(t, {"s0", "st", "r1", "r2", "dx"}, "transition");
        c.transition.s0 = t.value("s0", c.transition.s0);
        c.transition.st = t.value("st", c.transition.st);
        c.transition.r1 = t.value("r1", c.transition.r1);
        c.transition.r2 = t.value("r2", c.transition.r2);
        c.transition.dx = t.value("dx", c.transition.dx);
    }
    if (j.contains("segments")) {
        c.segments.clear();
        for (const auto& s : j.at("segments")) {
            require_keys(s, {"edge", "a", "b"}, "segments");
            BoundarySegment seg;
            seg.edge = edge_from_name(s.at("edge").get<std::string>());
            seg.a = s.at("a").get<double>();
            seg.b = s.at("b").get<double>();
            c.segments.push_back(seg);
        }
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        require_keys(n, {"type", "value"}, "noise");
        const std::string type = n.at("type").get<std::string>();
        if (type == "rms_fraction") c.noise.kind = NoiseKind::RmsFraction;
        else if (type == "absolute") c.noise.kind = NoiseKind::Absolute;
        else throw std::invalid_argument("config: noise.type must be rms_fraction or absolute");
        c.noise.value = n.at("value").get<double>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("vertex_convention")) c.vertex_convention = j.at("vertex_convention").get<std::string>();
    if (j.contains("flux_kind")) {
        const std::string f = j.at("flux_kind").get<std::string>();
        if (f == "conormal") c.flux_kind = FluxKind::Conormal;
        else if (f == "normal_gradient") c.flux_kind = FluxKind::NormalGradient;
        else throw std::invalid_argument("config: flux_kind must be conormal or normal_gradient");
    }
    if (j.contains("init_prior")) {
        const auto& p = j.at("init_prior");
        require_keys(p, {"type", "half_width"}, "init_prior");
        const std::string type = p.at("type").get<std::string>();
        if (type == "point") c.init_prior.kind = InitPriorKind::Point;
        else if (type == "uniform_box") c.init_prior.kind = InitPriorKind::UniformBox;
        else throw std::invalid_argument("config: init_prior.type must be point or uniform_box");
        c.init_prior.half_width = p.value("half_width", 0.0);
    }
    if (j.contains("source")) {
        const auto& s = j.at("source");
        require_keys(s, {"side", "amplitude"}, "source");
        c.square_side = s.value("side", c.square_side);
        c.source_amplitude = s.value("amplitude", c.source_amplitude);
    }
    c.validate();
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    json j;
    in >> j;
    return parse_config_json(j);
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["permeability"] = permeability_to_string(c.permeability);
    if (c.trajectory_id == 0) {
        json list = json::array();
        for (const auto& v : c.trajectory_vertices) list.push_back({v[0], v[1]});
        j["trajectory"] = list;
    } else {
        j["trajectory"] = c.trajectory_id;
    }
    j["mesh"] = {{"nx", c.nx}, {"ny", c.ny}};
    j["dt"] = c.dt;
    j["T"] = c.T;
    j["K"] = c.K;
    j["particles"] = c.particles;
    j["transition"] = {{"s0", c.transition.s0}, {"st", c.transition.st},
                       {"r1", c.transition.r1}, {"r2", c.transition.r2},
                       {"dx", c.transition.dx}};
    json segs = json::array();
    for (const auto& s : c.segments)
        segs.push_back({{"edge", edge_name(s.edge)}, {"a", s.a}, {"b", s.b}});
    j["segments"] = segs;
    j["noise"] = {{"type", c.noise.kind == NoiseKind::RmsFraction ? "rms_fraction" : "absolute"},
                  {"value", c.noise.value}};
    j["seed"] = c.seed;
    j["vertex_convention"] = c.vertex_convention;
    j["flux_kind"] = c.flux_kind == FluxKind::Conormal ? "conormal" : "normal_gradient";
    if (c.init_prior.kind == InitPriorKind::Point) {
        j["init_prior"] = {{"type", "point"}};
    } else {
        j["init_prior"] = {{"type", "uniform_box"}, {"half_width", c.init_prior.half_width}};
    }
    j["source"] = {{"side", c.square_side}, {"amplitude", c.source_amplitude}};
    return j;
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;  // paper defaults: 100x100 mesh, dt 1e-3, T 0.1, K 10, N 320
    auto segs = [](double a, double b) {
        return std::vector<BoundarySegment>{{Edge::South, a, b}, {Edge::East, a, b},
                                            {Edge::North, a, b}, {Edge::West, a, b}};
    };
    if (name == "exp1-multifreq") {
        c.permeability.kind = PermeabilityKind::Analytic1;
        c.trajectory_id = 1;
        c.transition = {6.0, 5.0, 4.0, 4.0, 0.01};
        c.segments = segs(0.45, 0.52);
    } else if (name == "exp1-highcontrast") {
        c.permeability.kind = PermeabilityKind::Raster;
        c.permeability.path = "data/kappa2_channels.txt";
        c.trajectory_id = 1;
        c.transition = {6.0, 5.0, 4.0, 4.0, 0.01};
        c.segments = segs(0.50, 0.55);
    } else if (name == "exp2-multifreq") {
        c.permeability.kind = PermeabilityKind::Analytic1;
        c.trajectory_id = 2;
        c.transition = {4.0, 5.0, 4.0, 5.0, 0.01};
        c.segments = segs(0.40, 0.60);
    } else if (name == "exp2-highcontrast") {
        c.permeability.kind = PermeabilityKind::Raster;
        c.permeability.path = "data/kappa2_channels.txt";
        c.trajectory_id = 2;
        c.transition = {4.0, 5.0, 4.0, 5.0, 0.01};
        c.segments = segs(0.43, 0.58);
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    c.validate();
    return c;
}

std::vector<std::string> preset_names() {
    return {"exp1-multifreq", "exp1-highcontrast", "exp2-multifreq", "exp2-highcontrast"};
}

}  // namespace fluxtrack
