#include "fluxtrack/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace fluxtrack {

const char* edge_name(Edge e) {
    switch (e) {
        case Edge::South: return "south";
        case Edge::East: return "east";
        case Edge::North: return "north";
        case Edge::West: return "west";
    }
    return "?";
}

Edge edge_from_name(const std::string& name) {
    if (name == "south") return Edge::South;
    if (name == "east") return Edge::East;
    if (name == "north") return Edge::North;
    if (name == "west") return Edge::West;
    throw std::invalid_argument("unknown edge name: " + name);
}

double Mesh::edge_coordinate(Edge e, int node) const {
    return (e == Edge::South || e == Edge::North) ? node_x(node) : node_y(node);
}

Mesh build_mesh(int nx, int ny) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("build_mesh: nx and ny must be >= 2");
    Mesh m;
    m.nx = nx;
    m.ny = ny;
    m.dx = 1.0 / nx;
    m.dy = 1.0 / ny;
    const int nn = m.node_count();
    m.boundary_mask.assign(nn, false);
    m.interior_index.assign(nn, -1);

    for (int i = 0; i <= nx; ++i) {
        m.edge_nodes[static_cast<int>(Edge::South)].push_back(m.node_index(i, 0));
        m.edge_nodes[static_cast<int>(Edge::North)].push_back(m.node_index(i, ny));
    }
    for (int j = 0; j <= ny; ++j) {
        m.edge_nodes[static_cast<int>(Edge::West)].push_back(m.node_index(0, j));
        m.edge_nodes[static_cast<int>(Edge::East)].push_back(m.node_index(nx, j));
    }
    for (const auto& nodes : m.edge_nodes)
        for (int n : nodes) m.boundary_mask[n] = true;

    for (int n = 0; n < nn; ++n) {
        if (!m.boundary_mask[n]) {
            m.interior_index[n] = static_cast<int>(m.interior_nodes.size());
            m.interior_nodes.push_back(n);
        }
    }
    return m;
}

std::vector<int> segment_nodes(const Mesh& mesh, const BoundarySegment& seg) {
    if (!(seg.a >= 0.0 && seg.a < seg.b && seg.b <= 1.0))
        throw std::invalid_argument("BoundarySegment: need 0 <= a < b <= 1");
    // Tolerance keeps nodes like 0.45 = 45*dx inside [0.45, 0.52] despite rounding.
    const double h = (seg.edge == Edge::South || seg.edge == Edge::North) ? mesh.dx : mesh.dy;
    const double tol = 1e-9 * std::max(1.0, 1.0 / h);
    std::vector<int> out;
    for (int n : mesh.edge_nodes[static_cast<int>(seg.edge)]) {
        const double c = mesh.edge_coordinate(seg.edge, n);
        if (c >= seg.a - tol && c <= seg.b + tol) out.push_back(n);
    }
    if (out.empty()) throw std::runtime_error("segment below mesh resolution");
    return out;
}

}  // namespace fluxtrack
