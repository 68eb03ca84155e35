#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace fluxtrack {

enum class Edge { South = 0, East = 1, North = 2, West = 3 };

const char* edge_name(Edge e);
Edge edge_from_name(const std::string& name);

// Uniform bilinear-quad lattice on [0,1]^2. Node (i,j) sits at (i*dx, j*dy),
// index = j*(nx+1)+i. Homogeneous Dirichlet boundary on the full perimeter.
struct Mesh {
    int nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;

    std::vector<int> interior_nodes;             // ascending node index
    std::array<std::vector<int>, 4> edge_nodes;  // per Edge, ascending edge coordinate, corners included
    std::vector<bool> boundary_mask;             // per node
    std::vector<int> interior_index;             // node -> position in interior_nodes, -1 on boundary

    int node_count() const { return (nx + 1) * (ny + 1); }
    int node_index(int i, int j) const { return j * (nx + 1) + i; }
    std::pair<int, int> node_ij(int idx) const { return {idx % (nx + 1), idx / (nx + 1)}; }
    double node_x(int idx) const { return (idx % (nx + 1)) * dx; }
    double node_y(int idx) const { return (idx / (nx + 1)) * dy; }

    // Coordinate of a node along the given edge (x on south/north, y on west/east).
    double edge_coordinate(Edge e, int node) const;
};

// nx, ny >= 2 cells per axis; throws std::invalid_argument otherwise.
Mesh build_mesh(int nx, int ny);

struct BoundarySegment {
    Edge edge = Edge::South;
    double a = 0.0, b = 1.0;  // closed interval [a,b] in the edge coordinate, 0 <= a < b <= 1
};

// Nodes of the segment's edge whose coordinate lies in [a,b], ascending.
// Throws std::runtime_error("segment below mesh resolution") when empty.
std::vector<int> segment_nodes(const Mesh& mesh, const BoundarySegment& seg);

}  // namespace fluxtrack
