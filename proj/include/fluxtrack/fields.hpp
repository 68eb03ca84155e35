#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "fluxtrack/fem.hpp"
#include "fluxtrack/mesh.hpp"

namespace fluxtrack {

// Multi-frequency analytic permeability,
//   15 sin(2pi 0.01 x) sin(2pi 0.05 y) + 0.05 sin(2pi 6.5 x) sin(2pi 6 y) + 0.1.
double kappa1_eval(double x, double y);

// Piecewise-constant raster field on [0,1]^2. grid(r, c) covers
// x in (c/cols, (c+1)/cols], y in (r/rows, (r+1)/rows] (row 0 at the bottom);
// coordinates on a cell boundary resolve toward the lower-index cell.
struct RasterPermeability {
    Eigen::MatrixXd grid;  // rows x cols, all entries > 0

    int rows() const { return static_cast<int>(grid.rows()); }
    int cols() const { return static_cast<int>(grid.cols()); }
    int cell_row(double y) const;
    int cell_col(double x) const;
    double eval(double x, double y) const { return grid(cell_row(y), cell_col(x)); }
};

// File format: line 1 "rows cols", then `rows` lines of `cols` values,
// file row 0 at the top of the domain (y = 1). ASCII, LF.
RasterPermeability kappa2_load(const std::string& path);
void kappa2_save(const RasterPermeability& field, const std::string& path);

// Axis-aligned source square addressed by its left-top vertex:
// [x, x+side] x [y-side, y].
struct SourceSquare {
    double x = 0.0, y = 0.0;  // left-top vertex
    double side = 0.06;
    double amplitude = 1250.0;

    bool in_domain() const {
        return x >= 0.0 && x + side <= 1.0 && y - side >= 0.0 && y <= 1.0;
    }
};

// Piecewise-constant-in-time source: square k is active on [t_{k-1}, t_k).
struct SemiDiscreteSource {
    std::vector<double> t_grid;          // K+1 strictly increasing knots
    std::vector<SourceSquare> squares;   // K entries

    int intervals() const { return static_cast<int>(squares.size()); }
    // Throws std::invalid_argument when the structural assumptions fail
    // (non-increasing knots, repeated consecutive vertices, zero amplitude,
    // square outside the domain).
    void validate() const;
};

// Load vector b_i = integral over the square of amplitude * phi_i, exact for
// bilinear elements (the square is clipped against each overlapped cell).
Vec project_source(const Mesh& mesh, const SourceSquare& sq);

// The two published vertex sequences; t_k = 0.01 k, amplitude 1250, side 0.06.
SemiDiscreteSource truth_trajectory(int id);

}  // namespace fluxtrack
