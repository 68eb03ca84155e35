#pragma once

#include <Eigen/Dense>

#include "fluxtrack/fields.hpp"
#include "fluxtrack/mesh.hpp"

namespace fluxtrack {

// Closed-form eigen-expansion of the constant-coefficient problem
// (kappa = kappa0, q = 0) on the unit square:
//   lambda_{mn} = kappa0 pi^2 (m^2 + n^2),  phi_{mn} = 2 sin(m pi x) sin(n pi y).
struct EigenMode {
    int m = 1, n = 1;
    double lambda = 0.0;
};

EigenMode eigenpair(int m, int n, double kappa0);

double eigenfunction_value(const EigenMode& mode, double x, double y);

// <p_k, phi_mn> for the square-indicator source, closed form.
double source_coefficient(const EigenMode& mode, const SourceSquare& sq);

// Modal amplitude at time t: the exact Duhamel integral of the
// piecewise-constant-in-time source against e^{-lambda (t - tau)}.
double duhamel_amplitude(const EigenMode& mode, const SemiDiscreteSource& src, double t);

// u(x, y, t) truncated to modes m, n <= trunc.
double spectral_solution(const SemiDiscreteSource& src, int trunc, double kappa0,
                         double t, double x, double y);

// Nodal values on the mesh lattice, u[node]. Separable evaluation; with
// OpenMP the per-mode amplitude table and the grid contraction parallelize
// over rows (bitwise identical to the serial path).
Vec spectral_solution_grid(const SemiDiscreteSource& src, int trunc, double kappa0,
                           double t, const Mesh& mesh);

// Conormal flux kappa0 du/dn at edge coordinate `coord`, termwise
// differentiated series.
double spectral_flux(const SemiDiscreteSource& src, int trunc, double kappa0,
                     double t, Edge edge, double coord);

// Flux at many coordinates of one edge (shared amplitude table).
Vec spectral_flux_profile(const SemiDiscreteSource& src, int trunc, double kappa0,
                          double t, Edge edge, const std::vector<double>& coords);

}  // namespace fluxtrack
