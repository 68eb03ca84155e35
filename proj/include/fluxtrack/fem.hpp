#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <functional>
#include <memory>
#include <vector>

#include "fluxtrack/mesh.hpp"

namespace fluxtrack {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using ScalarField = std::function<double(double, double)>;

// Consistent Galerkin mass matrix, bilinear quads, 2x2 Gauss per cell.
SpMat assemble_mass(const Mesh& mesh);

// Stiffness for -div(kappa grad u) + q u, kappa and q sampled at the 2x2
// Gauss points. Throws std::runtime_error if kappa <= 0 at any quadrature
// point (ellipticity violated).
SpMat assemble_stiffness(const Mesh& mesh, const ScalarField& kappa, const ScalarField& q);

struct FieldState {
    Vec values;  // per node, Dirichlet nodes exactly 0
    double time = 0.0;
};

FieldState zero_state(const Mesh& mesh);

// Reusable exact solve handle for (M/dt + A) restricted to interior
// unknowns (Dirichlet rows/columns eliminated, boundary values pinned to 0).
class Factorization {
public:
    Factorization(const Mesh& mesh, const SpMat& mass, const SpMat& stiffness, double dt);

    double dt() const { return dt_; }
    int node_count() const { return node_count_; }

    // Solves (M/dt + A) u = rhs on the interior; entries of `rhs` at
    // boundary nodes are ignored and the result carries zeros there.
    Vec solve(const Vec& full_rhs) const;

private:
    double dt_;
    int node_count_;
    const Mesh* mesh_;
    std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;
};

// One backward-Euler step: (M/dt + A) u^{n+1} = (M/dt) u^n + load,
// load being the FEM projection of the source active over (t, t+dt].
FieldState step_backward_euler(const FieldState& state, const Factorization& fact,
                               const SpMat& mass, const Vec& load);

enum class FluxKind { Conormal, NormalGradient };

// Variational (consistent) recovery of the conormal boundary flux
// kappa du/dn. Nodal flux g on an edge solves the edge-mass system
//   <g, v>_edge = (M/dt)(u_new - u_old) . v + A u_new . v - load . v
// over that edge's test functions; corner residuals are split evenly
// between the two adjacent edges, which keeps the discrete integral
// balance exact when summed against the all-ones test function.
class FluxExtractor {
public:
    FluxExtractor(const Mesh& mesh, const SpMat& mass, const SpMat& stiffness, double dt,
                  std::vector<BoundarySegment> segments,
                  FluxKind kind = FluxKind::Conormal, ScalarField kappa = {});

    int record_count() const { return record_count_; }
    const std::vector<BoundarySegment>& segments() const { return segments_; }
    // Node ids observed for segment s (ascending edge coordinate).
    const std::vector<int>& segment_node_ids(int s) const { return seg_nodes_[s]; }

    // Stacked flux over all segments (segment order, node order within).
    Vec step_flux(const Vec& u_new, const Vec& u_old, const Vec& load) const;

    // Stationary variant: the time term is dropped, residual = A u - load.
    Vec steady_flux(const Vec& u, const Vec& load) const;

private:
    Vec from_residual(const Vec& residual_boundary) const;

    const Mesh* mesh_;
    double dt_;
    std::vector<BoundarySegment> segments_;
    std::vector<std::vector<int>> seg_nodes_;
    int record_count_ = 0;
    FluxKind kind_;
    ScalarField kappa_;

    std::vector<int> boundary_nodes_;          // all boundary nodes, ascending
    std::vector<int> boundary_pos_;            // node -> row in the slices, -1 elsewhere
    Eigen::SparseMatrix<double, Eigen::RowMajor> mass_b_;   // boundary rows of M
    Eigen::SparseMatrix<double, Eigen::RowMajor> stiff_b_;  // boundary rows of A
    std::vector<double> corner_weight_;        // per boundary row, 0.5 at corners

    struct EdgeSolve {               // prefactored Thomas solve of the 1D edge mass
        std::vector<double> diag;    // after forward elimination
        std::vector<double> lower;   // multipliers
        double h = 0.0;
    };
    std::array<EdgeSolve, 4> edge_solve_;
    std::array<bool, 4> edge_used_{};

    std::vector<double> solve_edge(Edge e, std::vector<double> rhs) const;
};

}  // namespace fluxtrack
