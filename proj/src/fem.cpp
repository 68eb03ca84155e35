#include "fluxtrack/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace fluxtrack {

namespace {

struct QuadPoint {
    double xi, eta;  // on [-1,1]^2
};

// 2x2 Gauss, weight dx*dy/4 each.
constexpr double kG = 0.57735026918962576450914878050196;  // 1/sqrt(3)
constexpr QuadPoint kQuad[4] = {{-kG, -kG}, {kG, -kG}, {kG, kG}, {-kG, kG}};

void shape(double xi, double eta, double N[4]) {
    N[0] = 0.25 * (1 - xi) * (1 - eta);
    N[1] = 0.25 * (1 + xi) * (1 - eta);
    N[2] = 0.25 * (1 + xi) * (1 + eta);
    N[3] = 0.25 * (1 - xi) * (1 + eta);
}

void shape_grad(double xi, double eta, double dxi[4], double deta[4]) {
    dxi[0] = -0.25 * (1 - eta); deta[0] = -0.25 * (1 - xi);
    dxi[1] = 0.25 * (1 - eta);  deta[1] = -0.25 * (1 + xi);
    dxi[2] = 0.25 * (1 + eta);  deta[2] = 0.25 * (1 + xi);
    dxi[3] = -0.25 * (1 + eta); deta[3] = 0.25 * (1 - xi);
}

template <class CellKernel>
SpMat assemble(const Mesh& mesh, CellKernel&& kernel) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.nx) * mesh.ny * 16);
    double Ke[4][4];
    int nodes[4];
    for (int cj = 0; cj < mesh.ny; ++cj) {
        for (int ci = 0; ci < mesh.nx; ++ci) {
            nodes[0] = mesh.node_index(ci, cj);
            nodes[1] = mesh.node_index(ci + 1, cj);
            nodes[2] = mesh.node_index(ci + 1, cj + 1);
            nodes[3] = mesh.node_index(ci, cj + 1);
            kernel(ci, cj, Ke);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    trip.emplace_back(nodes[a], nodes[b], Ke[a][b]);
        }
    }
    SpMat m(mesh.node_count(), mesh.node_count());
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

}  // namespace

SpMat assemble_mass(const Mesh& mesh) {
    const double w = mesh.dx * mesh.dy / 4.0;
    return assemble(mesh, [&](int, int, double Ke[4][4]) {
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) Ke[a][b] = 0.0;
        double N[4];
        for (const auto& qp : kQuad) {
            shape(qp.xi, qp.eta, N);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) Ke[a][b] += w * N[a] * N[b];
        }
    });
}

SpMat assemble_stiffness(const Mesh& mesh, const ScalarField& kappa, const ScalarField& q) {
    const double w = mesh.dx * mesh.dy / 4.0;
    const double sx = 2.0 / mesh.dx;  // d(xi)/dx
    const double sy = 2.0 / mesh.dy;
    return assemble(mesh, [&](int ci, int cj, double Ke[4][4]) {
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) Ke[a][b] = 0.0;
        const double x0 = ci * mesh.dx, y0 = cj * mesh.dy;
        double N[4], dxi[4], deta[4];
        for (const auto& qp : kQuad) {
            shape(qp.xi, qp.eta, N);
            shape_grad(qp.xi, qp.eta, dxi, deta);
            const double xq = x0 + (qp.xi + 1.0) * 0.5 * mesh.dx;
            const double yq = y0 + (qp.eta + 1.0) * 0.5 * mesh.dy;
            const double k = kappa(xq, yq);
            if (!(k > 0.0)) throw std::runtime_error("assemble_stiffness: kappa <= 0 at quadrature point");
            const double qv = q ? q(xq, yq) : 0.0;
            for (int a = 0; a < 4; ++a) {
                const double dax = dxi[a] * sx, day = deta[a] * sy;
                for (int b = 0; b < 4; ++b) {
                    const double dbx = dxi[b] * sx, dby = deta[b] * sy;
                    Ke[a][b] += w * (k * (dax * dbx + day * dby) + qv * N[a] * N[b]);
                }
            }
        }
    });
}

FieldState zero_state(const Mesh& mesh) {
    FieldState s;
    s.values = Vec::Zero(mesh.node_count());
    s.time = 0.0;
    return s;
}

Factorization::Factorization(const Mesh& mesh, const SpMat& mass, const SpMat& stiffness, double dt)
    : dt_(dt), node_count_(mesh.node_count()), mesh_(&mesh) {
    if (!(dt > 0.0)) throw std::invalid_argument("Factorization: dt must be positive");
    if (mass.rows() != stiffness.rows() || mass.rows() != node_count_)
        throw std::invalid_argument("Factorization: dimension mismatch");
    const auto& interior = mesh.interior_nodes;
    const int ni = static_cast<int>(interior.size());
    SpMat full = mass / dt + stiffness;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(full.nonZeros());
    for (int col = 0; col < full.outerSize(); ++col) {
        const int jc = mesh.interior_index[col];
        if (jc < 0) continue;
        for (SpMat::InnerIterator it(full, col); it; ++it) {
            const int ir = mesh.interior_index[static_cast<int>(it.row())];
            if (ir >= 0) trip.emplace_back(ir, jc, it.value());
        }
    }
    SpMat K(ni, ni);
    K.setFromTriplets(trip.begin(), trip.end());
    K.makeCompressed();
    ldlt_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
    ldlt_->compute(K);
    if (ldlt_->info() != Eigen::Success)
        throw std::runtime_error("Factorization: sparse LDLT failed (singular system?)");
}

Vec Factorization::solve(const Vec& full_rhs) const {
    if (full_rhs.size() != node_count_) throw std::invalid_argument("Factorization::solve: size mismatch");
    const auto& interior = mesh_->interior_nodes;
    Vec ri(static_cast<Eigen::Index>(interior.size()));
    for (size_t p = 0; p < interior.size(); ++p) ri[static_cast<Eigen::Index>(p)] = full_rhs[interior[p]];
    Vec ui = ldlt_->solve(ri);
    Vec out = Vec::Zero(node_count_);
    for (size_t p = 0; p < interior.size(); ++p) out[interior[p]] = ui[static_cast<Eigen::Index>(p)];
    return out;
}

FieldState step_backward_euler(const FieldState& state, const Factorization& fact,
                               const SpMat& mass, const Vec& load) {
    if (state.values.size() != fact.node_count() || load.size() != fact.node_count())
        throw std::invalid_argument("step_backward_euler: dimension mismatch");
    Vec rhs = mass * state.values / fact.dt() + load;
    FieldState next;
    next.values = fact.solve(rhs);
    next.time = state.time + fact.dt();
    return next;
}

FluxExtractor::FluxExtractor(const Mesh& mesh, const SpMat& mass, const SpMat& stiffness, double dt,
                             std::vector<BoundarySegment> segments, FluxKind kind, ScalarField kappa)
    : mesh_(&mesh), dt_(dt), segments_(std::move(segments)), kind_(kind), kappa_(std::move(kappa)) {
    if (kind_ == FluxKind::NormalGradient && !kappa_)
        throw std::invalid_argument("FluxExtractor: NormalGradient needs the kappa field");
    const int nn = mesh.node_count();
    boundary_pos_.assign(nn, -1);
    for (int n = 0; n < nn; ++n)
        if (mesh.boundary_mask[n]) {
            boundary_pos_[n] = static_cast<int>(boundary_nodes_.size());
            boundary_nodes_.push_back(n);
        }

    const int nb = static_cast<int>(boundary_nodes_.size());
    std::vector<Eigen::Triplet<double>> tm, ta;
    for (int col = 0; col < mass.outerSize(); ++col) {
        for (SpMat::InnerIterator it(mass, col); it; ++it) {
            const int r = boundary_pos_[static_cast<int>(it.row())];
            if (r >= 0) tm.emplace_back(r, col, it.value());
        }
    }
    for (int col = 0; col < stiffness.outerSize(); ++col) {
        for (SpMat::InnerIterator it(stiffness, col); it; ++it) {
            const int r = boundary_pos_[static_cast<int>(it.row())];
            if (r >= 0) ta.emplace_back(r, col, it.value());
        }
    }
    mass_b_.resize(nb, nn);
    mass_b_.setFromTriplets(tm.begin(), tm.end());
    stiff_b_.resize(nb, nn);
    stiff_b_.setFromTriplets(ta.begin(), ta.end());

    corner_weight_.assign(nb, 1.0);
    const int corners[4] = {mesh.node_index(0, 0), mesh.node_index(mesh.nx, 0),
                            mesh.node_index(0, mesh.ny), mesh.node_index(mesh.nx, mesh.ny)};
    for (int c : corners) corner_weight_[boundary_pos_[c]] = 0.5;

    for (const auto& seg : segments_) {
        seg_nodes_.push_back(segment_nodes(mesh, seg));
        record_count_ += static_cast<int>(seg_nodes_.back().size());
        edge_used_[static_cast<int>(seg.edge)] = true;
    }

    // Prefactor the per-edge tridiagonal 1D consistent mass (h/6, 2h/3, h/6;
    // h/3 at the two end nodes).
    for (int e = 0; e < 4; ++e) {
        if (!edge_used_[e]) continue;
        const auto& nodes = mesh.edge_nodes[e];
        const int n = static_cast<int>(nodes.size());
        const double h = (e == static_cast<int>(Edge::South) || e == static_cast<int>(Edge::North))
                             ? mesh.dx : mesh.dy;
        EdgeSolve es;
        es.h = h;
        es.diag.assign(n, 2.0 * h / 3.0);
        es.diag.front() = es.diag.back() = h / 3.0;
        es.lower.assign(n, 0.0);
        const double off = h / 6.0;
        for (int i = 1; i < n; ++i) {
            es.lower[i] = off / es.diag[i - 1];
            es.diag[i] -= es.lower[i] * off;
        }
        edge_solve_[e] = std::move(es);
    }
}

std::vector<double> FluxExtractor::solve_edge(Edge e, std::vector<double> rhs) const {
    const auto& es = edge_solve_[static_cast<int>(e)];
    const int n = static_cast<int>(rhs.size());
    const double off = es.h / 6.0;
    for (int i = 1; i < n; ++i) rhs[i] -= es.lower[i] * rhs[i - 1];
    rhs[n - 1] /= es.diag[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - off * rhs[i + 1]) / es.diag[i];
    return rhs;
}

Vec FluxExtractor::from_residual(const Vec& rb) const {
    // Nodal flux per used edge, then gather the segment nodes.
    std::array<std::vector<double>, 4> edge_flux;
    for (int e = 0; e < 4; ++e) {
        if (!edge_used_[e]) continue;
        const auto& nodes = mesh_->edge_nodes[e];
        std::vector<double> rhs(nodes.size());
        for (size_t p = 0; p < nodes.size(); ++p) {
            const int row = boundary_pos_[nodes[p]];
            rhs[p] = rb[row] * corner_weight_[row];
        }
        edge_flux[e] = solve_edge(static_cast<Edge>(e), std::move(rhs));
    }

    Vec out(record_count_);
    int at = 0;
    for (size_t s = 0; s < segments_.size(); ++s) {
        const int e = static_cast<int>(segments_[s].edge);
        const auto& nodes = mesh_->edge_nodes[e];
        size_t p = 0;
        for (int n : seg_nodes_[s]) {
            while (nodes[p] != n) ++p;
            double v = edge_flux[e][p];
            if (kind_ == FluxKind::NormalGradient) v /= kappa_(mesh_->node_x(n), mesh_->node_y(n));
            out[at++] = v;
        }
    }
    return out;
}

Vec FluxExtractor::step_flux(const Vec& u_new, const Vec& u_old, const Vec& load) const {
    Vec rb = mass_b_ * (u_new - u_old) / dt_ + stiff_b_ * u_new;
    for (int p = 0; p < static_cast<int>(boundary_nodes_.size()); ++p) rb[p] -= load[boundary_nodes_[p]];
    return from_residual(rb);
}

Vec FluxExtractor::steady_flux(const Vec& u, const Vec& load) const {
    Vec rb = stiff_b_ * u;
    for (int p = 0; p < static_cast<int>(boundary_nodes_.size()); ++p) rb[p] -= load[boundary_nodes_[p]];
    return from_residual(rb);
}

}  // namespace fluxtrack
