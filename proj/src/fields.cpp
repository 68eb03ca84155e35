#include "fluxtrack/fields.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fluxtrack {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double kappa1_eval(double x, double y) {
    return 15.0 * std::sin(kTwoPi * 0.01 * x) * std::sin(kTwoPi * 0.05 * y) +
           0.05 * std::sin(kTwoPi * 6.5 * x) * std::sin(kTwoPi * 6.0 * y) + 0.1;
}

int RasterPermeability::cell_col(double x) const {
    int c = static_cast<int>(std::ceil(x * cols())) - 1;
    if (c < 0) c = 0;
    if (c >= cols()) c = cols() - 1;
    return c;
}

int RasterPermeability::cell_row(double y) const {
    int r = static_cast<int>(std::ceil(y * rows())) - 1;
    if (r < 0) r = 0;
    if (r >= rows()) r = rows() - 1;
    return r;
}

RasterPermeability kappa2_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("kappa2_load: cannot open " + path);
    int rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 1 || cols < 1)
        throw std::runtime_error("kappa2_load: malformed header in " + path);
    RasterPermeability f;
    f.grid.resize(rows, cols);
    // File rows run top-down; store bottom-up so grid row r sits at low y.
    for (int fr = 0; fr < rows; ++fr) {
        const int r = rows - 1 - fr;
        for (int c = 0; c < cols; ++c) {
            double v;
            if (!(in >> v)) throw std::runtime_error("kappa2_load: truncated data in " + path);
            if (!(v > 0.0)) throw std::runtime_error("kappa2_load: non-positive entry in " + path);
            f.grid(r, c) = v;
        }
    }
    return f;
}

void kappa2_save(const RasterPermeability& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("kappa2_save: cannot open " + path);
    out << field.rows() << " " << field.cols() << "\n";
    for (int fr = 0; fr < field.rows(); ++fr) {
        const int r = field.rows() - 1 - fr;
        for (int c = 0; c < field.cols(); ++c) {
            if (c) out << " ";
            out << field.grid(r, c);
        }
        out << "\n";
    }
}

void SemiDiscreteSource::validate() const {
    if (t_grid.size() != squares.size() + 1)
        throw std::invalid_argument("SemiDiscreteSource: need K+1 time knots for K squares");
    for (size_t k = 0; k + 1 < t_grid.size(); ++k)
        if (!(t_grid[k] < t_grid[k + 1]))
            throw std::invalid_argument("SemiDiscreteSource: time knots must be strictly increasing");
    for (size_t k = 0; k < squares.size(); ++k) {
        if (squares[k].amplitude == 0.0)
            throw std::invalid_argument("SemiDiscreteSource: zero amplitude");
        if (!squares[k].in_domain())
            throw std::invalid_argument("SemiDiscreteSource: square outside the domain");
        if (k + 1 < squares.size() && squares[k].x == squares[k + 1].x && squares[k].y == squares[k + 1].y)
            throw std::invalid_argument("SemiDiscreteSource: consecutive squares must differ");
    }
}

Vec project_source(const Mesh& mesh, const SourceSquare& sq) {
    if (!sq.in_domain()) throw std::invalid_argument("project_source: square escapes the domain");
    Vec b = Vec::Zero(mesh.node_count());
    const double ax = sq.x, bx = sq.x + sq.side;
    const double ay = sq.y - sq.side, by = sq.y;
    int i0 = static_cast<int>(std::floor(ax / mesh.dx));
    int i1 = static_cast<int>(std::ceil(bx / mesh.dx)) - 1;
    int j0 = static_cast<int>(std::floor(ay / mesh.dy));
    int j1 = static_cast<int>(std::ceil(by / mesh.dy)) - 1;
    i0 = std::max(i0, 0); i1 = std::min(i1, mesh.nx - 1);
    j0 = std::max(j0, 0); j1 = std::min(j1, mesh.ny - 1);
    for (int cj = j0; cj <= j1; ++cj) {
        for (int ci = i0; ci <= i1; ++ci) {
            const double cx = ci * mesh.dx, cy = cj * mesh.dy;
            const double xa = std::max(ax, cx), xb = std::min(bx, cx + mesh.dx);
            const double ya = std::max(ay, cy), yb = std::min(by, cy + mesh.dy);
            if (xa >= xb || ya >= yb) continue;
            // Exact integrals of the two 1D hats over the clipped range,
            // in local coordinates t = (x - cx)/dx.
            const double ta = (xa - cx) / mesh.dx, tb = (xb - cx) / mesh.dx;
            const double I1x = mesh.dx * 0.5 * (tb * tb - ta * ta);
            const double I0x = mesh.dx * (tb - ta) - I1x;
            const double sa = (ya - cy) / mesh.dy, sb = (yb - cy) / mesh.dy;
            const double I1y = mesh.dy * 0.5 * (sb * sb - sa * sa);
            const double I0y = mesh.dy * (sb - sa) - I1y;
            b[mesh.node_index(ci, cj)] += sq.amplitude * I0x * I0y;
            b[mesh.node_index(ci + 1, cj)] += sq.amplitude * I1x * I0y;
            b[mesh.node_index(ci + 1, cj + 1)] += sq.amplitude * I1x * I1y;
            b[mesh.node_index(ci, cj + 1)] += sq.amplitude * I0x * I1y;
        }
    }
    return b;
}

SemiDiscreteSource truth_trajectory(int id) {
    static const double kList1[10][2] = {
        {0.12, 0.12}, {0.20, 0.20}, {0.28, 0.28}, {0.36, 0.36}, {0.44, 0.44},
        {0.52, 0.52}, {0.60, 0.60}, {0.68, 0.68}, {0.76, 0.76}, {0.84, 0.84}};
    static const double kList2[10][2] = {
        {0.12, 0.12}, {0.20, 0.24}, {0.28, 0.36}, {0.36, 0.48}, {0.44, 0.56},
        {0.52, 0.64}, {0.60, 0.72}, {0.68, 0.78}, {0.76, 0.84}, {0.84, 0.90}};
    const double(*list)[2] = nullptr;
    if (id == 1) list = kList1;
    else if (id == 2) list = kList2;
    else throw std::invalid_argument("truth_trajectory: id must be 1 or 2");

    SemiDiscreteSource src;
    for (int k = 0; k <= 10; ++k) src.t_grid.push_back(0.01 * k);
    for (int k = 0; k < 10; ++k) {
        SourceSquare sq;
        sq.x = list[k][0];
        sq.y = list[k][1];
        src.squares.push_back(sq);
    }
    src.validate();
    return src;
}

}  // namespace fluxtrack
