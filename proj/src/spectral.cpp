#include "fluxtrack/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fluxtrack {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;

// Amplitude table a(m-1, n-1) for modes m, n in 1..trunc.
Eigen::MatrixXd amplitude_table(const SemiDiscreteSource& src, int trunc, double kappa0, double t) {
    Eigen::MatrixXd amp = Eigen::MatrixXd::Zero(trunc, trunc);
    if (t <= 0.0) return amp;
    const int K = src.intervals();
    for (int mi = 0; mi < trunc; ++mi) {
        const int m = mi + 1;
        for (int ni = 0; ni < trunc; ++ni) {
            const int n = ni + 1;
            const double lambda = kappa0 * kPi * kPi * (double(m) * m + double(n) * n);
            double a = 0.0;
            for (int k = 0; k < K; ++k) {
                const double lo = std::min(t, src.t_grid[k]);
                const double hi = std::min(t, src.t_grid[k + 1]);
                if (lo >= hi) continue;
                const EigenMode mode{m, n, lambda};
                const double p = source_coefficient(mode, src.squares[k]);
                a += p / lambda * (std::exp(-lambda * (t - hi)) - std::exp(-lambda * (t - lo)));
            }
            amp(mi, ni) = a;
        }
    }
    return amp;
}

}  // namespace

EigenMode eigenpair(int m, int n, double kappa0) {
    if (m < 1 || n < 1) throw std::invalid_argument("eigenpair: mode indices must be >= 1");
    if (!(kappa0 > 0.0)) throw std::invalid_argument("eigenpair: kappa0 must be positive");
    return EigenMode{m, n, kappa0 * kPi * kPi * (double(m) * m + double(n) * n)};
}

double eigenfunction_value(const EigenMode& mode, double x, double y) {
    return 2.0 * std::sin(mode.m * kPi * x) * std::sin(mode.n * kPi * y);
}

double source_coefficient(const EigenMode& mode, const SourceSquare& sq) {
    const double m = mode.m, n = mode.n;
    const double ix = (std::cos(m * kPi * sq.x) - std::cos(m * kPi * (sq.x + sq.side))) / (m * kPi);
    const double iy = (std::cos(n * kPi * (sq.y - sq.side)) - std::cos(n * kPi * sq.y)) / (n * kPi);
    return sq.amplitude * 2.0 * ix * iy;
}

double duhamel_amplitude(const EigenMode& mode, const SemiDiscreteSource& src, double t) {
    if (t <= 0.0) return 0.0;
    double a = 0.0;
    for (int k = 0; k < src.intervals(); ++k) {
        const double lo = std::min(t, src.t_grid[k]);
        const double hi = std::min(t, src.t_grid[k + 1]);
        if (lo >= hi) continue;
        const double p = source_coefficient(mode, src.squares[k]);
        a += p / mode.lambda * (std::exp(-mode.lambda * (t - hi)) - std::exp(-mode.lambda * (t - lo)));
    }
    return a;
}

double spectral_solution(const SemiDiscreteSource& src, int trunc, double kappa0,
                         double t, double x, double y) {
    if (trunc < 1) throw std::invalid_argument("spectral_solution: trunc must be >= 1");
    if (t <= 0.0) return 0.0;
    double u = 0.0;
    for (int m = 1; m <= trunc; ++m) {
        const double sx = std::sin(m * kPi * x);
        double row = 0.0;
        for (int n = 1; n <= trunc; ++n) {
            const EigenMode mode = eigenpair(m, n, kappa0);
            row += duhamel_amplitude(mode, src, t) * std::sin(n * kPi * y);
        }
        u += 2.0 * sx * row;
    }
    return u;
}

Vec spectral_solution_grid(const SemiDiscreteSource& src, int trunc, double kappa0,
                           double t, const Mesh& mesh) {
    const Eigen::MatrixXd amp = amplitude_table(src, trunc, kappa0, t);
    Eigen::MatrixXd sx(mesh.nx + 1, trunc), sy(mesh.ny + 1, trunc);
    for (int i = 0; i <= mesh.nx; ++i)
        for (int m = 1; m <= trunc; ++m) sx(i, m - 1) = std::sin(m * kPi * i * mesh.dx);
    for (int j = 0; j <= mesh.ny; ++j)
        for (int n = 1; n <= trunc; ++n) sy(j, n - 1) = std::sin(n * kPi * j * mesh.dy);
    Eigen::MatrixXd grid = 2.0 * sx * amp * sy.transpose();  // (i, j)
    Vec out(mesh.node_count());
    for (int j = 0; j <= mesh.ny; ++j)
        for (int i = 0; i <= mesh.nx; ++i) out[mesh.node_index(i, j)] = grid(i, j);
    return out;
}

double spectral_flux(const SemiDiscreteSource& src, int trunc, double kappa0,
                     double t, Edge edge, double coord) {
    std::vector<double> c{coord};
    return spectral_flux_profile(src, trunc, kappa0, t, edge, c)[0];
}

Vec spectral_flux_profile(const SemiDiscreteSource& src, int trunc, double kappa0,
                          double t, Edge edge, const std::vector<double>& coords) {
    const Eigen::MatrixXd amp = amplitude_table(src, trunc, kappa0, t);
    Vec out = Vec::Zero(static_cast<Eigen::Index>(coords.size()));
    if (t <= 0.0) return out;
    // Normal derivative of 2 sin(m pi x) sin(n pi y):
    //   west  (x=0): du/dn = -du/dx -> -2 m pi sin(n pi y)
    //   east  (x=1): du/dn = +du/dx -> 2 m pi (-1)^m sin(n pi y)
    //   south (y=0): du/dn = -du/dy -> -2 n pi sin(m pi x)
    //   north (y=1): du/dn = +du/dy -> 2 n pi (-1)^n sin(m pi x)
    // The sum over the other index collapses into a per-coordinate profile.
    Vec profile = Vec::Zero(trunc);  // coefficient of sin(j pi coord), j = mode along the edge
    for (int j = 1; j <= trunc; ++j) {
        double acc = 0.0;
        for (int i = 1; i <= trunc; ++i) {
            // i is the mode normal to the edge, j the tangential mode.
            double sgn;
            double a;
            switch (edge) {
                case Edge::West:
                    sgn = -1.0;
                    a = amp(i - 1, j - 1);
                    break;
                case Edge::East:
                    sgn = (i % 2 == 0) ? 1.0 : -1.0;
                    a = amp(i - 1, j - 1);
                    break;
                case Edge::South:
                    sgn = -1.0;
                    a = amp(j - 1, i - 1);
                    break;
                case Edge::North:
                default:
                    sgn = (i % 2 == 0) ? 1.0 : -1.0;
                    a = amp(j - 1, i - 1);
                    break;
            }
            acc += sgn * 2.0 * i * kPi * a;
        }
        profile[j - 1] = acc;
    }
    for (size_t p = 0; p < coords.size(); ++p) {
        double v = 0.0;
        for (int j = 1; j <= trunc; ++j) v += profile[j - 1] * std::sin(j * kPi * coords[p]);
        out[static_cast<Eigen::Index>(p)] = kappa0 * v;
    }
    return out;
}

}  // namespace fluxtrack
