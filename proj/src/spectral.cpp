#include "fk/spectral.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

namespace fk {

namespace {

// Clusters closer than this are treated as one degenerate eigenspace and
// re-orthonormalized, so downstream quantities are basis independent.
constexpr double kDegenerateGap = 1e-8;

void reorthonormalize_clusters(Spectrum& s) {
    const int n = static_cast<int>(s.eigenvalues.size());
    int lo = 0;
    while (lo < n) {
        int hi = lo + 1;
        while (hi < n && s.eigenvalues[hi] - s.eigenvalues[hi - 1] < kDegenerateGap) ++hi;
        if (hi - lo > 1) {
            // modified Gram-Schmidt within the cluster
            for (int j = lo; j < hi; ++j) {
                auto col = s.eigenvectors.col(j);
                for (int i = lo; i < j; ++i)
                    col -= s.eigenvectors.col(i).dot(col) * s.eigenvectors.col(i);
                col.normalize();
            }
        }
        lo = hi;
    }
}

}  // namespace

LatticeOperator build_dirichlet(const Domain& domain) {
    const int d = domain.dimension();
    const int n = static_cast<int>(domain.size());
    LatticeOperator op;
    op.kind = LatticeOperator::Kind::dirichlet;
    op.dimension = d;
    op.sites = domain.sites();
    op.matrix = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        op.matrix(a, a) = 2.0 * d;
        for (const Coord& y : domain.neighbors(domain.sites()[a])) {
            int b = domain.index_of(y);
            if (b >= 0) op.matrix(a, b) = -1.0;
        }
    }
    return op;
}

LatticeOperator build_screened(const Torus& torus, const Domain& holes, double U) {
    if (U < 0) throw std::invalid_argument("build_screened: U must be >= 0");
    if (!holes.ambient() || !(*holes.ambient() == torus))
        throw std::invalid_argument("build_screened: holes must be embedded in the torus");
    const int d = torus.dimension();
    const long long v = torus.volume();
    LatticeOperator op;
    op.kind = LatticeOperator::Kind::screened;
    op.dimension = d;
    op.potential = U;
    op.sites.reserve(v);
    op.matrix = Eigen::MatrixXd::Zero(v, v);
    for (long long a = 0; a < v; ++a) op.sites.push_back(torus.coord_of(a));
    for (long long a = 0; a < v; ++a) {
        const Coord& x = op.sites[a];
        op.matrix(a, a) = 2.0 * d + (holes.contains(x) ? 0.0 : U);
        for (int i = 0; i < d; ++i) {
            for (int s : {+1, -1}) {
                Coord y = x;
                y[i] += s;
                y = torus.reduce(std::move(y));
                op.matrix(a, torus.index_of(y)) = -1.0;
            }
        }
    }
    return op;
}

Spectrum eigensolve(const LatticeOperator& op, int cap) {
    const int n = static_cast<int>(op.matrix.rows());
    if (n > cap)
        throw std::runtime_error("eigensolve: matrix dimension " + std::to_string(n) +
                                 " exceeds cap " + std::to_string(cap));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensolve: failed to converge");

    Spectrum s;
    s.eigenvalues = solver.eigenvalues();
    s.eigenvectors = solver.eigenvectors();
    reorthonormalize_clusters(s);

    const double scale = op.matrix.cwiseAbs().rowwise().sum().maxCoeff();
    for (int j = 0; j < n; ++j) {
        double r = (op.matrix * s.eigenvectors.col(j) -
                    s.eigenvalues[j] * s.eigenvectors.col(j)).norm();
        if (r > s.max_residual) s.max_residual = r;
    }
    Eigen::MatrixXd gram = s.eigenvectors.transpose() * s.eigenvectors;
    gram.diagonal().array() -= 1.0;
    s.max_gram_error = gram.cwiseAbs().maxCoeff();
    if (s.max_residual > 1e-9 * scale || s.max_gram_error > 1e-9)
        throw std::runtime_error("eigensolve: residual " + std::to_string(s.max_residual) +
                                 " exceeds tolerance");
    return s;
}

Eigen::VectorXd eigenvalues_only(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigensolve: failed to converge");
    return solver.eigenvalues();
}

double ground_energy(const Eigen::VectorXd& eigenvalues, int n_electrons) {
    if (n_electrons < 0 || n_electrons > eigenvalues.size())
        throw std::out_of_range("ground_energy: electron count out of range");
    return eigenvalues.head(n_electrons).sum();
}

double ground_energy(const Spectrum& spec, int n_electrons) {
    return ground_energy(spec.eigenvalues, n_electrons);
}

double quadratic_form(const Domain& domain, const Eigen::VectorXcd& phi) {
    if (phi.size() != static_cast<Eigen::Index>(domain.size()))
        throw std::invalid_argument("quadratic_form: phi size mismatch");
    double total = 0.0;
    const int n = static_cast<int>(domain.size());
    for (int a = 0; a < n; ++a) {
        for (const Coord& y : domain.neighbors(domain.sites()[a])) {
            int b = domain.index_of(y);
            if (b < 0) {
                total += std::norm(phi[a]);  // partner vanishes outside
            } else if (b > a) {
                total += std::norm(phi[a] - phi[b]);
            }
        }
    }
    return total;
}

BoundaryVector boundary_vector(const Domain& domain, const std::vector<double>& k) {
    if (domain.ambient())
        throw std::invalid_argument("boundary_vector: free domains only");
    if (static_cast<int>(k.size()) != domain.dimension())
        throw std::invalid_argument("boundary_vector: k dimension mismatch");
    const int d = domain.dimension();
    BoundaryVector bv;
    bv.k = k;
    std::vector<std::complex<double>> vals;
    for (const Coord& x : domain.sites()) {
        std::complex<double> exits = 0.0;
        bool on_boundary = false;
        for (int i = 0; i < d; ++i) {
            for (int s : {+1, -1}) {
                Coord y = x;
                y[i] += s;
                if (!domain.contains(y)) {
                    on_boundary = true;
                    exits += std::exp(std::complex<double>(0.0, -s * k[i]));
                }
            }
        }
        if (!on_boundary) continue;
        double kx = 0.0;
        for (int i = 0; i < d; ++i) kx += k[i] * x[i];
        std::complex<double> v = std::exp(std::complex<double>(0.0, -kx)) * exits;
        bv.sites.push_back(x);
        vals.push_back(v);
        bv.norm_sq += std::norm(v);
    }
    bv.values = Eigen::Map<Eigen::VectorXcd>(vals.data(), vals.size());
    return bv;
}

MomentumDensity momentum_density(const Spectrum& spec, const Domain& domain,
                                 int n_electrons, int pts_per_axis) {
    const int d = domain.dimension();
    const int n = static_cast<int>(domain.size());
    if (n_electrons < 0 || n_electrons > n)
        throw std::out_of_range("momentum_density: electron count out of range");
    const int m = pts_per_axis;
    long long grid = 1;
    for (int i = 0; i < d; ++i) grid *= m;

    MomentumDensity md;
    md.pts_per_axis = m;
    md.n_electrons = n_electrons;
    md.values.resize(grid);
    md.min_value = n_electrons == 0 ? 0.0 : 1e300;
    md.max_value = 0.0;

    const double h = 2.0 * M_PI / m;
    const auto occ = spec.eigenvectors.leftCols(n_electrons);
    Eigen::VectorXcd phases(n);
    std::vector<int> idx(d, 0);
    double sum = 0.0;
    for (long long g = 0; g < grid; ++g) {
        for (int a = 0; a < n; ++a) {
            double kx = 0.0;
            for (int i = 0; i < d; ++i) {
                double ki = -M_PI + (idx[i] + 0.5) * h;
                kx += ki * domain.sites()[a][i];
            }
            phases[a] = std::exp(std::complex<double>(0.0, kx));
        }
        Eigen::VectorXcd hat = occ.transpose() * phases;
        double rho = hat.squaredNorm();
        md.values[g] = rho;
        sum += rho;
        if (n_electrons > 0) {
            md.min_value = std::min(md.min_value, rho);
            md.max_value = std::max(md.max_value, rho);
        }
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[i] < m) break;
            idx[i] = 0;
        }
    }
    md.integral = sum / static_cast<double>(grid);
    return md;
}

double free_energy(const Eigen::VectorXd& eigenvalues, double beta, double mu) {
    if (beta <= 0) throw std::invalid_argument("free_energy: beta must be > 0");
    double f = 0.0;
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
        const double t = -beta * (eigenvalues[j] - mu);
        // log(1 + e^t), safe for either sign of t
        const double softplus = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
        f -= softplus / beta;
    }
    return f;
}

double free_energy(const Spectrum& spec, double beta, double mu) {
    return free_energy(spec.eigenvalues, beta, mu);
}

DecayProfile decay_profile(const LatticeOperator& op, const Spectrum& spec,
                           const Torus& torus, const Domain& holes) {
    if (op.kind != LatticeOperator::Kind::screened)
        throw std::invalid_argument("decay_profile: screened operator required");
    const int d = torus.dimension();
    const long long v = torus.volume();
    const int n_low = static_cast<int>(holes.size());

    // BFS distances from the hole set over the torus graph.
    std::vector<int> dist(v, -1);
    std::queue<long long> q;
    for (const Coord& x : holes.sites()) {
        dist[torus.index_of(x)] = 0;
        q.push(torus.index_of(x));
    }
    int max_dist = 0;
    while (!q.empty()) {
        long long a = q.front();
        q.pop();
        Coord x = torus.coord_of(a);
        for (int i = 0; i < d; ++i) {
            for (int s : {+1, -1}) {
                Coord y = x;
                y[i] += s;
                long long b = torus.index_of(torus.reduce(std::move(y)));
                if (dist[b] == -1) {
                    dist[b] = dist[a] + 1;
                    max_dist = std::max(max_dist, dist[b]);
                    q.push(b);
                }
            }
        }
    }

    DecayProfile profile;
    profile.max_weight.assign(max_dist + 1, 0.0);
    for (long long a = 0; a < v; ++a) {
        double w = spec.eigenvectors.row(a).head(n_low).squaredNorm();
        profile.max_weight[dist[a]] = std::max(profile.max_weight[dist[a]], w);
    }
    profile.bound_valid = op.potential > 4.0 * d;
    const double ratio = profile.bound_valid
                             ? 2.0 * d / (op.potential - 2.0 * d)
                             : 1.0;
    profile.bound.resize(max_dist + 1);
    for (int nd = 0; nd <= max_dist; ++nd)
        profile.bound[nd] = std::pow(ratio, 2 * nd);
    return profile;
}

}  // namespace fk
