#include "fk/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace fk {

namespace {

double fermi_occupation(double e, double beta, double mu) {
    const double t = beta * (e - mu);
    if (t > 0) {
        const double x = std::exp(-t);
        return x / (1.0 + x);
    }
    return 1.0 / (1.0 + std::exp(t));
}

double surface_coefficient(int d) {
    return 4.0 * M_PI * std::sqrt(static_cast<double>(d)) / std::pow(sphere_volume(d), 1.0 / d);
}

nlohmann::json domain_inputs(const Domain& domain) {
    return nlohmann::json{{"domain", domain_hash(domain)},
                          {"size", domain.size()}};
}

// Gauss-Legendre nodes/weights on [0, 1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre01(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev estimate, on [-1, 1].
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = 0.5 * (1.0 + t);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);  // weight on [-1,1] is 2/..., halved for [0,1]
    }
    return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

// integral over the segment from `sing` to `other` of
// |2 - 2 cos(theta) - T|^(-1/4); the substitution theta = sing + span u^4
// clusters nodes at `sing`. When `sing` is the root of the integrand's
// argument (T in [0, 4]), the argument is evaluated in product form
// 4 sin(theta* + delta/2) sin(delta/2) around it, which never cancels.
double quarter_power_segment(double sing, double other, double t_level, bool sing_is_root,
                             int order) {
    if (sing == other) return 0.0;
    const auto& [xs, ws] = gauss_legendre01(order);
    const double span = other - sing;
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double u = xs[i];
        const double u3 = u * u * u;
        const double delta = span * u3 * u;
        double g;
        if (sing_is_root) {
            g = std::abs(4.0 * std::sin(sing + 0.5 * delta) * std::sin(0.5 * delta));
        } else if (t_level <= 0.0) {
            const double s = std::sin(0.5 * (sing + delta));
            g = 4.0 * s * s - t_level;  // both terms nonnegative
        } else {
            const double c = std::cos(0.5 * (sing + delta));
            g = (t_level - 4.0) + 4.0 * c * c;  // T > 4 here
        }
        acc += ws[i] * 4.0 * std::abs(span) * u3 * std::pow(g, -0.25);
    }
    return acc;
}

// integral over [0, pi] of |2 - 2 cos(theta) - T|^(-1/4) dtheta
double quarter_power_axis(double t_level, int order) {
    double split;
    bool has_root = t_level > 0.0 && t_level < 4.0;
    if (t_level <= 0.0)
        split = 0.0;
    else if (t_level >= 4.0)
        split = M_PI;
    else
        split = 2.0 * std::asin(0.5 * std::sqrt(t_level));
    return quarter_power_segment(split, 0.0, t_level, has_root, order) +
           quarter_power_segment(split, M_PI, t_level, has_root, order);
}

struct Solved {
    Eigen::VectorXd evals;
    double residual = 0.0;
};

Solved solve_dirichlet(const Domain& domain) {
    Spectrum s = eigensolve(build_dirichlet(domain));
    return {s.eigenvalues, s.max_residual};
}

Solved solve_screened(const Torus& torus, const Domain& holes, double u) {
    Spectrum s = eigensolve(build_screened(torus, holes, u));
    return {s.eigenvalues, s.max_residual};
}

std::vector<Coord> complement_sites(const Torus& torus, const Domain& holes) {
    std::vector<Coord> out;
    for (long long i = 0; i < torus.volume(); ++i) {
        Coord c = torus.coord_of(i);
        if (!holes.contains(c)) out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

double n_star(int d) { return sphere_volume(d) / std::pow(4.0 * M_PI, d); }

namespace {
double alpha_prefactor(int d) {
    return std::pow(2.0, d - 3) /
           (std::pow(M_PI, d) * d * d * d * std::pow(sphere_volume(d), 2.0 / d));
}
}  // namespace

double alpha(double n, int d) {
    if (n < 0.0 || n > 1.0) throw std::invalid_argument("alpha: n must be in [0,1]");
    if (n > 0.5) n = 1.0 - n;
    const double ns = n_star(d);
    const double x = std::min(n, ns);
    return alpha_prefactor(d) * std::pow(x, 1.0 + 2.0 / d);
}

double alpha_checkable(double n, int d) {
    if (n < 0.0 || n > 1.0) throw std::invalid_argument("alpha: n must be in [0,1]");
    if (n > 0.5) n = 1.0 - n;
    if (n > n_star(d)) return 0.0;
    return alpha_prefactor(d) * std::pow(n, 1.0 + 2.0 / d);
}

double alpha_derivative(double n, int d) {
    if (n < 0.0 || n > 1.0) throw std::invalid_argument("alpha: n must be in [0,1]");
    if (n > 0.5) return -alpha_derivative(1.0 - n, d);
    if (n >= n_star(d)) return 0.0;
    return alpha_prefactor(d) * (1.0 + 2.0 / d) * std::pow(n, 2.0 / d);
}

double eta(double u, int d) {
    if (!(u > 4.0 * d)) throw std::invalid_argument("eta: requires U > 4d");
    return std::pow(u - 2.0 * d, 2 * d) / std::pow(u * (u - 4.0 * d), d) - 1.0;
}

double eta_sum_form(double u, int d) {
    if (!(u > 4.0 * d)) throw std::invalid_argument("eta: requires U > 4d");
    const double r = (u - 2.0 * d) * (u - 2.0 * d) / (u * (u - 4.0 * d));
    double sum = 0.0, rj = 1.0;
    for (int j = 1; j <= d; ++j) {
        rj *= r;
        sum += rj;
    }
    const double pref = 2.0 * d / (u - 2.0 * d);
    return pref * pref * sum;
}

double gamma_screening(double u, int d) {
    if (!(u > 4.0 * d)) throw std::invalid_argument("gamma: requires U > 4d");
    return 8.0 * d * d / (u - 2.0 * d) + d * std::pow(2.0, d + 2) * eta(u, d);
}

double gamma_bar_screening(double u, int d) {
    if (!(u > 4.0 * d)) throw std::invalid_argument("gamma_bar: requires U > 4d");
    return (2.0 * d * u + 4.0 * d + 8.0 * d * d) * std::pow(2.0, d) * eta(u, d) +
           16.0 * d * d / (u - 2.0 * d);
}

double c_upper(double beta, double mu, int d) {
    return (surface_coefficient(d) + 2.0 * d * (2.0 * d + 1.0)) / (1.0 + std::exp(-beta * mu));
}

double c_prime_upper(double beta, double mu, double u, int d) {
    if (std::isinf(u)) return 0.0;
    return surface_coefficient(d) / (1.0 + std::exp(-beta * (mu - u)));
}

// ---------------------------------------------------------------------------
// Boundary-geometry matrices
// ---------------------------------------------------------------------------

QMatrix::Class QMatrix::classify() const {
    bool all_zero = true;
    for (int v : entries)
        if (v != 0) all_zero = false;
    if (all_zero) return Class::zero;
    bool dprime = true;
    for (int i = 0; i < d; ++i) {
        if ((*this)(i, i) != 2) dprime = false;
        for (int j = i + 1; j < d; ++j)
            if ((*this)(i, j) + (*this)(j, i) != 4) dprime = false;
    }
    return dprime ? Class::double_prime : Class::prime;
}

int QMatrix::trace() const {
    int t = 0;
    for (int i = 0; i < d; ++i) t += (*this)(i, i);
    return t;
}

double f_caq(const Eigen::VectorXd& c, const Eigen::VectorXd& a, const QMatrix& q) {
    const int d = q.d;
    if (c.size() != d || a.size() != d) throw std::invalid_argument("f_caq: dimension mismatch");
    double quad = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) quad += c[i] * q(i, j) * c[j];
    return a.dot(c) + 0.5 * q.trace() - quad;
}

double mu_estimate(double eps_f, int d, int eps_grid, int c_grid) {
    if (d != 2) throw std::invalid_argument("mu_estimate: implemented for d = 2");
    if (!(eps_f > 0.0) || !(eps_f < 4.0 * d))
        throw std::invalid_argument("mu_estimate: empty Fermi surface, eps_f out of (0, 4d)");

    // Feasible c on the Fermi surface: c2 = d - eps_f/2 - c1 with |c2| <= 1.
    const double shift = d - 0.5 * eps_f;
    std::vector<std::pair<double, double>> curve;
    for (int i = 0; i < c_grid; ++i) {
        const double k1 = -M_PI + (i + 0.5) * (2.0 * M_PI / c_grid);
        const double c1 = std::cos(k1);
        const double c2 = shift - c1;
        if (std::abs(c2) <= 1.0) curve.emplace_back(c1, c2);
    }
    if (curve.empty())
        throw std::invalid_argument("mu_estimate: empty Fermi surface parametrization");

    double best = 1e300;
    for (int q1 = 0; q1 <= 2; ++q1)
        for (int q2 = 0; q2 <= 2; ++q2) {
            // a boundary site has at least one exit, and exits and
            // boundary-neighbor steps share the 2 slots of each axis
            if (q1 + q2 < 1) continue;
            for (int q11 = 0; q11 + q1 <= 2; ++q11)
                for (int q22 = 0; q22 + q2 <= 2; ++q22)
                    for (int q12 = 0; q12 <= 4; ++q12)
                        for (int q21 = 0; q21 <= 4; ++q21) {
                            QMatrix q{2, {2 * q11, q12, q21, 2 * q22}};
                            if (q.classify() != QMatrix::Class::prime) continue;
                            const double half_tr = 0.5 * q.trace();
                            double worst_eps = 1e300;
                            for (int ie = 0; ie < eps_grid; ++ie) {
                                const double eps = 2.0 * d * ie / (eps_grid - 1.0);
                                const double a1 = (2.0 * d - eps) * q1;
                                const double a2 = (2.0 * d - eps) * q2;
                                double max_f = 0.0;
                                for (const auto& [c1, c2] : curve) {
                                    const double quad = 2.0 * q11 * c1 * c1 + 2.0 * q22 * c2 * c2 +
                                                        (q12 + q21) * c1 * c2;
                                    const double f = a1 * c1 + a2 * c2 + half_tr - quad;
                                    max_f = std::max(max_f, std::abs(f));
                                }
                                worst_eps = std::min(worst_eps, max_f);
                            }
                            best = std::min(best, worst_eps);
                        }
        }
    return best;
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

namespace {

std::vector<BoundReport> sandwich_reports(const Domain& domain, int n_electrons,
                                          const BulkModel& bulk, double e_ground,
                                          double eig_residual, double gamma_term,
                                          nlohmann::json inputs) {
    const int d = domain.dimension();
    const double size = static_cast<double>(domain.size());
    const double n = n_electrons / size;
    const double e_n = bulk.energy(n);
    const double e_err = bulk.energy_error(n);
    const double b = static_cast<double>(boundary_stats(domain).boundary_size());
    const double eig_err = n_electrons * eig_residual + 1e-12;

    inputs["N"] = n_electrons;
    inputs["n"] = n;
    inputs["boundary"] = b;

    std::vector<BoundReport> out;
    out.push_back(make_report("energy-upper",
                              size * e_n + b * (2.0 * d * n - e_n), e_ground,
                              (size + b) * e_err + eig_err + 1e-8, inputs));
    out.push_back(make_report("energy-lower", e_ground,
                              size * e_n + (alpha_checkable(n, d) - gamma_term) * b,
                              size * e_err + eig_err + 1e-8, inputs));
    return out;
}

}  // namespace

std::vector<BoundReport> energy_sandwich_check(const Domain& domain, int n_electrons,
                                               const BulkModel& bulk) {
    if (bulk.dimension() != domain.dimension())
        throw std::invalid_argument("energy_sandwich_check: dimension mismatch");
    Solved s = solve_dirichlet(domain);
    nlohmann::json inputs = domain_inputs(domain);
    inputs["U"] = "inf";
    return sandwich_reports(domain, n_electrons, bulk,
                            ground_energy(s.evals, n_electrons), s.residual, 0.0,
                            std::move(inputs));
}

std::vector<BoundReport> energy_sandwich_check(const Torus& torus, const Domain& holes,
                                               int n_electrons, double u,
                                               const BulkModel& bulk) {
    if (bulk.dimension() != torus.dimension())
        throw std::invalid_argument("energy_sandwich_check: dimension mismatch");
    if (std::isinf(u)) return energy_sandwich_check(holes, n_electrons, bulk);
    Solved s = solve_screened(torus, holes, u);
    nlohmann::json inputs = domain_inputs(holes);
    inputs["U"] = u;
    return sandwich_reports(holes, n_electrons, bulk,
                            ground_energy(s.evals, n_electrons), s.residual,
                            gamma_screening(u, torus.dimension()), std::move(inputs));
}

BoundReport screened_lower_check(const Torus& torus, const Domain& holes,
                                 int n_electrons, double u) {
    const int d = torus.dimension();
    if (n_electrons > static_cast<int>(holes.size()))
        throw std::out_of_range("screened_lower_check: N must be <= |holes|");
    Solved screened = solve_screened(torus, holes, u);
    Solved dirichlet = solve_dirichlet(holes);
    const double b = static_cast<double>(boundary_stats(holes).boundary_size());
    const double e_u = ground_energy(screened.evals, n_electrons);
    const double e_inf = ground_energy(dirichlet.evals, n_electrons);
    nlohmann::json inputs = domain_inputs(holes);
    inputs["N"] = n_electrons;
    inputs["U"] = u;
    inputs["boundary"] = b;
    return make_report("energy-lower-screened", e_u,
                       e_inf - gamma_screening(u, d) * b,
                       n_electrons * (screened.residual + dirichlet.residual) + 1e-8,
                       std::move(inputs));
}

std::vector<BoundReport> free_energy_sandwich_check(const Torus& torus, const Domain& holes,
                                                    double beta, double mu, double u,
                                                    const BulkModel& bulk) {
    const int d = torus.dimension();
    if (bulk.dimension() != d)
        throw std::invalid_argument("free_energy_sandwich_check: dimension mismatch");
    const bool u_inf = std::isinf(u);
    if (!u_inf && !(u > 4.0 * d))
        throw std::invalid_argument("free_energy_sandwich_check: requires U > 4d");

    const double v = static_cast<double>(torus.volume());
    const double size = static_cast<double>(holes.size());
    const double b = static_cast<double>(boundary_stats(holes).boundary_size());

    Solved lam = solve_dirichlet(holes);
    const double f_lam = free_energy(lam.evals, beta, mu);

    double f_comp = 0.0, comp_res = 0.0;
    std::vector<Coord> comp = complement_sites(torus, holes);
    if (!comp.empty() && !u_inf) {
        Solved c = solve_dirichlet(Domain(d, comp, torus));
        f_comp = free_energy(c.evals, beta, mu - u);
        comp_res = c.residual;
    }

    double f_total, total_res;
    if (u_inf) {
        f_total = f_lam;
        total_res = lam.residual;
    } else {
        Solved s = solve_screened(torus, holes, u);
        f_total = free_energy(s.evals, beta, mu);
        total_res = s.residual;
    }

    const double f_mu = bulk.free_energy(beta, mu);
    const double f_mu_err = bulk.free_energy_error(beta, mu);
    const double f_mu_u = u_inf ? 0.0 : bulk.free_energy(beta, mu - u);
    const double f_mu_u_err = u_inf ? 0.0 : bulk.free_energy_error(beta, mu - u);

    nlohmann::json inputs = domain_inputs(holes);
    inputs["beta"] = beta;
    inputs["mu"] = mu;
    inputs["U"] = u_inf ? nlohmann::json("inf") : nlohmann::json(u);
    inputs["boundary"] = b;
    inputs["volume"] = v;

    std::vector<BoundReport> out;
    const double eig_f_err = v * total_res + size * lam.residual + (v - size) * comp_res;
    out.push_back(make_report(
        "free-energy-upper",
        c_upper(beta, mu, d) * b + c_prime_upper(beta, mu, u, d) * std::pow(v, 1.0 - 1.0 / d),
        f_total - (size * f_mu + (v - size) * f_mu_u),
        size * f_mu_err + (v - size) * f_mu_u_err + eig_f_err + 1e-8, inputs));
    out.push_back(make_report(
        "free-energy-decoupling-lower", f_total,
        f_lam + f_comp - (u_inf ? 0.0 : gamma_bar_screening(u, d)) * b,
        eig_f_err + 1e-8, inputs));
    out.push_back(make_report("free-energy-bulk-lower", f_lam, size * f_mu,
                              size * (f_mu_err + lam.residual) + 1e-8, inputs));
    return out;
}

BoundReport decorrelation_check(const Torus& torus, const std::vector<Coord>& holes,
                                double beta, double mu, double u) {
    const int d = torus.dimension();
    const long long v = torus.volume();
    const bool u_inf = std::isinf(u);
    if (!u_inf && u < 0) throw std::invalid_argument("decorrelation_check: U must be >= 0");

    std::unordered_set<Coord, CoordHash> hole_set;
    for (const Coord& c : holes) hole_set.insert(torus.reduce(c));
    if (hole_set.size() != holes.size())
        throw std::invalid_argument("decorrelation_check: duplicate hole sites");

    double f_lam = 0.0, f_comp = 0.0, residual = 0.0;
    if (!hole_set.empty()) {
        Solved s = solve_dirichlet(Domain(d, holes, torus));
        f_lam = free_energy(s.evals, beta, mu);
        residual += static_cast<double>(hole_set.size()) * s.residual;
    }
    std::vector<Coord> comp;
    for (long long i = 0; i < v; ++i) {
        Coord c = torus.coord_of(i);
        if (!hole_set.count(c)) comp.push_back(std::move(c));
    }
    if (!comp.empty() && !u_inf) {
        Solved s = solve_dirichlet(Domain(d, comp, torus));
        f_comp = free_energy(s.evals, beta, mu - u);
        residual += static_cast<double>(comp.size()) * s.residual;
    }

    double f_total;
    if (u_inf) {
        f_total = f_lam;
    } else {
        // Screened Hamiltonian on the whole torus, hole set possibly
        // empty or full (a uniform potential shift in those cases).
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(v, v);
        for (long long a = 0; a < v; ++a) {
            Coord x = torus.coord_of(a);
            h(a, a) = 2.0 * d + (hole_set.count(x) ? 0.0 : u);
            for (int i = 0; i < d; ++i) {
                for (int sgn : {+1, -1}) {
                    Coord y = x;
                    y[i] += sgn;
                    h(a, torus.index_of(torus.reduce(std::move(y)))) = -1.0;
                }
            }
        }
        f_total = free_energy(eigenvalues_only(h), beta, mu);
        residual += 1e-10;
    }

    nlohmann::json inputs{{"holes", hole_set.size()},
                          {"volume", v},
                          {"beta", beta},
                          {"mu", mu},
                          {"U", u_inf ? nlohmann::json("inf") : nlohmann::json(u)}};
    return make_report("decorrelation", f_lam + f_comp, f_total, 1e-8 + residual,
                       std::move(inputs));
}

BoundReport free_energy_surface_check(const Domain& domain, double beta, double mu,
                                      const BulkModel& bulk) {
    const int d = domain.dimension();
    if (bulk.dimension() != d)
        throw std::invalid_argument("free_energy_surface_check: dimension mismatch");
    Solved s = solve_dirichlet(domain);
    const double f_lam = free_energy(s.evals, beta, mu);
    const double size = static_cast<double>(domain.size());
    const double b = static_cast<double>(boundary_stats(domain).boundary_size());
    const double f_mu = bulk.free_energy(beta, mu);
    const double f_err = bulk.free_energy_error(beta, mu);
    const double prefactor = 1.0 / (1.0 + std::exp(-beta * mu));
    const double lhs = size * f_mu +
                       prefactor * (surface_coefficient(d) * std::pow(size, (d - 1.0) / d) +
                                    2.0 * d * b);
    nlohmann::json inputs = domain_inputs(domain);
    inputs["beta"] = beta;
    inputs["mu"] = mu;
    inputs["boundary"] = b;
    return make_report("free-energy-surface", lhs, f_lam,
                       size * (f_err + s.residual) + 1e-8, std::move(inputs));
}

std::vector<BoundReport> majorization_check(const Eigen::VectorXd& e,
                                            const Eigen::VectorXd& e_prime,
                                            double beta, double mu,
                                            double tol_partial, double tol_value) {
    if (e.size() != e_prime.size() || e.size() == 0)
        throw std::invalid_argument("majorization_check: sequences must have equal nonzero length");
    const Eigen::Index n = e.size();

    bool ascending = true;
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        if (e[j + 1] < e[j] - 1e-12 || e_prime[j + 1] < e_prime[j] - 1e-12) ascending = false;
    }
    double min_gap = 1e300;
    double run = 0.0;
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        run += e[j] - e_prime[j];
        min_gap = std::min(min_gap, run);
    }
    if (n == 1) min_gap = 0.0;
    const double total_gap = run + (e[n - 1] - e_prime[n - 1]);

    BoundReport pre;
    pre.name = "majorization-precondition";
    pre.lhs = min_gap;
    pre.rhs = 0.0;
    pre.slack = min_gap;
    pre.tol = tol_partial;
    pre.pass = ascending && min_gap >= -tol_partial && std::abs(total_gap) <= tol_partial;
    pre.inputs = nlohmann::json{{"length", n},
                                {"ascending", ascending},
                                {"total_gap", total_gap}};

    const double sum_e = free_energy(e, beta, mu);
    const double sum_ep = free_energy(e_prime, beta, mu);
    BoundReport concl = make_report("majorization-hlp", sum_e, sum_ep, tol_value,
                                    nlohmann::json{{"beta", beta}, {"mu", mu}});
    if (!pre.pass) {
        concl.pass = false;
        concl.inputs["precondition_failed"] = true;
    }
    return {pre, concl};
}

BoundReport singular_integral_check(int d, double eps_f) {
    if (d != 1 && d != 2)
        throw std::invalid_argument("singular_integral_check: d must be 1 or 2");
    auto evaluate = [&](int order, int outer) {
        if (d == 1) return quarter_power_axis(eps_f, order) / M_PI;
        double acc = 0.0;
        for (int m = 0; m < outer; ++m) {
            const double k2 = -M_PI + (m + 0.5) * (2.0 * M_PI / outer);
            const double t = eps_f - (2.0 - 2.0 * std::cos(k2));
            acc += quarter_power_axis(t, order);
        }
        return acc / (M_PI * outer);
    };
    const double coarse = evaluate(48, 2048);
    const double fine = evaluate(96, 4096);
    const double err = 3.0 * std::abs(fine - coarse) + 1e-9;
    nlohmann::json inputs{{"d", d}, {"eps_f", eps_f}, {"integral", fine}, {"error", err}};
    return make_report("singular-integral", 2.0, fine + err, 0.0, std::move(inputs));
}

BoundReport bulk_energy_floor_check(const BulkModel& bulk, const std::vector<double>& fillings) {
    const int d = bulk.dimension();
    const double coeff = 12.0 * std::pow(0.9, d) / std::pow(sphere_volume(d), 2.0 / d);
    double worst = 1e300, worst_lhs = 0, worst_rhs = 0, worst_n = 0, tol = 0;
    for (double n : fillings) {
        const double lhs = bulk.energy(n);
        const double rhs = coeff * std::pow(n, 1.0 + 2.0 / d);
        if (lhs - rhs < worst) {
            worst = lhs - rhs;
            worst_lhs = lhs;
            worst_rhs = rhs;
            worst_n = n;
            tol = bulk.energy_error(n);
        }
    }
    nlohmann::json inputs{{"d", d}, {"fillings", fillings}, {"worst_n", worst_n}};
    return make_report("bulk-energy-floor", worst_lhs, worst_rhs, tol, std::move(inputs));
}

std::vector<BoundReport> gradient_bound_checks(const Domain& domain,
                                               const std::vector<double>& k, double eps_val) {
    const int d = domain.dimension();
    if (domain.ambient())
        throw std::invalid_argument("gradient_bound_checks: free domains only");
    const LatticeOperator op = build_dirichlet(domain);
    const double b_count = static_cast<double>(boundary_stats(domain).boundary_size());
    const int n = static_cast<int>(domain.size());

    // b_k embedded in the full domain basis.
    auto embedded_b = [&](const std::vector<double>& kk) {
        BoundaryVector bv = boundary_vector(domain, kk);
        Eigen::VectorXcd full = Eigen::VectorXcd::Zero(n);
        for (std::size_t i = 0; i < bv.sites.size(); ++i)
            full[domain.index_of(bv.sites[i])] = bv.values[i];
        return full;
    };

    auto norm_sq = [&](const std::vector<double>& kk) {
        return boundary_vector(domain, kk).norm_sq / b_count;
    };
    auto shifted_norm_sq = [&](const std::vector<double>& kk) {
        Eigen::VectorXcd b = embedded_b(kk);
        Eigen::VectorXcd hb = op.matrix * b - eps_val * b;
        return hb.squaredNorm() / b_count;
    };
    auto rayleigh = [&](const std::vector<double>& kk) {
        Eigen::VectorXcd b = embedded_b(kk);
        return (b.dot(op.matrix * b)).real() / b_count;
    };
    auto rayleigh_normalized = [&](const std::vector<double>& kk) {
        Eigen::VectorXcd b = embedded_b(kk);
        return (b.dot(op.matrix * b)).real() / b.squaredNorm();
    };

    const double h = 1e-5;
    auto grad_norm = [&](const std::function<double(const std::vector<double>&)>& f) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) {
            std::vector<double> kp = k, km = k;
            kp[i] += h;
            km[i] -= h;
            const double g = (f(kp) - f(km)) / (2.0 * h);
            acc += g * g;
        }
        return std::sqrt(acc);
    };

    nlohmann::json inputs = domain_inputs(domain);
    inputs["k"] = k;
    inputs["eps"] = eps_val;

    std::vector<BoundReport> out;
    out.push_back(make_report("grad-bknorm", 8.0 * std::pow(d, 2.5), grad_norm(norm_sq),
                              1e-6, inputs));
    out.push_back(make_report("grad-shifted-bknorm", 512.0 * std::pow(d, 5.5),
                              grad_norm(shifted_norm_sq), 1e-6, inputs));
    out.push_back(make_report("grad-rayleigh", 32.0 * std::pow(d, 3.5), grad_norm(rayleigh),
                              1e-6, inputs));

    const double ratio = boundary_vector(domain, k).norm_sq / b_count;
    const double eta_g = std::min(1.0, ratio);
    if (eta_g < 1e-9) {
        BoundReport skip;
        skip.name = "grad-rayleigh-normalized";
        skip.pass = true;
        skip.inputs = inputs;
        skip.inputs["skipped_degenerate"] = true;
        out.push_back(std::move(skip));
    } else {
        BoundReport r = make_report("grad-rayleigh-normalized",
                                    256.0 * std::pow(d, 5.5) / (eta_g * eta_g),
                                    grad_norm(rayleigh_normalized), 1e-6, inputs);
        r.inputs["eta"] = eta_g;
        out.push_back(std::move(r));
    }
    return out;
}

BoundReport fermi_surface_positivity_check(double eps_f) {
    const double value = mu_estimate(eps_f, 2);
    nlohmann::json inputs{{"eps_f", eps_f}, {"d", 2}};
    return make_report("fermi-surface-positivity", value, 1e-12, 0.0, std::move(inputs));
}

std::vector<BoundReport> constants_asymptotics_check(int d, double u_probe, double rel_tol) {
    std::vector<BoundReport> out;
    const double ug = u_probe * gamma_screening(u_probe, d) / (8.0 * d * d);
    const double ue = u_probe * u_probe * eta(u_probe, d) / (4.0 * d * d * d);
    const double ugb = u_probe * gamma_bar_screening(u_probe, d) /
                       (16.0 * d * d + std::pow(2.0, d + 3) * std::pow(d, 4));
    nlohmann::json inputs{{"d", d}, {"U", u_probe}};
    inputs["ratio"] = ug;
    out.push_back(make_report("u-gamma-limit", rel_tol, std::abs(ug - 1.0), 0.0, inputs));
    inputs["ratio"] = ue;
    out.push_back(make_report("u2-eta-limit", rel_tol, std::abs(ue - 1.0), 0.0, inputs));
    inputs["ratio"] = ugb;
    out.push_back(make_report("u-gamma-bar-limit", rel_tol, std::abs(ugb - 1.0), 0.0, inputs));
    return out;
}

double a_of_eps(double eps, const BulkModel& bulk) {
    return alpha_derivative(bulk.filling(eps), bulk.dimension());
}

double alpha_bar_estimate(double beta, double mu, const BulkModel& bulk) {
    const int d = bulk.dimension();
    const double band_mid = 2.0 * d;
    long double linear = 0.0L, quadratic = 0.0L;
    const auto& table = bulk.sorted_table();
    for (double e : table) {
        if (e >= band_mid) break;  // sorted; only the lower half band contributes
        const double a = a_of_eps(e, bulk);
        linear += a * (fermi_occupation(e, beta, mu) - fermi_occupation(4.0 * d - e, beta, mu));
        quadratic += 2.0 * a * a * beta / 4.0;
    }
    const double l = static_cast<double>(linear) / table.size();
    const double q = static_cast<double>(quadratic) / table.size();
    const double scale = (q <= 0.0 || l >= 2.0 * q) ? 1.0 : l / (2.0 * q);
    return scale * l;
}

}  // namespace fk
