#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fk/bulk.hpp"
#include "fk/lattice.hpp"
#include "fk/report.hpp"
#include "fk/spectral.hpp"

namespace fk {

// ---------------------------------------------------------------------------
// Explicit constants
// ---------------------------------------------------------------------------

/// Filling threshold |S_d| / (4 pi)^d below which the closed-form boundary
/// constant applies.
double n_star(int d);

/// Boundary-term constant alpha(n) = 2^(d-3) n^(1+2/d) / (pi^d d^3 |S_d|^(2/d))
/// for n <= n_star, extended as the constant alpha(n_star) up to 1/2 and
/// mirrored by alpha(1-n) = alpha(n). The extension only feeds a_of_eps;
/// quantitative checks use alpha_checkable.
double alpha(double n, int d);

/// Closed form where it is proven, zero elsewhere.
double alpha_checkable(double n, int d);

/// One-sided derivative of the extended alpha; zero on the plateau.
double alpha_derivative(double n, int d);

/// eta(U) = (U-2d)^(2d) / (U(U-4d))^d - 1, for U > 4d.
double eta(double u, int d);
/// Same quantity via the finite geometric sum; agrees to 1e-12.
double eta_sum_form(double u, int d);

/// gamma(U) = 8 d^2 / (U-2d) + d 2^(d+2) eta(U), for U > 4d.
double gamma_screening(double u, int d);

/// gamma_bar(U) = (2dU + 4d + 8d^2) 2^d eta(U) + (4d)^2 / (U-2d), for U > 4d.
double gamma_bar_screening(double u, int d);

/// C_{d,mu} = (4 pi sqrt(d) / |S_d|^(1/d) + 2d(2d+1)) / (1 + e^(-beta mu)).
double c_upper(double beta, double mu, int d);
/// C'_{d,mu} = 4 pi sqrt(d) / |S_d|^(1/d) / (1 + e^(-beta(mu-U))); 0 at U = inf.
double c_prime_upper(double beta, double mu, double u, int d);

// ---------------------------------------------------------------------------
// Boundary-geometry matrices
// ---------------------------------------------------------------------------

/// Q = ((1+delta_ij) q_ij): diagonal entries 2 q_ii in 0..4, off-diagonal
/// q_ij in 0..4.
struct QMatrix {
    int d = 0;
    std::vector<int> entries;  ///< row-major d*d

    enum class Class { zero, prime, double_prime };
    Class classify() const;

    int operator()(int i, int j) const { return entries[i * d + j]; }
    int trace() const;
};

/// F(c; a, Q) = (a, c) + Tr Q / 2 - (c, Q c).
double f_caq(const Eigen::VectorXd& c, const Eigen::VectorXd& a, const QMatrix& q);

/// Grid estimate of min over (a, Q in Q') and epsilon in [0,2d] of the
/// maximum of |F| along the Fermi surface at eps_f. d = 2 only.
double mu_estimate(double eps_f, int d, int eps_grid = 64, int c_grid = 256);

// ---------------------------------------------------------------------------
// Inequality checks
// ---------------------------------------------------------------------------

/// Ground-state energy sandwich at U = infinity:
///   upper:  |L| e(n) + |dL| (2dn - e(n)) >= E_{L,N}
///   lower:  E_{L,N} >= |L| e(n) + alpha_checkable(n) |dL|
std::vector<BoundReport> energy_sandwich_check(const Domain& domain, int n_electrons,
                                               const BulkModel& bulk);

/// Same sandwich at finite U (holes embedded in a torus); the lower side
/// subtracts gamma(U) |dL|.
std::vector<BoundReport> energy_sandwich_check(const Torus& torus, const Domain& holes,
                                               int n_electrons, double u,
                                               const BulkModel& bulk);

/// E^U_{L,N} >= E_{L,N} - gamma(U) |dL|, U > 4d.
BoundReport screened_lower_check(const Torus& torus, const Domain& holes,
                                 int n_electrons, double u);

/// Free-energy sandwich on a torus: the upper bound with C, C' constants,
/// the decoupling lower bound with gamma_bar(U), and the weak bulk lower
/// bound F_L >= |L| f. U may be infinity.
std::vector<BoundReport> free_energy_sandwich_check(const Torus& torus, const Domain& holes,
                                                    double beta, double mu, double u,
                                                    const BulkModel& bulk);

/// F^U_{O,L} <= F_L(mu) + F_{O\L}(mu - U). `holes` may be empty or all of
/// the torus. Any U >= 0 (or infinity).
BoundReport decorrelation_check(const Torus& torus, const std::vector<Coord>& holes,
                                double beta, double mu, double u);

/// F_L <= |L| f + (4 pi sqrt(d)/|S_d|^(1/d) |L|^((d-1)/d) + 2d |dL|) / (1+e^(-beta mu)).
BoundReport free_energy_surface_check(const Domain& domain, double beta, double mu,
                                      const BulkModel& bulk);

/// Partial-sum domination of ascending sequences plus the resulting
/// free-energy comparison sum g(e_j) >= sum g(e'_j) for the concave
/// g(e) = -(1/beta) log(1 + e^(-beta(e-mu))). Returns the precondition
/// report and the conclusion report; the conclusion is skipped (failed,
/// flagged in inputs) when the precondition does not hold.
std::vector<BoundReport> majorization_check(const Eigen::VectorXd& e,
                                            const Eigen::VectorXd& e_prime,
                                            double beta, double mu,
                                            double tol_partial, double tol_value);

/// (2pi)^-d integral of |eps_k - eps_F|^(-1/4) < 2; d in {1, 2}.
/// The report's rhs already includes the quadrature error estimate.
BoundReport singular_integral_check(int d, double eps_f);

/// e(n) >= 12 (9/10)^d n^(1+2/d) / |S_d|^(2/d) on the given fillings
/// (low-filling regime). Reports the worst grid point.
BoundReport bulk_energy_floor_check(const BulkModel& bulk, const std::vector<double>& fillings);

/// Finite-difference gradient norms of the boundary-vector functionals at
/// one (domain, k, epsilon) sample, against their stated constants:
///   grad-bknorm:            || grad ||b_k||^2 / |dL| ||        <= 8 d^(5/2)
///   grad-shifted-bknorm:    || grad ||(h-eps) b_k||^2 / |dL| || <= 2^9 d^(11/2)
///   grad-rayleigh:          || grad (b_k, h b_k) / |dL| ||      <= 32 d^(7/2)
///   grad-rayleigh-normalized: with eta = min(1, ||b_k||^2/|dL|),
///                           || grad (b_k, h b_k) / ||b_k||^2 || <= eta^-2 2^8 d^(11/2)
std::vector<BoundReport> gradient_bound_checks(const Domain& domain,
                                               const std::vector<double>& k, double eps_val);

/// mu_estimate(eps_f, 2) > 0.
BoundReport fermi_surface_positivity_check(double eps_f);

/// U gamma(U) -> 8d^2, U^2 eta(U) -> 4d^3, U gamma_bar(U) -> 16d^2 + 2^(d+3) d^4,
/// each within `rel_tol` at the probe U.
std::vector<BoundReport> constants_asymptotics_check(int d, double u_probe = 1e4,
                                                     double rel_tol = 0.01);

// ---------------------------------------------------------------------------
// Positive-temperature helpers
// ---------------------------------------------------------------------------

/// a(eps) = alpha'(n(eps)): positive below 2d, antisymmetric under
/// eps -> 4d - eps, zero on the plateau.
double a_of_eps(double eps, const BulkModel& bulk);

/// Diagnostic size of the free-energy boundary term: s times the zone
/// integral of a(eps)(g'(eps) - g'(4d - eps)) over eps < 2d, with the scale
/// s in (0,1] shrunk until the quadratic correction estimate stays below
/// half the linear term. Not a verified bound constant.
double alpha_bar_estimate(double beta, double mu, const BulkModel& bulk);

}  // namespace fk
