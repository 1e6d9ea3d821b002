#pragma once

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "fk/lattice.hpp"

namespace fk {

/// One-particle Hamiltonian on an ordered site basis: hopping -1 between
/// nearest neighbors, diagonal 2d, plus U outside the hole set for the
/// screened kind. The "dirichlet" kind lives on the domain itself and is
/// positive semidefinite with spectrum in [0, 4d].
struct LatticeOperator {
    enum class Kind { dirichlet, screened };

    Kind kind = Kind::dirichlet;
    int dimension = 0;
    std::vector<Coord> sites;  ///< basis order of the matrix
    Eigen::MatrixXd matrix;
    double potential = 0.0;    ///< U for the screened kind
};

LatticeOperator build_dirichlet(const Domain& domain);

/// h on the whole torus with potential U on the complement of `holes`.
/// Basis order is the torus row-major site order.
LatticeOperator build_screened(const Torus& torus, const Domain& holes, double U);

struct Spectrum {
    Eigen::VectorXd eigenvalues;   ///< ascending
    Eigen::MatrixXd eigenvectors;  ///< orthonormal columns, basis = op.sites
    double max_residual = 0.0;     ///< max_j ||H phi_j - e_j phi_j||
    double max_gram_error = 0.0;   ///< ||Phi^T Phi - 1||_max
};

inline constexpr int kDefaultEigensolveCap = 4096;

Spectrum eigensolve(const LatticeOperator& op, int cap = kDefaultEigensolveCap);

/// Eigenvalues only; used where eigenvectors are not needed (sampling loops).
Eigen::VectorXd eigenvalues_only(const Eigen::MatrixXd& h);

/// Sum of the N lowest eigenvalues. N = 0 gives 0.
double ground_energy(const Spectrum& spec, int n_electrons);
double ground_energy(const Eigen::VectorXd& eigenvalues, int n_electrons);

/// Sum over Z^d (or torus) nearest-neighbor pairs of |phi(x)-phi(y)|^2 with
/// phi extended by zero outside the domain. Equals the matrix quadratic form.
double quadratic_form(const Domain& domain, const Eigen::VectorXcd& phi);

struct BoundaryVector {
    std::vector<double> k;
    std::vector<Coord> sites;     ///< the boundary sites, in order
    Eigen::VectorXcd values;
    double norm_sq = 0.0;
};

/// b_k(x) = 1{x on boundary} e^{-i k.x} sum over exits e of e^{-i k.e}.
/// Free domains only.
BoundaryVector boundary_vector(const Domain& domain, const std::vector<double>& k);

struct MomentumDensity {
    int pts_per_axis = 0;          ///< midpoint grid over [-pi, pi]^d
    int n_electrons = 0;
    std::vector<double> values;    ///< row-major over the grid
    double min_value = 0.0;
    double max_value = 0.0;
    double integral = 0.0;         ///< (2pi)^-d integral; equals N by Plancherel
};

MomentumDensity momentum_density(const Spectrum& spec, const Domain& domain,
                                 int n_electrons, int pts_per_axis);

/// Grand-canonical free energy of free fermions with the given one-particle
/// levels: -(1/beta) sum_j log(1 + exp(-beta (e_j - mu))), evaluated in
/// overflow-safe form.
double free_energy(const Eigen::VectorXd& eigenvalues, double beta, double mu);
double free_energy(const Spectrum& spec, double beta, double mu);

/// For the screened operator with U > 4d: profile[n] is the maximum over
/// sites at torus distance n from the hole set of sum_{j<=|holes|}
/// |phi_j(x)|^2. The bound (2d/(U-2d))^{2n} applies when U > 4d.
struct DecayProfile {
    std::vector<double> max_weight;   ///< indexed by distance 0,1,...
    std::vector<double> bound;        ///< (2d/(U-2d))^{2n}
    bool bound_valid = false;         ///< false when U <= 4d (warned, not failed)
};

DecayProfile decay_profile(const LatticeOperator& op, const Spectrum& spec,
                           const Torus& torus, const Domain& holes);

}  // namespace fk
