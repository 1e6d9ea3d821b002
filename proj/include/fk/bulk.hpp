#pragma once

#include <memory>
#include <vector>

#include "fk/report.hpp"

namespace fk {

/// Tight-binding dispersion 2d - 2 sum_i cos k_i, for k in [-pi, pi]^d.
double dispersion(const std::vector<double>& k);

/// Volume of the unit ball in d dimensions, pi^(d/2) / Gamma(d/2 + 1).
double sphere_volume(int d);

/// m = 4096 (d=1), 1024 (d=2), 128 (d>=3).
int default_bulk_points(int d);

/// Infinite-lattice reference quantities, evaluated by midpoint quadrature
/// on a uniform m^d grid over the Brillouin zone. The model keeps the sorted
/// table of dispersion samples (the density table) plus a half-resolution
/// sibling used for refinement-based error estimates.
class BulkModel {
public:
    BulkModel(int d, int pts_per_axis);

    int dimension() const { return d_; }
    int pts_per_axis() const { return m_; }
    std::size_t grid_size() const { return sorted_.size(); }

    /// n(eps): fraction of the zone with dispersion < eps.
    double filling(double eps) const;
    /// eps_F(n): bisection on the monotone density table; ties resolve to
    /// the lowest level reaching the target filling. Endpoints are exact.
    double fermi_level(double n) const;
    /// e(n): mean dispersion over the filled fraction n, times n.
    double energy(double n) const;
    /// f(beta, mu) for free electrons.
    double free_energy(double beta, double mu) const;

    /// Refinement-based error bounds (difference against the coarse table
    /// plus a granularity floor), reported alongside results.
    double energy_error(double n) const;
    double free_energy_error(double beta, double mu) const;

    /// e_j* for j = 1..levels: dispersion averaged over the level set between
    /// fillings (j-1)/levels and j/levels. Nondecreasing; sums to 2d*levels.
    std::vector<double> level_set_averages(int levels) const;

    double mean() const;  ///< = 2d up to rounding

    /// Sorted dispersion samples (the density table itself).
    const std::vector<double>& sorted_table() const { return sorted_; }

private:
    BulkModel(int d, int pts_per_axis, bool build_coarse);
    void build_table();
    double partial_sum(double cells) const;  ///< sum of the lowest `cells` sorted values

    int d_;
    int m_;
    std::vector<double> sorted_;
    std::vector<double> prefix_;  ///< prefix_[i] = sum of first i sorted values
    std::unique_ptr<BulkModel> coarse_;
};

/// Shared per-(d, m) table, built once and reused across checks.
const BulkModel& shared_bulk_model(int d, int pts_per_axis);
const BulkModel& shared_bulk_model(int d);

/// Checks (8/pi^2) |k|^2 <= eps_k <= |k|^2 on samples with |k|_inf <= pi/2
/// (the quadratic lower bound on the cosine fails beyond pi/2, so the
/// window is restricted). Reports the worst sample.
BoundReport dispersion_window_check(int d, int samples_per_axis);

}  // namespace fk
