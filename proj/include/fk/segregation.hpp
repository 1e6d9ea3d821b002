#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "fk/lattice.hpp"
#include "fk/rng.hpp"

namespace fk {

/// Hole set on a torus, stored as sorted site indices. Classical particles
/// occupy the complement.
struct Configuration {
    std::vector<int> holes;

    Domain domain(const Torus& torus) const;
};

/// What plays the role of the configuration energy in the Gibbs weight:
/// the ground-state electron energy at fixed N, or the grand-canonical
/// electronic free energy at (beta, mu). U = infinity puts the electrons
/// on the hole set with Dirichlet walls (computed directly, not as a
/// large-U limit).
struct EnergyParams {
    enum class Mode { ground, thermal };
    Mode mode = Mode::ground;
    int n_electrons = 0;
    double mu = 0.0;
    double beta = 1.0;
    double u = std::numeric_limits<double>::infinity();
};

using PackedConfig = std::vector<std::uint64_t>;

struct PackedConfigHash {
    std::size_t operator()(const PackedConfig& p) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t w : p) {
            h ^= w;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

/// Shared energy cache; one atomic insert-or-get map, safe across worker
/// threads.
class EnergyMemo {
public:
    double get_or_compute(const PackedConfig& key, const std::function<double()>& compute);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::unordered_map<PackedConfig, double, PackedConfigHash> map_;
};

/// Electron energy / free energy of one configuration. Throws when the
/// parameters are inconsistent (N > |holes| at U = infinity, beta <= 0, ...).
double config_energy(const Torus& torus, const std::vector<int>& holes,
                     const EnergyParams& params);

PackedConfig pack_config(const Torus& torus, const std::vector<int>& holes);
int boundary_size_of(const Torus& torus, const std::vector<int>& holes);

struct SamplerConfig {
    EnergyParams params;
    std::vector<double> beta_schedule;  ///< sampling temperatures, nondecreasing
    int steps_per_beta = 1;
    std::uint64_t seed = 0;
};

struct TrajectoryStep {
    long long step;
    double beta_s;
    double energy;
    int boundary_size;
    bool accepted;
};

struct Trajectory {
    std::uint64_t seed = 0;
    std::vector<TrajectoryStep> steps;
    std::vector<PackedConfig> visited;  ///< configuration after each step
    std::vector<int> initial_holes;
    std::vector<int> final_holes;
    double final_energy = 0.0;
    double acceptance_rate = 0.0;
};

/// Metropolis over hole sets with particle-hole swap moves (random pair,
/// not adjacent-only). Deterministic given the seed. `memo` may be shared
/// between chains; pass nullptr for a private cache.
Trajectory metropolis_run(const Torus& torus, const std::vector<int>& start_holes,
                          const SamplerConfig& cfg, EnergyMemo* memo = nullptr);

/// m distinct hole indices, uniform.
std::vector<int> random_holes(const Torus& torus, int m, Rng& rng);

/// Exhaustive ensemble over all hole sets of size m.
struct ExactEnsemble {
    std::vector<std::vector<int>> hole_sets;
    std::vector<double> energies;
    std::vector<int> boundary_sizes;
    double min_energy = 0.0;
    std::vector<std::size_t> ground_indices;  ///< energies within 1e-9 of the minimum
};

ExactEnsemble exact_ensemble(const Torus& torus, int m, const EnergyParams& params,
                             std::uint64_t cap = kDefaultEnumerationCap);

/// Gibbs-averaged <delta_{w_x, w_y}> at displacement z (translation averaged
/// over x). beta_s may be infinity: uniform over the ground set.
double ensemble_delta_corr(const Torus& torus, const ExactEnsemble& ens, double beta_s,
                           const std::vector<int>& displacement);

/// Gibbs probability of |boundary| > r |torus|.
double ensemble_boundary_tail(const Torus& torus, const ExactEnsemble& ens, double beta_s,
                              double r);

double ensemble_mean_boundary_fraction(const ExactEnsemble& ens, double beta_s, int m);

struct Observables {
    std::map<std::vector<int>, double> delta_corr;  ///< displacement -> value
    double boundary_fraction = 0.0;                 ///< of the final configuration
    std::vector<double> energy_trace;
    double acceptance_rate = 0.0;
};

/// Trajectory observables; correlations use the steps after the burn-in
/// fraction of the run.
Observables trajectory_observables(const Torus& torus, const Trajectory& traj,
                                   const std::vector<std::vector<int>>& displacements,
                                   double burn_in = 0.5);

/// delta correlation of a single configuration at one displacement.
double config_delta_corr(const Torus& torus, const PackedConfig& packed,
                         const std::vector<int>& displacement);

}  // namespace fk
