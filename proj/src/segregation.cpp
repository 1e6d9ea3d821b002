#include "fk/segregation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fk/spectral.hpp"

namespace fk {

namespace {

std::vector<std::vector<int>> neighbor_table(const Torus& torus) {
    const int d = torus.dimension();
    const long long v = torus.volume();
    std::vector<std::vector<int>> nb(v);
    for (long long a = 0; a < v; ++a) {
        Coord x = torus.coord_of(a);
        nb[a].reserve(2 * d);
        for (int i = 0; i < d; ++i) {
            for (int s : {+1, -1}) {
                Coord y = x;
                y[i] += s;
                nb[a].push_back(static_cast<int>(torus.index_of(torus.reduce(std::move(y)))));
            }
        }
    }
    return nb;
}

Eigen::MatrixXd dirichlet_matrix(const Torus& torus, const std::vector<int>& holes,
                                 const std::vector<std::vector<int>>& nb) {
    const int d = torus.dimension();
    const int m = static_cast<int>(holes.size());
    std::vector<int> pos(torus.volume(), -1);
    for (int i = 0; i < m; ++i) pos[holes[i]] = i;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        h(i, i) = 2.0 * d;
        for (int y : nb[holes[i]]) {
            if (pos[y] >= 0) h(i, pos[y]) = -1.0;
        }
    }
    return h;
}

Eigen::MatrixXd screened_matrix(const Torus& torus, const std::vector<int>& holes,
                                const std::vector<std::vector<int>>& nb, double u) {
    const int d = torus.dimension();
    const long long v = torus.volume();
    std::vector<char> is_hole(v, 0);
    for (int i : holes) is_hole[i] = 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(v, v);
    for (long long a = 0; a < v; ++a) {
        h(a, a) = 2.0 * d + (is_hole[a] ? 0.0 : u);
        for (int y : nb[a]) h(a, y) = -1.0;
    }
    return h;
}

double config_energy_with_tables(const Torus& torus, const std::vector<int>& holes,
                                 const EnergyParams& params,
                                 const std::vector<std::vector<int>>& nb) {
    const bool u_inf = std::isinf(params.u);
    if (!u_inf && params.u < 0)
        throw std::invalid_argument("config_energy: U must be >= 0");

    if (params.mode == EnergyParams::Mode::ground) {
        if (params.n_electrons == 0) return 0.0;
        if (u_inf) {
            if (params.n_electrons > static_cast<int>(holes.size()))
                throw std::invalid_argument("config_energy: N exceeds hole count at U = inf");
            Eigen::VectorXd evals = eigenvalues_only(dirichlet_matrix(torus, holes, nb));
            return ground_energy(evals, params.n_electrons);
        }
        Eigen::VectorXd evals = eigenvalues_only(screened_matrix(torus, holes, nb, params.u));
        return ground_energy(evals, params.n_electrons);
    }

    if (params.beta <= 0) throw std::invalid_argument("config_energy: beta must be > 0");
    if (u_inf) {
        if (holes.empty()) return 0.0;
        Eigen::VectorXd evals = eigenvalues_only(dirichlet_matrix(torus, holes, nb));
        return free_energy(evals, params.beta, params.mu);
    }
    Eigen::VectorXd evals = eigenvalues_only(screened_matrix(torus, holes, nb, params.u));
    return free_energy(evals, params.beta, params.mu);
}

}  // namespace

Domain Configuration::domain(const Torus& torus) const {
    std::vector<Coord> sites;
    sites.reserve(holes.size());
    for (int i : holes) sites.push_back(torus.coord_of(i));
    return Domain(torus.dimension(), std::move(sites), torus);
}

double EnergyMemo::get_or_compute(const PackedConfig& key,
                                  const std::function<double()>& compute) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
    }
    const double value = compute();
    std::lock_guard<std::mutex> lock(mutex_);
    return map_.emplace(key, value).first->second;
}

std::size_t EnergyMemo::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return map_.size();
}

double config_energy(const Torus& torus, const std::vector<int>& holes,
                     const EnergyParams& params) {
    return config_energy_with_tables(torus, holes, params, neighbor_table(torus));
}

PackedConfig pack_config(const Torus& torus, const std::vector<int>& holes) {
    PackedConfig p((torus.volume() + 63) / 64, 0);
    for (int i : holes) p[i >> 6] |= 1ull << (i & 63);
    return p;
}

int boundary_size_of(const Torus& torus, const std::vector<int>& holes) {
    const auto nb = neighbor_table(torus);
    std::vector<char> is_hole(torus.volume(), 0);
    for (int i : holes) is_hole[i] = 1;
    int b = 0;
    for (int i : holes) {
        for (int y : nb[i]) {
            if (!is_hole[y]) {
                ++b;
                break;
            }
        }
    }
    return b;
}

std::vector<int> random_holes(const Torus& torus, int m, Rng& rng) {
    const long long v = torus.volume();
    if (m < 0 || m > v) throw std::invalid_argument("random_holes: bad m");
    std::vector<int> all(v);
    for (long long i = 0; i < v; ++i) all[i] = static_cast<int>(i);
    for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(v - i));
        std::swap(all[i], all[j]);
    }
    std::vector<int> holes(all.begin(), all.begin() + m);
    std::sort(holes.begin(), holes.end());
    return holes;
}

Trajectory metropolis_run(const Torus& torus, const std::vector<int>& start_holes,
                          const SamplerConfig& cfg, EnergyMemo* memo) {
    if (cfg.beta_schedule.empty())
        throw std::invalid_argument("metropolis_run: empty schedule");
    for (std::size_t i = 0; i + 1 < cfg.beta_schedule.size(); ++i) {
        if (cfg.beta_schedule[i + 1] < cfg.beta_schedule[i])
            throw std::invalid_argument("metropolis_run: schedule must be nondecreasing");
    }
    if (cfg.steps_per_beta < 1)
        throw std::invalid_argument("metropolis_run: steps must be >= 1");

    const long long v = torus.volume();
    const int m = static_cast<int>(start_holes.size());
    const auto nb = neighbor_table(torus);

    EnergyMemo local;
    EnergyMemo& cache = memo ? *memo : local;
    auto energy_of = [&](const std::vector<int>& holes) {
        return cache.get_or_compute(pack_config(torus, holes), [&] {
            return config_energy_with_tables(torus, holes, cfg.params, nb);
        });
    };

    std::vector<char> is_hole(v, 0);
    std::vector<int> holes = start_holes;
    std::sort(holes.begin(), holes.end());
    std::vector<int> particles;
    for (int i : holes) is_hole[i] = 1;
    for (long long i = 0; i < v; ++i)
        if (!is_hole[i]) particles.push_back(static_cast<int>(i));

    auto boundary_now = [&]() {
        int b = 0;
        for (int i : holes) {
            for (int y : nb[i]) {
                if (!is_hole[y]) {
                    ++b;
                    break;
                }
            }
        }
        return b;
    };

    Rng rng(cfg.seed);
    Trajectory traj;
    traj.seed = cfg.seed;
    traj.initial_holes = holes;
    double energy = energy_of(holes);

    long long step = 0, accepted_count = 0;
    const long long total = static_cast<long long>(cfg.beta_schedule.size()) * cfg.steps_per_beta;
    traj.steps.reserve(total);
    traj.visited.reserve(total);

    for (double beta_s : cfg.beta_schedule) {
        for (int s = 0; s < cfg.steps_per_beta; ++s, ++step) {
            const int hi = static_cast<int>(rng.uniform_int(m));
            const int pi = static_cast<int>(rng.uniform_int(v - m));
            const int h = holes[hi];
            const int p = particles[pi];

            std::vector<int> proposal = holes;
            proposal[hi] = p;
            std::sort(proposal.begin(), proposal.end());
            const double e_new = energy_of(proposal);
            const double delta = e_new - energy;

            double p_acc;
            if (delta <= 0)
                p_acc = 1.0;  // includes equal-energy moves in the frozen limit
            else if (std::isinf(beta_s))
                p_acc = 0.0;
            else
                p_acc = std::exp(-beta_s * delta);
            const bool accept = rng.uniform() < p_acc;
            if (accept) {
                holes[hi] = p;
                particles[pi] = h;
                is_hole[h] = 0;
                is_hole[p] = 1;
                energy = e_new;
                ++accepted_count;
            }
            traj.steps.push_back({step, beta_s, energy, boundary_now(), accept});
            traj.visited.push_back(pack_config(torus, holes));
        }
    }

    std::sort(holes.begin(), holes.end());
    traj.final_holes = holes;
    traj.final_energy = energy;
    traj.acceptance_rate = total ? static_cast<double>(accepted_count) / total : 0.0;
    return traj;
}

ExactEnsemble exact_ensemble(const Torus& torus, int m, const EnergyParams& params,
                             std::uint64_t cap) {
    const long long v = torus.volume();
    if (m <= 0 || m > v) throw std::invalid_argument("exact_ensemble: need 0 < m <= |torus|");
    if (subset_count(v, m) > cap)
        throw std::runtime_error("exact_ensemble: subset count exceeds cap");

    const auto nb = neighbor_table(torus);
    std::vector<char> is_hole(v, 0);

    ExactEnsemble ens;
    std::vector<int> pick(m);
    for (int i = 0; i < m; ++i) pick[i] = i;
    while (true) {
        ens.hole_sets.push_back(pick);
        ens.energies.push_back(config_energy_with_tables(torus, pick, params, nb));
        std::fill(is_hole.begin(), is_hole.end(), 0);
        for (int i : pick) is_hole[i] = 1;
        int b = 0;
        for (int i : pick) {
            for (int y : nb[i]) {
                if (!is_hole[y]) {
                    ++b;
                    break;
                }
            }
        }
        ens.boundary_sizes.push_back(b);

        int i = m - 1;
        while (i >= 0 && pick[i] == v - m + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
    }

    ens.min_energy = *std::min_element(ens.energies.begin(), ens.energies.end());
    for (std::size_t i = 0; i < ens.energies.size(); ++i)
        if (ens.energies[i] <= ens.min_energy + 1e-9) ens.ground_indices.push_back(i);
    return ens;
}

namespace {

std::vector<double> gibbs_weights(const ExactEnsemble& ens, double beta_s) {
    std::vector<double> w(ens.energies.size(), 0.0);
    if (std::isinf(beta_s)) {
        for (std::size_t i : ens.ground_indices) w[i] = 1.0;
    } else {
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = std::exp(-beta_s * (ens.energies[i] - ens.min_energy));
    }
    double z = 0.0;
    for (double x : w) z += x;
    for (double& x : w) x /= z;
    return w;
}

}  // namespace

double config_delta_corr(const Torus& torus, const PackedConfig& packed,
                         const std::vector<int>& displacement) {
    const long long v = torus.volume();
    long long equal = 0;
    for (long long a = 0; a < v; ++a) {
        Coord x = torus.coord_of(a);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += displacement[i];
        const long long b = torus.index_of(torus.reduce(std::move(x)));
        const bool wa = packed[a >> 6] >> (a & 63) & 1;
        const bool wb = packed[b >> 6] >> (b & 63) & 1;
        if (wa == wb) ++equal;
    }
    return static_cast<double>(equal) / static_cast<double>(v);
}

double ensemble_delta_corr(const Torus& torus, const ExactEnsemble& ens, double beta_s,
                           const std::vector<int>& displacement) {
    const std::vector<double> w = gibbs_weights(ens, beta_s);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] == 0.0) continue;
        acc += w[i] * config_delta_corr(torus, pack_config(torus, ens.hole_sets[i]),
                                        displacement);
    }
    return acc;
}

double ensemble_boundary_tail(const Torus& torus, const ExactEnsemble& ens, double beta_s,
                              double r) {
    const std::vector<double> w = gibbs_weights(ens, beta_s);
    const double threshold = r * static_cast<double>(torus.volume());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (ens.boundary_sizes[i] > threshold) acc += w[i];
    return acc;
}

double ensemble_mean_boundary_fraction(const ExactEnsemble& ens, double beta_s, int m) {
    const std::vector<double> w = gibbs_weights(ens, beta_s);
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        acc += w[i] * ens.boundary_sizes[i] / static_cast<double>(m);
    return acc;
}

Observables trajectory_observables(const Torus& torus, const Trajectory& traj,
                                   const std::vector<std::vector<int>>& displacements,
                                   double burn_in) {
    if (burn_in < 0.0 || burn_in >= 1.0)
        throw std::invalid_argument("observables: burn_in must be in [0,1)");
    Observables obs;
    obs.acceptance_rate = traj.acceptance_rate;
    obs.energy_trace.reserve(traj.steps.size());
    for (const auto& s : traj.steps) obs.energy_trace.push_back(s.energy);

    const std::size_t first = static_cast<std::size_t>(burn_in * traj.visited.size());
    for (const auto& z : displacements) {
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t i = first; i < traj.visited.size(); ++i, ++count)
            acc += config_delta_corr(torus, traj.visited[i], z);
        obs.delta_corr[z] = count ? acc / count : 0.0;
    }
    obs.boundary_fraction = traj.final_holes.empty()
                                ? 0.0
                                : static_cast<double>(boundary_size_of(torus, traj.final_holes)) /
                                      static_cast<double>(traj.final_holes.size());
    return obs;
}

}  // namespace fk
