#include <doctest.h>

#include <cmath>
#include <map>

#include "fk/segregation.hpp"
#include "fk/spectral.hpp"

using namespace fk;

namespace {

EnergyParams ground(int n_electrons) {
    EnergyParams p;
    p.mode = EnergyParams::Mode::ground;
    p.n_electrons = n_electrons;
    return p;
}

bool is_contiguous_ring_block(const std::vector<int>& holes, int length) {
    // all cyclic translates of {0..m-1}
    const int m = static_cast<int>(holes.size());
    for (int start = 0; start < length; ++start) {
        std::vector<int> blockv;
        for (int i = 0; i < m; ++i) blockv.push_back((start + i) % length);
        std::sort(blockv.begin(), blockv.end());
        if (blockv == holes) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("configuration energies against closed forms") {
    Torus ring({8});
    // electrons on a 4-site segment: two lowest open-chain levels
    double expected = (2.0 - 2.0 * std::cos(M_PI / 5.0)) + (2.0 - 2.0 * std::cos(2.0 * M_PI / 5.0));
    CHECK(config_energy(ring, {0, 1, 2, 3}, ground(2)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(config_energy(ring, {0, 1, 2, 3}, ground(0)) == 0.0);
    CHECK_THROWS(config_energy(ring, {0, 1}, ground(3)));

    // holes everywhere: periodic ring spectrum 2 - 2 cos(2 pi m / L)
    Torus ring6({6});
    std::vector<int> all{0, 1, 2, 3, 4, 5};
    double e3 = 0.0 + 2.0 * (2.0 - 2.0 * std::cos(2.0 * M_PI / 6.0));
    CHECK(config_energy(ring6, all, ground(3)) == doctest::Approx(e3).epsilon(1e-12));
}

TEST_CASE("thermal mode matches the spectral free energy") {
    Torus ring({6});
    EnergyParams p;
    p.mode = EnergyParams::Mode::thermal;
    p.beta = 2.0;
    p.mu = 1.0;
    std::vector<int> holes{0, 1, 2};
    Domain dom = Configuration{holes}.domain(ring);
    Spectrum s = eigensolve(build_dirichlet(dom));
    CHECK(config_energy(ring, holes, p) == doctest::Approx(free_energy(s, 2.0, 1.0)));

    p.u = 9.0;
    Spectrum sc = eigensolve(build_screened(ring, dom, 9.0));
    CHECK(config_energy(ring, holes, p) == doctest::Approx(free_energy(sc, 2.0, 1.0)));
}

TEST_CASE("boundary sizes of hand configurations") {
    Torus ring({8});
    CHECK(boundary_size_of(ring, {0, 1, 2, 3}) == 2);
    CHECK(boundary_size_of(ring, {0, 2, 4, 6}) == 4);
    Torus t({4, 4});
    CHECK(boundary_size_of(t, {0, 1, 4, 5}) == 4);  // 2x2 block, all boundary
}

TEST_CASE("metropolis at infinite temperature accepts everything") {
    Torus ring({6});
    SamplerConfig cfg;
    cfg.params = ground(1);
    cfg.beta_schedule = {0.0};
    cfg.steps_per_beta = 400;
    cfg.seed = 11;
    Trajectory t = metropolis_run(ring, {0, 1, 2}, cfg);
    CHECK(t.acceptance_rate == 1.0);
    CHECK(t.steps.size() == 400);
}

TEST_CASE("frozen chains never go uphill") {
    Torus ring({8});
    SamplerConfig cfg;
    cfg.params = ground(2);
    cfg.beta_schedule = {std::numeric_limits<double>::infinity()};
    cfg.steps_per_beta = 300;
    cfg.seed = 3;
    Trajectory t = metropolis_run(ring, {0, 2, 4, 6}, cfg);
    for (std::size_t i = 1; i < t.steps.size(); ++i)
        CHECK(t.steps[i].energy <= t.steps[i - 1].energy + 1e-12);
}

TEST_CASE("seeded runs are reproducible") {
    Torus t({4, 4});
    SamplerConfig cfg;
    cfg.params = ground(2);
    cfg.beta_schedule = {1.0, 2.0, 4.0};
    cfg.steps_per_beta = 60;
    cfg.seed = 1234;
    Trajectory a = metropolis_run(t, {0, 1, 2, 3, 4}, cfg);
    Trajectory b = metropolis_run(t, {0, 1, 2, 3, 4}, cfg);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].energy == b.steps[i].energy);
        CHECK(a.steps[i].accepted == b.steps[i].accepted);
    }
    CHECK(a.final_holes == b.final_holes);

    cfg.seed = 999;
    Trajectory c = metropolis_run(t, {0, 1, 2, 3, 4}, cfg);
    CHECK(c.final_holes != a.final_holes);  // overwhelmingly likely
}

TEST_CASE("annealing a small ring finds the contiguous ground block") {
    Torus ring({8});
    SamplerConfig cfg;
    cfg.params = ground(2);
    cfg.beta_schedule = {1, 2, 4, 8, 16};
    cfg.steps_per_beta = 200;
    cfg.seed = 2024;
    Trajectory t = metropolis_run(ring, {0, 2, 4, 6}, cfg);
    CHECK(is_contiguous_ring_block(t.final_holes, 8));
}

TEST_CASE("exact ensemble on the 8-ring") {
    Torus ring({8});
    ExactEnsemble ens = exact_ensemble(ring, 4, ground(2));
    CHECK(ens.hole_sets.size() == 70);

    // ground set: exactly the 8 contiguous blocks
    CHECK(ens.ground_indices.size() == 8);
    for (std::size_t i : ens.ground_indices)
        CHECK(is_contiguous_ring_block(ens.hole_sets[i], 8));

    // uniform measure: pair-occupancy statistic by counting
    CHECK(ensemble_delta_corr(ring, ens, 0.0, {1}) == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
    CHECK(ensemble_delta_corr(ring, ens, 0.0, {0}) == doctest::Approx(1.0));

    // frozen measure concentrates on the blocks
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(ensemble_delta_corr(ring, ens, inf, {1}) == doctest::Approx(0.75).epsilon(1e-12));

    // monotone growth of the correlation with the sampling temperature
    double prev = ensemble_delta_corr(ring, ens, 0.0, {1});
    for (double beta_s : {1.0, 2.0, 4.0, 8.0}) {
        double cur = ensemble_delta_corr(ring, ens, beta_s, {1});
        CHECK(cur > prev);
        prev = cur;
    }

    // boundary tails shrink as beta_s grows (ground fraction is 2/8)
    double t1 = ensemble_boundary_tail(ring, ens, 1.0, 0.3);
    double t4 = ensemble_boundary_tail(ring, ens, 4.0, 0.3);
    double t8 = ensemble_boundary_tail(ring, ens, 8.0, 0.3);
    CHECK(t4 < t1);
    CHECK(t8 < t4);

    CHECK(ensemble_mean_boundary_fraction(ens, 8.0, 4) <
          ensemble_mean_boundary_fraction(ens, 0.0, 4));
}

TEST_CASE("exact ensemble respects the enumeration cap") {
    Torus t({4, 4});
    CHECK_THROWS(exact_ensemble(t, 8, ground(1), 100));
}

TEST_CASE("observables of hand-built trajectories") {
    Torus ring({8});
    SamplerConfig cfg;
    cfg.params = ground(2);
    cfg.beta_schedule = {std::numeric_limits<double>::infinity()};
    cfg.steps_per_beta = 5;
    cfg.seed = 1;
    Trajectory frozen = metropolis_run(ring, {0, 1, 2, 3}, cfg);
    Observables obs = trajectory_observables(ring, frozen, {{0}, {1}}, 0.0);
    CHECK(obs.boundary_fraction == doctest::Approx(0.5));
    CHECK(obs.delta_corr[{0}] == doctest::Approx(1.0));

    // a block never moves in the frozen limit, so the correlation is exact
    CHECK(obs.delta_corr[{1}] == doctest::Approx(0.75));

    PackedConfig checker = pack_config(ring, {0, 2, 4, 6});
    CHECK(config_delta_corr(ring, checker, {1}) == doctest::Approx(0.0));
    CHECK(config_delta_corr(ring, checker, {2}) == doctest::Approx(1.0));
}

TEST_CASE("stationary distribution matches the exact Gibbs weights") {
    Torus ring({6});
    const double beta_s = 1.0;
    ExactEnsemble ens = exact_ensemble(ring, 3, ground(1));
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < ens.hole_sets.size(); ++i) index[ens.hole_sets[i]] = i;

    std::vector<double> weights(ens.energies.size());
    double z = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] = std::exp(-beta_s * (ens.energies[i] - ens.min_energy));
        z += weights[i];
    }
    for (double& w : weights) w /= z;

    SamplerConfig cfg;
    cfg.params = ground(1);
    cfg.beta_schedule = {beta_s};
    cfg.steps_per_beta = 100000;
    cfg.seed = 77;
    Trajectory traj = metropolis_run(ring, {0, 1, 2}, cfg);

    // thin to soften autocorrelation, then compare with multinomial error bars
    const std::size_t burn = traj.visited.size() / 5;
    const std::size_t stride = 20;
    std::vector<long long> counts(weights.size(), 0);
    long long total = 0;
    for (std::size_t i = burn; i < traj.visited.size(); i += stride) {
        std::vector<int> holes;
        for (int s = 0; s < 6; ++s)
            if (traj.visited[i][0] >> s & 1) holes.push_back(s);
        ++counts[index.at(holes)];
        ++total;
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double mean = total * weights[i];
        const double sigma = std::sqrt(total * weights[i] * (1.0 - weights[i]));
        CHECK(std::abs(counts[i] - mean) <= 3.0 * sigma);
    }
}
