#include <doctest.h>

#include <cmath>

#include "fk/rng.hpp"
#include "fk/spectral.hpp"

using namespace fk;

namespace {

Coord c1(int x) { return {x}; }
Coord c2(int x, int y) { return {x, y}; }

Domain chain(int length) {
    std::vector<Coord> sites;
    for (int i = 0; i < length; ++i) sites.push_back(c1(i));
    return Domain(1, std::move(sites));
}

Domain block(int nx, int ny) {
    std::vector<Coord> sites;
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) sites.push_back(c2(x, y));
    return Domain(2, std::move(sites));
}

}  // namespace

TEST_CASE("dirichlet matrices match hand construction") {
    LatticeOperator single = build_dirichlet(Domain(1, {c1(0)}));
    CHECK(single.matrix(0, 0) == 2.0);

    LatticeOperator pair = build_dirichlet(chain(2));
    CHECK(pair.matrix(0, 0) == 2.0);
    CHECK(pair.matrix(0, 1) == -1.0);
    CHECK(pair.matrix(1, 0) == -1.0);

    LatticeOperator site2d = build_dirichlet(Domain(2, {c2(0, 0)}));
    CHECK(site2d.matrix(0, 0) == 4.0);
    CHECK(eigensolve(site2d).eigenvalues[0] == doctest::Approx(4.0));

    // trace = 2d |domain|
    LatticeOperator b = build_dirichlet(block(3, 3));
    CHECK(b.matrix.trace() == doctest::Approx(4.0 * 9));
    // off-diagonal row sums never exceed 2d
    for (int i = 0; i < 9; ++i) {
        double off = b.matrix.row(i).cwiseAbs().sum() - b.matrix(i, i);
        CHECK(off <= 4.0);
    }
}

TEST_CASE("screened matrices match hand construction") {
    Torus ring({4});
    LatticeOperator op = build_screened(ring, Domain(1, {c1(0), c1(1)}, ring), 10.0);
    CHECK(op.matrix(0, 0) == 2.0);
    CHECK(op.matrix(1, 1) == 2.0);
    CHECK(op.matrix(2, 2) == 12.0);
    CHECK(op.matrix(3, 3) == 12.0);
    CHECK(op.matrix(0, 3) == -1.0);  // periodic wrap

    CHECK_THROWS(build_screened(ring, Domain(1, {c1(0)}, ring), -1.0));

    // U = 0 is independent of the hole set
    LatticeOperator a = build_screened(ring, Domain(1, {c1(0)}, ring), 0.0);
    LatticeOperator b = build_screened(ring, Domain(1, {c1(2), c1(3)}, ring), 0.0);
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() == 0.0);

    // holes everywhere: the periodic Laplacian, independent of U
    std::vector<Coord> all;
    for (int i = 0; i < 4; ++i) all.push_back(c1(i));
    LatticeOperator full = build_screened(ring, Domain(1, all, ring), 7.0);
    CHECK(full.matrix.diagonal().maxCoeff() == 2.0);
}

TEST_CASE("chain spectra match the closed form") {
    Spectrum s3 = eigensolve(build_dirichlet(chain(3)));
    CHECK(s3.eigenvalues[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s3.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s3.eigenvalues[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));

    const int length = 100;
    Spectrum s = eigensolve(build_dirichlet(chain(length)));
    for (int j = 1; j <= length; ++j) {
        double expected = 2.0 - 2.0 * std::cos(j * M_PI / (length + 1));
        CHECK(std::abs(s.eigenvalues[j - 1] - expected) <= 1e-9);
    }
    CHECK(s.max_residual <= 1e-9 * 4.0);
    CHECK(s.max_gram_error <= 1e-9);
}

TEST_CASE("eigensolve respects the dimension cap") {
    CHECK_THROWS(eigensolve(build_dirichlet(chain(10)), 5));
}

TEST_CASE("ground energy sums the lowest levels") {
    Spectrum s = eigensolve(build_dirichlet(chain(3)));
    CHECK(ground_energy(s, 0) == 0.0);
    CHECK(ground_energy(s, 1) == doctest::Approx(2.0 - std::sqrt(2.0)));
    CHECK(ground_energy(s, 3) == doctest::Approx(6.0));  // trace, d = 1
    CHECK_THROWS(ground_energy(s, 4));
    CHECK_THROWS(ground_energy(s, -1));
}

TEST_CASE("spectral symmetry about 2d") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
        Domain d = random_connected_domain(2, 20, seed);
        Spectrum s = eigensolve(build_dirichlet(d));
        const int n = static_cast<int>(d.size());
        for (int j = 0; j < n; ++j)
            CHECK(std::abs(s.eigenvalues[j] + s.eigenvalues[n - 1 - j] - 8.0) <= 1e-9);
    }
}

TEST_CASE("hole symmetry of ground sums") {
    Domain d = random_connected_domain(2, 14, 99);
    Spectrum s = eigensolve(build_dirichlet(d));
    const int size = static_cast<int>(d.size());
    for (int n_el = 0; n_el <= size; ++n_el) {
        double n = static_cast<double>(n_el) / size;
        double lhs = ground_energy(s, size - n_el);
        double rhs = 4.0 * size * (1.0 - 2.0 * n) + ground_energy(s, n_el);
        CHECK(std::abs(lhs - rhs) <= 1e-9);
    }
}

TEST_CASE("screened ground energies increase with U") {
    Torus t({4, 4});
    Domain holes(2, {c2(0, 0), c2(0, 1), c2(1, 0), c2(1, 1), c2(2, 2)}, t);
    for (int n_el : {1, 3, 5}) {
        double prev = -1.0;
        for (double u : {0.0, 1.0, 5.0, 10.0, 50.0, 1000.0}) {
            Spectrum s = eigensolve(build_screened(t, holes, u));
            double e = ground_energy(s, n_el);
            CHECK(e >= prev - 1e-10);
            prev = e;
        }
    }
}

TEST_CASE("screened spectrum splits into two bands for U > 4d") {
    Torus t({4, 4});
    Domain holes(2, {c2(0, 0), c2(0, 1), c2(1, 0), c2(1, 1), c2(2, 2)}, t);
    const double u = 20.0;
    Spectrum s = eigensolve(build_screened(t, holes, u));
    int low = 0;
    for (int j = 0; j < s.eigenvalues.size(); ++j) {
        double e = s.eigenvalues[j];
        bool lower = e >= -1e-9 && e <= 8.0 + 1e-9;
        bool upper = e >= u - 1e-9 && e <= u + 8.0 + 1e-9;
        CHECK((lower || upper));
        if (lower) ++low;
    }
    CHECK(low == static_cast<int>(holes.size()));
}

TEST_CASE("quadratic form equals the matrix form") {
    Domain single(1, {c1(0)});
    CHECK(quadratic_form(single, Eigen::VectorXcd::Zero(1)) == 0.0);
    Eigen::VectorXcd one(1);
    one << 1.0;
    CHECK(quadratic_form(single, one) == doctest::Approx(2.0));

    Domain d = block(3, 3);
    LatticeOperator op = build_dirichlet(d);
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXcd phi(d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            phi[i] = std::complex<double>(rng.uniform() - 0.5, rng.uniform() - 0.5);
        double direct = quadratic_form(d, phi);
        double matrix = (phi.dot(op.matrix * phi)).real();
        CHECK(direct == doctest::Approx(matrix).epsilon(1e-10));
    }
}

TEST_CASE("quadratic form uses torus adjacency for embedded domains") {
    Torus t({4});
    std::vector<Coord> all;
    for (int i = 0; i < 4; ++i) all.push_back(c1(i));
    Domain ring(1, all, t);
    LatticeOperator op = build_dirichlet(ring);
    Eigen::VectorXcd phi(4);
    phi << 1.0, -1.0, 2.0, 0.5;
    CHECK(quadratic_form(ring, phi) == doctest::Approx((phi.dot(op.matrix * phi)).real()));
}

TEST_CASE("boundary vector at sample momenta") {
    Domain single(1, {c1(0)});
    BoundaryVector b0 = boundary_vector(single, {0.0});
    CHECK(b0.norm_sq == doctest::Approx(4.0));
    CHECK(b0.values[0].real() == doctest::Approx(2.0));

    BoundaryVector bhalf = boundary_vector(single, {M_PI_2});
    CHECK(bhalf.norm_sq == doctest::Approx(0.0));

    CHECK_THROWS(boundary_vector(Domain(1, {c1(0)}, Torus({4})), {0.0}));
}

TEST_CASE("boundary vector norm window") {
    Rng rng(7);
    for (std::uint64_t seed : {21ull, 22ull, 23ull, 24ull}) {
        Domain d = random_connected_domain(2, 25, seed);
        double bsize = static_cast<double>(boundary_stats(d).boundary_size());
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> k{(rng.uniform() * 2 - 1) * M_PI / 3,
                                  (rng.uniform() * 2 - 1) * M_PI / 3};
            double nsq = boundary_vector(d, k).norm_sq;
            CHECK(nsq >= bsize - 1e-9);
            CHECK(nsq <= 16.0 * bsize + 1e-9);
        }
    }
}

TEST_CASE("momentum density limits and normalization") {
    Domain d = chain(8);
    Spectrum s = eigensolve(build_dirichlet(d));

    MomentumDensity full = momentum_density(s, d, 8, 256);
    CHECK(full.min_value == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(full.max_value == doctest::Approx(8.0).epsilon(1e-9));

    MomentumDensity empty = momentum_density(s, d, 0, 64);
    CHECK(empty.integral == 0.0);

    MomentumDensity three = momentum_density(s, d, 3, 1024);
    CHECK(std::abs(three.integral - 3.0) <= 1e-6);
    CHECK(three.min_value >= 0.0);
    CHECK(three.max_value <= 8.0 + 1e-9);
}

TEST_CASE("free energy closed forms and limits") {
    Spectrum site = eigensolve(build_dirichlet(Domain(1, {c1(0)})));
    CHECK(free_energy(site, 1.0, 2.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    CHECK(std::abs(free_energy(site, 1.0, -1000.0)) < 1e-300);
    CHECK(free_energy(site, 1.0, 1e6) < 0.0);  // overflow-safe for huge arguments

    // mu chosen away from any level so the frozen limit is unambiguous
    Spectrum s = eigensolve(build_dirichlet(chain(5)));
    const double mu = 2.5;
    double zero_t = 0.0;
    for (int j = 0; j < 5; ++j)
        if (s.eigenvalues[j] < mu) zero_t += s.eigenvalues[j] - mu;
    CHECK(free_energy(s, 1e4, mu) == doctest::Approx(zero_t).epsilon(1e-6));

    double prev = free_energy(s, 1.0, -4.0);
    for (double m : {-2.0, 0.0, 2.0, 4.0}) {
        double f = free_energy(s, 1.0, m);
        CHECK(f < prev);
        CHECK(f <= 0.0);
        prev = f;
    }
    CHECK_THROWS(free_energy(s, 0.0, 1.0));
}

TEST_CASE("screened eigenstates decay away from the holes") {
    Torus ring({8});
    std::vector<Coord> sites;
    for (int i = 0; i < 4; ++i) sites.push_back(c1(i));
    Domain holes(1, sites, ring);

    LatticeOperator op = build_screened(ring, holes, 10.0);
    Spectrum s = eigensolve(op);
    DecayProfile p = decay_profile(op, s, ring, holes);
    CHECK(p.bound_valid);
    REQUIRE(p.max_weight.size() == 3);
    CHECK(p.max_weight[0] <= 1.0 + 1e-12);
    CHECK(p.bound[1] == doctest::Approx(0.0625));
    CHECK(p.bound[2] == doctest::Approx(0.00390625));
    CHECK(p.max_weight[1] <= p.bound[1]);
    CHECK(p.max_weight[2] <= p.bound[2]);

    LatticeOperator weak = build_screened(ring, holes, 2.0);
    DecayProfile pw = decay_profile(weak, eigensolve(weak), ring, holes);
    CHECK_FALSE(pw.bound_valid);
}
