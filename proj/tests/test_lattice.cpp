#include <doctest.h>

#include <set>
#include <stdexcept>

#include "fk/lattice.hpp"

using namespace fk;

namespace {

Coord c1(int x) { return {x}; }
Coord c2(int x, int y) { return {x, y}; }

Domain block_2x2() { return Domain(2, {c2(0, 0), c2(0, 1), c2(1, 0), c2(1, 1)}); }

}  // namespace

TEST_CASE("torus validation") {
    CHECK_THROWS(Torus({2, 4}));
    CHECK_THROWS(Torus({}));
    Torus t({4, 3});
    CHECK(t.volume() == 12);
    CHECK(t.reduce({-1, 3}) == c2(3, 0));
    CHECK(t.index_of(c2(1, 2)) == 5);
    CHECK(t.coord_of(5) == c2(1, 2));
}

TEST_CASE("domain validation") {
    CHECK_THROWS(Domain(1, {}));
    CHECK_THROWS(Domain(2, {c1(0)}));
    CHECK_THROWS(Domain(1, {c1(0), c1(0)}));
    // reduction modulo the torus can expose duplicates
    CHECK_THROWS(Domain(1, {c1(0), c1(4)}, Torus({4})));
    Domain d(1, {c1(2), c1(0), c1(1)});
    CHECK(d.sites()[0] == c1(0));  // sorted
    CHECK(d.index_of(c1(2)) == 2);
    CHECK(d.index_of(c1(5)) == -1);
}

TEST_CASE("boundary of a 1d segment") {
    Domain d(1, {c1(0), c1(1), c1(2)});
    BoundaryStats st = boundary_stats(d);
    CHECK(st.boundary_size() == 2);
    CHECK(st.boundary[0] == c1(0));
    CHECK(st.boundary[1] == c1(2));
    // site 0: one exit along the axis, and its inside neighbor 1 is interior
    CHECK(st.q_i[0][0] == 1);
    CHECK(st.q_ij[0][0] == 0);
    CHECK(st.q_x[0] == 1);
}

TEST_CASE("boundary of a 1d pair") {
    Domain d(1, {c1(0), c1(1)});
    BoundaryStats st = boundary_stats(d);
    CHECK(st.boundary_size() == 2);
    // from 0: e=+1 lands on boundary site 1, e'=+1 exits
    CHECK(st.q_ij[0][0] == 1);
    CHECK(st.q_i[0][0] == 1);
}

TEST_CASE("boundary of the 2x2 block") {
    BoundaryStats st = boundary_stats(block_2x2());
    CHECK(st.k_hist[2] == 4);
    CHECK(st.k_hist[0] == 0);
    CHECK(st.k_hist[1] == 0);
    CHECK(st.k_hist[3] == 0);
    CHECK(st.k_hist[4] == 0);
    CHECK(st.bonds == 4);
    CHECK(st.k_value(2) == doctest::Approx(2.0));
    CHECK(st.boundary_size() == 4);
}

TEST_CASE("histogram identities hold exactly on enumerated domains") {
    Torus t({3, 3});
    for (int m = 1; m <= 9; ++m) {
        enumerate_domains(t, m, [&](const Domain& dom) {
            const int d = dom.dimension();
            for (const Domain& domain : {dom, dom.as_free()}) {
                BoundaryStats st = boundary_stats(domain);
                long long total = 0, weighted = 0, below = 0;
                for (int i = 0; i <= 2 * d; ++i) {
                    total += st.k_hist[i];
                    weighted += static_cast<long long>(i) * st.k_hist[i];
                    if (i < 2 * d) below += st.k_hist[i];
                }
                CHECK(total == static_cast<long long>(domain.size()));
                CHECK(2 * st.bonds == weighted);
                CHECK(below == static_cast<long long>(st.boundary_size()));
            }
        });
    }
}

TEST_CASE("q statistics stay in their ranges and detect boundary neighbors") {
    Torus t({3, 3});
    for (int m = 1; m <= 9; ++m) {
        enumerate_domains(t, m, [&](const Domain& dom) {
            const Domain free = dom.as_free();
            const int d = free.dimension();
            BoundaryStats st = boundary_stats(free);
            for (std::size_t b = 0; b < st.boundary.size(); ++b) {
                CHECK(st.q_x[b] >= 1);
                CHECK(st.q_x[b] <= 2 * d);
                bool q_all_zero = true;
                for (int i = 0; i < d; ++i) {
                    CHECK(st.q_i[b][i] >= 0);
                    CHECK(st.q_i[b][i] <= 2);
                    for (int j = 0; j < d; ++j) {
                        int q = st.q_ij[b][i * d + j];
                        CHECK(q >= 0);
                        CHECK(q <= (i == j ? 2 : 4));
                        if (q != 0) q_all_zero = false;
                    }
                }
                if (q_all_zero) {
                    // then no neighbor of this site lies on the boundary
                    std::set<Coord> boundary(st.boundary.begin(), st.boundary.end());
                    for (const Coord& y : free.neighbors(st.boundary[b]))
                        CHECK(boundary.count(y) == 0);
                }
            }
        });
    }
}

TEST_CASE("boundary sites are exactly those with an outside neighbor") {
    Domain d = random_connected_domain(2, 30, 1234);
    BoundaryStats st = boundary_stats(d);
    std::set<Coord> boundary(st.boundary.begin(), st.boundary.end());
    for (const Coord& x : d.sites()) {
        int outside = 0;
        for (const Coord& y : d.neighbors(x))
            if (!d.contains(y)) ++outside;
        CHECK((outside > 0) == (boundary.count(x) > 0));
    }
}

TEST_CASE("crossing-bond inequalities on a torus") {
    Torus t({4, 4});
    enumerate_domains(t, 5, [&](const Domain& dom) {
        const int d = dom.dimension();
        BoundaryStats st = boundary_stats(dom);
        CHECK(st.crossing_bonds <= 2 * d * static_cast<long long>(st.boundary_size()));
        CHECK(static_cast<long long>(st.boundary_size()) <= st.crossing_bonds);
        CHECK(st.crossing_bonds == st.k_numerator);
    });
}

TEST_CASE("complement boundary is controlled by the boundary") {
    Torus t({3, 3});
    for (int m = 1; m <= 8; ++m) {
        enumerate_domains(t, m, [&](const Domain& dom) {
            const int d = dom.dimension();
            std::vector<Coord> comp;
            for (long long i = 0; i < t.volume(); ++i) {
                Coord c = t.coord_of(i);
                if (!dom.contains(c)) comp.push_back(std::move(c));
            }
            if (comp.empty()) return;
            BoundaryStats inner = boundary_stats(dom);
            BoundaryStats outer = boundary_stats(Domain(d, comp, t));
            CHECK(outer.boundary_size() <= 2 * d * inner.boundary_size());
        });
    }
}

TEST_CASE("enumeration counts") {
    Torus t1({4});
    int count = 0;
    enumerate_domains(t1, 4, [&](const Domain&) { ++count; });
    CHECK(count == 1);
    count = 0;
    enumerate_domains(t1, 2, [&](const Domain&) { ++count; });
    CHECK(count == 6);
    count = 0;
    Torus t2({3, 3});
    enumerate_domains(t2, 4, [&](const Domain&) { ++count; });
    CHECK(count == 126);
}

TEST_CASE("enumeration validates and caps") {
    Torus t({4, 4});
    CHECK_THROWS(enumerate_domains(t, 0, [](const Domain&) {}));
    CHECK_THROWS(enumerate_domains(t, 17, [](const Domain&) {}));
    CHECK_THROWS(enumerate_domains(t, 8, [](const Domain&) {}, 100));
    CHECK(subset_count(16, 8) == 12870);
    CHECK(subset_count(100, 50) == (~0ull >> 1));  // saturates
}

TEST_CASE("enumeration order is deterministic lexicographic") {
    Torus t({4});
    std::vector<std::vector<Coord>> seen;
    enumerate_domains(t, 2, [&](const Domain& d) { seen.push_back(d.sites()); });
    CHECK(seen.front() == std::vector<Coord>{c1(0), c1(1)});
    CHECK(seen.back() == std::vector<Coord>{c1(2), c1(3)});
}

TEST_CASE("domain text round trip") {
    Domain d = parse_domain("d=1\n0\n1\n2\n");
    CHECK(d.size() == 3);
    CHECK(d.dimension() == 1);
    CHECK(parse_domain(serialize_domain(block_2x2())) == block_2x2());

    Domain e(2, {c2(0, 0), c2(1, 2)}, Torus({4, 4}));
    CHECK(parse_domain(serialize_domain(e)) == e);

    for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
        Domain r = random_connected_domain(2, 17, seed);
        CHECK(parse_domain(serialize_domain(r)) == r);
    }
}

TEST_CASE("domain text errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_domain("d=2\n0 0\n0 0\n"),
                         doctest::Contains("line 3"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_domain("d=2\n0 0 0\n"),
                         doctest::Contains("dimension mismatch"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_domain("d=2\n0 a\n"), doctest::Contains("line 2"),
                         std::runtime_error);
    CHECK_THROWS(parse_domain("0 0\n"));
    CHECK_THROWS(parse_domain("d=2\ntorus=4\n0 0\n"));
}

TEST_CASE("domain hash is stable and split by content") {
    Domain a(1, {c1(0), c1(1)});
    Domain b(1, {c1(0), c1(2)});
    CHECK(domain_hash(a) == domain_hash(a));
    CHECK(domain_hash(a) != domain_hash(b));
    CHECK(domain_hash(a).size() == 16);
}

TEST_CASE("random connected domains are connected and sized") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        Domain d = random_connected_domain(2, 40, seed);
        CHECK(d.size() == 40);
        // BFS from the first site reaches everything
        std::set<Coord> reached{d.sites()[0]};
        std::vector<Coord> stack{d.sites()[0]};
        while (!stack.empty()) {
            Coord x = stack.back();
            stack.pop_back();
            for (const Coord& y : d.neighbors(x)) {
                if (d.contains(y) && !reached.count(y)) {
                    reached.insert(y);
                    stack.push_back(y);
                }
            }
        }
        CHECK(reached.size() == d.size());
    }
}
