#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fk {

/// A lattice site, given by its integer coordinates. Length = ambient dimension.
using Coord = std::vector<int>;

struct CoordHash {
    std::size_t operator()(const Coord& c) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (int v : c) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

/// Periodic box. Side lengths must be >= 3 so the 2d neighbors of a site
/// are pairwise distinct.
struct Torus {
    std::vector<int> dims;

    explicit Torus(std::vector<int> dims_);
    int dimension() const { return static_cast<int>(dims.size()); }
    long long volume() const;

    /// Reduce coordinates into [0, L_i).
    Coord reduce(Coord c) const;
    /// Row-major index of a (reduced) coordinate.
    long long index_of(const Coord& c) const;
    Coord coord_of(long long idx) const;

    bool operator==(const Torus& o) const { return dims == o.dims; }
};

/// A finite set of sites, either free in Z^d or embedded in a torus.
/// Sites are kept sorted lexicographically so every derived quantity
/// (matrices, enumerations, serializations) is reproducible.
class Domain {
public:
    Domain(int dimension, std::vector<Coord> sites,
           std::optional<Torus> ambient = std::nullopt);

    int dimension() const { return dim_; }
    std::size_t size() const { return sites_.size(); }
    const std::vector<Coord>& sites() const { return sites_; }
    const std::optional<Torus>& ambient() const { return ambient_; }

    bool contains(const Coord& c) const;
    /// Index into sites(), or -1.
    int index_of(const Coord& c) const;
    /// The 2d nearest neighbors (reduced modulo the torus when embedded).
    std::vector<Coord> neighbors(const Coord& c) const;

    /// Same sites, ambient torus dropped (complement taken in Z^d).
    Domain as_free() const;

    bool operator==(const Domain& o) const;

private:
    int dim_;
    std::vector<Coord> sites_;
    std::optional<Torus> ambient_;
    std::unordered_map<Coord, int, CoordHash> index_;
};

/// Boundary geometry of a domain. `boundary` lists the sites of the domain
/// with at least one neighbor in the complement; the q arrays follow the
/// order of `boundary`.
struct BoundaryStats {
    std::vector<Coord> boundary;
    std::vector<std::vector<int>> q_i;   ///< q_{x,i}, d entries per boundary site
    std::vector<std::vector<int>> q_ij;  ///< q_{x,ij}, row-major d*d per boundary site
    std::vector<int> q_x;                ///< sum_i q_{x,i}
    std::vector<long long> k_hist;       ///< K_0..K_{2d}: sites with i neighbors inside
    long long bonds = 0;                 ///< nearest-neighbor pairs inside the domain
    long long crossing_bonds = 0;        ///< bonds from the domain to its complement
    long long k_numerator = 0;           ///< K = k_numerator / (2d)

    std::size_t boundary_size() const { return boundary.size(); }
    double k_value(int d) const { return static_cast<double>(k_numerator) / (2.0 * d); }
};

BoundaryStats boundary_stats(const Domain& domain);

/// Number of subsets C(n, m), saturating at 2^63-1.
std::uint64_t subset_count(long long n, long long m);

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Visit every m-site subset of the torus exactly once, in lexicographic
/// order of site indices. Throws if C(|torus|, m) exceeds `cap`.
void enumerate_domains(const Torus& torus, int m,
                       const std::function<void(const Domain&)>& visit,
                       std::uint64_t cap = kDefaultEnumerationCap);

/// Text format: "d=<int>" line, optional "torus=<L1>x<L2>x..." line, then one
/// site per line as space-separated integers.
Domain parse_domain(const std::string& text);
std::string serialize_domain(const Domain& domain);

/// FNV-1a hash of the serialized form, as 16 hex digits. Used to key
/// reports and memoized energies.
std::string domain_hash(const Domain& domain);

/// Random connected free domain of the requested size, grown from the
/// origin by repeatedly adding a uniformly chosen outside neighbor.
/// Deterministic given the seed.
Domain random_connected_domain(int d, int target_size, std::uint64_t seed);

}  // namespace fk
