#include "fk/lattice.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "fk/rng.hpp"

namespace fk {

Torus::Torus(std::vector<int> dims_) : dims(std::move(dims_)) {
    if (dims.empty()) throw std::invalid_argument("torus: dimension must be >= 1");
    for (int L : dims) {
        if (L < 3) throw std::invalid_argument("torus: side lengths must be >= 3");
    }
}

long long Torus::volume() const {
    long long v = 1;
    for (int L : dims) v *= L;
    return v;
}

Coord Torus::reduce(Coord c) const {
    for (std::size_t i = 0; i < dims.size(); ++i) {
        int L = dims[i];
        int r = c[i] % L;
        if (r < 0) r += L;
        c[i] = r;
    }
    return c;
}

long long Torus::index_of(const Coord& c) const {
    long long idx = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) idx = idx * dims[i] + c[i];
    return idx;
}

Coord Torus::coord_of(long long idx) const {
    Coord c(dims.size());
    for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
        c[i] = static_cast<int>(idx % dims[i]);
        idx /= dims[i];
    }
    return c;
}

Domain::Domain(int dimension, std::vector<Coord> sites, std::optional<Torus> ambient)
    : dim_(dimension), sites_(std::move(sites)), ambient_(std::move(ambient)) {
    if (dim_ < 1) throw std::invalid_argument("domain: dimension must be >= 1");
    if (sites_.empty()) throw std::invalid_argument("domain: must be nonempty");
    if (ambient_ && ambient_->dimension() != dim_)
        throw std::invalid_argument("domain: torus dimension mismatch");
    for (auto& s : sites_) {
        if (static_cast<int>(s.size()) != dim_)
            throw std::invalid_argument("domain: site dimension mismatch");
        if (ambient_) s = ambient_->reduce(std::move(s));
    }
    std::sort(sites_.begin(), sites_.end());
    for (std::size_t i = 0; i + 1 < sites_.size(); ++i) {
        if (sites_[i] == sites_[i + 1])
            throw std::invalid_argument("domain: duplicate site");
    }
    if (ambient_ && static_cast<long long>(sites_.size()) > ambient_->volume())
        throw std::invalid_argument("domain: more sites than torus volume");
    index_.reserve(sites_.size());
    for (std::size_t i = 0; i < sites_.size(); ++i)
        index_.emplace(sites_[i], static_cast<int>(i));
}

bool Domain::contains(const Coord& c) const { return index_.count(c) > 0; }

int Domain::index_of(const Coord& c) const {
    auto it = index_.find(c);
    return it == index_.end() ? -1 : it->second;
}

std::vector<Coord> Domain::neighbors(const Coord& c) const {
    std::vector<Coord> out;
    out.reserve(2 * dim_);
    for (int i = 0; i < dim_; ++i) {
        for (int s : {+1, -1}) {
            Coord n = c;
            n[i] += s;
            if (ambient_) n = ambient_->reduce(std::move(n));
            out.push_back(std::move(n));
        }
    }
    return out;
}

Domain Domain::as_free() const { return Domain(dim_, sites_); }

bool Domain::operator==(const Domain& o) const {
    return dim_ == o.dim_ && sites_ == o.sites_ &&
           ((!ambient_ && !o.ambient_) ||
            (ambient_ && o.ambient_ && *ambient_ == *o.ambient_));
}

BoundaryStats boundary_stats(const Domain& domain) {
    const int d = domain.dimension();
    BoundaryStats st;
    st.k_hist.assign(2 * d + 1, 0);

    // First pass: inside-neighbor histogram, bonds, boundary membership.
    std::vector<char> is_boundary(domain.size(), 0);
    for (std::size_t s = 0; s < domain.size(); ++s) {
        const Coord& x = domain.sites()[s];
        int inside = 0;
        for (const Coord& y : domain.neighbors(x)) {
            if (domain.contains(y)) ++inside;
        }
        st.k_hist[inside] += 1;
        st.bonds += inside;
        st.crossing_bonds += 2 * d - inside;
        if (inside < 2 * d) is_boundary[s] = 1;
        st.k_numerator += 2 * d - inside;
    }
    st.bonds /= 2;  // each interior bond counted from both ends

    // Second pass: q statistics on boundary sites.
    for (std::size_t s = 0; s < domain.size(); ++s) {
        if (!is_boundary[s]) continue;
        const Coord& x = domain.sites()[s];
        st.boundary.push_back(x);
        std::vector<int> qi(d, 0), qij(d * d, 0);
        int qx = 0;
        for (int i = 0; i < d; ++i) {
            for (int si : {+1, -1}) {
                Coord xe = x;
                xe[i] += si;
                if (domain.ambient()) xe = domain.ambient()->reduce(std::move(xe));
                if (!domain.contains(xe)) {
                    ++qi[i];
                    ++qx;
                    continue;
                }
                // x+e inside: does it sit on the boundary, and which second
                // steps leave the domain?
                int e_idx = domain.index_of(xe);
                if (!is_boundary[e_idx]) continue;
                for (int j = 0; j < d; ++j) {
                    for (int sj : {+1, -1}) {
                        Coord xee = xe;
                        xee[j] += sj;
                        if (domain.ambient()) xee = domain.ambient()->reduce(std::move(xee));
                        if (!domain.contains(xee)) qij[i * d + j] += 1;
                    }
                }
            }
        }
        st.q_i.push_back(std::move(qi));
        st.q_ij.push_back(std::move(qij));
        st.q_x.push_back(qx);
    }
    return st;
}

std::uint64_t subset_count(long long n, long long m) {
    if (m < 0 || m > n) return 0;
    if (m > n - m) m = n - m;
    const std::uint64_t cap = ~0ull >> 1;
    std::uint64_t c = 1;
    for (long long i = 1; i <= m; ++i) {
        // c * (n-m+i) / i, watching for overflow
        std::uint64_t num = static_cast<std::uint64_t>(n - m + i);
        if (c > cap / num) return cap;
        c = c * num / static_cast<std::uint64_t>(i);
    }
    return c;
}

void enumerate_domains(const Torus& torus, int m,
                       const std::function<void(const Domain&)>& visit,
                       std::uint64_t cap) {
    const long long v = torus.volume();
    if (m <= 0 || m > v)
        throw std::invalid_argument("enumerate_domains: need 0 < m <= |torus|");
    if (subset_count(v, m) > cap)
        throw std::runtime_error("enumerate_domains: subset count exceeds cap");

    std::vector<int> pick(m);
    for (int i = 0; i < m; ++i) pick[i] = i;
    while (true) {
        std::vector<Coord> sites;
        sites.reserve(m);
        for (int i : pick) sites.push_back(torus.coord_of(i));
        visit(Domain(torus.dimension(), std::move(sites), torus));

        int i = m - 1;
        while (i >= 0 && pick[i] == v - m + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
    }
}

Domain parse_domain(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    int d = -1;
    std::optional<Torus> torus;
    std::vector<Coord> sites;

    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("domain parse error, line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.rfind("d=", 0) == 0) {
            if (d != -1) fail("repeated d= line");
            try {
                d = std::stoi(line.substr(2));
            } catch (const std::exception&) {
                fail("cannot parse dimension");
            }
            if (d < 1) fail("dimension must be >= 1");
            continue;
        }
        if (line.rfind("torus=", 0) == 0) {
            if (d == -1) fail("torus= before d=");
            if (!sites.empty()) fail("torus= must precede sites");
            std::vector<int> dims;
            std::string spec = line.substr(6);
            std::size_t pos = 0;
            while (pos <= spec.size()) {
                std::size_t x = spec.find('x', pos);
                std::string tok = spec.substr(pos, x == std::string::npos ? x : x - pos);
                try {
                    dims.push_back(std::stoi(tok));
                } catch (const std::exception&) {
                    fail("cannot parse torus side length");
                }
                if (x == std::string::npos) break;
                pos = x + 1;
            }
            if (static_cast<int>(dims.size()) != d) fail("torus dimension mismatch");
            torus = Torus(std::move(dims));
            continue;
        }
        if (d == -1) fail("expected d=<int> first");
        std::istringstream ls(line);
        Coord c;
        int v;
        while (ls >> v) c.push_back(v);
        if (!ls.eof()) fail("cannot parse site coordinates");
        if (static_cast<int>(c.size()) != d) fail("site dimension mismatch");
        if (torus) c = torus->reduce(std::move(c));
        for (const Coord& prev : sites) {
            if (prev == c) fail("duplicate site");
        }
        sites.push_back(std::move(c));
    }
    if (d == -1) throw std::runtime_error("domain parse error: missing d= line");
    if (sites.empty()) throw std::runtime_error("domain parse error: no sites");
    return Domain(d, std::move(sites), std::move(torus));
}

std::string serialize_domain(const Domain& domain) {
    std::ostringstream out;
    out << "d=" << domain.dimension() << "\n";
    if (domain.ambient()) {
        out << "torus=";
        const auto& dims = domain.ambient()->dims;
        for (std::size_t i = 0; i < dims.size(); ++i)
            out << (i ? "x" : "") << dims[i];
        out << "\n";
    }
    for (const Coord& s : domain.sites()) {
        for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
        out << "\n";
    }
    return out.str();
}

Domain random_connected_domain(int d, int target_size, std::uint64_t seed) {
    if (target_size < 1) throw std::invalid_argument("random_connected_domain: size must be >= 1");
    Rng rng(seed);
    std::unordered_set<Coord, CoordHash> members;
    std::vector<Coord> frontier;
    std::unordered_set<Coord, CoordHash> in_frontier;

    auto add = [&](const Coord& site) {
        members.insert(site);
        for (int i = 0; i < d; ++i) {
            for (int s : {+1, -1}) {
                Coord n = site;
                n[i] += s;
                if (!members.count(n) && !in_frontier.count(n)) {
                    in_frontier.insert(n);
                    frontier.push_back(std::move(n));
                }
            }
        }
    };
    add(Coord(d, 0));
    while (static_cast<int>(members.size()) < target_size) {
        const std::size_t pick = rng.uniform_int(frontier.size());
        Coord site = frontier[pick];
        frontier[pick] = frontier.back();
        frontier.pop_back();
        in_frontier.erase(site);
        if (!members.count(site)) add(site);
    }
    return Domain(d, std::vector<Coord>(members.begin(), members.end()));
}

std::string domain_hash(const Domain& domain) {
    const std::string text = serialize_domain(domain);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace fk
