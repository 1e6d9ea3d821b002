#include "fk/bulk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fk {

double dispersion(const std::vector<double>& k) {
    double e = 2.0 * k.size();
    for (double ki : k) e -= 2.0 * std::cos(ki);
    return e;
}

double sphere_volume(int d) {
    if (d < 1) throw std::invalid_argument("sphere_volume: d must be >= 1");
    return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

int default_bulk_points(int d) {
    if (d <= 1) return 4096;
    if (d == 2) return 1024;
    return 128;
}

BulkModel::BulkModel(int d, int pts_per_axis) : BulkModel(d, pts_per_axis, true) {}

BulkModel::BulkModel(int d, int pts_per_axis, bool build_coarse) : d_(d), m_(pts_per_axis) {
    if (d < 1) throw std::invalid_argument("bulk model: d must be >= 1");
    if (m_ < 64) throw std::invalid_argument("bulk model: need at least 64 points per axis");
    if (m_ % 2 != 0) throw std::invalid_argument("bulk model: points per axis must be even");
    build_table();
    if (build_coarse)
        coarse_.reset(new BulkModel(d, m_ / 2, false));
}

void BulkModel::build_table() {
    long long grid = 1;
    for (int i = 0; i < d_; ++i) grid *= m_;
    sorted_.resize(grid);
    const double h = 2.0 * M_PI / m_;

    std::vector<double> cosines(m_);
    for (int j = 0; j < m_; ++j) cosines[j] = std::cos(-M_PI + (j + 0.5) * h);

    std::vector<int> idx(d_, 0);
    for (long long g = 0; g < grid; ++g) {
        double e = 2.0 * d_;
        for (int i = 0; i < d_; ++i) e -= 2.0 * cosines[idx[i]];
        sorted_[g] = e;
        for (int i = d_ - 1; i >= 0; --i) {
            if (++idx[i] < m_) break;
            idx[i] = 0;
        }
    }
    std::sort(sorted_.begin(), sorted_.end());
    prefix_.resize(grid + 1);
    long double acc = 0.0L;
    prefix_[0] = 0.0;
    for (long long g = 0; g < grid; ++g) {
        acc += sorted_[g];
        prefix_[g + 1] = static_cast<double>(acc);
    }
}

double BulkModel::filling(double eps) const {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), eps);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double BulkModel::fermi_level(double n) const {
    if (n < 0.0 || n > 1.0) throw std::invalid_argument("fermi_level: n must be in [0,1]");
    if (n == 0.0) return 0.0;
    if (n == 1.0) return 4.0 * d_;
    double lo = 0.0, hi = 4.0 * d_;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (filling(mid) < n)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

double BulkModel::partial_sum(double cells) const {
    const long long grid = static_cast<long long>(sorted_.size());
    if (cells <= 0.0) return 0.0;
    if (cells >= static_cast<double>(grid)) return prefix_[grid];
    long long j = static_cast<long long>(cells);
    double frac = cells - static_cast<double>(j);
    return prefix_[j] + frac * sorted_[j];
}

double BulkModel::energy(double n) const {
    if (n < 0.0 || n > 1.0) throw std::invalid_argument("energy: n must be in [0,1]");
    const double grid = static_cast<double>(sorted_.size());
    return partial_sum(n * grid) / grid;
}

double BulkModel::free_energy(double beta, double mu) const {
    if (beta <= 0) throw std::invalid_argument("free_energy: beta must be > 0");
    long double acc = 0.0L;
    for (double e : sorted_) {
        const double t = -beta * (e - mu);
        acc += t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    }
    return -static_cast<double>(acc) / (beta * static_cast<double>(sorted_.size()));
}

double BulkModel::energy_error(double n) const {
    // refinement difference plus a curvature-scale floor; calibrated against
    // the d=1 closed form and a d=2 reference table at 4x resolution
    const double h = 2.0 * M_PI / m_;
    const double floor = 0.25 * d_ * h * h + 1e-12;
    if (!coarse_) return floor;
    return 2.0 * std::abs(energy(n) - coarse_->energy(n)) + floor;
}

double BulkModel::free_energy_error(double beta, double mu) const {
    if (!coarse_) return 1e-9;
    return 2.0 * std::abs(free_energy(beta, mu) - coarse_->free_energy(beta, mu)) + 1e-12;
}

std::vector<double> BulkModel::level_set_averages(int levels) const {
    if (levels < 1) throw std::invalid_argument("level_set_averages: levels must be >= 1");
    const double grid = static_cast<double>(sorted_.size());
    std::vector<double> out(levels);
    double prev = 0.0;
    for (int j = 1; j <= levels; ++j) {
        double cur = partial_sum(grid * j / levels);
        out[j - 1] = (cur - prev) * levels / grid;
        prev = cur;
    }
    return out;
}

double BulkModel::mean() const {
    return prefix_.back() / static_cast<double>(sorted_.size());
}

const BulkModel& shared_bulk_model(int d, int pts_per_axis) {
    static std::map<std::pair<int, int>, std::unique_ptr<BulkModel>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(d, pts_per_axis);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<BulkModel>(d, pts_per_axis)).first;
    return *it->second;
}

const BulkModel& shared_bulk_model(int d) {
    return shared_bulk_model(d, default_bulk_points(d));
}

BoundReport dispersion_window_check(int d, int samples_per_axis) {
    // Uniform samples of the closed box |k|_inf <= pi/2.
    const int m = samples_per_axis;
    long long grid = 1;
    for (int i = 0; i < d; ++i) grid *= m;
    double worst = 1e300, worst_lhs = 0, worst_rhs = 0;
    std::vector<double> worst_k;
    std::vector<int> idx(d, 0);
    for (long long g = 0; g < grid; ++g) {
        std::vector<double> k(d);
        double k2 = 0.0;
        for (int i = 0; i < d; ++i) {
            k[i] = -M_PI_2 + idx[i] * (M_PI / (m - 1));
            k2 += k[i] * k[i];
        }
        const double e = dispersion(k);
        const double lower = 8.0 / (M_PI * M_PI) * k2;
        // slack of the tighter side
        double s_lo = e - lower, s_hi = k2 - e;
        double s = std::min(s_lo, s_hi);
        if (s < worst) {
            worst = s;
            worst_k = k;
            if (s_lo <= s_hi) {
                worst_lhs = e;
                worst_rhs = lower;
            } else {
                worst_lhs = k2;
                worst_rhs = e;
            }
        }
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[i] < m) break;
            idx[i] = 0;
        }
    }
    nlohmann::json inputs{{"d", d}, {"samples_per_axis", m}, {"worst_k", worst_k}};
    return make_report("dispersion-window", worst_lhs, worst_rhs, 1e-12, std::move(inputs));
}

}  // namespace fk
