#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sphw/errors.hpp"
#include "sphw/integrator.hpp"
#include "sphw/parallel.hpp"
#include "sphw/transport.hpp"

namespace sphw {

namespace detail {

inline bool same_time(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

inline void require_same_grid(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw DomainError("snapshot grids differ in length (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
    for (std::size_t t = 0; t < a.size(); ++t)
        if (!same_time(a[t], b[t]))
            throw DomainError("snapshot grids differ at index " + std::to_string(t));
}

}  // namespace detail

/// W1 between the mass-normalized particle measures of two runs at every
/// shared snapshot time. Instants are solved concurrently.
template <int D>
std::vector<double> pairwise_distance_series(const SnapshotSeries<D>& a, const SnapshotSeries<D>& b) {
    detail::require_same_grid(a.times(), b.times());
    std::vector<double> w(a.size());
    parallel_for(a.size(), [&](std::size_t t) {
        w[t] = wasserstein1(DiscreteMeasure<D>::from_particles(a.snapshots[t].state),
                            DiscreteMeasure<D>::from_particles(b.snapshots[t].state))
                   .distance;
    });
    return w;
}

/**
 * Empirical rates C_{k+1} = ln(M_{k+1,k+2} / M_{k,k+1}) / ln(N_{k+1} / N_k)
 * for consecutive resolutions. `sup_distances[k]` is M_{k,k+1}, so `levels`
 * holds one more entry than `sup_distances`. A rate is empty when either M is
 * zero (or not finite).
 */
inline std::vector<std::optional<double>> convergence_rates(const std::vector<double>& sup_distances,
                                                            const std::vector<std::size_t>& levels,
                                                            int dimension) {
    if (dimension != 1 && dimension != 2) throw ConfigError("dimension must be 1 or 2");
    if (sup_distances.size() < 2) throw ConfigError("need at least two distances for a rate");
    if (levels.size() != sup_distances.size() + 1)
        throw ConfigError("need one more level than distances");
    for (std::size_t k = 1; k < levels.size(); ++k)
        if (!(levels[k] > levels[k - 1])) throw ConfigError("levels must be strictly increasing");

    std::vector<std::optional<double>> rates;
    for (std::size_t k = 0; k + 1 < sup_distances.size(); ++k) {
        const double m0 = sup_distances[k], m1 = sup_distances[k + 1];
        if (!(m0 > 0.0) || !(m1 > 0.0) || !std::isfinite(m0) || !std::isfinite(m1)) {
            rates.emplace_back();
            continue;
        }
        rates.emplace_back(std::log(m1 / m0) /
                           std::log(static_cast<double>(levels[k + 1]) / static_cast<double>(levels[k])));
    }
    return rates;
}

struct ConvergenceReport {
    int dimension = 2;
    std::vector<std::size_t> levels;          // N_k
    std::vector<double> times;                // shared snapshot grid
    std::vector<std::vector<double>> distances;  // [k][t]: W1 between levels k and k+1
    std::vector<double> sup_distances;        // M_{k,k+1}
    std::vector<std::optional<double>> rates;  // rates[k] = C_{k+1}, plotted against N_{k+1}

    /// Reference value -1/d.
    double expected_rate() const { return -1.0 / dimension; }

    /// Rates computed from the distances at a single time index only.
    std::vector<std::optional<double>> rates_at(std::size_t t) const {
        std::vector<double> m;
        for (const auto& row : distances) m.push_back(row.at(t));
        return convergence_rates(m, levels, dimension);
    }
};

/// Builds M and C from per-time distances already computed.
inline ConvergenceReport make_report(int dimension, std::vector<std::size_t> levels, std::vector<double> times,
                                     std::vector<std::vector<double>> distances) {
    ConvergenceReport r;
    r.dimension = dimension;
    r.levels = std::move(levels);
    r.times = std::move(times);
    r.distances = std::move(distances);
    if (r.levels.size() != r.distances.size() + 1) throw ConfigError("need one more level than distance rows");
    for (const auto& row : r.distances) {
        if (row.size() != r.times.size()) throw DomainError("distance row does not match the time grid");
        double m = 0.0;
        for (double w : row) m = std::max(m, w);
        r.sup_distances.push_back(m);
    }
    if (r.sup_distances.size() >= 2) r.rates = convergence_rates(r.sup_distances, r.levels, dimension);
    return r;
}

/**
 * Convergence study over runs at increasing resolution. Every (k, t) pair of
 * consecutive levels is an independent transport problem; they are solved
 * concurrently and gathered in a fixed order.
 */
template <int D>
ConvergenceReport convergence_report(const std::vector<SnapshotSeries<D>>& runs) {
    if (runs.size() < 2) throw ConfigError("need at least two runs");
    const auto times = runs.front().times();
    std::vector<std::size_t> levels;
    for (const auto& run : runs) {
        detail::require_same_grid(times, run.times());
        if (run.snapshots.empty()) throw DomainError("empty snapshot series");
        levels.push_back(run.snapshots.front().state.size());
    }
    const std::size_t pairs = runs.size() - 1, nt = times.size();
    std::vector<std::vector<double>> dist(pairs, std::vector<double>(nt));
    parallel_for(pairs * nt, [&](std::size_t job) {
        const std::size_t k = job / nt, t = job % nt;
        dist[k][t] = wasserstein1(DiscreteMeasure<D>::from_particles(runs[k].snapshots[t].state),
                                  DiscreteMeasure<D>::from_particles(runs[k + 1].snapshots[t].state))
                         .distance;
    });
    return make_report(D, std::move(levels), times, std::move(dist));
}

}  // namespace sphw
