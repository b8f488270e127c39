#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "sphw/parallel.hpp"
#include "sphw/vec.hpp"

namespace sphw {

enum class NeighborSearch { BruteForce, CellGrid };

/**
 * Candidate interaction partners for every particle, visited in ascending
 * index order. The brute-force variant visits all particles; the cell-grid
 * variant visits a superset of the particles within `radius`. Partners beyond
 * the kernel support contribute exact zeros, so both variants produce the
 * same sums term by term.
 */
template <int D>
class NeighborList {
public:
    static NeighborList brute_force(std::size_t n) {
        NeighborList list;
        list.n_ = n;
        list.dense_ = true;
        return list;
    }

    static NeighborList cell_grid(const std::vector<Vec<D>>& positions, double radius) {
        const std::size_t n = positions.size();
        if (n == 0 || !(radius > 0.0) || !std::isfinite(radius)) return brute_force(n);

        Vec<D> lo = positions[0];
        Vec<D> hi = positions[0];
        for (const auto& x : positions) {
            for (int k = 0; k < D; ++k) {
                lo[k] = std::min(lo[k], x[k]);
                hi[k] = std::max(hi[k], x[k]);
            }
        }
        std::array<std::int64_t, D> extent{};
        double cells = 1.0;
        for (int k = 0; k < D; ++k) {
            const double e = std::floor((hi[k] - lo[k]) / radius) + 1.0;
            if (!std::isfinite(e)) return brute_force(n);
            cells *= e;
            extent[k] = static_cast<std::int64_t>(e);
        }
        if (cells > 1e15) return brute_force(n);

        auto coords = [&](const Vec<D>& x) {
            std::array<std::int64_t, D> c{};
            for (int k = 0; k < D; ++k) {
                auto ck = static_cast<std::int64_t>(std::floor((x[k] - lo[k]) / radius));
                c[k] = std::clamp<std::int64_t>(ck, 0, extent[k] - 1);
            }
            return c;
        };
        auto linear = [&](const std::array<std::int64_t, D>& c) {
            std::int64_t key = 0;
            for (int k = 0; k < D; ++k) key = key * extent[k] + c[k];
            return key;
        };

        std::vector<std::pair<std::int64_t, std::uint32_t>> sorted(n);
        for (std::size_t i = 0; i < n; ++i)
            sorted[i] = {linear(coords(positions[i])), static_cast<std::uint32_t>(i)};
        std::sort(sorted.begin(), sorted.end());

        const double cutoff2 = radius * radius * (1.0 + 1e-10);
        NeighborList list;
        list.n_ = n;
        list.dense_ = false;
        std::vector<std::vector<std::uint32_t>> per(n);
        parallel_for(n, [&](std::size_t i) {
            const auto c = coords(positions[i]);
            auto& out = per[i];
            std::array<std::int64_t, D> off{};
            off.fill(-1);
            for (;;) {
                std::array<std::int64_t, D> cc{};
                bool inside = true;
                for (int k = 0; k < D; ++k) {
                    cc[k] = c[k] + off[k];
                    if (cc[k] < 0 || cc[k] >= extent[k]) inside = false;
                }
                if (inside) {
                    const std::int64_t key = linear(cc);
                    auto first = std::lower_bound(sorted.begin(), sorted.end(),
                                                  std::pair<std::int64_t, std::uint32_t>{key, 0});
                    for (auto it = first; it != sorted.end() && it->first == key; ++it) {
                        const auto d = positions[it->second] - positions[i];
                        if (dot(d, d) <= cutoff2) out.push_back(it->second);
                    }
                }
                int k = D - 1;
                while (k >= 0 && off[k] == 1) off[k--] = -1;
                if (k < 0) break;
                ++off[k];
            }
            std::sort(out.begin(), out.end());
        });

        list.offsets_.resize(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) list.offsets_[i + 1] = list.offsets_[i] + per[i].size();
        list.indices_.reserve(list.offsets_[n]);
        for (auto& v : per) list.indices_.insert(list.indices_.end(), v.begin(), v.end());
        return list;
    }

    static NeighborList build(NeighborSearch mode, const std::vector<Vec<D>>& positions,
                              double radius) {
        return mode == NeighborSearch::BruteForce ? brute_force(positions.size())
                                                  : cell_grid(positions, radius);
    }

    std::size_t size() const noexcept { return n_; }
    bool is_brute_force() const noexcept { return dense_; }

    template <class Fn>
    void for_each(std::size_t i, Fn&& fn) const {
        if (dense_) {
            for (std::size_t j = 0; j < n_; ++j) fn(j);
        } else {
            for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) fn(std::size_t{indices_[p]});
        }
    }

private:
    std::size_t n_ = 0;
    bool dense_ = true;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> indices_;
};

}  // namespace sphw
