#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "sphw/errors.hpp"
#include "sphw/parallel.hpp"
#include "sphw/particles.hpp"
#include "sphw/vec.hpp"

namespace sphw {

namespace detail {

/// Neumaier-compensated sum.
inline double accurate_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return s + c;
}

}  // namespace detail

/// Weighted point cloud with unit total mass.
template <int D>
struct DiscreteMeasure {
    std::vector<Vec<D>> points;
    std::vector<double> weights;

    std::size_t size() const noexcept { return points.size(); }

    void validate(double tolerance = 1e-12) const {
        if (points.empty()) throw DomainError("measure must have at least one atom");
        if (points.size() != weights.size()) throw DomainError("points and weights differ in length");
        for (double w : weights)
            if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("weights must be finite and non-negative");
        for (const auto& p : points)
            if (!all_finite<D>(p)) throw DomainError("atom positions must be finite");
        const double total = detail::accurate_sum(weights);
        if (std::abs(total - 1.0) > tolerance)
            throw DomainError("measure is not normalized (total mass " + std::to_string(total) + ")");
    }

    /// Particle positions with masses scaled to unit total.
    static DiscreteMeasure from_particles(const ParticleState<D>& s) {
        const double total = detail::accurate_sum(s.masses);
        if (!(total > 0.0)) throw DomainError("total mass must be positive");
        DiscreteMeasure m;
        m.points = s.positions;
        m.weights.resize(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) m.weights[i] = s.masses[i] / total;
        return m;
    }
};

struct PlanEntry {
    std::size_t source = 0;
    std::size_t target = 0;
    double mass = 0.0;
};

/// Sparse coupling between two discrete measures and its transport cost.
struct TransportPlan {
    std::vector<PlanEntry> entries;
    double cost = 0.0;
};

struct TransportResult {
    double distance = 0.0;
    TransportPlan plan;
    /// Dual potentials with u_i + v_j <= |p_i - q_j|, tight on the plan support.
    std::vector<double> source_potential;
    std::vector<double> target_potential;
    std::size_t pivots = 0;
};

/**
 * Primal network simplex for the uncapacitated transportation problem
 *
 *   min sum_ij c_ij x_ij   s.t.  sum_j x_ij = a_i,  sum_i x_ij = b_j,  x >= 0.
 *
 * Sources and sinks are joined by an artificial root through big-M arcs that
 * form a strongly feasible initial tree; the leaving arc is the last blocking
 * arc on the pivot cycle (Cunningham's rule), which rules out cycling under
 * degeneracy. Entering arcs come from block pricing, first minimum wins.
 */
class TransportationSimplex {
public:
    TransportationSimplex(std::vector<double> supply, std::vector<double> demand, std::vector<double> cost)
        : n1_(supply.size()), n2_(demand.size()), supply_(std::move(supply)), demand_(std::move(demand)),
          cost_(std::move(cost)) {
        if (cost_.size() != n1_ * n2_) throw DomainError("cost matrix has the wrong size");
    }

    void solve() {
        init();
        const std::size_t m = n1_ * n2_;
        const std::size_t block = std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(std::sqrt(double(m)))));
        std::size_t next = 0;
        for (;;) {
            const long e_in = find_entering(block, next);
            if (e_in < 0) break;
            pivot(static_cast<std::size_t>(e_in));
            if (++pivots_ % 1024 == 0) recompute_potentials();
        }
        recompute_potentials();
    }

    std::size_t pivots() const noexcept { return pivots_; }

    /// Flow on real arc (i, j).
    double flow(std::size_t i, std::size_t j) const { return flow_[i * n2_ + j]; }

    /// Real arcs in the final tree with positive flow.
    std::vector<PlanEntry> support() const {
        std::vector<PlanEntry> out;
        for (std::size_t u = 0; u < nodes_ - 1; ++u) {
            const std::size_t e = pred_[u];
            if (e < n1_ * n2_ && flow_[e] > 0.0) out.push_back({e / n2_, e % n2_, flow_[e]});
        }
        std::sort(out.begin(), out.end(), [](const PlanEntry& a, const PlanEntry& b) {
            return a.source != b.source ? a.source < b.source : a.target < b.target;
        });
        return out;
    }

    /// Node potentials: reduced cost of arc (i, j) is c_ij + pi_i - pi_{n1 + j}.
    const std::vector<double>& potentials() const noexcept { return pi_; }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    std::size_t src(std::size_t e) const { return e < n1_ * n2_ ? e / n2_ : art_src_[e - n1_ * n2_]; }
    std::size_t tgt(std::size_t e) const { return e < n1_ * n2_ ? n1_ + e % n2_ : art_tgt_[e - n1_ * n2_]; }
    double arc_cost(std::size_t e) const { return e < n1_ * n2_ ? cost_[e] : art_cost_[e - n1_ * n2_]; }

    void init() {
        const std::size_t m = n1_ * n2_;
        nodes_ = n1_ + n2_ + 1;
        root_ = nodes_ - 1;
        double cmax = 0.0;
        for (double c : cost_) cmax = std::max(cmax, c);
        art_ = (cmax + 1.0) * static_cast<double>(nodes_);
        eps_ = 1e-12 * std::max(1.0, cmax);

        flow_.assign(m + nodes_ - 1, 0.0);
        in_tree_.assign(m, 0);
        art_src_.assign(nodes_ - 1, 0);
        art_tgt_.assign(nodes_ - 1, 0);
        art_cost_.assign(nodes_ - 1, 0.0);
        parent_.assign(nodes_, kNone);
        pred_.assign(nodes_, kNone);
        up_.assign(nodes_, 0);
        pi_.assign(nodes_, 0.0);
        children_.assign(nodes_, {});
        child_pos_.assign(nodes_, 0);
        mark_.assign(nodes_, 0);
        stamp_ = 0;
        pivots_ = 0;

        for (std::size_t u = 0; u + 1 < nodes_; ++u) {
            const double s = u < n1_ ? supply_[u] : -demand_[u - n1_];
            const std::size_t e = m + u;
            parent_[u] = root_;
            pred_[u] = e;
            child_pos_[u] = children_[root_].size();
            children_[root_].push_back(u);
            if (s >= 0.0) {
                up_[u] = 1;
                art_src_[u] = u;
                art_tgt_[u] = root_;
                art_cost_[u] = 0.0;
                flow_[e] = s;
                pi_[u] = 0.0;
            } else {
                up_[u] = 0;
                art_src_[u] = root_;
                art_tgt_[u] = u;
                art_cost_[u] = art_;
                flow_[e] = -s;
                pi_[u] = art_;
            }
        }
    }

    double reduced_cost(std::size_t e) const { return cost_[e] + pi_[e / n2_] - pi_[n1_ + e % n2_]; }

    long find_entering(std::size_t block, std::size_t& next) const {
        const std::size_t m = n1_ * n2_;
        double best = -eps_;
        long chosen = -1;
        std::size_t count = block;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t e = (next + k) % m;
            if (!in_tree_[e]) {
                const double rc = reduced_cost(e);
                if (rc < best) {
                    best = rc;
                    chosen = static_cast<long>(e);
                }
            }
            if (--count == 0) {
                if (chosen >= 0) {
                    next = (e + 1) % m;
                    return chosen;
                }
                count = block;
            }
        }
        return chosen;
    }

    std::size_t find_join(std::size_t a, std::size_t b) {
        ++stamp_;
        for (std::size_t u = a; u != kNone; u = parent_[u]) mark_[u] = stamp_;
        std::size_t v = b;
        while (mark_[v] != stamp_) v = parent_[v];
        return v;
    }

    void detach(std::size_t u) {
        auto& list = children_[parent_[u]];
        const std::size_t pos = child_pos_[u];
        list[pos] = list.back();
        child_pos_[list[pos]] = pos;
        list.pop_back();
    }

    void attach(std::size_t u, std::size_t p) {
        parent_[u] = p;
        child_pos_[u] = children_[p].size();
        children_[p].push_back(u);
    }

    void pivot(std::size_t e_in) {
        const std::size_t first = src(e_in);
        const std::size_t second = tgt(e_in);
        const std::size_t join = find_join(first, second);
        constexpr double inf = std::numeric_limits<double>::infinity();

        // The cycle is oriented along e_in: join -> first, e_in, second -> join.
        double delta = inf;
        std::size_t u_out = kNone;
        int side = 0;
        for (std::size_t u = first; u != join; u = parent_[u]) {
            const double d = up_[u] ? flow_[pred_[u]] : inf;
            if (d < delta) {
                delta = d;
                u_out = u;
                side = 1;
            }
        }
        for (std::size_t u = second; u != join; u = parent_[u]) {
            const double d = up_[u] ? inf : flow_[pred_[u]];
            if (d <= delta) {
                delta = d;
                u_out = u;
                side = 2;
            }
        }
        if (u_out == kNone) throw NumericError("transportation problem is unbounded");

        for (std::size_t u = first; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? -delta : delta;
        for (std::size_t u = second; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? delta : -delta;
        flow_[pred_[u_out]] = 0.0;
        flow_[e_in] = delta;

        const std::size_t e_out = pred_[u_out];
        if (e_out < n1_ * n2_) in_tree_[e_out] = 0;
        in_tree_[e_in] = 1;

        const std::size_t u_in = side == 1 ? first : second;
        const std::size_t v_in = side == 1 ? second : first;

        // Re-hang the path u_in .. u_out below v_in through e_in.
        std::size_t cur = u_in;
        std::size_t new_parent = v_in;
        std::size_t new_pred = e_in;
        for (;;) {
            const std::size_t old_parent = parent_[cur];
            const std::size_t old_pred = pred_[cur];
            detach(cur);
            attach(cur, new_parent);
            pred_[cur] = new_pred;
            up_[cur] = src(new_pred) == cur ? 1 : 0;
            if (cur == u_out) break;
            new_parent = cur;
            new_pred = old_pred;
            cur = old_parent;
        }

        const double target = up_[u_in] ? pi_[v_in] - arc_cost(e_in) : pi_[v_in] + arc_cost(e_in);
        const double sigma = target - pi_[u_in];
        stack_.clear();
        stack_.push_back(u_in);
        while (!stack_.empty()) {
            const std::size_t u = stack_.back();
            stack_.pop_back();
            pi_[u] += sigma;
            for (std::size_t c : children_[u]) stack_.push_back(c);
        }
    }

    void recompute_potentials() {
        pi_[root_] = 0.0;
        stack_.clear();
        stack_.push_back(root_);
        while (!stack_.empty()) {
            const std::size_t u = stack_.back();
            stack_.pop_back();
            for (std::size_t c : children_[u]) {
                const double ce = arc_cost(pred_[c]);
                pi_[c] = up_[c] ? pi_[u] - ce : pi_[u] + ce;
                stack_.push_back(c);
            }
        }
    }

    std::size_t n1_, n2_;
    std::vector<double> supply_, demand_, cost_;
    std::size_t nodes_ = 0, root_ = 0;
    double art_ = 0.0, eps_ = 0.0;
    std::vector<double> flow_;
    std::vector<std::uint8_t> in_tree_;
    std::vector<std::size_t> art_src_, art_tgt_;
    std::vector<double> art_cost_;
    std::vector<std::size_t> parent_, pred_;
    std::vector<std::uint8_t> up_;
    std::vector<double> pi_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> child_pos_;
    std::vector<unsigned> mark_;
    unsigned stamp_ = 0;
    std::vector<std::size_t> stack_;
    std::size_t pivots_ = 0;
};

template <int D>
std::vector<double> euclidean_cost_matrix(const DiscreteMeasure<D>& mu1, const DiscreteMeasure<D>& mu2) {
    const std::size_t n1 = mu1.size(), n2 = mu2.size();
    std::vector<double> c(n1 * n2);
    parallel_for(n1, [&](std::size_t i) {
        for (std::size_t j = 0; j < n2; ++j) c[i * n2 + j] = norm<D>(mu1.points[i] - mu2.points[j]);
    });
    return c;
}

/// Exact 1-Wasserstein distance with Euclidean ground cost, the optimal plan
/// and a dual certificate.
template <int D>
TransportResult wasserstein1(const DiscreteMeasure<D>& mu1, const DiscreteMeasure<D>& mu2) {
    mu1.validate();
    mu2.validate();
    const auto cost = euclidean_cost_matrix(mu1, mu2);
    TransportationSimplex lp(mu1.weights, mu2.weights, cost);
    lp.solve();

    TransportResult r;
    r.pivots = lp.pivots();
    r.plan.entries = lp.support();
    const std::size_t n1 = mu1.size(), n2 = mu2.size();
    double total = 0.0;
    for (const auto& e : r.plan.entries) total += e.mass * cost[e.source * n2 + e.target];
    r.plan.cost = total;
    r.distance = total;

    const auto& pi = lp.potentials();
    r.source_potential.resize(n1);
    r.target_potential.resize(n2);
    const double shift = pi[0];
    for (std::size_t i = 0; i < n1; ++i) r.source_potential[i] = shift - pi[i];
    for (std::size_t j = 0; j < n2; ++j) r.target_potential[j] = pi[n1 + j] - shift;
    return r;
}

namespace detail {

/**
 * Exhaustive enumeration of the basic feasible solutions of a small
 * transportation problem. The support of a basic solution is a forest, so it
 * can be dismantled by repeatedly removing a leaf: a row (column) whose whole
 * remaining mass goes to a single partner. Leaves are removed in canonical
 * order (smallest index first): after removing leaf v attached to p, the next
 * leaf must have index > v or be p. Every forest keeps its canonical
 * elimination path, so the search stays complete. Branches whose cost plus a
 * lower bound (each remaining unit of mass shipped at its cheapest cost)
 * cannot beat the incumbent are cut. Node indices: rows 0..n1-1, columns n1...
 */
class LeafElimination {
public:
    LeafElimination(std::vector<double> a, std::vector<double> b, std::vector<double> cost)
        : a_(std::move(a)), b_(std::move(b)), cost_(std::move(cost)) {}

    double solve() {
        std::uint64_t rows = 0, cols = 0;
        for (std::size_t i = 0; i < a_.size(); ++i)
            if (a_[i] > kTol) rows |= std::uint64_t{1} << i;
        for (std::size_t j = 0; j < b_.size(); ++j)
            if (b_[j] > kTol) cols |= std::uint64_t{1} << j;
        best_ = north_west_corner();
        auto a = a_, b = b_;
        search(rows, cols, a, b, -1, -1, 0.0);
        return best_;
    }

private:
    static constexpr double kTol = 1e-13;

    double c(std::size_t i, std::size_t j) const { return cost_[i * b_.size() + j]; }

    // Cost of the north-west corner solution, a feasible starting incumbent.
    double north_west_corner() const {
        auto a = a_, b = b_;
        double total = 0.0;
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            const double m = std::min(a[i], b[j]);
            total += m * c(i, j);
            a[i] -= m;
            b[j] -= m;
            if (a[i] <= kTol) ++i;
            else ++j;
        }
        return total;
    }

    double lower_bound(std::uint64_t rows, std::uint64_t cols, const std::vector<double>& a,
                       const std::vector<double>& b) const {
        double lr = 0.0, lc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!(rows >> i & 1)) continue;
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < b.size(); ++j)
                if (cols >> j & 1) m = std::min(m, c(i, j));
            lr += a[i] * m;
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!(cols >> j & 1)) continue;
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < a.size(); ++i)
                if (rows >> i & 1) m = std::min(m, c(i, j));
            lc += b[j] * m;
        }
        return std::max(lr, lc);
    }

    void search(std::uint64_t rows, std::uint64_t cols, std::vector<double>& a, std::vector<double>& b, long last,
                long partner, double acc) {
        if (rows == 0 || cols == 0) {
            double left = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (rows >> i & 1) left += a[i];
            for (std::size_t j = 0; j < b.size(); ++j)
                if (cols >> j & 1) left += b[j];
            if (left <= 1e-12) best_ = std::min(best_, acc);
            return;
        }
        if (std::popcount(rows) == 1 || std::popcount(cols) == 1) {
            // Forced star: lower_bound is exact here.
            best_ = std::min(best_, acc + lower_bound(rows, cols, a, b));
            return;
        }
        if (acc + lower_bound(rows, cols, a, b) >= best_) return;

        const long n1 = static_cast<long>(a.size());
        auto allowed = [&](long v) { return v > last || v == partner; };
        // Row i as a leaf shipping everything to column j.
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!(rows >> i & 1) || !allowed(static_cast<long>(i))) continue;
            for (std::size_t j = 0; j < b.size(); ++j) {
                if (!(cols >> j & 1) || a[i] > b[j] + kTol) continue;
                const double saved = b[j], mass = a[i];
                std::uint64_t ncols = cols;
                b[j] = std::max(0.0, b[j] - mass);
                const bool gone = b[j] <= kTol;
                if (gone) ncols &= ~(std::uint64_t{1} << j);
                search(rows & ~(std::uint64_t{1} << i), ncols, a, b, gone ? -1 : static_cast<long>(i),
                       gone ? -1 : n1 + static_cast<long>(j), acc + mass * c(i, j));
                b[j] = saved;
            }
        }
        // Column j as a leaf supplied entirely by row i.
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!(cols >> j & 1) || !allowed(n1 + static_cast<long>(j))) continue;
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (!(rows >> i & 1) || b[j] > a[i] + kTol) continue;
                const double saved = a[i], mass = b[j];
                std::uint64_t nrows = rows;
                a[i] = std::max(0.0, a[i] - mass);
                const bool gone = a[i] <= kTol;
                if (gone) nrows &= ~(std::uint64_t{1} << i);
                search(nrows, cols & ~(std::uint64_t{1} << j), a, b, gone ? -1 : n1 + static_cast<long>(j),
                       gone ? -1 : static_cast<long>(i), acc + mass * c(i, j));
                a[i] = saved;
            }
        }
    }

    std::vector<double> a_, b_, cost_;
    double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace detail

/**
 * Reference W1 for tiny instances (n1 * n2 <= 64), independent of the
 * simplex. Equal-weight square instances are solved as assignments over all
 * permutations; otherwise every basic feasible solution is enumerated
 * (see detail::LeafElimination).
 */
template <int D>
double brute_force_wasserstein(const DiscreteMeasure<D>& mu1, const DiscreteMeasure<D>& mu2) {
    mu1.validate();
    mu2.validate();
    const std::size_t n1 = mu1.size(), n2 = mu2.size();
    if (n1 * n2 > 64) throw DomainError("brute-force transport is limited to n1 * n2 <= 64");
    const auto cost = euclidean_cost_matrix(mu1, mu2);

    const auto uniform = [](const std::vector<double>& w) {
        return std::all_of(w.begin(), w.end(), [&](double x) { return x == w.front(); });
    };
    if (n1 == n2 && uniform(mu1.weights) && uniform(mu2.weights) && mu1.weights[0] == mu2.weights[0]) {
        std::vector<std::size_t> perm(n1);
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            double s = 0.0;
            for (std::size_t i = 0; i < n1; ++i) s += cost[i * n2 + perm[i]];
            best = std::min(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best * mu1.weights[0];
    }
    return detail::LeafElimination(mu1.weights, mu2.weights, cost).solve();
}

}  // namespace sphw
