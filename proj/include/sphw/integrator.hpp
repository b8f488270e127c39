#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "sphw/errors.hpp"
#include "sphw/forces.hpp"
#include "sphw/particles.hpp"

namespace sphw {

/// Kick-drift-kick leapfrog over an SphSystem. The acceleration evaluated at
/// the end of a step is reused for the first half-kick of the next one.
///
/// One step:
///   v   += dt/2 a_n                  (rho += dt/2 rhodot_n in Continuity mode)
///   x   += dt v
///   Summation:  rho <- sum_j m_j W  Continuity: rho += dt/2 rhodot(x_{n+1}, v_{n+1/2})
///   h   <- smoothing update from the refreshed rho
/// In Summation mode a mass-flux correction d_i moves per-particle offsets
/// added to the kernel sum, with the same two half steps: offset += dt/2 d_n
/// before the drift and offset += dt/2 d(x_{n+1}) after the re-summation.
///   v   += dt/2 a_{n+1}, with a_{n+1} evaluated at the half-step velocity
template <int D>
class Leapfrog {
public:
    explicit Leapfrog(const SphSystem<D>& system) : system_(system) {}

    /// Sets smoothing lengths from the given densities, brings densities in
    /// line with the positions and evaluates the initial rates. Continuity mode keeps the given densities;
    /// so does Summation mode anchored to the initial profile.
    void initialize(ParticleState<D>& s) {
        s.validate();
        s.smoothing_lengths = update_smoothing_lengths(s, system_.smoothing());
        offsets_ = system_.summation_offsets(s);
        system_.refresh(s, offsets_);
        rates_ = system_.rates(s);
        check_finite(s, 0);
    }

    void step(ParticleState<D>& s, double dt, long step_index = 0) {
        if (!rates_) initialize(s);
        const bool continuity = system_.forces().density_mode == DensityMode::Continuity;
        const bool diffusing = !continuity && !rates_->density_rate.empty();
        const double half = 0.5 * dt;
        const std::size_t n = s.size();

        for (std::size_t i = 0; i < n; ++i) s.velocities[i] += half * rates_->acceleration[i];
        if (continuity)
            for (std::size_t i = 0; i < n; ++i) s.densities[i] += half * rates_->density_rate[i];
        if (diffusing) {
            if (offsets_.empty()) offsets_.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) offsets_[i] += half * rates_->density_rate[i];
        }
        for (std::size_t i = 0; i < n; ++i) s.positions[i] += dt * s.velocities[i];

        if (continuity) {
            check_finite(s, step_index);
            const auto rate = system_.density_rate(s);
            for (std::size_t i = 0; i < n; ++i) s.densities[i] += half * rate[i];
        }
        check_finite(s, step_index);
        system_.refresh(s, offsets_);
        if (diffusing) {
            check_finite(s, step_index);
            // The summed density is linear in the offsets, so no re-summation.
            const auto rate = system_.density_rate(s);
            for (std::size_t i = 0; i < n; ++i) {
                offsets_[i] += half * rate[i];
                s.densities[i] += half * rate[i];
            }
            check_finite(s, step_index);
            s.smoothing_lengths = update_smoothing_lengths(s, system_.smoothing());
        }

        rates_ = system_.rates(s);
        for (std::size_t i = 0; i < n; ++i) s.velocities[i] += half * rates_->acceleration[i];
        check_finite(s, step_index);
    }

    const std::optional<Rates<D>>& rates() const noexcept { return rates_; }

private:
    static void check_finite(const ParticleState<D>& s, long step) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!all_finite<D>(s.positions[i]) || !all_finite<D>(s.velocities[i]))
                throw IntegrationError(step, i, "non-finite position or velocity");
            if (!std::isfinite(s.densities[i]) || !(s.densities[i] > 0.0))
                throw IntegrationError(step, i, "non-finite or non-positive density");
            if (!std::isfinite(s.smoothing_lengths[i]) || !(s.smoothing_lengths[i] > 0.0))
                throw IntegrationError(step, i, "invalid smoothing length");
        }
    }

    const SphSystem<D>& system_;
    std::optional<Rates<D>> rates_;
    std::vector<double> offsets_;
};

/// Single leapfrog step from a freshly evaluated state.
template <int D>
ParticleState<D> leapfrog_step(ParticleState<D> s, double dt, const SphSystem<D>& system) {
    Leapfrog<D> lf(system);
    lf.initialize(s);
    lf.step(s, dt);
    return s;
}

struct SimulationConfig {
    double dt = 1e-6;
    double t_final = 0.0;
    std::vector<double> snapshot_times;

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(t_final >= 0.0)) throw ConfigError("t_final must be non-negative");
        double prev = -1.0;
        for (double t : snapshot_times) {
            if (t < 0.0 || t > t_final * (1.0 + 1e-12))
                throw ConfigError("snapshot times must lie in [0, t_final]");
            if (!(t > prev)) throw ConfigError("snapshot times must be strictly increasing");
            prev = t;
        }
    }
};

/// Uniform grid of `intervals` + 1 instants on [0, t_final].
inline std::vector<double> uniform_times(double t_final, int intervals = 10) {
    std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
    for (int k = 0; k <= intervals; ++k) t[static_cast<std::size_t>(k)] = t_final * k / intervals;
    return t;
}

template <int D>
struct Snapshot {
    double time = 0.0;
    long step = 0;
    ParticleState<D> state;
    double total_mass = 0.0;
    Vec<D> total_momentum{};
    double total_energy = 0.0;  // NaN unless the EOS is polytropic
};

template <int D>
struct SnapshotSeries {
    std::vector<Snapshot<D>> snapshots;

    std::size_t size() const noexcept { return snapshots.size(); }
    std::vector<double> times() const {
        std::vector<double> t;
        for (const auto& s : snapshots) t.push_back(s.time);
        return t;
    }
};

template <int D>
Snapshot<D> make_snapshot(const SphSystem<D>& system, const ParticleState<D>& s, double t, long step) {
    Snapshot<D> snap;
    snap.time = t;
    snap.step = step;
    snap.state = s;
    snap.total_mass = s.total_mass();
    snap.total_momentum = s.total_momentum();
    snap.total_energy = system.total_energy(s);
    return snap;
}

/**
 * Integrates from t = 0 to t_final with fixed dt, recording snapshots at the
 * step nearest to each requested instant (only the final state when no
 * instants are requested). `observer`, when given, is called
 * after every completed step with (step, time, state).
 */
template <int D>
SnapshotSeries<D> simulate(
    const SimulationConfig& config, const SphSystem<D>& system, ParticleState<D> state,
    const std::function<void(long, double, const ParticleState<D>&)>& observer = {}) {
    config.validate();
    const long steps = std::lround(config.t_final / config.dt);
    std::vector<long> snap_steps;
    for (double t : config.snapshot_times) snap_steps.push_back(std::lround(t / config.dt));

    Leapfrog<D> lf(system);
    lf.initialize(state);

    SnapshotSeries<D> series;
    std::size_t next = 0;
    auto record = [&](long step) {
        while (next < snap_steps.size() && snap_steps[next] == step) {
            series.snapshots.push_back(make_snapshot(system, state, config.snapshot_times[next], step));
            ++next;
        }
    };
    record(0);
    if (observer) observer(0, 0.0, state);
    for (long k = 1; k <= steps; ++k) {
        lf.step(state, config.dt, k);
        record(k);
        if (observer) observer(k, static_cast<double>(k) * config.dt, state);
    }
    if (config.snapshot_times.empty())
        series.snapshots.push_back(make_snapshot(system, state, config.t_final, steps));
    return series;
}

}  // namespace sphw
