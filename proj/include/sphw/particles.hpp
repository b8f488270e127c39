#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sphw/errors.hpp"
#include "sphw/vec.hpp"

namespace sphw {

/// N-particle system: the discrete measure sum_i m_i delta_{x_i} plus the
/// kinematic and smoothing data attached to each atom.
template <int D>
struct ParticleState {
    std::vector<Vec<D>> positions;
    std::vector<Vec<D>> velocities;
    std::vector<double> masses;
    std::vector<double> smoothing_lengths;
    std::vector<double> densities;

    ParticleState() = default;

    explicit ParticleState(std::size_t n)
        : positions(n, zero_vec<D>()),
          velocities(n, zero_vec<D>()),
          masses(n, 0.0),
          smoothing_lengths(n, 0.0),
          densities(n, 0.0) {}

    std::size_t size() const noexcept { return positions.size(); }

    /// Checks array sizes and strict positivity of masses and smoothing lengths.
    void validate() const {
        const std::size_t n = positions.size();
        if (n == 0) throw DomainError("particle state must hold at least one particle");
        if (velocities.size() != n || masses.size() != n || smoothing_lengths.size() != n ||
            densities.size() != n)
            throw DomainError("particle state arrays differ in length");
        for (std::size_t i = 0; i < n; ++i) {
            if (!(masses[i] > 0.0))
                throw DomainError("particle " + std::to_string(i) + " has non-positive mass");
            if (!(smoothing_lengths[i] > 0.0))
                throw DomainError("particle " + std::to_string(i) +
                                  " has non-positive smoothing length");
        }
    }

    double total_mass() const {
        double m = 0.0;
        for (double mi : masses) m += mi;
        return m;
    }

    Vec<D> total_momentum() const {
        Vec<D> p = zero_vec<D>();
        for (std::size_t i = 0; i < size(); ++i) p += masses[i] * velocities[i];
        return p;
    }

    double kinetic_energy() const {
        double e = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            e += 0.5 * masses[i] * dot(velocities[i], velocities[i]);
        return e;
    }

    friend bool operator==(const ParticleState&, const ParticleState&) = default;
};

}  // namespace sphw
