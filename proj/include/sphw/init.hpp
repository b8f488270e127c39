#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "sphw/errors.hpp"
#include "sphw/particles.hpp"

namespace sphw {

/// Square lattice clipped to a disc. The bounding square [-R, R]^2 carries
/// `sites_across` cell-centred sites per side (spacing 2R / sites_across);
/// sites with |x| <= R are kept.
struct LatticeDisc {
    int sites_across = 32;
    double radius = 1.0;
    double rho0 = 1.0;
    std::function<Vec<2>(const Vec<2>&)> velocity_field;

    double spacing() const { return 2.0 * radius / sites_across; }
};

/// Equal-mass particles on [a, b] with a density jump at x_jump.
struct Segment1D {
    std::size_t count = 450;
    double rho_left = 1.0;
    double rho_right = 0.125;
    double x_jump = 0.5;
    double a = 0.0;
    double b = 1.0;
};

/// Classical elliptic-drop shear field v = (-A x, A y).
inline std::function<Vec<2>(const Vec<2>&)> shear_field(double amplitude) {
    return [amplitude](const Vec<2>& x) { return Vec<2>{-amplitude * x[0], amplitude * x[1]}; };
}

/**
 * Lattice partition of the disc: one particle per kept cell with
 * m_i = rho0 * spacing^2. The inside test is done in integers: with site
 * offsets k_x = 2 i + 1 - l the site is kept iff k_x^2 + k_y^2 <= l^2.
 * Densities start at rho0; smoothing lengths start at the spacing.
 */
inline ParticleState<2> lattice_disc(const LatticeDisc& spec) {
    if (spec.sites_across < 1) throw InitError("lattice needs at least one site per side");
    if (!(spec.radius > 0.0) || !(spec.rho0 > 0.0)) throw InitError("radius and density must be positive");
    const std::int64_t l = spec.sites_across;
    const double s = spec.spacing();
    const double m = spec.rho0 * s * s;

    ParticleState<2> state;
    for (std::int64_t j = 0; j < l; ++j) {
        const std::int64_t ky = 2 * j + 1 - l;
        for (std::int64_t i = 0; i < l; ++i) {
            const std::int64_t kx = 2 * i + 1 - l;
            if (kx * kx + ky * ky > l * l) continue;
            const Vec<2> x{spec.radius * static_cast<double>(kx) / static_cast<double>(l),
                           spec.radius * static_cast<double>(ky) / static_cast<double>(l)};
            state.positions.push_back(x);
            state.velocities.push_back(spec.velocity_field ? spec.velocity_field(x) : Vec<2>{0.0, 0.0});
            state.masses.push_back(m);
            state.smoothing_lengths.push_back(s);
            state.densities.push_back(spec.rho0);
        }
    }
    if (state.size() == 0) throw InitError("no lattice site falls inside the disc");
    return state;
}

/**
 * Equal-mass partition of a piecewise-constant density profile. Particle k
 * sits at the position whose cumulative mass is (k + 1/2) m, m = M / N, so
 * each particle is the centre of a cell of width m / rho.
 */
inline ParticleState<1> segment_partition_equal_mass(const Segment1D& spec) {
    if (spec.count < 2) throw InitError("segment needs at least two particles");
    if (!(spec.rho_left > 0.0) || !(spec.rho_right > 0.0)) throw InitError("densities must be positive");
    if (!(spec.a < spec.x_jump && spec.x_jump < spec.b)) throw InitError("need a < x_jump < b");
    const double mass_left = spec.rho_left * (spec.x_jump - spec.a);
    const double mass_right = spec.rho_right * (spec.b - spec.x_jump);
    const double total = mass_left + mass_right;
    const double n = static_cast<double>(spec.count);
    const double m = total / n;
    if (mass_left / m < 1.0 || mass_right / m < 1.0)
        throw InitError("too few particles to resolve both sides of the jump");

    ParticleState<1> state(spec.count);
    for (std::size_t k = 0; k < spec.count; ++k) {
        const double mu = (static_cast<double>(k) + 0.5) * m;
        const bool left = mu < mass_left;
        const double x = left ? spec.a + mu / spec.rho_left : spec.x_jump + (mu - mass_left) / spec.rho_right;
        const double rho = x < spec.x_jump ? spec.rho_left : spec.rho_right;
        state.positions[k] = {x};
        state.velocities[k] = {0.0};
        state.masses[k] = m;
        state.densities[k] = rho;
        state.smoothing_lengths[k] = m / rho;
    }
    return state;
}

/// Copy with masses scaled to unit total; positions and velocities untouched.
template <int D>
ParticleState<D> normalize_total_mass(ParticleState<D> s) {
    const double total = s.total_mass();
    if (!(total > 0.0)) throw DomainError("total mass must be positive");
    for (double& m : s.masses) m /= total;
    return s;
}

}  // namespace sphw
