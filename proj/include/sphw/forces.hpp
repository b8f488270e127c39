#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sphw/eos.hpp"
#include "sphw/errors.hpp"
#include "sphw/kernels.hpp"
#include "sphw/neighbors.hpp"
#include "sphw/parallel.hpp"
#include "sphw/particles.hpp"

namespace sphw {

enum class DensityMode { Summation, Continuity };

/// Summation density as a plain kernel sum (Absolute), or shifted per
/// particle so that it starts from the prescribed initial density
/// (InitialProfile). With fixed h the shifted sum is the exact time integral
/// of the continuity rate started from the initial profile.
enum class SummationReference { Absolute, InitialProfile };

/// Smoothing length used for a pair (i, j): h_i (gather) or (h_i + h_j) / 2.
enum class PairSmoothing { Gather, Mean };

/// Monaghan-type artificial viscosity. The sound speed defaults to
/// sqrt(dP/drho) of the equation of state.
struct ViscosityParams {
    double alpha = 0.0;
    double beta = 0.0;
    std::function<double(double)> sound_speed;
};

/// Density-diffusion ("mass flux") correction parameters.
struct MassFluxParams {
    double alpha = 0.5;
    double beta = 0.0;
};

template <int D>
struct ExternalPotential {
    std::function<double(const Vec<D>&)> value;
    std::function<Vec<D>(const Vec<D>&)> gradient;
};

/// Selection of the motion equation (theta) and the optional force terms.
template <int D>
struct ForceConfig {
    int theta = 1;
    std::optional<ViscosityParams> viscosity;
    std::optional<MassFluxParams> mass_flux;
    std::optional<ExternalPotential<D>> external_potential;
    /// nu(x) >= 0; empty means no friction.
    std::function<double(const Vec<D>&)> friction;
    /// K(x - y); empty means no non-local interaction.
    std::function<Vec<D>(const Vec<D>&)> interaction_kernel;
    DensityMode density_mode = DensityMode::Summation;
    SummationReference summation_reference = SummationReference::Absolute;
    PairSmoothing pair_smoothing = PairSmoothing::Gather;
    NeighborSearch neighbor_search = NeighborSearch::CellGrid;

    void validate() const {
        if (theta != 0 && theta != 1) throw ConfigError("theta must be 0 or 1");
        if (viscosity && (viscosity->alpha < 0.0 || viscosity->beta < 0.0))
            throw ConfigError("viscosity parameters must be non-negative");
        if (mass_flux && (mass_flux->alpha < 0.0 || mass_flux->beta < 0.0))
            throw ConfigError("mass-flux parameters must be non-negative");
        if (external_potential && !external_potential->gradient)
            throw ConfigError("external potential needs a gradient");
    }
};

/// Kernel, partner lists and pair smoothing convention for one particle
/// configuration.
template <int D>
struct PairContext {
    const Kernel<D>& kernel;
    NeighborList<D> neighbors;
    PairSmoothing smoothing = PairSmoothing::Gather;

    double pair_h(const ParticleState<D>& s, std::size_t i, std::size_t j) const {
        return smoothing == PairSmoothing::Gather
                   ? s.smoothing_lengths[i]
                   : 0.5 * (s.smoothing_lengths[i] + s.smoothing_lengths[j]);
    }

    static PairContext build(const ParticleState<D>& s, const Kernel<D>& kernel,
                             PairSmoothing smoothing = PairSmoothing::Gather,
                             NeighborSearch search = NeighborSearch::BruteForce) {
        double hmax = 0.0;
        for (double h : s.smoothing_lengths) hmax = std::max(hmax, h);
        return PairContext{kernel,
                           NeighborList<D>::build(search, s.positions, kernel.support_radius(hmax)),
                           smoothing};
    }
};

namespace detail {

template <int D>
void require_positive_densities(const ParticleState<D>& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(s.densities[i] > 0.0) || !std::isfinite(s.densities[i]))
            throw NumericError("particle " + std::to_string(i) + " has non-positive density");
}

}  // namespace detail

/// rho_i = sum_j m_j W(x_i - x_j), self term included, j ascending.
template <int D>
std::vector<double> estimate_density(const ParticleState<D>& s, const PairContext<D>& ctx) {
    std::vector<double> rho(s.size());
    parallel_for(s.size(), [&](std::size_t i) {
        double acc = 0.0;
        ctx.neighbors.for_each(i, [&](std::size_t j) {
            acc += s.masses[j] * ctx.kernel.value(s.positions[i] - s.positions[j], ctx.pair_h(s, i, j));
        });
        rho[i] = acc;
    });
    return rho;
}

template <int D>
std::vector<double> estimate_density(const ParticleState<D>& s, const Kernel<D>& kernel) {
    return estimate_density(s, PairContext<D>::build(s, kernel));
}

/**
 * Pressure acceleration of the unified scheme
 *
 *   a_i = -sum_j m_j (F(rho_i) + theta F(rho_j)) grad W(x_i - x_j)
 *
 * with F = P / rho^2 for theta = 1 (momentum-conserving SPH) and
 * F = P'(rho) / rho for theta = 0.
 */
template <int D>
std::vector<Vec<D>> theta_acceleration(const ParticleState<D>& s, const PairContext<D>& ctx,
                                       const EosSpec& eos, int theta) {
    if (theta != 0 && theta != 1) throw ConfigError("theta must be 0 or 1");
    detail::require_positive_densities(s);
    const std::size_t n = s.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = s.densities[i];
        f[i] = theta == 1 ? eos.pressure(rho) / (rho * rho) : eos.dpressure_ddensity(rho) / rho;
    }
    const double th = theta;
    std::vector<Vec<D>> acc(n, zero_vec<D>());
    parallel_for(n, [&](std::size_t i) {
        Vec<D> a = zero_vec<D>();
        ctx.neighbors.for_each(i, [&](std::size_t j) {
            const auto g = ctx.kernel.gradient(s.positions[i] - s.positions[j], ctx.pair_h(s, i, j));
            a -= (s.masses[j] * (f[i] + th * f[j])) * g;
        });
        acc[i] = a;
    });
    return acc;
}

template <int D>
std::vector<Vec<D>> theta_acceleration(const ParticleState<D>& s, const Kernel<D>& kernel,
                                       const EosSpec& eos, int theta) {
    return theta_acceleration(s, PairContext<D>::build(s, kernel), eos, theta);
}

/**
 * Monaghan artificial viscosity, active for approaching pairs only:
 *
 *   mu_ij = hbar (v_ij . x_ij) / (r^2 + 0.01 hbar^2)
 *   Pi_ij = (-alpha cbar mu_ij + beta mu_ij^2) / rhobar
 *   a_i  -= sum_j m_j Pi_ij grad W(x_i - x_j)
 *
 * with bars denoting pair means.
 */
template <int D>
std::vector<Vec<D>> artificial_viscosity_acceleration(const ParticleState<D>& s,
                                                      const PairContext<D>& ctx, const EosSpec& eos,
                                                      const ViscosityParams& p) {
    detail::require_positive_densities(s);
    const std::size_t n = s.size();
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i)
        c[i] = p.sound_speed ? p.sound_speed(s.densities[i]) : eos.sound_speed(s.densities[i]);
    std::vector<Vec<D>> acc(n, zero_vec<D>());
    parallel_for(n, [&](std::size_t i) {
        Vec<D> a = zero_vec<D>();
        ctx.neighbors.for_each(i, [&](std::size_t j) {
            if (j == i) return;
            const auto xij = s.positions[i] - s.positions[j];
            const double vx = dot(s.velocities[i] - s.velocities[j], xij);
            if (vx >= 0.0) return;
            const double hbar = 0.5 * (s.smoothing_lengths[i] + s.smoothing_lengths[j]);
            const double mu = hbar * vx / (dot(xij, xij) + 0.01 * hbar * hbar);
            const double cbar = 0.5 * (c[i] + c[j]);
            const double rhobar = 0.5 * (s.densities[i] + s.densities[j]);
            const double pi_ij = (-p.alpha * cbar * mu + p.beta * mu * mu) / rhobar;
            a -= (s.masses[j] * pi_ij) * ctx.kernel.gradient(xij, ctx.pair_h(s, i, j));
        });
        acc[i] = a;
    });
    return acc;
}

/**
 * Density-diffusion correction written as a pairwise antisymmetric volume flux
 *
 *   Phi_ij = 2 (alpha cbar + beta |v_ij . x_ij| / r) hbar (rho_i - rho_j)
 *            (x_ij . grad W_hbar(x_ij)) / (r^2 + 0.01 hbar^2) m_i m_j / rhobar^2
 *   drho_i/dt += rho_i / m_i sum_j Phi_ij
 *
 * so that sum_i m_i (drho_i/dt) / rho_i vanishes identically. The symmetric
 * pair length hbar is always used here to keep Phi antisymmetric.
 */
template <int D>
std::vector<double> mass_flux_correction(const ParticleState<D>& s, const PairContext<D>& ctx,
                                         const EosSpec& eos, const MassFluxParams& p) {
    detail::require_positive_densities(s);
    const std::size_t n = s.size();
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = eos.sound_speed(s.densities[i]);
    std::vector<double> rate(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        double acc = 0.0;
        ctx.neighbors.for_each(i, [&](std::size_t j) {
            if (j == i) return;
            const auto xij = s.positions[i] - s.positions[j];
            const double r2 = dot(xij, xij);
            if (r2 == 0.0) return;
            const double hbar = 0.5 * (s.smoothing_lengths[i] + s.smoothing_lengths[j]);
            const double xg = dot(xij, ctx.kernel.gradient(xij, hbar));
            if (xg == 0.0) return;
            const double signal =
                p.alpha * 0.5 * (c[i] + c[j]) +
                p.beta * std::abs(dot(s.velocities[i] - s.velocities[j], xij)) / std::sqrt(r2);
            const double rhobar = 0.5 * (s.densities[i] + s.densities[j]);
            acc += 2.0 * signal * hbar * (s.densities[i] - s.densities[j]) * xg /
                   (r2 + 0.01 * hbar * hbar) * (s.masses[i] * s.masses[j]) / (rhobar * rhobar);
        });
        rate[i] = s.densities[i] / s.masses[i] * acc;
    });
    return rate;
}

/// drho_i/dt = sum_j m_j (v_i - v_j) . grad W(x_i - x_j).
template <int D>
std::vector<double> continuity_density_rate(const ParticleState<D>& s, const PairContext<D>& ctx) {
    std::vector<double> rate(s.size(), 0.0);
    parallel_for(s.size(), [&](std::size_t i) {
        double acc = 0.0;
        ctx.neighbors.for_each(i, [&](std::size_t j) {
            const auto g = ctx.kernel.gradient(s.positions[i] - s.positions[j], ctx.pair_h(s, i, j));
            acc += s.masses[j] * dot(s.velocities[i] - s.velocities[j], g);
        });
        rate[i] = acc;
    });
    return rate;
}

/// -grad u(x_i) - nu(x_i) v_i + sum_j m_j K(x_i - x_j), for whichever terms are set.
template <int D>
std::vector<Vec<D>> auxiliary_forces(const ParticleState<D>& s, const ForceConfig<D>& cfg) {
    const std::size_t n = s.size();
    std::vector<Vec<D>> acc(n, zero_vec<D>());
    const bool any = cfg.external_potential || cfg.friction || cfg.interaction_kernel;
    if (!any) return acc;
    parallel_for(n, [&](std::size_t i) {
        Vec<D> a = zero_vec<D>();
        if (cfg.external_potential) a -= cfg.external_potential->gradient(s.positions[i]);
        if (cfg.friction) a -= cfg.friction(s.positions[i]) * s.velocities[i];
        if (cfg.interaction_kernel) {
            Vec<D> k = zero_vec<D>();
            for (std::size_t j = 0; j < n; ++j)
                k += s.masses[j] * cfg.interaction_kernel(s.positions[i] - s.positions[j]);
            a += k;
        }
        acc[i] = a;
    });
    return acc;
}

struct FixedGlobal {
    double h = 0.1;
};
/// h = eta N^(-1/D) for every particle.
struct ScaledByN {
    double eta = 1.5;
};
/// h_i = eta m_i / rho_i; a length only in one dimension.
struct AdaptiveMassDensity {
    double eta = 1.2;
};
using SmoothingMode = std::variant<FixedGlobal, ScaledByN, AdaptiveMassDensity>;

template <int D>
std::vector<double> update_smoothing_lengths(const ParticleState<D>& s, const SmoothingMode& mode) {
    const std::size_t n = s.size();
    if (const auto* f = std::get_if<FixedGlobal>(&mode)) {
        if (!(f->h > 0.0)) throw ConfigError("smoothing length must be positive");
        return std::vector<double>(n, f->h);
    }
    if (const auto* sc = std::get_if<ScaledByN>(&mode)) {
        if (!(sc->eta > 0.0)) throw ConfigError("eta must be positive");
        const double h = sc->eta * std::pow(static_cast<double>(n), -1.0 / D);
        return std::vector<double>(n, h);
    }
    const auto& ad = std::get<AdaptiveMassDensity>(mode);
    if (D != 1) throw ConfigError("adaptive h = eta m / rho requires one dimension");
    if (!(ad.eta > 0.0)) throw ConfigError("eta must be positive");
    detail::require_positive_densities(s);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = ad.eta * s.masses[i] / s.densities[i];
    return h;
}

/// Time derivatives of the particle system.
template <int D>
struct Rates {
    std::vector<Vec<D>> acceleration;
    /// Continuity mode: the full density rate. Summation mode: the mass-flux
    /// correction alone (empty without one), which drives the summation offsets.
    std::vector<double> density_rate;
};

/// Right-hand side of the particle ODE: density refresh, smoothing-length
/// update and force assembly for a fixed kernel, EOS and force configuration.
template <int D>
class SphSystem {
public:
    SphSystem(Kernel<D> kernel, EosSpec eos, ForceConfig<D> forces, SmoothingMode smoothing)
        : kernel_(kernel), eos_(std::move(eos)), forces_(std::move(forces)), smoothing_(smoothing) {
        forces_.validate();
        if (std::holds_alternative<AdaptiveMassDensity>(smoothing_) && D != 1)
            throw ConfigError("adaptive h = eta m / rho requires one dimension");
    }

    const Kernel<D>& kernel() const noexcept { return kernel_; }
    const EosSpec& eos() const noexcept { return eos_; }
    const ForceConfig<D>& forces() const noexcept { return forces_; }
    const SmoothingMode& smoothing() const noexcept { return smoothing_; }

    PairContext<D> context(const ParticleState<D>& s) const {
        return PairContext<D>::build(s, kernel_, forces_.pair_smoothing, forces_.neighbor_search);
    }

    /// Per-particle shifts for SummationReference::InitialProfile: the given
    /// densities minus the kernel sum at the current smoothing lengths. Empty
    /// for the other modes.
    std::vector<double> summation_offsets(const ParticleState<D>& s) const {
        if (forces_.density_mode != DensityMode::Summation ||
            forces_.summation_reference != SummationReference::InitialProfile)
            return {};
        auto offsets = estimate_density(s, context(s));
        for (std::size_t i = 0; i < offsets.size(); ++i) offsets[i] = s.densities[i] - offsets[i];
        return offsets;
    }

    /// Re-estimates densities (Summation mode) and then updates smoothing
    /// lengths from the current densities, once, without fixed-point iteration.
    void refresh(ParticleState<D>& s, const std::vector<double>& offsets = {}) const {
        if (forces_.density_mode == DensityMode::Summation) {
            s.densities = estimate_density(s, context(s));
            if (!offsets.empty())
                for (std::size_t i = 0; i < s.size(); ++i) s.densities[i] += offsets[i];
        }
        s.smoothing_lengths = update_smoothing_lengths(s, smoothing_);
    }

    /// Density rate in Continuity mode; the mass-flux correction alone in
    /// Summation mode (empty when there is none).
    std::vector<double> density_rate(const ParticleState<D>& s, const PairContext<D>& ctx) const {
        if (forces_.density_mode == DensityMode::Summation) {
            if (!forces_.mass_flux) return {};
            return mass_flux_correction(s, ctx, eos_, *forces_.mass_flux);
        }
        auto rate = continuity_density_rate(s, ctx);
        if (forces_.mass_flux) {
            const auto corr = mass_flux_correction(s, ctx, eos_, *forces_.mass_flux);
            for (std::size_t i = 0; i < rate.size(); ++i) rate[i] += corr[i];
        }
        return rate;
    }

    std::vector<double> density_rate(const ParticleState<D>& s) const {
        return density_rate(s, context(s));
    }

    Rates<D> rates(const ParticleState<D>& s) const {
        const auto ctx = context(s);
        Rates<D> r;
        r.acceleration = theta_acceleration(s, ctx, eos_, forces_.theta);
        if (forces_.viscosity) {
            const auto av = artificial_viscosity_acceleration(s, ctx, eos_, *forces_.viscosity);
            for (std::size_t i = 0; i < s.size(); ++i) r.acceleration[i] += av[i];
        }
        if (forces_.external_potential || forces_.friction || forces_.interaction_kernel) {
            const auto aux = auxiliary_forces(s, forces_);
            for (std::size_t i = 0; i < s.size(); ++i) r.acceleration[i] += aux[i];
        }
        r.density_rate = density_rate(s, ctx);
        return r;
    }

    /// Kinetic + internal + external potential energy; internal energy only
    /// for the polytropic law (NaN otherwise).
    double total_energy(const ParticleState<D>& s) const {
        double e = s.kinetic_energy();
        if (!eos_.is_polytropic()) return std::nan("");
        for (std::size_t i = 0; i < s.size(); ++i) e += s.masses[i] * eos_.internal_energy(s.densities[i]);
        if (forces_.external_potential && forces_.external_potential->value)
            for (std::size_t i = 0; i < s.size(); ++i)
                e += s.masses[i] * forces_.external_potential->value(s.positions[i]);
        return e;
    }

private:
    Kernel<D> kernel_;
    EosSpec eos_;
    ForceConfig<D> forces_;
    SmoothingMode smoothing_;
};

}  // namespace sphw
