#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "sphw/errors.hpp"
#include "sphw/forces.hpp"
#include "sphw/init.hpp"
#include "sphw/integrator.hpp"

namespace sphw {

/// Elliptic water drop under an initial shear v = (-A x, A y).
struct DropletConfig {
    int sites_across = 32;
    double radius = 1.0;
    double rho0 = 1.0;
    double shear = 100.0;
    /// Tait stiffness B = rho0 c0^2 / gamma unless `tait_B` is set (> 0).
    double sound_speed = 1000.0;
    double tait_B = 0.0;
    double gamma = 7.0;
    KernelFamily kernel = KernelFamily::WendlandC2;
    int theta = 1;
    double eta = 1.5;  // h = eta N^{-1/2}
    double dt = 1e-6;
    double t_final = 0.01;
    int intervals = 10;
    /// Extra instant at which the axes are recorded (kept out of the series).
    double probe_time = 0.0076;
    double viscosity_alpha = 0.1;
    double viscosity_beta = 0.0;
    double mass_flux_alpha = 0.5;
    double mass_flux_beta = 0.0;
    DensityMode density_mode = DensityMode::Summation;
    PairSmoothing pair_smoothing = PairSmoothing::Gather;
    NeighborSearch neighbor_search = NeighborSearch::CellGrid;

    double stiffness() const { return tait_B > 0.0 ? tait_B : rho0 * sound_speed * sound_speed / gamma; }

    void validate() const {
        if (sites_across < 1) throw ConfigError("sites_across must be >= 1");
        if (!(radius > 0.0) || !(rho0 > 0.0)) throw ConfigError("radius and rho0 must be positive");
        if (!(sound_speed > 0.0) && !(tait_B > 0.0)) throw ConfigError("need sound_speed or tait_B");
        if (!(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
        if (!(eta > 0.0)) throw ConfigError("eta must be positive");
        if (intervals < 1) throw ConfigError("intervals must be >= 1");
        if (probe_time < 0.0 || probe_time > t_final) throw ConfigError("probe_time must lie in [0, t_final]");
        SimulationConfig{dt, t_final, {}}.validate();
    }
};

/// Semi-axes of the classical incompressible elliptic drop: a along x, b along y.
struct EllipseAxes {
    double a = 1.0;
    double b = 1.0;
};

/**
 * Reference semi-axes from the incompressible elliptic-drop system
 *
 *   da/dt = -A a,   db/dt = A b,   dA/dt = A^2 (a^2 - b^2) / (a^2 + b^2),
 *
 * with a = b = radius and A = shear at t = 0, integrated by adaptive
 * Dormand-Prince at tolerance 1e-10.
 */
inline EllipseAxes droplet_reference(double t, double shear = 100.0, double radius = 1.0) {
    if (!(t >= 0.0)) throw DomainError("time must be non-negative");
    using State = std::array<double, 3>;
    State y{radius, radius, shear};
    if (t == 0.0) return {radius, radius};
    namespace ode = boost::numeric::odeint;
    auto rhs = [](const State& s, State& dy, double) {
        const double a2 = s[0] * s[0], b2 = s[1] * s[1];
        dy[0] = -s[2] * s[0];
        dy[1] = s[2] * s[1];
        dy[2] = s[2] * s[2] * (a2 - b2) / (a2 + b2);
    };
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-10, 1e-10), rhs, y, 0.0, t,
                            std::min(1e-6, t));
    return {y[0], y[1]};
}

struct AxisSample {
    double time = 0.0;
    double semi_major = 0.0;  // max |y|
    double semi_minor = 0.0;  // max |x|
};

struct DropletResult {
    SnapshotSeries<2> series;  // the uniform sampling instants
    Snapshot<2> probe;         // state at probe_time
    std::vector<AxisSample> axes;  // all recorded instants in time order
};

inline AxisSample measure_axes(const ParticleState<2>& s, double t) {
    AxisSample a{t, 0.0, 0.0};
    for (const auto& x : s.positions) {
        a.semi_major = std::max(a.semi_major, std::abs(x[1]));
        a.semi_minor = std::max(a.semi_minor, std::abs(x[0]));
    }
    return a;
}

inline ParticleState<2> droplet_initial_state(const DropletConfig& c) {
    return lattice_disc(LatticeDisc{c.sites_across, c.radius, c.rho0, shear_field(c.shear)});
}

inline SphSystem<2> droplet_system(const DropletConfig& c) {
    ForceConfig<2> f;
    f.theta = c.theta;
    if (c.viscosity_alpha > 0.0 || c.viscosity_beta > 0.0)
        f.viscosity = ViscosityParams{c.viscosity_alpha, c.viscosity_beta, {}};
    if (c.mass_flux_alpha > 0.0 || c.mass_flux_beta > 0.0)
        f.mass_flux = MassFluxParams{c.mass_flux_alpha, c.mass_flux_beta};
    f.density_mode = c.density_mode;
    f.summation_reference = SummationReference::InitialProfile;
    f.pair_smoothing = c.pair_smoothing;
    f.neighbor_search = c.neighbor_search;
    return SphSystem<2>(Kernel<2>(c.kernel), EosSpec(Tait{c.stiffness(), c.rho0, c.gamma}), f, ScaledByN{c.eta});
}

/// Runs the drop to t_final. Summation density is anchored to the uniform
/// initial density, so both density modes start from rho = rho0.
inline DropletResult run_droplet(const DropletConfig& c) {
    c.validate();
    auto times = uniform_times(c.t_final, c.intervals);
    const bool probe_on_grid = std::any_of(times.begin(), times.end(), [&](double t) {
        return std::lround(t / c.dt) == std::lround(c.probe_time / c.dt);
    });
    std::vector<double> all = times;
    if (!probe_on_grid) {
        all.push_back(c.probe_time);
        std::sort(all.begin(), all.end());
    }

    const auto system = droplet_system(c);
    auto full = simulate(SimulationConfig{c.dt, c.t_final, all}, system, droplet_initial_state(c));

    DropletResult r;
    for (auto& snap : full.snapshots) {
        r.axes.push_back(measure_axes(snap.state, snap.time));
        if (std::lround(snap.time / c.dt) == std::lround(c.probe_time / c.dt)) r.probe = snap;
        const bool on_grid = std::any_of(times.begin(), times.end(), [&](double t) {
            return std::lround(t / c.dt) == std::lround(snap.time / c.dt);
        });
        if (on_grid) r.series.snapshots.push_back(std::move(snap));
    }
    return r;
}

}  // namespace sphw
