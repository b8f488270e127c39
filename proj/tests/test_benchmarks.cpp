#include <gtest/gtest.h>

#include <cmath>

#include "sphw/droplet.hpp"
#include "sphw/shocktube.hpp"

using namespace sphw;

TEST(DropletReference, StartsCircular) {
    const auto e = droplet_reference(0.0);
    EXPECT_EQ(e.a, 1.0);
    EXPECT_EQ(e.b, 1.0);
}

TEST(DropletReference, AreaConserved) {
    for (double t : {0.001, 0.003, 0.0076, 0.01}) {
        const auto e = droplet_reference(t);
        EXPECT_NEAR(e.a * e.b, 1.0, 1e-8) << t;
    }
}

TEST(DropletReference, SemiMajorAxisAtProbeTime) {
    EXPECT_NEAR(droplet_reference(0.0076).b, 1.95, 0.01);
    EXPECT_THROW(droplet_reference(-1.0), DomainError);
}

TEST(DropletReference, ShortTimeMatchesInitialShear) {
    // b ~ exp(A t) while the shear rate is still close to A.
    const auto e = droplet_reference(1e-5);
    EXPECT_NEAR(e.b, std::exp(100.0 * 1e-5), 1e-8);
}

TEST(Droplet, DefaultsFollowExperiment) {
    const DropletConfig c;
    EXPECT_EQ(c.gamma, 7.0);
    EXPECT_EQ(c.kernel, KernelFamily::WendlandC2);
    EXPECT_EQ(c.eta, 1.5);
    EXPECT_EQ(c.dt, 1e-6);
    EXPECT_EQ(c.t_final, 0.01);
    EXPECT_EQ(c.mass_flux_alpha, 0.5);
    EXPECT_EQ(c.mass_flux_beta, 0.0);
    EXPECT_DOUBLE_EQ(c.stiffness(), 1e6 / 7.0);
}

TEST(Droplet, ConfigValidation) {
    DropletConfig c;
    c.probe_time = 0.02;
    EXPECT_THROW(c.validate(), ConfigError);
    c = DropletConfig{};
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = DropletConfig{};
    c.gamma = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Droplet, ShortRunRecordsSeriesProbeAndAxes) {
    DropletConfig c;
    c.sites_across = 12;
    c.dt = 1e-5;
    c.t_final = 0.002;
    c.probe_time = 0.00152;
    const auto r = run_droplet(c);
    ASSERT_EQ(r.series.size(), 11u);
    EXPECT_EQ(r.series.snapshots.front().state.size(), 112u);
    EXPECT_DOUBLE_EQ(r.probe.time, 0.00152);
    ASSERT_EQ(r.axes.size(), 12u);
    EXPECT_LE(r.axes.front().semi_major, 1.0);
    for (std::size_t k = 1; k < r.axes.size(); ++k) {
        EXPECT_GT(r.axes[k].time, r.axes[k - 1].time);
        EXPECT_GE(r.axes[k].semi_major, r.axes[k - 1].semi_major);
        EXPECT_LE(r.axes[k].semi_minor, r.axes[k - 1].semi_minor);
    }
    for (const auto& s : r.series.snapshots) EXPECT_EQ(s.total_mass, r.series.snapshots[0].total_mass);
}

TEST(Droplet, AxisHistoryMonotoneForResolvedLattice) {
    DropletConfig c;
    c.sites_across = 16;
    c.t_final = 0.0076;
    c.probe_time = 0.0076;
    c.dt = 4e-6;
    c.intervals = 4;
    const auto r = run_droplet(c);
    EXPECT_EQ(r.series.snapshots.front().state.size(), 208u);
    for (std::size_t k = 1; k < r.axes.size(); ++k) {
        EXPECT_GT(r.axes[k].semi_major, r.axes[k - 1].semi_major);
        EXPECT_LT(r.axes[k].semi_minor, r.axes[k - 1].semi_minor);
    }
    EXPECT_NEAR(r.axes.back().semi_major, droplet_reference(0.0076).b, 0.15);
}

TEST(Droplet, MeasureAxes) {
    ParticleState<2> s(2);
    s.positions = {Vec<2>{0.5, -1.5}, Vec<2>{-0.7, 0.2}};
    const auto a = measure_axes(s, 0.1);
    EXPECT_EQ(a.semi_major, 1.5);
    EXPECT_EQ(a.semi_minor, 0.7);
}

TEST(ShockTube, InitialProfileIsPiecewiseConstant) {
    ShockTubeConfig c;
    c.count = 90;
    const auto s = shocktube_initial_state(c);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s.densities[i], s.positions[i][0] < 0.5 ? 1.0 : 0.125);
}

TEST(ShockTube, DefaultsAndTimeStep) {
    const ShockTubeConfig c;
    EXPECT_DOUBLE_EQ(c.polytropic_K(), 1.0 / 1.4);
    EXPECT_EQ(c.theta, 1);
    EXPECT_EQ(c.eta, 1.2);
    EXPECT_EQ(c.t_final, 0.2);
    const double dt = c.time_step();
    const double steps = 0.02 / dt;
    EXPECT_NEAR(steps, std::round(steps), 1e-9);
    EXPECT_LE(dt, 0.1 * 1.2 * 0.5625 / 450.0 + 1e-15);
    ShockTubeConfig d;
    d.dt = 1e-4;
    EXPECT_EQ(d.time_step(), 1e-4);
}

TEST(ShockTube, ConfigValidation) {
    ShockTubeConfig c;
    c.count = 1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = ShockTubeConfig{};
    c.x_jump = 2.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = ShockTubeConfig{};
    c.gamma = 0.9;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ShockTube, ProfileBoundedAndCloseToReference) {
    ShockTubeConfig c;
    c.count = 450;
    const auto series = run_shocktube(c);
    ASSERT_EQ(series.size(), 11u);
    const auto ref = shocktube_reference(c);
    for (const auto& snap : series.snapshots) {
        EXPECT_EQ(snap.total_mass, series.snapshots[0].total_mass);
        for (std::size_t i = 0; i < snap.state.size(); ++i) {
            const double x = snap.state.positions[i][0];
            if (x < 0.25 || x > 0.82) continue;
            EXPECT_GE(snap.state.densities[i], 0.125 * 0.95) << "t=" << snap.time << " x=" << x;
            EXPECT_LE(snap.state.densities[i], 1.0 * 1.15) << "t=" << snap.time << " x=" << x;
        }
    }
    const auto& last = series.snapshots.back();
    EXPECT_LT(l1_density_error(last.state, ref, last.time, 0.25, 0.82), 0.01);

    // Star plateau between fan tail and shock.
    double star = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < last.state.size(); ++i) {
        const double x = last.state.positions[i][0];
        if (x > 0.62 && x < 0.72) {
            star += last.state.densities[i];
            ++n;
        }
    }
    ASSERT_GT(n, 0);
    star /= n;
    EXPECT_NEAR(star, ref.star_density(), 0.02);
    EXPECT_GT(1.0, star);
    EXPECT_GT(star, 0.125);
}

TEST(ShockTube, BitwiseDeterministic) {
    ShockTubeConfig c;
    c.count = 90;
    const auto a = run_shocktube(c);
    const auto b = run_shocktube(c);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.snapshots[k].state, b.snapshots[k].state);
}
