#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sphw/forces.hpp"
#include "sphw/init.hpp"

using namespace sphw;

namespace {

// 1D Wendland C2 written out by hand: W = 5/(8h) (1 - q/2)^3 (1 + 3q/2).
double w1(double x, double h) {
    const double q = std::abs(x) / h;
    if (q >= 2.0) return 0.0;
    return 5.0 / (8.0 * h) * std::pow(1.0 - q / 2.0, 3) * (1.0 + 1.5 * q);
}

// dW/dx = -15/(8 h^2) q (1 - q/2)^2 sign(x).
double dw1(double x, double h) {
    const double q = std::abs(x) / h;
    if (q >= 2.0 || x == 0.0) return 0.0;
    return -15.0 / (8.0 * h * h) * q * std::pow(1.0 - q / 2.0, 2) * (x > 0.0 ? 1.0 : -1.0);
}

ParticleState<1> four_particles() {
    ParticleState<1> s(4);
    s.positions = {Vec<1>{0.0}, Vec<1>{0.21}, Vec<1>{0.37}, Vec<1>{0.66}};
    s.velocities = {Vec<1>{0.3}, Vec<1>{-0.2}, Vec<1>{0.05}, Vec<1>{-0.4}};
    s.masses = {0.1, 0.12, 0.09, 0.11};
    s.smoothing_lengths = {0.25, 0.3, 0.22, 0.27};
    s.densities = {0.9, 1.1, 1.05, 0.8};
    return s;
}

template <int D>
ParticleState<D> random_state(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(0.0, 1.0), vel(-1.0, 1.0), pos_m(0.5, 1.5), hh(0.15, 0.3);
    ParticleState<D> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < D; ++k) {
            s.positions[i][k] = pos(rng);
            s.velocities[i][k] = vel(rng);
        }
        s.masses[i] = pos_m(rng) / static_cast<double>(n);
        s.smoothing_lengths[i] = hh(rng);
        s.densities[i] = pos_m(rng);
    }
    return s;
}

template <int D>
double momentum_rate_ratio(const ParticleState<D>& s, const std::vector<Vec<D>>& a) {
    Vec<D> total = zero_vec<D>();
    double scale = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        total += s.masses[i] * a[i];
        scale += s.masses[i] * norm<D>(a[i]);
    }
    return norm<D>(total) / scale;
}

// PairContext keeps a reference to its kernel.
template <int D>
const Kernel<D> kWendland{KernelFamily::WendlandC2};

}  // namespace

TEST(Density, SingleParticleIsSelfTerm) {
    ParticleState<1> s(1);
    s.masses = {1.0};
    s.smoothing_lengths = {1.0};
    const Kernel<1> k(KernelFamily::WendlandC2);
    EXPECT_EQ(estimate_density(s, k)[0], k.peak(1.0));
}

TEST(Density, SeparatedParticlesSeeOnlyThemselves) {
    ParticleState<2> s(2);
    s.positions = {Vec<2>{0.0, 0.0}, Vec<2>{5.0, 0.0}};
    s.masses = {0.5, 2.0};
    s.smoothing_lengths = {1.0, 0.5};
    const Kernel<2> k;
    const auto rho = estimate_density(s, k);
    EXPECT_EQ(rho[0], 0.5 * k.peak(1.0));
    EXPECT_EQ(rho[1], 2.0 * k.peak(0.5));
}

TEST(Density, MatchesDirectDoubleLoop) {
    const auto s = random_state<2>(5, 21);
    for (auto f : {KernelFamily::WendlandC2, KernelFamily::CubicSpline, KernelFamily::TruncatedGaussian}) {
        const Kernel<2> k(f);
        const auto rho = estimate_density(s, k);
        for (std::size_t i = 0; i < 5; ++i) {
            double expect = 0.0;
            for (std::size_t j = 0; j < 5; ++j) {
                const Vec<2> z{s.positions[i][0] - s.positions[j][0], s.positions[i][1] - s.positions[j][1]};
                expect += s.masses[j] * k.value(z, s.smoothing_lengths[i]);
            }
            EXPECT_EQ(rho[i], expect);
        }
    }
}

TEST(Density, CellGridMatchesBruteForceBitwise) {
    auto s = lattice_disc(LatticeDisc{24, 1.0, 1.0, shear_field(1.0)});
    for (auto& h : s.smoothing_lengths) h = 0.1;
    const Kernel<2> k;
    for (auto p : {PairSmoothing::Gather, PairSmoothing::Mean}) {
        const auto brute = PairContext<2>::build(s, k, p, NeighborSearch::BruteForce);
        const auto grid = PairContext<2>::build(s, k, p, NeighborSearch::CellGrid);
        EXPECT_EQ(estimate_density(s, brute), estimate_density(s, grid));
        const EosSpec eos(Tait{100.0, 1.0, 7.0});
        EXPECT_EQ(theta_acceleration(s, brute, eos, 1), theta_acceleration(s, grid, eos, 1));
    }
}

TEST(ThetaAcceleration, SingleParticleFeelsNothing) {
    ParticleState<2> s(1);
    s.masses = {1.0};
    s.smoothing_lengths = {0.3};
    s.densities = {1.0};
    const auto a = theta_acceleration(s, Kernel<2>(), EosSpec(Polytropic{1.0, 2.0}), 1);
    EXPECT_EQ(a[0], (Vec<2>{0.0, 0.0}));
}

TEST(ThetaAcceleration, EqualMassPairIsAntisymmetric) {
    ParticleState<2> s(2);
    s.positions = {Vec<2>{0.1, 0.2}, Vec<2>{0.27, 0.13}};
    s.masses = {0.5, 0.5};
    s.smoothing_lengths = {0.2, 0.2};
    s.densities = {1.3, 0.7};
    const auto a = theta_acceleration(s, Kernel<2>(), EosSpec(Polytropic{1.0, 1.4}), 1);
    EXPECT_EQ(a[0][0], -a[1][0]);
    EXPECT_EQ(a[0][1], -a[1][1]);
    EXPECT_NE(a[0][0], 0.0);
}

TEST(ThetaAcceleration, MatchesTermByTermTranscription) {
    const auto s = four_particles();
    const EosSpec eos(Polytropic{1.2, 1.4});
    for (int theta : {0, 1}) {
        const auto a = theta_acceleration(s, Kernel<1>(KernelFamily::WendlandC2), eos, theta);
        for (std::size_t i = 0; i < 4; ++i) {
            const auto F = [&](double rho) {
                return theta == 1 ? 1.2 * std::pow(rho, 1.4) / (rho * rho) : 1.2 * 1.4 * std::pow(rho, 0.4) / rho;
            };
            double first = 0.0, second = 0.0;
            for (std::size_t j = 0; j < 4; ++j) {
                const double g = dw1(s.positions[i][0] - s.positions[j][0], s.smoothing_lengths[i]);
                first += g * s.masses[j];
                second += F(s.densities[j]) * g * s.masses[j];
            }
            const double expect = -F(s.densities[i]) * first - theta * second;
            EXPECT_NEAR(a[i][0], expect, 1e-12 * std::max(1.0, std::abs(expect))) << "theta " << theta << " i " << i;
        }
    }
}

TEST(ThetaAcceleration, RejectsBadInput) {
    auto s = four_particles();
    const EosSpec eos(Polytropic{1.0, 2.0});
    EXPECT_THROW(theta_acceleration(s, Kernel<1>(), eos, 2), ConfigError);
    s.densities[2] = 0.0;
    try {
        theta_acceleration(s, Kernel<1>(), eos, 1);
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("particle 2"), std::string::npos);
    }
}

TEST(ThetaAcceleration, MomentumConservedForSymmetricPairs) {
    auto s = random_state<2>(60, 31);
    const Kernel<2> k;
    const EosSpec eos(Polytropic{1.0, 1.4});
    const auto ctx = PairContext<2>::build(s, k, PairSmoothing::Mean);
    auto a = theta_acceleration(s, ctx, eos, 1);
    const auto av = artificial_viscosity_acceleration(s, ctx, eos, ViscosityParams{1.0, 2.0, {}});
    for (std::size_t i = 0; i < s.size(); ++i) a[i] += av[i];
    EXPECT_LE(momentum_rate_ratio(s, a), 1e-12);
}

TEST(ThetaAcceleration, ThetaZeroDoesNotConserveMomentum) {
    ParticleState<1> s(2);
    s.positions = {Vec<1>{0.0}, Vec<1>{0.1}};
    s.masses = {1.0, 1.0};
    s.smoothing_lengths = {0.2, 0.2};
    s.densities = {1.0, 2.0};
    const auto a = theta_acceleration(s, Kernel<1>(), EosSpec(Polytropic{1.0, 1.4}), 0);
    EXPECT_GT(std::abs(a[0][0] + a[1][0]), 1e-3);
}

TEST(ThetaAcceleration, TranslationInvariant) {
    // Dyadic coordinates keep the shifted differences exact.
    ParticleState<2> s(30);
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> grid(0, 1 << 10);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s.positions[i] = {std::ldexp(grid(rng), -10), std::ldexp(grid(rng), -10)};
        s.velocities[i] = {std::ldexp(grid(rng), -9) - 1.0, 0.0};
        s.masses[i] = 1.0 / 30.0;
        s.smoothing_lengths[i] = 0.25;
        s.densities[i] = 1.0 + std::ldexp(grid(rng), -12);
    }
    auto t = s;
    for (auto& x : t.positions) x += Vec<2>{4.0, -2.0};
    const SphSystem<2> sys(Kernel<2>(), EosSpec(Polytropic{1.0, 1.4}), ForceConfig<2>{}, FixedGlobal{0.25});
    auto a = s, b = t;
    sys.refresh(a);
    sys.refresh(b);
    EXPECT_EQ(a.densities, b.densities);
    EXPECT_EQ(sys.rates(a).acceleration, sys.rates(b).acceleration);
}

TEST(ThetaAcceleration, MirrorSymmetricConfiguration) {
    auto s = lattice_disc(LatticeDisc{16, 1.0, 1.0, shear_field(1.0)});
    for (auto& h : s.smoothing_lengths) h = 0.2;
    const SphSystem<2> sys(Kernel<2>(), EosSpec(Tait{10.0, 1.0, 7.0}), ForceConfig<2>{}, FixedGlobal{0.2});
    sys.refresh(s);
    const auto a = sys.rates(s).acceleration;
    // Sites come in point-mirrored pairs i <-> N-1-i.
    const std::size_t n = s.size();
    double scale = 0.0;
    for (const auto& ai : a) scale = std::max(scale, norm<2>(ai));
    for (std::size_t i = 0; i < n; ++i) {
        ASSERT_EQ(s.positions[i][0], -s.positions[n - 1 - i][0]);
        EXPECT_NEAR(a[i][0], -a[n - 1 - i][0], 1e-12 * scale);
        EXPECT_NEAR(a[i][1], -a[n - 1 - i][1], 1e-12 * scale);
    }
}

TEST(ThetaAcceleration, DeterministicAcrossThreadCounts) {
    auto s = lattice_disc(LatticeDisc{40, 1.0, 1.0, shear_field(5.0)});
    ForceConfig<2> f;
    f.viscosity = ViscosityParams{0.1, 0.0, {}};
    f.mass_flux = MassFluxParams{};
    f.density_mode = DensityMode::Continuity;
    const SphSystem<2> sys(Kernel<2>(), EosSpec(Tait{100.0, 1.0, 7.0}), f, ScaledByN{1.5});
    s.smoothing_lengths = update_smoothing_lengths(s, sys.smoothing());
    set_thread_count(1);
    const auto r1 = sys.rates(s);
    set_thread_count(4);
    const auto r4 = sys.rates(s);
    set_thread_count(1);
    EXPECT_EQ(r1.acceleration, r4.acceleration);
    EXPECT_EQ(r1.density_rate, r4.density_rate);
}

TEST(Viscosity, UniformVelocityGivesNothing) {
    auto s = random_state<2>(20, 51);
    for (auto& v : s.velocities) v = {0.3, -0.7};
    const auto ctx = PairContext<2>::build(s, kWendland<2>);
    for (const auto& a : artificial_viscosity_acceleration(s, ctx, EosSpec(Polytropic{1.0, 2.0}),
                                                           ViscosityParams{1.0, 2.0, {}}))
        EXPECT_EQ(a, (Vec<2>{0.0, 0.0}));
}

TEST(Viscosity, SeparatingPairGivesNothing) {
    ParticleState<1> s(2);
    s.positions = {Vec<1>{0.0}, Vec<1>{0.2}};
    s.velocities = {Vec<1>{-1.0}, Vec<1>{1.0}};
    s.masses = {1.0, 1.0};
    s.smoothing_lengths = {0.3, 0.3};
    s.densities = {1.0, 1.0};
    const auto ctx = PairContext<1>::build(s, kWendland<1>);
    const auto a = artificial_viscosity_acceleration(s, ctx, EosSpec(Polytropic{1.0, 2.0}), ViscosityParams{1.0, 2.0, {}});
    EXPECT_EQ(a[0][0], 0.0);
    EXPECT_EQ(a[1][0], 0.0);
}

TEST(Viscosity, ApproachingPairMatchesHandExpansion) {
    ParticleState<1> s(2);
    s.positions = {Vec<1>{0.0}, Vec<1>{0.5}};
    s.velocities = {Vec<1>{1.0}, Vec<1>{-1.0}};
    s.masses = {1.0, 1.0};
    s.smoothing_lengths = {0.4, 0.4};
    s.densities = {1.0, 1.0};
    const auto ctx = PairContext<1>::build(s, kWendland<1>);
    const auto a = artificial_viscosity_acceleration(s, ctx, EosSpec(Polytropic{1.0, 2.0}), ViscosityParams{0.5, 0.0, {}});
    // x12 = -0.5, v12 = 2, mu = 0.4 (-1) / (0.25 + 0.0016), c = sqrt(2).
    const double mu = -0.4 / 0.2516;
    const double pi12 = -0.5 * std::sqrt(2.0) * mu;
    const double expect = -pi12 * dw1(-0.5, 0.4);
    EXPECT_NEAR(a[0][0], expect, 1e-14);
    EXPECT_LT(a[0][0], 0.0);
    EXPECT_EQ(a[1][0], -a[0][0]);
}

TEST(Viscosity, CustomSoundSpeedIsUsed) {
    ParticleState<1> s(2);
    s.positions = {Vec<1>{0.0}, Vec<1>{0.5}};
    s.velocities = {Vec<1>{1.0}, Vec<1>{-1.0}};
    s.masses = {1.0, 1.0};
    s.smoothing_lengths = {0.4, 0.4};
    s.densities = {1.0, 1.0};
    const auto ctx = PairContext<1>::build(s, kWendland<1>);
    const EosSpec eos(Polytropic{1.0, 2.0});
    const auto a = artificial_viscosity_acceleration(s, ctx, eos, ViscosityParams{0.5, 0.0, {}});
    const auto b =
        artificial_viscosity_acceleration(s, ctx, eos, ViscosityParams{0.5, 0.0, [](double) { return 2.0 * std::sqrt(2.0); }});
    EXPECT_NEAR(b[0][0], 2.0 * a[0][0], 1e-14);
}

TEST(MassFlux, UniformDensityGivesNothing) {
    auto s = random_state<2>(20, 61);
    for (auto& r : s.densities) r = 1.2;
    const auto ctx = PairContext<2>::build(s, kWendland<2>);
    for (double r : mass_flux_correction(s, ctx, EosSpec(Polytropic{1.0, 2.0}), MassFluxParams{0.5, 1.0}))
        EXPECT_EQ(r, 0.0);
}

TEST(MassFlux, ReducesDensityJump) {
    ParticleState<1> s(2);
    s.positions = {Vec<1>{0.0}, Vec<1>{0.1}};
    s.masses = {1.0, 1.0};
    s.smoothing_lengths = {0.2, 0.2};
    s.densities = {2.0, 1.0};
    const auto ctx = PairContext<1>::build(s, kWendland<1>);
    const auto r = mass_flux_correction(s, ctx, EosSpec(Polytropic{1.0, 2.0}), MassFluxParams{});
    EXPECT_LT(r[0], 0.0);
    EXPECT_GT(r[1], 0.0);
}

TEST(MassFlux, MatchesIndependentExpansion) {
    ParticleState<1> s(3);
    s.positions = {Vec<1>{0.0}, Vec<1>{0.12}, Vec<1>{0.3}};
    s.velocities = {Vec<1>{0.2}, Vec<1>{-0.1}, Vec<1>{0.4}};
    s.masses = {0.1, 0.2, 0.15};
    s.smoothing_lengths = {0.2, 0.25, 0.3};
    s.densities = {1.0, 1.4, 0.8};
    const double alpha = 0.5, beta = 0.3;
    const auto ctx = PairContext<1>::build(s, kWendland<1>);
    const auto r = mass_flux_correction(s, ctx, EosSpec(Polytropic{1.0, 2.0}), MassFluxParams{alpha, beta});
    const auto c = [](double rho) { return std::sqrt(2.0 * rho); };
    for (std::size_t i = 0; i < 3; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            if (j == i) continue;
            const double x = s.positions[i][0] - s.positions[j][0];
            const double v = s.velocities[i][0] - s.velocities[j][0];
            const double hb = 0.5 * (s.smoothing_lengths[i] + s.smoothing_lengths[j]);
            const double rb = 0.5 * (s.densities[i] + s.densities[j]);
            const double sig = alpha * 0.5 * (c(s.densities[i]) + c(s.densities[j])) + beta * std::abs(v * x) / std::abs(x);
            acc += 2.0 * sig * hb * (s.densities[i] - s.densities[j]) * x * dw1(x, hb) / (x * x + 0.01 * hb * hb) *
                   s.masses[i] * s.masses[j] / (rb * rb);
        }
        const double expect = s.densities[i] / s.masses[i] * acc;
        EXPECT_NEAR(r[i], expect, 1e-12 * std::max(1.0, std::abs(expect))) << i;
    }
}

TEST(MassFlux, ConservesTotalMass) {
    auto s = random_state<2>(50, 71);
    const auto ctx = PairContext<2>::build(s, kWendland<2>);
    const auto r = mass_flux_correction(s, ctx, EosSpec(Polytropic{1.0, 2.0}), MassFluxParams{0.5, 0.5});
    double total = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        total += s.masses[i] * r[i] / s.densities[i];
        scale += std::abs(s.masses[i] * r[i] / s.densities[i]);
    }
    EXPECT_LE(std::abs(total), 1e-13 * scale);
}

TEST(Continuity, RigidTranslationGivesNothing) {
    auto s = random_state<2>(20, 81);
    for (auto& v : s.velocities) v = {1.0, 2.0};
    for (double r : continuity_density_rate(s, PairContext<2>::build(s, kWendland<2>))) EXPECT_EQ(r, 0.0);
}

TEST(Continuity, CompressionRaisesDensity) {
    ParticleState<1> s(2);
    s.positions = {Vec<1>{0.0}, Vec<1>{0.1}};
    s.velocities = {Vec<1>{1.0}, Vec<1>{-1.0}};
    s.masses = {1.0, 1.0};
    s.smoothing_lengths = {0.2, 0.2};
    s.densities = {1.0, 1.0};
    const auto r = continuity_density_rate(s, PairContext<1>::build(s, kWendland<1>));
    EXPECT_GT(r[0], 0.0);
    EXPECT_GT(r[1], 0.0);
}

TEST(Continuity, MatchesIndependentExpansion) {
    const auto s = four_particles();
    const auto r = continuity_density_rate(s, PairContext<1>::build(s, kWendland<1>));
    for (std::size_t i = 0; i < 4; ++i) {
        double expect = 0.0;
        for (std::size_t j = 0; j < 4; ++j)
            expect += s.masses[j] * (s.velocities[i][0] - s.velocities[j][0]) *
                      dw1(s.positions[i][0] - s.positions[j][0], s.smoothing_lengths[i]);
        EXPECT_NEAR(r[i], expect, 1e-12 * std::max(1.0, std::abs(expect)));
    }
}

TEST(Density, OneDimensionalValuesMatchHandKernel) {
    const auto s = four_particles();
    const auto rho = estimate_density(s, Kernel<1>());
    for (std::size_t i = 0; i < 4; ++i) {
        double expect = 0.0;
        for (std::size_t j = 0; j < 4; ++j)
            expect += s.masses[j] * w1(s.positions[i][0] - s.positions[j][0], s.smoothing_lengths[i]);
        EXPECT_NEAR(rho[i], expect, 1e-14);
    }
}

TEST(AuxiliaryForces, ConstantFriction) {
    auto s = random_state<2>(5, 91);
    ForceConfig<2> f;
    f.friction = [](const Vec<2>&) { return 0.7; };
    const auto a = auxiliary_forces(s, f);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(a[i], -0.7 * s.velocities[i]);
}

TEST(AuxiliaryForces, UniformGravity) {
    auto s = random_state<2>(5, 92);
    ForceConfig<2> f;
    f.external_potential = ExternalPotential<2>{[](const Vec<2>& x) { return 9.81 * x[1]; },
                                                [](const Vec<2>&) { return Vec<2>{0.0, 9.81}; }};
    for (const auto& a : auxiliary_forces(s, f)) EXPECT_EQ(a, (Vec<2>{0.0, -9.81}));
}

TEST(AuxiliaryForces, OddInteractionKernelIsReciprocal) {
    ParticleState<2> s(2);
    s.positions = {Vec<2>{0.0, 0.0}, Vec<2>{0.3, -0.4}};
    s.masses = {1.0, 1.0};
    ForceConfig<2> f;
    f.interaction_kernel = [](const Vec<2>& z) { return Vec<2>{-z[0] * z[0] * z[0], 2.0 * z[1]}; };
    const auto a = auxiliary_forces(s, f);
    EXPECT_EQ(a[0][0], -a[1][0]);
    EXPECT_EQ(a[0][1], -a[1][1]);
    EXPECT_NE(a[0][1], 0.0);
}

TEST(AuxiliaryForces, NoneConfiguredGivesZero) {
    const auto s = random_state<2>(4, 93);
    for (const auto& a : auxiliary_forces(s, ForceConfig<2>{})) EXPECT_EQ(a, (Vec<2>{0.0, 0.0}));
}

TEST(SmoothingLengths, ScaledByN) {
    ParticleState<2> s(7232);
    const auto h = update_smoothing_lengths(s, ScaledByN{1.5});
    EXPECT_NEAR(h.front(), 0.017638, 1e-6);
    EXPECT_EQ(h.front(), h.back());
}

TEST(SmoothingLengths, AdaptiveMassDensity) {
    ParticleState<1> s(1);
    s.masses = {0.01};
    s.densities = {1.0};
    EXPECT_DOUBLE_EQ(update_smoothing_lengths(s, AdaptiveMassDensity{1.2})[0], 0.012);
}

TEST(SmoothingLengths, FixedGlobal) {
    const auto s = random_state<2>(6, 94);
    for (double h : update_smoothing_lengths(s, FixedGlobal{0.37})) EXPECT_EQ(h, 0.37);
}

TEST(SmoothingLengths, Errors) {
    ParticleState<2> s(3);
    EXPECT_THROW(update_smoothing_lengths(s, AdaptiveMassDensity{1.2}), ConfigError);
    EXPECT_THROW(update_smoothing_lengths(s, FixedGlobal{0.0}), ConfigError);
    EXPECT_THROW(update_smoothing_lengths(s, ScaledByN{-1.0}), ConfigError);
    EXPECT_THROW(SphSystem<2>(Kernel<2>(), EosSpec(Polytropic{}), ForceConfig<2>{}, AdaptiveMassDensity{1.2}),
                 ConfigError);
}

TEST(ForceConfig, Validation) {
    ForceConfig<1> f;
    f.theta = 3;
    EXPECT_THROW(f.validate(), ConfigError);
    f.theta = 0;
    f.viscosity = ViscosityParams{-1.0, 0.0, {}};
    EXPECT_THROW(f.validate(), ConfigError);
    f.viscosity.reset();
    f.external_potential = ExternalPotential<1>{};
    EXPECT_THROW(f.validate(), ConfigError);
}

TEST(SphSystem, AnchoredSummationReproducesInitialDensities) {
    auto s = lattice_disc(LatticeDisc{12, 1.0, 1.0, {}});
    ForceConfig<2> f;
    f.summation_reference = SummationReference::InitialProfile;
    const SphSystem<2> sys(Kernel<2>(), EosSpec(Tait{}), f, ScaledByN{1.5});
    s.smoothing_lengths = update_smoothing_lengths(s, sys.smoothing());
    const auto offsets = sys.summation_offsets(s);
    ASSERT_EQ(offsets.size(), s.size());
    auto t = s;
    sys.refresh(t, offsets);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(t.densities[i], 1.0, 1e-14);

    ForceConfig<2> g;
    EXPECT_TRUE(SphSystem<2>(Kernel<2>(), EosSpec(Tait{}), g, ScaledByN{1.5}).summation_offsets(s).empty());
}

TEST(SphSystem, TotalEnergyOnlyForPolytropicLaw) {
    auto s = random_state<1>(5, 95);
    const SphSystem<1> poly(Kernel<1>(), EosSpec(Polytropic{1.0, 2.0}), ForceConfig<1>{}, FixedGlobal{0.2});
    const SphSystem<1> tait(Kernel<1>(), EosSpec(Tait{}), ForceConfig<1>{}, FixedGlobal{0.2});
    double expect = s.kinetic_energy();
    for (std::size_t i = 0; i < s.size(); ++i) expect += s.masses[i] * s.densities[i];
    EXPECT_NEAR(poly.total_energy(s), expect, 1e-14);
    EXPECT_TRUE(std::isnan(tait.total_energy(s)));
}
