#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "sphw/eos.hpp"
#include "sphw/errors.hpp"

namespace sphw {

struct RiemannState {
    double rho = 1.0;
    double u = 0.0;
};

enum class WaveKind { Rarefaction, Shock };

/**
 * Exact solution of the isentropic Euler Riemann problem with P = K rho^gamma.
 * The star density solves f_L(rho) + f_R(rho) + u_R - u_L = 0 with
 *
 *   f_K = 2/(gamma-1) (c(rho) - c_K)                          rho <= rho_K
 *   f_K = sqrt((P - P_K)(rho - rho_K) / (rho rho_K))           rho >  rho_K
 *
 * by safeguarded Newton iteration.
 */
class IsentropicRiemann {
public:
    IsentropicRiemann(Polytropic eos, RiemannState left, RiemannState right, double x0 = 0.5)
        : k_(eos.K), g_(eos.gamma), l_(left), r_(right), x0_(x0) {
        (void)EosSpec{eos};  // validates K and gamma
        if (!(left.rho > 0.0) || !(right.rho > 0.0)) throw DomainError("Riemann states need positive density");
        if (right.u - left.u >= 2.0 / (g_ - 1.0) * (sound(left.rho) + sound(right.rho)))
            throw DomainError("Riemann data generate vacuum");
        solve_star();
    }

    double star_density() const noexcept { return rho_star_; }
    double star_velocity() const noexcept { return u_star_; }
    WaveKind left_wave() const noexcept { return rho_star_ > l_.rho ? WaveKind::Shock : WaveKind::Rarefaction; }
    WaveKind right_wave() const noexcept { return rho_star_ > r_.rho ? WaveKind::Shock : WaveKind::Rarefaction; }

    /// Shock speed of the left (-1) or right (+1) wave when it is a shock.
    std::optional<double> shock_speed(int side) const {
        const RiemannState& s = side < 0 ? l_ : r_;
        if (!(rho_star_ > s.rho)) return std::nullopt;
        const double q = std::sqrt((pressure(rho_star_) - pressure(s.rho)) * rho_star_ * s.rho / (rho_star_ - s.rho));
        return side < 0 ? s.u - q / s.rho : s.u + q / s.rho;
    }

    /// Largest of the mass and momentum flux jumps across the left (-1) or
    /// right (+1) shock in its own frame; empty when that wave is a fan.
    std::optional<double> rankine_hugoniot_residual(int side) const {
        const auto speed = shock_speed(side);
        if (!speed) return std::nullopt;
        const RiemannState& s = side < 0 ? l_ : r_;
        const double S = *speed;
        const double mass = s.rho * (s.u - S) - rho_star_ * (u_star_ - S);
        const double mom = s.rho * s.u * (s.u - S) + pressure(s.rho) -
                           (rho_star_ * u_star_ * (u_star_ - S) + pressure(rho_star_));
        return std::max(std::abs(mass), std::abs(mom));
    }

    RiemannState sample(double x, double t) const {
        if (!(t >= 0.0)) throw DomainError("time must be non-negative");
        if (t == 0.0) return x < x0_ ? l_ : r_;
        const double xi = (x - x0_) / t;
        const double gm = g_ - 1.0, gp = g_ + 1.0;
        if (xi < u_star_) {
            if (left_wave() == WaveKind::Shock) return xi < *shock_speed(-1) ? l_ : star();
            const double cl = sound(l_.rho);
            if (xi <= l_.u - cl) return l_;
            if (xi >= u_star_ - sound(rho_star_)) return star();
            const double u = 2.0 / gp * (cl + 0.5 * gm * l_.u + xi);
            const double c = 2.0 / gp * (cl + 0.5 * gm * (l_.u - xi));
            return {density_from_sound(c), u};
        }
        if (right_wave() == WaveKind::Shock) return xi > *shock_speed(1) ? r_ : star();
        const double cr = sound(r_.rho);
        if (xi >= r_.u + cr) return r_;
        if (xi <= u_star_ + sound(rho_star_)) return star();
        const double u = 2.0 / gp * (-cr + 0.5 * gm * r_.u + xi);
        const double c = 2.0 / gp * (cr - 0.5 * gm * (r_.u - xi));
        return {density_from_sound(c), u};
    }

private:
    double pressure(double rho) const { return k_ * std::pow(rho, g_); }
    double sound(double rho) const { return std::sqrt(k_ * g_ * std::pow(rho, g_ - 1.0)); }
    double density_from_sound(double c) const { return std::pow(c * c / (k_ * g_), 1.0 / (g_ - 1.0)); }
    RiemannState star() const { return {rho_star_, u_star_}; }

    // Wave function f_K and its derivative.
    void wave(double rho, const RiemannState& s, double& f, double& df) const {
        if (rho <= s.rho) {
            f = 2.0 / (g_ - 1.0) * (sound(rho) - sound(s.rho));
            df = sound(rho) / rho;
            return;
        }
        const double dp = pressure(rho) - pressure(s.rho);
        const double dr = rho - s.rho;
        const double g = dp * dr / (rho * s.rho);
        f = std::sqrt(g);
        const double dg = (k_ * g_ * std::pow(rho, g_ - 1.0) * dr + dp) / (rho * s.rho) - g / rho;
        df = f > 0.0 ? 0.5 * dg / f : sound(s.rho) / s.rho;
    }

    double phi(double rho, double& dphi) const {
        double fl, dfl, fr, dfr;
        wave(rho, l_, fl, dfl);
        wave(rho, r_, fr, dfr);
        dphi = dfl + dfr;
        return fl + fr + r_.u - l_.u;
    }

    void solve_star() {
        double d;
        double lo = 0.0, hi = std::max(l_.rho, r_.rho);
        while (phi(hi, d) < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) throw NumericError("star density bracket failed");
        }
        double rho = 0.5 * (l_.rho + r_.rho);
        if (!(rho > lo && rho < hi)) rho = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double f = phi(rho, d);
            if (f < 0.0) lo = rho; else hi = rho;
            double next = rho - f / d;
            if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
            const bool done = std::abs(next - rho) <= 1e-12 * rho || f == 0.0;
            rho = next;
            if (done) break;
        }
        rho_star_ = rho;
        double fl, fr, dummy;
        wave(rho, l_, fl, dummy);
        wave(rho, r_, fr, dummy);
        u_star_ = 0.5 * (l_.u + r_.u) + 0.5 * (fr - fl);
    }

    double k_, g_;
    RiemannState l_, r_;
    double x0_;
    double rho_star_ = 0.0, u_star_ = 0.0;
};

/// Density and velocity of the isentropic Riemann problem at (x, t).
inline RiemannState riemann_reference(double x, double t, RiemannState left, RiemannState right,
                                      const Polytropic& eos, double x0 = 0.5) {
    return IsentropicRiemann(eos, left, right, x0).sample(x, t);
}

}  // namespace sphw
