#pragma once

#include <cmath>
#include <variant>

#include "sphw/errors.hpp"

namespace sphw {

/// P = K rho^gamma with gamma > 1.
struct Polytropic {
    double K = 1.0;
    double gamma = 2.0;
};

/// P = B ((rho / rho0)^gamma - 1); negative below the reference density.
struct Tait {
    double B = 1.0;
    double rho0 = 1.0;
    double gamma = 7.0;
};

/// Barotropic equation of state P(rho).
class EosSpec {
public:
    EosSpec(Polytropic p) : model_(p) {
        if (!(p.K > 0.0)) throw ConfigError("polytropic K must be positive");
        if (!(p.gamma > 1.0)) throw ConfigError("polytropic exponent must exceed 1");
    }

    EosSpec(Tait t) : model_(t) {
        if (!(t.B > 0.0)) throw ConfigError("Tait B must be positive");
        if (!(t.rho0 > 0.0)) throw ConfigError("Tait reference density must be positive");
        if (!(t.gamma >= 1.0)) throw ConfigError("Tait exponent must be at least 1");
    }

    bool is_polytropic() const noexcept { return std::holds_alternative<Polytropic>(model_); }
    const Polytropic* polytropic() const noexcept { return std::get_if<Polytropic>(&model_); }
    const Tait* tait() const noexcept { return std::get_if<Tait>(&model_); }

    double pressure(double rho) const {
        check(rho);
        if (const auto* p = polytropic()) return p->K * std::pow(rho, p->gamma);
        const auto& t = std::get<Tait>(model_);
        return t.B * (std::pow(rho / t.rho0, t.gamma) - 1.0);
    }

    double dpressure_ddensity(double rho) const {
        check(rho);
        if (const auto* p = polytropic()) return p->K * p->gamma * std::pow(rho, p->gamma - 1.0);
        const auto& t = std::get<Tait>(model_);
        return t.B * t.gamma / t.rho0 * std::pow(rho / t.rho0, t.gamma - 1.0);
    }

    double sound_speed(double rho) const { return std::sqrt(dpressure_ddensity(rho)); }

    /// Specific internal energy e with de/drho = P / rho^2 and e(0+) = 0.
    /// Only defined for the polytropic law.
    double internal_energy(double rho) const {
        check(rho);
        const auto* p = polytropic();
        if (!p) throw ConfigError("internal energy is only defined for the polytropic law");
        return p->K * std::pow(rho, p->gamma - 1.0) / (p->gamma - 1.0);
    }

private:
    static void check(double rho) {
        if (!(rho > 0.0)) throw DomainError("density must be positive");
    }

    std::variant<Polytropic, Tait> model_;
};

inline double eos_pressure(double rho, const EosSpec& eos) { return eos.pressure(rho); }

inline double eos_dpressure_ddensity(double rho, const EosSpec& eos) {
    return eos.dpressure_ddensity(rho);
}

inline double internal_energy(double rho, const EosSpec& eos) { return eos.internal_energy(rho); }

}  // namespace sphw
