#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "sphw/errors.hpp"
#include "sphw/vec.hpp"

namespace sphw {

enum class KernelFamily { WendlandC2, CubicSpline, TruncatedGaussian };

/// Kernel choice as read from a configuration; the dimension is checked
/// against the compile-time dimension when a Kernel<D> is built from it.
struct KernelSpec {
    KernelFamily family = KernelFamily::WendlandC2;
    int dimension = 2;
};

inline std::string_view kernel_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::WendlandC2: return "wendland-c2";
        case KernelFamily::CubicSpline: return "cubic-spline";
        case KernelFamily::TruncatedGaussian: return "gaussian";
    }
    return "unknown";
}

inline KernelFamily parse_kernel_family(std::string_view name) {
    if (name == "wendland-c2") return KernelFamily::WendlandC2;
    if (name == "cubic-spline") return KernelFamily::CubicSpline;
    if (name == "gaussian") return KernelFamily::TruncatedGaussian;
    throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

/// Support radius in units of h.
constexpr double support_factor(KernelFamily f) {
    return f == KernelFamily::TruncatedGaussian ? 3.0 : 2.0;
}

/**
 * Radially symmetric smoothing kernel W_h(z) = sigma_d / h^d * f(|z|/h) in
 * dimension D, normalized to unit integral over R^D.
 *
 *   Wendland C2 (support 2h)
 *     1D: f = (1 - q/2)^3 (1 + 3q/2),   sigma = 5/8
 *     2D: f = (1 - q/2)^4 (1 + 2q),     sigma = 7/(4 pi)
 *   Cubic B-spline M4 (support 2h)
 *     f = 1 - 3q^2/2 + 3q^3/4 (q < 1),  (2 - q)^3/4 (1 <= q < 2)
 *     sigma = 2/3 (1D), 10/(7 pi) (2D)
 *   Gaussian truncated at 3h, renormalized over the truncated support
 *     f = exp(-q^2),  sigma = 1/(sqrt(pi) erf 3) (1D), 1/(pi (1 - e^-9)) (2D)
 */
template <int D>
class Kernel {
    static_assert(D == 1 || D == 2, "kernels are provided for D = 1 and D = 2");

public:
    explicit Kernel(KernelFamily family = KernelFamily::WendlandC2)
        : family_(family), support_(support_factor(family)), sigma_(normalization(family)) {}

    explicit Kernel(const KernelSpec& spec) : Kernel(spec.family) {
        if (spec.dimension != D)
            throw ConfigError("kernel spec dimension " + std::to_string(spec.dimension) +
                              " does not match D = " + std::to_string(D));
    }

    KernelFamily family() const noexcept { return family_; }
    KernelSpec spec() const noexcept { return {family_, D}; }

    /// Support radius in units of h.
    double support() const noexcept { return support_; }
    double support_radius(double h) const noexcept { return support_ * h; }

    double value(const Vec<D>& z, double h) const {
        check_h(h);
        const double q = norm(z) / h;
        if (q >= support_) return 0.0;
        return sigma_ * shape(q) / hpow(h);
    }

    /// Gradient with respect to z; exactly antisymmetric since it is z scaled
    /// by a function of |z|.
    Vec<D> gradient(const Vec<D>& z, double h) const {
        check_h(h);
        const double q = norm(z) / h;
        if (q >= support_) return zero_vec<D>();
        const double s = sigma_ * shape_slope_over_q(q) / (hpow(h) * h * h);
        return s * z;
    }

    /// W evaluated at z = 0.
    double peak(double h) const { return value(zero_vec<D>(), h); }

private:
    static void check_h(double h) {
        if (!(h > 0.0)) throw DomainError("smoothing length must be positive");
    }

    static double hpow(double h) {
        if constexpr (D == 1) {
            return h;
        } else {
            return h * h;
        }
    }

    static double normalization(KernelFamily f) {
        constexpr double pi = std::numbers::pi;
        switch (f) {
            case KernelFamily::WendlandC2: return D == 1 ? 5.0 / 8.0 : 7.0 / (4.0 * pi);
            case KernelFamily::CubicSpline: return D == 1 ? 2.0 / 3.0 : 10.0 / (7.0 * pi);
            case KernelFamily::TruncatedGaussian:
                return D == 1 ? 1.0 / (std::sqrt(pi) * std::erf(3.0))
                              : 1.0 / (pi * (1.0 - std::exp(-9.0)));
        }
        return 0.0;
    }

    double shape(double q) const {
        switch (family_) {
            case KernelFamily::WendlandC2: {
                const double t = 1.0 - 0.5 * q;
                if constexpr (D == 1) {
                    return t * t * t * (1.0 + 1.5 * q);
                } else {
                    return t * t * t * t * (1.0 + 2.0 * q);
                }
            }
            case KernelFamily::CubicSpline: {
                if (q < 1.0) return 1.0 - 1.5 * q * q + 0.75 * q * q * q;
                const double t = 2.0 - q;
                return 0.25 * t * t * t;
            }
            case KernelFamily::TruncatedGaussian: return std::exp(-q * q);
        }
        return 0.0;
    }

    // f'(q) / q, finite at q = 0 for every family.
    double shape_slope_over_q(double q) const {
        switch (family_) {
            case KernelFamily::WendlandC2: {
                const double t = 1.0 - 0.5 * q;
                if constexpr (D == 1) {
                    return -3.0 * t * t;
                } else {
                    return -5.0 * t * t * t;
                }
            }
            case KernelFamily::CubicSpline: {
                if (q < 1.0) return -3.0 + 2.25 * q;
                const double t = 2.0 - q;
                return -0.75 * t * t / q;
            }
            case KernelFamily::TruncatedGaussian: return -2.0 * std::exp(-q * q);
        }
        return 0.0;
    }

    KernelFamily family_;
    double support_;
    double sigma_;
};

template <int D>
double kernel_value(const Vec<D>& z, double h, const Kernel<D>& kernel) {
    return kernel.value(z, h);
}

template <int D>
Vec<D> kernel_gradient(const Vec<D>& z, double h, const Kernel<D>& kernel) {
    return kernel.gradient(z, h);
}

}  // namespace sphw
