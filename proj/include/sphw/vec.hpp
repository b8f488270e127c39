#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace sphw {

/// Fixed-size spatial vector. Dimension is a template parameter throughout the
/// library; only D = 1 and D = 2 are instantiated.
template <int D>
using Vec = std::array<double, static_cast<std::size_t>(D)>;

template <int D>
constexpr Vec<D> zero_vec() {
    Vec<D> v{};
    v.fill(0.0);
    return v;
}

template <std::size_t N>
constexpr std::array<double, N> operator+(const std::array<double, N>& a, const std::array<double, N>& b) {
    std::array<double, N> r{};
    for (std::size_t k = 0; k < N; ++k) r[k] = a[k] + b[k];
    return r;
}

template <std::size_t N>
constexpr std::array<double, N> operator-(const std::array<double, N>& a, const std::array<double, N>& b) {
    std::array<double, N> r{};
    for (std::size_t k = 0; k < N; ++k) r[k] = a[k] - b[k];
    return r;
}

template <std::size_t N>
constexpr std::array<double, N> operator-(const std::array<double, N>& a) {
    std::array<double, N> r{};
    for (std::size_t k = 0; k < N; ++k) r[k] = -a[k];
    return r;
}

template <std::size_t N>
constexpr std::array<double, N> operator*(double s, const std::array<double, N>& a) {
    std::array<double, N> r{};
    for (std::size_t k = 0; k < N; ++k) r[k] = s * a[k];
    return r;
}

template <std::size_t N>
constexpr std::array<double, N>& operator+=(std::array<double, N>& a, const std::array<double, N>& b) {
    for (std::size_t k = 0; k < N; ++k) a[k] += b[k];
    return a;
}

template <std::size_t N>
constexpr std::array<double, N>& operator-=(std::array<double, N>& a, const std::array<double, N>& b) {
    for (std::size_t k = 0; k < N; ++k) a[k] -= b[k];
    return a;
}

template <std::size_t N>
constexpr double dot(const std::array<double, N>& a, const std::array<double, N>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k) s += a[k] * b[k];
    return s;
}

template <std::size_t N>
inline double norm(const std::array<double, N>& a) {
    if constexpr (N == 1) {
        return std::abs(a[0]);
    } else {
        return std::sqrt(dot(a, a));
    }
}

template <std::size_t N>
inline bool all_finite(const std::array<double, N>& a) {
    for (std::size_t k = 0; k < N; ++k)
        if (!std::isfinite(a[k])) return false;
    return true;
}

}  // namespace sphw
