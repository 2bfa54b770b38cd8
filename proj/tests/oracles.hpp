// Test-side oracles, independent of the library implementation paths they check.
#ifndef NLSE_TEST_ORACLES_HPP
#define NLSE_TEST_ORACLES_HPP

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#ifdef NLSE_HAVE_QUADMATH
#include <quadmath.h>
#endif

#include "nlse/types.hpp"

namespace oracles {

using nlse::cdouble;
using nlse::I;

#ifdef NLSE_HAVE_QUADMATH
// closed-form lossless profile evaluated in 128-bit precision
inline cdouble profile_quad(double delta, double d, double z) {
    __complex128 dl;
    __real__ dl = delta;
    __imag__ dl = 0.0Q;
    const __complex128 s = csqrtq(dl);
    __complex128 two_i;
    __real__ two_i = 0.0Q;
    __imag__ two_i = 2.0Q;
    const __float128 w = static_cast<__float128>(d) - static_cast<__float128>(z);
    const __complex128 one_plus = 1.0Q + dl;
    const __complex128 num = two_i * s * ccosq(w * s) + one_plus * csinq(w * s);
    const __complex128 den =
        two_i * s * ccosq(static_cast<__float128>(d) * s) +
        one_plus * csinq(static_cast<__float128>(d) * s);
    const __complex128 r = num / den;
    return {static_cast<double>(crealq(r)), static_cast<double>(cimagq(r))};
}
#endif

// fixed-step RK4 for a 2-component complex linear ODE; used as the
// independent shooting integrator for the two-point boundary value problems
template <typename Rhs>
std::array<cdouble, 2> rk4_integrate(Rhs rhs, std::array<cdouble, 2> v, double z0, double z1,
                                     int steps) {
    const double h = (z1 - z0) / steps;
    double z = z0;
    for (int i = 0; i < steps; ++i) {
        const auto k1 = rhs(v, z);
        auto add = [](const std::array<cdouble, 2>& a, const std::array<cdouble, 2>& b,
                      double f) {
            return std::array<cdouble, 2>{a[0] + f * b[0], a[1] + f * b[1]};
        };
        const auto k2 = rhs(add(v, k1, 0.5 * h), z + 0.5 * h);
        const auto k3 = rhs(add(v, k2, 0.5 * h), z + 0.5 * h);
        const auto k4 = rhs(add(v, k3, h), z + h);
        for (int c = 0; c < 2; ++c)
            v[c] += (h / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        z += h;
    }
    return v;
}

// shooting solution of the linear BVP dV/dz = i(A V+ + B V-), -dV-/dz = i(A V- + B V+)
// with V+(0) = 1, V-(L) = 0: integrate the basis solution backward from z = L.
inline std::pair<cdouble, cdouble> shoot_two_mode(cdouble a_diag, cdouble b_off, double length,
                                                  int steps = 20000) {
    auto rhs = [&](const std::array<cdouble, 2>& v, double) {
        return std::array<cdouble, 2>{I * (a_diag * v[0] + b_off * v[1]),
                                      -I * (a_diag * v[1] + b_off * v[0])};
    };
    // backward in z from (1, 0) at z = L
    auto back = [&](const std::array<cdouble, 2>& v, double z) {
        auto f = rhs(v, z);
        return std::array<cdouble, 2>{-f[0], -f[1]};
    };
    const auto v0 = rk4_integrate(back, {cdouble(1.0, 0.0), cdouble(0.0, 0.0)}, 0.0, length, steps);
    return {1.0 / v0[0], v0[1] / v0[0]}; // (T, R)
}

// permanent by explicit permutation sum (N <= 4); oracle for symmetrized products
inline cdouble permanent(const std::vector<std::vector<cdouble>>& m) {
    const std::size_t n = m.size();
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    cdouble total = 0.0;
    do {
        cdouble prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) prod *= m[i][p[i]];
        total += prod;
    } while (std::next_permutation(p.begin(), p.end()));
    return total;
}

// 3x3 determinant by explicit cofactor expansion; oracle for the hardcore form
inline cdouble det3(const std::vector<std::vector<cdouble>>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// small deterministic RNG for property-style tests
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    double uniform(double lo, double hi) {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        const double u = static_cast<double>(state_ >> 11) / 9007199254740992.0;
        return lo + (hi - lo) * u;
    }

private:
    std::uint64_t state_;
};

} // namespace oracles

#endif
