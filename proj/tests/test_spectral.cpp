#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlse/spectral.hpp"
#include "oracles.hpp"

using namespace nlse;
using namespace nlse::spectral;

namespace {
constexpr double kPi = std::numbers::pi;

// triangle-form evaluation for cusp/decay probing (z1 <= z2)
cdouble phi_triangle(const EigenSolution& sol, double z1, double z2) {
    const cdouble k1 = sol.ks[0], k2 = sol.ks[1];
    const cdouble t = (k1 - k2 + I * sol.kappa) / (k1 - k2 - I * sol.kappa);
    const cdouble ca = 4.0 / (k1 - 1.0) * std::exp(I * k2 * sol.d) / (k2 + 1.0);
    const cdouble cb = 4.0 / (t * (k2 - 1.0)) * std::exp(I * k1 * sol.d) / (k1 + 1.0);
    return ca * eta(k1, z1) * eta(k2, sol.d - z2) + cb * eta(k2, z1) * eta(k1, sol.d - z2);
}
} // namespace

TEST_SUITE_BEGIN("spectral");

TEST_CASE("lowest open-boundary mode at d = 100") {
    const cdouble k = single_mode_root(100.0, 1);
    CHECK(std::abs(k.real() - 0.0314) < 1e-4);
    CHECK(std::abs(k.imag() - (-0.00063)) < 1e-4);
    // frozen high-precision value
    CHECK(k.real() == doctest::Approx(0.03140334867).epsilon(1e-8));
    CHECK(k.imag() == doctest::Approx(-0.0006282733075).epsilon(1e-8));
}

TEST_CASE("single modes approach n pi / d for large d") {
    for (const int n : {1, 2, 3}) {
        const cdouble k = single_mode_root(4000.0, n);
        CHECK(k.real() * 4000.0 / kPi == doctest::Approx(n).epsilon(1e-5));
        CHECK(std::abs(k.imag()) < 1e-5);
    }
}

TEST_CASE("every returned single mode satisfies its characteristic equation") {
    for (const double d : {12.0, 30.0, 100.0}) {
        const auto modes = single_particle_modes(d, 6);
        CHECK(modes.size() == 6);
        for (const auto& sol : modes) {
            CHECK(single_equation_residual(sol.ks[0], d) < 1e-9);
            CHECK(sol.energy.imag() <= 1e-14);
        }
        for (std::size_t i = 1; i < modes.size(); ++i)
            CHECK(modes[i].ks[0].real() > modes[i - 1].ks[0].real());
    }
}

TEST_CASE("two-particle roots: kappa = 0 decouples into two single modes") {
    const double d = 30.0;
    const cdouble s1 = single_mode_root(d, 1), s2 = single_mode_root(d, 2);
    const auto sol = two_particle_roots(d, 0.0, {s1 * 1.001, s2 * 0.999});
    CHECK(std::abs(sol.ks[0] - s1) < 1e-12);
    CHECK(std::abs(sol.ks[1] - s2) < 1e-12);
}

TEST_CASE("two-particle roots: strong interaction recovers free wavevectors") {
    const double d = 30.0;
    const cdouble s1 = single_mode_root(d, 1), s2 = single_mode_root(d, 2);
    for (const double kd : {1e4, -1e4}) {
        const auto sol = two_particle_roots(d, kd / d, {s1, s2});
        CHECK(sol.residual < 1e-9);
        CHECK(std::abs(sol.ks[0] - s1) < 1e-4);
        CHECK(std::abs(sol.ks[1] - s2) < 1e-4);
    }
}

TEST_CASE("trivial seeds and trivial convergence are rejected") {
    const double d = 20.0;
    const cdouble s1 = single_mode_root(d, 1);
    CHECK_THROWS_AS(two_particle_roots(d, 0.1, {s1, s1}), ConfigError);
    CHECK_THROWS_AS(two_particle_roots(d, 0.1, {s1, -s1}), ConfigError);
    CHECK_THROWS_AS(two_particle_roots(d, 0.1, {cdouble(0.0, 0.0), s1}), ConfigError);
}

TEST_CASE("sign family: (+-k1, +-k2) all solve with equal energy") {
    const double d = 25.0;
    const auto sol = fermionized_root(d, 0.3, 1, 2);
    REQUIRE(sol.residual < 1e-9);
    for (const double s1 : {1.0, -1.0}) {
        for (const double s2 : {1.0, -1.0}) {
            const std::vector<cdouble> flipped = {s1 * sol.ks[0], s2 * sol.ks[1]};
            CHECK(system_residual(flipped, d, sol.kappa) < 1e-9);
            CHECK(std::abs((flipped[0] * flipped[0] + flipped[1] * flipped[1]) - sol.energy) <
                  1e-12);
        }
    }
}

TEST_CASE("attractive pair at d = 60, n = 3 sits near n pi/d +- i kappa/2") {
    const double d = 60.0, kappa = -12.0 / d;
    const auto sol = bound_root(d, kappa, 3, BoundType::I);
    REQUIRE(sol.residual < 1e-9);
    // frozen independently computed values
    cdouble k_plus = sol.ks[0].imag() > 0 ? sol.ks[0] : sol.ks[1];
    cdouble k_minus = sol.ks[0].imag() > 0 ? sol.ks[1] : sol.ks[0];
    CHECK(k_plus.real() == doctest::Approx(0.1469544637).epsilon(1e-6));
    CHECK(k_plus.imag() == doctest::Approx(0.09484588773).epsilon(1e-6));
    CHECK(k_minus.real() == doctest::Approx(0.1469534909).epsilon(1e-6));
    CHECK(k_minus.imag() == doctest::Approx(-0.1051563672).epsilon(1e-6));
    // the asymptotic form holds to ~10%
    CHECK(std::abs(k_plus.real() - 3.0 * kPi / d) < 0.1 * (3.0 * kPi / d));
    CHECK(std::abs(k_plus.imag() - std::abs(kappa) / 2.0) < 0.06 * std::abs(kappa));
}

TEST_CASE("bound energy estimates: kappa -> 0 keeps only center-of-mass energy") {
    CHECK(bound_state_energy_estimate(30.0, 1e-9, 2, BoundType::I) ==
          doctest::Approx(2.0 * sqr(2.0 * kPi / 30.0)));
    CHECK(bound_state_energy_estimate(30.0, 1e-9, 2, BoundType::II) ==
          doctest::Approx(sqr(2.0 * kPi / 30.0)));
}

TEST_CASE("bound branch energies approach the estimates as |kappa| d grows") {
    const double d = 30.0;
    for (const auto type : {BoundType::I, BoundType::II}) {
        const double kd = 16.0;
        const auto sol = bound_root(d, -kd / d, 1, type);
        const double est = bound_state_energy_estimate(d, kd / d, 1, type);
        CHECK(std::abs(sol.energy.real() - est) < 0.05 * std::abs(est));
        CHECK(sol.energy.imag() <= 0.0);
    }
}

TEST_CASE("resonance condition: E_n^b = 2 delta inverted for kappa") {
    // the kappa at which the type-II n=2 bound state crosses twice the drive
    // energy 2 delta0; the estimate inverts to kappa^2 = 2((n pi/d)^2 - 2 delta0)
    const double d = 30.0, delta0 = sqr(kPi / d);
    const double kappa2 = 2.0 * (sqr(2.0 * kPi / d) - 2.0 * delta0);
    const double kappa = std::sqrt(kappa2);
    CHECK(bound_state_energy_estimate(d, kappa, 2, BoundType::II) ==
          doctest::Approx(2.0 * delta0));
    CHECK(kappa * d == doctest::Approx(6.2832).epsilon(1e-3)); // |kappa| d near 6
}

TEST_CASE("continuation: constant path returns the same root") {
    const auto start = fermionized_root(25.0, 0.2, 1, 2);
    const std::vector<cdouble> path = {0.2, 0.2, 0.2};
    const auto out = root_continuation(25.0, path, start);
    REQUIRE(out.size() == 3);
    for (const auto& sol : out) {
        CHECK(std::abs(sol.ks[0] - start.ks[0]) < 1e-10);
        CHECK(std::abs(sol.ks[1] - start.ks[1]) < 1e-10);
    }
}

TEST_CASE("fermionized (1,2) energy rises toward the non-interacting value") {
    const double d = 30.0;
    const cdouble s1 = single_mode_root(d, 1), s2 = single_mode_root(d, 2);
    const double e_open = (s1 * s1 + s2 * s2).real();
    const auto start = fermionized_root(d, 10.0 / d, 1, 2);
    std::vector<cdouble> path;
    for (int i = 1; i <= 30; ++i) path.push_back((10.0 + 90.0 * i / 30.0) / d);  // -> 100
    for (int i = 1; i <= 25; ++i) path.push_back((100.0 + 200.0 * i / 25.0) / d); // -> 300
    const auto out = root_continuation(d, path, start);
    for (std::size_t i = 1; i < out.size(); ++i) {
        CHECK(out[i].energy.real() > out[i - 1].energy.real());
        CHECK(out[i].energy.imag() <= 1e-12);
    }
    // within 5% of the free two-mode energy once kappa d >= 100
    const double e100 = out[29].energy.real();
    const double e300 = out.back().energy.real();
    CHECK(std::abs(e100 - e_open) < 0.05 * e_open);
    CHECK(std::abs(e300 - e_open) < 0.03 * e_open);
    // and the closed-box value (m pi/d)^2 + (n pi/d)^2 is the d >> 1 limit of that
    const double e_box = sqr(kPi / d) + sqr(2.0 * kPi / d);
    CHECK(std::abs(e_open - e_box) < 0.02 * e_box);
}

TEST_CASE("type-II bound branch energy falls like -kappa^2/2 along continuation") {
    const double d = 30.0;
    const auto start = bound_root(d, -8.0 / d, 1, BoundType::II);
    std::vector<cdouble> path;
    for (double kd = 9.0; kd <= 16.0; kd += 1.0) path.push_back(-kd / d);
    const auto out = root_continuation(d, path, start);
    double prev = start.energy.real();
    for (const auto& sol : out) {
        CHECK(sol.energy.real() < prev);
        prev = sol.energy.real();
    }
    // slope consistent with the binding term
    const double de = out.back().energy.real() - start.energy.real();
    const double de_est = -(sqr(16.0 / d) - sqr(8.0 / d)) / 2.0;
    CHECK(de == doctest::Approx(de_est).epsilon(0.15));
}

TEST_CASE("continuation refuses to jump branches silently") {
    const auto start = bound_root(30.0, -0.3, 1, BoundType::II);
    const std::vector<cdouble> path = {-0.299, -0.298, -0.005};
    CHECK_THROWS_AS(root_continuation(30.0, path, start), NumericalError);
}

TEST_CASE("wavefunction boundary residuals are second order small") {
    const auto sol = fermionized_root(30.0, 0.4, 1, 2);
    const int n = 301;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = 30.0 * i / (n - 1);
    const auto wf = two_particle_wavefunction(sol, grid);
    const double h = grid[1] - grid[0];
    const double peak = wf.max_abs();
    for (int j = 2; j + 2 < n; j += 7) {
        // one-sided second-order derivative in the first argument at z1 = 0
        const cdouble d1 =
            (-3.0 * wf.at(0, j) + 4.0 * wf.at(1, j) - wf.at(2, j)) / (2.0 * h);
        CHECK(std::abs(wf.at(0, j) - I * d1) <= 10.0 * h * h * peak);
        // and at z2 = d for the second argument
        const cdouble d2 =
            (3.0 * wf.at(j, n - 1) - 4.0 * wf.at(j, n - 2) + wf.at(j, n - 3)) / (2.0 * h);
        CHECK(std::abs(wf.at(j, n - 1) + I * d2) <= 10.0 * h * h * peak);
    }
}

TEST_CASE("cusp condition at coinciding coordinates") {
    for (const auto& sol :
         {fermionized_root(20.0, 0.5, 1, 2), bound_root(20.0, -0.5, 1, BoundType::II)}) {
        const double z0 = 0.37 * sol.d;
        auto rel = [&](double s) { return phi_triangle(sol, z0 - 0.5 * s, z0 + 0.5 * s); };
        // phi(z0-s/2, z0+s/2): d phi/ds at s->0+ equals (kappa/2) phi(s=0)
        const double h1 = 1e-3, h2 = 5e-4;
        const cdouble slope1 = (rel(2.0 * h1) - rel(1e-12)) / (2.0 * h1 - 1e-12);
        const cdouble slope2 = (rel(2.0 * h2) - rel(1e-12)) / (2.0 * h2 - 1e-12);
        const cdouble slope = 2.0 * slope2 - slope1; // Richardson
        const cdouble expect = 0.5 * sol.kappa * rel(1e-12);
        CHECK(std::abs(slope - expect) < 5e-3 * std::abs(expect) + 1e-10);
    }
}

TEST_CASE("fermionized diagonal is strongly depleted at very large kappa d") {
    const double d = 30.0;
    const auto sol = fermionized_root(d, 2000.0 / d, 1, 2);
    const int n = 141;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = d * i / (n - 1);
    const auto wf = two_particle_wavefunction(sol, grid);
    double diag = 0.0;
    for (int i = 0; i < n; ++i) diag = std::max(diag, std::abs(wf.at(i, i)));
    CHECK(diag < 1e-2); // peak is normalized to 1
}

TEST_CASE("bound wavefunction decays like exp(-|kappa| |z1-z2| / 2)") {
    const double d = 30.0, kappa = -12.0 / d;
    const auto sol = bound_root(d, kappa, 1, BoundType::II);
    const double z0 = 0.5 * d;
    const double s1 = 1.0, s2 = 3.0;
    const double a1 = std::abs(phi_triangle(sol, z0 - 0.5 * s1, z0 + 0.5 * s1));
    const double a2 = std::abs(phi_triangle(sol, z0 - 0.5 * s2, z0 + 0.5 * s2));
    const double slope = std::log(a2 / a1) / (s2 - s1);
    CHECK(slope == doctest::Approx(-std::abs(kappa) / 2.0).epsilon(0.15));
}

TEST_CASE("d = 60 bound state with center-of-mass quantum number 3 has three "
          "peaks along the diagonal") {
    const double d = 60.0;
    const auto ladder = bound_roots_scan(d, -12.0 / d, 4.2 * kPi / d);
    const EigenSolution* sol = nullptr;
    for (const auto& s : ladder) {
        const double p = (s.ks[0] + s.ks[1]).real() * d / kPi;
        if (p > 2.6 && p < 3.8) sol = &s;
    }
    REQUIRE(sol != nullptr);
    const int n = 241;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = d * i / (n - 1);
    const auto wf = two_particle_wavefunction(*sol, grid);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = std::abs(wf.at(i, i));
    const double top = *std::max_element(diag.begin(), diag.end());
    int peaks = 0;
    for (int i = 1; i + 1 < n; ++i)
        if (diag[i] > diag[i - 1] && diag[i] > diag[i + 1] && diag[i] > 0.3 * top) ++peaks;
    CHECK(peaks == 3);
}

TEST_CASE("bound diagonal fraction grows monotonically with |kappa|") {
    const double d = 30.0;
    const auto start = bound_root(d, -6.0 / d, 1, BoundType::II);
    std::vector<cdouble> path;
    for (double kd = 8.0; kd <= 16.0; kd += 2.0) path.push_back(-kd / d);
    const auto sols = root_continuation(d, path, start);
    const int n = 101;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = d * i / (n - 1);
    double prev = two_particle_wavefunction(start, grid).diagonal_fraction();
    for (const auto& sol : sols) {
        const double frac = two_particle_wavefunction(sol, grid).diagonal_fraction();
        CHECK(frac > prev);
        prev = frac;
    }
}

TEST_CASE("hardcore wavefunction vanishes at coinciding coordinates") {
    const double d = 30.0;
    std::vector<cdouble> ks = {single_mode_root(d, 1), single_mode_root(d, 2),
                               single_mode_root(d, 3)};
    const cdouble v = hardcore_wavefunction(ks, {5.0, 5.0, 20.0});
    CHECK(std::abs(v) < 1e-14);
    CHECK_THROWS_AS(hardcore_wavefunction(ks, {1.0, 2.0}), ConfigError);
}

TEST_CASE("hardcore N = 2 equals the strong-interaction two-particle limit") {
    const double d = 30.0;
    const cdouble s1 = single_mode_root(d, 1), s2 = single_mode_root(d, 2);
    const auto sol = two_particle_roots(d, 1e4 / d, {s1, s2});
    cdouble ratio{0.0, 0.0};
    oracles::Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const double z1 = rng.uniform(0.5, d - 1.5);
        const double z2 = rng.uniform(z1 + 1.0, d);
        const cdouble hc = hardcore_wavefunction({s1, s2}, {z1, z2});
        const cdouble tp = phi_triangle(sol, z1, z2);
        if (std::abs(hc) < 1e-4) continue;
        const cdouble r = tp / hc;
        if (std::abs(ratio) == 0.0)
            ratio = r;
        else
            CHECK(std::abs(r - ratio) < 0.03 * std::abs(ratio));
    }
}

TEST_CASE("hardcore N = 3 against the explicit determinant expansion") {
    const double d = 30.0;
    std::vector<cdouble> ks = {single_mode_root(d, 1), single_mode_root(d, 2),
                               single_mode_root(d, 3)};
    oracles::Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<double> zs = {rng.uniform(0.0, d), rng.uniform(0.0, d),
                                        rng.uniform(0.0, d)};
        std::vector<std::vector<cdouble>> mat(3, std::vector<cdouble>(3));
        for (int j = 0; j < 3; ++j)
            for (int c = 0; c < 3; ++c) mat[j][c] = eta(ks[j], zs[c]);
        cdouble pref = 1.0;
        for (const cdouble k : ks) pref /= (k - 1.0);
        const cdouble expect = pref * oracles::det3(mat);
        const cdouble got = hardcore_wavefunction(ks, zs);
        CHECK(std::abs(got - expect) <= 1e-12 * (1.0 + std::abs(expect)));
        // antisymmetric modulus structure: zero diagonal
        CHECK(std::abs(hardcore_wavefunction(ks, {zs[0], zs[0], zs[2]})) < 1e-13);
    }
}

TEST_CASE("gaudin N = 2 matches the compact two-particle wavefunction") {
    const double d = 20.0;
    for (const auto& sol :
         {fermionized_root(d, 3.0 / d, 1, 2), bound_root(d, -8.0 / d, 1, BoundType::II)}) {
        cdouble ratio{0.0, 0.0};
        double spread = 0.0;
        oracles::Rng rng(31);
        for (int trial = 0; trial < 40; ++trial) {
            const double z1 = rng.uniform(0.1, d - 0.1);
            const double z2 = rng.uniform(0.1, d - 0.1);
            const cdouble g = gaudin_wavefunction(sol, {z1, z2});
            const cdouble c = phi_triangle(sol, std::min(z1, z2), std::max(z1, z2));
            if (std::abs(c) < 1e-3) continue;
            const cdouble r = g / c;
            if (std::abs(ratio) == 0.0)
                ratio = r;
            else
                spread = std::max(spread, std::abs(r - ratio) / std::abs(ratio));
        }
        CHECK(spread < 1e-8);
    }
}

TEST_CASE("gaudin kappa = 0 factorizes into the permanent of single modes") {
    const double d = 20.0;
    const std::vector<cdouble> ks = {single_mode_root(d, 1), single_mode_root(d, 2),
                                     single_mode_root(d, 3)};
    EigenSolution sol;
    sol.ks = ks;
    sol.kappa = 0.0;
    sol.d = d;
    sol.energy = ks[0] * ks[0] + ks[1] * ks[1] + ks[2] * ks[2];
    cdouble ratio{0.0, 0.0};
    oracles::Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<double> zs = {rng.uniform(0.0, d), rng.uniform(0.0, d),
                                        rng.uniform(0.0, d)};
        std::vector<std::vector<cdouble>> mat(3, std::vector<cdouble>(3));
        std::vector<double> sorted = zs;
        std::sort(sorted.begin(), sorted.end());
        for (int j = 0; j < 3; ++j)
            for (int c = 0; c < 3; ++c) mat[j][c] = eta(ks[j], sorted[c]);
        const cdouble perm = oracles::permanent(mat);
        const cdouble g = gaudin_wavefunction(sol, zs);
        if (std::abs(perm) < 1e-6) continue;
        const cdouble r = g / perm;
        if (std::abs(ratio) == 0.0)
            ratio = r;
        else
            CHECK(std::abs(r - ratio) < 1e-10 * std::abs(ratio));
    }
}

TEST_CASE("many-body N = 2 reproduces two_particle_roots exactly") {
    const double d = 25.0;
    const cdouble s1 = single_mode_root(d, 1), s2 = single_mode_root(d, 2);
    const auto a = two_particle_roots(d, 0.12, {s1, s2});
    const auto b = many_body_roots(2, d, 0.12, {s1, s2});
    CHECK(std::abs(a.ks[0] - b.ks[0]) < 1e-12);
    CHECK(std::abs(a.ks[1] - b.ks[1]) < 1e-12);
}

TEST_CASE("many-body N = 3: free limit and kappa = 0") {
    const double d = 30.0;
    const std::vector<cdouble> singles = {single_mode_root(d, 1), single_mode_root(d, 2),
                                          single_mode_root(d, 3)};
    // kappa = 0: any triple of single roots satisfies the system directly
    CHECK(system_residual(singles, d, 0.0) < 1e-9);
    // strong interaction: three distinct nearly-free roots
    const auto sol = many_body_roots(3, d, 1e4 / d, singles);
    CHECK(sol.residual < 1e-9);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(sol.ks[i] - singles[i]) < 1e-3);
    CHECK(sol.energy.imag() <= 0.0);
}

TEST_CASE("gaudin N = 3 cusp condition at a pair coincidence") {
    const double d = 20.0;
    const std::vector<cdouble> singles = {single_mode_root(d, 1), single_mode_root(d, 2),
                                          single_mode_root(d, 3)};
    const auto sol = many_body_roots(3, d, 4.0 / d, singles);
    const double z0 = 0.35 * d, z3 = 0.8 * d;
    auto rel = [&](double s) {
        return gaudin_wavefunction(sol, {z0 - 0.5 * s, z0 + 0.5 * s, z3});
    };
    const double h1 = 1e-3, h2 = 5e-4;
    const cdouble slope1 = (rel(2.0 * h1) - rel(1e-12)) / (2.0 * h1 - 1e-12);
    const cdouble slope2 = (rel(2.0 * h2) - rel(1e-12)) / (2.0 * h2 - 1e-12);
    const cdouble slope = 2.0 * slope2 - slope1;
    const cdouble expect = 0.5 * sol.kappa * rel(1e-12);
    CHECK(std::abs(slope - expect) < 1e-2 * std::abs(expect) + 1e-10);
}

TEST_CASE("gaudin reports coefficient poles") {
    EigenSolution sol;
    sol.ks = {cdouble(0.3, 0.0), cdouble(-0.3, 0.0)};
    sol.kappa = 0.5;
    sol.d = 10.0;
    CHECK_THROWS_AS(gaudin_wavefunction(sol, {1.0, 2.0}), NumericalError);
}

TEST_SUITE_END();
