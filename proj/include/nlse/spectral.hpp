#ifndef NLSE_SPECTRAL_HPP
#define NLSE_SPECTRAL_HPP

#include <string>
#include <utility>
#include <vector>

#include "nlse/types.hpp"

namespace nlse {
namespace spectral {

struct Branch {
    enum class Kind { single, fermionized, bound_type_i, bound_type_ii, many_body, ambiguous };
    Kind kind = Kind::many_body;
    int m = 0; ///< first mode index (fermionized) or 0
    int n = 0; ///< mode index

    std::string label() const;
};

/// A solved eigenmode of the open-boundary problem: complex wavenumbers,
/// complex energy E = sum k_i^2, branch classification and the max log-form
/// residual of the transcendental system.
struct EigenSolution {
    std::vector<cdouble> ks;
    cdouble energy;
    Branch branch;
    double residual = 0.0;
    double d = 0.0;
    cdouble kappa{0.0, 0.0};

    /// Lieb-Liniger style interaction parameter kappa d / 4.
    double gamma_parameter() const { return kappa.real() * d / 4.0; }
};

/// Single-particle mode function eta_k(z) = sin(kz) + i k cos(kz).
cdouble eta(cdouble k, double z);

/// Normalization A^2 = 4k / (2dk(1+k^2) + (k^2-1) sin(2dk)).
cdouble mode_norm_a2(cdouble k, double d);

/// Root of the single-particle characteristic equation nearest n pi / d.
cdouble single_mode_root(double d, int n);

/// First n_max single-particle modes ordered by Re k.
std::vector<EigenSolution> single_particle_modes(double d, int n_max);

/// Residual |exp(2ikd) - ((k+1)/(k-1))^2| of the non-interacting equation.
double single_equation_residual(cdouble k, double d);

/// Branch-free residual of the N-body transcendental system at a candidate
/// root: max_i |2 i k_i d - log(rhs_i) mod 2 pi i|.
double system_residual(const std::vector<cdouble>& ks, double d, cdouble kappa);

/// General N-body transcendental solve (N <= 3) by damped Newton on the
/// log-form equations with branch integers fixed from the seed.
EigenSolution many_body_roots(int n_particles, double d, cdouble kappa,
                              const std::vector<cdouble>& seed);

/// Two-particle wrapper around many_body_roots with trivial-solution checks.
EigenSolution two_particle_roots(double d, cdouble kappa, std::pair<cdouble, cdouble> seed);

/// Fermionized branch near the non-interacting pair (m, n), m != n.
EigenSolution fermionized_root(double d, double kappa, int m, int n);

enum class BoundType { I, II };

/// Bound-state energy estimate: type I: 2(n pi/d)^2 - kappa^2/2,
/// type II: (n pi/d)^2 - kappa^2/2.
double bound_state_energy_estimate(double d, double kappa_mag, int n, BoundType type);

/// Bound branch root for attractive kappa < 0, seeded from the asymptotic
/// pair k = a +- i|kappa|/2 with the exponentially small pole offset resolved.
EigenSolution bound_root(double d, double kappa, int n, BoundType type);

/// Enumerate all distinct bound-branch roots with center-of-mass wavevector
/// below p_max (attractive kappa < 0).  Branch labels are assigned by the
/// nearest estimate ladder; ambiguous ties are labeled as such.
std::vector<EigenSolution> bound_roots_scan(double d, double kappa, double p_max);

/// Homotopy continuation of `start` along a path of kappa values.  A step
/// whose polished root jumps more than 10x the predicted step raises
/// BranchJump instead of silently switching branches.
std::vector<EigenSolution> root_continuation(double d, const std::vector<cdouble>& kappa_path,
                                             const EigenSolution& start);

/// Symmetric two-particle wavefunction sampled on grid x grid.
class WavefunctionGrid2D {
public:
    WavefunctionGrid2D(std::vector<double> grid);
    cdouble at(std::size_t i, std::size_t j) const { return values_[i * grid_.size() + j]; }
    void set(std::size_t i, std::size_t j, cdouble v);
    const std::vector<double>& grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }

    double max_abs() const;
    /// integral |phi(z,z)|^2 dz / integral integral |phi|^2 dz1 dz2 (trapezoid).
    double diagonal_fraction() const;

private:
    std::vector<double> grid_;
    std::vector<cdouble> values_;
};

/// phi = phi_A + phi_B on the triangle z1 <= z2, symmetrized, normalized to
/// unit max modulus.  Throws ConvergedToTrivial if the function vanishes.
WavefunctionGrid2D two_particle_wavefunction(const EigenSolution& sol,
                                             const std::vector<double>& grid);

/// Hardcore many-body wavefunction (prod 1/(k_j - 1)) det[eta_{k_j}(z_k)].
cdouble hardcore_wavefunction(const std::vector<cdouble>& ks, const std::vector<double>& zs);

/// Full Bethe-type wavefunction as the 2^N N! coefficient sum (N <= 3).
/// Coordinates are sorted first (symmetric continuation).
cdouble gaudin_wavefunction(const EigenSolution& sol, const std::vector<double>& zs);

} // namespace spectral
} // namespace nlse

#endif
