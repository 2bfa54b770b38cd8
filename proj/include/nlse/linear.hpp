#ifndef NLSE_LINEAR_HPP
#define NLSE_LINEAR_HPP

#include <optional>
#include <vector>

#include "nlse/params.hpp"
#include "nlse/spectrum_table.hpp"

namespace nlse {
namespace linear {

/// Forward/backward field pair of the stationary linear problem, normalized
/// to unit input: Phi+(0) = 1, Phi-(d) = 0.
struct FieldPair {
    cdouble plus;
    cdouble minus;
};

/// Lossless (m = 1/2) closed-form profile at position z for detuning delta.
/// Returns Phi+(z)/alpha.  delta < 0 continues through the principal branch
/// sqrt(delta) = i sqrt(|delta|).  Throws AntiresonanceError when the shared
/// denominator is numerically singular.
cdouble analytic_profile(const DimensionlessParams& p, double z);

/// Both fields of the closed-form solution, unit input, stable for any real
/// delta (scaled evaluation in the evanescent region).
FieldPair analytic_fields(double delta, double d, double z);

/// Lossless transmission/reflection amplitudes T = Phi+(d), R = Phi-(0).
FieldPair analytic_tr(double delta, double d);

struct Resonance {
    double delta0;      ///< (n pi / d)^2
    double halfwidth;   ///< (pi/d)^3 / 2 for n = 1
    bool extrapolated;  ///< true for n > 1 (width formula extended beyond its derivation)
};

/// Resonance position and half width of the n-th transmission resonance.
Resonance resonance_and_width(double d, int n);

/// First-resonance polariton number N_pol = (d^2+pi^2)^2/(4 d pi^2) |alpha|^2.
double polariton_number(const DimensionlessParams& p);

/// |alpha|^2 that puts n_pol polaritons in the system on the first resonance.
double alpha_sq_for_polariton_number(double n_pol, double d);

/// Intracavity energy integral(|Phi+|^2+|Phi-|^2) dz at unit input.
double intracavity_energy(double delta, double d);

/// Lossless |T|^2, |R|^2 and attenuated |T|^2 over a detuning sweep.
/// The loss model multiplies the resonant intensity by exp(-beta), with the
/// off-resonance exponent weighted by intracavity energy relative to its
/// value on the first resonance.  Antiresonances come back masked.
SpectrumTable analytic_spectrum(const DimensionlessParams& p, const std::vector<double>& deltas,
                                double beta);

/// Transmission/reflection of the two-mode system
///   dV+/dz = +i(A V+ + B V-),  dV-/dz = -i(A V- + B V+)
/// with V+(0)=1, V-(L)=0, by exact (overflow-safe) matrix exponentiation.
FieldPair two_mode_transfer(cdouble a_diag, cdouble b_off, double length);

/// Linear coupled-mode transmission with arbitrary complex mass
/// (A = delta/2 + m, B = delta/2 - m).  This is the loss-consistent linear
/// reference used by the semiclassical and quantum modules.
FieldPair transfer_tr(cdouble m, double delta, double d);

/// Field pair at interior position z for the complex-m linear problem.
FieldPair transfer_fields(cdouble m, double delta, double d, double z);

/// Peak |T|^2 of the complex-m linear problem near the n-th resonance.
/// Returns (delta_peak, peak |T|^2).
std::pair<double, double> transfer_peak(cdouble m, double d, int n);

/// Parameters of the full-susceptibility (band-gap) solver.  Lengths are in
/// absorption lengths, so `length` equals the optical depth.  `eta` (c/2vg)
/// is only needed to keep the small propagation-phase term; leaving it unset
/// drops that term.
struct SusceptibilityParams {
    double omega = 1.0;    ///< control Rabi frequency, units of Gamma
    double delta1 = -10.0; ///< one-photon detuning
    double gamma0 = 0.0;   ///< spin-coherence decay
    double length = 100.0; ///< system length in absorption lengths (= OD)
    std::optional<double> eta; ///< group-velocity ratio c/2vg for the phase term

    void validate() const;
};

/// Self/cross susceptibilities at two-photon detuning delta3.
struct Susceptibilities {
    cdouble chi_s;
    cdouble chi_c;
    cdouble delta3_tilde;
};
Susceptibilities susceptibilities(const SusceptibilityParams& s, double delta3);

/// |T|^2 and |R|^2 of the full-susceptibility two-point BVP over a sweep of
/// two-photon detunings.
SpectrumTable bandgap_spectrum(const SusceptibilityParams& s, const std::vector<double>& delta3s);

} // namespace linear
} // namespace nlse

#endif
