#ifndef NLSE_PARAMS_HPP
#define NLSE_PARAMS_HPP

#include <optional>

#include "nlse/types.hpp"

namespace nlse {

/// Atomic / waveguide parameters, all rates normalized to the total
/// spontaneous emission rate (gamma == 1 internally).
struct PhysicalParams {
    double gamma = 1.0;              ///< total spontaneous emission rate
    double gamma1d_over_gamma = 0.1; ///< emission into guided modes, (0,1]
    double delta1_over_gamma = -10.0;///< one-photon detuning, sign significant
    double delta2_over_gamma = 0.0;  ///< nonlinear detuning
    double od = 100.0;               ///< optical depth, > 0
    double omega_over_gamma = 1.0;   ///< control Rabi frequency (band-gap solver)
    double gamma0_over_gamma = 0.0;  ///< spin-coherence decay (band-gap solver)

    void validate() const;
};

/// Parameter set of the dimensionless NLSE: i dS/dt = -(1/2m) S'' + 2 kappa |S|^2 S,
/// on z in [0,d], driven with amplitude alpha at z=0, two-photon detuning delta.
struct DimensionlessParams {
    cdouble m{0.5, 0.0};   ///< effective mass
    cdouble kappa{0.0, 0.0};
    double d = 30.0;       ///< system length in coherence lengths
    double delta = 0.0;    ///< drive two-photon detuning
    cdouble alpha{1e-3, 0.0};
    std::optional<PhysicalParams> provenance; ///< physical record this was derived from

    void validate() const;
};

/// Maps physical parameters onto the dimensionless NLSE set.
/// m = (1/2)(1 + i Gamma/2|Delta1|), kappa = (G1d/G)/(4(Delta2/G + i/2)),
/// d = OD * Gamma/|Delta1|.  Requires Delta1 < 0.
DimensionlessParams derive_dimensionless(const PhysicalParams& phys, double delta, cdouble alpha);

/// Critical polariton number N_cr = pi^3 / (4 d^2 |Re kappa|).
/// Rejects purely absorptive kappa (Re kappa == 0).
double critical_photon_number(const DimensionlessParams& p);

/// Optical depth at which N_cr = 1 with the optimal-detuning choice
/// d Gamma/|Delta1| = 1/2:  OD = 2 pi^3 (Gamma/Gamma1D)(Delta2/Gamma).
double single_photon_od(const PhysicalParams& phys);

/// Linear loss parameter beta = d Gamma/|Delta1| = OD (Gamma/Delta1)^2.
double loss_beta(const PhysicalParams& phys);

} // namespace nlse

#endif
