#include "nlse/params.hpp"

#include <cmath>
#include <numbers>

namespace nlse {

namespace {
constexpr double kPi = std::numbers::pi;
}

void PhysicalParams::validate() const {
    if (!(gamma > 0.0))
        throw ConfigError("physical.gamma must be > 0");
    if (!(gamma1d_over_gamma > 0.0) || gamma1d_over_gamma > 1.0)
        throw ConfigError("physical.gamma1d_over_gamma must lie in (0, 1]");
    if (!(od > 0.0))
        throw ConfigError("physical.od must be > 0");
    if (!(omega_over_gamma >= 0.0))
        throw ConfigError("physical.omega_over_gamma must be >= 0");
    if (gamma0_over_gamma < 0.0)
        throw ConfigError("physical.gamma0_over_gamma must be >= 0");
}

void DimensionlessParams::validate() const {
    if (!(d > 0.0))
        throw ConfigError("dimensionless.d must be > 0");
    if (kappa.imag() > 1e-12)
        throw ConfigError("dimensionless.kappa must have Im <= 0 (decay, not gain)");
}

DimensionlessParams derive_dimensionless(const PhysicalParams& phys, double delta, cdouble alpha) {
    phys.validate();
    if (phys.delta1_over_gamma == 0.0)
        throw ConfigError("delta1 = 0: effective mass undefined");
    if (phys.delta1_over_gamma > 0.0)
        throw ConfigError("delta1 > 0 not supported; the mass formula assumes Delta1 < 0");

    const double abs_d1 = std::abs(phys.delta1_over_gamma);
    DimensionlessParams p;
    p.m = 0.5 * (1.0 + I / (2.0 * abs_d1));
    p.kappa = phys.gamma1d_over_gamma / (4.0 * (phys.delta2_over_gamma + 0.5 * I));
    p.d = phys.od / abs_d1;
    p.delta = delta;
    p.alpha = alpha;
    p.provenance = phys;
    p.validate();
    return p;
}

double critical_photon_number(const DimensionlessParams& p) {
    const double re_k = std::abs(p.kappa.real());
    if (re_k < 1e-15 * std::abs(p.kappa))
        throw ConfigError("critical photon number undefined for purely absorptive kappa");
    if (re_k == 0.0)
        throw ConfigError("critical photon number undefined for kappa = 0");
    return kPi * kPi * kPi / (4.0 * p.d * p.d * re_k);
}

double single_photon_od(const PhysicalParams& phys) {
    phys.validate();
    if (phys.delta2_over_gamma <= 0.0)
        throw ConfigError("single-photon OD estimate needs Delta2 > 0 (dispersive regime)");
    return 2.0 * kPi * kPi * kPi * (1.0 / phys.gamma1d_over_gamma) * phys.delta2_over_gamma;
}

double loss_beta(const PhysicalParams& phys) {
    phys.validate();
    if (phys.delta1_over_gamma == 0.0)
        throw ConfigError("loss_beta undefined for delta1 = 0");
    return phys.od / sqr(phys.delta1_over_gamma);
}

} // namespace nlse
