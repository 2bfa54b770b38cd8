#ifndef NLSE_SEMICLASSICAL_HPP
#define NLSE_SEMICLASSICAL_HPP

#include <atomic>
#include <vector>

#include "nlse/params.hpp"
#include "nlse/spectrum_table.hpp"

namespace nlse {
namespace semiclassical {

/// Stationary solution of the classical nonlinear coupled-mode equations,
/// driven at z = 0 with Phi+(0) = alpha, undriven at z = d.
struct ClassicalField {
    std::vector<double> grid;        ///< strictly increasing, endpoints 0 and d
    std::vector<cdouble> phi_plus;
    std::vector<cdouble> phi_minus;
    DimensionlessParams params;
    bool bistable = false;           ///< multiple Newton fixed points detected
    std::vector<cdouble> branch_t_out; ///< transmitted amplitudes of all branches found
    double boundary_residual = 0.0;  ///< |Phi+(0) - alpha| of the accepted branch

    cdouble transmitted() const { return phi_plus.back(); }
    cdouble reflected() const { return phi_minus.front(); }
};

struct SolveOptions {
    double ode_tol = 1e-11;      ///< adaptive integrator tolerance (relative)
    int newton_max_iter = 40;
    int n_output = 513;          ///< grid points of the returned field
};

/// Backward-shooting steady state: guess the transmitted amplitude at z = d,
/// integrate to z = 0, Newton-iterate until Phi+(0) = alpha.  Multi-start
/// detects bistability; all distinct branches are reported and the one
/// closest to the linear prediction is returned in the field profile.
ClassicalField steady_state(const DimensionlessParams& p, const SolveOptions& opts = {});

/// |T|^2(delta) for a list of incident intensities |alpha|^2.  Cells that hit
/// bistability carry flag 1 in the matching `bistable_*` column; cells whose
/// solve failed are masked.
SpectrumTable nonlinear_spectrum(const DimensionlessParams& p, const std::vector<double>& deltas,
                                 const std::vector<double>& intensities,
                                 std::atomic_bool* cancel = nullptr);

/// On-resonance |T|^2 versus the number of photons in a bandwidth-limited
/// input pulse, |alpha|^2 = N / (d/pi)^3.
SpectrumTable transmission_vs_photon_number(const DimensionlessParams& p,
                                            const std::vector<double>& photon_numbers,
                                            std::atomic_bool* cancel = nullptr);

/// |alpha|^2 of an input pulse carrying n photons within the system bandwidth.
double alpha_sq_for_photon_number(double n_photons, double d);

/// Location of the |T|^2 peak near delta0 at the given incident intensity
/// (golden-section search; each evaluation is a steady-state solve).
double peak_delta(DimensionlessParams p, double intensity, double window_halfwidth);

} // namespace semiclassical
} // namespace nlse

#endif
