#ifndef NLSE_QUANTUM_HPP
#define NLSE_QUANTUM_HPP

#include <atomic>
#include <functional>
#include <utility>
#include <vector>

#include "nlse/params.hpp"
#include "nlse/spectrum_table.hpp"

namespace nlse {
namespace quantum {

/// Space/time discretization of the truncated-state evolution.
/// Grid points sit at z_j = (j - 1/2) h for j = 0 .. n_z-1 with h = d/(n_z-2);
/// the two Robin closures are centered exactly on z = 0 and z = d, and the
/// delta interaction is smeared over a Gaussian of width sigma.
struct GridSpec {
    int n_z = 202;           ///< total points including the two closure points
    double dt_over_h = 0.25; ///< k / h
    double sigma = 0.0;      ///< Gaussian width; 0 picks max(4h, d/200)

    double h(double d) const { return d / (n_z - 2); }
    double dt(double d) const { return dt_over_h * h(d); }
    double sigma_eff(double d) const;
    void validate(double d) const;
};

/// Truncated (<= 2 photon) state: vacuum amplitude, one-photon wavefunction
/// theta(z) and symmetric two-photon wavefunction phi(z1,z2), carried on two
/// time levels.  Amplitudes live in the frame rotating at the drive detuning.
struct QuantumState {
    int n = 0;
    cdouble eps{1.0, 0.0};
    std::vector<cdouble> theta_prev, theta_cur;
    std::vector<cdouble> phi_prev, phi_cur; // row-major n x n
    double time = 0.0;

    cdouble phi_at(const std::vector<cdouble>& phi, int i, int j) const {
        return phi[static_cast<std::size_t>(i) * n + j];
    }
    double max_asymmetry() const; ///< max |phi - phi^T| before symmetrization
};

struct Observables {
    double t1 = 0.0;   ///< one-photon intensity transmission
    double t2 = 0.0;   ///< two-photon intensity transmission
    double g2_0 = 0.0; ///< g2(d, 0)
    bool g2_defined = true;
};

struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> t1, t2, g2_0;
    bool converged = false;
    double convergence_time = 0.0;
};

class Evolver {
public:
    Evolver(const DimensionlessParams& p, const GridSpec& g);

    /// Advance by one time step (two-level scheme; the first call bootstraps
    /// from the stored previous level).
    void step();
    void steps(int count);

    /// Evolve the one-photon manifold only (the two-photon sheet stays put).
    void step_theta_only();

    const QuantumState& state() const { return state_; }
    QuantumState& state() { return state_; }
    double time() const { return state_.time; }
    double dt() const { return k_; }
    double h() const { return h_; }

    Observables observables() const;

    /// Forward-going intensity I(z_j) on the interior grid (full stencils).
    std::vector<double> intensity_profile() const;

    /// g2 at interior grid index j from the full derivative stencil.
    double g2_interior(int j) const;

    /// One-photon probability current (1/m_r) Im(theta* dtheta/dz) at z.
    double theta_current(double z) const;

    /// integral |theta|^2 dz over the interior.
    double theta_norm() const;

    std::vector<double> interior_grid() const;

private:
    DimensionlessParams p_;
    GridSpec g_;
    int n_;
    double h_, k_, sigma_;
    cdouble b_theta_, b_phi_;       // ik/(m h^2), scaled center coefficients
    cdouble c_plus_, c_minus_;      // Robin closure coefficients
    cdouble theta_center_, phi_center_;
    std::vector<cdouble> gauss_;    // interaction row by |i-j|
    QuantumState state_;
    std::vector<cdouble> theta_next_, phi_next_;

    void apply_theta_closures(std::vector<cdouble>& next, const std::vector<cdouble>& cur) const;
    void apply_phi_closures(std::vector<cdouble>& next, const std::vector<cdouble>& phi_cur,
                            const std::vector<cdouble>& theta_cur) const;
    void check_finite() const;
};

struct SteadyOptions {
    double horizon = 0.0;   ///< max time; 0 picks 12 (d/pi)^3
    double window = 0.0;    ///< trailing window; 0 picks (d/pi)^3
    double tol = 1e-3;      ///< relative variation across the window
    int sample_every = 32;  ///< steps between observable samples
};

/// Integrate from vacuum until T1, T2 and g2(d,0) are steady.
std::pair<QuantumState, ObservableSeries> evolve_to_steady(const DimensionlessParams& p,
                                                           const GridSpec& g,
                                                           const SteadyOptions& opts = {});

/// Observables of an arbitrary state (same functionals Evolver::observables uses).
Observables observables_of(const QuantumState& s, const DimensionlessParams& p,
                           const GridSpec& g);

/// Two-time correlation g2(d, tau): collapse the steady state by a detection
/// at z = d, evolve the remaining one-photon amplitude under the same driven
/// boundaries, and normalize by the squared steady-state intensity.
std::vector<double> g2_tau(const QuantumState& steady, const DimensionlessParams& p,
                           const GridSpec& g, const std::vector<double>& taus);

/// Steady-state g2(d,0), T1, T2 versus kappa at fixed drive delta0 = (pi/d)^2.
/// Cells run as independent instances on `workers` threads; the merge is in
/// axis order regardless of completion order.
SpectrumTable correlation_vs_kappa(const DimensionlessParams& p_template, const GridSpec& g,
                                   const std::vector<double>& kappa_values,
                                   const SteadyOptions& opts = {},
                                   std::atomic_bool* cancel = nullptr,
                                   const std::function<void(std::size_t)>& progress = {},
                                   int workers = 1);

} // namespace quantum
} // namespace nlse

#endif
