#include "nlse/semiclassical.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "nlse/linear.hpp"

namespace nlse {
namespace semiclassical {

namespace {

constexpr double kPi = std::numbers::pi;

using State = std::array<cdouble, 2>; // (Phi+, Phi-)

// stationary coupled-mode equations in the backward variable u = d - z
struct BackwardRhs {
    cdouble m;
    cdouble kappa;
    double delta;

    void operator()(const State& v, State& dvdu, double /*u*/) const {
        const cdouble plus = v[0], minus = v[1];
        const cdouble sum = plus + minus;
        const double s2 = abs2(plus) + abs2(minus);
        const double p2 = abs2(sum);
        const cdouble common = 0.5 * I * delta * sum;
        const cdouble diff_term = I * m * (plus - minus);
        const cdouble nl = 0.5 * I * kappa;
        const cdouble dplus_dz = common + diff_term - nl * (s2 * sum + p2 * plus);
        const cdouble dminus_dz = -common + diff_term + nl * (s2 * sum + p2 * minus);
        dvdu[0] = -dplus_dz;
        dvdu[1] = -dminus_dz;
    }
};

using Stepper = boost::numeric::odeint::runge_kutta_dopri5<State>;

State integrate_to_input(const DimensionlessParams& p, cdouble t_out, double tol) {
    BackwardRhs rhs{p.m, p.kappa, p.delta};
    State v{t_out, cdouble(0.0, 0.0)};
    const double scale = std::max(std::abs(t_out), std::abs(p.alpha));
    auto stepper = boost::numeric::odeint::make_controlled<Stepper>(
        tol * std::max(scale, 1e-300), tol);
    boost::numeric::odeint::integrate_adaptive(stepper, rhs, v, 0.0, p.d, p.d / 256.0);
    return v;
}

struct NewtonOutcome {
    cdouble t_out;
    double residual;
    bool ok;
};

NewtonOutcome newton_shoot(const DimensionlessParams& p, cdouble t0, const SolveOptions& opts) {
    const double ascale = std::max(std::abs(p.alpha), 1e-300);
    cdouble t = t0;
    auto mismatch = [&](cdouble tt) { return integrate_to_input(p, tt, opts.ode_tol)[0] - p.alpha; };
    cdouble f = mismatch(t);
    for (int it = 0; it < opts.newton_max_iter; ++it) {
        if (std::abs(f) < 1e-10 * ascale) return {t, std::abs(f), true};
        // real 2x2 Jacobian by forward differences along 1 and i
        const double h = 1e-7 * std::max(std::abs(t), ascale);
        const cdouble fx = (mismatch(t + h) - f) / h;
        const cdouble fy = (mismatch(t + I * h) - f) / h;
        // solve [Re fx  Re fy; Im fx  Im fy] (dx, dy)^T = -(Re f, Im f)^T
        const double det = fx.real() * fy.imag() - fy.real() * fx.imag();
        if (!std::isfinite(det) || std::abs(det) < 1e-300) return {t, std::abs(f), false};
        const double dx = (-f.real() * fy.imag() + f.imag() * fy.real()) / det;
        const double dy = (-fx.real() * f.imag() + f.real() * fx.imag()) / det;
        cdouble step(dx, dy);
        // damped update
        double damp = 1.0;
        for (int half = 0; half < 20; ++half) {
            const cdouble trial = t + damp * step;
            const cdouble ftrial = mismatch(trial);
            if (std::isfinite(std::abs(ftrial)) && std::abs(ftrial) < std::abs(f)) {
                t = trial;
                f = ftrial;
                break;
            }
            damp *= 0.5;
        }
        if (damp < 1e-6) return {t, std::abs(f), std::abs(f) < 1e-8 * ascale};
    }
    return {t, std::abs(f), std::abs(f) < 1e-8 * ascale};
}

} // namespace

double alpha_sq_for_photon_number(double n_photons, double d) {
    return n_photons / std::pow(d / kPi, 3.0);
}

ClassicalField steady_state(const DimensionlessParams& p, const SolveOptions& opts) {
    p.validate();
    const cdouble t_lin = linear::transfer_tr(p.m, p.delta, p.d).plus * p.alpha;

    std::vector<cdouble> branches;
    NewtonOutcome accepted{t_lin, std::numeric_limits<double>::infinity(), false};
    for (const double scale : {1.0, 0.5, 2.0}) {
        const NewtonOutcome out = newton_shoot(p, t_lin * scale, opts);
        if (!out.ok) continue;
        bool known = false;
        for (const cdouble b : branches)
            if (std::abs(b - out.t_out) < 1e-6 * std::max(std::abs(b), 1e-300)) known = true;
        if (!known) branches.push_back(out.t_out);
        if (!accepted.ok ||
            std::abs(out.t_out - t_lin) < std::abs(accepted.t_out - t_lin))
            accepted = out;
    }
    if (!accepted.ok)
        throw NonConvergence("steady_state: shooting Newton failed for all starts "
                             "(delta = " + format_double(p.delta) + ")");

    ClassicalField field;
    field.params = p;
    field.bistable = branches.size() > 1;
    field.branch_t_out = branches;
    field.boundary_residual = accepted.residual;

    // final integration with a fixed output grid (descending in z)
    const int n = opts.n_output;
    BackwardRhs rhs{p.m, p.kappa, p.delta};
    State v{accepted.t_out, cdouble(0.0, 0.0)};
    std::vector<double> times(n);
    for (int i = 0; i < n; ++i) times[i] = p.d * i / (n - 1);
    field.grid.resize(n);
    field.phi_plus.resize(n);
    field.phi_minus.resize(n);
    std::size_t idx = 0;
    auto stepper = boost::numeric::odeint::make_dense_output<Stepper>(
        opts.ode_tol * std::max(std::abs(accepted.t_out), std::abs(p.alpha)), opts.ode_tol);
    boost::numeric::odeint::integrate_times(
        stepper, rhs, v, times.begin(), times.end(), p.d / 256.0,
        [&](const State& s, double u) {
            const int i = n - 1 - static_cast<int>(idx); // z = d - u
            field.grid[i] = p.d - u;
            field.phi_plus[i] = s[0];
            field.phi_minus[i] = s[1];
            ++idx;
        });
    field.grid.front() = 0.0;
    field.grid.back() = p.d;
    return field;
}

SpectrumTable nonlinear_spectrum(const DimensionlessParams& p, const std::vector<double>& deltas,
                                 const std::vector<double>& intensities,
                                 std::atomic_bool* cancel) {
    if (deltas.empty() || intensities.empty())
        throw ConfigError("nonlinear_spectrum: empty sweep");
    SpectrumTable table("delta", deltas);
    for (std::size_t j = 0; j < intensities.size(); ++j) {
        table.add_column("T2_" + std::to_string(j));
        table.add_column("R2_" + std::to_string(j));
        table.add_column("bistable_" + std::to_string(j));
        table.set_metadata("intensity_" + std::to_string(j), intensities[j]);
    }
    table.set_metadata("solver", "semiclassical.spectrum");
    table.set_metadata("d", p.d);

    for (std::size_t i = 0; i < deltas.size(); ++i) {
        for (std::size_t j = 0; j < intensities.size(); ++j) {
            if (cancel && cancel->load()) return table;
            DimensionlessParams q = p;
            q.delta = deltas[i];
            q.alpha = std::sqrt(intensities[j]);
            try {
                const ClassicalField f = steady_state(q);
                const double a2 = std::max(abs2(q.alpha), 1e-300);
                table.set("T2_" + std::to_string(j), i, abs2(f.transmitted()) / a2);
                table.set("R2_" + std::to_string(j), i, abs2(f.reflected()) / a2);
                table.set("bistable_" + std::to_string(j), i, f.bistable ? 1.0 : 0.0);
            } catch (const NonConvergence&) {
                // masked cell
            }
        }
    }
    return table;
}

SpectrumTable transmission_vs_photon_number(const DimensionlessParams& p,
                                            const std::vector<double>& photon_numbers,
                                            std::atomic_bool* cancel) {
    if (photon_numbers.empty())
        throw ConfigError("transmission_vs_photon_number: empty sweep");
    for (const double n : photon_numbers)
        if (!(n > 0.0)) throw ConfigError("photon numbers must be positive");
    SpectrumTable table("photons", photon_numbers);
    table.add_column("T2");
    table.add_column("bistable");
    table.set_metadata("solver", "semiclassical.saturation");
    const double delta0 = sqr(kPi / p.d);
    table.set_metadata("delta", delta0);
    for (std::size_t i = 0; i < photon_numbers.size(); ++i) {
        if (cancel && cancel->load()) return table;
        DimensionlessParams q = p;
        q.delta = delta0;
        q.alpha = std::sqrt(alpha_sq_for_photon_number(photon_numbers[i], p.d));
        try {
            const ClassicalField f = steady_state(q);
            table.set("T2", i, abs2(f.transmitted()) / abs2(q.alpha));
            table.set("bistable", i, f.bistable ? 1.0 : 0.0);
        } catch (const NonConvergence&) {
        }
    }
    return table;
}

double peak_delta(DimensionlessParams p, double intensity, double window_halfwidth) {
    p.alpha = std::sqrt(intensity);
    const double delta0 = sqr(kPi / p.d);
    auto f = [&](double delta) {
        p.delta = delta;
        const ClassicalField field = steady_state(p);
        return abs2(field.transmitted());
    };
    double a = delta0 - window_halfwidth, b = delta0 + window_halfwidth;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-10 * delta0) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace semiclassical
} // namespace nlse
