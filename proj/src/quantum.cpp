#include "nlse/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace nlse {
namespace quantum {

namespace {
constexpr double kPi = std::numbers::pi;
}

double GridSpec::sigma_eff(double d) const {
    if (sigma > 0.0) return sigma;
    return std::max(4.0 * h(d), d / 200.0);
}

void GridSpec::validate(double d) const {
    if (n_z < 8) throw ConfigError("grid.n_z too small");
    if (!(dt_over_h > 0.0) || dt_over_h > 0.5 + 1e-12)
        throw ConfigError("grid.dt_over_h must lie in (0, 0.5]");
    const double hh = h(d);
    const double sg = sigma_eff(d);
    if (hh > sg / 4.0 * (1.0 + 1e-9))
        throw ConfigError("grid too coarse: need h <= sigma/4");
    if (sg > d / 50.0 * (1.0 + 1e-9))
        throw ConfigError("interaction width too large: need sigma <= d/50");
}

double QuantumState::max_asymmetry() const {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            m = std::max(m, std::abs(phi_cur[static_cast<std::size_t>(i) * n + j] -
                                     phi_cur[static_cast<std::size_t>(j) * n + i]));
    return m;
}

Evolver::Evolver(const DimensionlessParams& p, const GridSpec& g) : p_(p), g_(g) {
    p_.validate();
    g_.validate(p_.d);
    n_ = g_.n_z;
    h_ = g_.h(p_.d);
    k_ = g_.dt(p_.d);
    sigma_ = g_.sigma_eff(p_.d);

    b_theta_ = I * k_ / (p_.m * h_ * h_);
    b_phi_ = b_theta_;
    c_plus_ = 0.5 + I / (2.0 * p_.m * h_);
    c_minus_ = -0.5 + I / (2.0 * p_.m * h_);
    theta_center_ = 2.0 * I * k_ * p_.delta;
    phi_center_ = 4.0 * I * k_ * p_.delta;

    gauss_.resize(n_);
    const double norm = 1.0 / (sigma_ * std::sqrt(2.0 * kPi));
    for (int r = 0; r < n_; ++r) {
        const double dz = r * h_;
        const cdouble gval = norm * std::exp(-dz * dz / (2.0 * sigma_ * sigma_));
        gauss_[r] = phi_center_ - 4.0 * I * k_ * p_.kappa * gval;
    }

    state_.n = n_;
    state_.eps = 1.0;
    state_.theta_prev.assign(n_, 0.0);
    state_.theta_cur.assign(n_, 0.0);
    state_.phi_prev.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    state_.phi_cur.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    theta_next_.assign(n_, 0.0);
    phi_next_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
}

void Evolver::apply_theta_closures(std::vector<cdouble>& next,
                                   const std::vector<cdouble>& cur) const {
    // Robin closures centered on z = 0 and z = d.  The neighbor value is
    // taken from the previous time level: the algebraically exact same-level
    // closure makes the two-level scheme linearly unstable for real m, while
    // the lagged form is stable and agrees with it identically at steady state.
    const cdouble drive = p_.alpha * state_.eps;
    next[0] = (drive + c_minus_ * cur[1]) / c_plus_;
    next[n_ - 1] = c_minus_ * cur[n_ - 2] / c_plus_;
}

void Evolver::apply_phi_closures(std::vector<cdouble>& next, const std::vector<cdouble>& phi_cur,
                                 const std::vector<cdouble>& theta_cur) const {
    const cdouble half_drive = 0.5 * p_.alpha * state_.eps;
    const auto n = static_cast<std::size_t>(n_);
    for (std::size_t j = 0; j < n; ++j) {
        next[0 * n + j] = (half_drive * theta_cur[j] + c_minus_ * phi_cur[1 * n + j]) / c_plus_;
        next[(n - 1) * n + j] = c_minus_ * phi_cur[(n - 2) * n + j] / c_plus_;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        next[i * n + 0] = (half_drive * theta_cur[i] + c_minus_ * phi_cur[i * n + 1]) / c_plus_;
        next[i * n + (n - 1)] = c_minus_ * phi_cur[i * n + (n - 2)] / c_plus_;
    }
}

void Evolver::step_theta_only() {
    const cdouble inv = 1.0 / (1.0 + b_theta_);
    const cdouble a_prev = (1.0 - b_theta_) * inv;
    const cdouble a_nbr = b_theta_ * inv;
    const cdouble a_cen = theta_center_ * inv;
    const auto& prev = state_.theta_prev;
    const auto& cur = state_.theta_cur;
    for (int j = 1; j + 1 < n_; ++j)
        theta_next_[j] = a_prev * prev[j] + a_nbr * (cur[j + 1] + cur[j - 1]) + a_cen * cur[j];
    apply_theta_closures(theta_next_, cur);
    state_.theta_prev.swap(state_.theta_cur);
    state_.theta_cur.swap(theta_next_);
    state_.time += k_;
}

void Evolver::step() {
    // one-photon sheet
    {
        const cdouble inv = 1.0 / (1.0 + b_theta_);
        const cdouble a_prev = (1.0 - b_theta_) * inv;
        const cdouble a_nbr = b_theta_ * inv;
        const cdouble a_cen = theta_center_ * inv;
        const auto& prev = state_.theta_prev;
        const auto& cur = state_.theta_cur;
        for (int j = 1; j + 1 < n_; ++j)
            theta_next_[j] = a_prev * prev[j] + a_nbr * (cur[j + 1] + cur[j - 1]) + a_cen * cur[j];
        apply_theta_closures(theta_next_, cur);
    }

    // two-photon sheet
    {
        const cdouble inv = 1.0 / (1.0 + 2.0 * b_phi_);
        const cdouble a_prev = (1.0 - 2.0 * b_phi_) * inv;
        const cdouble a_nbr = b_phi_ * inv;
        const auto n = static_cast<std::size_t>(n_);
        const auto& prev = state_.phi_prev;
        const auto& cur = state_.phi_cur;
        auto& next = phi_next_;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int xi = 1; xi < n_ - 1; ++xi) {
            const auto x = static_cast<std::size_t>(xi);
            const cdouble* row_p = prev.data() + x * n;
            const cdouble* row_c = cur.data() + x * n;
            const cdouble* row_u = cur.data() + (x - 1) * n;
            const cdouble* row_d = cur.data() + (x + 1) * n;
            cdouble* row_n = next.data() + x * n;
            for (std::size_t y = 1; y + 1 < n; ++y) {
                const std::size_t r = x >= y ? x - y : y - x;
                const cdouble nbr = row_u[y] + row_d[y] + row_c[y + 1] + row_c[y - 1];
                row_n[y] = a_prev * row_p[y] + a_nbr * nbr + (gauss_[r] * inv) * row_c[y];
            }
        }
        apply_phi_closures(next, cur, state_.theta_cur);

        // restore exact symmetry (construction keeps it to roundoff)
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const cdouble avg = 0.5 * (next[i * n + j] + next[j * n + i]);
                next[i * n + j] = avg;
                next[j * n + i] = avg;
            }
        }
        state_.phi_prev.swap(state_.phi_cur);
        state_.phi_cur.swap(phi_next_);
    }

    state_.theta_prev.swap(state_.theta_cur);
    state_.theta_cur.swap(theta_next_);
    state_.time += k_;
}

void Evolver::steps(int count) {
    for (int i = 0; i < count; ++i) step();
}

void Evolver::check_finite() const {
    const cdouble probe = state_.theta_cur[n_ - 1] +
                          state_.phi_cur[static_cast<std::size_t>(n_) * n_ - 1];
    if (!std::isfinite(probe.real()) || !std::isfinite(probe.imag()))
        throw NumericalError("quantum evolution produced non-finite values (instability)");
}

std::vector<double> Evolver::interior_grid() const {
    std::vector<double> z(n_ - 2);
    for (int j = 1; j + 1 < n_; ++j) z[j - 1] = (j - 0.5) * h_;
    return z;
}

Observables observables_of(const QuantumState& s, const DimensionlessParams& p,
                           const GridSpec& g) {
    const int n = s.n;
    const double h = g.h(p.d);
    const auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };

    const cdouble theta_d = 0.5 * (s.theta_cur[n - 1] + s.theta_cur[n - 2]);
    double int_col = 0.0, int_theta = 0.0;
    for (int j = 1; j + 1 < n; ++j) {
        const cdouble col = 0.5 * (s.phi_cur[idx(j, n - 1)] + s.phi_cur[idx(j, n - 2)]);
        int_col += abs2(col);
        int_theta += abs2(s.theta_cur[j]);
    }
    int_col *= h;
    int_theta *= h;
    const cdouble phi_dd = 0.25 * (s.phi_cur[idx(n - 1, n - 1)] + s.phi_cur[idx(n - 2, n - 1)] +
                                   s.phi_cur[idx(n - 1, n - 2)] + s.phi_cur[idx(n - 2, n - 2)]);

    Observables out;
    const double a2 = abs2(p.alpha);
    out.t1 = 4.0 * abs2(theta_d) / a2;
    out.t2 = int_theta > 0.0 ? 16.0 * int_col / (a2 * int_theta) : 0.0;
    const double den = abs2(theta_d) + 4.0 * int_col;
    if (den < 1e-30) {
        out.g2_defined = false;
        out.g2_0 = 0.0;
    } else {
        out.g2_0 = 4.0 * abs2(phi_dd) / (den * den);
    }
    return out;
}

Observables Evolver::observables() const { return observables_of(state_, p_, g_); }

std::vector<double> Evolver::intensity_profile() const {
    const auto idx = [this](int i, int j) { return static_cast<std::size_t>(i) * n_ + j; };
    const cdouble dcoef = I / (2.0 * p_.m) / (2.0 * h_);
    std::vector<double> out(n_ - 2);
    for (int j = 1; j + 1 < n_; ++j) {
        const cdouble one = state_.theta_cur[j] -
                            dcoef * (state_.theta_cur[j + 1] - state_.theta_cur[j - 1]);
        double two = 0.0;
        for (int jp = 1; jp + 1 < n_; ++jp) {
            const cdouble v = state_.phi_cur[idx(jp, j)] -
                              dcoef * (state_.phi_cur[idx(jp, j + 1)] -
                                       state_.phi_cur[idx(jp, j - 1)]);
            two += abs2(v);
        }
        out[j - 1] = 0.5 * abs2(one) + 2.0 * h_ * two;
    }
    return out;
}

double Evolver::g2_interior(int j) const {
    if (j < 1 || j + 1 >= n_) throw ConfigError("g2_interior: index not interior");
    const auto idx = [this](int a, int b) { return static_cast<std::size_t>(a) * n_ + b; };
    const cdouble d1 = (state_.phi_cur[idx(j + 1, j)] - state_.phi_cur[idx(j - 1, j)]) / (2.0 * h_);
    const cdouble d12 = (state_.phi_cur[idx(j + 1, j + 1)] - state_.phi_cur[idx(j + 1, j - 1)] -
                         state_.phi_cur[idx(j - 1, j + 1)] + state_.phi_cur[idx(j - 1, j - 1)]) /
                        (4.0 * h_ * h_);
    const cdouble num_amp = state_.phi_cur[idx(j, j)] - (I / p_.m) * d1 -
                            d12 / (4.0 * p_.m * p_.m);
    const double intensity = intensity_profile()[j - 1];
    if (intensity * intensity < 1e-30) throw NumericalError("g2_interior: intensity ~ 0");
    return abs2(num_amp) / (intensity * intensity);
}

double Evolver::theta_current(double z) const {
    const double mr = p_.m.real();
    if (z <= 0.0) {
        const cdouble th = 0.5 * (state_.theta_cur[0] + state_.theta_cur[1]);
        const cdouble dth = (state_.theta_cur[1] - state_.theta_cur[0]) / h_;
        return (1.0 / mr) * std::imag(std::conj(th) * dth);
    }
    if (z >= p_.d) {
        const cdouble th = 0.5 * (state_.theta_cur[n_ - 1] + state_.theta_cur[n_ - 2]);
        const cdouble dth = (state_.theta_cur[n_ - 1] - state_.theta_cur[n_ - 2]) / h_;
        return (1.0 / mr) * std::imag(std::conj(th) * dth);
    }
    const int j = std::clamp(static_cast<int>(std::lround(z / h_ + 0.5)), 1, n_ - 2);
    const cdouble dth = (state_.theta_cur[j + 1] - state_.theta_cur[j - 1]) / (2.0 * h_);
    return (1.0 / mr) * std::imag(std::conj(state_.theta_cur[j]) * dth);
}

double Evolver::theta_norm() const {
    double acc = 0.0;
    for (int j = 1; j + 1 < n_; ++j) acc += abs2(state_.theta_cur[j]);
    return acc * h_;
}

std::pair<QuantumState, ObservableSeries> evolve_to_steady(const DimensionlessParams& p,
                                                           const GridSpec& g,
                                                           const SteadyOptions& opts) {
    const double t_band = std::pow(p.d / kPi, 3.0);
    const double horizon = opts.horizon > 0.0 ? opts.horizon : 12.0 * t_band;
    const double window = opts.window > 0.0 ? opts.window : t_band;

    Evolver ev(p, g);
    ObservableSeries series;
    const int sample_every = std::max(1, opts.sample_every);
    const auto window_samples =
        static_cast<std::size_t>(std::ceil(window / (sample_every * ev.dt())));

    int step_count = 0;
    while (ev.time() < horizon) {
        ev.step();
        if (++step_count % sample_every != 0) continue;
        const Observables obs = ev.observables();
        if (!std::isfinite(obs.t1) || !std::isfinite(obs.g2_0))
            throw NumericalError("evolve_to_steady: non-finite observables (instability)");
        series.times.push_back(ev.time());
        series.t1.push_back(obs.t1);
        series.t2.push_back(obs.t2);
        series.g2_0.push_back(obs.g2_0);

        if (series.times.size() < window_samples + 2 || ev.time() < 2.0 * window) continue;
        auto settled = [&](const std::vector<double>& v) {
            const double last = v.back();
            const double floor_val = std::max(std::abs(last), 1e-12);
            double lo = last, hi = last;
            for (std::size_t i = v.size() - window_samples; i < v.size(); ++i) {
                lo = std::min(lo, v[i]);
                hi = std::max(hi, v[i]);
            }
            return (hi - lo) <= opts.tol * floor_val;
        };
        if (settled(series.t1) && settled(series.t2) && settled(series.g2_0)) {
            series.converged = true;
            series.convergence_time = ev.time();
            break;
        }
    }
    return {ev.state(), series};
}

std::vector<double> g2_tau(const QuantumState& steady, const DimensionlessParams& p,
                           const GridSpec& g, const std::vector<double>& taus) {
    if (taus.empty()) return {};
    const int n = steady.n;
    const double h = g.h(p.d);
    const auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };

    // steady transmitted intensity (g2 denominator)
    const cdouble theta_d = 0.5 * (steady.theta_cur[n - 1] + steady.theta_cur[n - 2]);
    double int_col = 0.0;
    for (int j = 1; j + 1 < n; ++j)
        int_col += abs2(0.5 * (steady.phi_cur[idx(j, n - 1)] + steady.phi_cur[idx(j, n - 2)]));
    int_col *= h;
    const double i_ss = 2.0 * abs2(theta_d) + 8.0 * int_col;
    if (i_ss * i_ss < 1e-60)
        throw NumericalError("g2_tau: steady transmitted intensity ~ 0");

    // collapsed state: theta_new(y) = 2 sqrt(2) phi(d, y), eps_new = sqrt(2) theta(d)
    Evolver ev(p, g);
    QuantumState& s = ev.state();
    for (int j = 0; j < n; ++j) {
        s.theta_cur[j] = std::numbers::sqrt2 *
                         (steady.phi_cur[idx(n - 1, j)] + steady.phi_cur[idx(n - 2, j)]);
        s.theta_prev[j] = std::numbers::sqrt2 *
                          (steady.phi_prev[idx(n - 1, j)] + steady.phi_prev[idx(n - 2, j)]);
    }
    s.eps = (steady.theta_cur[n - 1] + steady.theta_cur[n - 2]) / std::numbers::sqrt2;

    auto transmitted_intensity = [&]() {
        const cdouble td = 0.5 * (s.theta_cur[n - 1] + s.theta_cur[n - 2]);
        return 2.0 * abs2(td);
    };

    std::vector<double> sorted_taus = taus;
    std::sort(sorted_taus.begin(), sorted_taus.end());
    std::vector<double> result(taus.size());

    double t = 0.0;
    std::vector<double> samples;
    samples.reserve(sorted_taus.size());
    for (const double tau : sorted_taus) {
        while (t + 0.5 * ev.dt() < tau) {
            ev.step_theta_only();
            t += ev.dt();
        }
        samples.push_back(transmitted_intensity() / (i_ss * i_ss));
    }
    // map back to the caller's order
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const auto it = std::lower_bound(sorted_taus.begin(), sorted_taus.end(), taus[i]);
        result[i] = samples[static_cast<std::size_t>(it - sorted_taus.begin())];
    }
    return result;
}

SpectrumTable correlation_vs_kappa(const DimensionlessParams& p_template, const GridSpec& g,
                                   const std::vector<double>& kappa_values,
                                   const SteadyOptions& opts, std::atomic_bool* cancel,
                                   const std::function<void(std::size_t)>& progress,
                                   int workers) {
    if (kappa_values.empty()) throw ConfigError("correlation_vs_kappa: empty sweep");
    SpectrumTable table("kappa", kappa_values);
    table.add_column("g2_0");
    table.add_column("T1");
    table.add_column("T2");
    table.add_column("converged");
    table.set_metadata("solver", "quantum.correlation_vs_kappa");
    table.set_metadata("d", p_template.d);
    const double delta0 = sqr(kPi / p_template.d);
    table.set_metadata("delta", delta0);

    struct Cell {
        double g2 = 0.0, t1 = 0.0, t2 = 0.0;
        bool converged = false, valid = false;
    };
    std::vector<Cell> cells(kappa_values.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= kappa_values.size()) return;
            if (cancel && cancel->load()) return;
            DimensionlessParams p = p_template;
            p.kappa = cdouble(kappa_values[i], p_template.kappa.imag());
            p.delta = delta0;
            try {
                const auto [state, series] = evolve_to_steady(p, g, opts);
                (void)state;
                cells[i] = {series.g2_0.back(), series.t1.back(), series.t2.back(),
                            series.converged, true};
            } catch (const NumericalError&) {
                cells[i].valid = false;
            }
            if (progress) progress(i);
        }
    };
    const int nw = std::max(1, std::min<int>(workers, static_cast<int>(kappa_values.size())));
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    // merge in axis order regardless of completion order
    for (std::size_t i = 0; i < kappa_values.size(); ++i) {
        if (!cells[i].valid) {
            table.set("converged", i, 0.0);
            continue;
        }
        table.set("g2_0", i, cells[i].g2);
        table.set("T1", i, cells[i].t1);
        table.set("T2", i, cells[i].t2);
        table.set("converged", i, cells[i].converged ? 1.0 : 0.0);
    }
    return table;
}

} // namespace quantum
} // namespace nlse
