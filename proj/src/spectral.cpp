#include "nlse/spectral.hpp"

#include "nlse/spectrum_table.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

namespace nlse {
namespace spectral {

namespace {

constexpr double kPi = std::numbers::pi;

double round_to_int(double x) { return std::round(x); }

// log of the right-hand side of the transcendental equation for particle i:
//   2 log((ki+1)/(ki-1)) + sum_{j != i} log[(ki-kj+ik)(ki+kj+ik) / ((ki-kj-ik)(ki+kj-ik))]
cdouble log_rhs(const std::vector<cdouble>& ks, std::size_t i, cdouble kappa) {
    const cdouble ki = ks[i];
    const cdouble ik = I * kappa;
    cdouble acc = 2.0 * std::log((ki + 1.0) / (ki - 1.0));
    for (std::size_t j = 0; j < ks.size(); ++j) {
        if (j == i) continue;
        const cdouble kj = ks[j];
        acc += std::log(ki - kj + ik) + std::log(ki + kj + ik);
        acc -= std::log(ki - kj - ik) + std::log(ki + kj - ik);
    }
    return acc;
}

std::vector<double> branch_integers(const std::vector<cdouble>& ks, double d, cdouble kappa) {
    std::vector<double> ns(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const cdouble f = 2.0 * I * ks[i] * d - log_rhs(ks, i, kappa);
        ns[i] = round_to_int((f / (2.0 * I * kPi)).real());
    }
    return ns;
}

// F_i = 2 i k_i d - log_rhs_i - 2 pi i n_i with fixed branch integers
void system_f(const std::vector<cdouble>& ks, double d, cdouble kappa,
              const std::vector<double>& ns, Eigen::VectorXcd& f) {
    const auto n = static_cast<Eigen::Index>(ks.size());
    f.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        f(i) = 2.0 * I * ks[i] * d - log_rhs(ks, i, kappa) - 2.0 * kPi * I * ns[i];
}

void system_jacobian(const std::vector<cdouble>& ks, double d, cdouble kappa,
                     Eigen::MatrixXcd& jac) {
    const auto n = static_cast<Eigen::Index>(ks.size());
    const cdouble ik = I * kappa;
    jac.setZero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const cdouble ki = ks[i];
        cdouble dii = 2.0 * I * d - (2.0 / (ki + 1.0) - 2.0 / (ki - 1.0));
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const cdouble kj = ks[j];
            dii -= 1.0 / (ki - kj + ik) + 1.0 / (ki + kj + ik)
                 - 1.0 / (ki - kj - ik) - 1.0 / (ki + kj - ik);
            jac(i, j) = -(-1.0 / (ki - kj + ik) + 1.0 / (ki + kj + ik)
                          + 1.0 / (ki - kj - ik) - 1.0 / (ki + kj - ik));
        }
        jac(i, i) = dii;
    }
}

struct NewtonResult {
    std::vector<cdouble> ks;
    double residual;
    bool converged;
};

NewtonResult newton_polish(std::vector<cdouble> ks, double d, cdouble kappa, int max_iter = 200) {
    const auto ns = branch_integers(ks, d, kappa);
    Eigen::VectorXcd f, step;
    Eigen::MatrixXcd jac;
    system_f(ks, d, kappa, ns, f);
    double fn = f.lpNorm<Eigen::Infinity>();
    std::vector<cdouble> best_ks = ks;
    double best_fn = fn;
    int since_best = 0;
    for (int it = 0; it < max_iter; ++it) {
        if (fn < 1e-12) break;
        system_jacobian(ks, d, kappa, jac);
        step = jac.partialPivLu().solve(-f);
        if (!step.allFinite()) break;
        // line search, but accept the full step if nothing improves: the log
        // form has steep walls near its pole factors that a strictly monotone
        // iteration cannot cross
        double damping = 1.0;
        bool improved = false;
        std::vector<cdouble> trial(ks.size());
        for (int half = 0; half < 20; ++half) {
            for (std::size_t i = 0; i < ks.size(); ++i)
                trial[i] = ks[i] + damping * step(static_cast<Eigen::Index>(i));
            Eigen::VectorXcd ft;
            system_f(trial, d, kappa, ns, ft);
            const double ftn = ft.lpNorm<Eigen::Infinity>();
            if (std::isfinite(ftn) && ftn < fn) {
                ks = trial;
                f = ft;
                fn = ftn;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!improved) {
            for (std::size_t i = 0; i < ks.size(); ++i)
                ks[i] += step(static_cast<Eigen::Index>(i));
            system_f(ks, d, kappa, ns, f);
            fn = f.lpNorm<Eigen::Infinity>();
            if (!std::isfinite(fn)) {
                ks = best_ks;
                fn = best_fn;
                break;
            }
        }
        if (fn < best_fn) {
            best_fn = fn;
            best_ks = ks;
            since_best = 0;
        } else if (++since_best > 25) {
            break;
        }
    }
    if (best_fn < fn) {
        ks = best_ks;
        fn = best_fn;
    }
    return {ks, fn, fn < 1e-9};
}

bool near_trivial_manifold(const std::vector<cdouble>& ks) {
    const double tol = 1e-8;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (std::abs(ks[i]) < tol) return true;
        for (std::size_t j = i + 1; j < ks.size(); ++j)
            if (std::abs(ks[i] - ks[j]) < tol || std::abs(ks[i] + ks[j]) < tol) return true;
    }
    return false;
}

cdouble energy_of(const std::vector<cdouble>& ks) {
    cdouble e = 0.0;
    for (const cdouble k : ks) e += k * k;
    return e;
}

EigenSolution make_solution(std::vector<cdouble> ks, double d, cdouble kappa, double residual,
                            Branch branch) {
    EigenSolution sol;
    sol.energy = energy_of(ks);
    sol.ks = std::move(ks);
    sol.branch = branch;
    sol.residual = residual;
    sol.d = d;
    sol.kappa = kappa;
    return sol;
}

// wavefunction scale test on a coarse grid: trivial roots produce phi that is
// zero everywhere relative to the size of its largest term
bool wavefunction_is_trivial(const std::vector<cdouble>& ks, double d, cdouble kappa) {
    if (ks.size() != 2) return false;
    const cdouble k1 = ks[0], k2 = ks[1];
    const cdouble t = (k1 - k2 + I * kappa) / (k1 - k2 - I * kappa);
    const cdouble ca = 4.0 / (k1 - 1.0) * std::exp(I * k2 * d) / (k2 + 1.0);
    const cdouble cb = 4.0 / (t * (k2 - 1.0)) * std::exp(I * k1 * d) / (k1 + 1.0);
    double max_phi = 0.0, max_term = 0.0;
    for (int a = 1; a <= 5; ++a) {
        for (int b = a; b <= 5; ++b) {
            const double z1 = d * a / 6.0, z2 = d * b / 6.0;
            const cdouble ta = ca * eta(k1, z1) * eta(k2, d - z2);
            const cdouble tb = cb * eta(k2, z1) * eta(k1, d - z2);
            max_phi = std::max(max_phi, std::abs(ta + tb));
            max_term = std::max({max_term, std::abs(ta), std::abs(tb)});
        }
    }
    return max_phi < 1e-10 * max_term;
}

Branch classify_bound(double d, cdouble p, double kappa_mag) {
    // nearest ladder: type I p = 2 n pi/d, type II p = sqrt(2) n pi/d
    (void)kappa_mag;
    const double pr = std::abs(p.real()) * d / kPi;
    const int ni = std::max(1, static_cast<int>(std::lround(pr / 2.0)));
    const int nii = std::max(1, static_cast<int>(std::lround(pr / std::numbers::sqrt2)));
    const double di = std::abs(pr - 2.0 * ni);
    const double dii = std::abs(pr - std::numbers::sqrt2 * nii);
    Branch b;
    if (std::abs(di - dii) < 0.05 * std::max(di, dii)) {
        b.kind = Branch::Kind::ambiguous;
        b.n = ni;
    } else if (di < dii) {
        b.kind = Branch::Kind::bound_type_i;
        b.n = ni;
    } else {
        b.kind = Branch::Kind::bound_type_ii;
        b.n = nii;
    }
    return b;
}

} // namespace

std::string Branch::label() const {
    switch (kind) {
        case Kind::single: return "single(" + std::to_string(n) + ")";
        case Kind::fermionized:
            return "fermionized(" + std::to_string(m) + "," + std::to_string(n) + ")";
        case Kind::bound_type_i: return "bound_I(" + std::to_string(n) + ")";
        case Kind::bound_type_ii: return "bound_II(" + std::to_string(n) + ")";
        case Kind::many_body: return "many_body";
        case Kind::ambiguous: return "ambiguous(" + std::to_string(n) + ")";
    }
    return "?";
}

cdouble eta(cdouble k, double z) { return std::sin(k * z) + I * k * std::cos(k * z); }

cdouble mode_norm_a2(cdouble k, double d) {
    return 4.0 * k / (2.0 * d * k * (1.0 + k * k) + (k * k - 1.0) * std::sin(2.0 * d * k));
}

cdouble single_mode_root(double d, int n) {
    if (n < 1) throw ConfigError("single_mode_root: n must be >= 1");
    cdouble k(n * kPi / d, -2.0 * n * kPi / (d * d));
    // branch integer from the seed, then 1D Newton on the half-equation
    const cdouble f0 = I * k * d - std::log((k + 1.0) / (k - 1.0));
    const double m = round_to_int((f0 / (I * kPi)).real());
    for (int it = 0; it < 80; ++it) {
        const cdouble f = I * k * d - std::log((k + 1.0) / (k - 1.0)) - I * kPi * m;
        const cdouble df = I * d + 2.0 / (k * k - 1.0);
        const cdouble step = f / df;
        k -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(k))) break;
    }
    if (single_equation_residual(k, d) > 1e-9)
        throw NonConvergence("single_mode_root failed for n = " + std::to_string(n) +
                             " (seed " + format_double(n * kPi / d) + ")");
    return k;
}

double single_equation_residual(cdouble k, double d) {
    const cdouble lhs = std::exp(2.0 * I * k * d);
    const cdouble r = (k + 1.0) / (k - 1.0);
    return std::abs(lhs - r * r);
}

double system_residual(const std::vector<cdouble>& ks, double d, cdouble kappa) {
    const auto ns = branch_integers(ks, d, kappa);
    Eigen::VectorXcd f;
    system_f(ks, d, kappa, ns, f);
    return f.lpNorm<Eigen::Infinity>();
}

std::vector<EigenSolution> single_particle_modes(double d, int n_max) {
    if (!(d > 0.0)) throw ConfigError("single_particle_modes: d must be > 0");
    if (n_max < 1) throw ConfigError("single_particle_modes: n_max must be >= 1");
    std::vector<EigenSolution> out;
    out.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) {
        const cdouble k = single_mode_root(d, n);
        Branch b;
        b.kind = Branch::Kind::single;
        b.n = n;
        out.push_back(make_solution({k}, d, 0.0, single_equation_residual(k, d), b));
    }
    std::sort(out.begin(), out.end(),
              [](const EigenSolution& a, const EigenSolution& b) {
                  return a.ks[0].real() < b.ks[0].real();
              });
    return out;
}

EigenSolution many_body_roots(int n_particles, double d, cdouble kappa,
                              const std::vector<cdouble>& seed) {
    if (n_particles < 2 || n_particles > 3)
        throw ConfigError("many_body_roots: N must be 2 or 3");
    if (static_cast<int>(seed.size()) != n_particles)
        throw ConfigError("many_body_roots: seed size mismatch");
    if (near_trivial_manifold(seed))
        throw ConfigError("many_body_roots: seed on a trivial manifold (k_i = 0 or k_i = +-k_j)");

    const NewtonResult res = newton_polish(seed, d, kappa);
    if (!res.converged)
        throw NonConvergence("many_body_roots: Newton stalled, residual = " +
                             format_double(res.residual));
    if (near_trivial_manifold(res.ks))
        throw ConvergedToTrivial("many_body_roots: converged to a trivial manifold");
    if (n_particles == 2 && wavefunction_is_trivial(res.ks, d, kappa))
        throw ConvergedToTrivial("many_body_roots: wavefunction vanishes identically");

    Branch b;
    b.kind = Branch::Kind::many_body;
    return make_solution(res.ks, d, kappa, res.residual, b);
}

EigenSolution two_particle_roots(double d, cdouble kappa, std::pair<cdouble, cdouble> seed) {
    return many_body_roots(2, d, kappa, {seed.first, seed.second});
}

EigenSolution fermionized_root(double d, double kappa, int m, int n) {
    if (m == n) throw ConfigError("fermionized_root: mode indices must differ");
    const cdouble sm = single_mode_root(d, m);
    const cdouble sn = single_mode_root(d, n);
    // for weak interaction the non-interacting seed is inside the basin;
    // otherwise ramp kappa
    std::vector<cdouble> ks = {sm, sn};
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(kappa) * d / 4.0)));
    for (int s = 1; s <= steps; ++s) {
        const cdouble kap = kappa * (static_cast<double>(s) / steps);
        const NewtonResult res = newton_polish(ks, d, kap);
        if (!res.converged)
            throw NonConvergence("fermionized_root: continuation stalled at kappa = " +
                                 format_double(kap.real()));
        ks = res.ks;
    }
    Branch b;
    b.kind = Branch::Kind::fermionized;
    b.m = m;
    b.n = n;
    const NewtonResult fin = newton_polish(ks, d, kappa);
    return make_solution(fin.ks, d, kappa, fin.residual, b);
}

double bound_state_energy_estimate(double d, double kappa_mag, int n, BoundType type) {
    if (!(kappa_mag > 0.0)) throw ConfigError("bound estimate needs |kappa| > 0");
    if (n < 1) throw ConfigError("bound estimate: n must be >= 1");
    const double com = sqr(n * kPi / d);
    return (type == BoundType::I ? 2.0 * com : com) - 0.5 * kappa_mag * kappa_mag;
}

namespace {

// asymptotic bound seed: k = p/2 +- q/2 with q = -i kappa + c and c the
// exponentially small offset of the (q + i kappa) pole factor
std::vector<cdouble> bound_seed(double d, double kappa, double p0, int sign) {
    const double km = std::abs(kappa);
    const cdouble q0 = I * km;
    const cdouble ka = 0.5 * p0 + 0.5 * q0;
    const cdouble kb = 0.5 * p0 - 0.5 * q0;
    const cdouble g = ((ka - 1.0) * (kb + 1.0)) / ((ka + 1.0) * (kb - 1.0));
    const cdouble c = static_cast<double>(sign) * (q0 - I * kappa) * g * std::exp(I * q0 * d);
    const cdouble q = -I * kappa + c;
    return {0.5 * (p0 + q), 0.5 * (p0 - q)};
}

struct BoundCandidate {
    std::vector<cdouble> ks;
    double residual;
};

std::optional<BoundCandidate> try_bound(double d, double kappa, double p0) {
    std::optional<BoundCandidate> best;
    for (int sign : {+1, -1}) {
        const auto seed = bound_seed(d, kappa, p0, sign);
        if (near_trivial_manifold(seed)) continue;
        const NewtonResult res = newton_polish(seed, d, kappa);
        if (!res.converged || near_trivial_manifold(res.ks)) continue;
        // must still look bound: imaginary parts of opposite sign, size ~ |kappa|/2
        const double i1 = res.ks[0].imag(), i2 = res.ks[1].imag();
        if (i1 * i2 >= 0.0) continue;
        const double km = std::abs(kappa);
        if (std::abs(std::abs(i1 - i2) - km) > 0.6 * km) continue;
        const double dist = std::abs(res.ks[0] + res.ks[1] - p0);
        if (!best || dist < std::abs(best->ks[0] + best->ks[1] - p0))
            best = BoundCandidate{res.ks, res.residual};
    }
    return best;
}

// reference interaction strength where the seed basins are clean and the whole
// center-of-mass ladder is reachable from asymptotic seeds
constexpr double kBoundScanKd = 12.0;

// pole-aware continuation along a bound branch: every step reseeds the
// exponentially small (q + i kappa) factor instead of extrapolating through it
BoundCandidate bound_continue(double d, std::vector<cdouble> ks, double kap_from,
                              double kap_to) {
    const int steps =
        std::max(1, static_cast<int>(std::ceil(std::abs(kap_to - kap_from) * d / 0.5)));
    double kap_prev = kap_from;
    NewtonResult res{ks, 0.0, true};
    for (int s = 1; s <= steps; ++s) {
        const double kap = kap_from + (kap_to - kap_from) * (static_cast<double>(s) / steps);
        const double p_prev = (res.ks[0] + res.ks[1]).real();
        bool ok = false;
        for (int sign : {+1, -1}) {
            const auto seed = bound_seed(d, kap, p_prev, sign);
            const NewtonResult attempt = newton_polish(seed, d, kap);
            if (!attempt.converged || near_trivial_manifold(attempt.ks)) continue;
            const double move = std::abs(attempt.ks[0] + attempt.ks[1] - p_prev);
            if (move > 0.6 * kPi / d) continue; // jumped to a neighbor rung
            res = attempt;
            ok = true;
            break;
        }
        if (!ok)
            throw NonConvergence("bound branch continuation stalled at kappa = " +
                                 format_double(kap));
        kap_prev = kap;
    }
    (void)kap_prev;
    return {res.ks, res.residual};
}

std::vector<EigenSolution> bound_scan_at(double d, double kappa, double p_max) {
    std::vector<EigenSolution> out;
    for (double p0 = 0.6 * kPi / d; p0 <= p_max; p0 += 0.5 * kPi / d) {
        auto c = try_bound(d, kappa, p0);
        if (!c) continue;
        bool dup = false;
        for (const auto& sol : out)
            if (std::abs(sol.ks[0] - c->ks[0]) < 1e-6 || std::abs(sol.ks[0] - c->ks[1]) < 1e-6)
                dup = true;
        if (dup) continue;
        const cdouble p = c->ks[0] + c->ks[1];
        out.push_back(make_solution(c->ks, d, kappa, c->residual,
                                    classify_bound(d, p, std::abs(kappa))));
    }
    std::sort(out.begin(), out.end(), [](const EigenSolution& a, const EigenSolution& b) {
        return (a.ks[0] + a.ks[1]).real() < (b.ks[0] + b.ks[1]).real();
    });
    return out;
}

} // namespace

EigenSolution bound_root(double d, double kappa, int n, BoundType type) {
    if (!(kappa < 0.0)) throw ConfigError("bound_root: needs attractive kappa < 0");
    if (n < 1) throw ConfigError("bound_root: n must be >= 1");
    const double p0 = (type == BoundType::I ? 2.0 : std::numbers::sqrt2) * n * kPi / d;

    // identify the branch on the reference ladder, then track it to the target
    const double kap_ref = -kBoundScanKd / d;
    const auto ladder = bound_scan_at(d, kap_ref, p0 + 3.0 * kPi / d);
    const EigenSolution* pick = nullptr;
    double best = 1e300;
    for (const auto& sol : ladder) {
        const double dist = std::abs((sol.ks[0] + sol.ks[1]).real() - p0);
        if (dist < best) {
            best = dist;
            pick = &sol;
        }
    }
    if (!pick || best > 0.9 * kPi / d)
        throw NonConvergence("bound_root: no ladder root near p = " + format_double(p0));

    BoundCandidate c{pick->ks, pick->residual};
    if (std::abs(kappa - kap_ref) > 1e-14)
        c = bound_continue(d, c.ks, kap_ref, kappa);

    Branch b;
    b.kind = (type == BoundType::I ? Branch::Kind::bound_type_i : Branch::Kind::bound_type_ii);
    b.n = n;
    return make_solution(c.ks, d, kappa, c.residual, b);
}

std::vector<EigenSolution> bound_roots_scan(double d, double kappa, double p_max) {
    if (!(kappa < 0.0)) throw ConfigError("bound_roots_scan: needs attractive kappa < 0");
    if (std::abs(kappa) * d <= kBoundScanKd) return bound_scan_at(d, kappa, p_max);
    // strong binding: enumerate on the reference ladder, continue each rung up
    const double kap_ref = -kBoundScanKd / d;
    std::vector<EigenSolution> out;
    for (const auto& sol : bound_scan_at(d, kap_ref, p_max)) {
        try {
            const BoundCandidate c = bound_continue(d, sol.ks, kap_ref, kappa);
            const cdouble p = c.ks[0] + c.ks[1];
            out.push_back(make_solution(c.ks, d, kappa, c.residual,
                                        classify_bound(d, p, std::abs(kappa))));
        } catch (const NonConvergence&) {
            // rung lost along the way; skip it
        }
    }
    return out;
}

std::vector<EigenSolution> root_continuation(double d, const std::vector<cdouble>& kappa_path,
                                             const EigenSolution& start) {
    if (start.residual > 1e-9)
        throw ConfigError("root_continuation: start residual too large");
    std::vector<EigenSolution> out;
    out.reserve(kappa_path.size());
    std::vector<cdouble> prev = start.ks, prev2 = start.ks;
    cdouble kap_prev = start.kappa;
    bool have_two = false;

    auto is_bound_pair = [](const std::vector<cdouble>& ks, cdouble kap) {
        if (ks.size() != 2 || std::abs(kap.imag()) > 1e-12 || kap.real() >= 0.0) return false;
        const double i1 = ks[0].imag(), i2 = ks[1].imag();
        return i1 * i2 < 0.0 && std::abs(std::abs(i1 - i2) - std::abs(kap.real())) <
                                    0.6 * std::abs(kap.real());
    };

    for (const cdouble kap : kappa_path) {
        // secant predictor: reuse the previous step's root displacement
        std::vector<cdouble> seed(prev.size());
        double pred_norm = 0.0;
        for (std::size_t i = 0; i < prev.size(); ++i) {
            const cdouble slope = have_two ? prev[i] - prev2[i] : cdouble(0.0, 0.0);
            seed[i] = prev[i] + slope;
            pred_norm = std::max(pred_norm, std::abs(slope));
        }
        NewtonResult res{seed, 1e300, false};
        if (is_bound_pair(prev, kap_prev)) {
            // a bound pair carries an exponentially small pole offset in
            // k1 - k2 + i kappa that a linear predictor cannot follow; reseed
            // it from the asymptotic form at the predicted center of mass
            const double p_pred = (seed[0] + seed[1]).real();
            for (int sign : {+1, -1}) {
                const auto bseed = bound_seed(d, kap.real(), p_pred, sign);
                const NewtonResult attempt = newton_polish(bseed, d, kap);
                if (attempt.converged && !near_trivial_manifold(attempt.ks) &&
                    std::abs(attempt.ks[0] + attempt.ks[1] - p_pred) < 0.6 * kPi / d) {
                    res = attempt;
                    break;
                }
            }
        }
        if (!res.converged) res = newton_polish(seed, d, kap);
        if (!res.converged)
            throw NonConvergence("root_continuation: no convergence at kappa = " +
                                 format_double(kap.real()));
        double jump = 0.0;
        for (std::size_t i = 0; i < prev.size(); ++i)
            jump = std::max(jump, std::abs(res.ks[i] - seed[i]));
        const double allowed =
            10.0 * std::max(pred_norm, 1e-3 * (1.0 + std::abs(kap - kap_prev) * d));
        if (have_two && jump > allowed)
            throw BranchJump("root_continuation: jump " + format_double(jump) +
                             " exceeds 10x step prediction at kappa = " +
                             format_double(kap.real()));
        prev2 = prev;
        prev = res.ks;
        kap_prev = kap;
        have_two = true;
        out.push_back(make_solution(res.ks, d, kap, res.residual, start.branch));
    }
    return out;
}

WavefunctionGrid2D::WavefunctionGrid2D(std::vector<double> grid) : grid_(std::move(grid)) {
    if (grid_.size() < 2) throw ConfigError("wavefunction grid too small");
    values_.assign(grid_.size() * grid_.size(), cdouble(0.0, 0.0));
}

void WavefunctionGrid2D::set(std::size_t i, std::size_t j, cdouble v) {
    values_[i * grid_.size() + j] = v;
    values_[j * grid_.size() + i] = v;
}

double WavefunctionGrid2D::max_abs() const {
    double m = 0.0;
    for (const cdouble v : values_) m = std::max(m, std::abs(v));
    return m;
}

double WavefunctionGrid2D::diagonal_fraction() const {
    const std::size_t n = grid_.size();
    auto weight = [&](std::size_t i) {
        if (i == 0) return 0.5 * (grid_[1] - grid_[0]);
        if (i == n - 1) return 0.5 * (grid_[n - 1] - grid_[n - 2]);
        return 0.5 * (grid_[i + 1] - grid_[i - 1]);
    };
    double diag = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diag += abs2(at(i, i)) * weight(i);
        for (std::size_t j = 0; j < n; ++j) total += abs2(at(i, j)) * weight(i) * weight(j);
    }
    return diag / total;
}

WavefunctionGrid2D two_particle_wavefunction(const EigenSolution& sol,
                                             const std::vector<double>& grid) {
    if (sol.ks.size() != 2) throw ConfigError("two_particle_wavefunction: need 2 wavenumbers");
    const cdouble k1 = sol.ks[0], k2 = sol.ks[1];
    const cdouble kappa = sol.kappa;
    const double d = sol.d;
    const cdouble t = (k1 - k2 + I * kappa) / (k1 - k2 - I * kappa);
    const cdouble ca = 4.0 / (k1 - 1.0) * std::exp(I * k2 * d) / (k2 + 1.0);
    const cdouble cb = 4.0 / (t * (k2 - 1.0)) * std::exp(I * k1 * d) / (k1 + 1.0);

    WavefunctionGrid2D wf(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i; j < grid.size(); ++j) {
            const double z1 = grid[i], z2 = grid[j]; // z1 <= z2 triangle
            const cdouble v = ca * eta(k1, z1) * eta(k2, d - z2)
                            + cb * eta(k2, z1) * eta(k1, d - z2);
            wf.set(i, j, v);
        }
    }
    const double peak = wf.max_abs();
    if (!(peak > 0.0) || !std::isfinite(peak))
        throw ConvergedToTrivial("two_particle_wavefunction: vanishing wavefunction");
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i; j < grid.size(); ++j)
            wf.set(i, j, wf.at(i, j) / peak);
    return wf;
}

cdouble hardcore_wavefunction(const std::vector<cdouble>& ks, const std::vector<double>& zs) {
    if (ks.size() != zs.size())
        throw ConfigError("hardcore_wavefunction: ks/zs dimension mismatch");
    const auto n = static_cast<Eigen::Index>(ks.size());
    Eigen::MatrixXcd mat(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index c = 0; c < n; ++c) mat(j, c) = eta(ks[j], zs[c]);
    cdouble pref = 1.0;
    for (const cdouble k : ks) pref /= (k - 1.0);
    return pref * mat.determinant();
}

cdouble gaudin_wavefunction(const EigenSolution& sol, const std::vector<double>& zs_in) {
    const std::size_t n = sol.ks.size();
    if (n != zs_in.size()) throw ConfigError("gaudin_wavefunction: dimension mismatch");
    if (n > 3) throw ConfigError("gaudin_wavefunction: N <= 3 only");
    std::vector<double> zs = zs_in;
    std::sort(zs.begin(), zs.end()); // symmetric continuation

    const cdouble kappa = sol.kappa;
    std::vector<int> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);

    cdouble total = 0.0;
    const int two_n = 1 << n;
    for (int eps_bits = 0; eps_bits < two_n; ++eps_bits) {
        std::vector<double> eps(n);
        for (std::size_t i = 0; i < n; ++i) eps[i] = (eps_bits >> i) & 1 ? -1.0 : 1.0;
        // A_eps
        cdouble a_eps = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cdouble em = eps[i] * sol.ks[i];
            if (std::abs(em) < 1e-14)
                throw NumericalError("gaudin coefficient pole: eps_m k_m = 0");
            a_eps *= (1.0 - 1.0 / em);
            for (std::size_t j = i + 1; j < n; ++j) {
                const cdouble s = eps[i] * sol.ks[i] + eps[j] * sol.ks[j];
                if (std::abs(s) < 1e-14)
                    throw NumericalError("gaudin coefficient pole: eps_i k_i + eps_j k_j = 0");
                a_eps *= (1.0 - I * kappa / s);
            }
        }
        std::vector<int> p = perm;
        do {
            // B_P for this sign assignment
            cdouble b_p = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    const cdouble diff = eps[p[i]] * sol.ks[p[i]] - eps[p[j]] * sol.ks[p[j]];
                    if (std::abs(diff) < 1e-14)
                        throw NumericalError("gaudin coefficient pole: coinciding momenta");
                    b_p *= (1.0 + I * kappa / diff);
                }
            }
            cdouble phase = 0.0;
            for (std::size_t i = 0; i < n; ++i) phase += eps[p[i]] * sol.ks[p[i]] * zs[i];
            total += a_eps * b_p * std::exp(I * phase);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    return total;
}

} // namespace spectral
} // namespace nlse
