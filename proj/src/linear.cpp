#include "nlse/linear.hpp"

#include <cmath>
#include <numbers>

namespace nlse {
namespace linear {

namespace {

constexpr double kPi = std::numbers::pi;

// g(w) = 2i cos(w s) + (1+delta) sin(w s)/s with s = sqrt(delta); the common
// factor s of the numerator/denominator is divided out so delta -> 0 is regular.
cdouble g_factor(double delta, double w) {
    if (std::abs(delta) < 1e-24) return 2.0 * I + (1.0 + delta) * w;
    const cdouble s = std::sqrt(cdouble(delta, 0.0));
    return 2.0 * I * std::cos(w * s) + (1.0 + delta) * std::sin(w * s) / s;
}

// g(w) * exp(-y w) for delta = -y^2 < 0, evaluated without overflow.
cdouble g_scaled_neg(double delta, double w) {
    const double y = std::sqrt(-delta);
    const double e2 = std::exp(-2.0 * y * w);
    return I * (1.0 + e2) + (1.0 + delta) * (1.0 - e2) / (2.0 * y);
}

void check_antiresonance(cdouble denom, double delta, double d) {
    const double scale = 2.0 + (1.0 + std::abs(delta)) * d;
    if (std::abs(denom) < 1e-12 * scale)
        throw AntiresonanceError("analytic profile: denominator ~ 0 at delta = " +
                                 format_double(delta));
}

} // namespace

FieldPair analytic_fields(double delta, double d, double z) {
    if (z < 0.0 || z > d)
        throw ConfigError("analytic profile: z outside [0, d]");
    const double w = d - z;
    if (delta >= -1e-24) {
        const cdouble gd = g_factor(delta, d);
        check_antiresonance(gd, delta, d);
        cdouble sinc_w;
        if (std::abs(delta) < 1e-24) {
            sinc_w = w;
        } else {
            const cdouble s = std::sqrt(cdouble(delta, 0.0));
            sinc_w = std::sin(w * s) / s;
        }
        return {g_factor(delta, w) / gd, (1.0 - delta) * sinc_w / gd};
    }
    // evanescent branch, scaled so nothing exceeds O(1)
    const double y = std::sqrt(-delta);
    const cdouble gd = g_scaled_neg(delta, d);
    check_antiresonance(gd, delta, d);
    const double damp = std::exp(-y * z);
    const cdouble plus = g_scaled_neg(delta, w) / gd * damp;
    const cdouble minus =
        (1.0 - delta) * (1.0 - std::exp(-2.0 * y * w)) / (2.0 * y) / gd * damp;
    return {plus, minus};
}

cdouble analytic_profile(const DimensionlessParams& p, double z) {
    return analytic_fields(p.delta, p.d, z).plus;
}

FieldPair analytic_tr(double delta, double d) {
    const FieldPair at_d = analytic_fields(delta, d, d);
    const FieldPair at_0 = analytic_fields(delta, d, 0.0);
    return {at_d.plus, at_0.minus};
}

Resonance resonance_and_width(double d, int n) {
    if (n < 1) throw ConfigError("resonance index must be >= 1");
    if (!(d > 0.0)) throw ConfigError("resonance_and_width: d must be > 0");
    Resonance r;
    r.delta0 = sqr(n * kPi / d);
    r.halfwidth = 0.5 * std::pow(n * kPi / d, 3.0);
    r.extrapolated = (n > 1);
    return r;
}

double polariton_number(const DimensionlessParams& p) {
    const double d = p.d;
    return sqr(d * d + kPi * kPi) / (4.0 * d * kPi * kPi) * abs2(p.alpha);
}

double alpha_sq_for_polariton_number(double n_pol, double d) {
    return n_pol * 4.0 * d * kPi * kPi / sqr(d * d + kPi * kPi);
}

double intracavity_energy(double delta, double d) {
    // midpoint rule; the fields are smooth and bounded after scaling
    const int n = 4096;
    const double h = d / n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const FieldPair f = analytic_fields(delta, d, (j + 0.5) * h);
        acc += abs2(f.plus) + abs2(f.minus);
    }
    return acc * h;
}

SpectrumTable analytic_spectrum(const DimensionlessParams& p, const std::vector<double>& deltas,
                                double beta) {
    if (deltas.empty()) throw ConfigError("analytic_spectrum: empty delta sweep");
    if (beta < 0.0) throw ConfigError("analytic_spectrum: beta must be >= 0");
    SpectrumTable table("delta", deltas);
    table.add_column("T2");
    table.add_column("R2");
    table.add_column("T2_lossless");
    table.set_metadata("solver", "linear.analytic");
    table.set_metadata("d", p.d);
    table.set_metadata("beta", beta);

    const double e_res = beta > 0.0 ? intracavity_energy(sqr(kPi / p.d), p.d) : 1.0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        try {
            const FieldPair tr = analytic_tr(deltas[i], p.d);
            const double t2 = abs2(tr.plus);
            double atten = 1.0;
            if (beta > 0.0)
                atten = std::exp(-beta * intracavity_energy(deltas[i], p.d) / e_res);
            table.set("T2_lossless", i, t2);
            table.set("T2", i, t2 * atten);
            table.set("R2", i, abs2(tr.minus));
        } catch (const AntiresonanceError&) {
            // masked point, sweep continues
        }
    }
    return table;
}

FieldPair two_mode_transfer(cdouble a_diag, cdouble b_off, double length) {
    // V(L) = exp(M L) V(0), M = [[iA, iB], [-iB, -iA]], M^2 = (B^2 - A^2) I.
    cdouble lam = std::sqrt(b_off * b_off - a_diag * a_diag);
    if (lam.real() < 0.0) lam = -lam;
    const cdouble ll = lam * length;

    cdouble w11_scaled, w10_scaled, scale_inv; // W = e^{lam L} * (scaled parts)
    if (std::abs(ll) < 1e-8) {
        // series: cosh ~ 1, sinh/lam ~ L
        w11_scaled = 1.0 - I * a_diag * length;
        w10_scaled = -I * b_off * length;
        scale_inv = 1.0;
    } else {
        const cdouble e2 = std::exp(-2.0 * ll);
        const cdouble ch = 0.5 * (1.0 + e2);
        const cdouble sh_over_lam = 0.5 * (1.0 - e2) / lam;
        w11_scaled = ch - I * a_diag * sh_over_lam;
        w10_scaled = -I * b_off * sh_over_lam;
        scale_inv = std::exp(-ll);
    }
    if (std::abs(w11_scaled) == 0.0)
        throw NumericalError("two_mode_transfer: singular transfer matrix");
    // det W = 1 (traceless generator), so T = 1/W11 and R = -W10/W11.
    return {scale_inv / w11_scaled, -w10_scaled / w11_scaled};
}

FieldPair transfer_tr(cdouble m, double delta, double d) {
    return two_mode_transfer(0.5 * delta + m, 0.5 * delta - m, d);
}

FieldPair transfer_fields(cdouble m, double delta, double d, double z) {
    if (z < 0.0 || z > d) throw ConfigError("transfer_fields: z outside [0, d]");
    // backward evolution from V(d) = (T, 0); every term carries exp(-lam z)
    // overall once the exponents are combined, so nothing overflows in a gap
    const cdouble a_diag = 0.5 * delta + m;
    const cdouble b_off = 0.5 * delta - m;
    cdouble lam = std::sqrt(b_off * b_off - a_diag * a_diag);
    if (lam.real() < 0.0) lam = -lam;
    const double u = d - z;

    auto scaled = [&](double len) { // cosh, sinh/lam times exp(-lam len)
        const cdouble ll = lam * len;
        if (std::abs(ll) < 1e-8)
            return std::pair<cdouble, cdouble>{1.0 - ll, cdouble(len, 0.0)};
        const cdouble e2 = std::exp(-2.0 * ll);
        return std::pair<cdouble, cdouble>{0.5 * (1.0 + e2), 0.5 * (1.0 - e2) / lam};
    };
    const auto [chd, shd] = scaled(d);
    const cdouble w11_scaled = chd - I * a_diag * shd;
    if (std::abs(w11_scaled) == 0.0)
        throw NumericalError("transfer_fields: singular transfer matrix");
    const auto [chu, shu] = scaled(u);
    const cdouble damp = std::exp(-lam * z); // exp(-lam d) * exp(lam u)
    const cdouble plus = damp * (chu - I * a_diag * shu) / w11_scaled;
    const cdouble minus = damp * (I * b_off * shu) / w11_scaled;
    return {plus, minus};
}

std::pair<double, double> transfer_peak(cdouble m, double d, int n) {
    const double delta0 = sqr(n * kPi / d);
    const double fwhm = 8.0 * kPi * kPi / (d * d * d);
    double lo = delta0 - 4.0 * n * fwhm, hi = delta0 + 4.0 * n * fwhm;
    auto f = [&](double x) { return abs2(transfer_tr(m, x, d).plus); };
    // golden-section maximization
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(delta0)); ++it) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = f(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

void SusceptibilityParams::validate() const {
    if (!(omega > 0.0)) throw ConfigError("susceptibility.omega must be > 0");
    if (!(length > 0.0)) throw ConfigError("susceptibility.length must be > 0");
    if (gamma0 < 0.0) throw ConfigError("susceptibility.gamma0 must be >= 0");
    if (eta && !(*eta > 0.0)) throw ConfigError("susceptibility.eta must be > 0");
}

Susceptibilities susceptibilities(const SusceptibilityParams& s, double delta3) {
    const cdouble gamma_prime = 0.5 - I * s.delta1 - I * delta3;
    const cdouble gamma_zero = s.gamma0 - I * delta3;
    const cdouble den = gamma_prime * gamma_zero + 2.0 * s.omega * s.omega;
    const double scale = std::abs(gamma_prime * gamma_zero) + 2.0 * s.omega * s.omega;
    if (std::abs(den) < 1e-14 * scale)
        throw NumericalError("susceptibility pole: Gamma' Gamma0 + 2 Omega^2 = 0");
    Susceptibilities out;
    out.chi_s = I * (gamma_prime * gamma_zero + s.omega * s.omega) / (gamma_prime * den);
    out.chi_c = -I * s.omega * s.omega / (gamma_prime * den);
    out.delta3_tilde = s.eta ? cdouble(delta3 / (2.0 * (*s.eta) * s.omega * s.omega), 0.0)
                             : cdouble(0.0, 0.0);
    return out;
}

SpectrumTable bandgap_spectrum(const SusceptibilityParams& s, const std::vector<double>& delta3s) {
    s.validate();
    if (delta3s.empty()) throw ConfigError("bandgap_spectrum: empty delta3 sweep");
    SpectrumTable table("delta3", delta3s);
    table.add_column("T2");
    table.add_column("R2");
    table.set_metadata("solver", "linear.bandgap");
    table.set_metadata("omega", s.omega);
    table.set_metadata("delta1", s.delta1);
    table.set_metadata("gamma0", s.gamma0);
    table.set_metadata("length", s.length);
    table.set_metadata("delta3_term", s.eta ? "kept" : "dropped");
    for (std::size_t i = 0; i < delta3s.size(); ++i) {
        try {
            const Susceptibilities chi = susceptibilities(s, delta3s[i]);
            const FieldPair tr =
                two_mode_transfer(chi.delta3_tilde + chi.chi_s, chi.chi_c, s.length);
            table.set("T2", i, abs2(tr.plus));
            table.set("R2", i, abs2(tr.minus));
        } catch (const NumericalError&) {
            // pole: masked point
        }
    }
    return table;
}

} // namespace linear
} // namespace nlse
