#include "nlse/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nlse/semiclassical.hpp"
#include "nlse/spectral.hpp"

namespace nlse {
namespace cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& bytes, RunManifest& manifest) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + (dir / name).string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    manifest.outputs.push_back({name, bytes.size(), fnv1a64(bytes)});
}

void write_table(const std::filesystem::path& dir, const std::string& stem,
                 const SpectrumTable& table, RunManifest& manifest) {
    write_file(dir, stem + ".csv", table.to_csv(), manifest);
    write_file(dir, stem + ".meta.json", table.metadata_json(), manifest);
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void run_linear(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                RunManifest& manifest) {
    const double delta0 = sqr(kPi / cfg.params.d);
    double lo = cfg.linear_block.delta_min, hi = cfg.linear_block.delta_max;
    if (lo == 0.0 && hi == 0.0) {
        lo = 0.05 * delta0;
        hi = 10.0 * delta0;
    }
    double beta = cfg.linear_block.beta;
    if (beta == 0.0 && cfg.from_physical) beta = loss_beta(*cfg.physical);
    const auto deltas = linspace(lo, hi, cfg.linear_block.points);
    SpectrumTable table = linear::analytic_spectrum(cfg.params, deltas, beta);
    table.set_metadata("run_id", cfg.run_id);
    write_table(dir, cfg.run_id + "_spectrum", table, manifest);
}

void run_bandgap(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                 RunManifest& manifest) {
    if (!cfg.from_physical)
        throw ConfigError("bandgap mode needs the physical parameter block");
    linear::SusceptibilityParams s;
    s.omega = cfg.physical->omega_over_gamma;
    s.delta1 = cfg.physical->delta1_over_gamma;
    s.gamma0 = cfg.physical->gamma0_over_gamma;
    s.length = cfg.physical->od;
    s.eta = cfg.bandgap_block.eta;
    const auto delta3s =
        linspace(cfg.bandgap_block.delta3_min, cfg.bandgap_block.delta3_max,
                 cfg.bandgap_block.points);
    SpectrumTable table = linear::bandgap_spectrum(s, delta3s);
    table.set_metadata("run_id", cfg.run_id);
    write_table(dir, cfg.run_id + "_spectrum", table, manifest);
}

void run_semiclassical(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                       RunManifest& manifest) {
    if (cfg.semiclassical_block.submode == "saturation") {
        SpectrumTable table =
            semiclassical::transmission_vs_photon_number(cfg.params,
                                                         cfg.semiclassical_block.photons);
        table.set_metadata("run_id", cfg.run_id);
        write_table(dir, cfg.run_id + "_saturation", table, manifest);
        return;
    }
    const double delta0 = sqr(kPi / cfg.params.d);
    const double hw = 0.5 * std::pow(kPi / cfg.params.d, 3.0);
    double lo = cfg.semiclassical_block.delta_min, hi = cfg.semiclassical_block.delta_max;
    if (lo == 0.0 && hi == 0.0) {
        lo = delta0 - 12.0 * hw;
        hi = delta0 + 12.0 * hw;
    }
    const auto deltas = linspace(lo, hi, cfg.semiclassical_block.points);
    SpectrumTable table = semiclassical::nonlinear_spectrum(
        cfg.params, deltas, cfg.semiclassical_block.intensities);
    table.set_metadata("run_id", cfg.run_id);
    // legend convention: intensity_to_polaritons records how legend intensities
    // map to first-resonance polariton numbers
    for (std::size_t j = 0; j < cfg.semiclassical_block.intensities.size(); ++j) {
        DimensionlessParams q = cfg.params;
        q.alpha = std::sqrt(cfg.semiclassical_block.intensities[j]);
        table.set_metadata("n_pol_" + std::to_string(j), linear::polariton_number(q));
    }
    write_table(dir, cfg.run_id + "_spectrum", table, manifest);
}

void run_modes(const ExperimentConfig& cfg, const std::filesystem::path& dir,
               RunManifest& manifest) {
    std::ostringstream csv;
    csv << "re_k,im_k,re_e,im_e,branch,residual\n";
    auto emit = [&](const spectral::EigenSolution& sol) {
        for (const cdouble k : sol.ks) {
            csv << format_double(k.real()) << ',' << format_double(k.imag()) << ','
                << format_double(sol.energy.real()) << ',' << format_double(sol.energy.imag())
                << ',' << csv_quote(sol.branch.label()) << ',' << format_double(sol.residual)
                << '\n';
        }
    };
    for (const auto& sol : spectral::single_particle_modes(cfg.params.d, cfg.modes_block.n_max))
        emit(sol);

    std::vector<spectral::EigenSolution> pair_solutions;
    for (const auto& req : cfg.modes_block.two_particle) {
        if (req.branch == "fermionized") {
            pair_solutions.push_back(
                spectral::fermionized_root(cfg.params.d, cfg.params.kappa.real(), req.m, req.n));
        } else {
            const auto type = req.branch == "bound_I" ? spectral::BoundType::I
                                                      : spectral::BoundType::II;
            pair_solutions.push_back(
                spectral::bound_root(cfg.params.d, cfg.params.kappa.real(), req.n, type));
        }
        emit(pair_solutions.back());
    }
    write_file(dir, cfg.run_id + "_modes.csv", csv.str(), manifest);

    if (cfg.modes_block.wavefunction_points > 1) {
        const auto grid =
            linspace(0.0, cfg.params.d, cfg.modes_block.wavefunction_points);
        for (std::size_t i = 0; i < pair_solutions.size(); ++i) {
            const auto wf = spectral::two_particle_wavefunction(pair_solutions[i], grid);
            std::ostringstream mat;
            for (std::size_t r = 0; r < wf.size(); ++r) {
                for (std::size_t c = 0; c < wf.size(); ++c) {
                    if (c) mat << ',';
                    mat << format_double(std::abs(wf.at(r, c)));
                }
                mat << '\n';
            }
            write_file(dir, cfg.run_id + "_wavefunction_" + std::to_string(i) + ".csv",
                       mat.str(), manifest);
        }
    }
}

void run_quantum(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                 RunManifest& manifest) {
    quantum::SteadyOptions opts;
    opts.horizon = cfg.horizon;
    opts.window = cfg.window;
    opts.tol = cfg.steady_tol;
    const auto [state, series] = quantum::evolve_to_steady(cfg.params, cfg.grid, opts);
    if (series.times.empty())
        throw NumericalError("quantum run produced no samples (horizon too short)");

    SpectrumTable obs("time", series.times);
    obs.add_column("T1");
    obs.add_column("T2");
    obs.add_column("g2_0");
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        obs.set("T1", i, series.t1[i]);
        obs.set("T2", i, series.t2[i]);
        obs.set("g2_0", i, series.g2_0[i]);
    }
    obs.set_metadata("solver", "quantum.evolve_to_steady");
    obs.set_metadata("converged", series.converged ? 1.0 : 0.0);
    obs.set_metadata("convergence_time", series.convergence_time);
    obs.set_metadata("d", cfg.params.d);
    obs.set_metadata("delta", cfg.params.delta);
    obs.set_metadata("kappa_re", cfg.params.kappa.real());
    obs.set_metadata("kappa_im", cfg.params.kappa.imag());
    obs.set_metadata("run_id", cfg.run_id);
    write_table(dir, cfg.run_id + "_observables", obs, manifest);

    const int n = state.n;
    const double h = cfg.grid.h(cfg.params.d);
    std::ostringstream theta_csv;
    theta_csv << "z,abs_theta,re_theta,im_theta\n";
    for (int j = 1; j + 1 < n; ++j) {
        const cdouble th = state.theta_cur[j];
        theta_csv << format_double((j - 0.5) * h) << ',' << format_double(std::abs(th)) << ','
                  << format_double(th.real()) << ',' << format_double(th.imag()) << '\n';
    }
    write_file(dir, cfg.run_id + "_theta.csv", theta_csv.str(), manifest);

    std::ostringstream phi_csv;
    for (int i = 1; i + 1 < n; ++i) {
        for (int j = 1; j + 1 < n; ++j) {
            if (j > 1) phi_csv << ',';
            phi_csv << format_double(std::abs(state.phi_cur[static_cast<std::size_t>(i) * n + j]));
        }
        phi_csv << '\n';
    }
    write_file(dir, cfg.run_id + "_phi.csv", phi_csv.str(), manifest);

    if (!cfg.taus.empty()) {
        const auto g2 = quantum::g2_tau(state, cfg.params, cfg.grid, cfg.taus);
        SpectrumTable tau_table("tau", cfg.taus);
        tau_table.add_column("g2");
        for (std::size_t i = 0; i < cfg.taus.size(); ++i) tau_table.set("g2", i, g2[i]);
        tau_table.set_metadata("solver", "quantum.g2_tau");
        tau_table.set_metadata("run_id", cfg.run_id);
        write_table(dir, cfg.run_id + "_g2tau", tau_table, manifest);
    }
}

ExperimentConfig cell_config(const ExperimentConfig& base, const std::string& axis, double value) {
    ExperimentConfig cell = base;
    if (axis == "dimensionless.kappa_re") {
        cell.params.kappa = cdouble(value, base.params.kappa.imag());
    } else if (axis == "dimensionless.kappa_im") {
        cell.params.kappa = cdouble(base.params.kappa.real(), value);
    } else if (axis == "dimensionless.delta") {
        cell.params.delta = value;
        cell.resonance_n.reset();
    } else if (axis == "dimensionless.alpha") {
        cell.params.alpha = value;
    } else if (axis == "dimensionless.d") {
        cell.params.d = value;
    } else if (axis == "physical.od") {
        PhysicalParams ph = *base.physical;
        ph.od = value;
        cell.physical = ph;
        cell.params = derive_dimensionless(ph, base.params.delta, base.params.alpha);
    } else if (axis == "physical.delta2_over_gamma") {
        PhysicalParams ph = *base.physical;
        ph.delta2_over_gamma = value;
        cell.physical = ph;
        cell.params = derive_dimensionless(ph, base.params.delta, base.params.alpha);
    } else {
        throw ConfigError("unsupported sweep axis: " + axis);
    }
    if (cell.resonance_n)
        cell.params.delta = sqr(*cell.resonance_n * kPi / cell.params.d);
    return cell;
}

void run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir,
               RunManifest& manifest) {
    const SweepBlock& sw = *cfg.sweep;
    SpectrumTable table(sw.axis, sw.values);
    table.add_column("T1");
    table.add_column("T2");
    table.add_column("g2_0");
    table.add_column("converged");
    table.set_metadata("solver", "sweep." + sw.target);
    table.set_metadata("run_id", cfg.run_id);

    struct Cell {
        double t1 = 0.0, t2 = 0.0, g2 = 0.0;
        bool converged = false, valid = false;
    };
    std::vector<Cell> cells(sw.values.size());
    std::atomic<std::size_t> cursor{0};
    std::atomic_bool cancel{false};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= sw.values.size() || cancel.load()) return;
            try {
                const ExperimentConfig cell = cell_config(cfg, sw.axis, sw.values[i]);
                if (sw.target == "quantum") {
                    quantum::SteadyOptions opts;
                    opts.horizon = cell.horizon;
                    opts.window = cell.window;
                    opts.tol = cell.steady_tol;
                    const auto [state, series] =
                        quantum::evolve_to_steady(cell.params, cell.grid, opts);
                    (void)state;
                    cells[i] = {series.t1.back(), series.t2.back(), series.g2_0.back(),
                                series.converged, true};
                } else {
                    const auto field = semiclassical::steady_state(cell.params);
                    const double a2 = abs2(cell.params.alpha);
                    cells[i] = {abs2(field.transmitted()) / a2, 0.0, 0.0, !field.bistable, true};
                }
            } catch (const NumericalError&) {
                cells[i].valid = false;
            } catch (const ConfigError&) {
                cells[i].valid = false;
            }
        }
    };

    const int workers =
        std::max(1, std::min<int>(resolve_workers(cfg), static_cast<int>(sw.values.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < sw.values.size(); ++i) {
        if (!cells[i].valid) {
            table.set("converged", i, 0.0);
            continue;
        }
        table.set("T1", i, cells[i].t1);
        table.set("T2", i, cells[i].t2);
        table.set("g2_0", i, cells[i].g2);
        table.set("converged", i, cells[i].converged ? 1.0 : 0.0);
    }
    write_table(dir, cfg.run_id + "_sweep", table, manifest);
}

} // namespace

std::string fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

int resolve_workers(const ExperimentConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    if (const char* env = std::getenv("NLSE_TRANSPORT_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["run_id"] = run_id;
    j["version"] = version;
    j["config"] = nlohmann::ordered_json::parse(config_snapshot);
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& f : outputs) {
        nlohmann::ordered_json o;
        o["file"] = f.name;
        o["bytes"] = f.bytes;
        o["fnv1a64"] = f.fnv1a64;
        outs.push_back(o);
    }
    j["outputs"] = outs;
    j["timings"]["wall_seconds"] = wall_seconds;
    return j.dump(2);
}

RunManifest run(const ExperimentConfig& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);

    RunManifest manifest;
    manifest.run_id = cfg.run_id;
    manifest.version = kVersion;
    manifest.config_snapshot = cfg.serialize();

    switch (cfg.mode) {
        case Mode::linear: run_linear(cfg, dir, manifest); break;
        case Mode::bandgap: run_bandgap(cfg, dir, manifest); break;
        case Mode::semiclassical: run_semiclassical(cfg, dir, manifest); break;
        case Mode::modes: run_modes(cfg, dir, manifest); break;
        case Mode::quantum: run_quantum(cfg, dir, manifest); break;
        case Mode::sweep: run_sweep(cfg, dir, manifest); break;
    }

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream mf(dir / (cfg.run_id + "_manifest.json"));
    mf << manifest.to_json() << '\n';
    return manifest;
}

} // namespace cli
} // namespace nlse
