#include "nlse/config.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <json.hpp>

namespace nlse {
namespace cli {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Mode m) {
    switch (m) {
        case Mode::linear: return "linear";
        case Mode::bandgap: return "bandgap";
        case Mode::semiclassical: return "semiclassical";
        case Mode::modes: return "modes";
        case Mode::quantum: return "quantum";
        case Mode::sweep: return "sweep";
    }
    return "?";
}

Mode mode_from_string(const std::string& s) {
    if (s == "linear") return Mode::linear;
    if (s == "bandgap") return Mode::bandgap;
    if (s == "semiclassical") return Mode::semiclassical;
    if (s == "modes") return Mode::modes;
    if (s == "quantum") return Mode::quantum;
    if (s == "sweep") return Mode::sweep;
    throw ConfigError("config.mode: unknown mode '" + s + "'");
}

namespace {

void require_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError("config" + path + "." + key + ": unknown key");
    }
}

double get_num(const json& obj, const std::string& path, const std::string& key,
               std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError("config" + path + "." + key + ": required key missing");
    }
    if (!obj[key].is_number())
        throw ConfigError("config" + path + "." + key + ": expected a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError("config" + path + "." + key + ": expected an integer");
    return obj[key].get<int>();
}

std::vector<double> get_vec(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) return {};
    if (!obj[key].is_array())
        throw ConfigError("config" + path + "." + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number())
            throw ConfigError("config" + path + "." + key + ": expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

const std::set<std::string> kSweepAxes = {
    "dimensionless.kappa_re", "dimensionless.kappa_im", "dimensionless.delta",
    "dimensionless.alpha",    "dimensionless.d",        "physical.od",
    "physical.delta2_over_gamma"};

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");

    require_keys(doc, "",
                 {"mode", "run_id", "workers", "physical", "dimensionless", "grid", "linear",
                  "bandgap", "semiclassical", "modes", "sweep", "taus"});

    ExperimentConfig cfg;
    if (!doc.contains("mode")) throw ConfigError("config.mode: required key missing");
    cfg.mode = mode_from_string(doc["mode"].get<std::string>());
    if (doc.contains("run_id")) cfg.run_id = doc["run_id"].get<std::string>();
    if (cfg.run_id.empty() || cfg.run_id.find_first_of("/\\ ") != std::string::npos)
        throw ConfigError("config.run_id: must be a nonempty token without separators");
    cfg.workers = get_int(doc, "", "workers", 0);
    if (cfg.workers < 0) throw ConfigError("config.workers: must be >= 0");

    const bool has_phys = doc.contains("physical");
    const bool has_dim = doc.contains("dimensionless");
    if (has_phys && has_dim)
        throw ConfigError("config: 'physical' and 'dimensionless' are mutually exclusive; "
                          "both present");
    if (!has_phys && !has_dim)
        throw ConfigError("config: one of 'physical' or 'dimensionless' is required");

    double drive_alpha_re = 1e-3, drive_alpha_im = 0.0;
    std::optional<double> drive_delta;
    std::optional<int> resonance_n;
    auto read_drive = [&](const json& block, const std::string& path) {
        if (block.contains("delta")) drive_delta = get_num(block, path, "delta");
        if (block.contains("resonance_n")) {
            resonance_n = get_int(block, path, "resonance_n", 1);
            if (*resonance_n < 1)
                throw ConfigError("config" + path + ".resonance_n: must be >= 1");
        }
        if (drive_delta && resonance_n)
            throw ConfigError("config" + path + ": 'delta' and 'resonance_n' are mutually "
                              "exclusive; both present");
        drive_alpha_re = get_num(block, path, "alpha", 1e-3);
        drive_alpha_im = get_num(block, path, "alpha_im", 0.0);
    };

    if (has_phys) {
        const json& ph = doc["physical"];
        require_keys(ph, ".physical",
                     {"gamma1d_over_gamma", "delta1_over_gamma", "delta2_over_gamma", "od",
                      "omega_over_gamma", "gamma0_over_gamma", "delta", "resonance_n", "alpha",
                      "alpha_im"});
        PhysicalParams p;
        p.gamma1d_over_gamma = get_num(ph, ".physical", "gamma1d_over_gamma");
        p.delta1_over_gamma = get_num(ph, ".physical", "delta1_over_gamma");
        p.delta2_over_gamma = get_num(ph, ".physical", "delta2_over_gamma", 0.0);
        p.od = get_num(ph, ".physical", "od");
        p.omega_over_gamma = get_num(ph, ".physical", "omega_over_gamma", 1.0);
        p.gamma0_over_gamma = get_num(ph, ".physical", "gamma0_over_gamma", 0.0);
        read_drive(ph, ".physical");
        cfg.from_physical = true;
        cfg.physical = p;
        cfg.params = derive_dimensionless(p, drive_delta.value_or(0.0),
                                          cdouble(drive_alpha_re, drive_alpha_im));
    } else {
        const json& dm = doc["dimensionless"];
        require_keys(dm, ".dimensionless",
                     {"m_re", "m_im", "kappa_re", "kappa_im", "d", "delta", "resonance_n",
                      "alpha", "alpha_im"});
        DimensionlessParams p;
        p.m = cdouble(get_num(dm, ".dimensionless", "m_re", 0.5),
                      get_num(dm, ".dimensionless", "m_im", 0.0));
        p.kappa = cdouble(get_num(dm, ".dimensionless", "kappa_re", 0.0),
                          get_num(dm, ".dimensionless", "kappa_im", 0.0));
        p.d = get_num(dm, ".dimensionless", "d");
        read_drive(dm, ".dimensionless");
        p.delta = drive_delta.value_or(0.0);
        p.alpha = cdouble(drive_alpha_re, drive_alpha_im);
        p.validate();
        cfg.params = p;
    }
    cfg.resonance_n = resonance_n;
    if (resonance_n)
        cfg.params.delta = sqr(*resonance_n * std::numbers::pi / cfg.params.d);

    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        require_keys(g, ".grid", {"n_z", "dt_over_h", "sigma", "horizon", "window", "tol"});
        cfg.grid.n_z = get_int(g, ".grid", "n_z", 202);
        cfg.grid.dt_over_h = get_num(g, ".grid", "dt_over_h", 0.4);
        cfg.grid.sigma = get_num(g, ".grid", "sigma", 0.0);
        cfg.horizon = get_num(g, ".grid", "horizon", 0.0);
        cfg.window = get_num(g, ".grid", "window", 0.0);
        cfg.steady_tol = get_num(g, ".grid", "tol", 1e-3);
    }
    if (cfg.mode == Mode::quantum || (cfg.mode == Mode::sweep))
        cfg.grid.validate(cfg.params.d);

    if (doc.contains("linear")) {
        const json& l = doc["linear"];
        require_keys(l, ".linear", {"beta", "delta_min", "delta_max", "points"});
        cfg.linear_block.beta = get_num(l, ".linear", "beta", 0.0);
        cfg.linear_block.delta_min = get_num(l, ".linear", "delta_min", 0.0);
        cfg.linear_block.delta_max = get_num(l, ".linear", "delta_max", 0.0);
        cfg.linear_block.points = get_int(l, ".linear", "points", 801);
        if (cfg.linear_block.points < 2) throw ConfigError("config.linear.points: need >= 2");
    }
    if (doc.contains("bandgap")) {
        const json& b = doc["bandgap"];
        require_keys(b, ".bandgap", {"delta3_min", "delta3_max", "points", "eta"});
        cfg.bandgap_block.delta3_min = get_num(b, ".bandgap", "delta3_min");
        cfg.bandgap_block.delta3_max = get_num(b, ".bandgap", "delta3_max");
        cfg.bandgap_block.points = get_int(b, ".bandgap", "points", 2001);
        if (b.contains("eta")) cfg.bandgap_block.eta = get_num(b, ".bandgap", "eta");
        if (cfg.bandgap_block.points < 2) throw ConfigError("config.bandgap.points: need >= 2");
    }
    if (doc.contains("semiclassical")) {
        const json& s = doc["semiclassical"];
        require_keys(s, ".semiclassical",
                     {"submode", "delta_min", "delta_max", "points", "intensities", "photons"});
        if (s.contains("submode")) cfg.semiclassical_block.submode = s["submode"].get<std::string>();
        if (cfg.semiclassical_block.submode != "spectrum" &&
            cfg.semiclassical_block.submode != "saturation")
            throw ConfigError("config.semiclassical.submode: expected 'spectrum' or 'saturation'");
        cfg.semiclassical_block.delta_min = get_num(s, ".semiclassical", "delta_min", 0.0);
        cfg.semiclassical_block.delta_max = get_num(s, ".semiclassical", "delta_max", 0.0);
        cfg.semiclassical_block.points = get_int(s, ".semiclassical", "points", 201);
        if (s.contains("intensities"))
            cfg.semiclassical_block.intensities = get_vec(s, ".semiclassical", "intensities");
        if (s.contains("photons"))
            cfg.semiclassical_block.photons = get_vec(s, ".semiclassical", "photons");
    }
    if (doc.contains("modes")) {
        const json& m = doc["modes"];
        require_keys(m, ".modes", {"n_max", "two_particle", "wavefunction_points"});
        cfg.modes_block.n_max = get_int(m, ".modes", "n_max", 6);
        cfg.modes_block.wavefunction_points = get_int(m, ".modes", "wavefunction_points", 0);
        if (m.contains("two_particle")) {
            if (!m["two_particle"].is_array())
                throw ConfigError("config.modes.two_particle: expected an array");
            for (const auto& item : m["two_particle"]) {
                require_keys(item, ".modes.two_particle[]", {"branch", "m", "n"});
                TwoParticleRequest req;
                req.branch = item.at("branch").get<std::string>();
                if (req.branch != "fermionized" && req.branch != "bound_I" &&
                    req.branch != "bound_II")
                    throw ConfigError("config.modes.two_particle[].branch: expected "
                                      "'fermionized', 'bound_I' or 'bound_II'");
                req.m = get_int(item, ".modes.two_particle[]", "m", 1);
                req.n = get_int(item, ".modes.two_particle[]", "n", 2);
                cfg.modes_block.two_particle.push_back(req);
            }
        }
    }
    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        require_keys(s, ".sweep", {"axis", "values", "target"});
        SweepBlock sw;
        if (!s.contains("axis")) throw ConfigError("config.sweep.axis: required key missing");
        sw.axis = s["axis"].get<std::string>();
        if (!kSweepAxes.count(sw.axis)) {
            std::string names;
            for (const auto& a : kSweepAxes) names += a + " ";
            throw ConfigError("config.sweep.axis: '" + sw.axis +
                              "' does not name a sweepable config field (known: " + names + ")");
        }
        if (sw.axis.rfind("dimensionless.", 0) == 0 && cfg.from_physical)
            throw ConfigError("config.sweep.axis: dimensionless axis with a physical block");
        if (sw.axis.rfind("physical.", 0) == 0 && !cfg.from_physical)
            throw ConfigError("config.sweep.axis: physical axis without a physical block");
        sw.values = get_vec(s, ".sweep", "values");
        if (sw.values.empty()) throw ConfigError("config.sweep.values: must be nonempty");
        if (s.contains("target")) sw.target = s["target"].get<std::string>();
        if (sw.target != "quantum" && sw.target != "semiclassical")
            throw ConfigError("config.sweep.target: expected 'quantum' or 'semiclassical'");
        cfg.sweep = sw;
    }
    if (cfg.mode == Mode::sweep && !cfg.sweep)
        throw ConfigError("config.sweep: required for mode 'sweep'");
    cfg.taus = get_vec(doc, "", "taus");
    return cfg;
}

std::string ExperimentConfig::serialize() const {
    ordered_json doc;
    doc["mode"] = to_string(mode);
    doc["run_id"] = run_id;
    if (workers > 0) doc["workers"] = workers;
    if (from_physical) {
        ordered_json ph;
        ph["gamma1d_over_gamma"] = physical->gamma1d_over_gamma;
        ph["delta1_over_gamma"] = physical->delta1_over_gamma;
        ph["delta2_over_gamma"] = physical->delta2_over_gamma;
        ph["od"] = physical->od;
        ph["omega_over_gamma"] = physical->omega_over_gamma;
        ph["gamma0_over_gamma"] = physical->gamma0_over_gamma;
        if (resonance_n)
            ph["resonance_n"] = *resonance_n;
        else
            ph["delta"] = params.delta;
        ph["alpha"] = params.alpha.real();
        if (params.alpha.imag() != 0.0) ph["alpha_im"] = params.alpha.imag();
        doc["physical"] = ph;
    } else {
        ordered_json dm;
        dm["m_re"] = params.m.real();
        dm["m_im"] = params.m.imag();
        dm["kappa_re"] = params.kappa.real();
        dm["kappa_im"] = params.kappa.imag();
        dm["d"] = params.d;
        if (resonance_n)
            dm["resonance_n"] = *resonance_n;
        else
            dm["delta"] = params.delta;
        dm["alpha"] = params.alpha.real();
        if (params.alpha.imag() != 0.0) dm["alpha_im"] = params.alpha.imag();
        doc["dimensionless"] = dm;
    }
    ordered_json g;
    g["n_z"] = grid.n_z;
    g["dt_over_h"] = grid.dt_over_h;
    g["sigma"] = grid.sigma;
    g["horizon"] = horizon;
    g["window"] = window;
    g["tol"] = steady_tol;
    doc["grid"] = g;
    switch (mode) {
        case Mode::linear: {
            ordered_json l;
            l["beta"] = linear_block.beta;
            l["delta_min"] = linear_block.delta_min;
            l["delta_max"] = linear_block.delta_max;
            l["points"] = linear_block.points;
            doc["linear"] = l;
            break;
        }
        case Mode::bandgap: {
            ordered_json b;
            b["delta3_min"] = bandgap_block.delta3_min;
            b["delta3_max"] = bandgap_block.delta3_max;
            b["points"] = bandgap_block.points;
            if (bandgap_block.eta) b["eta"] = *bandgap_block.eta;
            doc["bandgap"] = b;
            break;
        }
        case Mode::semiclassical: {
            ordered_json s;
            s["submode"] = semiclassical_block.submode;
            s["delta_min"] = semiclassical_block.delta_min;
            s["delta_max"] = semiclassical_block.delta_max;
            s["points"] = semiclassical_block.points;
            s["intensities"] = semiclassical_block.intensities;
            s["photons"] = semiclassical_block.photons;
            doc["semiclassical"] = s;
            break;
        }
        case Mode::modes: {
            ordered_json m;
            m["n_max"] = modes_block.n_max;
            m["wavefunction_points"] = modes_block.wavefunction_points;
            if (!modes_block.two_particle.empty()) {
                ordered_json arr = ordered_json::array();
                for (const auto& req : modes_block.two_particle) {
                    ordered_json item;
                    item["branch"] = req.branch;
                    item["m"] = req.m;
                    item["n"] = req.n;
                    arr.push_back(item);
                }
                m["two_particle"] = arr;
            }
            doc["modes"] = m;
            break;
        }
        case Mode::quantum:
            break;
        case Mode::sweep: {
            ordered_json s;
            s["axis"] = sweep->axis;
            s["values"] = sweep->values;
            s["target"] = sweep->target;
            doc["sweep"] = s;
            break;
        }
    }
    if (!taus.empty()) doc["taus"] = taus;
    return doc.dump(2);
}

} // namespace cli
} // namespace nlse
