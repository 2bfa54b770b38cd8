#ifndef NLSE_CONFIG_HPP
#define NLSE_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "nlse/linear.hpp"
#include "nlse/params.hpp"
#include "nlse/quantum.hpp"

namespace nlse {
namespace cli {

enum class Mode { linear, bandgap, semiclassical, modes, quantum, sweep };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct LinearBlock {
    double beta = 0.0;
    double delta_min = 0.0;
    double delta_max = 0.0; ///< 0,0 picks a window around the first resonances
    int points = 801;
};

struct BandgapBlock {
    double delta3_min = -1.0;
    double delta3_max = 0.2;
    int points = 2001;
    std::optional<double> eta; ///< keep the propagation-phase term when set
};

struct SemiclassicalBlock {
    std::string submode = "spectrum"; ///< "spectrum" or "saturation"
    double delta_min = 0.0;
    double delta_max = 0.0;
    int points = 201;
    std::vector<double> intensities = {1e-8};
    std::vector<double> photons = {0.1, 0.3, 1.0, 3.0, 10.0};
};

struct TwoParticleRequest {
    std::string branch; ///< "fermionized", "bound_I", "bound_II"
    int m = 1;
    int n = 2;
};

struct ModesBlock {
    int n_max = 6;
    std::vector<TwoParticleRequest> two_particle;
    int wavefunction_points = 0; ///< emit |phi| matrices when > 0
};

struct SweepBlock {
    std::string axis;           ///< dotted config field, e.g. "dimensionless.kappa_re"
    std::vector<double> values;
    std::string target = "quantum"; ///< compute mode per cell: "quantum" or "semiclassical"
};

/// Fully validated experiment description.  Exactly one of `physical` /
/// `dimensionless` is present in the document; after parsing, `params` holds
/// the derived dimensionless set either way.
struct ExperimentConfig {
    Mode mode = Mode::linear;
    std::string run_id = "run";
    int workers = 0; ///< 0 = library default / environment
    bool from_physical = false;
    std::optional<PhysicalParams> physical;
    DimensionlessParams params;
    std::optional<int> resonance_n; ///< drive pinned to the n-th linear resonance
    quantum::GridSpec grid;
    double horizon = 0.0;
    double window = 0.0;
    double steady_tol = 1e-3;
    LinearBlock linear_block;
    BandgapBlock bandgap_block;
    SemiclassicalBlock semiclassical_block;
    ModesBlock modes_block;
    std::optional<SweepBlock> sweep;
    std::vector<double> taus;

    /// Canonical JSON document (parse -> serialize -> parse is the identity).
    std::string serialize() const;
};

/// Parse and validate a JSON config document.  Unknown keys, missing
/// required keys, or the presence of both parameter blocks are hard errors
/// naming the offending key path.
ExperimentConfig parse_config(const std::string& text);

} // namespace cli
} // namespace nlse

#endif
