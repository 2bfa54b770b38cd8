#ifndef NLSE_RUNNER_HPP
#define NLSE_RUNNER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "nlse/config.hpp"

namespace nlse {
namespace cli {

inline constexpr const char* kVersion = "0.1.0";

struct OutputFile {
    std::string name;
    std::uint64_t bytes = 0;
    std::string fnv1a64;
};

struct RunManifest {
    std::string run_id;
    std::string version;
    std::string config_snapshot; ///< canonical serialized config
    std::vector<OutputFile> outputs;
    double wall_seconds = 0.0;

    std::string to_json() const;
};

/// FNV-1a 64-bit checksum, lowercase hex.
std::string fnv1a64(const std::string& bytes);

/// Number of sweep workers: explicit config value, else the
/// NLSE_TRANSPORT_WORKERS environment variable, else hardware concurrency.
int resolve_workers(const ExperimentConfig& cfg);

/// Execute the experiment, write CSV outputs plus a JSON manifest into
/// out_dir, and return the manifest.  Identical config and version produce
/// bit-identical CSV outputs; wall-clock timings live only in the manifest.
RunManifest run(const ExperimentConfig& cfg, const std::string& out_dir);

} // namespace cli
} // namespace nlse

#endif
