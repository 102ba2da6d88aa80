#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/grid.hpp"
#include "fraclab/kernel.hpp"
#include "fraclab/minimize.hpp"
#include "fraclab/presets.hpp"
#include "json.hpp"

namespace fraclab {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "fraclab 1.0.0";

/// One entry of the diagnostics plan. `settings` keeps the probe's own
/// fields (everything except "probe").
struct ProbeSpec {
    std::string kind;
    nlohmann::json settings;
};

struct SweepSpec {
    std::vector<double> s, p, h, theta, eps1;
    bool empty() const { return s.empty() && p.empty() && h.empty() && theta.empty() && eps1.empty(); }
};

struct RunConfig {
    nlohmann::json raw;  // the parsed document, echoed into manifests
    Box box;
    double h = 0.0;
    double collar_width = 0.0;
    std::size_t max_cells = 60000;
    double s = 0.0, p = 0.0;
    int n = 0, N = 0;
    std::string manifold_kind = "sphere";
    int lambda = 0;
    bool claim_hypotheses = false;
    PresetSpec boundary;
    MinimizeOptions minimize;
    KernelOptions kernel;
    std::vector<ProbeSpec> probes;
    std::uint64_t seed = 0;
    std::string output_dir;
    SweepSpec sweep;

    FractionalParams params() const { return FractionalParams(s, p, n, N); }
};

/// Probe kinds understood by the diagnose command.
const std::vector<std::string>& known_probes();

/// Parses and validates; throws ValidationError listing every problem.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// FNV-1a 64 of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// FNV-1a 64-bit hash of the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

}  // namespace fraclab
