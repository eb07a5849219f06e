#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpi/holo.hpp"
#include "qpi/recon.hpp"

namespace qpicli {

// One phantom class population: how many nuclei and with what parameters.
struct PopulationEntry {
    qpi::holo::PhantomSpec spec;
    int count = 1;
};

struct AnalysisConfig {
    std::string columns = "all"; // "all" or "brightfield"
    int stability_start_rows = 0; // 0 = automatic
    int stability_step = 0;       // 0 = automatic
};

struct SegmentationConfig {
    int kmeans_max_iterations = 100;
};

// Everything a pipeline run needs, declaratively. Every field has a default,
// so an empty JSON object is a valid config.
struct PipelineConfig {
    std::uint64_t seed = 20260822;
    int threads = 1;
    std::string output_dir; // usually overridden by --out
    qpi::holo::OpticalConfig optics;
    // Additive hologram sensor noise, in units of the unit-amplitude
    // reference intensity (brightfield noise is per-phantom, 8-bit units).
    double sensor_noise_std = 0.02;
    std::vector<PopulationEntry> population; // defaults to 1 nucleus per class
    std::string recon_method = "opt";        // "opt" or "fourier"
    qpi::recon::ReconConfig recon;
    SegmentationConfig segmentation;
    AnalysisConfig analysis;

    void validate() const;
    int total_nuclei() const;
};

// Parses a config JSON document. Missing fields take defaults; unknown keys
// raise InvalidConfigurationError so typos never silently disable options.
PipelineConfig parse_config(const nlohmann::json& j);
PipelineConfig load_config_file(const std::string& path);

// The effective configuration, fully expanded, as stored in the manifest.
nlohmann::json config_to_json(const PipelineConfig& c);

} // namespace qpicli
