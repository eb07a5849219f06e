#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qpicli/config.hpp"
#include "qpicli/manifest.hpp"

namespace qpicli {

inline const char* kToolVersion = "0.1.0";

// ---- on-disk layout -------------------------------------------------------
// <root>/manifest.json
// <root>/calibration.qpif
// <root>/nuclei/<id>/{brightfield.png, hologram.qpif, truth_phase.qpif, truth_mask.qpif}
// <root>/recon/<method>/<id>/{phase.qpif, trace.csv}
// <root>/masks/<id>/{mask.png, mask.qpif}
// <root>/features.csv
// <root>/analysis/<columns>/{report.json, scores.csv, scatter.svg}

std::filesystem::path nucleus_dir(const std::filesystem::path& root, const std::string& id);
std::filesystem::path recon_dir(const std::filesystem::path& root, const std::string& method);
std::filesystem::path masks_dir(const std::filesystem::path& root);
std::filesystem::path analysis_dir(const std::filesystem::path& root,
                                   const std::string& columns);

// Options common to all subcommands, already parsed from the command line.
struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> columns; // analyze / pipeline
    std::optional<std::string> method;  // reconstruct / features
    std::string rois_path;              // segment
    bool no_timestamp = false;
};

// Resolves the effective config for a command operating on an existing
// dataset: --config wins, otherwise the config stored in the manifest.
PipelineConfig dataset_config(const CommonArgs& args, const RunManifest& manifest);

// Applies --seed/--threads overrides.
void apply_overrides(PipelineConfig& config, const CommonArgs& args);

// Fails (exit 1) when more than 20% of the nuclei have been dropped.
bool drop_budget_exceeded(const RunManifest& manifest);

// ---- tiny CSV helpers -----------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// ROI override file: header nucleus_id,center_x,center_y.
struct RoiOverride {
    std::string nucleus_id;
    double center_x = 0.0;
    double center_y = 0.0;
};
std::vector<RoiOverride> read_roi_overrides(const std::filesystem::path& path);

} // namespace qpicli
