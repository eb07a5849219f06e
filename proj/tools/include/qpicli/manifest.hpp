#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace qpicli {

// Per-nucleus bookkeeping. A nucleus that fails in some stage is marked
// dropped with the stage and reason, and later stages skip it.
struct NucleusRecord {
    std::string id;
    std::string class_label;
    std::string seed; // decimal uint64, kept as a string for JSON fidelity
    double center_x = 0.0;
    double center_y = 0.0;
    std::string status = "ok"; // "ok" or "dropped:<stage>:<reason>"

    bool ok() const { return status == "ok"; }
};

// Run ledger written next to the data. "complete" is false while a stage is
// writing, so an interrupted run is recognizable. Every emitted file (except
// the manifest itself) is listed with its SHA-256.
struct RunManifest {
    std::string tool_version;
    std::string config_digest;
    nlohmann::json config;
    bool complete = false;
    std::vector<std::string> stages;
    std::map<std::string, std::string> files; // relative path -> sha256
    std::vector<NucleusRecord> nuclei;

    NucleusRecord* find(const std::string& id);
    void mark_dropped(const std::string& id, const std::string& stage, const std::string& why);
    int dropped_count() const;
    bool has_stage(const std::string& stage) const;

    // Digests path (under root) and records it as rel.
    void record_file(const std::filesystem::path& root, const std::string& rel);

    void save(const std::filesystem::path& root) const; // writes manifest.json
};

RunManifest load_manifest(const std::filesystem::path& root);

} // namespace qpicli
