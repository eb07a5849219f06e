#include "qpicli/manifest.hpp"

#include <fstream>

#include "qpi/errors.hpp"
#include "qpi/io.hpp"

namespace qpicli {

using nlohmann::json;

NucleusRecord* RunManifest::find(const std::string& id) {
    for (auto& n : nuclei)
        if (n.id == id) return &n;
    return nullptr;
}

void RunManifest::mark_dropped(const std::string& id, const std::string& stage,
                               const std::string& why) {
    if (NucleusRecord* n = find(id)) n->status = "dropped:" + stage + ":" + why;
}

int RunManifest::dropped_count() const {
    int d = 0;
    for (const auto& n : nuclei)
        if (!n.ok()) ++d;
    return d;
}

bool RunManifest::has_stage(const std::string& stage) const {
    for (const auto& s : stages)
        if (s == stage) return true;
    return false;
}

void RunManifest::record_file(const std::filesystem::path& root, const std::string& rel) {
    files[rel] = qpi::io::sha256_file(root / rel);
}

void RunManifest::save(const std::filesystem::path& root) const {
    json j;
    j["tool_version"] = tool_version;
    j["config_digest"] = config_digest;
    j["config"] = config;
    j["complete"] = complete;
    j["stages"] = stages;
    j["files"] = files;
    json list = json::array();
    for (const auto& n : nuclei)
        list.push_back({{"id", n.id},
                        {"class_label", n.class_label},
                        {"seed", n.seed},
                        {"center_x", n.center_x},
                        {"center_y", n.center_y},
                        {"status", n.status}});
    j["nuclei"] = list;

    std::ofstream out(root / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out)
        throw qpi::InvalidInputError("manifest: cannot write " +
                                     (root / "manifest.json").string());
    out << j.dump(2) << "\n";
}

RunManifest load_manifest(const std::filesystem::path& root) {
    const auto path = root / "manifest.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qpi::InvalidInputError("manifest: cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw qpi::InvalidInputError("manifest: " + path.string() + ": " + e.what());
    }
    RunManifest m;
    try {
        m.tool_version = j.at("tool_version").get<std::string>();
        m.config_digest = j.at("config_digest").get<std::string>();
        m.config = j.at("config");
        m.complete = j.at("complete").get<bool>();
        m.stages = j.at("stages").get<std::vector<std::string>>();
        m.files = j.at("files").get<std::map<std::string, std::string>>();
        for (const auto& n : j.at("nuclei")) {
            NucleusRecord rec;
            rec.id = n.at("id").get<std::string>();
            rec.class_label = n.at("class_label").get<std::string>();
            rec.seed = n.at("seed").get<std::string>();
            rec.center_x = n.at("center_x").get<double>();
            rec.center_y = n.at("center_y").get<double>();
            rec.status = n.at("status").get<std::string>();
            m.nuclei.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw qpi::InvalidInputError("manifest: malformed " + path.string() + ": " + e.what());
    }
    return m;
}

} // namespace qpicli
