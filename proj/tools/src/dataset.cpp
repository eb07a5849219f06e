#include "qpicli/dataset.hpp"

#include <fstream>
#include <sstream>

#include "qpi/errors.hpp"

namespace qpicli {

namespace fs = std::filesystem;

fs::path nucleus_dir(const fs::path& root, const std::string& id) {
    return root / "nuclei" / id;
}

fs::path recon_dir(const fs::path& root, const std::string& method) {
    return root / "recon" / method;
}

fs::path masks_dir(const fs::path& root) { return root / "masks"; }

fs::path analysis_dir(const fs::path& root, const std::string& columns) {
    return root / "analysis" / columns;
}

PipelineConfig dataset_config(const CommonArgs& args, const RunManifest& manifest) {
    PipelineConfig config = args.config_path.empty() ? parse_config(manifest.config)
                                                     : load_config_file(args.config_path);
    apply_overrides(config, args);
    return config;
}

void apply_overrides(PipelineConfig& config, const CommonArgs& args) {
    if (args.seed) config.seed = *args.seed;
    if (args.threads) config.threads = *args.threads;
    if (args.columns) config.analysis.columns = *args.columns;
    if (args.method) config.recon_method = *args.method;
    config.validate();
}

bool drop_budget_exceeded(const RunManifest& manifest) {
    const int total = static_cast<int>(manifest.nuclei.size());
    return total > 0 && manifest.dropped_count() * 5 > total; // > 20%
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qpi::InvalidInputError("csv: cannot open " + path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != table.header.size())
                throw qpi::InvalidInputError("csv: ragged row in " + path.string());
            table.rows.push_back(std::move(cells));
        }
    }
    if (first) throw qpi::InvalidInputError("csv: empty file " + path.string());
    return table;
}

void write_csv(const fs::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw qpi::InvalidInputError("csv: cannot write " + path.string());
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

std::vector<RoiOverride> read_roi_overrides(const fs::path& path) {
    CsvTable table = read_csv(path);
    if (table.header != std::vector<std::string>{"nucleus_id", "center_x", "center_y"})
        throw qpi::InvalidInputError(
            "rois: expected header nucleus_id,center_x,center_y in " + path.string());
    std::vector<RoiOverride> out;
    for (const auto& row : table.rows) {
        RoiOverride roi;
        roi.nucleus_id = row[0];
        try {
            roi.center_x = std::stod(row[1]);
            roi.center_y = std::stod(row[2]);
        } catch (const std::exception&) {
            throw qpi::InvalidInputError("rois: non-numeric center for " + roi.nucleus_id);
        }
        out.push_back(std::move(roi));
    }
    return out;
}

} // namespace qpicli
