#include <filesystem>
#include <iostream>

#include "qpi/features.hpp"
#include "qpi/io.hpp"
#include "qpi/parallel.hpp"
#include "qpicli/commands.hpp"

namespace qpicli {

namespace fs = std::filesystem;
using namespace qpi;

int cmd_features(const CommonArgs& args) {
    const fs::path root = args.out_dir;
    RunManifest manifest = load_manifest(root);
    PipelineConfig config = dataset_config(args, manifest);
    const std::string method = config.recon_method;
    if (!manifest.has_stage("reconstruct:" + method))
        throw InvalidInputError("features: dataset has no reconstruct:" + method + " stage");
    if (!manifest.has_stage("segment"))
        throw InvalidInputError("features: dataset has no segment stage");

    manifest.complete = false;
    manifest.save(root);

    struct Result {
        std::optional<feat::NucleusFeatures> features;
        std::string error;
    };
    std::vector<const NucleusRecord*> todo;
    for (const auto& n : manifest.nuclei)
        if (n.ok()) todo.push_back(&n);
    std::vector<Result> results(todo.size());

    parallel_for(todo.size(), config.threads, [&](std::size_t i) {
        const std::string& id = todo[i]->id;
        try {
            const RgbImage brightfield =
                io::read_png_rgb(nucleus_dir(root, id) / "brightfield.png");
            PhaseMap phase;
            phase.values = io::read_real_field(recon_dir(root, method) / id / "phase.qpif");
            phase.wrapped = false;
            const Field<std::uint8_t> mask_px =
                io::read_png_mask(masks_dir(root) / id / "mask.png");
            NucleusMask mask;
            mask.values = mask_px;
            mask.area = 0;
            for (auto v : mask_px) mask.area += v;
            results[i].features =
                feat::extract_all(brightfield, phase, mask, id, todo[i]->class_label);
        } catch (const Error& e) {
            results[i].error = e.what();
        }
    });

    CsvTable table;
    table.header = {"nucleus_id", "class_label"};
    for (const auto& name : feat::feature_names()) table.header.push_back(name);
    int produced = 0;
    for (std::size_t i = 0; i < todo.size(); ++i) {
        const std::string& id = todo[i]->id;
        if (!results[i].features) {
            manifest.mark_dropped(id, "features", results[i].error);
            std::cerr << "features: dropped " << id << ": " << results[i].error << "\n";
            continue;
        }
        std::vector<std::string> row = {id, results[i].features->class_label};
        for (double v : results[i].features->values) row.push_back(io::format_g9(v));
        table.rows.push_back(std::move(row));
        ++produced;
    }
    write_csv(root / "features.csv", table);
    manifest.record_file(root, "features.csv");

    manifest.stages.push_back("features");
    manifest.complete = true;
    manifest.save(root);
    std::cout << "features: " << produced << "/" << todo.size() << " nuclei\n";
    return drop_budget_exceeded(manifest) ? 1 : 0;
}

} // namespace qpicli
