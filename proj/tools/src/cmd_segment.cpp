#include <filesystem>
#include <iostream>
#include <map>

#include "qpi/io.hpp"
#include "qpi/parallel.hpp"
#include "qpi/segment.hpp"
#include "qpicli/commands.hpp"

namespace qpicli {

namespace fs = std::filesystem;
using namespace qpi;

int cmd_segment(const CommonArgs& args) {
    const fs::path root = args.out_dir;
    RunManifest manifest = load_manifest(root);
    if (!manifest.has_stage("simulate"))
        throw InvalidInputError("segment: dataset has no simulate stage");
    PipelineConfig config = dataset_config(args, manifest);

    // Default centers come from the manifest; a ROI file overrides per id.
    std::map<std::string, std::pair<double, double>> centers;
    for (const auto& n : manifest.nuclei) centers[n.id] = {n.center_x, n.center_y};
    if (!args.rois_path.empty())
        for (const auto& roi : read_roi_overrides(args.rois_path)) {
            if (!centers.count(roi.nucleus_id))
                throw InvalidInputError("rois: unknown nucleus " + roi.nucleus_id);
            centers[roi.nucleus_id] = {roi.center_x, roi.center_y};
        }

    manifest.complete = false;
    manifest.save(root);

    struct Result {
        std::optional<NucleusMask> mask;
        std::string error;
    };
    std::vector<const NucleusRecord*> todo;
    for (const auto& n : manifest.nuclei)
        if (n.ok()) todo.push_back(&n);
    std::vector<Result> results(todo.size());

    parallel_for(todo.size(), config.threads, [&](std::size_t i) {
        try {
            const RgbImage roi =
                io::read_png_rgb(nucleus_dir(root, todo[i]->id) / "brightfield.png");
            const auto [cx, cy] = centers.at(todo[i]->id);
            results[i].mask = seg::segment_nucleus(roi, cx, cy);
        } catch (const Error& e) {
            results[i].error = e.what();
        }
    });

    const io::FieldMeta mask_meta{config.optics.pixel_pitch_um, "mask"};
    int produced = 0;
    for (std::size_t i = 0; i < todo.size(); ++i) {
        const std::string& id = todo[i]->id;
        if (!results[i].mask) {
            manifest.mark_dropped(id, "segment", results[i].error);
            std::cerr << "segment: dropped " << id << ": " << results[i].error << "\n";
            continue;
        }
        const fs::path dir = masks_dir(root) / id;
        fs::create_directories(dir);
        io::write_png_mask(dir / "mask.png", results[i].mask->values);
        RealField as_real(results[i].mask->values.grid());
        for (std::size_t k = 0; k < as_real.size(); ++k)
            as_real[k] = results[i].mask->values[k];
        io::write_field(dir / "mask.qpif", as_real, mask_meta);
        manifest.record_file(root, "masks/" + id + "/mask.png");
        manifest.record_file(root, "masks/" + id + "/mask.qpif");
        ++produced;
    }

    manifest.stages.push_back("segment");
    manifest.complete = true;
    manifest.save(root);
    std::cout << "segment: " << produced << "/" << todo.size() << " nuclei\n";
    return drop_budget_exceeded(manifest) ? 1 : 0;
}

} // namespace qpicli
