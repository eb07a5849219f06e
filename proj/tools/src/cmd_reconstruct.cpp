#include <filesystem>
#include <fstream>
#include <iostream>

#include "qpi/io.hpp"
#include "qpi/parallel.hpp"
#include "qpi/recon.hpp"
#include "qpi/unwrap.hpp"
#include "qpicli/commands.hpp"

namespace qpicli {

namespace fs = std::filesystem;
using namespace qpi;

namespace {

void write_trace_csv(const fs::path& path, const std::vector<recon::TracePoint>& trace) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("reconstruct: cannot write " + path.string());
    out << "iteration,data_cost,smooth_cost,total_cost,delta,data_step,smooth_step\n";
    for (const auto& t : trace)
        out << t.iteration << ',' << io::format_g9(t.data_cost) << ','
            << io::format_g9(t.smooth_cost) << ',' << io::format_g9(t.total_cost) << ','
            << io::format_g9(t.delta) << ',' << io::format_g9(t.data_step) << ','
            << io::format_g9(t.smooth_step) << "\n";
}

} // namespace

int cmd_reconstruct(const CommonArgs& args) {
    const fs::path root = args.out_dir;
    RunManifest manifest = load_manifest(root);
    if (!manifest.has_stage("simulate"))
        throw InvalidInputError("reconstruct: dataset has no simulate stage");
    PipelineConfig config = dataset_config(args, manifest);
    const std::string method = config.recon_method;

    const RealField calibration = io::read_real_field(root / "calibration.qpif");
    const recon::ReferenceBeam beam = recon::calibrate_reference(calibration);

    manifest.complete = false;
    manifest.save(root);

    struct Result {
        std::optional<PhaseMap> phase;
        std::vector<recon::TracePoint> trace;
        std::string error;
    };
    std::vector<const NucleusRecord*> todo;
    for (const auto& n : manifest.nuclei)
        if (n.ok()) todo.push_back(&n);
    std::vector<Result> results(todo.size());

    parallel_for(todo.size(), config.threads, [&](std::size_t i) {
        try {
            const RealField hologram =
                io::read_real_field(nucleus_dir(root, todo[i]->id) / "hologram.qpif");
            ComplexField object;
            if (method == "opt") {
                recon::ReconResult r = recon::optimize_reconstruct(hologram, beam, config.recon);
                object = std::move(r.object);
                results[i].trace = std::move(r.trace);
            } else {
                object = recon::fourier_reconstruct(hologram, beam, config.recon.window_radius);
            }
            PhaseMap wrapped = recon::wrapped_phase(object);
            results[i].phase = unwrap::unwrap_phase(wrapped);
        } catch (const Error& e) {
            results[i].error = e.what();
        }
    });

    const io::FieldMeta radians{config.optics.pixel_pitch_um, "radians"};
    int produced = 0;
    for (std::size_t i = 0; i < todo.size(); ++i) {
        const std::string& id = todo[i]->id;
        if (!results[i].phase) {
            manifest.mark_dropped(id, "reconstruct", results[i].error);
            std::cerr << "reconstruct: dropped " << id << ": " << results[i].error << "\n";
            continue;
        }
        const fs::path dir = recon_dir(root, method) / id;
        fs::create_directories(dir);
        io::write_field(dir / "phase.qpif", results[i].phase->values, radians);
        const std::string rel = "recon/" + method + "/" + id + "/";
        manifest.record_file(root, rel + "phase.qpif");
        if (method == "opt") {
            write_trace_csv(dir / "trace.csv", results[i].trace);
            manifest.record_file(root, rel + "trace.csv");
        }
        ++produced;
    }

    manifest.stages.push_back("reconstruct:" + method);
    manifest.complete = true;
    manifest.save(root);
    std::cout << "reconstruct(" << method << "): " << produced << "/" << todo.size()
              << " nuclei\n";
    return drop_budget_exceeded(manifest) ? 1 : 0;
}

} // namespace qpicli
