#include <filesystem>
#include <iostream>

#include "qpi/holo.hpp"
#include "qpi/io.hpp"
#include "qpi/parallel.hpp"
#include "qpi/rng.hpp"
#include "qpicli/commands.hpp"

namespace qpicli {

namespace fs = std::filesystem;
using namespace qpi;

namespace {

std::string nucleus_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "n%04d", index + 1);
    return buf;
}

struct PhantomJob {
    std::string id;
    holo::PhantomSpec spec;
    std::uint64_t seed = 0;
};

} // namespace

int cmd_simulate(const CommonArgs& args) {
    PipelineConfig config = args.config_path.empty() ? parse_config(nlohmann::json::object())
                                                     : load_config_file(args.config_path);
    apply_overrides(config, args);
    const fs::path root = !args.out_dir.empty() ? fs::path(args.out_dir)
                                                : fs::path(config.output_dir);
    if (root.empty())
        throw InvalidConfigurationError("simulate: no output directory (--out or output_dir)");
    config.output_dir = root.string();

    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec || !fs::is_directory(root))
        throw InvalidInputError("simulate: cannot create output directory " + root.string());

    RunManifest manifest;
    manifest.tool_version = kToolVersion;
    // The dataset root is implicit (the manifest lives in it); leaving the
    // path out keeps equal-seed runs byte-identical across directories.
    config.output_dir.clear();
    manifest.config = config_to_json(config);
    const std::string config_dump = manifest.config.dump();
    manifest.config_digest = io::sha256_bytes(config_dump.data(), config_dump.size());
    manifest.complete = false;

    std::vector<PhantomJob> jobs;
    for (const auto& entry : config.population)
        for (int i = 0; i < entry.count; ++i) {
            PhantomJob job;
            job.id = nucleus_id(static_cast<int>(jobs.size()));
            job.spec = entry.spec;
            job.seed = mix_seed(config.seed, jobs.size() + 1);
            jobs.push_back(std::move(job));
        }
    for (const auto& job : jobs) {
        NucleusRecord rec;
        rec.id = job.id;
        rec.class_label = holo::phantom_class_label(job.spec.cls);
        rec.seed = std::to_string(job.seed);
        rec.center_x = config.optics.width / 2;
        rec.center_y = config.optics.height / 2;
        manifest.nuclei.push_back(std::move(rec));
    }
    manifest.save(root); // incomplete marker while files are being written

    // Calibration: the empty object arm is a unit plane wave, so the fringe
    // pattern |R + 1|^2 carries the carrier alone.
    {
        ComplexField flat({config.optics.width, config.optics.height},
                          std::complex<double>(1.0, 0.0));
        RealField cal = holo::synthesize_hologram(flat, config.optics, config.sensor_noise_std,
                                                  mix_seed(config.seed, 0xca1b));
        io::write_field(root / "calibration.qpif", cal,
                        {config.optics.pixel_pitch_um, "intensity"});
    }

    struct Output {
        holo::PhantomTruth truth;
        RealField hologram;
    };
    std::vector<Output> outputs(jobs.size());
    parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
        outputs[i].truth = holo::make_phantom(jobs[i].spec, config.optics, jobs[i].seed);
        outputs[i].hologram =
            holo::synthesize_hologram(outputs[i].truth.object, config.optics,
                                      config.sensor_noise_std, mix_seed(jobs[i].seed, 0x5e45));
    });

    manifest.record_file(root, "calibration.qpif");
    const io::FieldMeta radians{config.optics.pixel_pitch_um, "radians"};
    const io::FieldMeta intensity{config.optics.pixel_pitch_um, "intensity"};
    const io::FieldMeta mask_meta{config.optics.pixel_pitch_um, "mask"};
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const fs::path dir = nucleus_dir(root, jobs[i].id);
        fs::create_directories(dir);
        io::write_png_rgb(dir / "brightfield.png", outputs[i].truth.brightfield);
        io::write_field(dir / "hologram.qpif", outputs[i].hologram, intensity);
        io::write_field(dir / "truth_phase.qpif", outputs[i].truth.phase, radians);
        RealField mask_field(outputs[i].truth.mask.values.grid());
        for (std::size_t k = 0; k < mask_field.size(); ++k)
            mask_field[k] = outputs[i].truth.mask.values[k];
        io::write_field(dir / "truth_mask.qpif", mask_field, mask_meta);

        const std::string rel = "nuclei/" + jobs[i].id + "/";
        manifest.record_file(root, rel + "brightfield.png");
        manifest.record_file(root, rel + "hologram.qpif");
        manifest.record_file(root, rel + "truth_phase.qpif");
        manifest.record_file(root, rel + "truth_mask.qpif");
    }

    manifest.stages.push_back("simulate");
    manifest.complete = true;
    manifest.save(root);
    std::cout << "simulate: " << jobs.size() << " nuclei -> " << root.string() << "\n";
    return 0;
}

} // namespace qpicli
