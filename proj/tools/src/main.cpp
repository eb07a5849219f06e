#include <iostream>

#include <CLI11.hpp>

#include "qpi/errors.hpp"
#include "qpicli/commands.hpp"

namespace {

void add_common(CLI::App* sub, qpicli::CommonArgs& args, bool config_flag = true) {
    if (config_flag)
        sub->add_option("--config", args.config_path, "Pipeline config JSON file");
    sub->add_option("--out", args.out_dir, "Dataset directory");
    sub->add_option("--seed", args.seed, "Override the config seed");
    sub->add_option("--threads", args.threads, "Worker threads for per-nucleus stages");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Holographic phase microscopy simulation and analysis pipeline"};
    app.require_subcommand(1);

    qpicli::CommonArgs args;
    std::string columns, method;

    CLI::App* simulate = app.add_subcommand("simulate", "Synthesize a phantom dataset");
    add_common(simulate, args);

    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "Recover unwrapped phase from holograms");
    add_common(reconstruct, args);
    reconstruct->add_option("--method", method, "opt (regularized) or fourier (baseline)")
        ->check(CLI::IsMember({"opt", "fourier"}));

    CLI::App* segment = app.add_subcommand("segment", "Segment nuclei in brightfield images");
    add_common(segment, args);
    segment->add_option("--rois", args.rois_path,
                        "CSV nucleus_id,center_x,center_y overriding ROI centers");

    CLI::App* features = app.add_subcommand("features", "Extract the 19-feature matrix");
    add_common(features, args);
    features->add_option("--method", method, "Which reconstruction tree to read")
        ->check(CLI::IsMember({"opt", "fourier"}));

    CLI::App* analyze = app.add_subcommand("analyze", "PCA, adequacy, and clustering report");
    add_common(analyze, args);
    analyze->add_option("--columns", columns, "Feature subset: all or brightfield")
        ->check(CLI::IsMember({"all", "brightfield"}));
    analyze->add_flag("--no-timestamp", args.no_timestamp,
                      "Omit the generation timestamp comment from the SVG");

    CLI::App* pipeline = app.add_subcommand("pipeline", "Run every stage on one dataset");
    add_common(pipeline, args);
    pipeline->add_option("--method", method, "Reconstruction method for the whole run")
        ->check(CLI::IsMember({"opt", "fourier"}));
    pipeline->add_flag("--no-timestamp", args.no_timestamp,
                       "Omit the generation timestamp comment from the SVGs");

    CLI11_PARSE(app, argc, argv);
    if (!columns.empty()) args.columns = columns;
    if (!method.empty()) args.method = method;

    try {
        if (simulate->parsed()) return qpicli::cmd_simulate(args);
        if (reconstruct->parsed()) return qpicli::cmd_reconstruct(args);
        if (segment->parsed()) return qpicli::cmd_segment(args);
        if (features->parsed()) return qpicli::cmd_features(args);
        if (analyze->parsed()) return qpicli::cmd_analyze(args);
        if (pipeline->parsed()) return qpicli::cmd_pipeline(args);
    } catch (const qpi::InvalidConfigurationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qpi::InvalidInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qpi::CalibrationFailureError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qpi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
