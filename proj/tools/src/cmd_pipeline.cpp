#include <iostream>

#include <json.hpp>

#include "qpi/errors.hpp"
#include "qpicli/commands.hpp"

namespace qpicli {

// Full chain on one dataset directory with a single manifest:
// simulate -> reconstruct -> segment -> features -> analyze(all) ->
// analyze(brightfield). Stops early on a nonzero stage exit; the drop budget
// is enforced by each stage.
int cmd_pipeline(const CommonArgs& args) {
    CommonArgs base = args;
    if (base.out_dir.empty()) {
        const PipelineConfig config = base.config_path.empty()
                                          ? parse_config(nlohmann::json::object())
                                          : load_config_file(base.config_path);
        base.out_dir = config.output_dir;
        if (base.out_dir.empty())
            throw qpi::InvalidConfigurationError(
                "pipeline: no output directory (--out or output_dir)");
    }

    struct Step {
        const char* name;
        int (*run)(const CommonArgs&);
        const char* columns; // nullptr = leave as given
    };
    const Step steps[] = {
        {"simulate", cmd_simulate, nullptr},
        {"reconstruct", cmd_reconstruct, nullptr},
        {"segment", cmd_segment, nullptr},
        {"features", cmd_features, nullptr},
        {"analyze", cmd_analyze, "all"},
        {"analyze", cmd_analyze, "brightfield"},
    };
    for (const Step& step : steps) {
        CommonArgs stage_args = base;
        if (step.columns) stage_args.columns = step.columns;
        const int code = step.run(stage_args);
        if (code != 0) {
            std::cerr << "pipeline: stage " << step.name << " failed with exit code " << code
                      << "\n";
            return code;
        }
    }
    return 0;
}

} // namespace qpicli
