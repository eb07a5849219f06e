#pragma once

#include "qpicli/dataset.hpp"

namespace qpicli {

// Each command returns a process exit code: 0 ok, 1 stage failure (including
// more than 20% dropped nuclei), 2 invalid input / config / calibration.
// Input-class qpi exceptions are translated by main(), so commands may throw.

int cmd_simulate(const CommonArgs& args);
int cmd_reconstruct(const CommonArgs& args);
int cmd_segment(const CommonArgs& args);
int cmd_features(const CommonArgs& args);
int cmd_analyze(const CommonArgs& args);
int cmd_pipeline(const CommonArgs& args);

} // namespace qpicli
