#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qpicli {

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label; // class label, selects the color
    std::string id;    // marker tooltip
};

struct ScatterStyle {
    std::string x_axis;
    std::string y_axis;
    std::string title;
    bool timestamp = true; // the only nondeterministic field, off for byte-stable output
};

// Writes a self-contained SVG scatter plot, one <circle> per point, colored
// by label (alphabetical palette assignment), with axes and a legend.
void write_scatter_svg(const std::filesystem::path& path,
                       const std::vector<ScatterPoint>& points, const ScatterStyle& style);

} // namespace qpicli
