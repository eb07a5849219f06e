#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "qpi/analyze.hpp"
#include "qpi/features.hpp"
#include "qpi/io.hpp"
#include "qpi/rng.hpp"
#include "qpicli/commands.hpp"
#include "qpicli/svg.hpp"

namespace qpicli {

namespace fs = std::filesystem;
using namespace qpi;
using nlohmann::json;

namespace {

constexpr const char* kKmoDefinition =
    "Kaiser-Meyer-Olkin sampling adequacy: the sum of squared off-diagonal "
    "correlations divided by that sum plus the sum of squared partial "
    "correlations, where partial correlations come from the normalized "
    "inverse correlation matrix; reported overall and per variable.";

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
    return buf;
}

} // namespace

int cmd_analyze(const CommonArgs& args) {
    const fs::path root = args.out_dir;
    RunManifest manifest = load_manifest(root);
    PipelineConfig config = dataset_config(args, manifest);
    if (!manifest.has_stage("features"))
        throw InvalidInputError("analyze: dataset has no features stage");
    const std::string columns = config.analysis.columns;
    const int p = columns == "brightfield" ? feat::kBrightfieldFeatureCount : feat::kFeatureCount;

    const CsvTable table = read_csv(root / "features.csv");
    if (static_cast<int>(table.header.size()) != 2 + feat::kFeatureCount)
        throw InvalidInputError("analyze: unexpected features.csv column count");
    const int n = static_cast<int>(table.rows.size());
    if (n < 2) throw InsufficientDataError("analyze: need at least 2 nuclei");

    std::vector<std::string> ids(n), labels(n);
    Eigen::MatrixXd data(n, p);
    for (int i = 0; i < n; ++i) {
        ids[i] = table.rows[i][0];
        labels[i] = table.rows[i][1];
        for (int j = 0; j < p; ++j) {
            try {
                data(i, j) = std::stod(table.rows[i][2 + j]);
            } catch (const std::exception&) {
                throw InvalidInputError("analyze: non-numeric feature for " + ids[i]);
            }
        }
    }
    std::vector<std::string> names(feat::feature_names().begin(),
                                   feat::feature_names().begin() + p);

    manifest.complete = false;
    manifest.save(root);

    const pca::PCAModel model = pca::pca(data, names);
    const Eigen::VectorXd explained = pca::explained_variance(model);
    const int k = std::min(5, p);
    const Eigen::MatrixXd scores = pca::project(model, data, k);

    json report;
    report["columns"] = columns;
    report["feature_names"] = names;
    report["nuclei_used"] = n;
    report["nuclei_dropped"] = manifest.dropped_count();
    {
        std::map<std::string, int> class_counts;
        for (const auto& l : labels) ++class_counts[l];
        report["class_counts"] = class_counts;
    }
    report["eigenvalues"] = std::vector<double>(model.eigenvalues.data(),
                                                model.eigenvalues.data() + p);
    report["explained_variance"] =
        std::vector<double>(explained.data(), explained.data() + p);
    {
        std::vector<double> cumulative(p);
        double acc = 0.0;
        for (int j = 0; j < p; ++j) cumulative[j] = (acc += explained(j));
        report["cumulative_explained_variance"] = cumulative;
        report["variance_in_two_components"] = cumulative[std::min(1, p - 1)];
    }
    report["kmo_definition"] = kKmoDefinition;
    try {
        const pca::KMOResult kmo = pca::kmo(data);
        report["kmo"] = {{"overall", kmo.overall}, {"per_variable", kmo.per_variable}};
    } catch (const Error& e) {
        // Expected for this feature set: mean_intensity is an exact linear
        // combination of the channel means, so the correlation matrix is
        // singular and partial correlations are undefined.
        report["kmo"] = {{"error", e.what()}};
    }
    {
        std::set<std::string> unique(labels.begin(), labels.end());
        if (unique.size() >= 2) {
            std::vector<int> numeric(n);
            for (int i = 0; i < n; ++i)
                numeric[i] = static_cast<int>(
                    std::distance(unique.begin(), unique.find(labels[i])));
            report["silhouette_pc2_by_class"] =
                pca::silhouette(scores.leftCols(2), numeric);
        } else {
            report["silhouette_pc2_by_class"] = nullptr;
        }
    }
    {
        // Stability of the basis under dataset growth, on a seeded shuffle so
        // the row order is arbitrary but reproducible.
        int start = config.analysis.stability_start_rows;
        int step = config.analysis.stability_step;
        if (start == 0) start = std::max(p + 2, n / 5);
        if (step == 0) step = std::max(1, n / 25);
        if (start < n) {
            std::vector<int> order(n);
            for (int i = 0; i < n; ++i) order[i] = i;
            Rng rng(mix_seed(config.seed, 0x57ab));
            for (int i = n - 1; i > 0; --i)
                std::swap(order[i], order[static_cast<int>(rng.below(i + 1))]);
            Eigen::MatrixXd shuffled(n, p);
            for (int i = 0; i < n; ++i) shuffled.row(i) = data.row(order[i]);
            const pca::StabilityTrace trace = pca::stability_curve(shuffled, start, step);
            report["stability"] = {{"start_rows", start},
                                   {"step", step},
                                   {"row_counts", trace.row_counts},
                                   {"change", trace.change}};
        } else {
            report["stability"] = nullptr;
        }
    }

    const fs::path dir = analysis_dir(root, columns);
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "report.json", std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInputError("analyze: cannot write report.json");
        out << report.dump(2) << "\n";
    }
    {
        CsvTable out;
        out.header = {"nucleus_id", "class_label"};
        for (int j = 0; j < k; ++j) out.header.push_back("pc" + std::to_string(j + 1));
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> row = {ids[i], labels[i]};
            for (int j = 0; j < k; ++j) row.push_back(io::format_g9(scores(i, j)));
            out.rows.push_back(std::move(row));
        }
        write_csv(dir / "scores.csv", out);
    }
    {
        std::vector<ScatterPoint> points(n);
        for (int i = 0; i < n; ++i)
            points[i] = {scores(i, 0), scores(i, 1), labels[i], ids[i]};
        ScatterStyle style;
        style.x_axis = "PC1 (" + percent(explained(0)) + " of variance)";
        style.y_axis = "PC2 (" + percent(p > 1 ? explained(1) : 0.0) + " of variance)";
        style.title = columns == "brightfield"
                          ? "Principal component scores, brightfield features"
                          : "Principal component scores, all features";
        style.timestamp = !args.no_timestamp;
        write_scatter_svg(dir / "scatter.svg", points, style);
    }

    const std::string rel = "analysis/" + columns + "/";
    manifest.record_file(root, rel + "report.json");
    manifest.record_file(root, rel + "scores.csv");
    manifest.record_file(root, rel + "scatter.svg");
    manifest.stages.push_back("analyze:" + columns);
    manifest.complete = true;
    manifest.save(root);
    std::cout << "analyze(" << columns << "): " << n << " nuclei, two-component variance "
              << percent(report["variance_in_two_components"].get<double>()) << "\n";
    return drop_budget_exceeded(manifest) ? 1 : 0;
}

} // namespace qpicli
