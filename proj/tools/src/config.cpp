#include "qpicli/config.hpp"

#include <fstream>
#include <set>

#include "qpi/errors.hpp"

namespace qpicli {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key))
            throw qpi::InvalidConfigurationError("config: unknown key \"" + key + "\" in " +
                                                 where);
    }
}

template <typename T>
void read_into(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

qpi::holo::OpticalConfig parse_optics(const json& j) {
    reject_unknown_keys(j,
                        {"width", "height", "pixel_pitch_um", "wavelength_um",
                         "reference_amplitude", "tilt_fx", "tilt_fy"},
                        "optics");
    qpi::holo::OpticalConfig o;
    read_into(j, "width", o.width);
    read_into(j, "height", o.height);
    read_into(j, "pixel_pitch_um", o.pixel_pitch_um);
    read_into(j, "wavelength_um", o.wavelength_um);
    read_into(j, "reference_amplitude", o.reference_amplitude);
    read_into(j, "tilt_fx", o.tilt_fx);
    read_into(j, "tilt_fy", o.tilt_fy);
    return o;
}

std::uint8_t parse_channel(const json& j) {
    const int v = j.get<int>();
    if (v < 0 || v > 255)
        throw qpi::InvalidConfigurationError("config: color channel out of [0, 255]");
    return static_cast<std::uint8_t>(v);
}

PopulationEntry parse_population_entry(const json& j) {
    reject_unknown_keys(j, {"class", "count", "phantom"}, "population entry");
    if (!j.contains("class"))
        throw qpi::InvalidConfigurationError("config: population entry needs a class");
    PopulationEntry entry;
    entry.spec = qpi::holo::PhantomSpec::for_class(
        qpi::holo::phantom_class_from_label(j.at("class").get<std::string>()));
    read_into(j, "count", entry.count);
    if (j.contains("phantom")) {
        const json& p = j.at("phantom");
        reject_unknown_keys(p,
                            {"nucleus_radius_px", "peak_phase_rad", "texture_amplitude_rad",
                             "texture_corr_length_px", "inner_transmittance",
                             "brightfield_noise_sigma", "nucleus_rgb", "background_rgb"},
                            "phantom overrides");
        read_into(p, "nucleus_radius_px", entry.spec.nucleus_radius_px);
        read_into(p, "peak_phase_rad", entry.spec.peak_phase_rad);
        read_into(p, "texture_amplitude_rad", entry.spec.texture_amplitude_rad);
        read_into(p, "texture_corr_length_px", entry.spec.texture_corr_length_px);
        read_into(p, "inner_transmittance", entry.spec.inner_transmittance);
        read_into(p, "brightfield_noise_sigma", entry.spec.brightfield_noise_sigma);
        for (const char* key : {"nucleus_rgb", "background_rgb"}) {
            if (!p.contains(key)) continue;
            const json& rgb = p.at(key);
            if (!rgb.is_array() || rgb.size() != 3)
                throw qpi::InvalidConfigurationError("config: " + std::string(key) +
                                                     " must be [r, g, b]");
            auto* target =
                std::string(key) == "nucleus_rgb" ? entry.spec.nucleus_rgb : entry.spec.background_rgb;
            for (int c = 0; c < 3; ++c) target[c] = parse_channel(rgb.at(c));
        }
    }
    return entry;
}

qpi::recon::ReconConfig parse_recon(const json& j, std::string& method) {
    reject_unknown_keys(j,
                        {"method", "window_radius", "delta_scale", "fixed_delta",
                         "max_outer_iterations", "data_steps_per_iteration",
                         "smooth_steps_per_iteration", "relative_tolerance", "armijo_sigma",
                         "max_halvings"},
                        "reconstruction");
    qpi::recon::ReconConfig r;
    read_into(j, "method", method);
    read_into(j, "window_radius", r.window_radius);
    read_into(j, "delta_scale", r.delta_scale);
    read_into(j, "fixed_delta", r.fixed_delta);
    read_into(j, "max_outer_iterations", r.max_outer_iterations);
    read_into(j, "data_steps_per_iteration", r.data_steps_per_iteration);
    read_into(j, "smooth_steps_per_iteration", r.smooth_steps_per_iteration);
    read_into(j, "relative_tolerance", r.relative_tolerance);
    read_into(j, "armijo_sigma", r.armijo_sigma);
    read_into(j, "max_halvings", r.max_halvings);
    return r;
}

} // namespace

void PipelineConfig::validate() const {
    optics.validate();
    recon.validate();
    if (threads < 1) throw qpi::InvalidConfigurationError("config: threads must be >= 1");
    if (recon_method != "opt" && recon_method != "fourier")
        throw qpi::InvalidConfigurationError("config: method must be opt or fourier");
    if (analysis.columns != "all" && analysis.columns != "brightfield")
        throw qpi::InvalidConfigurationError("config: columns must be all or brightfield");
    if (analysis.stability_start_rows < 0 || analysis.stability_step < 0)
        throw qpi::InvalidConfigurationError("config: stability parameters must be >= 0");
    if (segmentation.kmeans_max_iterations < 1)
        throw qpi::InvalidConfigurationError("config: kmeans_max_iterations must be >= 1");
    if (sensor_noise_std < 0.0)
        throw qpi::InvalidConfigurationError("config: sensor_noise_std must be >= 0");
    if (population.empty())
        throw qpi::InvalidConfigurationError("config: population is empty");
    for (const auto& entry : population) {
        if (entry.count < 1)
            throw qpi::InvalidConfigurationError("config: population counts must be >= 1");
        entry.spec.validate(optics);
    }
}

int PipelineConfig::total_nuclei() const {
    int n = 0;
    for (const auto& entry : population) n += entry.count;
    return n;
}

PipelineConfig parse_config(const json& j) {
    if (!j.is_object()) throw qpi::InvalidConfigurationError("config: root must be an object");
    reject_unknown_keys(j,
                        {"seed", "threads", "output_dir", "optics", "sensor_noise_std",
                         "population", "reconstruction", "segmentation", "analysis"},
                        "config root");
    PipelineConfig c;
    read_into(j, "seed", c.seed);
    read_into(j, "threads", c.threads);
    read_into(j, "output_dir", c.output_dir);
    if (j.contains("optics")) c.optics = parse_optics(j.at("optics"));
    read_into(j, "sensor_noise_std", c.sensor_noise_std);
    if (j.contains("population")) {
        if (!j.at("population").is_array())
            throw qpi::InvalidConfigurationError("config: population must be an array");
        for (const auto& entry : j.at("population"))
            c.population.push_back(parse_population_entry(entry));
    }
    if (j.contains("reconstruction")) c.recon = parse_recon(j.at("reconstruction"), c.recon_method);
    if (j.contains("segmentation")) {
        reject_unknown_keys(j.at("segmentation"), {"kmeans_max_iterations"}, "segmentation");
        read_into(j.at("segmentation"), "kmeans_max_iterations",
                  c.segmentation.kmeans_max_iterations);
    }
    if (j.contains("analysis")) {
        reject_unknown_keys(j.at("analysis"),
                            {"columns", "stability_start_rows", "stability_step"}, "analysis");
        read_into(j.at("analysis"), "columns", c.analysis.columns);
        read_into(j.at("analysis"), "stability_start_rows", c.analysis.stability_start_rows);
        read_into(j.at("analysis"), "stability_step", c.analysis.stability_step);
    }
    if (c.population.empty()) {
        for (auto cls : {qpi::holo::PhantomClass::SmoothSmall, qpi::holo::PhantomClass::SmoothLarge,
                         qpi::holo::PhantomClass::TexturedAbnormal}) {
            PopulationEntry entry;
            entry.spec = qpi::holo::PhantomSpec::for_class(cls);
            entry.count = 1;
            c.population.push_back(entry);
        }
    }
    c.validate();
    return c;
}

PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qpi::InvalidConfigurationError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw qpi::InvalidConfigurationError("config: " + path + ": " + e.what());
    }
    return parse_config(j);
}

nlohmann::json config_to_json(const PipelineConfig& c) {
    json pop = json::array();
    for (const auto& entry : c.population) {
        pop.push_back({{"class", qpi::holo::phantom_class_label(entry.spec.cls)},
                       {"count", entry.count},
                       {"phantom",
                        {{"nucleus_radius_px", entry.spec.nucleus_radius_px},
                         {"peak_phase_rad", entry.spec.peak_phase_rad},
                         {"texture_amplitude_rad", entry.spec.texture_amplitude_rad},
                         {"texture_corr_length_px", entry.spec.texture_corr_length_px},
                         {"inner_transmittance", entry.spec.inner_transmittance},
                         {"brightfield_noise_sigma", entry.spec.brightfield_noise_sigma},
                         {"nucleus_rgb",
                          {entry.spec.nucleus_rgb[0], entry.spec.nucleus_rgb[1],
                           entry.spec.nucleus_rgb[2]}},
                         {"background_rgb",
                          {entry.spec.background_rgb[0], entry.spec.background_rgb[1],
                           entry.spec.background_rgb[2]}}}}});
    }
    return {{"seed", c.seed},
            {"threads", c.threads},
            {"output_dir", c.output_dir},
            {"optics",
             {{"width", c.optics.width},
              {"height", c.optics.height},
              {"pixel_pitch_um", c.optics.pixel_pitch_um},
              {"wavelength_um", c.optics.wavelength_um},
              {"reference_amplitude", c.optics.reference_amplitude},
              {"tilt_fx", c.optics.tilt_fx},
              {"tilt_fy", c.optics.tilt_fy}}},
            {"sensor_noise_std", c.sensor_noise_std},
            {"population", pop},
            {"reconstruction",
             {{"method", c.recon_method},
              {"window_radius", c.recon.window_radius},
              {"delta_scale", c.recon.delta_scale},
              {"fixed_delta", c.recon.fixed_delta},
              {"max_outer_iterations", c.recon.max_outer_iterations},
              {"data_steps_per_iteration", c.recon.data_steps_per_iteration},
              {"smooth_steps_per_iteration", c.recon.smooth_steps_per_iteration},
              {"relative_tolerance", c.recon.relative_tolerance},
              {"armijo_sigma", c.recon.armijo_sigma},
              {"max_halvings", c.recon.max_halvings}}},
            {"segmentation", {{"kmeans_max_iterations", c.segmentation.kmeans_max_iterations}}},
            {"analysis",
             {{"columns", c.analysis.columns},
              {"stability_start_rows", c.analysis.stability_start_rows},
              {"stability_step", c.analysis.stability_step}}}};
}

} // namespace qpicli
