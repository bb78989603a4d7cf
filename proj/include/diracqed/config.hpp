#pragma once

#include "diracqed/angular_profile.hpp"
#include "diracqed/dirac_cone.hpp"
#include "diracqed/emitter.hpp"
#include "diracqed/kernels.hpp"
#include "diracqed/lattice.hpp"
#include "diracqed/tight_binding.hpp"
#include "diracqed/version.hpp"

#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace diracqed {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full description of one run. Keys carry explicit units; angles are
/// degrees in the file and converted once on load.
struct RunConfig {
    // lattice
    double a_m = 0.0;
    // model
    std::string model_preset;               // "symmetric" | "identity" | "" (file)
    std::string overlap_file;
    std::optional<double> model_nu_rad_s;   // empty: use omega21
    int bands_samples_per_segment = 150;
    // cone
    std::string cone_source = "explicit";   // "explicit" | "fit"
    std::optional<double> omega_d_rad_s;    // empty: omega_D = omega21
    double alpha_m_per_s = 0.0;
    std::optional<double> delta_kappa_per_m;
    std::optional<double> delta_kappa_gamma_k_fraction;
    double fit_radius_gamma_k_fraction = 0.002;
    int fit_samples_radial = 8;
    int fit_directions = 12;
    // emitter
    std::optional<double> lambda21_m;
    std::optional<double> omega21_rad_s;
    double d21_debye = 0.0;
    double theta_a_deg = 0.0;
    double phi_a_deg = 0.0;
    // system
    int n_cavities = 1;
    double mode_volume_m3 = 0.0;
    // bath
    int n_radial = 200;
    int n_azimuthal = 64;
    std::string profile = "constant";       // "constant" | file path
    bool export_modes = false;
    // run
    std::string engine = "both";            // "ode" | "laplace" | "both"
    std::optional<double> t_final_s;        // empty: 20 / (chi21/alpha^2)
    int samples = 2000;
    double tolerance = 1e-9;
    // inversion (optional overrides; 0 means automatic)
    double inv_sigma_rad_s = 0.0;
    double inv_omega_max_rad_s = 0.0;
    double inv_sigma_t = 16.0;
    double inv_tolerance = 1e-5;
    // output
    std::string output_directory = "out";

    double theta_a_rad() const { return theta_a_deg * std::numbers::pi / 180.0; }
    double phi_a_rad() const { return phi_a_deg * std::numbers::pi / 180.0; }

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
    nlohmann::json to_json() const;
    void validate() const;

    // resolved pieces
    LatticeSpec lattice() const { return LatticeSpec::triangular(a_m); }

    TightBindingModel model(double nu_default) const {
        const double nu = model_nu_rad_s ? *model_nu_rad_s : nu_default;
        if (!overlap_file.empty()) return TightBindingModel::load(overlap_file);
        if (model_preset == "identity") return TightBindingModel::identity_preset(nu);
        if (model_preset == "symmetric") return TightBindingModel::symmetric_preset(nu);
        throw ConfigError("config: unknown model preset '" + model_preset + "'");
    }

    EmitterSpec emitter() const {
        const double theta = theta_a_rad();
        const double phi = phi_a_rad();
        const double d21 = debye_to_si(d21_debye);
        if (lambda21_m) return EmitterSpec::from_wavelength(*lambda21_m, d21, theta, phi);
        if (omega21_rad_s) return EmitterSpec::from_frequency(*omega21_rad_s, d21, theta, phi);
        throw ConfigError("config: emitter needs lambda21_m or omega21_rad_s");
    }

    SystemSpec system() const { return SystemSpec(n_cavities, mode_volume_m3); }

    double resolved_delta_kappa(const LatticeSpec& lat) const {
        if (delta_kappa_per_m) return *delta_kappa_per_m;
        if (delta_kappa_gamma_k_fraction) return *delta_kappa_gamma_k_fraction * gamma_k_distance(lat);
        throw ConfigError("config: cone needs delta_kappa_per_m or delta_kappa_gamma_k_fraction");
    }

    /// Explicit cone, or a fit on the configured model around K.
    DiracCone cone(const LatticeSpec& lat, const EmitterSpec& em) const {
        const double dk = resolved_delta_kappa(lat);
        if (cone_source == "explicit") {
            const double om_d = omega_d_rad_s ? *omega_d_rad_s : em.omega21;
            if (!(alpha_m_per_s > 0.0)) throw ConfigError("config: cone.alpha_m_per_s must be positive");
            return DiracCone(om_d, alpha_m_per_s, dk, k_point_K(lat));
        }
        if (cone_source == "fit") {
            const auto mdl = model(em.omega21);
            const auto fit = fit_dirac_cone(mdl, lat, k_point_K(lat),
                                            fit_radius_gamma_k_fraction * gamma_k_distance(lat),
                                            fit_samples_radial, fit_directions);
            return DiracCone(fit.cone.omega_D, fit.cone.slope, dk, k_point_K(lat));
        }
        throw ConfigError("config: cone.source must be 'explicit' or 'fit'");
    }

    AngularProfile angular_profile() const {
        if (profile == "constant") return AngularProfile::constant();
        return AngularProfile::load_csv(profile);
    }

    double default_t_final(const KernelParams& kp) const {
        return t_final_s ? *t_final_s : 20.0 / kp.collective_scale();
    }
};

namespace detail {

inline const nlohmann::json& need(const nlohmann::json& j, const char* key, const char* section) {
    auto it = j.find(key);
    if (it == j.end()) {
        const std::string where = section[0] ? std::string(section) + "." + key : key;
        throw ConfigError("config: missing '" + where + "'");
    }
    return *it;
}

inline double need_num(const nlohmann::json& j, const char* key, const char* section) {
    const auto& v = need(j, key, section);
    if (!v.is_number()) {
        throw ConfigError(std::string("config: '") + section + "." + key + "' must be a number");
    }
    return v.get<double>();
}

} // namespace detail

inline RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    const auto& lat = detail::need(j, "lattice", "");
    c.a_m = detail::need_num(lat, "a_m", "lattice");

    const auto& model = detail::need(j, "model", "");
    if (model.contains("preset")) c.model_preset = model["preset"].get<std::string>();
    if (model.contains("overlap_file")) c.overlap_file = model["overlap_file"].get<std::string>();
    if (model.contains("nu_rad_s")) c.model_nu_rad_s = model["nu_rad_s"].get<double>();
    if (c.model_preset.empty() && c.overlap_file.empty()) {
        throw ConfigError("config: model needs 'preset' or 'overlap_file'");
    }
    if (j.contains("bands") && j["bands"].contains("samples_per_segment")) {
        c.bands_samples_per_segment = j["bands"]["samples_per_segment"].get<int>();
    }

    const auto& cone = detail::need(j, "cone", "");
    if (cone.contains("source")) c.cone_source = cone["source"].get<std::string>();
    if (cone.contains("omega_d_rad_s")) {
        const auto& od = cone["omega_d_rad_s"];
        if (od.is_string() && od.get<std::string>() == "omega21") {
            c.omega_d_rad_s.reset();
        } else if (od.is_number()) {
            c.omega_d_rad_s = od.get<double>();
        } else {
            throw ConfigError("config: cone.omega_d_rad_s must be a number or \"omega21\"");
        }
    }
    if (cone.contains("alpha_m_per_s")) c.alpha_m_per_s = cone["alpha_m_per_s"].get<double>();
    if (cone.contains("delta_kappa_per_m")) c.delta_kappa_per_m = cone["delta_kappa_per_m"].get<double>();
    if (cone.contains("delta_kappa_gamma_k_fraction")) {
        c.delta_kappa_gamma_k_fraction = cone["delta_kappa_gamma_k_fraction"].get<double>();
    }
    if (c.delta_kappa_per_m && c.delta_kappa_gamma_k_fraction) {
        throw ConfigError("config: give only one of cone.delta_kappa_per_m and "
                          "cone.delta_kappa_gamma_k_fraction");
    }
    if (cone.contains("fit_radius_gamma_k_fraction")) {
        c.fit_radius_gamma_k_fraction = cone["fit_radius_gamma_k_fraction"].get<double>();
    }
    if (cone.contains("fit_samples_radial")) c.fit_samples_radial = cone["fit_samples_radial"].get<int>();
    if (cone.contains("fit_directions")) c.fit_directions = cone["fit_directions"].get<int>();

    const auto& em = detail::need(j, "emitter", "");
    if (em.contains("lambda21_m")) c.lambda21_m = em["lambda21_m"].get<double>();
    if (em.contains("omega21_rad_s")) c.omega21_rad_s = em["omega21_rad_s"].get<double>();
    if (c.lambda21_m && c.omega21_rad_s) {
        throw ConfigError("config: give only one of emitter.lambda21_m and emitter.omega21_rad_s");
    }
    c.d21_debye = detail::need_num(em, "d21_debye", "emitter");
    c.theta_a_deg = detail::need_num(em, "theta_a_deg", "emitter");
    c.phi_a_deg = detail::need_num(em, "phi_a_deg", "emitter");

    const auto& sys = detail::need(j, "system", "");
    c.n_cavities = static_cast<int>(detail::need_num(sys, "n_cavities", "system"));
    c.mode_volume_m3 = detail::need_num(sys, "mode_volume_m3", "system");

    if (j.contains("bath")) {
        const auto& b = j["bath"];
        if (b.contains("n_radial")) c.n_radial = b["n_radial"].get<int>();
        if (b.contains("n_azimuthal")) c.n_azimuthal = b["n_azimuthal"].get<int>();
        if (b.contains("profile")) c.profile = b["profile"].get<std::string>();
        if (b.contains("export_modes")) c.export_modes = b["export_modes"].get<bool>();
    }
    if (j.contains("run")) {
        const auto& r = j["run"];
        if (r.contains("engine")) c.engine = r["engine"].get<std::string>();
        if (r.contains("t_final_s")) c.t_final_s = r["t_final_s"].get<double>();
        if (r.contains("samples")) c.samples = r["samples"].get<int>();
        if (r.contains("tolerance")) c.tolerance = r["tolerance"].get<double>();
    }
    if (j.contains("inversion")) {
        const auto& inv = j["inversion"];
        if (inv.contains("sigma_rad_s")) c.inv_sigma_rad_s = inv["sigma_rad_s"].get<double>();
        if (inv.contains("omega_max_rad_s")) c.inv_omega_max_rad_s = inv["omega_max_rad_s"].get<double>();
        if (inv.contains("sigma_t")) c.inv_sigma_t = inv["sigma_t"].get<double>();
        if (inv.contains("tolerance")) c.inv_tolerance = inv["tolerance"].get<double>();
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        if (o.contains("directory")) c.output_directory = o["directory"].get<std::string>();
    }
    c.validate();
    return c;
}

inline void RunConfig::validate() const {
    if (!(a_m > 0.0)) throw ConfigError("config: lattice.a_m must be positive");
    if (!(d21_debye >= 0.0)) throw ConfigError("config: emitter.d21_debye must be non-negative");
    if (n_cavities < 1) throw ConfigError("config: system.n_cavities must be >= 1");
    if (!(mode_volume_m3 > 0.0)) throw ConfigError("config: system.mode_volume_m3 must be positive");
    if (n_radial < 1 || n_azimuthal < 1) throw ConfigError("config: bath grid counts must be >= 1");
    if (samples < 1) throw ConfigError("config: run.samples must be >= 1");
    if (!(tolerance > 0.0)) throw ConfigError("config: run.tolerance must be positive");
    if (engine != "ode" && engine != "laplace" && engine != "both") {
        throw ConfigError("config: run.engine must be ode, laplace or both");
    }
    if (t_final_s && *t_final_s < 0.0) throw ConfigError("config: run.t_final_s must be >= 0");
}

inline RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return from_json(j);
}

inline nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["lattice"]["a_m"] = a_m;
    if (!model_preset.empty()) j["model"]["preset"] = model_preset;
    if (!overlap_file.empty()) j["model"]["overlap_file"] = overlap_file;
    if (model_nu_rad_s) j["model"]["nu_rad_s"] = *model_nu_rad_s;
    j["bands"]["samples_per_segment"] = bands_samples_per_segment;
    j["cone"]["source"] = cone_source;
    if (omega_d_rad_s) {
        j["cone"]["omega_d_rad_s"] = *omega_d_rad_s;
    } else {
        j["cone"]["omega_d_rad_s"] = "omega21";
    }
    j["cone"]["alpha_m_per_s"] = alpha_m_per_s;
    if (delta_kappa_per_m) j["cone"]["delta_kappa_per_m"] = *delta_kappa_per_m;
    if (delta_kappa_gamma_k_fraction) {
        j["cone"]["delta_kappa_gamma_k_fraction"] = *delta_kappa_gamma_k_fraction;
    }
    j["cone"]["fit_radius_gamma_k_fraction"] = fit_radius_gamma_k_fraction;
    j["cone"]["fit_samples_radial"] = fit_samples_radial;
    j["cone"]["fit_directions"] = fit_directions;
    if (lambda21_m) j["emitter"]["lambda21_m"] = *lambda21_m;
    if (omega21_rad_s) j["emitter"]["omega21_rad_s"] = *omega21_rad_s;
    j["emitter"]["d21_debye"] = d21_debye;
    j["emitter"]["theta_a_deg"] = theta_a_deg;
    j["emitter"]["phi_a_deg"] = phi_a_deg;
    j["system"]["n_cavities"] = n_cavities;
    j["system"]["mode_volume_m3"] = mode_volume_m3;
    j["bath"]["n_radial"] = n_radial;
    j["bath"]["n_azimuthal"] = n_azimuthal;
    j["bath"]["profile"] = profile;
    j["bath"]["export_modes"] = export_modes;
    j["run"]["engine"] = engine;
    if (t_final_s) j["run"]["t_final_s"] = *t_final_s;
    j["run"]["samples"] = samples;
    j["run"]["tolerance"] = tolerance;
    j["inversion"]["sigma_rad_s"] = inv_sigma_rad_s;
    j["inversion"]["omega_max_rad_s"] = inv_omega_max_rad_s;
    j["inversion"]["sigma_t"] = inv_sigma_t;
    j["inversion"]["tolerance"] = inv_tolerance;
    j["output"]["directory"] = output_directory;
    return j;
}

/// Applies "key.path=value" overrides onto a raw config JSON.
inline void apply_override(nlohmann::json& j, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like key.path=value: '" + spec + "'");
    }
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        value = raw; // unquoted strings
    }
    nlohmann::json* node = &j;
    std::size_t pos = 0;
    while (true) {
        const auto dotp = path.find('.', pos);
        const std::string key = path.substr(pos, dotp == std::string::npos ? dotp : dotp - pos);
        if (key.empty()) throw ConfigError("override has an empty path segment: '" + spec + "'");
        if (dotp == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        pos = dotp + 1;
    }
}

/// Resolved run description: config, derived scales, outputs.
struct RunManifest {
    nlohmann::json config;
    nlohmann::json derived;
    std::vector<std::string> output_files;
    std::string status = "ok";
    std::string message;

    nlohmann::json to_json(const std::string& timestamp) const {
        nlohmann::json j;
        j["tool"] = "diracqed";
        j["version"] = version;
        j["timestamp_utc"] = timestamp;
        j["config"] = config;
        j["derived"] = derived;
        j["output_files"] = output_files;
        j["status"] = status;
        if (!message.empty()) j["message"] = message;
        return j;
    }
};

inline nlohmann::json derived_quantities(const RunConfig& cfg) {
    const auto lat = cfg.lattice();
    const auto em = cfg.emitter();
    const auto cone = cfg.cone(lat, em);
    const auto sys = cfg.system();
    const auto kp = KernelParams::build(lat, cone, em, sys);
    nlohmann::json d;
    d["omega21_rad_s"] = em.omega21;
    d["gamma_k_per_m"] = gamma_k_distance(lat);
    d["delta_kappa_per_m"] = cone.delta_kappa;
    d["omega_d_rad_s"] = cone.omega_D;
    d["alpha_m_per_s"] = cone.slope;
    d["chi21"] = kp.chi21;
    d["chi21_over_alpha2_rad_s"] = kp.collective_scale();
    d["d21_C_m"] = em.d21;
    d["t_final_s"] = cfg.default_t_final(kp);
    return d;
}

} // namespace diracqed
