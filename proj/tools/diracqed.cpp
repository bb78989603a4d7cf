// Command-line front end: band structure, mode-set construction, emitter
// dynamics by the ODE and Laplace engines, and parameter sweeps, with
// plot-ready CSV output and a JSON manifest per run.

#include "diracqed/band_path.hpp"
#include "diracqed/bromwich.hpp"
#include "diracqed/config.hpp"
#include "diracqed/csv.hpp"
#include "diracqed/observables.hpp"
#include "diracqed/ode.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dq = diracqed;
namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const fs::path& dir, const dq::RunManifest& man) {
    std::ofstream out(dir / "manifest.json");
    out << man.to_json(utc_timestamp()).dump(2) << "\n";
}

dq::RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                          const std::string& out_dir, const std::string& engine) {
    std::ifstream in(path);
    if (!in) throw dq::ConfigError("cannot open config '" + path + "'");
    nlohmann::json j;
    in >> j;
    for (const auto& ov : overrides) dq::apply_override(j, ov);
    if (!out_dir.empty()) j["output"]["directory"] = out_dir;
    if (!engine.empty()) j["run"]["engine"] = engine;
    return dq::RunConfig::from_json(j);
}

struct EvolveProducts {
    std::vector<double> t;
    std::vector<dq::cplx> c2_ode;
    std::vector<dq::cplx> c2_laplace;
    std::vector<double> laplace_err;
    dq::Trajectory traj;
    bool have_ode = false;
    bool have_laplace = false;
};

std::vector<double> uniform_grid(double T, int samples) {
    std::vector<double> t(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) t[static_cast<std::size_t>(k)] = T * k / (samples - 1);
    return t;
}

EvolveProducts run_engines(const dq::RunConfig& cfg, const dq::LatticeSpec& lat,
                           const dq::EmitterSpec& em, const dq::SystemSpec& sys,
                           const dq::DiracCone& cone, const dq::KernelParams& kp, double T) {
    EvolveProducts out;
    const int samples = std::max(cfg.samples, 2);
    out.t = uniform_grid(T, samples);

    if (cfg.engine == "ode" || cfg.engine == "both") {
        const auto profile = cfg.angular_profile();
        const auto set = dq::build_mode_set(cone, lat, em, sys, profile, cfg.n_radial, cfg.n_azimuthal);
        out.traj = dq::evolve({cfg.theta_a_rad(), cfg.phi_a_rad()}, set, T, cfg.tolerance, samples);
        out.c2_ode = out.traj.c2;
        out.have_ode = true;
    }
    if (cfg.engine == "laplace" || cfg.engine == "both") {
        const dq::cplx c2_0 = std::polar(std::sin(cfg.theta_a_rad()), cfg.phi_a_rad());
        out.c2_laplace.assign(out.t.size(), c2_0);
        out.laplace_err.assign(out.t.size() > 1 ? out.t.size() - 1 : 0, 0.0);
        if (std::abs(c2_0) > 0.0) {
            std::vector<double> positive(out.t.begin() + 1, out.t.end());
            auto F = [&](dq::cplx s) { return dq::c2_laplace(s, kp, c2_0); };
            dq::BromwichDriverOptions dopt;
            dopt.sigma_t = cfg.inv_sigma_t;
            dopt.tolerance = cfg.inv_tolerance;
            dopt.sigma_override = cfg.inv_sigma_rad_s;
            dopt.omega_override = cfg.inv_omega_max_rad_s;
            const auto res = dq::invert_laplace_batched(F, positive, dq::kernel_feature_scale(kp), dopt);
            for (std::size_t i = 0; i < positive.size(); ++i) out.c2_laplace[i + 1] = res.values[i];
            out.laplace_err = res.err_est;
        }
        out.have_laplace = true;
    }
    return out;
}

int cmd_bands(const dq::RunConfig& cfg) {
    const fs::path dir(cfg.output_directory);
    fs::create_directories(dir);
    dq::RunManifest man;
    man.config = cfg.to_json();

    const auto lat = cfg.lattice();
    const auto em = cfg.emitter();
    const auto model = cfg.model(em.omega21);

    const dq::Vec2 G = dq::k_point_Gamma(lat);
    const dq::Vec2 M = dq::k_point_M(lat);
    const dq::Vec2 K = dq::k_point_K(lat);
    const auto rows = dq::band_path(model, lat, {G, M, K, G}, cfg.bands_samples_per_segment);
    {
        dq::CsvWriter csv((dir / "bands.csv").string(), "arclength,kx,ky,omega1,omega2");
        for (const auto& r : rows) csv.row({r.arclength, r.kappa.x, r.kappa.y, r.omega1, r.omega2});
    }
    man.output_files.push_back("bands.csv");

    try {
        const double fit_radius = cfg.fit_radius_gamma_k_fraction * dq::gamma_k_distance(lat);
        const auto fit = dq::fit_dirac_cone(model, lat, K, fit_radius, cfg.fit_samples_radial,
                                            cfg.fit_directions);
        nlohmann::json cj;
        cj["omega_d_rad_s"] = fit.cone.omega_D;
        cj["alpha_m_per_s"] = fit.cone.slope;
        cj["fit_radius_per_m"] = fit_radius;
        cj["max_residual_rad_s"] = fit.max_residual;
        cj["residual_warning"] = fit.residual_warning;
        std::ofstream out(dir / "conefit.json");
        out << cj.dump(2) << "\n";
        man.output_files.push_back("conefit.json");
        std::cout << "bands: cone fit omega_D = " << fit.cone.omega_D
                  << " rad/s, alpha = " << fit.cone.slope << " m/s, max residual = "
                  << fit.max_residual << " rad/s\n";
    } catch (const dq::ConeFitError& e) {
        man.status = "error";
        man.message = std::string("cone fit failed: ") + e.what();
        write_manifest(dir, man);
        std::cerr << "bands: " << man.message << "\n";
        return 1;
    }
    man.derived["gamma_k_per_m"] = dq::gamma_k_distance(lat);
    write_manifest(dir, man);
    return 0;
}

int cmd_evolve(const dq::RunConfig& cfg) {
    const fs::path dir(cfg.output_directory);
    fs::create_directories(dir);
    dq::RunManifest man;
    man.config = cfg.to_json();
    man.derived = dq::derived_quantities(cfg);

    const auto lat = cfg.lattice();
    const auto em = cfg.emitter();
    const auto sys = cfg.system();
    const auto cone = cfg.cone(lat, em);
    const auto kp = dq::KernelParams::build(lat, cone, em, sys);
    const double T = cfg.default_t_final(kp);

    if (T == 0.0) {
        // single-row trajectories equal to the initial state
        const dq::cplx c1_0 = std::cos(cfg.theta_a_rad());
        const dq::cplx c2_0 = std::polar(std::sin(cfg.theta_a_rad()), cfg.phi_a_rad());
        if (cfg.engine != "laplace") {
            dq::CsvWriter csv((dir / "trajectory_ode.csv").string(),
                              "t,re_c1,im_c1,re_c2,im_c2,field_pop,entropy_bits");
            csv.row({0.0, c1_0.real(), c1_0.imag(), c2_0.real(), c2_0.imag(), 0.0, 0.0});
            man.output_files.push_back("trajectory_ode.csv");
        }
        if (cfg.engine != "ode") {
            dq::CsvWriter csv((dir / "trajectory_laplace.csv").string(), "t,re_c2,im_c2,abs_c2,err_est");
            csv.row({0.0, c2_0.real(), c2_0.imag(), std::abs(c2_0), 0.0});
            man.output_files.push_back("trajectory_laplace.csv");
        }
        write_manifest(dir, man);
        return 0;
    }

    const auto prod = run_engines(cfg, lat, em, sys, cone, kp, T);

    if (cfg.export_modes) {
        const auto set = dq::build_mode_set(cone, lat, em, sys, cfg.angular_profile(),
                                            cfg.n_radial, cfg.n_azimuthal);
        std::ofstream out(dir / "modes.csv");
        dq::write_mode_set_csv(set, out);
        man.output_files.push_back("modes.csv");
    }

    if (prod.have_ode) {
        dq::CsvWriter csv((dir / "trajectory_ode.csv").string(),
                          "t,re_c1,im_c1,re_c2,im_c2,field_pop,entropy_bits");
        for (std::size_t i = 0; i < prod.t.size(); ++i) {
            csv.row({prod.t[i], prod.traj.c1[i].real(), prod.traj.c1[i].imag(),
                     prod.traj.c2[i].real(), prod.traj.c2[i].imag(), prod.traj.field_pop[i],
                     prod.traj.entropy_bits[i]});
        }
        man.output_files.push_back("trajectory_ode.csv");
        man.derived["ode_norm_drift"] = prod.traj.max_norm_drift;
    }
    if (prod.have_laplace) {
        dq::CsvWriter csv((dir / "trajectory_laplace.csv").string(), "t,re_c2,im_c2,abs_c2,err_est");
        for (std::size_t i = 0; i < prod.t.size(); ++i) {
            const double err = i == 0 ? 0.0 : prod.laplace_err[i - 1];
            csv.row({prod.t[i], prod.c2_laplace[i].real(), prod.c2_laplace[i].imag(),
                     std::abs(prod.c2_laplace[i]), err});
        }
        man.output_files.push_back("trajectory_laplace.csv");
    }
    if (prod.have_ode && prod.have_laplace) {
        double max_dev = 0.0;
        dq::CsvWriter csv((dir / "comparison.csv").string(), "t,re_c2_ode,re_c2_laplace,abs_dev");
        for (std::size_t i = 0; i < prod.t.size(); ++i) {
            const double dev = std::abs(prod.c2_ode[i].real() - prod.c2_laplace[i].real());
            max_dev = std::max(max_dev, dev);
            csv.row({prod.t[i], prod.c2_ode[i].real(), prod.c2_laplace[i].real(), dev});
        }
        man.output_files.push_back("comparison.csv");
        man.derived["max_re_c2_deviation"] = max_dev;
        std::cout << "evolve: max |Re c2_ode - Re c2_laplace| = " << max_dev << "\n";
    }

    // oscillation-frequency report on the available Re c2
    try {
        std::vector<double> re(prod.t.size());
        const auto& src = prod.have_ode ? prod.c2_ode : prod.c2_laplace;
        for (std::size_t i = 0; i < src.size(); ++i) re[i] = src[i].real();
        const auto rep = dq::estimate_oscillation_frequency(prod.t, re);
        nlohmann::json fj;
        fj["zero_crossing_rad_s"] = rep.zero_crossing_rad_s;
        fj["spectrum_peak_rad_s"] = rep.spectrum_peak_rad_s;
        fj["agreement"] = rep.agreement;
        std::ofstream out(dir / "frequency_report.json");
        out << fj.dump(2) << "\n";
        man.output_files.push_back("frequency_report.json");
    } catch (const std::exception& e) {
        man.derived["frequency_report_error"] = e.what();
    }

    write_manifest(dir, man);
    return 0;
}

int cmd_sweep(const dq::RunConfig& base, const std::string& parameter,
              const std::vector<double>& values, int cycles) {
    if (parameter != "V" && parameter != "Nc" && parameter != "d21") {
        throw dq::ConfigError("sweep: parameter must be one of V, Nc, d21");
    }
    if (values.size() < 2) throw dq::ConfigError("sweep: need at least 2 values");

    const fs::path dir(base.output_directory);
    fs::create_directories(dir);
    dq::RunManifest man;
    man.config = base.to_json();

    std::ofstream csv(dir / "sweep.csv");
    if (!csv) throw std::runtime_error("sweep: cannot open output file");
    csv << "value,freq_zero_crossing_rad_s,freq_spectrum_rad_s,decay_rate_per_s,"
           "chi21_over_alpha2_rad_s,status\n";
    std::vector<double> ln_v, ln_f;
    for (const double value : values) {
        dq::RunConfig cfg = base;
        if (parameter == "V") cfg.mode_volume_m3 = value;
        if (parameter == "Nc") cfg.n_cavities = static_cast<int>(value);
        if (parameter == "d21") cfg.d21_debye = value;

        double freq = std::nan(""), fspec = std::nan(""), decay = std::nan(""), chi = std::nan("");
        std::string status = "ok";
        try {
            const auto lat = cfg.lattice();
            const auto em = cfg.emitter();
            const auto sys = cfg.system();
            const auto cone = cfg.cone(lat, em);
            const auto kp = dq::KernelParams::build(lat, cone, em, sys);
            chi = kp.collective_scale();
            const auto profile = cfg.angular_profile();
            const auto set = dq::build_mode_set(cone, lat, em, sys, profile, cfg.n_radial,
                                                cfg.n_azimuthal);
            // time window sized to the collective coupling of this value
            const double g_coll = std::sqrt(set.coupling_sq_sum());
            const double T = cfg.t_final_s ? *cfg.t_final_s
                                           : cycles * 2.0 * std::numbers::pi / g_coll;
            const auto traj = dq::evolve({cfg.theta_a_rad(), cfg.phi_a_rad()}, set, T,
                                         cfg.tolerance, cfg.samples);
            std::vector<double> re(traj.c2.size());
            for (std::size_t i = 0; i < re.size(); ++i) re[i] = traj.c2[i].real();
            const auto rep = dq::estimate_oscillation_frequency(traj.t, re);
            freq = rep.zero_crossing_rad_s;
            fspec = rep.spectrum_peak_rad_s;

            // amplitude decay from the envelope of |Re c2| extrema
            std::vector<std::pair<double, double>> peaks;
            for (std::size_t i = 1; i + 1 < re.size(); ++i) {
                const double a = std::abs(re[i]);
                if (a > std::abs(re[i - 1]) && a > std::abs(re[i + 1])) peaks.push_back({traj.t[i], a});
            }
            if (peaks.size() >= 2 && peaks.front().second > 0.0 && peaks.back().second > 0.0) {
                decay = std::log(peaks.front().second / peaks.back().second) /
                        (peaks.back().first - peaks.front().first);
            }
            ln_v.push_back(std::log(value));
            ln_f.push_back(std::log(freq));
        } catch (const std::exception& e) {
            status = e.what();
        }
        char buf[40];
        const double cols[5] = {value, freq, fspec, decay, chi};
        for (double v : cols) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            csv << buf << ',';
        }
        csv << '"' << status << "\"\n";
    }
    csv.close();
    man.output_files.push_back("sweep.csv");

    if (ln_v.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(ln_v.size());
        for (std::size_t i = 0; i < ln_v.size(); ++i) {
            sx += ln_v[i];
            sy += ln_f[i];
            sxx += ln_v[i] * ln_v[i];
            sxy += ln_v[i] * ln_f[i];
        }
        const double exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        man.derived["loglog_exponent"] = exponent;
        std::cout << "sweep: frequency ~ " << parameter << "^" << exponent << "\n";
    } else {
        man.status = "error";
        man.message = "sweep: fewer than 2 successful rows, no exponent fitted";
    }
    write_manifest(dir, man);
    return man.status == "ok" ? 0 : 1;
}

int cmd_kernel_probe(const dq::RunConfig& cfg, int n_re, int n_im) {
    const fs::path dir(cfg.output_directory);
    fs::create_directories(dir);
    dq::RunManifest man;
    man.config = cfg.to_json();
    man.derived = dq::derived_quantities(cfg);

    const auto lat = cfg.lattice();
    const auto em = cfg.emitter();
    const auto cone = cfg.cone(lat, em);
    const auto kp = dq::KernelParams::build(lat, cone, em, cfg.system());
    const double adk = kp.alpha * kp.delta_kappa;

    dq::CsvWriter csv((dir / "kernel_probe.csv").string(), "re_s,im_s,re_K,im_K");
    for (int i = 0; i < n_re; ++i) {
        const double re = adk * std::pow(10.0, -3.0 + 6.0 * i / std::max(1, n_re - 1));
        for (int j = 0; j < n_im; ++j) {
            const double im = adk * (-2.0 + 4.0 * j / std::max(1, n_im - 1));
            const auto K = dq::kernel_total({re, im}, kp);
            csv.row({re, im, K.real(), K.imag()});
        }
    }
    man.output_files.push_back("kernel_probe.csv");
    write_manifest(dir, man);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
    if (const char* th = std::getenv("DIRACQED_THREADS")) {
        const int n = std::atoi(th);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
    CLI::App app{"Quantum emitter dynamics in a Dirac-cone coupled-cavity array"};
    app.require_subcommand(1);

    std::string config_path, out_dir, engine;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--engine", engine, "ode|laplace|both (overrides config)");
    app.add_option("--override", overrides, "dot-path config override key=value")->take_all();

    auto* bands = app.add_subcommand("bands", "tight-binding band structure and cone fit");
    auto* evolve = app.add_subcommand("evolve", "emitter dynamics by the configured engines");
    auto* sweep = app.add_subcommand("sweep", "frequency vs parameter sweep");
    auto* probe = app.add_subcommand("kernel-probe", "memory kernel on a grid of s");

    std::string sweep_param = "V";
    std::vector<double> sweep_values;
    int sweep_cycles = 12;
    sweep->add_option("--parameter", sweep_param, "V|Nc|d21");
    sweep->add_option("--values", sweep_values, "parameter values")->delimiter(',');
    sweep->add_option("--cycles", sweep_cycles, "oscillation cycles per run");

    int probe_n_re = 25, probe_n_im = 21;
    probe->add_option("--n-re", probe_n_re, "points along Re s (log around alpha*dk)");
    probe->add_option("--n-im", probe_n_im, "points along Im s");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = load_config(config_path, overrides, out_dir, engine);
        if (bands->parsed()) return cmd_bands(cfg);
        if (evolve->parsed()) return cmd_evolve(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg, sweep_param, sweep_values, sweep_cycles);
        if (probe->parsed()) return cmd_kernel_probe(cfg, probe_n_re, probe_n_im);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
