#include "etd/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "etd/identities.hpp"
#include "etd/io_util.hpp"

namespace etd {

namespace {

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out);
    return (std::filesystem::path(cfg.out) / name).string();
}

std::string fmt_point(const RVec& p) {
    std::ostringstream os;
    os << std::setprecision(6) << "(";
    for (int k = 0; k < p.d; ++k) os << (k ? ", " : "") << p[k];
    os << ")";
    return os.str();
}

void log_map(std::ostream& log, const std::string& name, const IndicatorMap& map) {
    log << name << ": peak " << std::setprecision(6) << map.peak_value << " at " << fmt_point(map.peak_point())
        << ", fwhm";
    for (const auto& w : map.fwhm) {
        if (w)
            log << " " << *w;
        else
            log << " n/a";
    }
    log << "\n";
}

RVec grid_center(const ExperimentConfig& cfg) {
    const auto& c = cfg.grid_center ? *cfg.grid_center : cfg.center;
    RVec out(cfg.dim);
    for (int k = 0; k < cfg.dim; ++k) out[k] = c[k];
    return out;
}

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

void check_dataset_matches(const FarFieldDataset& ds, const ExperimentConfig& cfg) {
    const Medium m = cfg.medium();
    std::vector<std::string> errs;
    if (ds.medium.dim != m.dim) errs.push_back("dataset dimension differs from medium.dim");
    if (!same_value(ds.medium.lambda0, m.lambda0)) errs.push_back("dataset lambda0 differs from medium.lambda0");
    if (!same_value(ds.medium.mu0, m.mu0)) errs.push_back("dataset mu0 differs from medium.mu0");
    if (!same_value(ds.medium.rho0, m.rho0)) errs.push_back("dataset rho0 differs from medium.rho0");
    if (!same_value(ds.omega, cfg.omega)) errs.push_back("dataset omega differs from wave.omega");
    if (cfg.record < 0 || static_cast<std::size_t>(cfg.record) >= ds.incidents.size())
        errs.push_back("image.record out of range for the dataset");
    if (errs.empty()) return;
    std::string msg = "dataset is inconsistent with the configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ValidationError(msg);
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    const Medium medium = cfg.medium();
    const Inclusion inc = cfg.inclusion();
    validate_inclusion(inc, medium, cfg.omega);
    FarFieldDataset ds = build_dataset(inc, medium, cfg.omega, cfg.n, cfg.mode, cfg.directions(), cfg.seed);
    if (cfg.sigma_xi > 0) ds = add_measurement_noise(ds, MeasurementNoiseSpec{cfg.sigma_xi, cfg.seed});
    const std::string prefix = out_path(cfg, "dataset");
    write_dataset(ds, prefix);
    log << "simulate: " << ds.incidents.size() << " records x " << ds.directions.size() << " directions";
    if (cfg.sigma_xi > 0) log << ", measurement noise sigma " << cfg.sigma_xi;
    log << " -> " << prefix << ".{csv,json}\n";
    return kExitOk;
}

int cmd_image(const ExperimentConfig& cfg, const std::string& dataset_prefix, std::ostream& log) {
    cfg.validate();
    const std::string prefix =
        dataset_prefix.empty() ? (std::filesystem::path(cfg.out) / "dataset").string() : dataset_prefix;
    const FarFieldDataset ds = read_dataset(prefix);
    check_dataset_matches(ds, cfg);
    const TrialParams trial = cfg.trial();
    validate_trial(trial, cfg.inclusion(), ds.medium);
    const IndicatorEvaluator eval(ds, trial);
    const GridSpec grid = cfg.grid();
    for (const auto& name : cfg.indicators) {
        const IndicatorKind kind = indicator_from_name(name);
        IndicatorMap map = sweep_indicator(kind, eval, grid, static_cast<std::size_t>(cfg.record), cfg.threads);
        map.params["dataset"] = prefix;
        const std::string out = out_path(cfg, std::string("map_") + indicator_name(kind));
        write_map(map, out);
        log_map(log, indicator_name(kind), map);
    }
    return kExitOk;
}

int cmd_kernels(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    const Medium medium = cfg.medium();
    const GridSpec grid = cfg.grid();
    check_spacing(grid, medium, cfg.omega);
    const RVec c = grid_center(cfg);
    const Emt m = cfg.inclusion().emt;
    const double omega = cfg.omega;
    struct Item {
        const char* name;
        std::function<double(const RVec&)> f;
    };
    const std::vector<Item> items = {
        {"PhiPP", [&](const RVec& z) { return phi_kernel(Mode::P, Mode::P, medium, omega, z, c); }},
        {"PhiSS", [&](const RVec& z) { return phi_kernel(Mode::S, Mode::S, medium, omega, z, c); }},
        {"PsiPP", [&](const RVec& z) { return psi_kernel(Mode::P, Mode::P, m, m, medium, omega, z, c); }},
        {"PsiSS", [&](const RVec& z) { return psi_kernel(Mode::S, Mode::S, m, m, medium, omega, z, c); }},
    };
    for (const auto& it : items) {
        IndicatorMap map = sweep_map(grid, it.f, cfg.threads);
        map.params["kernel"] = it.name;
        map.params["omega"] = omega;
        map.params["source"] = std::vector<double>(c.v.begin(), c.v.begin() + c.d);
        write_map(map, out_path(cfg, std::string("kernel_") + it.name));
        log_map(log, it.name, map);
    }
    return kExitOk;
}

int cmd_noise(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    if (cfg.sigma_xi <= 0 && cfg.clutter == "none")
        throw ValidationError("noise: nothing to simulate; set noise.sigma_xi > 0 or clutter.kind");
    const Medium medium = cfg.medium();
    const Inclusion inc = cfg.inclusion();
    validate_inclusion(inc, medium, cfg.omega);
    const TrialParams trial = cfg.trial();
    validate_trial(trial, inc, medium);
    const FarFieldDataset ds = build_dataset(inc, medium, cfg.omega, cfg.n, cfg.mode, cfg.directions(), cfg.seed);
    const RVec z = grid_center(cfg);
    const std::vector<RVec> points = {z};
    log << std::setprecision(6);

    if (cfg.sigma_xi > 0) {
        const auto samples = measurement_ensemble(ds, trial, cfg.sigma_xi, points, cfg.noise_trials, cfg.seed,
                                                  cfg.threads);
        EnsembleQuantity q{"Wmulti_measurement", samples[0],
                           measurement_cov_closed(trial.kind, cfg.mode, trial, medium, cfg.omega, cfg.n,
                                                  cfg.sigma_xi, z, z)};
        const std::string prefix = out_path(cfg, "noise_measurement");
        write_ensemble({q}, prefix);
        const EnsembleSummary s = summarize(q.samples);
        log << "measurement: " << cfg.noise_trials << " trials, variance " << s.variance << ", predicted "
            << q.prediction << ", predicted SNR "
            << snr_closed(inc.kind, cfg.mode, inc, medium, cfg.omega, cfg.n, cfg.sigma_xi, z) << " -> " << prefix
            << ".{csv,json}\n";
    }

    if (cfg.clutter != "none") {
        const RandomFieldSpec spec = cfg.field_spec();
        check_born_validity(spec, medium, cfg.omega);
        const NoisyIndicator ind(ds, trial, spec.grid, points);
        const auto samples = speckle_ensemble(ind, spec, cfg.clutter_trials, cfg.seed, cfg.threads);
        // Closed-form speckle covariance is available for density fluctuations only.
        const double pred = spec.kind == FieldKind::Density
                                ? speckle_cov_closed(trial.kind, cfg.mode, spec, medium, cfg.omega, trial, z, z, 16.0)
                                : 0.0;
        EnsembleQuantity q{std::string("Wmulti_clutter_") + field_kind_name(spec.kind), samples[0], pred};
        const std::string prefix = out_path(cfg, "noise_clutter");
        write_ensemble({q}, prefix);
        const EnsembleSummary s = summarize(q.samples);
        log << "clutter (" << field_kind_name(spec.kind) << "): " << cfg.clutter_trials << " trials, variance "
            << s.variance;
        if (pred > 0) log << ", predicted " << pred;
        log << " -> " << prefix << ".{csv,json}\n";
    }
    return kExitOk;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    const double tol = cfg.verify_tol.value_or(cfg.dim == 2 ? 1e-6 : 1e-3);
    const auto results = run_identity_suite(cfg.medium(), cfg.omega, cfg.directions(), cfg.separations, tol);
    const std::string report = format_identity_report(results);
    write_text_file(out_path(cfg, "identities.txt"), report);
    log << report;
    for (const auto& r : results)
        if (!r.pass) return kExitCheckFailed;
    return kExitOk;
}

}  // namespace etd
