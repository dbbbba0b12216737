#include <cmath>
#include <sstream>
#include <stdexcept>

#include "etd/greens.hpp"
#include "etd/io_util.hpp"
#include "etd/noise.hpp"
#include "etd/parallel.hpp"

namespace etd {

namespace {

// Circular complex Gaussian vector with E|x_k|^2 = var per component.
CVec circular_gaussian(int d, double var, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * var));
    CVec x(d);
    for (int k = 0; k < d; ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        x[k] = cplx(re, im);
    }
    return x;
}

double cell_volume(const GridSpec& g) {
    double h = 1;
    for (int k = 0; k < g.dim(); ++k) h *= g.spacing[k];
    return h;
}

}  // namespace

void add_measurement_noise(FarFieldDataset& ds, double sigma_xi, std::mt19937_64& rng) {
    if (!(sigma_xi >= 0)) throw std::invalid_argument("measurement noise: sigma_xi must be non-negative");
    if (sigma_xi == 0) return;
    const int d = ds.medium.dim;
    const auto& dirs = ds.directions;
    for (auto& row : ds.samples)
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            const CVec total = row[i].P + row[i].S + circular_gaussian(d, sigma_xi * sigma_xi / dirs.weights[i], rng);
            const auto ps = project_farfield_sample(dirs.nodes[i], total);
            row[i].P = ps.first;
            row[i].S = ps.second;
        }
}

FarFieldDataset add_measurement_noise(const FarFieldDataset& ds, const MeasurementNoiseSpec& spec) {
    ds.validate();
    FarFieldDataset out = ds;
    auto rng = trial_engine(spec.seed, 0);
    add_measurement_noise(out, spec.sigma_xi, rng);
    return out;
}

RMat herglotz_noise_cov_closed(Mode a, const Medium& medium, double omega, double sigma_xi, const RVec& z,
                               const RVec& zp) {
    const double c = medium.c(a);
    const RMat G = im_kupradze_mode(a, medium, omega, z, zp, 0).value;
    return G * (4 * medium.rho0 * sigma_xi * sigma_xi * c * c * medium.dim_factor(a, omega));
}

double measurement_cov_closed(ContrastKind kind, Mode a, const TrialParams& trial, const Medium& medium,
                              double omega, int n, double sigma_xi, const RVec& z, const RVec& zp) {
    if (n <= 0) throw std::invalid_argument("measurement covariance: n must be positive");
    const double c = medium.c(a);
    const double s2 = sigma_xi * sigma_xi;
    const double pf = medium.dim_factor(a, omega);
    const double g = medium.gamma();
    if (kind == ContrastKind::Density) {
        const double tt = tau_tilde(trial, medium);
        const double G2 = norm2(im_kupradze_mode(a, medium, omega, z, zp, 0).value);
        return 2 * medium.rho0 * s2 * c * c * c * omega * omega * omega * tt * tt * g / n * pf * G2;
    }
    const double psi = psi_kernel(a, a, trial.emt, trial.emt, medium, omega, z, zp);
    return 2 * medium.rho0 * c * c * c * s2 * g / (omega * n) * pf * psi;
}

double snr_closed(ContrastKind kind, Mode a, const Inclusion& inc, const Medium& medium, double omega, int n,
                  double sigma_xi, const RVec& z) {
    if (!(sigma_xi > 0)) throw std::invalid_argument("snr: sigma_xi must be positive");
    const int d = medium.dim;
    const double c = medium.c(a);
    const double ed = std::pow(inc.epsilon, d);
    const double base = std::pow(2.0, 4 - d) * std::pow(kPi, d - 3) * std::pow(c, d - 1);
    if (kind == ContrastKind::Density) {
        const double G = norm(im_kupradze_mode(a, medium, omega, z, z, 0).value);
        return ed * unit_ball_volume(d) * std::abs(medium.rho0 - inc.rho1) * std::sqrt(n) / sigma_xi *
               std::sqrt(base * std::pow(omega, 5 - d)) * G;
    }
    const double psi = psi_kernel(a, a, inc.emt, inc.emt, medium, omega, z, z);
    return ed * std::sqrt(n) / sigma_xi * std::sqrt(base * std::pow(omega, 1 - d)) * std::sqrt(std::max(psi, 0.0));
}

double speckle_cov_closed(ContrastKind kind, Mode a, const RandomFieldSpec& spec, const Medium& medium, double omega,
                          const TrialParams& trial, const RVec& z, const RVec& zp, double prefactor) {
    spec.grid.validate();
    const GridSpec& g = spec.grid;
    // Nodes inside the window support only.
    std::vector<RVec> nodes;
    std::vector<double> wz, wzp, win;
    auto kernel = [&](const RVec& x, const RVec& y) {
        return kind == ContrastKind::Density ? phi_kernel(a, a, medium, omega, x, y)
                                             : q_kernel(a, trial.emt, medium, omega, x, y);
    };
    for (std::size_t n = 0; n < g.size(); ++n) {
        const RVec y = g.node(n);
        const double w = support_window(spec, y);
        if (w == 0) continue;
        nodes.push_back(y);
        win.push_back(w);
        wz.push_back(kernel(z, y));
        wzp.push_back(kernel(zp, y));
    }
    const double l2 = 2 * spec.corr_length * spec.corr_length;
    double acc = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double row = 0;
        for (std::size_t j = 0; j < nodes.size(); ++j) row += win[j] * wzp[j] * std::exp(-norm2(nodes[i] - nodes[j]) / l2);
        acc += win[i] * wz[i] * row;
    }
    const double hd = cell_volume(g);
    acc *= spec.sigma * spec.sigma * hd * hd;

    const double c = medium.c(a);
    const double r4 = std::pow(medium.rho0, 4);
    const double c4 = std::pow(c, 4);
    const double g2 = medium.gamma() * medium.gamma();
    const double pf2 = std::pow(medium.dim_factor(a, omega), 2);
    if (kind == ContrastKind::Density) {
        const double tt = tau_tilde(trial, medium);
        return prefactor * r4 * c4 * std::pow(omega, 6) * g2 * tt * tt * pf2 * acc;
    }
    return prefactor * r4 * c4 * omega * omega * g2 * pf2 * acc;
}

CMat herglotz_noise_cov_mc(Mode a, const DirectionSet& directions, const Medium& medium, double omega,
                           double sigma_xi, const RVec& z, const RVec& zp, int trials, std::uint64_t seed,
                           int threads) {
    if (trials <= 0) throw std::invalid_argument("Monte Carlo: trials must be positive");
    const int d = medium.dim;
    const double k = medium.kappa(a, omega);
    std::vector<cplx> ez(directions.size()), ezp(directions.size());
    for (std::size_t i = 0; i < directions.size(); ++i) {
        ez[i] = std::exp(cplx(0, k * dot(directions.nodes[i], z))) * directions.weights[i];
        ezp[i] = std::exp(cplx(0, k * dot(directions.nodes[i], zp))) * directions.weights[i];
    }
    std::vector<CMat> partial(trials, CMat(d));
    parallel_for(trials, threads, [&](std::size_t t) {
        auto rng = trial_engine(seed, t);
        CVec h(d), hp(d);
        for (std::size_t i = 0; i < directions.size(); ++i) {
            const CVec xi = circular_gaussian(d, sigma_xi * sigma_xi / directions.weights[i], rng);
            const auto ps = project_farfield_sample(directions.nodes[i], xi);
            const CVec& x = a == Mode::P ? ps.first : ps.second;
            h += x * ez[i];
            hp += x * ezp[i];
        }
        partial[t] = outer(h, conj(hp));
    });
    CMat acc(d);
    for (const auto& p : partial) acc += p;
    return acc * (1.0 / trials);
}

std::vector<std::vector<double>> measurement_ensemble(const FarFieldDataset& ds, const TrialParams& trial,
                                                      double sigma_xi, const std::vector<RVec>& points, int trials,
                                                      std::uint64_t seed, int threads) {
    if (trials <= 0) throw std::invalid_argument("Monte Carlo: trials must be positive");
    std::vector<std::vector<double>> out(points.size(), std::vector<double>(trials));
    parallel_for(trials, threads, [&](std::size_t t) {
        auto rng = trial_engine(seed, t);
        FarFieldDataset noisy = ds;
        add_measurement_noise(noisy, sigma_xi, rng);
        const IndicatorEvaluator eval(noisy, trial);
        for (std::size_t k = 0; k < points.size(); ++k) out[k][t] = eval.multi(points[k]).w;
    });
    return out;
}

std::vector<std::vector<double>> speckle_ensemble(const NoisyIndicator& ind, const RandomFieldSpec& spec, int trials,
                                                  std::uint64_t seed, int threads) {
    if (trials <= 0) throw std::invalid_argument("Monte Carlo: trials must be positive");
    const std::size_t np = ind.reference().size();
    std::vector<std::vector<double>> out(np, std::vector<double>(trials));
    parallel_for(trials, threads, [&](std::size_t t) {
        auto rng = trial_engine(seed, t);
        const RandomField f = sample_random_field(spec, rng);
        const auto v = ind.iw_multi(f);
        for (std::size_t k = 0; k < np; ++k) out[k][t] = v[k];
    });
    return out;
}

EnsembleSummary summarize(const std::vector<double>& s) {
    EnsembleSummary out;
    if (s.empty()) return out;
    for (double x : s) out.mean += x;
    out.mean /= s.size();
    if (s.size() > 1) {
        for (double x : s) out.variance += (x - out.mean) * (x - out.mean);
        out.variance /= (s.size() - 1);
    }
    return out;
}

double sample_covariance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("covariance: need two equal-length samples");
    const double ma = summarize(a).mean, mb = summarize(b).mean;
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - ma) * (b[i] - mb);
    return acc / (a.size() - 1);
}

void write_ensemble(const std::vector<EnsembleQuantity>& quantities, const std::string& prefix) {
    if (quantities.empty()) throw std::invalid_argument("ensemble export: no quantities");
    const std::size_t m = quantities.front().samples.size();
    for (const auto& q : quantities)
        if (q.samples.size() != m) throw std::invalid_argument("ensemble export: sample counts differ");
    std::ostringstream csv;
    csv << "trial";
    for (const auto& q : quantities) csv << "," << q.name;
    csv << "\n";
    for (std::size_t t = 0; t < m; ++t) {
        csv << t;
        for (const auto& q : quantities) csv << "," << fmt17(q.samples[t]);
        csv << "\n";
    }
    write_text_file(prefix + ".csv", csv.str());

    nlohmann::json j = nlohmann::json::array();
    for (const auto& q : quantities) {
        const auto s = summarize(q.samples);
        nlohmann::json e{{"name", q.name}, {"trials", m}, {"mean", s.mean}, {"variance", s.variance},
                         {"prediction", q.prediction}};
        e["ratio"] = q.prediction != 0 ? nlohmann::json(s.variance / q.prediction) : nlohmann::json(nullptr);
        j.push_back(e);
    }
    write_text_file(prefix + ".json", j.dump(2) + "\n");
}

}  // namespace etd
