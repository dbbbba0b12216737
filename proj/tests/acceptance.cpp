// Acceptance suite: one PASS/FAIL verdict per criterion, preceded by the individual checks.
// Lines starting with "info" are diagnostics that do not affect the verdict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "etd/greens.hpp"
#include "etd/identities.hpp"
#include "etd/imaging.hpp"
#include "etd/noise.hpp"
#include "etd/parallel.hpp"
#include "etd/sweep.hpp"
#include "test_util.hpp"

using namespace etd;
using namespace etd::testing;

namespace {

constexpr double kOmega = 2 * kPi;
// c_S = 1, c_P = 2: lambda_S = 1, lambda_P = 2 at omega = 2 pi.
const Medium kM2(2.0, 1.0, 1.0, 2);
const Medium kM3(2.0, 1.0, 1.0, 3);

class Criterion {
public:
    Criterion(int id, std::string title, double budget_s)
        : id_(id), title_(std::move(title)), budget_(budget_s), start_(std::chrono::steady_clock::now()) {}

    void check(bool pass, const std::string& what) {
        ok_ = ok_ && pass;
        std::cout << "  " << (pass ? "ok   " : "FAIL ") << what << "\n" << std::flush;
    }
    void info(const std::string& what) { std::cout << "  info " << what << "\n" << std::flush; }

    bool finish() {
        const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        check(t <= budget_, "runtime " + num(t, 3) + " s (budget " + num(budget_, 3) + " s)");
        std::cout << (ok_ ? "PASS" : "FAIL") << " criterion " << id_ << ": " << title_ << "\n\n" << std::flush;
        return ok_;
    }

    static std::string num(double x, int prec = 4) {
        std::ostringstream os;
        os.precision(prec);
        os << x;
        return os.str();
    }

private:
    int id_;
    std::string title_;
    double budget_;
    bool ok_ = true;
    std::chrono::steady_clock::time_point start_;
};

std::string num(double x, int prec = 4) { return Criterion::num(x, prec); }
std::string mode_str(Mode a) { return mode_name(a); }

Inclusion density_inclusion(const RVec& c, double eps) {
    Inclusion inc;
    inc.center = c;
    inc.epsilon = eps;
    inc.rho1 = 1.5;
    inc.emt = Emt(c.d);
    inc.kind = ContrastKind::Density;
    return inc;
}

Inclusion elastic_inclusion(const RVec& c, const Medium& m, double eps) {
    Inclusion inc;
    inc.center = c;
    inc.epsilon = eps;
    inc.rho1 = m.rho0;
    inc.emt = ball_emt(2.0, 1.0, c.d);
    inc.kind = ContrastKind::Elasticity;
    return inc;
}

// max |f - g| / max |g| over precomputed values.
double linf_rel(const std::vector<double>& f, const std::vector<double>& g) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num = std::max(num, std::abs(f[i] - g[i]));
        den = std::max(den, std::abs(g[i]));
    }
    return num / den;
}

std::vector<double> evaluate(const GridSpec& grid, const std::function<double(const RVec&)>& f) {
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), 0, [&](std::size_t i) { out[i] = f(grid.node(i)); });
    return out;
}

// ---- 1 ----

bool identity_suite() {
    Criterion c(1, "plane-wave superposition identities", 60);
    const std::vector<double> seps = {0, 0.5, 1, 3, 5};
    struct Case {
        const char* label;
        const Medium* m;
        DirectionSet dirs;
        double tol;
    };
    const std::vector<Case> cases = {{"d=2 circle 256", &kM2, circle_rule(256), 1e-6},
                                     {"d=3 Fibonacci 2048", &kM3, fibonacci_sphere(2048), 1e-3},
                                     {"d=3 Lebedev order 65", &kM3, sphere_rule(65), 1e-3}};
    for (const auto& cs : cases)
        for (const auto& r : run_identity_suite(*cs.m, kOmega, cs.dirs, seps, cs.tol))
            c.check(r.pass, std::string(cs.label) + " " + r.name + ": max rel err " + num(r.max_rel_err, 3) +
                                " (tol " + num(cs.tol, 2) + ")");
    // Lowest admissible symmetric rules; order 35 integrates too low a degree for kappa r near 31 at 5 wavelengths.
    for (int order : {35, 41, 47}) {
        double worst = 0;
        for (const auto& r : run_identity_suite(kM3, kOmega, sphere_rule(order), seps, 1e-3))
            worst = std::max(worst, r.max_rel_err);
        c.info("d=3 Lebedev order " + std::to_string(order) + ": max rel err over all identities " + num(worst, 3));
    }
    return c.finish();
}

// ---- 2 ----

bool backpropagation() {
    Criterion c(2, "back-propagated far field equals its closed form", 60);
    std::mt19937_64 rng(2024);
    for (int d : {2, 3}) {
        const Medium& m = d == 2 ? kM2 : kM3;
        const DirectionSet dirs = d == 2 ? circle_rule(256) : fibonacci_sphere(2048);
        const double tol = d == 2 ? 1e-6 : 1e-3;
        for (ContrastKind kind : {ContrastKind::Density, ContrastKind::Elasticity})
            for (Mode inc_mode : {Mode::P, Mode::S}) {
                double worst = 0;
                for (int t = 0; t < 20; ++t) {
                    const RVec zd = random_point(rng, d, 1.0);
                    const RVec z = random_point(rng, d, 1.0);
                    const Inclusion inc =
                        kind == ContrastKind::Density ? density_inclusion(zd, 0.01) : elastic_inclusion(zd, m, 0.01);
                    const IncidentWave w{inc_mode, random_unit(rng, d), 1 + t % (d - 1), kOmega};
                    const auto H = herglotz(synth_farfield(inc, m, w, dirs), dirs, m, kOmega, z);
                    for (Mode a : {Mode::P, Mode::S}) {
                        const CVec ref = backpropagator_closed_form(inc, m, w, a, z);
                        const CVec numv = a == Mode::P ? H.P.value : H.S.value;
                        // Scale: closed form a quarter wavelength from the inclusion, where no component vanishes.
                        const double lam = 2 * kPi / m.kappa(a, kOmega);
                        double scale = 0;
                        for (int k = 0; k < d; ++k)
                            scale = std::max(
                                scale, norm(backpropagator_closed_form(inc, m, w, a, zd + unit(d, k) * (lam / 4))));
                        worst = std::max(worst, norm(numv - ref) / scale);
                    }
                }
                c.check(worst <= tol, "d=" + std::to_string(d) + " " + contrast_name(kind) + " contrast, " +
                                          mode_str(inc_mode) + " incidence, 20 pairs: max rel err " + num(worst, 3) +
                                          " (tol " + num(tol, 2) + ")");
            }
    }
    return c.finish();
}

// ---- 3 ----

bool indicator_closed_forms() {
    Criterion c(3, "multi-shot indicators equal their closed forms", 300);
    for (int d : {2, 3}) {
        const Medium& m = d == 2 ? kM2 : kM3;
        const DirectionSet dirs = d == 2 ? circle_rule(256) : fibonacci_sphere(2048);
        const int n = d == 2 ? 256 : 512;
        RVec zd(d);
        zd[0] = 0.05;
        zd[1] = -0.1;
        // Two wavelengths lambda_S across.
        const GridSpec grid = d == 2 ? centered_grid(zd, 0.1, 10) : centered_grid(zd, 0.2, 5);
        const std::string tag = "d=" + std::to_string(d) + " n=" + std::to_string(n);
        for (Mode a : {Mode::P, Mode::S}) {
            const std::string at = tag + " " + mode_str(a) + " incidence";
            {
                const Inclusion inc = density_inclusion(zd, 0.01);
                const TrialParams tr = default_trial(inc, m);
                const auto ds = build_dataset(inc, m, kOmega, n, a, dirs);
                const IndicatorEvaluator ev(ds, tr);
                std::vector<IndicatorValues> v(grid.size());
                parallel_for(grid.size(), 0, [&](std::size_t i) { v[i] = ev.multi(grid.node(i)); });
                std::vector<double> w(v.size()), td(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) {
                    w[i] = v[i].w;
                    td[i] = v[i].td;
                }
                const double ew = linf_rel(w, evaluate(grid, [&](const RVec& z) {
                                               return iw_multi_closed(inc, tr, m, kOmega, a, z);
                                           }));
                c.check(ew <= 0.02, at + ", density W: rel Linf " + num(ew, 3));
                const double etd = linf_rel(td, evaluate(grid, [&](const RVec& z) {
                                                return itd_multi_closed(inc, tr, m, kOmega, a, z);
                                            }));
                c.check(etd <= 0.02, at + ", density TD vs single-mode Phi_aa form: rel Linf " + num(etd, 3));
                const double efull = linf_rel(td, evaluate(grid, [&](const RVec& z) {
                                                  return itd_multi_density_full(inc, tr, m, kOmega, a, z);
                                              }));
                c.info(at + ", density TD vs form with the Phi_ba cross term: rel Linf " + num(efull, 3));
            }
            {
                const Inclusion inc = elastic_inclusion(zd, m, 0.01);
                const TrialParams tr = default_trial(inc, m);
                const auto ds = build_dataset(inc, m, kOmega, n, a, dirs);
                const IndicatorEvaluator ev(ds, tr);
                std::vector<IndicatorValues> v(grid.size());
                parallel_for(grid.size(), 0, [&](std::size_t i) { v[i] = ev.multi(grid.node(i)); });
                std::vector<double> w(v.size()), td(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) {
                    w[i] = v[i].w;
                    td[i] = v[i].td;
                }
                const auto wref = evaluate(grid, [&](const RVec& z) { return iw_multi_closed(inc, tr, m, kOmega, a, z); });
                const double ew = linf_rel(w, wref);
                c.check(ew <= 0.02, at + ", elasticity W: rel Linf " + num(ew, 3));
                const double etd = linf_rel(td, evaluate(grid, [&](const RVec& z) {
                                                return itd_multi_closed(inc, tr, m, kOmega, a, z);
                                            }));
                c.check(etd <= 0.02, at + ", elasticity TD: rel Linf " + num(etd, 3));
                // Pure Psi_aa prediction of TD is W / c_a; the remainder is the mode-conversion term.
                double diff = 0, peak = 0;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    diff = std::max(diff, std::abs(td[i] - wref[i] / m.c(a)));
                    peak = std::max(peak, std::abs(td[i]));
                }
                const std::string line = at + ", elasticity TD minus pure Psi_aa prediction: " +
                                         num(100 * diff / peak, 3) + "% of peak";
                if (a == Mode::P)
                    c.check(diff >= 0.05 * peak, line + " (required >= 5%)");
                else
                    c.info(line);
            }
        }
    }
    return c.finish();
}

// ---- 4 ----

bool localization() {
    Criterion c(4, "W indicator localizes the inclusion at Rayleigh resolution", 120);
    const Medium& m = kM2;
    const DirectionSet dirs = circle_rule(256);
    const double h = 1.0 / 20;  // lambda_S / 20
    const RVec zd = make_vec({0.013, -0.021});
    for (ContrastKind kind : {ContrastKind::Density, ContrastKind::Elasticity})
        for (Mode a : {Mode::P, Mode::S}) {
            const Inclusion inc = kind == ContrastKind::Density ? density_inclusion(zd, 0.01) : elastic_inclusion(zd, m, 0.01);
            const auto ds = build_dataset(inc, m, kOmega, 64, a, dirs);
            const IndicatorEvaluator ev(ds, default_trial(inc, m));
            const double lam = 2 * kPi / m.kappa(a, kOmega);
            const GridSpec grid = centered_grid(RVec(2), h, static_cast<int>(std::lround(lam / h)));
            const auto map = sweep_indicator(IndicatorKind::Wmulti, ev, grid, 0, 0);
            const RVec off = map.peak_point() - zd;
            const double dist = std::max(std::abs(off[0]), std::abs(off[1]));
            const std::string at = std::string(contrast_name(kind)) + " contrast, " + mode_str(a) + " incidence";
            c.check(dist <= h + 1e-12, at + ": peak offset " + num(dist, 3) + " (cell " + num(h, 3) + ")");
            for (int k = 0; k < 2; ++k) {
                const auto& f = map.fwhm[k];
                const double r = f ? *f / lam : -1;
                c.check(f && r >= 0.3 && r <= 0.7,
                        at + ": FWHM axis " + std::to_string(k) + " = " + (f ? num(r, 3) : std::string("n/a")) +
                            " lambda_" + mode_str(a) + " (band [0.3, 0.7])");
            }
        }
    return c.finish();
}

// ---- 5 ----

bool focal_spots() {
    Criterion c(5, "resolution kernels in the soft-solid medium", 120);
    const Medium m(10e3, 1e3, 1000, 2);
    const double omega = 2 * kPi;
    const Emt M = ball_emt(2.0, 1.0, 2);
    const RVec o(2);
    const double ratio = m.c_P() / m.c_S();
    double width[2][2] = {};  // [Phi|Psi][P|S]
    for (int kernel = 0; kernel < 2; ++kernel)
        for (Mode a : {Mode::P, Mode::S}) {
            const double lam = 2 * kPi / m.kappa(a, omega);
            const GridSpec grid = centered_grid(o, lam / 50, 50);
            const auto map = sweep_map(
                grid,
                [&](const RVec& z) {
                    return kernel == 0 ? phi_kernel(a, a, m, omega, z, o) : psi_kernel(a, a, M, M, m, omega, z, o);
                },
                0);
            const std::string name = std::string(kernel == 0 ? "Phi_" : "Psi_") + mode_str(a) + mode_str(a);
            c.check(norm(map.peak_point()) < 1e-12, name + " peak at " + num(map.peak_point()[0], 3) + ", " +
                                                        num(map.peak_point()[1], 3));
            const bool has = map.fwhm[0].has_value() && map.fwhm[1].has_value();
            c.check(has, name + " FWHM resolved on both axes");
            if (has) width[kernel][a == Mode::P ? 0 : 1] = *map.fwhm[0];
        }
    for (int kernel = 0; kernel < 2; ++kernel) {
        const double r = width[kernel][1] > 0 ? width[kernel][0] / width[kernel][1] : 0;
        c.check(std::abs(r / ratio - 1) <= 0.15, std::string(kernel == 0 ? "Phi" : "Psi") + " P/S focal width ratio " +
                                                     num(r, 4) + " vs c_P/c_S = " + num(ratio, 4));
    }
    return c.finish();
}

// ---- 6 ----

bool measurement_noise() {
    Criterion c(6, "measurement-noise statistics", 600);
    for (int d : {2, 3}) {
        const Medium& m = d == 2 ? kM2 : kM3;
        const auto dirs = d == 2 ? circle_rule(256) : sphere_rule(35);
        for (Mode a : {Mode::P, Mode::S}) {
            const double lam = 2 * kPi / m.kappa(a, kOmega);
            const RVec z(d);
            const RMat c0 = herglotz_noise_cov_closed(a, m, kOmega, 0.1, z, z);
            for (double sep : {0.0, 0.25, 1.0}) {
                RVec zp(d);
                zp[0] = sep * lam;
                const CMat e = herglotz_noise_cov_mc(a, dirs, m, kOmega, 0.1, z, zp, 2000, 5, 0);
                const double err = norm(e - to_complex(herglotz_noise_cov_closed(a, m, kOmega, 0.1, z, zp))) / norm(c0);
                c.check(err <= 0.1, "d=" + std::to_string(d) + " " + mode_str(a) + " back-propagated noise covariance at " +
                                        num(sep, 2) + " lambda, M=2000: rel err " + num(err, 3));
            }
        }
    }
    const std::vector<RVec> pts = {RVec(2)};
    const double sigma = 1e-4;
    for (ContrastKind kind : {ContrastKind::Density, ContrastKind::Elasticity})
        for (Mode a : {Mode::P, Mode::S}) {
            const Inclusion inc = kind == ContrastKind::Density ? density_inclusion(RVec(2), 0.02)
                                                                : elastic_inclusion(RVec(2), kM2, 0.02);
            const TrialParams tr = default_trial(inc, kM2);
            double var[2];
            for (int k = 0; k < 2; ++k) {
                const int n = k == 0 ? 8 : 32;
                const auto ds = build_dataset(inc, kM2, kOmega, n, a, circle_rule(128));
                const auto s = measurement_ensemble(ds, tr, sigma, pts, 2000, 3, 0);
                const auto sum = summarize(s[0]);
                var[k] = sum.variance;
                const double pred = measurement_cov_closed(kind, a, tr, kM2, kOmega, n, sigma, pts[0], pts[0]);
                const std::string at = std::string(contrast_name(kind)) + " " + mode_str(a) + " n=" + std::to_string(n);
                const double rv = sum.variance / pred;
                c.check(std::abs(rv - 1) <= 0.1, at + ": W variance / closed form = " + num(rv, 4));
                const double snr = sum.mean / std::sqrt(sum.variance);
                const double rs = snr / snr_closed(kind, a, inc, kM2, kOmega, n, sigma, pts[0]);
                c.check(std::abs(rs - 1) <= 0.15, at + ": empirical SNR / closed form = " + num(rs, 4));
            }
            const double r = var[1] / var[0];
            c.check(std::abs(r / 0.25 - 1) <= 0.2, std::string(contrast_name(kind)) + " " + mode_str(a) +
                                                       ": variance ratio n=32 / n=8 = " + num(r, 4) + " (expect 0.25)");
        }
    return c.finish();
}

// ---- 7 ----

struct Bump {
    RVec y0;
    double s;
    double operator()(const RVec& y) const { return std::exp(-norm2(y - y0) / (2 * s * s)); }
    RVec grad(const RVec& y) const { return (y - y0) * (-(*this)(y) / (s * s)); }
    double lap(const RVec& y) const { return (norm2(y - y0) / (s * s * s * s) - y.d / (s * s)) * (*this)(y); }
};

RandomField bump_field(FieldKind kind) {
    const Bump b{make_vec({0.2, -0.1}), 0.3};
    return field_from_function(
        kind, centered_grid(make_vec({0, 0}), 0.05, 40), [=](const RVec& y) { return b(y); },
        [=](const RVec& y) { return b.grad(y); }, [=](const RVec& y) { return b.lap(y); });
}

bool medium_noise() {
    Criterion c(7, "medium-noise statistics", 900);
    const RVec z(2);
    RandomFieldSpec spec;
    spec.kind = FieldKind::Density;
    spec.sigma = 0.01;
    spec.corr_length = 0.2;
    spec.grid = centered_grid(z, 0.05, 30);
    for (ContrastKind kind : {ContrastKind::Density, ContrastKind::Elasticity}) {
        const Inclusion inc = kind == ContrastKind::Density ? density_inclusion(z, 0.02) : elastic_inclusion(z, kM2, 0.02);
        const TrialParams tr = default_trial(inc, kM2);
        for (Mode a : {Mode::P, Mode::S}) {
            const std::string at = std::string(contrast_name(kind)) + " contrast, " + mode_str(a);
            double var[2];
            for (int k = 0; k < 2; ++k) {
                const int n = k == 0 ? 8 : 32;
                const auto ds = build_dataset(inc, kM2, kOmega, n, a, circle_rule(64));
                const NoisyIndicator ni(ds, tr, spec.grid, {z});
                var[k] = summarize(speckle_ensemble(ni, spec, 500, 21, 0)[0]).variance;
            }
            const double printed = speckle_cov_closed(kind, a, spec, kM2, kOmega, tr, z, z);
            const double r8 = var[0] / printed;
            c.check(std::abs(r8 - 1) <= 0.15,
                    at + ": speckle variance (M=500, n=8) / closed form with prefactor 8 = " + num(r8, 4));
            c.info(at + ": same against prefactor 16 = " + num(r8 / 2, 4));
            const double rn = var[1] / var[0];
            c.check(std::abs(rn - 1) <= 0.1, at + ": speckle variance n=32 / n=8 = " + num(rn, 4));
        }
    }

    const auto eta = bump_field(FieldKind::Density);
    const auto phi = bump_field(FieldKind::Shear);
    const Emt M = ball_emt(2.0, 1.0, 2);
    for (const RVec& zz : {make_vec({0, 0}), make_vec({0.3, 0.25})}) {
        const std::string at = "at (" + num(zz[0], 2) + ", " + num(zz[1], 2) + ")";
        for (Mode a : {Mode::P, Mode::S}) {
            const double e1 = rel_err(clutter_aggregate_density(a, eta, kM2, kOmega, 256, zz),
                                      clutter_aggregate_density_closed(a, eta, kM2, kOmega, zz));
            c.check(e1 <= 0.03, "density-field aggregate, " + mode_str(a) + " " + at + ": rel err " + num(e1, 3));
            const double e2 = rel_err(clutter_aggregate_gradient(a, eta, M, kM2, kOmega, 256, zz),
                                      clutter_aggregate_gradient_closed(a, eta, M, kM2, kOmega, zz));
            c.check(e2 <= 0.03, "density-field gradient aggregate, " + mode_str(a) + " " + at + ": rel err " + num(e2, 3));
        }
        const double e3 = rel_err(clutter_aggregate_shear(Mode::P, phi, kM2, kOmega, 256, zz),
                                  clutter_aggregate_shear_p_closed(phi, kM2, kOmega, zz));
        c.check(e3 <= 0.03, "shear-field aggregate, P " + at + ": rel err " + num(e3, 3));
        const double s = clutter_aggregate_shear(Mode::S, phi, kM2, kOmega, 256, zz);
        const double e4 = rel_err(s, clutter_aggregate_shear_s_closed(phi, kM2, kOmega, zz));
        c.check(e4 <= 0.03, "shear-field aggregate, S " + at + ", prefactor 8: rel err " + num(e4, 3));
        c.info("shear-field aggregate, S " + at + ", prefactor 4: rel err " +
               num(rel_err(s, clutter_aggregate_shear_s_closed(phi, kM2, kOmega, zz, 4.0)), 3));
    }
    return c.finish();
}

// ---- 8 ----

bool hygiene() {
    Criterion c(8, "derivative, contraction and decomposition hygiene", 60);
    std::mt19937_64 rng(808);
    std::normal_distribution<double> N;
    double worst_green = 0, worst_im = 0, worst_pw = 0, worst_h = 0;
    for (const Medium* m : {&kM2, &kM3}) {
        const int d = m->dim;
        for (Mode mode : {Mode::P, Mode::S}) {
            const double lam = 2 * kPi / m->kappa(mode, kOmega);
            const double h = 1e-5 * lam;
            for (int t = 0; t < 6; ++t) {
                const RVec y = random_point(rng, d, 1.0);
                const RVec x = y + random_unit(rng, d) * (lam * (0.05 + 0.5 * t));
                const GreensEval G = kupradze_mode(mode, *m, kOmega, x, y, 2);
                const ImGreensEval I = im_kupradze_mode(mode, *m, kOmega, x, y, 2);
                CTen3 fg(d);
                CTen4 fh(d);
                RTen3 ig(d);
                RTen4 ih(d);
                for (int p = 0; p < d; ++p) {
                    const CMat dv = fd4([&](const RVec& z) { return kupradze_mode(mode, *m, kOmega, z, y, 0).value; }, x, p, h);
                    const CTen3 dg = fd4([&](const RVec& z) { return kupradze_mode(mode, *m, kOmega, z, y, 1).grad; }, x, p, h);
                    const RMat iv = fd4([&](const RVec& z) { return im_kupradze_mode(mode, *m, kOmega, z, y, 0).value; }, x, p, h);
                    const RTen3 igr = fd4([&](const RVec& z) { return im_kupradze_mode(mode, *m, kOmega, z, y, 1).grad; }, x, p, h);
                    for (int a = 0; a < d; ++a)
                        for (int b = 0; b < d; ++b) {
                            fg(a, p, b) = dv(a, b);
                            ig(a, p, b) = iv(a, b);
                            for (int l = 0; l < d; ++l) {
                                fh(l, a, p, b) = dg(a, l, b);
                                ih(l, a, p, b) = igr(a, l, b);
                            }
                        }
                }
                worst_green = std::max({worst_green, rel_err(fg, G.grad), rel_err(fh, G.hessian)});
                worst_im = std::max({worst_im, rel_err(ig, I.grad), rel_err(ih, I.hessian)});

                const IncidentWave w{mode, random_unit(rng, d), 1 + t % (d - 1), kOmega};
                const CMat pg = plane_wave_gradient(w, *m, x);
                CMat pfd(d);
                for (int i = 0; i < d; ++i) {
                    const CVec di = fd4([&](const RVec& q) { return plane_wave(w, *m, q); }, x, i, 1e-3 * lam);
                    for (int j = 0; j < d; ++j) pfd(i, j) = di[j];
                }
                worst_pw = std::max(worst_pw, rel_err(pfd, pg));
            }
        }
        // Back-propagator gradients on data from an elastic inclusion.
        const DirectionSet dirs = d == 2 ? circle_rule(256) : sphere_rule(35);
        const Inclusion inc = elastic_inclusion(random_point(rng, d, 0.3), *m, 0.01);
        const IncidentWave w{Mode::P, random_unit(rng, d), 1, kOmega};
        const auto rec = synth_farfield(inc, *m, w, dirs);
        for (int t = 0; t < 3; ++t) {
            const RVec z = random_point(rng, d, 1.0);
            const auto H = herglotz(rec, dirs, *m, kOmega, z);
            for (Mode a : {Mode::P, Mode::S}) {
                CMat g(d);
                for (int p = 0; p < d; ++p) {
                    const CVec dp = fd4(
                        [&](const RVec& q) {
                            const auto hq = herglotz(rec, dirs, *m, kOmega, q);
                            return a == Mode::P ? hq.P.value : hq.S.value;
                        },
                        z, p, 1e-4);
                    for (int q = 0; q < d; ++q) g(p, q) = dp[q];
                }
                worst_h = std::max(worst_h, rel_err(g, a == Mode::P ? H.P.grad : H.S.grad));
            }
        }
    }
    c.check(worst_green <= 1e-6, "grad and Hessian of Gamma_a vs finite differences: max rel err " + num(worst_green, 3));
    c.check(worst_im <= 1e-6, "grad and Hessian of Im Gamma_a vs finite differences: max rel err " + num(worst_im, 3));
    c.check(worst_pw <= 1e-6, "plane-wave gradients vs finite differences: max rel err " + num(worst_pw, 3));
    c.check(worst_h <= 1e-6, "back-propagator gradients vs finite differences: max rel err " + num(worst_h, 3));

    double worst_c = 0;
    for (int d : {2, 3}) {
        RTen4 t(d);
        for (auto& x : t.v) x = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l) t(i, j, k, l) = N(rng);
        RTen4 s(d);
        for (int l = 0; l < d; ++l)
            for (int mm = 0; mm < d; ++mm)
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q)
                        s(l, mm, p, q) = t(l, mm, p, q) + t(mm, l, p, q) + t(l, mm, q, p) + t(mm, l, q, p) +
                                         t(p, q, l, mm) + t(q, p, l, mm) + t(p, q, mm, l) + t(q, p, mm, l);
        for (const Emt& M : {Emt::from_tensor(s, 1e-12), ball_emt(2.0, 1.0, d)}) {
            RTen3 G(d);
            RTen4 H(d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) {
                        G(i, j, k) = N(rng);
                        for (int l = 0; l < d; ++l) H(i, j, k, l) = N(rng);
                    }
            RTen3 r3(d);
            RTen4 r4(d);
            for (int l = 0; l < d; ++l)
                for (int mm = 0; mm < d; ++mm)
                    for (int r = 0; r < d; ++r) {
                        double a3 = 0;
                        for (int p = 0; p < d; ++p)
                            for (int q = 0; q < d; ++q) a3 += M(l, mm, p, q) * G(p, q, r);
                        r3(l, mm, r) = a3;
                        for (int u = 0; u < d; ++u) {
                            double a4 = 0;
                            for (int p = 0; p < d; ++p)
                                for (int q = 0; q < d; ++q) a4 += M(l, mm, p, q) * H(p, q, r, u);
                            r4(l, mm, r, u) = a4;
                        }
                    }
            worst_c = std::max({worst_c, norm(contract_m3(M, G) - r3) / norm(r3), norm(contract_m4(M, H) - r4) / norm(r4)});
        }
    }
    c.check(worst_c <= 1e-13, "EMT contractions vs index loops: max rel err " + num(worst_c, 3));

    double worst_ps = 0;
    for (int d : {2, 3}) {
        for (int t = 0; t < 200; ++t) {
            const RVec xh = random_unit(rng, d);
            CVec w(d);
            for (int i = 0; i < d; ++i) w[i] = cplx(N(rng), N(rng));
            const auto [P, S] = project_farfield_sample(xh, w);
            const double sc = norm(w);
            CVec perp = P;
            for (int i = 0; i < d; ++i) perp[i] -= xh[i] * dot(xh, P);
            worst_ps = std::max({worst_ps, norm(P + S - w) / sc, std::abs(dot(xh, S)) / sc, norm(perp) / sc,
                                 std::abs(norm2(P) + norm2(S) - norm2(w)) / norm2(w)});
        }
        // Synthesized samples: P parallel and S orthogonal to the observation direction.
        const Medium& m = d == 2 ? kM2 : kM3;
        const DirectionSet dirs = d == 2 ? circle_rule(64) : sphere_rule(35);
        const Inclusion inc = elastic_inclusion(random_point(rng, d, 0.3), m, 0.01);
        for (Mode a : {Mode::P, Mode::S}) {
            const auto rec = synth_farfield(inc, m, IncidentWave{a, random_unit(rng, d), 1, kOmega}, dirs);
            for (std::size_t i = 0; i < rec.size(); ++i) {
                const RVec& xh = dirs.nodes[i];
                const double sc = std::max(norm(rec[i].P) + norm(rec[i].S), 1e-300);
                CVec perp = rec[i].P;
                for (int k = 0; k < d; ++k) perp[k] -= xh[k] * dot(xh, rec[i].P);
                worst_ps = std::max({worst_ps, norm(perp) / sc, std::abs(dot(xh, rec[i].S)) / sc});
            }
        }
    }
    c.check(worst_ps <= 1e-12, "P/S decomposition invariants: max rel deviation " + num(worst_ps, 3));
    return c.finish();
}

}  // namespace

int main() {
    const std::vector<std::function<bool()>> criteria = {identity_suite,   backpropagation, indicator_closed_forms,
                                                         localization,     focal_spots,     measurement_noise,
                                                         medium_noise,     hygiene};
    int failed = 0;
    for (const auto& run : criteria) {
        try {
            if (!run()) ++failed;
        } catch (const std::exception& e) {
            std::cout << "  error " << e.what() << "\nFAIL criterion (exception)\n\n";
            ++failed;
        }
    }
    std::cout << (criteria.size() - failed) << " of " << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
