#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "etd/greens.hpp"
#include "etd/imaging.hpp"
#include "etd/sweep.hpp"
#include "test_util.hpp"

using namespace etd;
using namespace etd::testing;

namespace {

constexpr double kOmega = 2 * kPi;
// c_S = 1, c_P = 2: lambda_S = 1, lambda_P = 2 at omega = 2 pi.
const Medium kM2(2.0, 1.0, 1.0, 2);
const Medium kM3(2.0, 1.0, 1.0, 3);

Inclusion density_inclusion(const RVec& c, double rho1 = 1.5, double eps = 0.01) {
    Inclusion inc;
    inc.center = c;
    inc.epsilon = eps;
    inc.rho1 = rho1;
    inc.emt = Emt(c.d);
    inc.kind = ContrastKind::Density;
    return inc;
}

Inclusion elastic_inclusion(const RVec& c, const Medium& m, double eps = 0.01) {
    Inclusion inc;
    inc.center = c;
    inc.epsilon = eps;
    inc.rho1 = m.rho0;
    inc.emt = ball_emt(2.0, 1.0, c.d);
    inc.kind = ContrastKind::Elasticity;
    return inc;
}

// max |f - g| / max |g| over the grid.
template <class F, class G>
double linf_rel(const GridSpec& grid, F f, G g) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const RVec z = grid.node(i);
        const double gv = g(z);
        num = std::max(num, std::abs(f(z) - gv));
        den = std::max(den, std::abs(gv));
    }
    return num / den;
}

}  // namespace

TEST_CASE("Herglotz fields of simple kernels") {
    const auto c = circle_rule(64);
    std::vector<CVec> wp;
    for (const auto& x : c.nodes) wp.push_back(to_complex(x));
    const auto hp = herglotz_kernel(Mode::P, c, wp, 3.0, RVec(2));
    CHECK(norm(hp.value) < 1e-15);

    const auto s = sphere_rule(35);
    std::vector<CVec> ws;
    for (const auto& x : s.nodes) ws.push_back(to_complex(matvec(identity<double>(3) - outer(x, x), unit(3, 0))));
    const auto hs = herglotz_kernel(Mode::S, s, ws, 3.0, RVec(3));
    CHECK(rel_err(hs.value, to_complex(unit(3, 0) * (2.0 / 3))) < 1e-14);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 5; ++t) {
        const RVec z = random_point(rng, 3, 1.0);
        const auto h = herglotz_kernel(Mode::S, s, ws, 3.0, z);
        CMat fd(3);
        for (int p = 0; p < 3; ++p) {
            const CVec dp = fd4([&](const RVec& y) { return herglotz_kernel(Mode::S, s, ws, 3.0, y).value; }, z, p,
                                1e-5 * 2 * kPi / 3.0);
            for (int q = 0; q < 3; ++q) fd(p, q) = dp[q];
        }
        CHECK(rel_err(fd, h.grad) < 1e-7);
    }
    CHECK_THROWS_AS(herglotz_kernel(Mode::P, DirectionSet{2, {}, {}}, {}, 1.0, RVec(2)), std::invalid_argument);
}

TEST_CASE("back-propagators of P data are irrotational and of S data solenoidal") {
    const Medium& m = kM3;
    const Inclusion inc = elastic_inclusion(make_vec({0.1, 0.2, -0.1}), m);
    const IncidentWave w{Mode::P, make_vec({0.6, 0, 0.8}), 1, kOmega};
    const auto dirs = sphere_rule(35);
    const auto rec = synth_farfield(inc, m, w, dirs);
    const RVec z = make_vec({0.3, -0.2, 0.25});
    const auto H = herglotz(rec, dirs, m, kOmega, z);
    auto fd_grad = [&](Mode mode) {
        CMat g(3);
        for (int p = 0; p < 3; ++p) {
            const CVec dp = fd4(
                [&](const RVec& y) {
                    const auto h = herglotz(rec, dirs, m, kOmega, y);
                    return mode == Mode::P ? h.P.value : h.S.value;
                },
                z, p, 1e-4);
            for (int q = 0; q < 3; ++q) g(p, q) = dp[q];
        }
        return g;
    };
    const CMat gp = fd_grad(Mode::P);
    CHECK(norm(gp - transpose(gp)) <= 1e-6 * norm(gp));
    const CMat gs = fd_grad(Mode::S);
    CHECK(std::abs(trace(gs)) <= 1e-6 * norm(gs));
    CHECK(rel_err(gp, H.P.grad) < 1e-7);
    CHECK(rel_err(gs, H.S.grad) < 1e-7);
}

TEST_CASE("back-propagation of synthetic data matches the closed form") {
    std::mt19937_64 rng(11);
    for (int d : {2, 3}) {
        const Medium m(2.0, 1.0, 1.0, d);
        const DirectionSet dirs = d == 2 ? circle_rule(256) : fibonacci_sphere(2048);
        const double tol = d == 2 ? 1e-6 : 1e-3;
        for (int t = 0; t < 8; ++t) {
            const RVec zd = random_point(rng, d, 1.0);
            const RVec z = random_point(rng, d, 1.0);
            const Inclusion inc = t % 2 ? density_inclusion(zd) : elastic_inclusion(zd, m);
            const Mode inc_mode = t % 4 < 2 ? Mode::P : Mode::S;
            const IncidentWave w{inc_mode, random_unit(rng, d), 1 + t % (d - 1), kOmega};
            const auto H = herglotz(synth_farfield(inc, m, w, dirs), dirs, m, kOmega, z);
            for (Mode a : {Mode::P, Mode::S}) {
                const CVec ref = backpropagator_closed_form(inc, m, w, a, z);
                const CVec num = a == Mode::P ? H.P.value : H.S.value;
                // Normalize by the closed form a quarter wavelength from the inclusion, where neither term vanishes.
                const double lam = 2 * kPi / m.kappa(a, kOmega);
                double scale = 0;
                for (int k = 0; k < d; ++k)
                    scale = std::max(scale, norm(backpropagator_closed_form(inc, m, w, a, zd + unit(d, k) * (lam / 4))));
                INFO("d=" << d << " t=" << t << " mode " << std::string(mode_name(a)));
                CHECK(norm(num - ref) <= tol * scale);
            }
        }
    }
    Inclusion zero = density_inclusion(make_vec({0, 0}), kM2.rho0);
    const IncidentWave w{Mode::P, make_vec({1, 0}), 1, kOmega};
    CHECK(norm(backpropagator_closed_form(zero, kM2, w, Mode::P, make_vec({0.2, 0.1}))) == 0.0);
    const Inclusion a = density_inclusion(make_vec({0, 0}), 0.8), b = density_inclusion(make_vec({0, 0}), 0.6);
    const RVec z = make_vec({0.3, 0.1});
    CHECK(rel_err(backpropagator_closed_form(a, kM2, w, Mode::S, z) * 2.0,
                  backpropagator_closed_form(b, kM2, w, Mode::S, z)) < 1e-14);
}

TEST_CASE("trial parameters") {
    const Inclusion inc = density_inclusion(make_vec({0, 0}), 1.5);
    const TrialParams t = default_trial(inc, kM2);
    CHECK(t.rho2 == doctest::Approx(1.1));
    CHECK_NOTHROW(validate_trial(t, inc, kM2));
    TrialParams bad = t;
    bad.rho2 = 0.5;
    bad.kind = ContrastKind::Elasticity;
    try {
        validate_trial(bad, inc, kM2);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("share a sign") != std::string::npos);
        CHECK(msg.find("kind") != std::string::npos);
    }
    CHECK(tau(inc, t, kM2) > 0);

    // Zero contrast: the lighter trial is used and the vacuous sign rule is skipped.
    const Inclusion zero = density_inclusion(make_vec({0, 0}), 1.0);
    const TrialParams tz = default_trial(zero, kM2);
    CHECK(tz.rho2 == doctest::Approx(0.9));
    CHECK_NOTHROW(validate_trial(tz, zero, kM2));

    // Elasticity trials keep the background density.
    Inclusion el = zero;
    el.kind = ContrastKind::Elasticity;
    CHECK(default_trial(el, kM2).rho2 == doctest::Approx(1.0));
}

TEST_CASE("single-shot indicators") {
    const Medium& m = kM2;
    const auto dirs = circle_rule(256);
    const Inclusion inc = density_inclusion(make_vec({0.1, -0.05}));
    const TrialParams trial = default_trial(inc, m);
    const auto ds = build_dataset(inc, m, kOmega, 4, Mode::P, dirs);
    const IndicatorEvaluator ev(ds, trial);
    const GridSpec grid = centered_grid(inc.center, 0.1, 6);

    // Zero data.
    const auto ds0 = build_dataset(density_inclusion(inc.center, m.rho0), m, kOmega, 4, Mode::P, dirs);
    CHECK(IndicatorEvaluator(ds0, trial).single(1, make_vec({0.2, 0.3})).td == 0.0);

    for (std::size_t j = 0; j < ev.records(); ++j) {
        const auto& w = ds.incidents[j];
        // Closed form with both back-propagated modes.
        const double e = linf_rel(
            grid, [&](const RVec& z) { return ev.single(j, z).td; },
            [&](const RVec& z) { return itd_single_density_closed(inc, trial, m, w, z); });
        CHECK(e < 1e-6);
        // The simplification keeping only the incident mode misses the converted-mode term.
        const double e2 = linf_rel(
            grid, [&](const RVec& z) { return ev.single(j, z).td; },
            [&](const RVec& z) { return itd_single_density_simplified(inc, trial, m, w, z); });
        CHECK(e2 > 0.05);
        // The weighted indicator keeps exactly that incident-mode term, weighted by c_P.
        const double e3 = linf_rel(
            grid, [&](const RVec& z) { return ev.single(j, z).w; },
            [&](const RVec& z) { return m.c_P() * itd_single_density_simplified(inc, trial, m, w, z); });
        CHECK(e3 < 1e-6);
    }

    const auto ds1 = build_dataset(inc, m, kOmega, 1, Mode::P, dirs);
    const RVec z = make_vec({0.3, 0.2});
    CHECK(itd_multi(ds1, trial, z) == doctest::Approx(itd_single(ds1, trial, 0, z)).epsilon(1e-14));
    CHECK(iw_multi(ds1, trial, z) == doctest::Approx(iw_single(ds1, trial, 0, z)).epsilon(1e-14));
}

TEST_CASE("multi-shot indicators converge to the closed forms (d = 2, n = 256)") {
    const Medium& m = kM2;
    const auto dirs = circle_rule(256);
    const GridSpec grid = centered_grid(make_vec({0.05, -0.1}), 0.2, 5);  // 2 x 2 lambda_S
    for (Mode a : {Mode::P, Mode::S}) {
        const Inclusion dens = density_inclusion(make_vec({0.05, -0.1}));
        const TrialParams td = default_trial(dens, m);
        const auto dsd = build_dataset(dens, m, kOmega, 256, a, dirs);
        const IndicatorEvaluator evd(dsd, td);
        INFO("incident " << std::string(mode_name(a)));
        CHECK(linf_rel(grid, [&](const RVec& z) { return evd.multi(z).w; },
                       [&](const RVec& z) { return iw_multi_closed(dens, td, m, kOmega, a, z); }) < 0.02);
        CHECK(linf_rel(grid, [&](const RVec& z) { return evd.multi(z).td; },
                       [&](const RVec& z) { return itd_multi_density_full(dens, td, m, kOmega, a, z); }) < 0.02);

        const Inclusion el = elastic_inclusion(make_vec({0.05, -0.1}), m);
        const TrialParams te = default_trial(el, m);
        const auto dse = build_dataset(el, m, kOmega, 256, a, dirs);
        const IndicatorEvaluator eve(dse, te);
        CHECK(linf_rel(grid, [&](const RVec& z) { return eve.multi(z).w; },
                       [&](const RVec& z) { return iw_multi_closed(el, te, m, kOmega, a, z); }) < 0.02);
        CHECK(linf_rel(grid, [&](const RVec& z) { return eve.multi(z).td; },
                       [&](const RVec& z) { return itd_multi_closed(el, te, m, kOmega, a, z); }) < 0.02);
        // TD minus W isolates the mode-conversion term: dominant for P incidence, a few percent for S.
        const double peak = std::abs(iw_multi_closed(el, te, m, kOmega, a, el.center));
        double diff = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto v = eve.multi(grid.node(i));
            diff = std::max(diff, std::abs(v.td - v.w / m.c(a)));
        }
        CHECK(diff > (a == Mode::P ? 0.05 : 0.01) * peak / m.c(a));
    }
}

TEST_CASE("indicator scaling laws and argmax invariance") {
    const Medium& m = kM2;
    const auto dirs = circle_rule(128);
    const Inclusion inc = density_inclusion(make_vec({0.0, 0.1}));
    const TrialParams t = default_trial(inc, m);
    Inclusion inc2 = inc;
    inc2.epsilon = inc.epsilon * std::pow(2.0, 0.5);  // eps^2 doubles
    Inclusion inc3 = inc;
    inc3.rho1 = m.rho0 - 2 * (m.rho0 - inc.rho1);  // tau doubles
    const auto ds1 = build_dataset(inc, m, kOmega, 16, Mode::S, dirs);
    const auto ds2 = build_dataset(inc2, m, kOmega, 16, Mode::S, dirs);
    const auto ds3 = build_dataset(inc3, m, kOmega, 16, Mode::S, dirs);
    const RVec z = make_vec({0.2, -0.1});
    const double v1 = iw_multi(ds1, t, z);
    CHECK(iw_multi(ds2, t, z) == doctest::Approx(2 * v1).epsilon(1e-12));
    CHECK(iw_multi(ds3, t, z) == doctest::Approx(2 * v1).epsilon(1e-12));

    FarFieldDataset scaled = ds1;
    for (auto& row : scaled.samples)
        for (auto& s : row) {
            s.P *= 3.7;
            s.S *= 3.7;
        }
    const GridSpec grid = centered_grid(inc.center, 0.05, 8);
    const IndicatorEvaluator e1(ds1, t), e2(scaled, t);
    for (auto k : {IndicatorKind::TDmulti, IndicatorKind::Wmulti, IndicatorKind::Wsingle}) {
        const auto a = sweep_indicator(k, e1, grid, 3), b = sweep_indicator(k, e2, grid, 3);
        CHECK(a.peak_index == b.peak_index);
    }
}

TEST_CASE("reference kernels") {
    std::mt19937_64 rng(23);
    for (int d : {2, 3}) {
        const Medium m(2.0, 1.0, 1.3, d);
        const Emt md = ball_emt(2.0, 1.0, d), ms = ball_emt(1.5, 0.5, d);
        for (int t = 0; t < 10; ++t) {
            const RVec z = random_point(rng, d, 1.0), zp = random_point(rng, d, 1.0);
            CHECK(phi_kernel(Mode::P, Mode::S, m, kOmega, z, zp) ==
                  doctest::Approx(phi_kernel(Mode::S, Mode::P, m, kOmega, z, zp)).epsilon(1e-14));
            CHECK(psi_kernel(Mode::P, Mode::S, Emt(d), ms, m, kOmega, z, zp) == 0.0);
            CHECK(q_kernel(Mode::S, Emt(d), m, kOmega, z, zp) == 0.0);
            // Bilinearity.
            const double p1 = psi_kernel(Mode::S, Mode::P, md, ms, m, kOmega, z, zp);
            CHECK(psi_kernel(Mode::S, Mode::P, md.scaled(2), ms.scaled(-3), m, kOmega, z, zp) ==
                  doctest::Approx(-6 * p1).epsilon(1e-12));
            for (Mode a : {Mode::P, Mode::S}) {
                const double psi = psi_kernel(a, a, md, md, m, kOmega, z, zp);
                CHECK(rel_err(psi_ball_closed(a, 2.0, 1.0, m, kOmega, z, zp), psi) < 1e-6);
                const double q = q_kernel(a, md, m, kOmega, z, zp);
                CHECK(rel_err(q_ball_closed(a, 2.0, 1.0, m, kOmega, z, zp), q) < 1e-6);
                CHECK(q >= 0);
            }
            // The quoted shear-shear display differs from the kernel.
            const double psi_ss = psi_kernel(Mode::S, Mode::S, md, md, m, kOmega, z, zp);
            CHECK(rel_err(psi_ss_ball_quoted(2.0, 1.0, m, kOmega, z, zp), psi_ss) > 1e-3);
        }
    }
    // Coincidence value in 3D: ||Im Gamma_P(z, z)||^2 = 3 (kappa_P / (12 pi rho0 c_P^2))^2.
    const Medium m(2.0, 1.0, 1.3, 3);
    const double kp = m.kappa(Mode::P, kOmega);
    CHECK(phi_kernel(Mode::P, Mode::P, m, kOmega, RVec(3), RVec(3)) ==
          doctest::Approx(3 * std::pow(kp / (12 * kPi * m.rho0 * m.c_P() * m.c_P()), 2)).epsilon(1e-14));
    // Global maximum at z = z'.
    for (Mode a : {Mode::P, Mode::S}) {
        const auto map = sweep_map(centered_grid(RVec(2), 0.05, 20),
                                   [&](const RVec& z) { return phi_kernel(a, a, kM2, kOmega, z, RVec(2)); });
        CHECK(norm(map.peak_point()) < 1e-12);
        const auto qm = sweep_map(centered_grid(RVec(2), 0.05, 20), [&](const RVec& z) {
            return q_kernel(a, ball_emt(2, 1, 2), kM2, kOmega, z, RVec(2));
        });
        for (double v : qm.values) CHECK(v >= 0);
    }
}

TEST_CASE("indicator maps: flat maps, peaks, widths and export") {
    const Medium& m = kM2;
    const auto dirs = circle_rule(128);
    const Inclusion zero = density_inclusion(make_vec({0, 0}), m.rho0);
    const auto ds0 = build_dataset(zero, m, kOmega, 8, Mode::P, dirs);
    const Inclusion ref = density_inclusion(make_vec({0, 0}));
    const IndicatorEvaluator e0(ds0, default_trial(ref, m));
    const auto flat = sweep_indicator(IndicatorKind::Wmulti, e0, centered_grid(RVec(2), 0.05, 3));
    CHECK(flat.peak_value == 0.0);
    CHECK(flat.peak_index == 0);
    for (const auto& f : flat.fwhm) CHECK_FALSE(f.has_value());
    CHECK(map_sidecar(flat)["fwhm"][0].is_null());

    const Inclusion inc = density_inclusion(make_vec({0.1, -0.15}));
    const auto ds = build_dataset(inc, m, kOmega, 64, Mode::S, dirs);
    const IndicatorEvaluator ev(ds, default_trial(inc, m));
    const GridSpec grid = centered_grid(make_vec({0.1, -0.15}), 0.05, 15);
    const auto map = sweep_indicator(IndicatorKind::Wmulti, ev, grid, 0, 2);
    CHECK(norm(map.peak_point() - inc.center) <= 0.05 + 1e-12);
    for (const auto& f : map.fwhm) {
        REQUIRE(f.has_value());
        CHECK(*f >= 0.3);
        CHECK(*f <= 0.7);
    }
    // Threaded and serial sweeps agree exactly.
    const auto serial = sweep_indicator(IndicatorKind::Wmulti, ev, grid, 0, 1);
    CHECK(serial.values == map.values);

    const std::string csv = map_csv(map);
    CHECK(csv.rfind("x,y,value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(grid.size() + 1));

    CHECK_THROWS_AS(sweep_indicator(IndicatorKind::Wmulti, ev, centered_grid(RVec(2), 0.2, 2)), std::invalid_argument);
    CHECK_NOTHROW(sweep_indicator(IndicatorKind::Wmulti, ev, centered_grid(RVec(2), 0.2, 2), 0, 1, 0.25));
}

TEST_CASE("P and S focal widths scale with the wave speeds") {
    // Soft-solid medium: c_P / c_S = sqrt(12).
    const Medium m(10e3, 1e3, 1000, 2);
    const double omega = 2 * kPi;
    std::array<double, 2> w{};
    for (Mode a : {Mode::P, Mode::S}) {
        const double lam = 2 * kPi / m.kappa(a, omega);
        const auto map = sweep_map(centered_grid(RVec(2), lam / 50, 50),
                                   [&](const RVec& z) { return phi_kernel(a, a, m, omega, z, RVec(2)); });
        REQUIRE(map.fwhm[0].has_value());
        w[a == Mode::P ? 0 : 1] = *map.fwhm[0];
    }
    CHECK(w[0] / w[1] == doctest::Approx(std::sqrt(12.0)).epsilon(0.15));
}
