#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "etd/diagnostics.hpp"
#include "etd/greens.hpp"
#include "etd/io_util.hpp"
#include "etd/noise.hpp"
#include "test_util.hpp"

using namespace etd;
using namespace etd::testing;

namespace {

constexpr double kOmega = 2 * kPi;
// c_S = 1, c_P = 2: lambda_S = 1, lambda_P = 2 at omega = 2 pi.
const Medium kM2(2.0, 1.0, 1.0, 2);
const Medium kM3(2.0, 1.0, 1.0, 3);

Inclusion density_inclusion(const RVec& c, double eps = 0.02) {
    Inclusion inc;
    inc.center = c;
    inc.epsilon = eps;
    inc.rho1 = 1.5;
    inc.emt = Emt(c.d);
    inc.kind = ContrastKind::Density;
    return inc;
}

Inclusion elastic_inclusion(const RVec& c, const Medium& m, double eps = 0.02) {
    Inclusion inc;
    inc.center = c;
    inc.epsilon = eps;
    inc.rho1 = m.rho0;
    inc.emt = ball_emt(2.0, 1.0, c.d);
    inc.kind = ContrastKind::Elasticity;
    return inc;
}

RandomFieldSpec field_spec(FieldKind kind, double sigma = 0.01) {
    RandomFieldSpec s;
    s.kind = kind;
    s.sigma = sigma;
    s.corr_length = 0.2;
    s.grid = centered_grid(make_vec({0, 0}), 0.05, 30);
    return s;
}

// Gaussian bump with exact derivatives.
struct Bump {
    RVec y0;
    double s;
    double operator()(const RVec& y) const { return std::exp(-norm2(y - y0) / (2 * s * s)); }
    RVec grad(const RVec& y) const { return (y - y0) * (-(*this)(y) / (s * s)); }
    double lap(const RVec& y) const { return (norm2(y - y0) / (s * s * s * s) - y.d / (s * s)) * (*this)(y); }
};

RandomField bump_field(FieldKind kind, double scale = 1.0) {
    const Bump b{make_vec({0.2, -0.1}), 0.3};
    const GridSpec g = centered_grid(make_vec({0, 0}), 0.05, 40);
    return field_from_function(
        kind, g, [=](const RVec& y) { return scale * b(y); }, [=](const RVec& y) { return b.grad(y) * scale; },
        [=](const RVec& y) { return scale * b.lap(y); });
}

std::string temp_prefix(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("etd_test_" + name)).string();
}

}  // namespace

TEST_CASE("measurement noise: zero sigma, validation and re-split") {
    const auto ds = build_dataset(density_inclusion(make_vec({0, 0})), kM2, kOmega, 4, Mode::P, circle_rule(16));
    const auto same = add_measurement_noise(ds, {0.0, 1});
    for (std::size_t j = 0; j < ds.samples.size(); ++j)
        for (std::size_t i = 0; i < ds.directions.size(); ++i) {
            CHECK(norm(same.samples[j][i].P - ds.samples[j][i].P) == 0.0);
            CHECK(norm(same.samples[j][i].S - ds.samples[j][i].S) == 0.0);
        }
    CHECK_THROWS_AS(add_measurement_noise(ds, {-1.0, 1}), std::invalid_argument);

    const auto noisy = add_measurement_noise(ds, {0.1, 7});
    CHECK_NOTHROW(noisy.validate());
    const auto again = add_measurement_noise(ds, {0.1, 7});
    CHECK(norm(noisy.samples[2][3].S - again.samples[2][3].S) == 0.0);
}

TEST_CASE("measurement noise has zero mean and per-node variance sigma^2 / w") {
    const auto dirs = circle_rule(8);
    FarFieldDataset ds = build_dataset(density_inclusion(make_vec({0, 0})), kM2, kOmega, 1, Mode::P, dirs);
    for (auto& s : ds.samples[0]) s = {CVec(2), CVec(2)};
    const double sigma = 0.2;
    const int M = 10000;
    cplx mean = 0;
    double var = 0;
    for (int t = 0; t < M; ++t) {
        FarFieldDataset d = ds;
        auto rng = trial_engine(3, t);
        add_measurement_noise(d, sigma, rng);
        const CVec x = d.samples[0][5].P + d.samples[0][5].S;
        mean += x[0];
        var += std::norm(x[0]);
    }
    mean /= double(M);
    var /= M;
    const double node_var = sigma * sigma / dirs.weights[5];
    CHECK(std::abs(mean) < 3 * std::sqrt(node_var / M));
    CHECK(var == doctest::Approx(node_var).epsilon(0.05));
}

TEST_CASE("Herglotz noise covariance matches its closed form") {
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
                const CMat e = herglotz_noise_cov_mc(a, dirs, m, kOmega, 0.1, z, zp, 2000, 5, 4);
                const RMat c = herglotz_noise_cov_closed(a, m, kOmega, 0.1, z, zp);
                INFO("d=" << d << " mode " << std::string(mode_name(a)) << " sep " << sep);
                CHECK(norm(e - to_complex(c)) / norm(c0) < 0.1);
            }
        }
    }
}

TEST_CASE("measurement covariance and SNR closed forms: trivial scalings") {
    const RVec z = make_vec({0.1, 0.0});
    const auto inc = density_inclusion(make_vec({0, 0}));
    const auto tr = default_trial(inc, kM2);
    CHECK(measurement_cov_closed(ContrastKind::Density, Mode::P, tr, kM2, kOmega, 8, 0.0, z, z) == 0.0);
    const double v8 = measurement_cov_closed(ContrastKind::Density, Mode::P, tr, kM2, kOmega, 8, 0.1, z, z);
    const double v32 = measurement_cov_closed(ContrastKind::Density, Mode::P, tr, kM2, kOmega, 32, 0.1, z, z);
    CHECK(v32 / v8 == doctest::Approx(0.25).epsilon(1e-14));
    const double s = snr_closed(ContrastKind::Density, Mode::P, inc, kM2, kOmega, 8, 0.1, z);
    CHECK(snr_closed(ContrastKind::Density, Mode::P, inc, kM2, kOmega, 32, 0.1, z) / s ==
          doctest::Approx(2.0).epsilon(1e-14));
    auto zero = inc;
    zero.rho1 = kM2.rho0;
    CHECK(snr_closed(ContrastKind::Density, Mode::P, zero, kM2, kOmega, 8, 0.1, z) == 0.0);
    const auto el = elastic_inclusion(make_vec({0, 0}), kM2);
    CHECK(snr_closed(ContrastKind::Elasticity, Mode::S, el, kM2, kOmega, 8, 0.1, z) > 0);
}

TEST_CASE("measurement-noise variance of the W indicator matches the closed forms") {
    const std::vector<RVec> pts = {make_vec({0, 0})};
    for (const Inclusion& inc : {density_inclusion(make_vec({0, 0})), elastic_inclusion(make_vec({0, 0}), kM2)}) {
        const auto tr = default_trial(inc, kM2);
        double var[2];
        for (int k = 0; k < 2; ++k) {
            const int n = k == 0 ? 8 : 32;
            const auto ds = build_dataset(inc, kM2, kOmega, n, Mode::P, circle_rule(128));
            const double sigma = 1e-4;
            const auto s = measurement_ensemble(ds, tr, sigma, pts, 2000, 3, 4);
            const auto sum = summarize(s[0]);
            var[k] = sum.variance;
            const double pred = measurement_cov_closed(inc.kind, Mode::P, tr, kM2, kOmega, n, sigma, pts[0], pts[0]);
            INFO(std::string(contrast_name(inc.kind)) << " n=" << n);
            CHECK(sum.variance / pred == doctest::Approx(1.0).epsilon(0.1));
            const double snr = sum.mean / std::sqrt(sum.variance);
            CHECK(snr / snr_closed(inc.kind, Mode::P, inc, kM2, kOmega, n, sigma, pts[0]) ==
                  doctest::Approx(1.0).epsilon(0.15));
        }
        CHECK(var[1] / var[0] == doctest::Approx(0.25).epsilon(0.2));
    }
}

TEST_CASE("random fields: validation, zero sigma and determinism") {
    auto spec = field_spec(FieldKind::Density);
    spec.corr_length = 0.1;  // = 2 h
    CHECK_THROWS_AS(sample_random_field(spec, 1), std::invalid_argument);
    spec = field_spec(FieldKind::Density, 0.0);
    for (double v : sample_random_field(spec, 1).values) CHECK(v == 0.0);
    spec = field_spec(FieldKind::Density);
    const auto a = sample_random_field(spec, 9), b = sample_random_field(spec, 9), c = sample_random_field(spec, 10);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    // Compact support: zero at the box corners.
    CHECK(a.values.front() == 0.0);
    CHECK(a.values.back() == 0.0);
}

TEST_CASE("random fields: Monte Carlo variance and correlation") {
    const auto spec = field_spec(FieldKind::Density);
    const std::size_t ic = spec.grid.flat_index({30, 30});
    const std::size_t il = spec.grid.flat_index({30, 34});  // lag 0.2 = l
    const int M = 500;
    double v = 0, c = 0;
    for (int t = 0; t < M; ++t) {
        auto rng = trial_engine(1, t);
        const auto f = sample_random_field(spec, rng);
        v += f.values[ic] * f.values[ic];
        c += f.values[ic] * f.values[il];
    }
    const double s2 = spec.sigma * spec.sigma;
    CHECK(v / M / s2 == doctest::Approx(1.0).epsilon(0.1));
    const double target = field_covariance(spec, spec.grid.node(ic), spec.grid.node(il));
    CHECK(target == doctest::Approx(s2 * std::exp(-0.5) * support_window(spec, spec.grid.node(il))));
    CHECK(c / M / target == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("shear fields: grid derivatives agree with the spectral representation") {
    const auto f = sample_random_field(field_spec(FieldKind::Shear), 3);
    REQUIRE(f.has_derivatives());
    double scale = 0, lscale = 0;
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        scale = std::max(scale, norm(f.gradient[i]));
        lscale = std::max(lscale, std::abs(f.laplacian[i]));
    }
    for (std::size_t i : {std::size_t(1234), std::size_t(1900), std::size_t(2500)}) {
        const RVec y = f.grid.node(i);
        CHECK(std::abs(f.value_at(y) - f.values[i]) <= 1e-10 * std::abs(f.sigma));
        CHECK(norm(f.gradient_at(y) - f.gradient[i]) <= 1e-6 * scale);
        CHECK(std::abs(f.laplacian_at(y) - f.laplacian[i]) <= 1e-6 * lscale);
    }
    // Off-grid finite differences of the same representation.
    const RVec y = make_vec({0.123, -0.311});
    const double h = 1e-3;
    auto val = [&](const RVec& x) { return f.value_at(x); };
    for (int k = 0; k < 2; ++k) CHECK(std::abs(fd4(val, y, k, h) - f.gradient_at(y)[k]) <= 1e-6 * scale);
    auto gk = [&](int k) { return [&f, k](const RVec& x) { return f.gradient_at(x)[k]; }; };
    const double lap = fd4(gk(0), y, 0, h) + fd4(gk(1), y, 1, h);
    CHECK(std::abs(lap - f.laplacian_at(y)) <= 1e-6 * lscale);
}

TEST_CASE("Born validity guard") {
    std::vector<std::string> seen;
    set_warning_handler([&](const std::string& s) { seen.push_back(s); });
    CHECK(check_born_validity(field_spec(FieldKind::Density, 0.01), kM2, kOmega));
    CHECK_FALSE(check_born_validity(field_spec(FieldKind::Density, 0.1), kM2, kOmega));
    set_warning_handler(nullptr);
    CHECK(seen.size() == 1);
}

TEST_CASE("clutter operators: zero field, linearity and kind checks") {
    const RVec z = make_vec({0.1, 0.05});
    const IncidentWave w{Mode::P, make_vec({0.6, 0.8}), 1, kOmega};
    const auto eta = bump_field(FieldKind::Density), eta2 = bump_field(FieldKind::Density, 2.0);
    const auto zero = bump_field(FieldKind::Density, 0.0);
    const auto phi = bump_field(FieldKind::Shear), phi2 = bump_field(FieldKind::Shear, 2.0);
    for (Mode a : {Mode::P, Mode::S}) {
        CHECK(norm(clutter_error_density(a, zero, kM2, kOmega, w, z)) == 0.0);
        const CVec e1 = clutter_error_density(a, eta, kM2, kOmega, w, z);
        CHECK(norm(e1) > 0);
        CHECK(rel_err(clutter_error_density(a, eta2, kM2, kOmega, w, z), e1 * 2.0) < 1e-13);
        CHECK(rel_err(clutter_error_density_gradient(a, eta2, kM2, kOmega, w, z),
                      clutter_error_density_gradient(a, eta, kM2, kOmega, w, z) * 2.0) < 1e-13);
        CHECK(rel_err(clutter_error_shear(a, phi2, kM2, kOmega, w, z),
                      clutter_error_shear(a, phi, kM2, kOmega, w, z) * 2.0) < 1e-13);
    }
    CHECK_THROWS_AS(clutter_error_density(Mode::P, phi, kM2, kOmega, w, z), std::invalid_argument);
    CHECK_THROWS_AS(clutter_error_shear(Mode::P, eta, kM2, kOmega, w, z), std::invalid_argument);
    RandomField bare = phi;
    bare.gradient.clear();
    CHECK_THROWS_AS(clutter_error_shear(Mode::P, bare, kM2, kOmega, w, z), std::invalid_argument);

    // Gradient against finite differences in z.
    auto ev = [&](const RVec& x) { return clutter_error_density(Mode::S, eta, kM2, kOmega, w, x); };
    const CMat G = clutter_error_density_gradient(Mode::S, eta, kM2, kOmega, w, z);
    for (int p = 0; p < 2; ++p) {
        const CVec fd = fd4(ev, z, p, 1e-3);
        for (int q = 0; q < 2; ++q) CHECK(std::abs(fd[q] - G(p, q)) < 1e-6 * max_abs(G));
    }
}

TEST_CASE("noisy back-propagator is the reference plus the clutter term") {
    const auto inc = density_inclusion(make_vec({0, 0}));
    const auto ds = build_dataset(inc, kM2, kOmega, 4, Mode::S, circle_rule(64));
    const RVec z = make_vec({0.1, 0.2});
    const auto& w = ds.incidents[1];
    const auto ref = herglotz(ds.samples[1], ds.directions, kM2, kOmega, z);
    const auto zero = bump_field(FieldKind::Density, 0.0);
    CHECK(norm(noisy_backpropagator(ds.samples[1], ds.directions, zero, kM2, w, Mode::S, z) - ref.S.value) == 0.0);
    for (FieldKind k : {FieldKind::Density, FieldKind::Shear}) {
        const auto f = bump_field(k, 0.01), half = bump_field(k, 0.005);
        const CVec full = noisy_backpropagator(ds.samples[1], ds.directions, f, kM2, w, Mode::S, z) - ref.S.value;
        const CVec term = k == FieldKind::Density ? clutter_error_density(Mode::S, f, kM2, kOmega, w, z)
                                                  : clutter_error_shear(Mode::S, f, kM2, kOmega, w, z);
        CHECK(rel_err(full, term) < 1e-12);
        const CVec h = noisy_backpropagator(ds.samples[1], ds.directions, half, kM2, w, Mode::S, z) - ref.S.value;
        CHECK(rel_err(h * 2.0, full) < 1e-9);
    }
}

TEST_CASE("precomputed clutter operator agrees with the direct evaluation") {
    const std::vector<RVec> pts = {make_vec({0, 0}), make_vec({0.3, -0.2})};
    const auto eta = bump_field(FieldKind::Density);
    const auto phi = bump_field(FieldKind::Shear);
    const ClutterOperator op(Mode::P, kM2, kOmega, eta.grid, pts, true);
    const IncidentWave w{Mode::S, make_vec({0, 1}), 1, kOmega};
    for (std::size_t k = 0; k < pts.size(); ++k) {
        CHECK(rel_err(op.value(eta, w, k), clutter_error_density(Mode::P, eta, kM2, kOmega, w, pts[k])) < 1e-14);
        CHECK(rel_err(op.gradient(eta, w, k), clutter_error_density_gradient(Mode::P, eta, kM2, kOmega, w, pts[k])) <
              1e-14);
        CHECK(rel_err(op.gradient(phi, w, k), clutter_error_shear_gradient(Mode::P, phi, kM2, kOmega, w, pts[k])) <
              1e-14);
    }
}

TEST_CASE("multi-shot clutter aggregates match the closed forms") {
    const auto eta = bump_field(FieldKind::Density);
    const auto phi = bump_field(FieldKind::Shear);
    const Emt M = ball_emt(2.0, 1.0, 2);
    for (const RVec& z : {make_vec({0, 0}), make_vec({0.3, 0.25})}) {
        for (Mode a : {Mode::P, Mode::S}) {
            INFO("mode " << std::string(mode_name(a)));
            CHECK(rel_err(clutter_aggregate_density(a, eta, kM2, kOmega, 256, z),
                          clutter_aggregate_density_closed(a, eta, kM2, kOmega, z)) < 0.02);
            CHECK(rel_err(clutter_aggregate_gradient(a, eta, M, kM2, kOmega, 256, z),
                          clutter_aggregate_gradient_closed(a, eta, M, kM2, kOmega, z)) < 0.03);
        }
        CHECK(rel_err(clutter_aggregate_shear(Mode::P, phi, kM2, kOmega, 256, z),
                      clutter_aggregate_shear_p_closed(phi, kM2, kOmega, z)) < 0.03);
        // The shear-S aggregate carries prefactor 4, half the quoted 8.
        const double s = clutter_aggregate_shear(Mode::S, phi, kM2, kOmega, 256, z);
        CHECK(rel_err(s, clutter_aggregate_shear_s_closed(phi, kM2, kOmega, z, 4.0)) < 0.03);
        CHECK(s / clutter_aggregate_shear_s_closed(phi, kM2, kOmega, z) == doctest::Approx(0.5).epsilon(0.03));
    }
}

TEST_CASE("speckle covariance: closed-form scalings and Monte Carlo") {
    const auto inc = density_inclusion(make_vec({0, 0}));
    const auto tr = default_trial(inc, kM2);
    const RVec z = make_vec({0, 0});
    auto spec = field_spec(FieldKind::Density, 0.0);
    CHECK(speckle_cov_closed(ContrastKind::Density, Mode::P, spec, kM2, kOmega, tr, z, z) == 0.0);
    spec.sigma = 0.01;
    const double c1 = speckle_cov_closed(ContrastKind::Density, Mode::P, spec, kM2, kOmega, tr, z, z);
    spec.sigma = 0.02;
    CHECK(speckle_cov_closed(ContrastKind::Density, Mode::P, spec, kM2, kOmega, tr, z, z) / c1 ==
          doctest::Approx(4.0).epsilon(1e-12));
    spec.sigma = 0.01;

    double var[2];
    for (int k = 0; k < 2; ++k) {
        const int n = k == 0 ? 8 : 32;
        const auto ds = build_dataset(inc, kM2, kOmega, n, Mode::P, circle_rule(64));
        const NoisyIndicator ni(ds, tr, spec.grid, {z});
        const auto s = speckle_ensemble(ni, spec, 1000, 21, 4);
        var[k] = summarize(s[0]).variance;
    }
    // Speckle does not average out with more illuminations.
    CHECK(std::abs(var[1] / var[0] - 1) < 0.1);
    // Prefactor 16: the aggregate clutter term is real, so no factor 1/2 enters its second moment.
    const double pred = speckle_cov_closed(ContrastKind::Density, Mode::P, spec, kM2, kOmega, tr, z, z, 16.0);
    CHECK(var[0] / pred == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("ensemble export") {
    const std::string prefix = temp_prefix("ensemble");
    write_ensemble({{"a", {1.0, 2.0, 3.0}, 1.0}, {"b", {0.5, 0.5, 0.5}, 0.0}}, prefix);
    const std::string csv = read_text_file(prefix + ".csv");
    CHECK(csv.rfind("trial,a,b\n", 0) == 0);
    const auto j = nlohmann::json::parse(read_text_file(prefix + ".json"));
    CHECK(j[0]["mean"].get<double>() == doctest::Approx(2.0));
    CHECK(j[0]["variance"].get<double>() == doctest::Approx(1.0));
    CHECK(j[0]["ratio"].get<double>() == doctest::Approx(1.0));
    CHECK(j[1]["ratio"].is_null());
    CHECK_THROWS_AS(write_ensemble({{"a", {1.0}, 0}, {"b", {1.0, 2.0}, 0}}, prefix), std::invalid_argument);
    std::remove((prefix + ".csv").c_str());
    std::remove((prefix + ".json").c_str());
}
