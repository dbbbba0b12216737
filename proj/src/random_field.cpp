#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "etd/diagnostics.hpp"
#include "etd/noise.hpp"

namespace etd {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct WindowGeometry {
    RVec center;
    double radius = 0;
};

WindowGeometry window_geometry(const GridSpec& g) {
    WindowGeometry w{RVec(g.dim()), 0};
    double r = 1e300;
    for (int k = 0; k < g.dim(); ++k) {
        const double ext = (g.counts[k] - 1) * g.spacing[k];
        w.center[k] = g.origin[k] + 0.5 * ext;
        r = std::min(r, 0.5 * ext);
    }
    w.radius = r;
    return w;
}

// w = (1 - s)^4 with s = |y - c|^2 / R^2.
struct WindowEval {
    double w = 0;
    RVec grad;
    double lap = 0;
};

WindowEval window_eval(const RVec& center, double R, const RVec& y) {
    const int d = y.d;
    WindowEval out{0, RVec(d), 0};
    if (R <= 0) {
        out.w = 1;
        return out;
    }
    const RVec x = y - center;
    const double s = norm2(x) / (R * R);
    if (s >= 1) return out;
    const double t = 1 - s;
    const double f1 = -4 * t * t * t;  // df/ds
    const double f2 = 12 * t * t;      // d2f/ds2
    out.w = t * t * t * t;
    out.grad = x * (2 * f1 / (R * R));
    out.lap = f2 * 4 * norm2(x) / (R * R * R * R) + f1 * 2 * d / (R * R);
    return out;
}

void validate_spec(const RandomFieldSpec& spec) {
    std::vector<std::string> errs;
    try {
        spec.grid.validate();
    } catch (const std::invalid_argument& e) {
        errs.push_back(e.what());
    }
    if (errs.empty()) {
        double hmax = 0;
        for (int k = 0; k < spec.grid.dim(); ++k) {
            if (spec.grid.counts[k] < 2) errs.push_back("random field: every grid axis needs at least two nodes");
            hmax = std::max(hmax, spec.grid.spacing[k]);
        }
        if (!(spec.corr_length > 2 * hmax)) {
            std::ostringstream os;
            os << "random field: correlation length " << spec.corr_length << " must exceed twice the grid spacing "
               << hmax;
            errs.push_back(os.str());
        }
    }
    if (!(spec.sigma >= 0)) errs.push_back("random field: sigma must be non-negative");
    if (!errs.empty()) {
        std::string msg = "invalid random field spec:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
}

}  // namespace

const char* field_kind_name(FieldKind k) { return k == FieldKind::Density ? "density" : "shear"; }

double window_value(const RandomField& f, const RVec& y) { return window_eval(f.center, f.radius, y).w; }

double support_window(const RandomFieldSpec& spec, const RVec& y) {
    const auto g = window_geometry(spec.grid);
    return window_eval(g.center, g.radius, y).w;
}

double field_covariance(const RandomFieldSpec& spec, const RVec& y, const RVec& yp) {
    const auto g = window_geometry(spec.grid);
    const double w = window_eval(g.center, g.radius, y).w * window_eval(g.center, g.radius, yp).w;
    if (w == 0) return 0;
    const double l = spec.corr_length;
    return spec.sigma * spec.sigma * w * std::exp(-norm2(y - yp) / (2 * l * l));
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return std::mt19937_64(seq);
}

RandomField sample_random_field(const RandomFieldSpec& spec, std::uint64_t seed) {
    auto rng = trial_engine(seed, 0);
    return sample_random_field(spec, rng);
}

RandomField sample_random_field(const RandomFieldSpec& spec, std::mt19937_64& rng) {
    validate_spec(spec);
    const GridSpec& g = spec.grid;
    const int d = g.dim();
    const double l = spec.corr_length;

    RandomField f;
    f.kind = spec.kind;
    f.grid = g;
    f.sigma = spec.sigma;
    f.corr_length = l;
    const auto geom = window_geometry(g);
    f.center = geom.center;
    f.radius = geom.radius;

    // Periodic embedding: pad each axis by 6 l so wrap-around correlations are below exp(-18).
    std::vector<int> N(d);
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) {
        N[k] = g.counts[k] + static_cast<int>(std::ceil(6 * l / g.spacing[k]));
        N[k] += N[k] % 2;
        total *= N[k];
    }
    auto unflat = [&](std::size_t i, std::vector<int>& mi) {
        for (int k = d - 1; k >= 0; --k) {
            mi[k] = static_cast<int>(i % N[k]);
            i /= N[k];
        }
    };
    auto signed_index = [&](int m, int k) { return m <= N[k] / 2 ? m : m - N[k]; };

    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fwd = fftw_plan_dft(d, N.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft(d, N.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    // Eigenvalues of the circulant covariance.
    std::vector<int> mi(d);
    for (std::size_t i = 0; i < total; ++i) {
        unflat(i, mi);
        double r2 = 0;
        for (int k = 0; k < d; ++k) {
            const double x = signed_index(mi[k], k) * g.spacing[k];
            r2 += x * x;
        }
        buf[i][0] = spec.sigma * spec.sigma * std::exp(-r2 / (2 * l * l));
        buf[i][1] = 0;
    }
    fftw_execute(fwd);

    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cplx> coef(total);
    std::vector<RVec> kvec(total, RVec(d));
    for (std::size_t i = 0; i < total; ++i) {
        unflat(i, mi);
        const double lam = std::max(buf[i][0], 0.0);
        const double re = normal(rng), im = normal(rng);
        bool nyquist = false;
        for (int k = 0; k < d; ++k) {
            nyquist = nyquist || mi[k] == N[k] / 2;
            kvec[i][k] = 2 * kPi * signed_index(mi[k], k) / (N[k] * g.spacing[k]);
        }
        // Nyquist modes are dropped so the off-grid trigonometric sum matches the grid values.
        coef[i] = nyquist ? cplx(0) : std::sqrt(lam / total) * cplx(re, im);
    }

    // Inverse transform of coef * mult, real part sampled on the original grid.
    auto synth = [&](auto mult) {
        for (std::size_t i = 0; i < total; ++i) {
            const cplx v = coef[i] * mult(kvec[i]);
            buf[i][0] = v.real();
            buf[i][1] = v.imag();
        }
        fftw_execute(bwd);
        std::vector<double> out(g.size());
        std::vector<int> gi(d);
        for (std::size_t n = 0; n < g.size(); ++n) {
            gi = g.multi_index(n);
            std::size_t p = 0;
            for (int k = 0; k < d; ++k) p = p * N[k] + gi[k];
            out[n] = buf[p][0];
        }
        return out;
    };

    const auto gval = synth([](const RVec&) { return cplx(1); });
    std::vector<std::vector<double>> ggrad;
    std::vector<double> glap;
    if (spec.kind == FieldKind::Shear) {
        for (int k = 0; k < d; ++k) ggrad.push_back(synth([k](const RVec& kv) { return cplx(0, kv[k]); }));
        glap = synth([](const RVec& kv) { return cplx(-norm2(kv)); });
    }
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    fftw_free(buf);

    f.values.resize(g.size());
    if (spec.kind == FieldKind::Shear) {
        f.gradient.assign(g.size(), RVec(d));
        f.laplacian.assign(g.size(), 0.0);
    }
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto w = window_eval(f.center, f.radius, g.node(n));
        f.values[n] = w.w * gval[n];
        if (spec.kind == FieldKind::Shear) {
            RVec gg(d);
            for (int k = 0; k < d; ++k) gg[k] = ggrad[k][n];
            f.gradient[n] = w.grad * gval[n] + gg * w.w;
            f.laplacian[n] = w.lap * gval[n] + 2 * dot(w.grad, gg) + w.w * glap[n];
        }
    }

    for (std::size_t i = 0; i < total; ++i)
        if (coef[i] != cplx(0)) {
            f.wavevectors.push_back(kvec[i]);
            f.coefficients.push_back(coef[i]);
        }
    return f;
}

RandomField field_from_function(FieldKind kind, const GridSpec& grid, const std::function<double(const RVec&)>& fn,
                                const std::function<RVec(const RVec&)>& grad,
                                const std::function<double(const RVec&)>& lap) {
    grid.validate();
    if (!fn) throw std::invalid_argument("analytic field: value function required");
    if (kind == FieldKind::Shear && (!grad || !lap))
        throw std::invalid_argument("analytic field: shear fields need gradient and Laplacian functions");
    RandomField f;
    f.kind = kind;
    f.grid = grid;
    f.center = RVec(grid.dim());
    f.analytic_value = fn;
    f.analytic_gradient = grad;
    f.analytic_laplacian = lap;
    f.values.resize(grid.size());
    if (kind == FieldKind::Shear) {
        f.gradient.resize(grid.size());
        f.laplacian.resize(grid.size());
    }
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const RVec y = grid.node(n);
        f.values[n] = fn(y);
        if (kind == FieldKind::Shear) {
            f.gradient[n] = grad(y);
            f.laplacian[n] = lap(y);
        }
    }
    return f;
}

namespace {

// Sum over modes of Re(coef e^{i k.(y - origin)} m(k)) for the stationary part.
template <class M>
double spectral_sum(const RandomField& f, const RVec& y, M mult) {
    const RVec x = y - f.grid.origin;
    double s = 0;
    for (std::size_t i = 0; i < f.coefficients.size(); ++i) {
        const cplx e = std::exp(cplx(0, dot(f.wavevectors[i], x)));
        s += std::real(f.coefficients[i] * e * mult(f.wavevectors[i]));
    }
    return s;
}

}  // namespace

double RandomField::value_at(const RVec& y) const {
    if (analytic_value) return analytic_value(y);
    const auto w = window_eval(center, radius, y);
    if (w.w == 0) return 0;
    return w.w * spectral_sum(*this, y, [](const RVec&) { return cplx(1); });
}

RVec RandomField::gradient_at(const RVec& y) const {
    if (analytic_gradient) return analytic_gradient(y);
    if (analytic_value) throw std::invalid_argument("analytic field has no gradient function");
    const int d = y.d;
    const auto w = window_eval(center, radius, y);
    RVec out(d);
    if (w.w == 0) return out;
    const double g = spectral_sum(*this, y, [](const RVec&) { return cplx(1); });
    for (int k = 0; k < d; ++k) {
        const double gk = spectral_sum(*this, y, [k](const RVec& kv) { return cplx(0, kv[k]); });
        out[k] = w.grad[k] * g + w.w * gk;
    }
    return out;
}

double RandomField::laplacian_at(const RVec& y) const {
    if (analytic_laplacian) return analytic_laplacian(y);
    if (analytic_value) throw std::invalid_argument("analytic field has no Laplacian function");
    const int d = y.d;
    const auto w = window_eval(center, radius, y);
    if (w.w == 0) return 0;
    const double g = spectral_sum(*this, y, [](const RVec&) { return cplx(1); });
    const double lg = spectral_sum(*this, y, [](const RVec& kv) { return cplx(-norm2(kv)); });
    double cross = 0;
    for (int k = 0; k < d; ++k)
        cross += w.grad[k] * spectral_sum(*this, y, [k](const RVec& kv) { return cplx(0, kv[k]); });
    return w.lap * g + 2 * cross + w.w * lg;
}

bool check_born_validity(const RandomFieldSpec& spec, const Medium& medium, double omega) {
    const auto geom = window_geometry(spec.grid);
    // Shear fluctuations are absolute; compare them relative to mu0.
    const double rel = spec.kind == FieldKind::Density ? spec.sigma : spec.sigma / medium.mu0;
    const double v = rel * medium.kappa(Mode::S, omega) * 2 * geom.radius;
    if (v > 0.5) {
        std::ostringstream os;
        os << "random " << field_kind_name(spec.kind) << " field may violate the Born regime: sigma * kappa_S * "
           << "diameter = " << v << " > 0.5";
        warn(os.str());
        return false;
    }
    return true;
}

}  // namespace etd
