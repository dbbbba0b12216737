#include "etd/farfield.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "etd/diagnostics.hpp"
#include "etd/greens.hpp"

namespace etd {

namespace {

std::mutex g_warn_mutex;
WarningHandler g_warn_handler;

// B = M : grad u(z_D) and the density source term at the inclusion center.
struct Source {
    CMat B;
    CVec u;
    double density_scale;  // omega^2 (rho0 - rho1) |B_D|
};

Source inclusion_source(const Inclusion& inc, const Medium& medium, const IncidentWave& wave) {
    Source s{contract_m2(inc.emt, plane_wave_gradient(wave, medium, inc.center)),
             plane_wave(wave, medium, inc.center),
             wave.omega * wave.omega * (medium.rho0 - inc.rho1) * unit_ball_volume(medium.dim)};
    return s;
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    g_warn_handler = std::move(handler);
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    if (g_warn_handler)
        g_warn_handler(message);
    else
        std::cerr << "warning: " << message << "\n";
}

InclusionCheck check_inclusion(const Inclusion& inc, const Medium& medium, double omega) {
    InclusionCheck c;
    const int d = medium.dim;
    if (inc.center.d != d) c.errors.push_back("inclusion center dimension does not match medium");
    if (!(inc.epsilon > 0)) c.errors.push_back("inclusion epsilon must be positive");
    if (!(inc.rho1 > 0)) c.errors.push_back("inclusion density rho1 must be positive");
    if (inc.emt.dim() != d) c.errors.push_back("inclusion EMT dimension does not match medium");
    if (inc.kind == ContrastKind::Density && inc.emt.dim() == d && !inc.emt.is_zero())
        c.errors.push_back("density contrast requires a zero EMT");
    if (inc.kind == ContrastKind::Elasticity && inc.rho1 != medium.rho0)
        c.errors.push_back("elasticity contrast requires rho1 = rho0");
    if (inc.lambda1.has_value() != inc.mu1.has_value())
        c.errors.push_back("lambda1 and mu1 must be given together");
    if (inc.lambda1 && inc.mu1) {
        const double l1 = *inc.lambda1, m1 = *inc.mu1;
        if (!(m1 > 0)) c.errors.push_back("inclusion requires mu1 > 0");
        if (!(d * l1 + 2 * m1 > 0)) c.errors.push_back("inclusion requires d*lambda1 + 2*mu1 > 0");
        if ((l1 - medium.lambda0) * (m1 - medium.mu0) < 0)
            c.errors.push_back("inclusion requires (lambda1 - lambda0)(mu1 - mu0) >= 0");
    }
    if (!(inc.guard > 0)) c.errors.push_back("inclusion guard must be positive");
    if (inc.epsilon > 0 && omega > 0) {
        const double ek = inc.epsilon * medium.kappa(Mode::S, omega);
        if (ek > inc.guard) {
            std::ostringstream os;
            os << "eps*kappa_S = " << ek << " exceeds the small-inclusion guard " << inc.guard;
            (inc.strict_guard ? c.errors : c.warnings).push_back(os.str());
        }
    }
    return c;
}

void validate_inclusion(const Inclusion& inc, const Medium& medium, double omega) {
    const auto c = check_inclusion(inc, medium, omega);
    if (!c.errors.empty()) {
        std::string msg = "invalid inclusion:";
        for (const auto& e : c.errors) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
    for (const auto& w : c.warnings) warn(w);
}

namespace {

std::vector<FarFieldSample> synth_unchecked(const Inclusion& inc, const Medium& medium, const IncidentWave& wave,
                                            const DirectionSet& directions) {
    wave.validate();
    if (directions.dim != medium.dim) throw std::invalid_argument("direction set dimension does not match medium");
    const Source src = inclusion_source(inc, medium, wave);
    const double epsd = std::pow(inc.epsilon, medium.dim);
    std::vector<FarFieldSample> out;
    out.reserve(directions.size());
    for (const RVec& xhat : directions.nodes) {
        FarFieldSample s;
        for (Mode m : {Mode::P, Mode::S}) {
            const FarFieldGreen G = greens_farfield(m, medium, wave.omega, xhat, inc.center);
            CVec v = contract_3_2(G.grad, src.B) + matvec(G.value, src.u) * src.density_scale;
            v *= -epsd;
            (m == Mode::P ? s.P : s.S) = v;
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace

std::vector<FarFieldSample> synth_farfield(const Inclusion& inc, const Medium& medium, const IncidentWave& wave,
                                           const DirectionSet& directions) {
    validate_inclusion(inc, medium, wave.omega);
    return synth_unchecked(inc, medium, wave, directions);
}

CVec scattered_field(const Inclusion& inc, const Medium& medium, const IncidentWave& wave, const RVec& x) {
    validate_inclusion(inc, medium, wave.omega);
    if (norm(x - inc.center) < 5.0 * inc.epsilon)
        throw std::domain_error("scattered_field: evaluation point inside the exclusion radius 5*eps");
    const Source src = inclusion_source(inc, medium, wave);
    CVec out(medium.dim);
    for (Mode m : {Mode::P, Mode::S}) {
        const GreensEval G = kupradze_mode(m, medium, wave.omega, x, inc.center, 1);
        out += contract_3_2(G.grad, src.B) + matvec(G.value, src.u) * src.density_scale;
    }
    out *= -std::pow(inc.epsilon, medium.dim);
    return out;
}

void FarFieldDataset::validate(double tol) const {
    medium.validate();
    directions.validate();
    if (directions.dim != medium.dim) throw std::invalid_argument("dataset: direction dimension mismatch");
    if (samples.size() != incidents.size()) throw std::invalid_argument("dataset: incident/sample count mismatch");
    for (std::size_t j = 0; j < samples.size(); ++j) {
        if (samples[j].size() != directions.size()) throw std::invalid_argument("dataset: sample row length mismatch");
        for (std::size_t i = 0; i < directions.size(); ++i) {
            const RVec& xh = directions.nodes[i];
            const auto& s = samples[j][i];
            const double scale = std::max(1e-300, norm(s.P) + norm(s.S));
            // P parallel to xhat, S orthogonal to xhat.
            if (norm(s.P - xh * dot(xh, s.P)) > tol * scale || std::abs(dot(xh, s.S)) > tol * scale)
                throw std::invalid_argument("dataset: P/S partition invariant violated");
        }
    }
}

int FarFieldDataset::shots() const {
    if (incidents.empty()) return 0;
    const bool s_mode = incidents.front().mode == Mode::S;
    return s_mode ? static_cast<int>(incidents.size()) / (medium.dim - 1) : static_cast<int>(incidents.size());
}

FarFieldDataset build_dataset(const Inclusion& inc, const Medium& medium, double omega, int n, Mode mode,
                              const DirectionSet& directions, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("build_dataset requires n >= 1");
    validate_inclusion(inc, medium, omega);
    FarFieldDataset ds;
    ds.medium = medium;
    ds.inclusion = inc;
    ds.omega = omega;
    ds.seed = seed;
    ds.directions = directions;
    const DirectionSet thetas = uniform_directions(n, medium.dim);
    for (const RVec& th : thetas.nodes) {
        const int nl = mode == Mode::P ? 1 : medium.dim - 1;
        for (int l = 1; l <= nl; ++l) {
            IncidentWave w{mode, th, l, omega};
            ds.incidents.push_back(w);
            ds.samples.push_back(synth_unchecked(inc, medium, w, directions));
        }
    }
    return ds;
}

}  // namespace etd
