#include <cmath>
#include <stdexcept>

#include "etd/greens.hpp"
#include "etd/noise.hpp"

namespace etd {

namespace {

double cell_volume(const GridSpec& g) {
    double h = 1;
    for (int k = 0; k < g.dim(); ++k) h *= g.spacing[k];
    return h;
}

void require_kind(const RandomField& f, FieldKind kind) {
    if (f.kind != kind)
        throw std::invalid_argument(std::string("clutter: expected a ") + field_kind_name(kind) + " field, got " +
                                    field_kind_name(f.kind));
    if (kind == FieldKind::Shear && !f.has_derivatives())
        throw std::invalid_argument("clutter: shear field lacks gradient data");
}

std::vector<IncidentWave> mode_waves(Mode a, int n, int d, double omega) {
    std::vector<IncidentWave> waves;
    for (const RVec& th : uniform_directions(n, d).nodes) {
        if (a == Mode::P)
            waves.push_back({Mode::P, th, 1, omega});
        else
            for (int l = 1; l < d; ++l) waves.push_back({Mode::S, th, l, omega});
    }
    return waves;
}

}  // namespace

ClutterOperator::ClutterOperator(Mode a, const Medium& medium, double omega, const GridSpec& grid,
                                 const std::vector<RVec>& points, bool with_gradient)
    : a_(a), medium_(medium), omega_(omega), grid_(grid), points_(points), with_gradient_(with_gradient) {
    grid.validate();
    if (grid.dim() != medium.dim) throw std::invalid_argument("clutter: grid dimension does not match medium");
    const double c = medium.c(a);
    const cplx ad = farfield_coefficient(a, medium, omega);
    const double pf = medium.dim_factor(a, omega);
    pre_density_ = -4.0 * medium.rho0 * medium.rho0 * c * c * omega * omega * ad * pf;
    pre_shear_ = -8.0 * medium.rho0 * c * c * ad * pf;
    const double hd = cell_volume(grid);
    nodes_.resize(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) nodes_[n] = grid.node(n);
    g_.resize(points.size());
    if (with_gradient) dg_.resize(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        g_[k].resize(nodes_.size());
        if (with_gradient) dg_[k].resize(nodes_.size());
        for (std::size_t n = 0; n < nodes_.size(); ++n) {
            const ImGreensEval G = im_kupradze_mode(a, medium, omega, points[k], nodes_[n], with_gradient ? 1 : 0);
            g_[k][n] = G.value * hd;
            if (with_gradient) dg_[k][n] = G.grad * hd;
        }
    }
}

cplx ClutterOperator::prefactor(FieldKind kind) const {
    return kind == FieldKind::Density ? pre_density_ : pre_shear_;
}

std::vector<CVec> ClutterOperator::source(const RandomField& field, const IncidentWave& wave) const {
    if (field.grid.size() != nodes_.size()) throw std::invalid_argument("clutter: field grid does not match operator");
    if (wave.omega != omega_) throw std::invalid_argument("clutter: wave frequency does not match operator");
    require_kind(field, field.kind);
    const int d = medium_.dim;
    std::vector<CVec> src(nodes_.size(), CVec(d));
    const double k = medium_.kappa(wave.mode, wave.omega);
    const RVec& th = wave.theta;
    const RVec pol = wave.polarization();
    const double tp = dot(th, pol);
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        const cplx e = std::exp(cplx(0, k * dot(th, nodes_[n])));
        if (field.kind == FieldKind::Density) {
            src[n] = pol * (e * field.values[n]);
        } else {
            // div(phi sym grad w) = grad phi . sym grad w + phi div sym grad w for w = pol e^{i k theta.y}.
            const RVec& gp = field.gradient[n];
            const CVec t1 = (pol * dot(gp, th) + th * dot(gp, pol)) * (cplx(0, 0.5 * k) * e);
            const CVec t2 = (pol + th * tp) * (-0.5 * k * k * field.values[n] * e);
            src[n] = t1 + t2;
        }
    }
    return src;
}

CVec ClutterOperator::apply(const std::vector<CVec>& src, FieldKind kind, std::size_t k) const {
    const int d = medium_.dim;
    CVec out(d);
    const auto& G = g_.at(k);
    for (std::size_t n = 0; n < src.size(); ++n) {
        const CVec& s = src[n];
        for (int q = 0; q < d; ++q)
            for (int m = 0; m < d; ++m) out[q] += G[n](q, m) * s[m];
    }
    return out * prefactor(kind);
}

CMat ClutterOperator::apply_gradient(const std::vector<CVec>& src, FieldKind kind, std::size_t k) const {
    if (!with_gradient_) throw std::logic_error("clutter: operator built without gradient kernels");
    const int d = medium_.dim;
    CMat out(d);
    const auto& D = dg_.at(k);
    for (std::size_t n = 0; n < src.size(); ++n) {
        const CVec& s = src[n];
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q)
                for (int m = 0; m < d; ++m) out(p, q) += D[n](q, p, m) * s[m];
    }
    return out * prefactor(kind);
}

CVec ClutterOperator::value(const RandomField& field, const IncidentWave& wave, std::size_t k) const {
    return apply(source(field, wave), field.kind, k);
}

CMat ClutterOperator::gradient(const RandomField& field, const IncidentWave& wave, std::size_t k) const {
    return apply_gradient(source(field, wave), field.kind, k);
}

CVec clutter_error_density(Mode a, const RandomField& eta, const Medium& medium, double omega,
                           const IncidentWave& wave, const RVec& z) {
    require_kind(eta, FieldKind::Density);
    return ClutterOperator(a, medium, omega, eta.grid, {z}, false).value(eta, wave, 0);
}

CMat clutter_error_density_gradient(Mode a, const RandomField& eta, const Medium& medium, double omega,
                                    const IncidentWave& wave, const RVec& z) {
    require_kind(eta, FieldKind::Density);
    return ClutterOperator(a, medium, omega, eta.grid, {z}, true).gradient(eta, wave, 0);
}

CVec clutter_error_shear(Mode a, const RandomField& phi, const Medium& medium, double omega,
                         const IncidentWave& wave, const RVec& z) {
    require_kind(phi, FieldKind::Shear);
    return ClutterOperator(a, medium, omega, phi.grid, {z}, false).value(phi, wave, 0);
}

CMat clutter_error_shear_gradient(Mode a, const RandomField& phi, const Medium& medium, double omega,
                                  const IncidentWave& wave, const RVec& z) {
    require_kind(phi, FieldKind::Shear);
    return ClutterOperator(a, medium, omega, phi.grid, {z}, true).gradient(phi, wave, 0);
}

CVec noisy_backpropagator(const std::vector<FarFieldSample>& record, const DirectionSet& directions,
                          const RandomField& field, const Medium& medium, const IncidentWave& wave, Mode a,
                          const RVec& z) {
    const auto h = herglotz(record, directions, medium, wave.omega, z);
    const CVec& h0 = a == Mode::P ? h.P.value : h.S.value;
    return h0 + ClutterOperator(a, medium, wave.omega, field.grid, {z}, false).value(field, wave, 0);
}

double clutter_aggregate_density(Mode a, const RandomField& eta, const Medium& medium, double omega, int n,
                                 const RVec& z) {
    require_kind(eta, FieldKind::Density);
    const ClutterOperator op(a, medium, omega, eta.grid, {z}, false);
    const cplx ad = farfield_coefficient(a, medium, omega);
    double acc = 0;
    for (const auto& w : mode_waves(a, n, medium.dim, omega))
        acc += std::real(ad * dot(conj(op.value(eta, w, 0)), plane_wave(w, medium, z)));
    return acc / n;
}

double clutter_aggregate_gradient(Mode a, const RandomField& eta, const Emt& m, const Medium& medium, double omega,
                                  int n, const RVec& z) {
    require_kind(eta, FieldKind::Density);
    const ClutterOperator op(a, medium, omega, eta.grid, {z}, true);
    const cplx ad = farfield_coefficient(a, medium, omega);
    double acc = 0;
    for (const auto& w : mode_waves(a, n, medium.dim, omega)) {
        const CMat B = contract_m2(m, plane_wave_gradient(w, medium, z));
        acc += std::real(ad * frob(conj(op.gradient(eta, w, 0)), B));
    }
    return acc / n;
}

double clutter_aggregate_shear(Mode a, const RandomField& phi, const Medium& medium, double omega, int n,
                               const RVec& z) {
    require_kind(phi, FieldKind::Shear);
    const ClutterOperator op(a, medium, omega, phi.grid, {z}, false);
    const cplx ad = farfield_coefficient(a, medium, omega);
    double acc = 0;
    for (const auto& w : mode_waves(a, n, medium.dim, omega))
        acc += std::real(ad * dot(conj(op.value(phi, w, 0)), plane_wave(w, medium, z)));
    return acc / n;
}

double clutter_aggregate_density_closed(Mode a, const RandomField& eta, const Medium& medium, double omega,
                                        const RVec& z) {
    const double c = medium.c(a), k = medium.kappa(a, omega);
    const double pre = -4 * medium.rho0 * medium.rho0 * c * c * medium.gamma() * k * medium.dim_factor(a, omega);
    const double hd = cell_volume(eta.grid);
    double acc = 0;
    for (std::size_t n = 0; n < eta.grid.size(); ++n)
        if (eta.values[n] != 0) acc += eta.values[n] * phi_kernel(a, a, medium, omega, z, eta.grid.node(n));
    return pre * hd * acc;
}

double clutter_aggregate_gradient_closed(Mode a, const RandomField& eta, const Emt& m, const Medium& medium,
                                         double omega, const RVec& z) {
    const double c = medium.c(a), k = medium.kappa(a, omega);
    const double pre = -4 * medium.rho0 * medium.rho0 * medium.gamma() * c * c * k * medium.dim_factor(a, omega);
    const double hd = cell_volume(eta.grid);
    double acc = 0;
    for (std::size_t n = 0; n < eta.grid.size(); ++n)
        if (eta.values[n] != 0) acc += eta.values[n] * q_kernel(a, m, medium, omega, z, eta.grid.node(n));
    return pre * hd * acc;
}

double clutter_aggregate_shear_p_closed(const RandomField& phi, const Medium& medium, double omega, const RVec& z) {
    require_kind(phi, FieldKind::Shear);
    const double k = medium.kappa(Mode::P, omega);
    const double pre = 4 * medium.rho0 * medium.gamma() / k * medium.dim_factor(Mode::P, omega);
    const double hd = cell_volume(phi.grid);
    double acc = 0;
    for (std::size_t n = 0; n < phi.grid.size(); ++n) {
        const double s = 2 * k * k * phi.values[n] + phi.laplacian[n];
        if (s != 0) acc += s * phi_kernel(Mode::P, Mode::P, medium, omega, z, phi.grid.node(n));
    }
    return pre * hd * acc;
}

double clutter_aggregate_shear_s_closed(const RandomField& phi, const Medium& medium, double omega, const RVec& z,
                                        double prefactor) {
    require_kind(phi, FieldKind::Shear);
    const int d = medium.dim;
    const double k = medium.kappa(Mode::S, omega);
    const double pre = prefactor * medium.rho0 * medium.gamma() / k * medium.dim_factor(Mode::S, omega);
    const double hd = cell_volume(phi.grid);
    double acc = 0;
    for (std::size_t n = 0; n < phi.grid.size(); ++n) {
        if (phi.values[n] == 0 && norm2(phi.gradient[n]) == 0) continue;
        const ImGreensEval G = im_kupradze_mode(Mode::S, medium, omega, z, phi.grid.node(n), 1);
        RVec c12(d);
        for (int p = 0; p < d; ++p)
            for (int m = 0; m < d; ++m)
                for (int q = 0; q < d; ++q)
                    c12[p] += G.grad(p, m, q) * G.value(m, q) + G.grad(m, p, q) * G.value(m, q);
        acc += dot(phi.gradient[n], c12) + k * k * phi.values[n] * norm2(G.value);
    }
    return pre * hd * acc;
}

NoisyIndicator::NoisyIndicator(const FarFieldDataset& ds, const TrialParams& trial, const GridSpec& field_grid,
                               const std::vector<RVec>& points)
    : ds_(&ds), trial_(trial), points_(points) {
    const Medium& m = ds.medium;
    if (ds.incidents.empty()) throw std::invalid_argument("noisy indicator: dataset has no incident records");
    if (trial.emt.dim() != m.dim) throw std::invalid_argument("noisy indicator: trial EMT dimension mismatch");
    with_gradient_ = max_abs(trial.emt.tensor()) > 0;
    for (Mode a : {Mode::P, Mode::S}) ops_.emplace_back(a, m, ds.omega, field_grid, points, with_gradient_);
    density_scale_ = ds.omega * ds.omega * (m.rho0 - trial.rho2) * unit_ball_volume(m.dim);
    records_.resize(ds.incidents.size());
    reference_.assign(points.size(), 0.0);
    const IndicatorEvaluator eval(ds, trial);
    for (std::size_t k = 0; k < points.size(); ++k) reference_[k] = eval.multi(points[k]).w;
    for (std::size_t j = 0; j < ds.incidents.size(); ++j) {
        const IncidentWave& w = ds.incidents[j];
        auto& r = records_[j];
        for (const RVec& z : points) {
            const auto h = herglotz(ds.samples[j], ds.directions, m, ds.omega, z);
            const BackPropagator& hb = w.mode == Mode::P ? h.P : h.S;
            r.h0.push_back(hb.value);
            r.dh0.push_back(hb.grad);
            r.u.push_back(plane_wave(w, m, z));
            r.b.push_back(contract_m2(trial.emt, plane_wave_gradient(w, m, z)));
        }
    }
}

std::vector<double> NoisyIndicator::iw_multi(const RandomField& field) const {
    const Medium& m = ds_->medium;
    std::vector<double> out(points_.size(), 0.0);
    for (std::size_t j = 0; j < records_.size(); ++j) {
        const IncidentWave& w = ds_->incidents[j];
        const ClutterOperator& op = ops_[w.mode == Mode::P ? 0 : 1];
        const auto src = op.source(field, w);
        const cplx ad = farfield_coefficient(w.mode, m, ds_->omega);
        const double c = m.c(w.mode);
        const auto& r = records_[j];
        for (std::size_t p = 0; p < points_.size(); ++p) {
            const CVec H = r.h0[p] + op.apply(src, field.kind, p);
            cplx gradB = 0;
            if (with_gradient_) {
                const CMat dH = r.dh0[p] + op.apply_gradient(src, field.kind, p);
                gradB = frob(conj(dH), r.b[p]);
            }
            out[p] += c * std::real(ad * (gradB - density_scale_ * dot(conj(H), r.u[p])));
        }
    }
    for (auto& v : out) v /= ds_->shots();
    return out;
}

}  // namespace etd
