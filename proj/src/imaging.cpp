#include "etd/imaging.hpp"

#include <cmath>
#include <stdexcept>

#include "etd/greens.hpp"
#include "etd/special.hpp"

namespace etd {

namespace {

int idx(Mode m) { return m == Mode::P ? 0 : 1; }

}  // namespace

BackPropagator herglotz_kernel(Mode mode, const DirectionSet& directions, const std::vector<CVec>& kernel,
                               double kappa, const RVec& z) {
    if (directions.size() == 0) throw std::invalid_argument("herglotz: empty direction set");
    if (kernel.size() != directions.size()) throw std::invalid_argument("herglotz: kernel/direction count mismatch");
    const int d = directions.dim;
    if (z.d != d) throw std::invalid_argument("herglotz: point dimension mismatch");
    BackPropagator out{CVec(d), CMat(d), mode};
    const cplx ik(0, kappa);
    for (std::size_t i = 0; i < directions.size(); ++i) {
        const RVec& xh = directions.nodes[i];
        const cplx e = std::exp(ik * dot(xh, z)) * directions.weights[i];
        for (int q = 0; q < d; ++q) {
            const cplx s = e * kernel[i][q];
            out.value[q] += s;
            for (int p = 0; p < d; ++p) out.grad(p, q) += ik * xh[p] * s;
        }
    }
    return out;
}

BackPropagatorPair herglotz(const std::vector<FarFieldSample>& record, const DirectionSet& directions,
                            const Medium& medium, double omega, const RVec& z) {
    std::vector<CVec> wp, ws;
    wp.reserve(record.size());
    ws.reserve(record.size());
    for (const auto& s : record) {
        wp.push_back(s.P);
        ws.push_back(s.S);
    }
    return {herglotz_kernel(Mode::P, directions, wp, medium.kappa(Mode::P, omega), z),
            herglotz_kernel(Mode::S, directions, ws, medium.kappa(Mode::S, omega), z)};
}

CVec backpropagator_closed_form(const Inclusion& inc, const Medium& medium, const IncidentWave& wave, Mode mode,
                                const RVec& z) {
    const double omega = wave.omega;
    const int d = medium.dim;
    const ImGreensEval G = im_kupradze_mode(mode, medium, omega, z, inc.center, 1);
    const CMat B = contract_m2(inc.emt, plane_wave_gradient(wave, medium, inc.center));
    const CVec u = plane_wave(wave, medium, inc.center);
    const double dens = omega * omega * (medium.rho0 - inc.rho1) * unit_ball_volume(d);
    CVec v = contract_3_2(G.grad, B) + matvec(G.value, u) * dens;
    const cplx pre = -4.0 * medium.rho0 * std::pow(medium.c(mode), 2) * farfield_coefficient(mode, medium, omega) *
                     std::pow(inc.epsilon, d) * medium.dim_factor(mode, omega);
    return v * pre;
}

TrialParams default_trial(const Inclusion& inc, const Medium& medium) {
    TrialParams t;
    // Elasticity contrasts keep rho2 = rho0. A zero density contrast has no sign to follow; the lighter trial is used.
    const double s = inc.kind == ContrastKind::Elasticity ? 0.0 : (medium.rho0 < inc.rho1 ? -1.0 : 1.0);
    t.rho2 = medium.rho0 - s * 0.1 * medium.rho0;
    t.emt = inc.emt;
    t.kind = inc.kind;
    return t;
}

void validate_trial(const TrialParams& trial, const Inclusion& inc, const Medium& medium) {
    std::vector<std::string> errs;
    if (trial.kind != inc.kind) errs.push_back("trial contrast kind does not match the inclusion");
    if (trial.emt.dim() != medium.dim) errs.push_back("trial EMT dimension does not match medium");
    if (!(trial.rho2 > 0)) errs.push_back("trial density rho2 must be positive");
    // The sign rule is vacuous for a zero contrast.
    if (inc.kind == ContrastKind::Density && inc.rho1 != medium.rho0 &&
        !((medium.rho0 - inc.rho1) * (medium.rho0 - trial.rho2) > 0))
        errs.push_back("density contrasts of trial and true inclusion must share a sign");
    if (!errs.empty()) {
        std::string msg = "invalid trial parameters:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
}

double tau(const Inclusion& inc, const TrialParams& trial, const Medium& medium) {
    const double vol = unit_ball_volume(medium.dim);
    return vol * vol * (medium.rho0 - inc.rho1) * (medium.rho0 - trial.rho2);
}

double tau_tilde(const TrialParams& trial, const Medium& medium) {
    return (medium.rho0 - trial.rho2) * unit_ball_volume(medium.dim);
}

IndicatorEvaluator::IndicatorEvaluator(const FarFieldDataset& dataset, const TrialParams& trial)
    : ds_(&dataset), trial_(trial) {
    const Medium& m = dataset.medium;
    if (dataset.incidents.empty()) throw std::invalid_argument("indicator: dataset has no incident records");
    if (trial.emt.dim() != m.dim) throw std::invalid_argument("indicator: trial EMT dimension mismatch");
    for (Mode mode : {Mode::P, Mode::S}) {
        a_[idx(mode)] = farfield_coefficient(mode, m, dataset.omega);
        kappa_[idx(mode)] = m.kappa(mode, dataset.omega);
        c_[idx(mode)] = m.c(mode);
    }
    density_scale_ = dataset.omega * dataset.omega * (m.rho0 - trial.rho2) * unit_ball_volume(m.dim);
}

IndicatorEvaluator::Phases IndicatorEvaluator::phases(const RVec& z) const {
    const auto& dirs = ds_->directions;
    Phases ph;
    for (int a = 0; a < 2; ++a) {
        ph.e[a].resize(dirs.size());
        for (std::size_t i = 0; i < dirs.size(); ++i)
            ph.e[a][i] = std::exp(cplx(0, kappa_[a] * dot(dirs.nodes[i], z))) * dirs.weights[i];
    }
    return ph;
}

std::array<double, 2> IndicatorEvaluator::terms(const Phases& ph, std::size_t record, const RVec& z) const {
    const Medium& m = ds_->medium;
    const int d = m.dim;
    const auto& dirs = ds_->directions;
    const auto& row = ds_->samples[record];
    const IncidentWave& wave = ds_->incidents[record];
    const CVec u = plane_wave(wave, m, z);
    const CMat B = contract_m2(trial_.emt, plane_wave_gradient(wave, m, z));
    const bool with_grad = max_abs(B) > 0;
    std::array<double, 2> out{};
    for (int a = 0; a < 2; ++a) {
        // Real arithmetic keeps the accumulation free of the complex-multiply NaN checks.
        double hr[3] = {}, hi[3] = {}, xr[3][3] = {}, xi[3][3] = {};
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            const CVec& w = a == 0 ? row[i].P : row[i].S;
            const RVec& xh = dirs.nodes[i];
            const double er = ph.e[a][i].real(), ei = ph.e[a][i].imag();
            for (int q = 0; q < d; ++q) {
                const double wr = w[q].real(), wi = w[q].imag();
                const double sr = er * wr - ei * wi, si = er * wi + ei * wr;
                hr[q] += sr;
                hi[q] += si;
                if (with_grad)
                    for (int p = 0; p < d; ++p) {
                        xr[p][q] += xh[p] * sr;
                        xi[p][q] += xh[p] * si;
                    }
            }
        }
        CVec H(d);
        CMat X(d);  // sum_i e_i xhat_i (x) w_i; grad H = i kappa X
        for (int q = 0; q < d; ++q) {
            H[q] = cplx(hr[q], hi[q]);
            for (int p = 0; p < d; ++p) X(p, q) = cplx(xr[p][q], xi[p][q]);
        }
        const cplx gradB = std::conj(cplx(0, kappa_[a])) * frob(conj(X), B);
        const cplx hu = dot(conj(H), u);
        out[a] = std::real(a_[a] * (gradB - density_scale_ * hu));
    }
    return out;
}

IndicatorValues IndicatorEvaluator::single(std::size_t record, const RVec& z) const {
    if (record >= records()) throw std::out_of_range("indicator: record index out of range");
    const auto t = terms(phases(z), record, z);
    const int b = idx(ds_->incidents[record].mode);
    return {t[0] + t[1], c_[b] * t[b]};
}

IndicatorValues IndicatorEvaluator::multi(const RVec& z) const {
    const Phases ph = phases(z);
    IndicatorValues acc;
    for (std::size_t j = 0; j < records(); ++j) {
        const auto t = terms(ph, j, z);
        const int b = idx(ds_->incidents[j].mode);
        acc.td += t[0] + t[1];
        acc.w += c_[b] * t[b];
    }
    const double n = ds_->shots();
    acc.td /= n;
    acc.w /= n;
    return acc;
}

std::array<double, 2> IndicatorEvaluator::multi_td_by_mode(const RVec& z) const {
    const Phases ph = phases(z);
    std::array<double, 2> acc{};
    for (std::size_t j = 0; j < records(); ++j) {
        const auto t = terms(ph, j, z);
        acc[0] += t[0];
        acc[1] += t[1];
    }
    const double n = ds_->shots();
    return {acc[0] / n, acc[1] / n};
}

double itd_single(const FarFieldDataset& ds, const TrialParams& trial, std::size_t record, const RVec& z) {
    return IndicatorEvaluator(ds, trial).single(record, z).td;
}

double iw_single(const FarFieldDataset& ds, const TrialParams& trial, std::size_t record, const RVec& z) {
    return IndicatorEvaluator(ds, trial).single(record, z).w;
}

double itd_multi(const FarFieldDataset& ds, const TrialParams& trial, const RVec& z) {
    return IndicatorEvaluator(ds, trial).multi(z).td;
}

double iw_multi(const FarFieldDataset& ds, const TrialParams& trial, const RVec& z) {
    return IndicatorEvaluator(ds, trial).multi(z).w;
}

double phi_kernel(Mode a, Mode b, const Medium& medium, double omega, const RVec& z, const RVec& zp) {
    const RMat A = im_kupradze_mode(a, medium, omega, z, zp, 0).value;
    if (a == b) return norm2(A);
    return frob(A, im_kupradze_mode(b, medium, omega, z, zp, 0).value);
}

double psi_kernel(Mode a, Mode b, const Emt& md, const Emt& ms, const Medium& medium, double omega, const RVec& z,
                  const RVec& zp) {
    if (md.dim() != medium.dim || ms.dim() != medium.dim) throw std::invalid_argument("psi: EMT dimension mismatch");
    const RTen4 Ha = im_kupradze_mode(a, medium, omega, z, zp, 2).hessian;
    const RTen4 Hb = a == b ? Ha : im_kupradze_mode(b, medium, omega, z, zp, 2).hessian;
    return contract_all(contract_m4(md, Ha), pair_transpose(contract_m4(ms, Hb)));
}

double q_kernel(Mode a, const Emt& m, const Medium& medium, double omega, const RVec& x, const RVec& y) {
    if (m.dim() != medium.dim) throw std::invalid_argument("q: EMT dimension mismatch");
    const int d = medium.dim;
    const RTen3 g = im_kupradze_mode(a, medium, omega, x, y, 1).grad;
    // Derivative index first: G(p, q, m) = d_p Gamma_qm.
    RTen3 G(d);
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
            for (int mm = 0; mm < d; ++mm) G(p, q, mm) = g(q, p, mm);
    return contract_all(G, contract_m3(m, G));
}

double psi_ball_closed(Mode a, double ball_a, double ball_b, const Medium& medium, double omega, const RVec& z,
                       const RVec& zp) {
    const int d = medium.dim;
    if (a == Mode::P) {
        const RTen4 H = im_kupradze_mode(Mode::P, medium, omega, z, zp, 2).hessian;
        RMat lap(d);
        for (int m = 0; m < d; ++m)
            for (int q = 0; q < d; ++q)
                for (int l = 0; l < d; ++l) lap(m, q) += H(l, m, l, q);
        const double lap_tr = trace(lap);
        return ball_a * ball_a * norm2(H) + 2 * ball_a * ball_b * norm2(lap) + ball_b * ball_b * lap_tr * lap_tr;
    }
    const double k = medium.kappa(Mode::S, omega);
    const RVec r = z - zp;
    const auto F = im_green_radial(d, k, norm(r), 4);
    const auto R = radial_tensors<double>(r, F, 2);
    const double mu = medium.mu0;
    return ball_a * ball_a / (mu * mu) *
           (norm2(R.d4) / std::pow(k, 4) + (d - 6) / 4.0 * norm2(R.d2) + std::pow(k, 4) / 4 * F[0] * F[0]);
}

double psi_ss_ball_quoted(double ball_a, double ball_b, const Medium& medium, double omega, const RVec& z,
                             const RVec& zp) {
    (void)ball_b;
    const int d = medium.dim;
    const double k = medium.kappa(Mode::S, omega);
    const RVec r = z - zp;
    const auto F = im_green_radial(d, k, norm(r), 4);
    const auto R = radial_tensors<double>(r, F, 2);
    // Fourth derivatives restricted to distinct last two indices.
    double off = 0;
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
            for (int l = 0; l < d; ++l)
                for (int m = 0; m < d; ++m)
                    if (l != m) off += R.d4(p, q, l, m) * R.d4(p, q, l, m);
    const double mu = medium.mu0;
    return ball_a * ball_a / (mu * mu) *
           (off / (k * k) + (d - 2) / 4.0 * norm2(R.d2) + std::pow(k, 4) / 4 * F[0] * F[0]);
}

double q_ball_closed(Mode a, double ball_a, double ball_b, const Medium& medium, double omega, const RVec& x,
                     const RVec& y) {
    const int d = medium.dim;
    const RTen3 g = im_kupradze_mode(a, medium, omega, x, y, 1).grad;
    RVec div(d);
    for (int q = 0; q < d; ++q)
        for (int p = 0; p < d; ++p) div[q] += g(p, p, q);
    if (a == Mode::P) return ball_a * norm2(g) + ball_b * norm2(div);
    double cross = 0;  // sum d_p Gamma_mq d_q Gamma_mp
    for (int m = 0; m < d; ++m)
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) cross += g(m, p, q) * g(m, q, p);
    return ball_a / 2 * norm2(g) + ball_a / 2 * cross + ball_b * norm2(div);
}

double itd_single_density_closed(const Inclusion& inc, const TrialParams& trial, const Medium& medium,
                                 const IncidentWave& wave, const RVec& z) {
    const double omega = wave.omega;
    const double pre = std::pow(omega, 3) * medium.gamma() * tau(inc, trial, medium) * std::pow(inc.epsilon, medium.dim);
    const CVec ud = conj(plane_wave(wave, medium, inc.center));
    const CVec uz = plane_wave(wave, medium, z);
    double s = 0;
    for (Mode a : {Mode::P, Mode::S}) {
        const RMat G = im_kupradze_mode(a, medium, omega, z, inc.center, 0).value;
        s += std::real(dot(matvec(G, ud), uz)) / medium.c(a);
    }
    return pre * s;
}

double itd_single_density_simplified(const Inclusion& inc, const TrialParams& trial, const Medium& medium,
                                     const IncidentWave& wave, const RVec& z) {
    const double omega = wave.omega;
    const Mode b = wave.mode;
    const double pre = std::pow(omega, 3) * medium.gamma() * tau(inc, trial, medium) * std::pow(inc.epsilon, medium.dim);
    const RMat G = im_kupradze_mode(b, medium, omega, z, inc.center, 0).value;
    const cplx v = dot(matvec(G, conj(plane_wave(wave, medium, inc.center))), plane_wave(wave, medium, z));
    return pre * std::real(v) / medium.c(b);
}

double itd_multi_closed(const Inclusion& inc, const TrialParams& trial, const Medium& medium, double omega, Mode a,
                        const RVec& z) {
    const int d = medium.dim;
    const double ca = medium.c(a), pf = medium.dim_factor(a, omega), g = medium.gamma();
    const double epsd = std::pow(inc.epsilon, d);
    if (inc.kind == ContrastKind::Density)
        return 4 * medium.rho0 * std::pow(omega, 3) * tau(inc, trial, medium) * g * ca * epsd * pf *
               phi_kernel(a, a, medium, omega, z, inc.center);
    double s = 0;
    for (Mode b : {Mode::P, Mode::S})
        s += psi_kernel(a, b, inc.emt, trial.emt, medium, omega, z, inc.center) / medium.c(b);
    return 4 * g * medium.rho0 * ca * ca * epsd / omega * pf * s;
}

double itd_multi_density_full(const Inclusion& inc, const TrialParams& trial, const Medium& medium, double omega,
                              Mode a, const RVec& z) {
    const double ca = medium.c(a);
    double s = 0;
    for (Mode b : {Mode::P, Mode::S}) s += phi_kernel(b, a, medium, omega, z, inc.center) / medium.c(b);
    return 4 * medium.rho0 * std::pow(omega, 3) * tau(inc, trial, medium) * medium.gamma() * ca * ca *
           std::pow(inc.epsilon, medium.dim) * medium.dim_factor(a, omega) * s;
}

double iw_multi_closed(const Inclusion& inc, const TrialParams& trial, const Medium& medium, double omega, Mode a,
                       const RVec& z) {
    const double ca = medium.c(a), pf = medium.dim_factor(a, omega), g = medium.gamma();
    const double epsd = std::pow(inc.epsilon, medium.dim);
    if (inc.kind == ContrastKind::Density)
        return 4 * g * medium.rho0 * ca * ca * std::pow(omega, 3) * tau(inc, trial, medium) * epsd * pf *
               phi_kernel(a, a, medium, omega, z, inc.center);
    return 4 * g * medium.rho0 * ca * ca * epsd / omega * pf *
           psi_kernel(a, a, inc.emt, trial.emt, medium, omega, z, inc.center);
}

}  // namespace etd
