#pragma once
// Herglotz back-propagation, topological-derivative (TD) and weighted (W) location
// indicators, and the reference kernels Phi, Psi and Q with their closed forms.

#include <vector>

#include "etd/emt.hpp"
#include "etd/farfield.hpp"
#include "etd/medium.hpp"
#include "etd/quadrature.hpp"

namespace etd {

// value = H[w](z), grad(p,q) = d/dz_p H_q.
struct BackPropagator {
    CVec value;
    CMat grad;
    Mode mode = Mode::P;
};

struct BackPropagatorPair {
    BackPropagator P;
    BackPropagator S;
};

// Herglotz field of a kernel sampled at the direction nodes, with wavenumber kappa.
BackPropagator herglotz_kernel(Mode mode, const DirectionSet& directions, const std::vector<CVec>& kernel,
                               double kappa, const RVec& z);

// Back-propagates both mode components of one incident record.
BackPropagatorPair herglotz(const std::vector<FarFieldSample>& record, const DirectionSet& directions,
                            const Medium& medium, double omega, const RVec& z);

// Leading-order back-propagator of the alpha component of the scattered far field.
CVec backpropagator_closed_form(const Inclusion& inc, const Medium& medium, const IncidentWave& wave, Mode mode,
                                const RVec& z);

struct TrialParams {
    double rho2 = 0;
    Emt emt;
    ContrastKind kind = ContrastKind::Density;
};

// rho0 - rho2 = sign(rho0 - rho1) * 0.1 rho0 and M(B_S) = M(B_D).
TrialParams default_trial(const Inclusion& inc, const Medium& medium);
// Throws std::invalid_argument listing every violated condition.
void validate_trial(const TrialParams& trial, const Inclusion& inc, const Medium& medium);

// tau = |B_S||B_D|(rho0 - rho1)(rho0 - rho2), tau~ = (rho0 - rho2)|B_S|.
double tau(const Inclusion& inc, const TrialParams& trial, const Medium& medium);
double tau_tilde(const TrialParams& trial, const Medium& medium);

struct IndicatorValues {
    double td = 0;
    double w = 0;
};

// Evaluates the single-shot indicators of every record and their multi-shot averages.
// Per-point Herglotz phases are shared by all records. The dataset must outlive the evaluator.
class IndicatorEvaluator {
public:
    IndicatorEvaluator(const FarFieldDataset& dataset, const TrialParams& trial);

    std::size_t records() const { return ds_->incidents.size(); }
    const FarFieldDataset& dataset() const { return *ds_; }

    IndicatorValues single(std::size_t record, const RVec& z) const;
    // Sum over records divided by the number of incident directions n.
    IndicatorValues multi(const RVec& z) const;
    // Multi-shot TD split by back-propagated mode: td_by_mode[alpha].
    std::array<double, 2> multi_td_by_mode(const RVec& z) const;

private:
    struct Phases {
        std::vector<cplx> e[2];
    };
    Phases phases(const RVec& z) const;
    std::array<double, 2> terms(const Phases& ph, std::size_t record, const RVec& z) const;

    const FarFieldDataset* ds_;
    TrialParams trial_;
    cplx a_[2];
    double kappa_[2];
    double c_[2];
    double density_scale_;  // omega^2 (rho0 - rho2) |B_S|
};

double itd_single(const FarFieldDataset& ds, const TrialParams& trial, std::size_t record, const RVec& z);
double iw_single(const FarFieldDataset& ds, const TrialParams& trial, std::size_t record, const RVec& z);
double itd_multi(const FarFieldDataset& ds, const TrialParams& trial, const RVec& z);
double iw_multi(const FarFieldDataset& ds, const TrialParams& trial, const RVec& z);

// Phi_ab(z, z') = Im Gamma_a : Im Gamma_b.
double phi_kernel(Mode a, Mode b, const Medium& medium, double omega, const RVec& z, const RVec& zp);
// Psi_ab(z, z') = (M_D . Im Hess Gamma_a) : (M_S . Im Hess Gamma_b)^T, T swapping index pairs.
double psi_kernel(Mode a, Mode b, const Emt& md, const Emt& ms, const Medium& medium, double omega, const RVec& z,
                  const RVec& zp);
// Q_a[M](x, y) = Im grad Gamma_a : (M . Im grad Gamma_a).
double q_kernel(Mode a, const Emt& m, const Medium& medium, double omega, const RVec& x, const RVec& y);

// Ball-EMT forms of Psi_aa and Q_a written directly in terms of derivatives of Im g_a and Im Gamma_a.
double psi_ball_closed(Mode a, double ball_a, double ball_b, const Medium& medium, double omega, const RVec& z,
                       const RVec& zp);
// The quoted shear-shear display; kept for comparison only (it disagrees with psi_kernel).
double psi_ss_ball_quoted(double ball_a, double ball_b, const Medium& medium, double omega, const RVec& z,
                             const RVec& zp);
double q_ball_closed(Mode a, double ball_a, double ball_b, const Medium& medium, double omega, const RVec& x,
                     const RVec& y);

// Single-shot density-contrast TD in closed form:
//   omega^3 gamma tau eps^d sum_a Re{Im Gamma_a(z, z_D) conj(u(z_D)) . u(z)} / c_a.
double itd_single_density_closed(const Inclusion& inc, const TrialParams& trial, const Medium& medium,
                                 const IncidentWave& wave, const RVec& z);
// The quoted simplification keeping only the a = incident-mode term.
double itd_single_density_simplified(const Inclusion& inc, const TrialParams& trial, const Medium& medium,
                                     const IncidentWave& wave, const RVec& z);

// Multi-shot closed forms for incident mode a.
// Density TD as quoted: 4 rho0 omega^3 tau gamma c_a eps^d (pi/kappa_a)^{d-2} Phi_aa.
// Elasticity TD: 4 gamma rho0 c_a^2 eps^d / omega (pi/kappa_a)^{d-2} sum_b Psi_ab / c_b.
double itd_multi_closed(const Inclusion& inc, const TrialParams& trial, const Medium& medium, double omega, Mode a,
                        const RVec& z);
// Density TD including the mode-conversion term: 4 rho0 omega^3 tau gamma c_a^2 eps^d (pi/kappa_a)^{d-2} sum_b Phi_ba / c_b.
double itd_multi_density_full(const Inclusion& inc, const TrialParams& trial, const Medium& medium, double omega,
                              Mode a, const RVec& z);
// Density: 4 gamma rho0 c_a^2 omega^3 tau eps^d (pi/kappa_a)^{d-2} Phi_aa.
// Elasticity: 4 gamma rho0 c_a^2 eps^d / omega (pi/kappa_a)^{d-2} Psi_aa.
double iw_multi_closed(const Inclusion& inc, const TrialParams& trial, const Medium& medium, double omega, Mode a,
                       const RVec& z);

}  // namespace etd
