#pragma once
// Measurement noise on far-field data, random-medium clutter (density and shear-modulus
// fluctuations in the Born regime), their closed-form statistics and Monte Carlo helpers.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "etd/farfield.hpp"
#include "etd/imaging.hpp"
#include "etd/sweep.hpp"

namespace etd {

// ---- measurement noise ----

struct MeasurementNoiseSpec {
    double sigma_xi = 0;
    std::uint64_t seed = 0;
};

// Adds circular complex Gaussian noise of per-component variance sigma^2 / w_i at node i to the
// total sample of every record, then re-splits it into P and S parts.
FarFieldDataset add_measurement_noise(const FarFieldDataset& ds, const MeasurementNoiseSpec& spec);
void add_measurement_noise(FarFieldDataset& ds, double sigma_xi, std::mt19937_64& rng);

// Deterministic per-trial engine seeded from (seed, trial).
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial);

// E[H[xi_a](z) (x) conj(H[xi_a](z'))] = 4 rho0 sigma^2 c_a^2 (pi/kappa_a)^{d-2} Im Gamma_a(z, z').
RMat herglotz_noise_cov_closed(Mode a, const Medium& medium, double omega, double sigma_xi, const RVec& z,
                               const RVec& zp);

// Covariance of the multi-shot W indicator under measurement noise.
// Density: 2 rho0 sigma^2 c_a^3 omega^3 tau~^2 gamma / n (pi/kappa_a)^{d-2} ||Im Gamma_a(z, z')||^2.
// Elasticity (M_S = M_D = trial EMT): 2 rho0 c_a^3 sigma^2 gamma / (omega n) (pi/kappa_a)^{d-2} Psi_aa(z, z').
double measurement_cov_closed(ContrastKind kind, Mode a, const TrialParams& trial, const Medium& medium,
                              double omega, int n, double sigma_xi, const RVec& z, const RVec& zp);

double snr_closed(ContrastKind kind, Mode a, const Inclusion& inc, const Medium& medium, double omega, int n,
                  double sigma_xi, const RVec& z);

// ---- random media ----

enum class FieldKind { Density, Shear };
const char* field_kind_name(FieldKind k);

struct RandomFieldSpec {
    FieldKind kind = FieldKind::Density;
    double sigma = 0;
    double corr_length = 0;
    // Support: the window vanishes outside the ball inscribed in the grid box.
    GridSpec grid;
};

// Real field f = w g with g stationary Gaussian (covariance sigma^2 exp(-|y-y'|^2 / (2 l^2)))
// and the window w = (1 - s)^4, s = |y - center|^2 / R^2, zero for s >= 1.
struct RandomField {
    FieldKind kind = FieldKind::Density;
    GridSpec grid;
    double sigma = 0;
    double corr_length = 0;
    std::vector<double> values;
    // Shear fields only: gradient and Laplacian at the nodes.
    std::vector<RVec> gradient;
    std::vector<double> laplacian;

    bool has_derivatives() const { return !gradient.empty(); }
    // Off-grid evaluation of the same trigonometric representation (for consistency checks).
    double value_at(const RVec& y) const;
    RVec gradient_at(const RVec& y) const;
    double laplacian_at(const RVec& y) const;

    // Spectral representation: g(y) = Re sum_k coef_k exp(i k . (y - origin)).
    std::vector<RVec> wavevectors;
    std::vector<cplx> coefficients;
    // Window geometry; radius 0 means no window.
    RVec center;
    double radius = 0;
    // Set for analytic fields built by field_from_function.
    std::function<double(const RVec&)> analytic_value;
    std::function<RVec(const RVec&)> analytic_gradient;
    std::function<double(const RVec&)> analytic_laplacian;
};

// Throws std::invalid_argument when corr_length <= 2 * spacing or the spec is malformed.
RandomField sample_random_field(const RandomFieldSpec& spec, std::uint64_t seed);
RandomField sample_random_field(const RandomFieldSpec& spec, std::mt19937_64& rng);

// Deterministic field from explicit values (and derivatives for shear), e.g. analytic test fields.
RandomField field_from_function(FieldKind kind, const GridSpec& grid, const std::function<double(const RVec&)>& f,
                                const std::function<RVec(const RVec&)>& grad = nullptr,
                                const std::function<double(const RVec&)>& lap = nullptr);

double window_value(const RandomField& f, const RVec& y);
double support_window(const RandomFieldSpec& spec, const RVec& y);
// Windowed covariance sigma^2 w(y) w(y') exp(-|y - y'|^2 / (2 l^2)).
double field_covariance(const RandomFieldSpec& spec, const RVec& y, const RVec& yp);

// Warns when sigma * kappa_S * (support diameter) > 0.5; returns true when the guard holds.
bool check_born_validity(const RandomFieldSpec& spec, const Medium& medium, double omega);

// E_a[w](z) = -4 rho0^2 c_a^2 omega^2 a_a (pi/kappa_a)^{d-2} sum_y h^d Im Gamma_a(z, y) eta(y) w(y).
CVec clutter_error_density(Mode a, const RandomField& eta, const Medium& medium, double omega,
                           const IncidentWave& wave, const RVec& z);
// d/dz_p of E_a[w]_q.
CMat clutter_error_density_gradient(Mode a, const RandomField& eta, const Medium& medium, double omega,
                                    const IncidentWave& wave, const RVec& z);
// E~_a[w](z) = -8 rho0 c_a^2 a_a (pi/kappa_a)^{d-2} sum_y h^d Im Gamma_a(z, y) div(phi sym grad w)(y).
CVec clutter_error_shear(Mode a, const RandomField& phi, const Medium& medium, double omega,
                         const IncidentWave& wave, const RVec& z);

// Back-propagator of the record measured in the fluctuating medium: reference plus clutter term.
CVec noisy_backpropagator(const std::vector<FarFieldSample>& record, const DirectionSet& directions,
                          const RandomField& field, const Medium& medium, const IncidentWave& wave, Mode a,
                          const RVec& z);

// Precomputed Im Gamma_a(z, y) h^d (and its z-gradient) for repeated clutter evaluation at fixed points.
class ClutterOperator {
public:
    ClutterOperator(Mode a, const Medium& medium, double omega, const GridSpec& grid, const std::vector<RVec>& points,
                    bool with_gradient);

    // Integrand source at every grid node: eta w for density fields, div(phi sym grad w) for shear fields.
    std::vector<CVec> source(const RandomField& field, const IncidentWave& wave) const;
    // Clutter term (E_a or E~_a by field kind) at points[k] and its z-gradient (p, q) = d/dz_p E_q.
    CVec apply(const std::vector<CVec>& source, FieldKind kind, std::size_t k) const;
    CMat apply_gradient(const std::vector<CVec>& source, FieldKind kind, std::size_t k) const;

    CVec value(const RandomField& field, const IncidentWave& wave, std::size_t k) const;
    CMat gradient(const RandomField& field, const IncidentWave& wave, std::size_t k) const;

    Mode mode() const { return a_; }
    std::size_t points() const { return points_.size(); }

private:
    cplx prefactor(FieldKind kind) const;

    Mode a_;
    Medium medium_;
    double omega_;
    GridSpec grid_;
    std::vector<RVec> points_;
    std::vector<RVec> nodes_;
    cplx pre_density_, pre_shear_;
    bool with_gradient_;
    std::vector<std::vector<RMat>> g_;    // [point][node]
    std::vector<std::vector<RTen3>> dg_;  // [point][node]
};

CMat clutter_error_shear_gradient(Mode a, const RandomField& phi, const Medium& medium, double omega,
                                  const IncidentWave& wave, const RVec& z);

// Multi-shot W indicator of a dataset measured in a fluctuating medium, at fixed points. The back-propagator
// of every record is the reference one plus the clutter term of its incident mode.
// The dataset must outlive the object.
class NoisyIndicator {
public:
    NoisyIndicator(const FarFieldDataset& ds, const TrialParams& trial, const GridSpec& field_grid,
                   const std::vector<RVec>& points);

    const std::vector<double>& reference() const { return reference_; }
    std::vector<double> iw_multi(const RandomField& field) const;

private:
    struct RecordData {
        std::vector<CVec> h0, u;
        std::vector<CMat> dh0, b;
    };
    const FarFieldDataset* ds_;
    TrialParams trial_;
    std::vector<RVec> points_;
    bool with_gradient_;
    std::vector<ClutterOperator> ops_;  // indexed by mode
    std::vector<RecordData> records_;
    double density_scale_;
    std::vector<double> reference_;
};

// ---- Monte Carlo ----

// Empirical E[H[xi_a](z) (x) conj(H[xi_a](z'))] over `trials` noise draws on the direction set.
CMat herglotz_noise_cov_mc(Mode a, const DirectionSet& directions, const Medium& medium, double omega,
                           double sigma_xi, const RVec& z, const RVec& zp, int trials, std::uint64_t seed,
                           int threads = 1);

// samples[k][t]: W indicator at points[k] for the t-th measurement-noise draw.
std::vector<std::vector<double>> measurement_ensemble(const FarFieldDataset& ds, const TrialParams& trial,
                                                      double sigma_xi, const std::vector<RVec>& points, int trials,
                                                      std::uint64_t seed, int threads = 1);

// samples[k][t]: W indicator at the indicator's points for the t-th random-medium draw.
std::vector<std::vector<double>> speckle_ensemble(const NoisyIndicator& ind, const RandomFieldSpec& spec,
                                                  int trials, std::uint64_t seed, int threads = 1);

// Speckle covariance of the W indicator under medium noise, by nested grid quadrature.
// Density: F rho0^4 c_a^4 omega^6 gamma^2 tau~^2 (pi/kappa_a)^{2d-4} sum C(y, y') Phi_aa(z, y) Phi_aa(z', y').
// Elasticity: F rho0^4 c_a^4 omega^2 gamma^2 (pi/kappa_a)^{2d-4} sum C(y, y') Q_a(z, y) Q_a(z', y').
// F = 8 as quoted; `prefactor` overrides it.
double speckle_cov_closed(ContrastKind kind, Mode a, const RandomFieldSpec& spec, const Medium& medium, double omega,
                          const TrialParams& trial, const RVec& z, const RVec& zp, double prefactor = 8.0);

// Clutter aggregate closed forms, integrals by midpoint rule on the field grid.
// Density-field aggregate: -4 rho0^2 c_a^2 gamma kappa_a (pi/kappa_a)^{d-2} int eta Phi_aa(z, y) dy.
double clutter_aggregate_density_closed(Mode a, const RandomField& eta, const Medium& medium, double omega,
                                        const RVec& z);
// Density-field gradient aggregate: -4 rho0^2 gamma c_a^2 kappa_a (pi/kappa_a)^{d-2} int eta Q_a[M](z, y) dy.
double clutter_aggregate_gradient_closed(Mode a, const RandomField& eta, const Emt& m, const Medium& medium,
                                         double omega, const RVec& z);
// Shear-field P aggregate: 4 rho0 gamma / kappa_P (pi/kappa_P)^{d-2} int (2 kappa_P^2 + Lap) phi Phi_PP(z, y) dy.
double clutter_aggregate_shear_p_closed(const RandomField& phi, const Medium& medium, double omega, const RVec& z);
// Shear-field S aggregate: F rho0 gamma / kappa_S (pi/kappa_S)^{d-2} int [grad phi . (c1 + c2) + kappa_S^2 phi Phi_SS] dy with
// c1_p = sum d_m ImG_pq ImG_mq and c2_p = sum d_p ImG_mq ImG_mq; F = 8 as quoted.
double clutter_aggregate_shear_s_closed(const RandomField& phi, const Medium& medium, double omega, const RVec& z,
                                        double prefactor = 8.0);

// Multi-shot aggregates (1/n) sum_j a_a conj(E_a^j(z)) . u_j(z) over plane waves of mode a
// (every transverse index for S) from uniform_directions(n, d).
double clutter_aggregate_density(Mode a, const RandomField& eta, const Medium& medium, double omega, int n,
                                 const RVec& z);
// (1/n) sum_j a_a conj(grad E_a^j(z)) : M : grad u_j(z).
double clutter_aggregate_gradient(Mode a, const RandomField& eta, const Emt& m, const Medium& medium, double omega,
                                  int n, const RVec& z);
double clutter_aggregate_shear(Mode a, const RandomField& phi, const Medium& medium, double omega, int n,
                               const RVec& z);

// ---- ensemble export ----

struct EnsembleQuantity {
    std::string name;
    std::vector<double> samples;
    double prediction = 0;
};

struct EnsembleSummary {
    double mean = 0;
    double variance = 0;
};
EnsembleSummary summarize(const std::vector<double>& samples);
double sample_covariance(const std::vector<double>& a, const std::vector<double>& b);

// prefix.csv with columns trial,<names...>; prefix.json with mean, variance, prediction and ratio.
void write_ensemble(const std::vector<EnsembleQuantity>& quantities, const std::string& prefix);

}  // namespace etd
