#include "etd/medium.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace etd {

Medium::Medium(double lambda, double mu, double rho, int d) : lambda0(lambda), mu0(mu), rho0(rho), dim(d) {
    validate();
}

void Medium::validate() const {
    if (dim != 2 && dim != 3) throw std::invalid_argument("medium dimension must be 2 or 3");
    if (!(mu0 > 0)) throw std::invalid_argument("medium requires mu0 > 0");
    if (!(dim * lambda0 + 2 * mu0 > 0)) throw std::invalid_argument("medium requires d*lambda0 + 2*mu0 > 0");
    if (!(rho0 > 0)) throw std::invalid_argument("medium requires rho0 > 0");
    if (!(lambda0 + mu0 > 0)) throw std::invalid_argument("medium requires c_P > c_S (lambda0 + mu0 > 0)");
}

double Medium::c_P() const { return std::sqrt((lambda0 + 2 * mu0) / rho0); }
double Medium::c_S() const { return std::sqrt(mu0 / rho0); }
double Medium::gamma() const { return 1.0 / (std::pow(2.0, dim - 1) * kPi * rho0); }
double Medium::dim_factor(Mode m, double omega) const {
    return dim == 3 ? kPi / kappa(m, omega) : 1.0;
}

WaveSpeeds wave_speeds(const Medium& medium, double omega) {
    medium.validate();
    if (!(omega > 0)) throw std::invalid_argument("omega must be positive");
    const double cp = medium.c_P(), cs = medium.c_S();
    return {cp, cs, omega / cp, omega / cs};
}

double unit_ball_volume(int dim) {
    if (dim == 2) return kPi;
    if (dim == 3) return 4.0 * kPi / 3.0;
    throw std::invalid_argument("unit ball volume: dimension must be 2 or 3");
}

void IncidentWave::validate() const {
    if (theta.d != 2 && theta.d != 3) throw std::invalid_argument("incident direction must have dimension 2 or 3");
    if (std::abs(norm(theta) - 1.0) > 1e-12) throw std::invalid_argument("incident direction must be a unit vector");
    if (!(omega > 0)) throw std::invalid_argument("omega must be positive");
    if (mode == Mode::S && (transverse_index < 1 || transverse_index > theta.d - 1))
        throw std::invalid_argument("transverse index out of range");
}

RVec IncidentWave::polarization() const {
    if (mode == Mode::P) return theta;
    return orthonormal_frame(theta)[transverse_index - 1];
}

std::vector<RVec> orthonormal_frame(const RVec& theta) {
    const double n = norm(theta);
    if (!(n > 0)) throw std::invalid_argument("orthonormal_frame: zero direction");
    if (std::abs(n - 1.0) > 1e-12) throw std::invalid_argument("orthonormal_frame: direction must be unit");
    if (theta.d == 2) return {make_vec({-theta[1], theta[0]})};
    if (theta.d != 3) throw std::invalid_argument("orthonormal_frame: dimension must be 2 or 3");

    // Seed Gram-Schmidt with the axis of the smallest |component| (lowest index on ties).
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(theta[i]) < std::abs(theta[k])) k = i;
    RVec e(3);
    e[k] = 1.0;
    RVec t1 = e - theta * dot(theta, e);
    t1 *= 1.0 / norm(t1);
    RVec t2(3);
    t2[0] = theta[1] * t1[2] - theta[2] * t1[1];
    t2[1] = theta[2] * t1[0] - theta[0] * t1[2];
    t2[2] = theta[0] * t1[1] - theta[1] * t1[0];
    return {t1, t2};
}

CVec plane_wave(const IncidentWave& wave, const Medium& medium, const RVec& x) {
    const double k = medium.kappa(wave.mode, wave.omega);
    const cplx phase = std::exp(cplx(0, k * dot(wave.theta, x)));
    return wave.polarization() * phase;
}

CMat plane_wave_gradient(const IncidentWave& wave, const Medium& medium, const RVec& x) {
    const double k = medium.kappa(wave.mode, wave.omega);
    const cplx phase = std::exp(cplx(0, k * dot(wave.theta, x)));
    return outer(wave.theta, wave.polarization()) * (cplx(0, k) * phase);
}

std::pair<CVec, CVec> project_farfield_sample(const RVec& xhat, const CVec& w) {
    const cplx s = dot(xhat, w);
    CVec wp = xhat * s;
    CVec ws = w - wp;
    return {wp, ws};
}

}  // namespace etd
