#pragma once
// Background medium, incident plane waves and P/S splitting of far-field samples.

#include <utility>
#include <vector>

#include "etd/tensor.hpp"

namespace etd {

constexpr double kPi = 3.14159265358979323846;

enum class Mode { P, S };

inline const char* mode_name(Mode m) { return m == Mode::P ? "P" : "S"; }

struct WaveSpeeds {
    double c_P, c_S, kappa_P, kappa_S;
    double c(Mode m) const { return m == Mode::P ? c_P : c_S; }
    double kappa(Mode m) const { return m == Mode::P ? kappa_P : kappa_S; }
};

struct Medium {
    double lambda0 = 0;
    double mu0 = 0;
    double rho0 = 0;
    int dim = 3;

    Medium() = default;
    Medium(double lambda, double mu, double rho, int d);

    // Throws std::invalid_argument listing the first violated condition.
    void validate() const;

    double c_P() const;
    double c_S() const;
    double c(Mode m) const { return m == Mode::P ? c_P() : c_S(); }
    double kappa(Mode m, double omega) const { return omega / c(m); }
    // gamma_d = 1 / (2^{d-1} pi rho0)
    double gamma() const;
    // (pi / kappa)^{d-2}
    double dim_factor(Mode m, double omega) const;
};

WaveSpeeds wave_speeds(const Medium& medium, double omega);

// Unit-ball volume |B| for d = 2, 3.
double unit_ball_volume(int dim);

struct IncidentWave {
    Mode mode = Mode::P;
    RVec theta;
    int transverse_index = 1;  // 1..d-1, used for S waves only
    double omega = 1.0;

    void validate() const;
    RVec polarization() const;
};

std::vector<RVec> orthonormal_frame(const RVec& theta);

CVec plane_wave(const IncidentWave& wave, const Medium& medium, const RVec& x);
CMat plane_wave_gradient(const IncidentWave& wave, const Medium& medium, const RVec& x);

std::pair<CVec, CVec> project_farfield_sample(const RVec& xhat, const CVec& w);

}  // namespace etd
