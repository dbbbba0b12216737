#pragma once
// Experiment configuration: sectioned key-value text (INI) or the equivalent JSON object.
// Loading validates everything and reports every violation at once.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "etd/farfield.hpp"
#include "etd/imaging.hpp"
#include "etd/noise.hpp"
#include "etd/sweep.hpp"
#include "json.hpp"

namespace etd {

// Raised for invalid configuration or inconsistent inputs; maps to exit status 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    // [medium] Lame parameters (Pa), density (kg/m^3), dimension
    double lambda0 = 2.0, mu0 = 1.0, rho0 = 1.0;
    int dim = 2;
    // [inclusion] center (m), relative size epsilon, density rho1 (kg/m^3), ball EMT (a, b)
    std::vector<double> center = {0.0, 0.0};
    double epsilon = 0.02;
    double rho1 = 1.5;
    ContrastKind contrast = ContrastKind::Density;
    double emt_a = 0.0, emt_b = 0.0;
    std::optional<double> lambda1, mu1;
    double guard = 0.3;
    bool strict_guard = false;
    // [trial] density rho2 (kg/m^3) and EMT; defaults follow default_trial
    std::optional<double> rho2;
    std::optional<double> trial_emt_a, trial_emt_b;
    // [wave] angular frequency (rad/s), incident mode, number of incident directions
    double omega = 2 * kPi;
    Mode mode = Mode::P;
    int n = 64;
    // [quadrature] d=2: equispaced nodes; d=3: "lebedev" (order) or "fibonacci" (nodes)
    int circle_nodes = 256;
    std::string sphere = "lebedev";
    int sphere_order = 65;
    int fibonacci_nodes = 2048;
    // [grid] centered on `center` (defaults to the inclusion), lengths in units of lambda_S
    std::optional<std::vector<double>> grid_center;
    double half_width = 1.0;
    double spacing = 0.05;
    // [image]
    std::vector<std::string> indicators = {"Wmulti", "TDmulti"};
    int record = 0;
    // [noise] measurement noise sigma (far-field units) and Monte Carlo trials
    double sigma_xi = 0.0;
    int noise_trials = 2000;
    // [clutter] medium noise: kind none|density|shear, sigma, correlation length (m),
    // support half width (m), field grid spacing (m), Monte Carlo trials
    std::string clutter = "none";
    double clutter_sigma = 0.01;
    double corr_length = 0.2;
    double support_half_width = 1.5;
    double field_spacing = 0.05;
    int clutter_trials = 500;
    // [verify] separations in wavelengths; tolerance (default by dimension)
    std::vector<double> separations = {0, 0.5, 1, 3, 5};
    std::optional<double> verify_tol;
    // [run]
    std::uint64_t seed = 0;
    std::string out = "out";
    int threads = 0;

    // Derived objects; call validate() first.
    Medium medium() const;
    Inclusion inclusion() const;
    TrialParams trial() const;
    DirectionSet directions() const;
    GridSpec grid() const;
    RandomFieldSpec field_spec() const;
    IncidentWave first_wave() const;

    // Collects every violated condition; empty when valid.
    std::vector<std::string> check() const;
    // Throws ValidationError listing every violation.
    void validate() const;
};

ExperimentConfig parse_config_ini(const std::string& text);
ExperimentConfig parse_config_json(const std::string& text);
// Chooses the format by extension (.json) and validates.
ExperimentConfig load_config(const std::string& path);

std::string dump_config_ini(const ExperimentConfig& cfg);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace etd
