#pragma once
// Leading-order scattering by a small inclusion: far-field patterns, near-region
// scattered fields and multi-incident datasets.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "etd/emt.hpp"
#include "etd/medium.hpp"
#include "etd/quadrature.hpp"

namespace etd {

enum class ContrastKind { Density, Elasticity };

inline const char* contrast_name(ContrastKind k) { return k == ContrastKind::Density ? "density" : "elasticity"; }

struct Inclusion {
    RVec center;
    double epsilon = 0;
    double rho1 = 0;
    Emt emt;
    ContrastKind kind = ContrastKind::Density;
    // Optional Lame parameters of the inclusion; only used for the constraint checks.
    std::optional<double> lambda1, mu1;
    // eps * kappa_S above this bound violates the small-inclusion regime.
    double guard = 0.3;
    // When true, a guard violation is an error instead of a warning.
    bool strict_guard = false;
};

struct InclusionCheck {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

InclusionCheck check_inclusion(const Inclusion& inc, const Medium& medium, double omega);
// Throws std::invalid_argument on errors (and on warnings when strict_guard); emits warnings otherwise.
void validate_inclusion(const Inclusion& inc, const Medium& medium, double omega);

struct FarFieldSample {
    CVec P;
    CVec S;
};

// u_P^inf and u_S^inf at every direction of the set.
std::vector<FarFieldSample> synth_farfield(const Inclusion& inc, const Medium& medium, const IncidentWave& wave,
                                           const DirectionSet& directions);

// Requires |x - z_D| >= 5 eps.
CVec scattered_field(const Inclusion& inc, const Medium& medium, const IncidentWave& wave, const RVec& x);

struct FarFieldDataset {
    Medium medium;
    Inclusion inclusion;
    double omega = 0;
    std::uint64_t seed = 0;
    DirectionSet directions;
    std::vector<IncidentWave> incidents;
    // samples[j][i]: incident j, direction i
    std::vector<std::vector<FarFieldSample>> samples;

    void validate(double tol = 1e-12) const;
    // Number of distinct incident directions n (S datasets hold n (d-1) records).
    int shots() const;
};

// Incident directions are uniform_directions(n, d); S mode enumerates every transverse index.
FarFieldDataset build_dataset(const Inclusion& inc, const Medium& medium, double omega, int n, Mode mode,
                              const DirectionSet& directions, std::uint64_t seed = 0);

// Columnar text (prefix.csv) plus JSON metadata (prefix.json); round-trips bit-exactly.
void write_dataset(const FarFieldDataset& ds, const std::string& prefix);
FarFieldDataset read_dataset(const std::string& prefix);

}  // namespace etd
