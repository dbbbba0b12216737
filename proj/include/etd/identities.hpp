#pragma once
// Plane-wave superposition identities linking direction averages to Im parts of the
// Green tensors. LHS by quadrature over a direction set, RHS in closed form.

#include <string>
#include <vector>

#include "etd/medium.hpp"
#include "etd/quadrature.hpp"

namespace etd {

struct IdentityResult {
    std::string name;
    double max_rel_err = 0;
    double tol = 0;
    bool pass = false;
};

// Separations are multiples of the wavelength of the mode appearing in each identity.
// Errors are normalized by the magnitude of the right-hand side at zero separation.
std::vector<IdentityResult> run_identity_suite(const Medium& medium, double omega, const DirectionSet& directions,
                                               const std::vector<double>& separations, double tol);

std::string format_identity_report(const std::vector<IdentityResult>& results);

}  // namespace etd
