#pragma once
// Radial derivatives of the scalar Helmholtz Green function.
//
// For a radial function f(r) define F_n = ((1/r) d/dr)^n f. All Cartesian
// derivative tensors of f(|x|) follow from F_0..F_4 (see greens.cpp).

#include <array>
#include <complex>

namespace etd {

// J_n(z) / z^n, regular at z = 0.
double bessel_j_scaled(int n, double z);
// j_n(z) / z^n (spherical), regular at z = 0.
double sph_bessel_j_scaled(int n, double z);

// F_0..F_nmax of Im g_kappa(r); defined for every r >= 0.
std::array<double, 5> im_green_radial(int dim, double kappa, double r, int nmax);
// F_0..F_nmax of the outgoing Green function g_kappa(r); requires r > 0.
std::array<std::complex<double>, 5> green_radial(int dim, double kappa, double r, int nmax);

}  // namespace etd
