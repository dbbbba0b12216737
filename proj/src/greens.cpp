#include "etd/greens.hpp"

#include <cmath>
#include <stdexcept>

#include "etd/special.hpp"

namespace etd {

namespace {

void check_points(const Medium& medium, const RVec& x, const RVec& y) {
    if (x.d != medium.dim || y.d != medium.dim) throw std::invalid_argument("point dimension does not match medium");
}

// Assemble Gamma_alpha and its derivative tensors from the radial derivatives of g_alpha.
template <class T>
GreensEvalT<T> assemble(Mode mode, const Medium& medium, double omega, const RVec& r, const std::array<T, 5>& F,
                        int order) {
    const int d = medium.dim;
    const auto R = radial_tensors<T>(r, F, order);
    GreensEvalT<T> g{Mat<T>(d), Ten3<T>(d), Ten4<T>(d)};
    if (mode == Mode::P) {
        const double s = -1.0 / (medium.rho0 * omega * omega);
        g.value = R.d2 * s;
        if (order >= 1) g.grad = R.d3 * s;
        if (order >= 2) g.hessian = R.d4 * s;
        return g;
    }
    const double ks2 = std::pow(medium.kappa(Mode::S, omega), 2);
    const double inv_mu = 1.0 / medium.mu0;
    for (int m = 0; m < d; ++m)
        for (int q = 0; q < d; ++q) g.value(m, q) = ((m == q ? F[0] : T{}) + R.d2(m, q) / ks2) * inv_mu;
    if (order >= 1) {
        for (int m = 0; m < d; ++m)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q)
                    g.grad(m, p, q) = ((m == q ? R.d1[p] : T{}) + R.d3(p, m, q) / ks2) * inv_mu;
    }
    if (order >= 2) {
        for (int l = 0; l < d; ++l)
            for (int m = 0; m < d; ++m)
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q)
                        g.hessian(l, m, p, q) = ((m == q ? R.d2(l, p) : T{}) + R.d4(l, p, m, q) / ks2) * inv_mu;
    }
    return g;
}

int needed_radial_order(int order) { return order + 2; }

}  // namespace

cplx scalar_green(Mode mode, const Medium& medium, double omega, const RVec& r) {
    if (r.d != medium.dim) throw std::invalid_argument("point dimension does not match medium");
    return green_radial(medium.dim, medium.kappa(mode, omega), norm(r), 0)[0];
}

double im_scalar_green(Mode mode, const Medium& medium, double omega, const RVec& r) {
    if (r.d != medium.dim) throw std::invalid_argument("point dimension does not match medium");
    return im_green_radial(medium.dim, medium.kappa(mode, omega), norm(r), 0)[0];
}

GreensEval kupradze_mode(Mode mode, const Medium& medium, double omega, const RVec& x, const RVec& y, int order) {
    check_points(medium, x, y);
    if (order < 0 || order > 2) throw std::invalid_argument("derivative order must be 0..2");
    const RVec r = x - y;
    const double rn = norm(r);
    if (!(rn > 0)) throw std::domain_error("Kupradze matrix is singular at coincident points");
    const auto F = green_radial(medium.dim, medium.kappa(mode, omega), rn, needed_radial_order(order));
    return assemble<cplx>(mode, medium, omega, r, F, order);
}

ImGreensEval im_kupradze_mode(Mode mode, const Medium& medium, double omega, const RVec& x, const RVec& y,
                              int order) {
    check_points(medium, x, y);
    if (order < 0 || order > 2) throw std::invalid_argument("derivative order must be 0..2");
    const RVec r = x - y;
    const auto F = im_green_radial(medium.dim, medium.kappa(mode, omega), norm(r), needed_radial_order(order));
    return assemble<double>(mode, medium, omega, r, F, order);
}

CMat kupradze(const Medium& medium, double omega, const RVec& x, const RVec& y) {
    return kupradze_mode(Mode::P, medium, omega, x, y, 0).value + kupradze_mode(Mode::S, medium, omega, x, y, 0).value;
}

cplx farfield_coefficient(Mode mode, const Medium& medium, double omega) {
    const double c2 = std::pow(medium.c(mode), 2);
    if (medium.dim == 3) return 1.0 / (4.0 * kPi * medium.rho0 * c2);
    const double k = medium.kappa(mode, omega);
    return std::exp(cplx(0, kPi / 4)) / (medium.rho0 * c2 * std::sqrt(8.0 * kPi * k));
}

FarFieldGreen greens_farfield(Mode mode, const Medium& medium, double omega, const RVec& xhat, const RVec& y) {
    const int d = medium.dim;
    if (xhat.d != d || y.d != d) throw std::invalid_argument("point dimension does not match medium");
    if (std::abs(norm(xhat) - 1.0) > 1e-12) throw std::invalid_argument("xhat must be a unit vector");
    const double k = medium.kappa(mode, omega);
    const cplx amp = farfield_coefficient(mode, medium, omega) * std::exp(cplx(0, -k * dot(xhat, y)));
    RMat proj = outer(xhat, xhat);
    if (mode == Mode::S) proj = identity<double>(d) - proj;
    FarFieldGreen out{proj * amp, CTen3(d)};
    const cplx ik = cplx(0, k);
    for (int m = 0; m < d; ++m)
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) out.grad(m, p, q) = ik * xhat[p] * out.value(m, q);
    return out;
}

}  // namespace etd
