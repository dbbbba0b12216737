#pragma once
// Scalar Green functions, the Kupradze matrix, its P/S parts and derivative tensors.
//
// Index conventions (derivatives are taken with respect to the first argument x):
//   grad(m,p,q)      = d/dx_p Gamma_mq(x, y)
//   hessian(l,m,p,q) = d^2/(dx_l dx_p) Gamma_mq(x, y)
// Everything depends on r = x - y only.

#include "etd/medium.hpp"
#include "etd/tensor.hpp"

namespace etd {

template <class T>
struct GreensEvalT {
    Mat<T> value;
    Ten3<T> grad;
    Ten4<T> hessian;
};
using GreensEval = GreensEvalT<cplx>;
using ImGreensEval = GreensEvalT<double>;

cplx scalar_green(Mode mode, const Medium& medium, double omega, const RVec& r);
double im_scalar_green(Mode mode, const Medium& medium, double omega, const RVec& r);

// Full Kupradze matrix Gamma(x - y) = Gamma_P + Gamma_S.
CMat kupradze(const Medium& medium, double omega, const RVec& x, const RVec& y);

// order selects how many derivative tensors are filled (0: value, 1: +grad, 2: +hessian).
GreensEval kupradze_mode(Mode mode, const Medium& medium, double omega, const RVec& x, const RVec& y,
                         int order = 2);
ImGreensEval im_kupradze_mode(Mode mode, const Medium& medium, double omega, const RVec& x, const RVec& y,
                              int order = 2);

// a_d^beta: d=2 e^{i pi/4} / (rho0 c^2 sqrt(8 pi kappa)); d=3 1 / (4 pi rho0 c^2).
cplx farfield_coefficient(Mode mode, const Medium& medium, double omega);

// Leading far-field amplitudes with e^{i kappa |x|} / |x|^{(d-1)/2} factored out.
// grad(m,p,q) is the amplitude of d/dx_p Gamma_mq(x, y).
struct FarFieldGreen {
    CMat value;
    CTen3 grad;
};
FarFieldGreen greens_farfield(Mode mode, const Medium& medium, double omega, const RVec& xhat, const RVec& y);

// Derivative tensors of a radial function from F_n = ((1/r) d/dr)^n f.
template <class T>
struct RadialTensors {
    Vec<T> d1;
    Mat<T> d2;
    Ten3<T> d3;
    Ten4<T> d4;
};

template <class T>
RadialTensors<T> radial_tensors(const RVec& x, const std::array<T, 5>& F, int order) {
    const int d = x.d;
    RadialTensors<T> R{Vec<T>(d), Mat<T>(d), Ten3<T>(d), Ten4<T>(d)};
    auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    for (int i = 0; i < d; ++i) R.d1[i] = F[1] * x[i];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) R.d2(i, j) = F[2] * (x[i] * x[j]) + F[1] * dl(i, j);
    if (order < 1) return R;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                R.d3(i, j, k) = F[3] * (x[i] * x[j] * x[k]) +
                                F[2] * (dl(i, j) * x[k] + dl(i, k) * x[j] + dl(j, k) * x[i]);
    if (order < 2) return R;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    const double six = dl(i, j) * x[k] * x[l] + dl(i, k) * x[j] * x[l] + dl(i, l) * x[j] * x[k] +
                                       dl(j, k) * x[i] * x[l] + dl(j, l) * x[i] * x[k] + dl(k, l) * x[i] * x[j];
                    const double three = dl(i, j) * dl(k, l) + dl(i, k) * dl(j, l) + dl(i, l) * dl(j, k);
                    R.d4(i, j, k, l) = F[4] * (x[i] * x[j] * x[k] * x[l]) + F[3] * six + F[2] * three;
                }
    return R;
}

}  // namespace etd
