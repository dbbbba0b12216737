#pragma once
// Elastic moment tensors (rank 4) and their contraction operators.
// Entry m(l,m,p,q) stands for m_{pq}^{lm}.

#include <vector>

#include "etd/tensor.hpp"

namespace etd {

class Emt {
public:
    Emt() = default;
    explicit Emt(int dim) : t_(dim) {}
    // Symmetrizes over the EMT symmetry group; throws if the input deviates by more than tol (relative).
    static Emt from_tensor(const RTen4& t, double tol = 1e-12);

    int dim() const { return t_.d; }
    const RTen4& tensor() const { return t_; }
    double operator()(int l, int m, int p, int q) const { return t_(l, m, p, q); }
    bool is_zero() const;

    Emt scaled(double s) const;

private:
    RTen4 t_;
};

// m = (a/2)(d_lp d_mq + d_lq d_mp) + b d_lm d_pq
Emt ball_emt(double a, double b, int dim);

template <class T>
Mat<T> contract_m2(const Emt& M, const Mat<T>& A) { return contract_4_2(M.tensor(), A); }

template <class T>
Ten3<T> contract_m3(const Emt& M, const Ten3<T>& G) { return contract_4_3(M.tensor(), G); }

template <class T>
Ten4<T> contract_m4(const Emt& M, const Ten4<T>& H) { return contract_4_4(M.tensor(), H); }

// Eigenvalues of the induced map on symmetric d x d matrices (orthonormal basis), ascending.
std::vector<double> emt_spectrum(const Emt& M);
bool is_positive_definite(const Emt& M);

}  // namespace etd
