#include "etd/emt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace etd {

Emt Emt::from_tensor(const RTen4& t, double tol) {
    const int d = t.d;
    Emt out(d);
    const double scale = std::max(max_abs(t), 1e-300);
    for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) {
                    // Orbit under the symmetry group, summed in a canonical order so every
                    // member receives a bit-identical value; exact inputs pass through unchanged.
                    std::array<std::array<int, 4>, 8> orbit = {{{l, m, p, q}, {m, l, p, q}, {l, m, q, p}, {m, l, q, p},
                                                                {p, q, l, m}, {q, p, l, m}, {p, q, m, l}, {q, p, m, l}}};
                    std::sort(orbit.begin(), orbit.end());
                    const double first = t(orbit[0][0], orbit[0][1], orbit[0][2], orbit[0][3]);
                    bool equal = true;
                    double s = 0;
                    for (const auto& o : orbit) {
                        const double x = t(o[0], o[1], o[2], o[3]);
                        equal = equal && x == first;
                        s += x;
                    }
                    s = equal ? first : s / 8.0;
                    if (std::abs(s - t(l, m, p, q)) > tol * scale)
                        throw std::invalid_argument("tensor lacks the elastic moment tensor symmetries");
                    out.t_(l, m, p, q) = s;
                }
    return out;
}

bool Emt::is_zero() const {
    for (double x : t_.v)
        if (x != 0.0) return false;
    return true;
}

Emt Emt::scaled(double s) const {
    Emt out = *this;
    out.t_ *= s;
    return out;
}

Emt ball_emt(double a, double b, int dim) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("ball_emt: dimension must be 2 or 3");
    RTen4 t(dim);
    auto dl = [](int i, int j) { return i == j ? 1.0 : 0.0; };
    for (int l = 0; l < dim; ++l)
        for (int m = 0; m < dim; ++m)
            for (int p = 0; p < dim; ++p)
                for (int q = 0; q < dim; ++q)
                    t(l, m, p, q) = 0.5 * a * (dl(l, p) * dl(m, q) + dl(l, q) * dl(m, p)) + b * dl(l, m) * dl(p, q);
    return Emt::from_tensor(t);
}

std::vector<double> emt_spectrum(const Emt& M) {
    const int d = M.dim();
    // Orthonormal basis of symmetric matrices: e_ii and (e_ij + e_ji)/sqrt2.
    std::vector<RMat> basis;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            RMat E(d);
            if (i == j) {
                E(i, i) = 1.0;
            } else {
                E(i, j) = E(j, i) = 1.0 / std::sqrt(2.0);
            }
            basis.push_back(E);
        }
    const int n = static_cast<int>(basis.size());
    Eigen::MatrixXd A(n, n);
    for (int a = 0; a < n; ++a) {
        const RMat MB = contract_m2(M, basis[a]);
        for (int b = 0; b < n; ++b) A(b, a) = frob(basis[b], MB);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = es.eigenvalues()(i);
    return ev;
}

bool is_positive_definite(const Emt& M) {
    const auto ev = emt_spectrum(M);
    return !ev.empty() && ev.front() > 0.0;
}

}  // namespace etd
