#pragma once
// Small dense tensors over a runtime dimension d in {1,2,3}.
// Storage always has capacity 3^R; entries with any index >= d stay zero.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <type_traits>

namespace etd {

using cplx = std::complex<double>;

constexpr std::size_t pow3(int r) { return r == 0 ? 1 : 3 * pow3(r - 1); }

template <class T, int R>
struct Tensor {
    int d = 0;
    std::array<T, pow3(R)> v{};

    Tensor() = default;
    explicit Tensor(int dim) : d(dim) {
        if (dim < 1 || dim > 3) throw std::invalid_argument("tensor dimension must be 1..3");
    }

    template <class... I>
    T& operator()(I... idx) {
        static_assert(sizeof...(I) == R, "index count must equal rank");
        return v[flat(idx...)];
    }
    template <class... I>
    const T& operator()(I... idx) const {
        static_assert(sizeof...(I) == R, "index count must equal rank");
        return v[flat(idx...)];
    }
    T& operator[](int i) { return v[i]; }
    const T& operator[](int i) const { return v[i]; }

    Tensor& operator+=(const Tensor& o) {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += o.v[k];
        return *this;
    }
    Tensor& operator-=(const Tensor& o) {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= o.v[k];
        return *this;
    }
    template <class S>
    Tensor& operator*=(S s) {
        for (auto& x : v) x *= s;
        return *this;
    }

private:
    template <class... I>
    static constexpr std::size_t flat(I... idx) {
        std::size_t f = 0;
        ((f = 3 * f + static_cast<std::size_t>(idx)), ...);
        return f;
    }
};

template <class T> using Vec = Tensor<T, 1>;
template <class T> using Mat = Tensor<T, 2>;
template <class T> using Ten3 = Tensor<T, 3>;
template <class T> using Ten4 = Tensor<T, 4>;

using RVec = Vec<double>;
using CVec = Vec<cplx>;
using RMat = Mat<double>;
using CMat = Mat<cplx>;
using RTen3 = Ten3<double>;
using CTen3 = Ten3<cplx>;
using RTen4 = Ten4<double>;
using CTen4 = Ten4<cplx>;

inline RVec make_vec(std::initializer_list<double> xs) {
    RVec out(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) out[i++] = x;
    return out;
}
inline CVec make_cvec(std::initializer_list<cplx> xs) {
    CVec out(static_cast<int>(xs.size()));
    int i = 0;
    for (cplx x : xs) out[i++] = x;
    return out;
}

template <class T, int R>
Tensor<T, R> operator+(Tensor<T, R> a, const Tensor<T, R>& b) { return a += b; }
template <class T, int R>
Tensor<T, R> operator-(Tensor<T, R> a, const Tensor<T, R>& b) { return a -= b; }
template <class T, int R>
Tensor<T, R> operator-(Tensor<T, R> a) { return a *= -1.0; }

// Scalar products; a real tensor times a complex scalar promotes to complex.
template <class T, int R, class S, class = std::enable_if_t<std::is_arithmetic_v<S> || std::is_same_v<S, cplx>>>
auto operator*(const Tensor<T, R>& a, S s) {
    using U = decltype(T{} * s);
    Tensor<U, R> out;
    out.d = a.d;
    for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = a.v[k] * s;
    return out;
}
template <class T, int R, class S, class = std::enable_if_t<std::is_arithmetic_v<S> || std::is_same_v<S, cplx>>>
auto operator*(S s, const Tensor<T, R>& a) { return a * s; }

template <int R>
Tensor<cplx, R> to_complex(const Tensor<double, R>& a) {
    Tensor<cplx, R> out;
    out.d = a.d;
    for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = a.v[k];
    return out;
}
template <int R>
Tensor<double, R> real_part(const Tensor<cplx, R>& a) {
    Tensor<double, R> out;
    out.d = a.d;
    for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = a.v[k].real();
    return out;
}
template <int R>
Tensor<double, R> imag_part(const Tensor<cplx, R>& a) {
    Tensor<double, R> out;
    out.d = a.d;
    for (std::size_t k = 0; k < a.v.size(); ++k) out.v[k] = a.v[k].imag();
    return out;
}
template <int R>
Tensor<cplx, R> conj(const Tensor<cplx, R>& a) {
    Tensor<cplx, R> out = a;
    for (auto& x : out.v) x = std::conj(x);
    return out;
}

inline double abs2(double x) { return x * x; }
inline double abs2(cplx x) { return std::norm(x); }

// Sum of squared moduli of all entries.
template <class T, int R>
double norm2(const Tensor<T, R>& a) {
    double s = 0;
    for (const auto& x : a.v) s += abs2(x);
    return s;
}
template <class T, int R>
double norm(const Tensor<T, R>& a) { return std::sqrt(norm2(a)); }

template <class T, int R>
double max_abs(const Tensor<T, R>& a) {
    double m = 0;
    for (const auto& x : a.v) m = std::max(m, std::abs(x));
    return m;
}

// Full contraction over all indices in matching order (no conjugation).
template <class A, class B, int R>
auto contract_all(const Tensor<A, R>& a, const Tensor<B, R>& b) {
    decltype(A{} * B{}) s{};
    for (std::size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
    return s;
}

template <class A, class B>
auto dot(const Vec<A>& a, const Vec<B>& b) { return contract_all(a, b); }

template <class A, class B>
auto frob(const Mat<A>& a, const Mat<B>& b) { return contract_all(a, b); }

template <class T>
Mat<T> identity(int d) {
    Mat<T> m(d);
    for (int i = 0; i < d; ++i) m(i, i) = T(1);
    return m;
}

template <class A, class B>
auto outer(const Vec<A>& a, const Vec<B>& b) {
    Mat<decltype(A{} * B{})> m(a.d);
    for (int i = 0; i < a.d; ++i)
        for (int j = 0; j < a.d; ++j) m(i, j) = a[i] * b[j];
    return m;
}

template <class A, class B>
auto matvec(const Mat<A>& m, const Vec<B>& x) {
    Vec<decltype(A{} * B{})> y(m.d);
    for (int i = 0; i < m.d; ++i)
        for (int j = 0; j < m.d; ++j) y[i] += m(i, j) * x[j];
    return y;
}

template <class A, class B>
auto matmul(const Mat<A>& a, const Mat<B>& b) {
    Mat<decltype(A{} * B{})> c(a.d);
    for (int i = 0; i < a.d; ++i)
        for (int j = 0; j < a.d; ++j)
            for (int k = 0; k < a.d; ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
}

template <class T>
Mat<T> transpose(const Mat<T>& a) {
    Mat<T> t(a.d);
    for (int i = 0; i < a.d; ++i)
        for (int j = 0; j < a.d; ++j) t(i, j) = a(j, i);
    return t;
}

template <class T>
T trace(const Mat<T>& a) {
    T s{};
    for (int i = 0; i < a.d; ++i) s += a(i, i);
    return s;
}

// (F:A)_m = sum_pq f_mpq a_pq
template <class A, class B>
auto contract_3_2(const Ten3<A>& f, const Mat<B>& a) {
    Vec<decltype(A{} * B{})> out(f.d);
    const int d = f.d;
    for (int m = 0; m < d; ++m)
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) out[m] += f(m, p, q) * a(p, q);
    return out;
}

// (H:A)_lm = sum_pq h_lmpq a_pq
template <class A, class B>
auto contract_4_2(const Ten4<A>& h, const Mat<B>& a) {
    Mat<decltype(A{} * B{})> out(h.d);
    const int d = h.d;
    for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) out(l, m) += h(l, m, p, q) * a(p, q);
    return out;
}

// (H.G)_lmr = sum_pq h_lmpq g_pqr
template <class A, class B>
auto contract_4_3(const Ten4<A>& h, const Ten3<B>& g) {
    Ten3<decltype(A{} * B{})> out(h.d);
    const int d = h.d;
    for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) {
                    const auto hv = h(l, m, p, q);
                    for (int r = 0; r < d; ++r) out(l, m, r) += hv * g(p, q, r);
                }
    return out;
}

// (H.J)_lmrs = sum_pq h_lmpq j_pqrs
template <class A, class B>
auto contract_4_4(const Ten4<A>& h, const Ten4<B>& j) {
    Ten4<decltype(A{} * B{})> out(h.d);
    const int d = h.d;
    for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) {
                    const auto hv = h(l, m, p, q);
                    for (int r = 0; r < d; ++r)
                        for (int s = 0; s < d; ++s) out(l, m, r, s) += hv * j(p, q, r, s);
                }
    return out;
}

// Pair transpose: T_ijkl = A_klij.
template <class T>
Ten4<T> pair_transpose(const Ten4<T>& a) {
    Ten4<T> t(a.d);
    const int d = a.d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) t(i, j, k, l) = a(k, l, i, j);
    return t;
}

}  // namespace etd
