#include "etd/special.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace etd {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Below this argument the power series is used; it converges to round-off in < 20 terms.
constexpr double kSeriesSwitch = 1.0;

double cyl_y(int n, double z) { return std::cyl_neumann(static_cast<double>(n), z); }

// Above this argument the library spherical Bessel routines may throw; upward recurrence
// from the closed forms of order 0 and 1 is stable there since z >> n.
constexpr double kSphRecurrenceSwitch = 1000.0;

// j_n(z) (first) and y_n(z) (second) by upward recurrence.
std::pair<double, double> sph_jy_recurrence(int n, double z) {
    const double s = std::sin(z), c = std::cos(z);
    double j0 = s / z, j1 = s / (z * z) - c / z;
    double y0 = -c / z, y1 = -c / (z * z) - s / z;
    if (n == 0) return {j0, y0};
    for (int m = 1; m < n; ++m) {
        const double f = (2 * m + 1) / z;
        const double j2 = f * j1 - j0, y2 = f * y1 - y0;
        j0 = j1;
        j1 = j2;
        y0 = y1;
        y1 = y2;
    }
    return {j1, y1};
}

double sph_j(int n, double z) {
    return z < kSphRecurrenceSwitch ? std::sph_bessel(static_cast<unsigned>(n), z) : sph_jy_recurrence(n, z).first;
}

double sph_y(int n, double z) {
    return z < kSphRecurrenceSwitch ? std::sph_neumann(static_cast<unsigned>(n), z) : sph_jy_recurrence(n, z).second;
}

}  // namespace

double bessel_j_scaled(int n, double z) {
    if (n < 0) throw std::invalid_argument("bessel order must be non-negative");
    z = std::abs(z);
    if (z < kSeriesSwitch) {
        // sum_k (-1)^k (z/2)^{2k} / (2^n k! (n+k)!)
        double term = 1.0 / std::pow(2.0, n);
        for (int m = 1; m <= n; ++m) term /= m;
        double sum = term;
        const double q = -0.25 * z * z;
        for (int k = 1; k < 30; ++k) {
            term *= q / (k * double(n + k));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::cyl_bessel_j(static_cast<double>(n), z) / std::pow(z, n);
}

double sph_bessel_j_scaled(int n, double z) {
    if (n < 0) throw std::invalid_argument("bessel order must be non-negative");
    z = std::abs(z);
    if (z < kSeriesSwitch) {
        // sum_k (-1)^k z^{2k} / (2^k k! (2n+2k+1)!!)
        double term = 1.0;
        for (int m = 1; m <= 2 * n + 1; m += 2) term /= m;
        double sum = term;
        const double q = -0.5 * z * z;
        for (int k = 1; k < 30; ++k) {
            term *= q / (k * double(2 * n + 2 * k + 1));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return sph_j(n, z) / std::pow(z, n);
}

std::array<double, 5> im_green_radial(int dim, double kappa, double r, int nmax) {
    if (nmax < 0 || nmax > 4) throw std::invalid_argument("radial derivative order must be 0..4");
    std::array<double, 5> F{};
    const double z = kappa * r;
    const double k2 = kappa * kappa;
    double scale = dim == 2 ? 0.25 : kappa / (4.0 * kPi);
    if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
    for (int n = 0; n <= nmax; ++n) {
        F[n] = scale * (dim == 2 ? bessel_j_scaled(n, z) : sph_bessel_j_scaled(n, z));
        scale *= -k2;
    }
    return F;
}

std::array<std::complex<double>, 5> green_radial(int dim, double kappa, double r, int nmax) {
    if (nmax < 0 || nmax > 4) throw std::invalid_argument("radial derivative order must be 0..4");
    if (!(r > 0)) throw std::domain_error("Green function is singular at coincident points");
    using C = std::complex<double>;
    std::array<C, 5> F{};
    const double z = kappa * r;
    const double k2 = kappa * kappa;
    C scale = dim == 2 ? C(0, 0.25) : C(0, kappa / (4.0 * kPi));
    if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
    for (int n = 0; n <= nmax; ++n) {
        C h;
        if (dim == 2)
            h = C(bessel_j_scaled(n, z), cyl_y(n, z) / std::pow(z, n));
        else
            h = C(sph_bessel_j_scaled(n, z), sph_y(n, z) / std::pow(z, n));
        F[n] = scale * h;
        scale *= -k2;
    }
    return F;
}

}  // namespace etd
