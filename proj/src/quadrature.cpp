#include "etd/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lebedev_data.hpp"

namespace etd {

namespace {

constexpr double kPi = 3.14159265358979323846;

DirectionSet equispaced(int n) {
    DirectionSet s;
    s.dim = 2;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n;
        s.nodes.push_back(make_vec({std::cos(t), std::sin(t)}));
        s.weights.push_back(1.0 / n);
    }
    return s;
}

// All distinct coordinate permutations of base, each with every sign pattern of its nonzero entries.
void add_orbit(std::array<double, 3> base, double w, DirectionSet& s) {
    std::sort(base.begin(), base.end());
    do {
        int nz[3], k = 0;
        for (int i = 0; i < 3; ++i)
            if (base[i] != 0.0) nz[k++] = i;
        for (int mask = 0; mask < (1 << k); ++mask) {
            RVec x = make_vec({base[0], base[1], base[2]});
            for (int b = 0; b < k; ++b)
                if (mask & (1 << b)) x[nz[b]] = -x[nz[b]];
            s.nodes.push_back(x);
            s.weights.push_back(w);
        }
    } while (std::next_permutation(base.begin(), base.end()));
}

}  // namespace

void DirectionSet::validate() const {
    if (nodes.empty()) throw std::invalid_argument("direction set is empty");
    if (nodes.size() != weights.size()) throw std::invalid_argument("direction set: node/weight count mismatch");
    double total = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].d != dim) throw std::invalid_argument("direction set: node dimension mismatch");
        if (std::abs(norm(nodes[i]) - 1.0) > 1e-12) throw std::invalid_argument("direction set: non-unit node");
        if (weights[i] < 0) throw std::invalid_argument("direction set: negative weight");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("direction set: weights must sum to one");
}

DirectionSet circle_rule(int n) {
    if (n < 4) throw std::invalid_argument("circle_rule requires n >= 4");
    return equispaced(n);
}

std::vector<int> available_sphere_orders() {
    std::vector<int> out;
    for (int i = 0; i < detail::kLebedevRuleCount; ++i) out.push_back(detail::kLebedevRules[i].order);
    return out;
}

DirectionSet sphere_rule(int order) {
    const detail::LebedevRuleInfo* info = nullptr;
    for (int i = 0; i < detail::kLebedevRuleCount; ++i)
        if (detail::kLebedevRules[i].order == order) info = &detail::kLebedevRules[i];
    if (!info) throw std::invalid_argument("sphere_rule: unsupported order " + std::to_string(order));

    DirectionSet s;
    s.dim = 3;
    for (int g = info->first; g < info->first + info->count; ++g) {
        const auto& G = detail::kLebedevGenerators[g];
        const double a = G.a, b = G.b;
        switch (G.type) {
            case 1: add_orbit({1.0, 0.0, 0.0}, G.v, s); break;
            case 2: add_orbit({0.0, std::sqrt(0.5), std::sqrt(0.5)}, G.v, s); break;
            case 3: {
                const double t = std::sqrt(1.0 / 3.0);
                add_orbit({t, t, t}, G.v, s);
                break;
            }
            case 4: add_orbit({a, a, std::sqrt(1.0 - 2.0 * a * a)}, G.v, s); break;
            case 5: add_orbit({a, std::sqrt(1.0 - a * a), 0.0}, G.v, s); break;
            case 6: add_orbit({a, b, std::sqrt(1.0 - a * a - b * b)}, G.v, s); break;
            default: throw std::logic_error("corrupt Lebedev table");
        }
    }
    if (static_cast<int>(s.size()) != info->points) throw std::logic_error("Lebedev point count mismatch");
    return s;
}

DirectionSet fibonacci_sphere(int n) {
    if (n < 1) throw std::invalid_argument("fibonacci_sphere requires n >= 1");
    DirectionSet s;
    s.dim = 3;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        s.nodes.push_back(make_vec({rho * std::cos(phi), rho * std::sin(phi), z}));
        s.weights.push_back(1.0 / n);
    }
    return s;
}

DirectionSet uniform_directions(int n, int dim) {
    if (n < 1) throw std::invalid_argument("uniform_directions requires n >= 1");
    if (dim == 2) return equispaced(n);
    if (dim == 3) return fibonacci_sphere(n);
    throw std::invalid_argument("uniform_directions: dimension must be 2 or 3");
}

}  // namespace etd
