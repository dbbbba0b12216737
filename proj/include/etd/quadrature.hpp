#pragma once
// Direction sets on the unit circle / sphere with weights normalized to unit mass.

#include <vector>

#include "etd/tensor.hpp"

namespace etd {

struct DirectionSet {
    int dim = 0;
    std::vector<RVec> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    void validate() const;
};

// n equispaced angles starting at 0, weights 1/n.
DirectionSet circle_rule(int n);

// Lebedev-Laikov rule exact for spherical harmonics up to the given degree.
DirectionSet sphere_rule(int order);
std::vector<int> available_sphere_orders();

// Fibonacci lattice with equal weights.
DirectionSet fibonacci_sphere(int n);

// d=2: equispaced angles (any n >= 1); d=3: Fibonacci lattice.
DirectionSet uniform_directions(int n, int dim);

}  // namespace etd
