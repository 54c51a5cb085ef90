#pragma once

#include "nehari/grid.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace nehari::test {

/// Field with independent standard normal values.
inline Field random_field(const DomainPtr& domain, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(domain->size()));
    for (auto& x : v) x = normal(rng);
    return Field(domain, v);
}

/// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace nehari::test
