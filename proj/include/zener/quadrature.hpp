// quadrature.hpp
// Gauss-Legendre rules on [0,1] and triangle rules on the reference triangle
// {x >= 0, y >= 0, x + y <= 1}. The triangle rule is a tensor Gauss rule
// pushed through the Duffy map (x, y) = (xi (1 - eta), eta), whose Jacobian
// (1 - eta) is absorbed into the weights. All weights are positive and a
// request of degree d integrates every polynomial of total degree <= d
// exactly.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "zener/types.hpp"

namespace zener {

// Legendre polynomial P_j on [-1,1] by recurrence.
template<typename T>
T legendre(int j, T x)
{
    T p0 = 1, p1 = x;
    if (j == 0) return p0;
    for (int i = 1; i < j; ++i) {
        const T p2 = ((2 * i + 1) * x * p1 - i * p0) / T(i + 1);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// Shifted Legendre polynomial on [0,1]; used as edge moment weights.
template<typename T>
T legendre01(int j, T s)
{
    return legendre(j, T(2) * s - T(1));
}

template<typename T>
struct LineQuadrature {
    std::vector<T> points;  // in (0,1)
    std::vector<T> weights; // sum to 1
};

// m-point Gauss-Legendre rule on [0,1], exact through degree 2m-1. Nodes by
// Newton iteration from the Chebyshev initial guess.
template<typename T>
LineQuadrature<T> gauss_legendre_01(int m)
{
    if (m < 1)
        throw std::invalid_argument("gauss_legendre_01: need at least one point");

    LineQuadrature<T> rule;
    rule.points.resize(m);
    rule.weights.resize(m);
    const T pi = std::acos(T(-1));
    for (int i = 0; i < m; ++i) {
        T x = std::cos(pi * (T(i) + T(0.75)) / (T(m) + T(0.5)));
        T dp = 1;
        for (int it = 0; it < 100; ++it) {
            const T p = legendre(m, x);
            dp = m * (x * p - legendre(m - 1, x)) / (x * x - T(1));
            const T dx = p / dp;
            x -= dx;
            if (std::abs(dx) < T(1e-16))
                break;
        }
        const T w = T(2) / ((T(1) - x * x) * dp * dp);
        // map from [-1,1]; nodes come out descending, store ascending
        rule.points[m - 1 - i] = (x + T(1)) / T(2);
        rule.weights[m - 1 - i] = w / T(2);
    }
    return rule;
}

template<typename T>
struct TriangleQuadrature {
    int degree = 0;                // guaranteed exactness
    std::vector<Vec2<T>> points;   // strictly inside the reference triangle
    std::vector<T> weights;        // sum to 1/2
    int size() const { return int(points.size()); }
};

template<typename T>
TriangleQuadrature<T> make_quadrature(int degree)
{
    if (degree < 1 || degree > 10)
        throw std::invalid_argument("make_quadrature: unsupported degree");

    // a monomial x^p y^q with p+q <= d needs degree d in xi and d+1 in eta
    // (the Duffy Jacobian adds one power of eta)
    const int mxi = (degree + 2) / 2;
    const int meta = (degree + 3) / 2;
    const auto gxi = gauss_legendre_01<T>(mxi);
    const auto geta = gauss_legendre_01<T>(meta);

    TriangleQuadrature<T> rule;
    rule.degree = degree;
    rule.points.reserve(mxi * meta);
    rule.weights.reserve(mxi * meta);
    for (int a = 0; a < mxi; ++a)
        for (int b = 0; b < meta; ++b) {
            const T xi = gxi.points[a], eta = geta.points[b];
            rule.points.emplace_back(xi * (T(1) - eta), eta);
            rule.weights.push_back(gxi.weights[a] * geta.weights[b] * (T(1) - eta));
        }
    return rule;
}

} // namespace zener
