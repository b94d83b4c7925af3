// material.hpp
// Isotropic standard linear solid. The elastic law is
//   C tau = 2 mu tau + lambda tr(tau) I,
// and the relaxed (long-time) law scales each Lame coefficient,
//   D tau = 2 a mu tau + b lambda tr(tau) I,  a > 1, b > 1,
// so that D - C is positive definite. The mixed formulation works with the
// inverses A = C^{-1} and V = (D - C)^{-1}. Any map of the form
//   E tau = 2 m tau + l tr(tau) I
// with m > 0, m + l > 0 inverts in closed form (in 2D):
//   E^{-1} tau = 1/(2m) * ( tau - l/(2m + 2l) tr(tau) I ).

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "zener/types.hpp"

namespace zener {

template<typename T>
struct IsotropicMaterial {
    T mu = 1;      // shear modulus
    T lambda = 1;  // first Lame coefficient
    T a = 2;       // relaxed shear scale
    T b = 2;       // relaxed dilatational scale
};

namespace detail {

template<typename T>
Mat2<T> apply_lame(T m, T l, const Mat2<T>& tau)
{
    Mat2<T> out = T(2) * m * tau;
    const T tr = tau(0, 0) + tau(1, 1);
    out(0, 0) += l * tr;
    out(1, 1) += l * tr;
    return out;
}

template<typename T>
Mat2<T> apply_lame_inverse(T m, T l, const Mat2<T>& tau)
{
    const T tr = tau(0, 0) + tau(1, 1);
    const T c = l / (T(2) * m + T(2) * l);
    Mat2<T> out = tau;
    out(0, 0) -= c * tr;
    out(1, 1) -= c * tr;
    return out / (T(2) * m);
}

} // namespace detail

template<typename T>
Mat2<T> apply_C(const IsotropicMaterial<T>& mat, const Mat2<T>& tau)
{
    return detail::apply_lame(mat.mu, mat.lambda, tau);
}

template<typename T>
Mat2<T> apply_D(const IsotropicMaterial<T>& mat, const Mat2<T>& tau)
{
    return detail::apply_lame(mat.a * mat.mu, mat.b * mat.lambda, tau);
}

template<typename T>
Mat2<T> apply_D_minus_C(const IsotropicMaterial<T>& mat, const Mat2<T>& tau)
{
    return detail::apply_lame((mat.a - T(1)) * mat.mu, (mat.b - T(1)) * mat.lambda, tau);
}

// A = C^{-1}
template<typename T>
Mat2<T> apply_A(const IsotropicMaterial<T>& mat, const Mat2<T>& tau)
{
    return detail::apply_lame_inverse(mat.mu, mat.lambda, tau);
}

// V = (D - C)^{-1}
template<typename T>
Mat2<T> apply_V(const IsotropicMaterial<T>& mat, const Mat2<T>& tau)
{
    return detail::apply_lame_inverse((mat.a - T(1)) * mat.mu,
                                      (mat.b - T(1)) * mat.lambda, tau);
}

// One material law shared by all subdomains; density and relaxation time may
// jump across them (index = label - 1).
template<typename T>
struct MaterialField {
    IsotropicMaterial<T> iso;
    std::vector<T> rho{ T(1) };
    std::vector<T> omega{ T(1) };

    T rho_of(int label) const { return rho.at(std::size_t(label - 1)); }
    T omega_of(int label) const { return omega.at(std::size_t(label - 1)); }
};

template<typename T>
struct MaterialDiagnostics {
    bool ok = true;
    std::string message;
    // smallest eigenvalues of C and D - C on symmetric tensors
    T alpha_C = 0;
    T alpha_relax = 0;
};

template<typename T>
MaterialDiagnostics<T> validate(const MaterialField<T>& field, int num_subdomains)
{
    MaterialDiagnostics<T> diag;
    const auto& m = field.iso;
    const auto fail = [&diag](const std::string& msg) {
        diag.ok = false;
        diag.message = msg;
    };

    if (!(m.mu > T(0)))
        fail("mu must be positive");
    else if (!(m.mu + m.lambda > T(0)))
        fail("mu + lambda must be positive");
    else if (!(m.a > T(1)) || !(m.b > T(1)))
        fail("relaxed scales a, b must exceed 1");
    else if (!((m.a - T(1)) * m.mu + (m.b - T(1)) * m.lambda > T(0)))
        fail("D - C must be positive definite");
    else if (int(field.rho.size()) < num_subdomains || int(field.omega.size()) < num_subdomains)
        fail("rho/omega need one value per subdomain");
    else {
        for (int s = 0; s < num_subdomains; ++s) {
            if (!(field.rho[s] > T(0))) fail("rho must be positive");
            if (!(field.omega[s] > T(0))) fail("omega must be positive");
        }
    }

    diag.alpha_C = T(2) * m.mu;
    diag.alpha_relax = T(2) * (m.a - T(1)) * m.mu;
    return diag;
}

} // namespace zener
