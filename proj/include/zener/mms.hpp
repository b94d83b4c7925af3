#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "zener/material.hpp"
#include "zener/projector.hpp"

namespace zener {

namespace detail {

template<typename T>
struct DisplacementPart {
    Vec2<T> value;
    Mat2<T> grad;
    Vec2<T> laplacian;
    Vec2<T> grad_div;
};

// horizontal part (x^2 - x^3) sin(pi y) e_1, zero on the unit square boundary
template<typename T>
DisplacementPart<T> displacement_a(const Vec2<T>& x)
{
    const T pi = std::acos(T(-1));
    const T f = x[0] * x[0] - x[0] * x[0] * x[0];
    const T fp = T(2) * x[0] - T(3) * x[0] * x[0];
    const T fpp = T(2) - T(6) * x[0];
    const T g = std::sin(pi * x[1]);
    const T gp = pi * std::cos(pi * x[1]);
    const T gpp = -pi * pi * g;

    DisplacementPart<T> part;
    part.value = { f * g, T(0) };
    part.grad << fp * g, f * gp, T(0), T(0);
    part.laplacian = { fpp * g + f * gpp, T(0) };
    part.grad_div = { fpp * g, fp * gp };
    return part;
}

// vertical part sin(pi x) sin(pi y) e_2
template<typename T>
DisplacementPart<T> displacement_b(const Vec2<T>& x)
{
    const T pi = std::acos(T(-1));
    const T s1 = std::sin(pi * x[0]);
    const T c1 = std::cos(pi * x[0]);
    const T s2 = std::sin(pi * x[1]);
    const T c2 = std::cos(pi * x[1]);

    DisplacementPart<T> part;
    part.value = { T(0), s1 * s2 };
    part.grad << T(0), T(0), pi * c1 * s2, pi * s1 * c2;
    part.laplacian = { T(0), T(-2) * pi * pi * s1 * s2 };
    part.grad_div = { pi * pi * c1 * c2, -pi * pi * s1 * s2 };
    return part;
}

template<typename T>
Mat2<T> sym_part(const Mat2<T>& m)
{
    return T(0.5) * (m + m.transpose());
}

// off-diagonal entry of the skew part of a gradient
template<typename T>
T skew_entry(const Mat2<T>& m)
{
    return T(0.5) * (m(0, 1) - m(1, 0));
}

// divergence of E eps(w) for the isotropic map E tau = 2 m tau + l tr(tau) I
template<typename T>
Vec2<T> isotropic_div(T m, T l, const DisplacementPart<T>& part)
{
    return Vec2<T>(m * part.laplacian + (m + l) * part.grad_div);
}

} // namespace detail

// separable manufactured solution u = cos(t) u_a + (1 + t) u_b on the unit
// square with homogeneous displacement data; the viscous stress solves
// zeta' + zeta / omega = (D - C) eps(u') with no transient
template<typename T>
struct ExactSolution {
    IsotropicMaterial<T> iso{};
    T rho = 1;
    T omega = 1;

    T c_zeta(T t) const
    {
        return (omega * omega * std::cos(t) - omega * std::sin(t))
             / (T(1) + omega * omega);
    }

    T c_zeta_rate(T t) const
    {
        return (-omega * omega * std::sin(t) - omega * std::cos(t))
             / (T(1) + omega * omega);
    }

    Vec2<T> displacement(const Vec2<T>& x, T t) const
    {
        const auto a = detail::displacement_a(x);
        const auto b = detail::displacement_b(x);
        return Vec2<T>(std::cos(t) * a.value + (T(1) + t) * b.value);
    }

    Vec2<T> velocity(const Vec2<T>& x, T t) const
    {
        const auto a = detail::displacement_a(x);
        const auto b = detail::displacement_b(x);
        return Vec2<T>(-std::sin(t) * a.value + b.value);
    }

    Vec2<T> acceleration(const Vec2<T>& x, T t) const
    {
        return Vec2<T>(-std::cos(t) * detail::displacement_a(x).value);
    }

    Mat2<T> strain(const Vec2<T>& x, T t) const
    {
        const auto a = detail::displacement_a(x);
        const auto b = detail::displacement_b(x);
        return Mat2<T>(std::cos(t) * detail::sym_part(a.grad)
                       + (T(1) + t) * detail::sym_part(b.grad));
    }

    Mat2<T> strain_rate(const Vec2<T>& x, T t) const
    {
        const auto a = detail::displacement_a(x);
        const auto b = detail::displacement_b(x);
        return Mat2<T>(-std::sin(t) * detail::sym_part(a.grad)
                       + detail::sym_part(b.grad));
    }

    Mat2<T> zeta(const Vec2<T>& x, T t) const
    {
        const auto a = detail::displacement_a(x);
        const auto b = detail::displacement_b(x);
        return Mat2<T>(
            c_zeta(t) * apply_D_minus_C(iso, detail::sym_part(a.grad))
            + omega * apply_D_minus_C(iso, detail::sym_part(b.grad)));
    }

    Mat2<T> zeta_rate(const Vec2<T>& x, T t) const
    {
        const auto a = detail::displacement_a(x);
        return Mat2<T>(
            c_zeta_rate(t) * apply_D_minus_C(iso, detail::sym_part(a.grad)));
    }

    Mat2<T> gamma(const Vec2<T>& x, T t) const
    {
        const auto a = detail::displacement_a(x);
        const auto b = detail::displacement_b(x);
        return Mat2<T>(std::cos(t) * apply_C(iso, detail::sym_part(a.grad))
                       + (T(1) + t) * apply_C(iso, detail::sym_part(b.grad)));
    }

    Mat2<T> gamma_rate(const Vec2<T>& x, T t) const
    {
        const auto a = detail::displacement_a(x);
        const auto b = detail::displacement_b(x);
        return Mat2<T>(-std::sin(t) * apply_C(iso, detail::sym_part(a.grad))
                       + apply_C(iso, detail::sym_part(b.grad)));
    }

    Mat2<T> stress(const Vec2<T>& x, T t) const
    {
        return Mat2<T>(zeta(x, t) + gamma(x, t));
    }

    Mat2<T> rotation(const Vec2<T>& x, T t) const
    {
        const T s = std::cos(t) * detail::skew_entry(detail::displacement_a(x).grad)
                  + (T(1) + t) * detail::skew_entry(detail::displacement_b(x).grad);
        Mat2<T> m;
        m << T(0), s, -s, T(0);
        return m;
    }

    Mat2<T> rotation_rate(const Vec2<T>& x, T t) const
    {
        const T s = -std::sin(t) * detail::skew_entry(detail::displacement_a(x).grad)
                  + detail::skew_entry(detail::displacement_b(x).grad);
        Mat2<T> m;
        m << T(0), s, -s, T(0);
        return m;
    }

    Vec2<T> stress_div(const Vec2<T>& x, T t) const
    {
        const auto a = detail::displacement_a(x);
        const auto b = detail::displacement_b(x);
        const T mv = (iso.a - T(1)) * iso.mu;
        const T lv = (iso.b - T(1)) * iso.lambda;
        return Vec2<T>(c_zeta(t) * detail::isotropic_div(mv, lv, a)
                       + omega * detail::isotropic_div(mv, lv, b)
                       + std::cos(t) * detail::isotropic_div(iso.mu, iso.lambda, a)
                       + (T(1) + t) * detail::isotropic_div(iso.mu, iso.lambda, b));
    }

    Vec2<T> stress_div_rate(const Vec2<T>& x, T t) const
    {
        const auto a = detail::displacement_a(x);
        const auto b = detail::displacement_b(x);
        const T mv = (iso.a - T(1)) * iso.mu;
        const T lv = (iso.b - T(1)) * iso.lambda;
        return Vec2<T>(c_zeta_rate(t) * detail::isotropic_div(mv, lv, a)
                       - std::sin(t) * detail::isotropic_div(iso.mu, iso.lambda, a)
                       + detail::isotropic_div(iso.mu, iso.lambda, b));
    }

    Vec2<T> force(const Vec2<T>& x, T t) const
    {
        return Vec2<T>(rho * acceleration(x, t) - stress_div(x, t));
    }

    PairFn<T> pair_at(T t) const
    {
        PairFn<T> p;
        p.zeta = [s = *this, t](const Vec2<T>& x) { return s.zeta(x, t); };
        p.gamma = [s = *this, t](const Vec2<T>& x) { return s.gamma(x, t); };
        p.div_plus = [s = *this, t](const Vec2<T>& x) { return s.stress_div(x, t); };
        return p;
    }

    PairFn<T> pair_rate_at(T t) const
    {
        PairFn<T> p;
        p.zeta = [s = *this, t](const Vec2<T>& x) { return s.zeta_rate(x, t); };
        p.gamma = [s = *this, t](const Vec2<T>& x) { return s.gamma_rate(x, t); };
        p.div_plus = [s = *this, t](const Vec2<T>& x) {
            return s.stress_div_rate(x, t);
        };
        return p;
    }

    TensorFn<T> rotation_at(T t) const
    {
        return [s = *this, t](const Vec2<T>& x) { return s.rotation(x, t); };
    }

    TensorFn<T> rotation_rate_at(T t) const
    {
        return [s = *this, t](const Vec2<T>& x) { return s.rotation_rate(x, t); };
    }

    VectorFn<T> accel_at(T t) const
    {
        return [s = *this, t](const Vec2<T>& x) { return s.acceleration(x, t); };
    }

    std::function<Vec2<T>(const Vec2<T>&, T)> source() const
    {
        return [s = *this](const Vec2<T>& x, T t) { return s.force(x, t); };
    }
};

// --- error measures ----------------------------------------------------------

// returns (error, exact norm) in the pair graph norm, which combines the L2
// norms of both tensor copies with that of the divergence of their sum
template<typename T>
std::pair<T, T> pair_error(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                           const DynVec<T>& pair, const PairFn<T>& exact,
                           int degree)
{
    const auto quad = make_quadrature<T>(degree);
    T err2 = 0, ref2 = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = geometry(mesh, t);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2<T> x = g.p0 + g.J * quad.points[q];
            const Mat2<T> ez = exact.zeta(x);
            const Mat2<T> eg = exact.gamma(x);
            const Vec2<T> ed = exact.div_plus(x);
            const Mat2<T> dz =
                eval_tensor(mesh, sp, t, pair.segment(0, sp.n_W), quad.points[q]) - ez;
            const Mat2<T> dg =
                eval_tensor(mesh, sp, t, pair.segment(sp.n_W, sp.n_W), quad.points[q])
                - eg;
            const Vec2<T> dd =
                eval_tensor_div(mesh, sp, t, pair.segment(0, sp.n_W), quad.points[q])
                + eval_tensor_div(mesh, sp, t, pair.segment(sp.n_W, sp.n_W),
                                  quad.points[q])
                - ed;
            const T w = quad.weights[q] * g.detJ;
            err2 += w * (dz.squaredNorm() + dg.squaredNorm() + dd.squaredNorm());
            ref2 += w * (ez.squaredNorm() + eg.squaredNorm() + ed.squaredNorm());
        }
    }
    return { std::sqrt(err2), std::sqrt(ref2) };
}

// returns (error, exact norm) in L2 for the skew multiplier; the squared
// Frobenius norm of a skew tensor doubles its off-diagonal entry squared
template<typename T>
std::pair<T, T> skew_error(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                           const DynVec<T>& q_vec, const TensorFn<T>& exact,
                           int degree)
{
    const auto quad = make_quadrature<T>(degree);
    T err2 = 0, ref2 = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = geometry(mesh, t);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2<T> x = g.p0 + g.J * quad.points[q];
            const T es = exact(x)(0, 1);
            const T ds = eval_skew(sp, t, q_vec, quad.points[q]) - es;
            const T w = quad.weights[q] * g.detJ;
            err2 += w * T(2) * ds * ds;
            ref2 += w * T(2) * es * es;
        }
    }
    return { std::sqrt(err2), std::sqrt(ref2) };
}

// returns (error, exact norm) in L2 for a piecewise vector field
template<typename T>
std::pair<T, T> vector_error(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                             const DynVec<T>& u_vec, const VectorFn<T>& exact,
                             int degree)
{
    const auto quad = make_quadrature<T>(degree);
    T err2 = 0, ref2 = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = geometry(mesh, t);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2<T> x = g.p0 + g.J * quad.points[q];
            const Vec2<T> ev = exact(x);
            const Vec2<T> dv = Vec2<T>(eval_vector(sp, t, u_vec, quad.points[q]) - ev);
            const T w = quad.weights[q] * g.detJ;
            err2 += w * dv.squaredNorm();
            ref2 += w * ev.squaredNorm();
        }
    }
    return { std::sqrt(err2), std::sqrt(ref2) };
}

} // namespace zener
