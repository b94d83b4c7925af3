// projector.hpp
// Projections onto the discrete spaces.
//
// The pair projector is elliptic: given a smooth pair p = (zeta, gamma), it
// returns the discrete pair closest in L2 subject to the skew constraint and
// to matching weighted divergence data,
//
//   (Xi p, q) + (r, q+) + (u, div q+)_rho = (p, q)        for all discrete q,
//   (s, (Xi p)+)                          = (s, p+)       for all multipliers s,
//   (v, div (Xi p)+)_rho                  = (v, div p+)_rho for all velocities v,
//
// a square saddle system in (Xi p, r, u). Its key structural property is the
// commuting identity: (1/rho) div (Xi p)+ is exactly the velocity-space L2
// projection of (1/rho) div p+ (tested below machine precision, not just
// asymptotically).
//
// The multiplier and velocity spaces are element-local, so their projections
// are element solves against an orthogonal basis. The tensor interpolation
// operator assigns edge dofs from normal-trace moments parameterized along
// the global edge direction, and interior dofs from covariant moments; it
// commutes with the divergence in the same discrete sense.

#pragma once

#include <functional>

#include "zener/assembly.hpp"
#include "zener/material.hpp"
#include "zener/mesh.hpp"
#include "zener/spaces.hpp"

namespace zener {

// quadrature degrees for functionals applied to smooth (non-polynomial) data
inline constexpr int functional_tri_degree = 10;
inline constexpr int functional_line_points = 8;

template<typename T>
using TensorFn = std::function<Mat2<T>(const Vec2<T>&)>;
template<typename T>
using VectorFn = std::function<Vec2<T>(const Vec2<T>&)>;

// analytic pair data handed to the elliptic projector; div_plus is the
// divergence of zeta + gamma
template<typename T>
struct PairFn {
    TensorFn<T> zeta, gamma;
    VectorFn<T> div_plus;
};

template<typename T>
class PairProjector {
  public:
    PairProjector(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                  const MaterialField<T>& field, const SystemBlocks<T>& blocks)
        : m_mesh(&mesh), m_sp(&sp), m_field(&field)
    {
        std::vector<Trip<T>> trips;
        const int nS = sp.n_S, nQ = sp.n_Q, nU = sp.n_U;
        detail::append_block(trips, blocks.G, 0, 0, T(1));
        detail::append_block(trips, blocks.B, nS, 0, T(1));
        detail::append_block(trips, blocks.B, nS, 0, T(1), true);
        detail::append_block(trips, blocks.B_U, nS + nQ, 0, T(1));
        detail::append_block(trips, blocks.B_U, nS + nQ, 0, T(1), true);
        m_A.resize(nS + nQ + nU, nS + nQ + nU);
        m_A.setFromTriplets(trips.begin(), trips.end());
        m_lu.compute(m_A);
        if (!m_lu.ok())
            throw std::runtime_error("PairProjector: factorization failed");
    }

    DynVec<T> project(const PairFn<T>& p) const
    {
        const auto& mesh = *m_mesh;
        const auto& sp = *m_sp;
        const auto quad = make_quadrature<T>(functional_tri_degree);
        const auto bdm_tab = tabulate(sp.bdm, quad.points);
        const DynMat<T> scal_tab = sp.scalar.tabulate(quad.points);

        DynVec<T> rhs = DynVec<T>::Zero(m_A.rows());
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto tab =
                detail::element_tables(mesh, sp, t, quad, bdm_tab, scal_tab);
            const T rho = m_field->rho_of(mesh.subdomain[t]);
            DynVec<T> l_zeta0 = DynVec<T>::Zero(sp.nloc_flux);
            DynVec<T> l_zeta1 = DynVec<T>::Zero(sp.nloc_flux);
            DynVec<T> l_gamma0 = DynVec<T>::Zero(sp.nloc_flux);
            DynVec<T> l_gamma1 = DynVec<T>::Zero(sp.nloc_flux);
            for (int q = 0; q < quad.size(); ++q) {
                const Mat2<T> z = p.zeta(tab.x[q]);
                const Mat2<T> g = p.gamma(tab.x[q]);
                const Vec2<T> dp = p.div_plus(tab.x[q]);
                const T w = tab.w[q];
                for (int i = 0; i < sp.nloc_flux; ++i) {
                    l_zeta0[i] += w * (z(0, 0) * tab.v0(i, q) + z(0, 1) * tab.v1(i, q));
                    l_zeta1[i] += w * (z(1, 0) * tab.v0(i, q) + z(1, 1) * tab.v1(i, q));
                    l_gamma0[i] += w * (g(0, 0) * tab.v0(i, q) + g(0, 1) * tab.v1(i, q));
                    l_gamma1[i] += w * (g(1, 0) * tab.v0(i, q) + g(1, 1) * tab.v1(i, q));
                }
                const T skew_part = (z(0, 1) + g(0, 1)) - (z(1, 0) + g(1, 0));
                for (int u = 0; u < sp.nloc_scal; ++u) {
                    rhs[sp.n_S + sp.q_id(t, u)] += w * scal_tab(u, q) * skew_part;
                    for (int c = 0; c < 2; ++c)
                        rhs[sp.n_S + sp.n_Q + sp.u_id(t, c, u)] +=
                            w * scal_tab(u, q) * dp[c] / rho;
                }
            }
            scatter_add_flux(sp, t, l_zeta0, rhs.segment(0, sp.n_flux));
            scatter_add_flux(sp, t, l_zeta1, rhs.segment(sp.n_flux, sp.n_flux));
            scatter_add_flux(sp, t, l_gamma0, rhs.segment(sp.n_W, sp.n_flux));
            scatter_add_flux(sp, t, l_gamma1, rhs.segment(sp.n_W + sp.n_flux, sp.n_flux));
        }

        DynVec<T> x = m_lu.solve(rhs);
        const T denom = std::max(rhs.norm(), T(1e-30));
        if (!((m_A * x - rhs).norm() / denom <= T(1e-10)))
            throw std::runtime_error("PairProjector: solve residual above tolerance");
        return x.segment(0, sp.n_S);
    }

  private:
    const Mesh<T>* m_mesh;
    const SpaceSet<T>* m_sp;
    const MaterialField<T>* m_field;
    SpMat<T> m_A;
    DirectLU<T> m_lu;
};

// --- element-local L2 projections -------------------------------------------

// skew tensors r = [[0, sigma], [-sigma, 0]]: project the scalar part; the
// double contraction doubles the Gram, hence the 1/(2 detJ)
template<typename T>
DynVec<T> l2_project_skew(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                          const TensorFn<T>& r)
{
    const auto quad = make_quadrature<T>(functional_tri_degree);
    const DynMat<T> scal_tab = sp.scalar.tabulate(quad.points);
    DynVec<T> out = DynVec<T>::Zero(sp.n_Q);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = geometry(mesh, t);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2<T> x = g.p0 + g.J * quad.points[q];
            const Mat2<T> rv = r(x);
            const T w = quad.weights[q] * g.detJ * (rv(0, 1) - rv(1, 0));
            for (int i = 0; i < sp.nloc_scal; ++i)
                out[sp.q_id(t, i)] += w * scal_tab(i, q) / (T(2) * g.detJ);
        }
    }
    return out;
}

// vector fields; fn may depend on the triangle (for piecewise data)
template<typename T>
DynVec<T> l2_project_vector(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                            const std::function<Vec2<T>(int, const Vec2<T>&)>& fn)
{
    const auto quad = make_quadrature<T>(functional_tri_degree);
    const DynMat<T> scal_tab = sp.scalar.tabulate(quad.points);
    DynVec<T> out = DynVec<T>::Zero(sp.n_U);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = geometry(mesh, t);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2<T> x = g.p0 + g.J * quad.points[q];
            const Vec2<T> v = fn(t, x);
            for (int c = 0; c < 2; ++c)
                for (int i = 0; i < sp.nloc_scal; ++i)
                    out[sp.u_id(t, c, i)] += quad.weights[q] * v[c] * scal_tab(i, q);
        }
    }
    return out;
}

template<typename T>
DynVec<T> l2_project_vector(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                            const VectorFn<T>& fn)
{
    return l2_project_vector<T>(mesh, sp,
                                [&fn](int, const Vec2<T>& x) { return fn(x); });
}

// velocity-space projection of (1/rho) div p+ from analytic divergence data
template<typename T>
DynVec<T> l2_project_weighted_div(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                                  const MaterialField<T>& field,
                                  const VectorFn<T>& div_plus)
{
    return l2_project_vector<T>(mesh, sp, [&](int t, const Vec2<T>& x) {
        return Vec2<T>(div_plus(x) / field.rho_of(mesh.subdomain[t]));
    });
}

// --- tensor interpolation ----------------------------------------------------

// Row-wise H(div) interpolation of a smooth tensor field. Edge dofs are
// moments of tau n against Legendre weights in the global low -> high edge
// parameterization; interior dofs are moments against the covariant
// push-forward of the reference fields, which makes them invariant under the
// Piola map. Dofs eliminated by the traction boundary are left at zero.
template<typename T>
DynVec<T> interpolate_tensor(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                             const TensorFn<T>& tau)
{
    DynVec<T> w = DynVec<T>::Zero(sp.n_W);
    const auto line = gauss_legendre_01<T>(functional_line_points);
    const int ne = sp.bdm.nedge_dof;

    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Vec2<T> lo = mesh.vertices[mesh.edges[e][0]];
        const Vec2<T> hi = mesh.vertices[mesh.edges[e][1]];
        const Vec2<T> tang = hi - lo;
        const T elen = tang.norm();
        const Vec2<T> n_global = Vec2<T>(tang[1], -tang[0]) / elen;
        for (std::size_t q = 0; q < line.points.size(); ++q) {
            const T s = line.points[q];
            const Vec2<T> tn = tau((T(1) - s) * lo + s * hi) * n_global;
            for (int j = 0; j < ne; ++j) {
                const T m = line.weights[q] * elen * legendre01(j, s);
                for (int r = 0; r < 2; ++r)
                    w[r * sp.n_flux + e * ne + j] += m * tn[r];
            }
        }
    }

    if (sp.bdm.nint > 0) {
        const auto quad = make_quadrature<T>(functional_tri_degree);
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto g = geometry(mesh, t);
            const Mat2<T> JinvT = g.Jinv.transpose();
            const int base = mesh.num_edges() * ne + t * sp.bdm.nint;
            for (int q = 0; q < quad.size(); ++q) {
                const Vec2<T> x = g.p0 + g.J * quad.points[q];
                const Mat2<T> tv = tau(x);
                for (int i = 0; i < sp.bdm.nint; ++i) {
                    const Vec2<T> wfield =
                        JinvT * detail::interior_field<T>(i, quad.points[q]);
                    // reference weight, physical measure: detJ cancels the
                    // covariant scaling
                    const Vec2<T> m = quad.weights[q] * g.detJ * (tv * wfield);
                    for (int r = 0; r < 2; ++r)
                        w[r * sp.n_flux + base + i] += m[r];
                }
            }
        }
    }

    for (int i = 0; i < sp.n_flux; ++i)
        if (sp.constrained[i])
            for (int r = 0; r < 2; ++r)
                w[r * sp.n_flux + i] = T(0);
    return w;
}

// --- commuting-diagram residuals ---------------------------------------------

// L2 norm of (1/rho) div w+ - u, where w+ is the pair sum of a discrete pair
// and u a velocity-space field
template<typename T>
T weighted_div_mismatch(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                        const MaterialField<T>& field, const DynVec<T>& pair,
                        const DynVec<T>& u)
{
    const auto quad = make_quadrature<T>(2 * sp.k + 2);
    T err2 = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = geometry(mesh, t);
        const T rho = field.rho_of(mesh.subdomain[t]);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2<T> d =
                eval_tensor_div(mesh, sp, t, pair.segment(0, sp.n_W), quad.points[q])
                + eval_tensor_div(mesh, sp, t, pair.segment(sp.n_W, sp.n_W),
                                  quad.points[q]);
            const Vec2<T> diff = d / rho - eval_vector(sp, t, u, quad.points[q]);
            err2 += quad.weights[q] * g.detJ * diff.squaredNorm();
        }
    }
    return std::sqrt(err2);
}

// same for a single tensor field w against a velocity-space field (unit rho)
template<typename T>
T div_mismatch(const Mesh<T>& mesh, const SpaceSet<T>& sp, const DynVec<T>& w,
               const DynVec<T>& u)
{
    const auto quad = make_quadrature<T>(2 * sp.k + 2);
    T err2 = 0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto g = geometry(mesh, t);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2<T> d = eval_tensor_div(mesh, sp, t, w, quad.points[q]);
            const Vec2<T> diff = d - eval_vector(sp, t, u, quad.points[q]);
            err2 += quad.weights[q] * g.detJ * diff.squaredNorm();
        }
    }
    return std::sqrt(err2);
}

} // namespace zener
