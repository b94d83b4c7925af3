// refelem.hpp
// Reference-element machinery on the unit triangle with vertices (0,0),
// (1,0), (0,1).
//
// Two ingredients live here:
//   * L2-orthonormal scalar bases of P_m, used for the discontinuous
//     multiplier and velocity spaces; being orthonormal on the reference
//     element makes every element-local mass matrix a multiple of the
//     identity.
//   * the full P_k vector basis (k = 1, 2) with the H(div) degrees of
//     freedom: moments of the normal trace against Legendre polynomials on
//     each edge, plus (for k = 2) interior moments against the three fields
//     (1,0), (0,1), (-y,x). The basis is dual to those functionals by
//     construction (inverse of the DOF matrix).
//
// Local edge e runs from vertex (e+1)%3 to vertex (e+2)%3 (CCW traversal).
// When the mesh's global edge direction opposes the traversal, the moment
// weights are evaluated in the reversed parameter; since the weights are
// Legendre polynomials this only flips the sign of the odd moments, handled
// by dof_flip_factors below.
//
// Physical elements use the contravariant Piola map
//   v(F(xhat)) = J vhat(xhat) / det J,   div v(F(xhat)) = div vhat / det J,
// which preserves the edge functionals exactly (normal-trace moments against
// arclength), so the mapped basis stays dual to the physical functionals.

#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "zener/mesh.hpp"
#include "zener/quadrature.hpp"
#include "zener/types.hpp"

namespace zener {

namespace detail {

// scalar monomials x^p y^q of total degree <= deg, graded order
inline std::vector<std::array<int, 2>> monomials(int deg)
{
    std::vector<std::array<int, 2>> mono;
    for (int d = 0; d <= deg; ++d)
        for (int px = d; px >= 0; --px)
            mono.push_back({ px, d - px });
    return mono;
}

template<typename T>
T eval_monomial(const std::array<int, 2>& m, const Vec2<T>& x)
{
    T v = 1;
    for (int i = 0; i < m[0]; ++i) v *= x[0];
    for (int i = 0; i < m[1]; ++i) v *= x[1];
    return v;
}

// exact integral of x^p y^q over the reference triangle: p! q! / (p+q+2)!
template<typename T>
T monomial_integral(int p, int q)
{
    T v = 1;
    // p! q! / (p+q+2)! = prod_{i=1..q} i/(p+i) / ((p+q+1)(p+q+2))
    for (int i = 1; i <= q; ++i)
        v *= T(i) / T(p + i);
    return v / (T(p + q + 1) * T(p + q + 2));
}

} // namespace detail

// ---------------------------------------------------------------------------
// orthonormal scalar basis of P_deg on the reference triangle

template<typename T>
struct ScalarBasis {
    int deg = 0;
    int dim = 0;
    std::vector<std::array<int, 2>> mono;
    DynMat<T> coef; // column i = monomial coefficients of basis function i

    T eval(int i, const Vec2<T>& x) const
    {
        T v = 0;
        for (int m = 0; m < dim; ++m)
            v += coef(m, i) * detail::eval_monomial(mono[m], x);
        return v;
    }

    // dim x npts table of values
    DynMat<T> tabulate(const std::vector<Vec2<T>>& pts) const
    {
        DynMat<T> vals(dim, pts.size());
        for (std::size_t q = 0; q < pts.size(); ++q)
            for (int i = 0; i < dim; ++i)
                vals(i, q) = eval(i, pts[q]);
        return vals;
    }
};

template<typename T>
ScalarBasis<T> make_scalar_basis(int deg)
{
    if (deg < 0)
        throw std::invalid_argument("make_scalar_basis: negative degree");

    ScalarBasis<T> basis;
    basis.deg = deg;
    basis.mono = detail::monomials(deg);
    basis.dim = int(basis.mono.size());

    DynMat<T> gram(basis.dim, basis.dim);
    for (int i = 0; i < basis.dim; ++i)
        for (int j = 0; j < basis.dim; ++j)
            gram(i, j) = detail::monomial_integral<T>(basis.mono[i][0] + basis.mono[j][0],
                                                      basis.mono[i][1] + basis.mono[j][1]);

    // Gram = L L^T, columns of L^{-T} are orthonormal in L2(Khat)
    const Eigen::LLT<DynMat<T>> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("make_scalar_basis: Gram factorization failed");
    const DynMat<T> Lt = llt.matrixL().transpose();
    basis.coef = Lt.template triangularView<Eigen::Upper>().solve(
        DynMat<T>::Identity(basis.dim, basis.dim));
    return basis;
}

// ---------------------------------------------------------------------------
// P_k vector basis with H(div) degrees of freedom

template<typename T>
struct BdmBasis {
    int k = 1;
    int nfun = 0;       // (k+1)(k+2)
    int nedge_dof = 0;  // k+1 moments per edge
    int nint = 0;       // k^2 - 1 interior moments
    std::vector<std::array<int, 2>> mono; // scalar monomials of degree <= k
    DynMat<T> coef;     // (2*|mono|) x nfun, rows are (component, monomial)

    int edge_dof(int e, int j) const { return e * nedge_dof + j; }
    int interior_dof(int i) const { return 3 * nedge_dof + i; }

    Vec2<T> eval(int i, const Vec2<T>& x) const
    {
        const int nm = int(mono.size());
        Vec2<T> v = Vec2<T>::Zero();
        for (int m = 0; m < nm; ++m) {
            const T mv = detail::eval_monomial(mono[m], x);
            v[0] += coef(m, i) * mv;
            v[1] += coef(nm + m, i) * mv;
        }
        return v;
    }

    T eval_div(int i, const Vec2<T>& x) const
    {
        const int nm = int(mono.size());
        T d = 0;
        for (int m = 0; m < nm; ++m) {
            const auto [px, py] = mono[m];
            if (px > 0)
                d += coef(m, i) * T(px)
                   * detail::eval_monomial({ px - 1, py }, x);
            if (py > 0)
                d += coef(nm + m, i) * T(py)
                   * detail::eval_monomial({ px, py - 1 }, x);
        }
        return d;
    }
};

namespace detail {

struct RefEdge {
    std::array<double, 2> a, b, n; // start, end, outward unit normal
    double len;
};

// local edge e is opposite vertex e; traversal follows the CCW boundary
inline const std::array<RefEdge, 3>& ref_edges()
{
    static const std::array<RefEdge, 3> edges{ {
        { { 1, 0 }, { 0, 1 }, { 1 / std::sqrt(2.0), 1 / std::sqrt(2.0) }, std::sqrt(2.0) },
        { { 0, 1 }, { 0, 0 }, { -1, 0 }, 1.0 },
        { { 0, 0 }, { 1, 0 }, { 0, -1 }, 1.0 },
    } };
    return edges;
}

// interior moment fields for k = 2: constants plus the rotation (-y, x)
template<typename T>
Vec2<T> interior_field(int i, const Vec2<T>& x)
{
    switch (i) {
        case 0: return { T(1), T(0) };
        case 1: return { T(0), T(1) };
        default: return { -x[1], x[0] };
    }
}

} // namespace detail

// Applies every DOF functional to a vector polynomial given by its monomial
// coefficients; used for construction and as an independent duality check.
template<typename T>
DynVec<T> bdm_apply_functionals(const BdmBasis<T>& basis,
                                const std::function<Vec2<T>(const Vec2<T>&)>& v)
{
    DynVec<T> vals = DynVec<T>::Zero(basis.nfun);
    const auto line = gauss_legendre_01<T>(8);
    const auto& edges = detail::ref_edges();
    for (int e = 0; e < 3; ++e) {
        const Vec2<T> a(T(edges[e].a[0]), T(edges[e].a[1]));
        const Vec2<T> b(T(edges[e].b[0]), T(edges[e].b[1]));
        const Vec2<T> n(T(edges[e].n[0]), T(edges[e].n[1]));
        for (std::size_t q = 0; q < line.points.size(); ++q) {
            const T s = line.points[q];
            const Vec2<T> x = (T(1) - s) * a + s * b;
            const T vn = v(x).dot(n) * line.weights[q] * T(edges[e].len);
            for (int j = 0; j < basis.nedge_dof; ++j)
                vals[basis.edge_dof(e, j)] += vn * legendre01(j, s);
        }
    }
    if (basis.nint > 0) {
        const auto tri = make_quadrature<T>(2 * basis.k);
        for (int q = 0; q < tri.size(); ++q)
            for (int i = 0; i < basis.nint; ++i)
                vals[basis.interior_dof(i)] += tri.weights[q]
                    * v(tri.points[q]).dot(detail::interior_field<T>(i, tri.points[q]));
    }
    return vals;
}

template<typename T>
BdmBasis<T> make_bdm_basis(int k)
{
    if (k < 1 || k > 2)
        throw std::invalid_argument("make_bdm_basis: only k = 1, 2 are supported");

    BdmBasis<T> basis;
    basis.k = k;
    basis.mono = detail::monomials(k);
    const int nm = int(basis.mono.size());
    basis.nfun = 2 * nm;
    basis.nedge_dof = k + 1;
    basis.nint = k * k - 1;
    if (3 * basis.nedge_dof + basis.nint != basis.nfun)
        throw std::logic_error("make_bdm_basis: dof count mismatch");

    // DOF matrix over the monomial basis, V(d, m) = functional_d(monomial_m)
    DynMat<T> V(basis.nfun, basis.nfun);
    for (int m = 0; m < basis.nfun; ++m) {
        const int comp = m / nm;
        const auto mono = basis.mono[m % nm];
        const auto mfun = [&](const Vec2<T>& x) {
            Vec2<T> v = Vec2<T>::Zero();
            v[comp] = detail::eval_monomial(mono, x);
            return v;
        };
        // coef not set yet; functionals only need the dof layout
        V.col(m) = bdm_apply_functionals<T>(basis, mfun);
    }

    const Eigen::FullPivLU<DynMat<T>> lu(V);
    if (!lu.isInvertible())
        throw std::runtime_error("make_bdm_basis: singular DOF matrix");
    basis.coef = lu.inverse();
    return basis;
}

// Sign pattern translating between local traversal and global edge direction.
// Reversing an edge parameter maps the Legendre weight P_j(2s-1) to
// (-1)^j P_j(2s-1), so the local basis dual to globally-parameterized moments
// is the reference one with odd edge moments negated on flipped edges.
template<typename T>
DynVec<T> dof_flip_factors(const BdmBasis<T>& basis, const std::array<bool, 3>& flipped)
{
    DynVec<T> f = DynVec<T>::Ones(basis.nfun);
    for (int e = 0; e < 3; ++e)
        if (flipped[e])
            for (int j = 1; j < basis.nedge_dof; j += 2)
                f[basis.edge_dof(e, j)] = T(-1);
    return f;
}

// Reference values and divergences at a fixed set of points, computed once
// and reused for every element.
template<typename T>
struct BdmTable {
    std::vector<DynMat<T>> val; // val[q] is 2 x nfun
    DynMat<T> div;              // nfun x npts
};

template<typename T>
BdmTable<T> tabulate(const BdmBasis<T>& basis, const std::vector<Vec2<T>>& pts)
{
    BdmTable<T> tab;
    tab.val.resize(pts.size());
    tab.div.resize(basis.nfun, pts.size());
    for (std::size_t q = 0; q < pts.size(); ++q) {
        tab.val[q].resize(2, basis.nfun);
        for (int i = 0; i < basis.nfun; ++i) {
            tab.val[q].col(i) = basis.eval(i, pts[q]);
            tab.div(i, q) = basis.eval_div(i, pts[q]);
        }
    }
    return tab;
}

// Contravariant Piola push-forward of a reference value/divergence pair.
template<typename T>
Vec2<T> piola_value(const TriangleGeometry<T>& g, const Vec2<T>& vhat)
{
    return g.J * vhat / g.detJ;
}

template<typename T>
T piola_divergence(const TriangleGeometry<T>& g, T divhat)
{
    return divhat / g.detJ;
}

} // namespace zener
