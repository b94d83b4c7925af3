// spaces.hpp
// Global degree-of-freedom management for the mixed discretization:
//
//   flux layer   one H(div)-conforming P_k component built on the mesh edges
//                (k+1 normal moments per edge, k^2-1 interior moments per
//                triangle); this is the building block for one row of a
//                stress tensor,
//   W            2 x 2 tensors with rows in the flux space, size 2*n_flux,
//                row-major: tensor dof = row * n_flux + flux dof,
//   S = W x W    pairs (viscous part, elastic part), copy-major:
//                pair dof = copy * n_W + tensor dof,
//   Q            skew multipliers, one scalar P_{k-1} field (element-local,
//                L2-orthonormal basis),
//   U            vector P_{k-1} fields, component-major per element.
//
// Edge dofs of the flux layer are single-valued across elements. Each
// triangle sees a global edge with a sign (stored in the mesh) and a flip
// bit; gather/scatter apply the sign, evaluation applies the flip factors
// from refelem. Edge dofs on the natural (traction) boundary are eliminated:
// they are flagged constrained, gather reads them as zero and scatter drops
// their contributions.

#pragma once

#include <vector>

#include "zener/material.hpp"
#include "zener/mesh.hpp"
#include "zener/refelem.hpp"

namespace zener {

template<typename T>
struct SpaceSet {
    int k = 1;
    BdmBasis<T> bdm;
    ScalarBasis<T> scalar; // degree k-1, shared by Q and U

    int nloc_flux = 0; // 3(k+1) + k^2 - 1
    int nloc_scal = 0; // dim P_{k-1}
    int n_flux = 0;
    int n_W = 0;
    int n_S = 0;
    int n_Q = 0;
    int n_U = 0;

    std::vector<int> flux_ids;            // T x nloc_flux
    std::vector<T> flux_sign;             // T x nloc_flux, +-1
    std::vector<std::array<bool, 3>> flipped; // per triangle
    std::vector<bool> constrained;        // per flux dof

    int flux_id(int t, int i) const { return flux_ids[std::size_t(t) * nloc_flux + i]; }
    T sign(int t, int i) const { return flux_sign[std::size_t(t) * nloc_flux + i]; }

    int q_id(int t, int i) const { return t * nloc_scal + i; }
    int u_id(int t, int comp, int i) const { return (2 * t + comp) * nloc_scal + i; }
};

template<typename T>
SpaceSet<T> build_spaces(const Mesh<T>& mesh, int k)
{
    SpaceSet<T> sp;
    sp.k = k;
    sp.bdm = make_bdm_basis<T>(k);
    sp.scalar = make_scalar_basis<T>(k - 1);

    const int E = mesh.num_edges();
    const int Tn = mesh.num_triangles();
    const int ne = sp.bdm.nedge_dof;
    const int ni = sp.bdm.nint;

    sp.nloc_flux = 3 * ne + ni;
    sp.nloc_scal = sp.scalar.dim;
    sp.n_flux = E * ne + Tn * ni;
    sp.n_W = 2 * sp.n_flux;
    sp.n_S = 2 * sp.n_W;
    sp.n_Q = Tn * sp.nloc_scal;
    sp.n_U = 2 * Tn * sp.nloc_scal;

    sp.flux_ids.resize(std::size_t(Tn) * sp.nloc_flux);
    sp.flux_sign.resize(std::size_t(Tn) * sp.nloc_flux);
    sp.flipped.resize(Tn);
    for (int t = 0; t < Tn; ++t) {
        for (int e = 0; e < 3; ++e) {
            const int ge = mesh.tri_edges[t][e];
            const int s = mesh.tri_edge_signs[t][e];
            sp.flipped[t][e] = (s < 0);
            for (int j = 0; j < ne; ++j) {
                sp.flux_ids[std::size_t(t) * sp.nloc_flux + sp.bdm.edge_dof(e, j)] = ge * ne + j;
                sp.flux_sign[std::size_t(t) * sp.nloc_flux + sp.bdm.edge_dof(e, j)] = T(s);
            }
        }
        for (int i = 0; i < ni; ++i) {
            sp.flux_ids[std::size_t(t) * sp.nloc_flux + sp.bdm.interior_dof(i)] =
                E * ne + t * ni + i;
            sp.flux_sign[std::size_t(t) * sp.nloc_flux + sp.bdm.interior_dof(i)] = T(1);
        }
    }

    // traction boundary: the normal trace is an essential condition here and
    // the corresponding edge dofs are removed from the system
    sp.constrained.assign(sp.n_flux, false);
    for (int e = 0; e < E; ++e)
        if (mesh.edge_tag[e] == BoundaryTag::neumann)
            for (int j = 0; j < ne; ++j)
                sp.constrained[e * ne + j] = true;

    return sp;
}

// Signed local coefficients of one flux-layer field on triangle t.
// `global` is any n_flux-sized vector expression (e.g. a segment of a pair
// vector) for the tensor row in question.
template<typename T, typename Vec>
DynVec<T> gather_flux(const SpaceSet<T>& sp, int t, const Vec& global)
{
    DynVec<T> local(sp.nloc_flux);
    for (int i = 0; i < sp.nloc_flux; ++i) {
        const int id = sp.flux_id(t, i);
        local[i] = sp.constrained[id] ? T(0) : sp.sign(t, i) * global[id];
    }
    return local;
}

template<typename T, typename Vec>
void scatter_add_flux(const SpaceSet<T>& sp, int t, const DynVec<T>& local, Vec&& global)
{
    for (int i = 0; i < sp.nloc_flux; ++i) {
        const int id = sp.flux_id(t, i);
        if (!sp.constrained[id])
            global[id] += sp.sign(t, i) * local[i];
    }
}

// Everything needed to evaluate local basis functions physically.
template<typename T>
struct ElementContext {
    TriangleGeometry<T> geo;
    DynVec<T> flip; // per local flux dof, +-1
};

template<typename T>
ElementContext<T> element_context(const Mesh<T>& mesh, const SpaceSet<T>& sp, int t)
{
    return { geometry(mesh, t), dof_flip_factors(sp.bdm, sp.flipped[t]) };
}

// --- pointwise evaluation of discrete fields (reference coordinates) -------

// one tensor row from its signed local coefficients
template<typename T>
Vec2<T> eval_flux(const SpaceSet<T>& sp, const ElementContext<T>& ctx,
                  const DynVec<T>& local, const Vec2<T>& xhat)
{
    Vec2<T> vhat = Vec2<T>::Zero();
    for (int i = 0; i < sp.nloc_flux; ++i)
        vhat += local[i] * ctx.flip[i] * sp.bdm.eval(i, xhat);
    return piola_value(ctx.geo, vhat);
}

template<typename T>
T eval_flux_div(const SpaceSet<T>& sp, const ElementContext<T>& ctx,
                const DynVec<T>& local, const Vec2<T>& xhat)
{
    T dhat = 0;
    for (int i = 0; i < sp.nloc_flux; ++i)
        dhat += local[i] * ctx.flip[i] * sp.bdm.eval_div(i, xhat);
    return piola_divergence(ctx.geo, dhat);
}

// full tensor from a W-sized coefficient vector
template<typename T, typename Vec>
Mat2<T> eval_tensor(const Mesh<T>& mesh, const SpaceSet<T>& sp, int t, const Vec& w,
                    const Vec2<T>& xhat)
{
    const auto ctx = element_context(mesh, sp, t);
    Mat2<T> out;
    for (int r = 0; r < 2; ++r) {
        const DynVec<T> local = gather_flux<T>(sp, t, w.segment(r * sp.n_flux, sp.n_flux));
        out.row(r) = eval_flux(sp, ctx, local, xhat).transpose();
    }
    return out;
}

template<typename T, typename Vec>
Vec2<T> eval_tensor_div(const Mesh<T>& mesh, const SpaceSet<T>& sp, int t, const Vec& w,
                        const Vec2<T>& xhat)
{
    const auto ctx = element_context(mesh, sp, t);
    Vec2<T> out;
    for (int r = 0; r < 2; ++r) {
        const DynVec<T> local = gather_flux<T>(sp, t, w.segment(r * sp.n_flux, sp.n_flux));
        out[r] = eval_flux_div(sp, ctx, local, xhat);
    }
    return out;
}

// skew multiplier: coefficient vector -> scalar field sigma, the tensor being
// [[0, sigma], [-sigma, 0]]
template<typename T, typename Vec>
T eval_skew(const SpaceSet<T>& sp, int t, const Vec& q, const Vec2<T>& xhat)
{
    T v = 0;
    for (int i = 0; i < sp.nloc_scal; ++i)
        v += q[sp.q_id(t, i)] * sp.scalar.eval(i, xhat);
    return v;
}

template<typename T, typename Vec>
Vec2<T> eval_vector(const SpaceSet<T>& sp, int t, const Vec& u, const Vec2<T>& xhat)
{
    Vec2<T> v = Vec2<T>::Zero();
    for (int comp = 0; comp < 2; ++comp)
        for (int i = 0; i < sp.nloc_scal; ++i)
            v[comp] += u[sp.u_id(t, comp, i)] * sp.scalar.eval(i, xhat);
    return v;
}

} // namespace zener
