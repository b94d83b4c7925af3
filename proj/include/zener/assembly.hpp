// assembly.hpp
// Global operators of the mixed system. With p = (zeta, gamma) in S and
// p+ = zeta + gamma, the blocks are
//
//   M        pair mass in the compliance inner product,
//            blockdiag( (V .,.), (A .,.) ),
//   M_omega  relaxation damping, (V zeta, tau)/omega on the viscous copy,
//   K        (1/rho div p+, div q+), identical on all four copy blocks,
//   K1       same with unit density (the div part of the graph norm),
//   G        plain L2 pair mass, blockdiag of the tensor Gram,
//   B        (s, p+) against the skew multiplier basis s = [[0,1],[-1,0]] sigma,
//   B_U      (1/rho v, div p+) against the vector P_{k-1} basis.
//
// Everything is assembled triangle by triangle at the flux-tensor level and
// lifted to the pair space by index offsets. Edge dofs eliminated by the
// traction boundary get zero rows/columns; M and G carry a unit diagonal
// there so factorizations stay regular (the pinned dofs simply read zero).
//
// The load vector is q -> -(1/rho F, div q+).

#pragma once

#include <memory>

#include <Eigen/SparseCholesky>

#include "zener/lu.hpp"
#include "zener/material.hpp"
#include "zener/mesh.hpp"
#include "zener/quadrature.hpp"
#include "zener/spaces.hpp"

namespace zener {

template<typename T>
struct SystemBlocks {
    SpMat<T> M, M_omega, K, K1, G; // n_S x n_S
    SpMat<T> B;                    // n_Q x n_S
    SpMat<T> B_U;                  // n_U x n_S
    DynVec<T> q_gram_diag;         // diagonal of the skew-multiplier Gram
};

namespace detail {

// physical basis tables on one triangle: component values, divergences and
// scaled quadrature weights
template<typename T>
struct ElementTables {
    DynMat<T> v0, v1; // nloc_flux x nq, component values (flips applied)
    DynMat<T> dv;     // nloc_flux x nq, divergences
    DynMat<T> sc;     // nloc_scal x nq
    DynVec<T> w;      // detJ-scaled weights
    std::vector<Vec2<T>> x; // physical quadrature points
};

template<typename T>
ElementTables<T> element_tables(const Mesh<T>& mesh, const SpaceSet<T>& sp, int t,
                                const TriangleQuadrature<T>& quad,
                                const BdmTable<T>& bdm_tab, const DynMat<T>& scal_tab)
{
    const auto ctx = element_context(mesh, sp, t);
    const int nq = quad.size();

    ElementTables<T> tab;
    tab.v0.resize(sp.nloc_flux, nq);
    tab.v1.resize(sp.nloc_flux, nq);
    tab.dv.resize(sp.nloc_flux, nq);
    tab.sc = scal_tab;
    tab.w.resize(nq);
    tab.x.resize(nq);
    for (int q = 0; q < nq; ++q) {
        tab.w[q] = quad.weights[q] * ctx.geo.detJ;
        tab.x[q] = ctx.geo.p0 + ctx.geo.J * quad.points[q];
        for (int i = 0; i < sp.nloc_flux; ++i) {
            const Vec2<T> v = piola_value(ctx.geo, Vec2<T>(bdm_tab.val[q].col(i)));
            tab.v0(i, q) = ctx.flip[i] * v[0];
            tab.v1(i, q) = ctx.flip[i] * v[1];
            tab.dv(i, q) = ctx.flip[i] * piola_divergence(ctx.geo, bdm_tab.div(i, q));
        }
    }
    return tab;
}

// local Grams needed by every block: CG[r][rp](i,j) = int v_i[r] v_j[rp]
template<typename T>
struct LocalGrams {
    std::array<std::array<DynMat<T>, 2>, 2> CG;
    DynMat<T> DG;  // int div_i div_j
    DynMat<T> SDg; // int scal_u div_i   (nloc_scal x nloc_flux)
    DynMat<T> SV0, SV1; // int scal_u v_i[r]
};

template<typename T>
LocalGrams<T> local_grams(const ElementTables<T>& tab)
{
    LocalGrams<T> g;
    const DynMat<T> wv0 = tab.v0 * tab.w.asDiagonal();
    const DynMat<T> wv1 = tab.v1 * tab.w.asDiagonal();
    g.CG[0][0] = wv0 * tab.v0.transpose();
    g.CG[0][1] = wv0 * tab.v1.transpose();
    g.CG[1][0] = g.CG[0][1].transpose();
    g.CG[1][1] = wv1 * tab.v1.transpose();
    g.DG = tab.dv * tab.w.asDiagonal() * tab.dv.transpose();
    g.SDg = tab.sc * tab.w.asDiagonal() * tab.dv.transpose();
    g.SV0 = tab.sc * tab.w.asDiagonal() * tab.v0.transpose();
    g.SV1 = tab.sc * tab.w.asDiagonal() * tab.v1.transpose();
    return g;
}

// tensor mass in the inverse of E tau = 2 m tau + l tr(tau) I:
// (E^{-1} T_j) : T_i for T = e_r (x) v, assembled from the component Grams
template<typename T>
void add_tensor_mass_triplets(const SpaceSet<T>& sp, int t, const LocalGrams<T>& g,
                              T m, T l, T extra_scale, int row0, int col0,
                              std::vector<Trip<T>>& out)
{
    const T c = l / (T(2) * m + T(2) * l);
    const T s0 = extra_scale / (T(2) * m);
    for (int r = 0; r < 2; ++r)
        for (int rp = 0; rp < 2; ++rp)
            for (int i = 0; i < sp.nloc_flux; ++i) {
                const int gi = sp.flux_id(t, i);
                if (sp.constrained[gi]) continue;
                for (int j = 0; j < sp.nloc_flux; ++j) {
                    const int gj = sp.flux_id(t, j);
                    if (sp.constrained[gj]) continue;
                    T v = -c * g.CG[r][rp](i, j);
                    if (r == rp)
                        v += (g.CG[0][0](i, j) + g.CG[1][1](i, j));
                    v *= s0 * sp.sign(t, i) * sp.sign(t, j);
                    if (v != T(0))
                        out.emplace_back(row0 + r * sp.n_flux + gi,
                                         col0 + rp * sp.n_flux + gj, v);
                }
            }
}

// plain tensor Gram (no material map): block diagonal over rows
template<typename T>
void add_tensor_gram_triplets(const SpaceSet<T>& sp, int t, const LocalGrams<T>& g,
                              int row0, int col0, std::vector<Trip<T>>& out)
{
    for (int r = 0; r < 2; ++r)
        for (int i = 0; i < sp.nloc_flux; ++i) {
            const int gi = sp.flux_id(t, i);
            if (sp.constrained[gi]) continue;
            for (int j = 0; j < sp.nloc_flux; ++j) {
                const int gj = sp.flux_id(t, j);
                if (sp.constrained[gj]) continue;
                const T v = (g.CG[0][0](i, j) + g.CG[1][1](i, j))
                          * sp.sign(t, i) * sp.sign(t, j);
                out.emplace_back(row0 + r * sp.n_flux + gi, col0 + r * sp.n_flux + gj, v);
            }
        }
}

// div-div Gram, identical for both tensor rows
template<typename T>
void add_divdiv_triplets(const SpaceSet<T>& sp, int t, const LocalGrams<T>& g,
                         T scale, int row0, int col0, std::vector<Trip<T>>& out)
{
    for (int r = 0; r < 2; ++r)
        for (int i = 0; i < sp.nloc_flux; ++i) {
            const int gi = sp.flux_id(t, i);
            if (sp.constrained[gi]) continue;
            for (int j = 0; j < sp.nloc_flux; ++j) {
                const int gj = sp.flux_id(t, j);
                if (sp.constrained[gj]) continue;
                const T v = scale * g.DG(i, j) * sp.sign(t, i) * sp.sign(t, j);
                out.emplace_back(row0 + r * sp.n_flux + gi, col0 + r * sp.n_flux + gj, v);
            }
        }
}

} // namespace detail

template<typename T>
SystemBlocks<T> assemble_blocks(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                                const MaterialField<T>& field)
{
    const int k = sp.k;
    const auto quad = make_quadrature<T>(2 * k + 2);
    const auto bdm_tab = tabulate(sp.bdm, quad.points);
    const DynMat<T> scal_tab = sp.scalar.tabulate(quad.points);

    const T mu_a = field.iso.mu, la_a = field.iso.lambda;
    const T mu_v = (field.iso.a - T(1)) * field.iso.mu;
    const T la_v = (field.iso.b - T(1)) * field.iso.lambda;

    std::vector<Trip<T>> tM, tMo, tK, tK1, tG, tB, tBU;
    {
        // exact-count reserves keep the peak at one buffer, not two
        const std::size_t nt = std::size_t(mesh.num_triangles());
        const std::size_t nf2 = std::size_t(sp.nloc_flux) * sp.nloc_flux;
        const std::size_t nsf = std::size_t(sp.nloc_scal) * sp.nloc_flux;
        tM.reserve(nt * 8 * nf2 + 4 * std::size_t(sp.n_flux));
        tMo.reserve(nt * 4 * nf2);
        tK.reserve(nt * 8 * nf2);
        tK1.reserve(nt * 8 * nf2);
        tG.reserve(nt * 4 * nf2 + 4 * std::size_t(sp.n_flux));
        tB.reserve(nt * 4 * nsf);
        tBU.reserve(nt * 4 * nsf);
    }
    DynVec<T> qdiag = DynVec<T>::Zero(sp.n_Q);

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto tab = detail::element_tables(mesh, sp, t, quad, bdm_tab, scal_tab);
        const auto g = detail::local_grams(tab);
        const T rho = field.rho_of(mesh.subdomain[t]);
        const T omega = field.omega_of(mesh.subdomain[t]);

        // M: V-weighted mass on the viscous copy, A-weighted on the elastic
        detail::add_tensor_mass_triplets(sp, t, g, mu_v, la_v, T(1), 0, 0, tM);
        detail::add_tensor_mass_triplets(sp, t, g, mu_a, la_a, T(1), sp.n_W, sp.n_W, tM);
        // M_omega: only the viscous copy, scaled by 1/omega
        detail::add_tensor_mass_triplets(sp, t, g, mu_v, la_v, T(1) / omega, 0, 0, tMo);
        // K / K1 couple all four copy blocks with the same div-div Gram
        for (int c = 0; c < 2; ++c)
            for (int cp = 0; cp < 2; ++cp) {
                detail::add_divdiv_triplets(sp, t, g, T(1) / rho, c * sp.n_W, cp * sp.n_W, tK);
                detail::add_divdiv_triplets(sp, t, g, T(1), c * sp.n_W, cp * sp.n_W, tK1);
            }
        // G: plain L2 Gram on both copies
        detail::add_tensor_gram_triplets(sp, t, g, 0, 0, tG);
        detail::add_tensor_gram_triplets(sp, t, g, sp.n_W, sp.n_W, tG);

        // B: int skew(sigma_s) : T_(r,i), nonzero pattern sigma_s (v[1], -v[0])
        // B_U: int (1/rho) psi_u e_c . div T_(r,i)
        const T detJ = geometry(mesh, t).detJ;
        for (int u = 0; u < sp.nloc_scal; ++u) {
            qdiag[sp.q_id(t, u)] = T(2) * detJ;
            for (int i = 0; i < sp.nloc_flux; ++i) {
                const int gi = sp.flux_id(t, i);
                if (sp.constrained[gi]) continue;
                const T s = sp.sign(t, i);
                for (int c = 0; c < 2; ++c) {
                    tB.emplace_back(sp.q_id(t, u), c * sp.n_W + 0 * sp.n_flux + gi,
                                    s * g.SV1(u, i));
                    tB.emplace_back(sp.q_id(t, u), c * sp.n_W + 1 * sp.n_flux + gi,
                                    -s * g.SV0(u, i));
                    for (int r = 0; r < 2; ++r)
                        tBU.emplace_back(sp.u_id(t, r, u), c * sp.n_W + r * sp.n_flux + gi,
                                         s * g.SDg(u, i) / rho);
                }
            }
        }
    }

    // pinned dofs keep factorizations regular
    for (int c = 0; c < 2; ++c)
        for (int r = 0; r < 2; ++r)
            for (int i = 0; i < sp.n_flux; ++i)
                if (sp.constrained[i]) {
                    const int d = c * sp.n_W + r * sp.n_flux + i;
                    tM.emplace_back(d, d, T(1));
                    tG.emplace_back(d, d, T(1));
                }

    SystemBlocks<T> blocks;
    const auto build = [&](std::vector<Trip<T>>& trips, int rows, int cols) {
        SpMat<T> m(rows, cols);
        m.setFromTriplets(trips.begin(), trips.end());
        trips.clear();
        trips.shrink_to_fit();
        return m;
    };
    blocks.M = build(tM, sp.n_S, sp.n_S);
    blocks.M_omega = build(tMo, sp.n_S, sp.n_S);
    blocks.K = build(tK, sp.n_S, sp.n_S);
    blocks.K1 = build(tK1, sp.n_S, sp.n_S);
    blocks.G = build(tG, sp.n_S, sp.n_S);
    blocks.B = build(tB, sp.n_Q, sp.n_S);
    blocks.B_U = build(tBU, sp.n_U, sp.n_S);
    blocks.q_gram_diag = qdiag;
    return blocks;
}

// load vector q -> -(1/rho f(., time), div q+)
template<typename T, typename F>
DynVec<T> assemble_load(const Mesh<T>& mesh, const SpaceSet<T>& sp,
                        const MaterialField<T>& field, F&& f, T time)
{
    const auto quad = make_quadrature<T>(2 * sp.k + 2);
    const auto bdm_tab = tabulate(sp.bdm, quad.points);
    const DynMat<T> scal_tab = sp.scalar.tabulate(quad.points);

    DynVec<T> load = DynVec<T>::Zero(sp.n_S);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto tab = detail::element_tables(mesh, sp, t, quad, bdm_tab, scal_tab);
        const T rho = field.rho_of(mesh.subdomain[t]);
        DynVec<T> loc0 = DynVec<T>::Zero(sp.nloc_flux); // tensor row 0
        DynVec<T> loc1 = DynVec<T>::Zero(sp.nloc_flux);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2<T> fv = f(tab.x[q], time);
            for (int i = 0; i < sp.nloc_flux; ++i) {
                loc0[i] -= tab.w[q] * fv[0] * tab.dv(i, q) / rho;
                loc1[i] -= tab.w[q] * fv[1] * tab.dv(i, q) / rho;
            }
        }
        for (int c = 0; c < 2; ++c) {
            scatter_add_flux(sp, t, loc0, load.segment(c * sp.n_W, sp.n_flux));
            scatter_add_flux(sp, t, loc1,
                             load.segment(c * sp.n_W + sp.n_flux, sp.n_flux));
        }
    }
    return load;
}

// --- saddle-point solver ----------------------------------------------------

namespace detail {

template<typename T>
void append_block(std::vector<Trip<T>>& trips, const SpMat<T>& A, int row0, int col0,
                  T scale, bool transpose = false)
{
    for (int o = 0; o < A.outerSize(); ++o)
        for (typename SpMat<T>::InnerIterator it(A, o); it; ++it) {
            if (transpose)
                trips.emplace_back(col0 + it.col(), row0 + it.row(), scale * it.value());
            else
                trips.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
        }
}

} // namespace detail

// [[UL, c B^T], [c B, 0]] with a direct factorization; solves carry a
// residual check so a silently bad factorization cannot slip through.
template<typename T>
class SaddleSolver {
  public:
    void compute(const SpMat<T>& UL, const SpMat<T>& B, T constraint_scale)
    {
        const int n = int(UL.rows());
        const int m = int(B.rows());
        std::vector<Trip<T>> trips;
        trips.reserve(UL.nonZeros() + 2 * B.nonZeros());
        detail::append_block(trips, UL, 0, 0, T(1));
        detail::append_block(trips, B, n, 0, constraint_scale);
        detail::append_block(trips, B, n, 0, constraint_scale, true);
        m_A.resize(n + m, n + m);
        m_A.setFromTriplets(trips.begin(), trips.end());
        m_lu.compute(m_A);
        if (!m_lu.ok())
            throw std::runtime_error("SaddleSolver: factorization failed");
    }

    DynVec<T> solve(const DynVec<T>& rhs) const
    {
        DynVec<T> x = m_lu.solve(rhs);
        const T denom = std::max(rhs.norm(), T(1e-30));
        const T resid = (m_A * x - rhs).norm() / denom;
        if (!(resid <= T(1e-10)))
            throw std::runtime_error("SaddleSolver: solve residual above tolerance");
        return x;
    }

    const SpMat<T>& matrix() const { return m_A; }

  private:
    SpMat<T> m_A;
    DirectLU<T> m_lu;
};

// --- discrete stability monitor ---------------------------------------------

// Smallest singular value of the multiplier coupling measured in the natural
// norms: sqrt of the smallest eigenvalue of
//   N^{-1/2} B S^{-1} B^T N^{-1/2},
// S the graph-norm Gram (G + K1) and N the multiplier Gram. Dense in the
// multiplier dimension, so keep the meshes moderate.
template<typename T>
T inf_sup_constant(const SystemBlocks<T>& blocks)
{
    SpMat<T> S = blocks.G + blocks.K1;
    Eigen::SimplicialLLT<SpMat<T>> llt(S);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("inf_sup_constant: graph Gram not SPD");

    const int nq = int(blocks.B.rows());
    const SpMat<T> Bt = blocks.B.transpose();
    DynMat<T> X(nq, nq);
    for (int j = 0; j < nq; ++j) {
        const DynVec<T> y = llt.solve(DynVec<T>(Bt.col(j)));
        X.col(j) = blocks.B * y;
    }
    const DynVec<T> dinv = blocks.q_gram_diag.array().sqrt().inverse();
    const DynMat<T> Xs = dinv.asDiagonal() * X * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<DynMat<T>> eig(T(0.5) * (Xs + Xs.transpose()));
    return std::sqrt(std::max(T(0), eig.eigenvalues()[0]));
}

} // namespace zener
