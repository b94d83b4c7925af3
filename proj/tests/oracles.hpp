// Shared test oracles: dense reassembly of every operator by brute-force
// pointwise evaluation of the global basis fields, plus small numeric
// helpers. Everything here deliberately avoids the element-matrix code paths
// in the library (different quadrature degree, different contraction order).

#pragma once

#include <cmath>
#include <vector>

#include "zener/assembly.hpp"
#include "zener/material.hpp"
#include "zener/mesh.hpp"
#include "zener/spaces.hpp"

namespace testing {

using namespace zener;

struct DenseOperators {
    DynMat<double> M, Momega, K, G;
    DynMat<double> B, BU;
};

struct FieldTable {
    // [dof][triangle * nq + q]
    std::vector<std::vector<Mat2<double>>> zeta, gamma;
    std::vector<std::vector<Vec2<double>>> divp;
    std::vector<double> w;          // detJ-scaled weights, per triangle * nq
    std::vector<Vec2<double>> x;    // physical points
    std::vector<int> tri_of;        // triangle index per slot
    int nq = 0;
};

inline FieldTable tabulate_pair_fields(const Mesh<double>& mesh,
                                       const SpaceSet<double>& sp, int degree)
{
    const auto quad = make_quadrature<double>(degree);
    const int nq = quad.size();
    const int nslots = mesh.num_triangles() * nq;

    FieldTable tab;
    tab.nq = nq;
    tab.w.resize(nslots);
    tab.x.resize(nslots);
    tab.tri_of.resize(nslots);
    tab.zeta.assign(sp.n_S, std::vector<Mat2<double>>(nslots, Mat2<double>::Zero()));
    tab.gamma.assign(sp.n_S, std::vector<Mat2<double>>(nslots, Mat2<double>::Zero()));
    tab.divp.assign(sp.n_S, std::vector<Vec2<double>>(nslots, Vec2<double>::Zero()));

    DynVec<double> unit = DynVec<double>::Zero(sp.n_S);
    for (int j = 0; j < sp.n_S; ++j) {
        unit[j] = 1.0;
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto g = geometry(mesh, t);
            for (int q = 0; q < nq; ++q) {
                const int slot = t * nq + q;
                tab.w[slot] = quad.weights[q] * g.detJ;
                tab.x[slot] = g.p0 + g.J * quad.points[q];
                tab.tri_of[slot] = t;
                tab.zeta[j][slot] =
                    eval_tensor<double>(mesh, sp, t, unit.segment(0, sp.n_W), quad.points[q]);
                tab.gamma[j][slot] = eval_tensor<double>(mesh, sp, t,
                                                         unit.segment(sp.n_W, sp.n_W),
                                                         quad.points[q]);
                tab.divp[j][slot] =
                    eval_tensor_div<double>(mesh, sp, t, unit.segment(0, sp.n_W),
                                            quad.points[q])
                    + eval_tensor_div<double>(mesh, sp, t, unit.segment(sp.n_W, sp.n_W),
                                              quad.points[q]);
            }
        }
        unit[j] = 0.0;
    }
    return tab;
}

inline double contract(const Mat2<double>& a, const Mat2<double>& b)
{
    return (a.array() * b.array()).sum();
}

// Dense versions of every operator block by straight numerical integration of
// the bilinear forms over the tabulated global fields.
inline DenseOperators dense_operators(const Mesh<double>& mesh, const SpaceSet<double>& sp,
                                      const MaterialField<double>& field, int degree)
{
    const auto tab = tabulate_pair_fields(mesh, sp, degree);
    const int nslots = int(tab.w.size());

    DenseOperators ops;
    ops.M = DynMat<double>::Zero(sp.n_S, sp.n_S);
    ops.Momega = DynMat<double>::Zero(sp.n_S, sp.n_S);
    ops.K = DynMat<double>::Zero(sp.n_S, sp.n_S);
    ops.G = DynMat<double>::Zero(sp.n_S, sp.n_S);
    ops.B = DynMat<double>::Zero(sp.n_Q, sp.n_S);
    ops.BU = DynMat<double>::Zero(sp.n_U, sp.n_S);

    for (int i = 0; i < sp.n_S; ++i)
        for (int j = 0; j < sp.n_S; ++j)
            for (int s = 0; s < nslots; ++s) {
                const double w = tab.w[s];
                const int t = tab.tri_of[s];
                const double rho = field.rho_of(mesh.subdomain[t]);
                const double omega = field.omega_of(mesh.subdomain[t]);
                const double vterm =
                    contract(apply_V(field.iso, tab.zeta[j][s]), tab.zeta[i][s]);
                ops.M(i, j) += w * (vterm
                                    + contract(apply_A(field.iso, tab.gamma[j][s]),
                                               tab.gamma[i][s]));
                ops.Momega(i, j) += w * vterm / omega;
                ops.K(i, j) += w * tab.divp[j][s].dot(tab.divp[i][s]) / rho;
                ops.G(i, j) += w * (contract(tab.zeta[j][s], tab.zeta[i][s])
                                    + contract(tab.gamma[j][s], tab.gamma[i][s]));
            }

    for (int j = 0; j < sp.n_S; ++j)
        for (int s = 0; s < nslots; ++s) {
            const int t = tab.tri_of[s];
            const double rho = field.rho_of(mesh.subdomain[t]);
            const auto g = geometry(mesh, t);
            const Vec2<double> xhat = g.Jinv * (tab.x[s] - g.p0);
            const Mat2<double> plus = tab.zeta[j][s] + tab.gamma[j][s];
            for (int u = 0; u < sp.nloc_scal; ++u) {
                const double psi = sp.scalar.eval(u, xhat);
                ops.B(sp.q_id(t, u), j) += tab.w[s] * psi * (plus(0, 1) - plus(1, 0));
                for (int c = 0; c < 2; ++c)
                    ops.BU(sp.u_id(t, c, u), j) +=
                        tab.w[s] * psi * tab.divp[j][s][c] / rho;
            }
        }
    return ops;
}

template<typename F>
DynVec<double> dense_load(const Mesh<double>& mesh, const SpaceSet<double>& sp,
                          const MaterialField<double>& field, F&& f, double time,
                          int degree)
{
    const auto tab = tabulate_pair_fields(mesh, sp, degree);
    DynVec<double> load = DynVec<double>::Zero(sp.n_S);
    for (int j = 0; j < sp.n_S; ++j)
        for (std::size_t s = 0; s < tab.w.size(); ++s) {
            const double rho = field.rho_of(mesh.subdomain[tab.tri_of[s]]);
            load[j] -= tab.w[s] * f(tab.x[s], time).dot(tab.divp[j][s]) / rho;
        }
    return load;
}

// least-squares slope of log(err) against log(h)
inline double fit_rate(const std::vector<double>& h, const std::vector<double>& err)
{
    const int n = int(h.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace testing
