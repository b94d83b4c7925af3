#include <doctest.h>

#include <random>

#include "zener/refelem.hpp"

using namespace zener;

namespace {

// reference edges, duplicated here on purpose instead of reaching into the
// library internals
struct Edge {
    Vec2<double> a, b, n;
    double len;
};

std::array<Edge, 3> ref_edges()
{
    const double s = 1.0 / std::sqrt(2.0);
    return { Edge{ { 1, 0 }, { 0, 1 }, { s, s }, std::sqrt(2.0) },
             Edge{ { 0, 1 }, { 0, 0 }, { -1, 0 }, 1.0 },
             Edge{ { 0, 0 }, { 1, 0 }, { 0, -1 }, 1.0 } };
}

} // namespace

TEST_SUITE("refelem")
{
    TEST_CASE("scalar bases are orthonormal on the reference triangle")
    {
        for (int deg : { 0, 1, 2, 3 }) {
            const auto basis = make_scalar_basis<double>(deg);
            REQUIRE(basis.dim == (deg + 1) * (deg + 2) / 2);
            const auto rule = make_quadrature<double>(std::max(1, 2 * deg));
            for (int i = 0; i < basis.dim; ++i)
                for (int j = 0; j < basis.dim; ++j) {
                    double s = 0;
                    for (int q = 0; q < rule.size(); ++q)
                        s += rule.weights[q] * basis.eval(i, rule.points[q])
                           * basis.eval(j, rule.points[q]);
                    CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
                }
        }
    }

    TEST_CASE("constant scalar basis function has the right normalization")
    {
        const auto basis = make_scalar_basis<double>(0);
        // unit L2 norm over area 1/2
        CHECK(basis.eval(0, { 0.3, 0.3 }) == doctest::Approx(std::sqrt(2.0)));
    }

    TEST_CASE("vector basis is dual to its degree-of-freedom functionals")
    {
        for (int k : { 1, 2 }) {
            const auto basis = make_bdm_basis<double>(k);
            REQUIRE(basis.nfun == (k + 1) * (k + 2));
            for (int i = 0; i < basis.nfun; ++i) {
                const auto vals = bdm_apply_functionals<double>(
                    basis, [&](const Vec2<double>& x) { return basis.eval(i, x); });
                for (int d = 0; d < basis.nfun; ++d)
                    CHECK(std::abs(vals[d] - (d == i ? 1.0 : 0.0)) < 1e-11);
            }
        }
    }

    TEST_CASE("edge moments recomputed by hand match the duality relation")
    {
        // independent quadrature order and explicit loops
        const auto basis = make_bdm_basis<double>(2);
        const auto line = gauss_legendre_01<double>(12);
        const auto edges = ref_edges();
        for (int e = 0; e < 3; ++e)
            for (int j = 0; j < basis.nedge_dof; ++j) {
                const int dof = basis.edge_dof(e, j);
                for (int i = 0; i < basis.nfun; ++i) {
                    double moment = 0;
                    for (std::size_t q = 0; q < line.points.size(); ++q) {
                        const double s = line.points[q];
                        const Vec2<double> x = (1.0 - s) * edges[e].a + s * edges[e].b;
                        moment += line.weights[q] * edges[e].len
                                * basis.eval(i, x).dot(edges[e].n) * legendre01(j, s);
                    }
                    CHECK(std::abs(moment - (dof == i ? 1.0 : 0.0)) < 1e-11);
                }
            }
    }

    TEST_CASE("divergence of every basis function has degree k-1")
    {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> dist(0.05, 0.4);
        for (int k : { 1, 2 }) {
            const auto basis = make_bdm_basis<double>(k);
            for (int i = 0; i < basis.nfun; ++i)
                for (int trial = 0; trial < 10; ++trial) {
                    const Vec2<double> a(dist(rng), dist(rng));
                    const Vec2<double> b(dist(rng), dist(rng));
                    const double mid = basis.eval_div(i, (a + b) / 2.0);
                    const double second_diff =
                        basis.eval_div(i, a) + basis.eval_div(i, b) - 2.0 * mid;
                    // affine functions have vanishing second differences
                    CHECK(std::abs(second_diff) < 1e-10);
                    if (k == 1)
                        CHECK(std::abs(basis.eval_div(i, a) - basis.eval_div(i, b)) < 1e-10);
                }
        }
    }

    TEST_CASE("piola divergence matches a finite-difference oracle")
    {
        const auto basis = make_bdm_basis<double>(2);
        // an arbitrary well-shaped physical triangle
        Mesh<double> mesh;
        mesh.vertices = { { 0.2, 0.1 }, { 1.1, 0.3 }, { 0.4, 0.9 } };
        mesh.triangles = { { 0, 1, 2 } };
        const auto g = geometry(mesh, 0);

        const auto phys = [&](int i, const Vec2<double>& y) {
            const Vec2<double> xhat = g.Jinv * (y - g.p0);
            return piola_value(g, Vec2<double>(basis.eval(i, xhat)));
        };

        const Vec2<double> xhat(0.3, 0.25);
        const Vec2<double> y = g.p0 + g.J * xhat;
        const double h = 1e-5;
        for (int i = 0; i < basis.nfun; ++i) {
            const double fd =
                (phys(i, { y[0] + h, y[1] })[0] - phys(i, { y[0] - h, y[1] })[0]
                 + phys(i, { y[0], y[1] + h })[1] - phys(i, { y[0], y[1] - h })[1])
                / (2.0 * h);
            const double claimed = piola_divergence(g, basis.eval_div(i, xhat));
            CHECK(fd == doctest::Approx(claimed).epsilon(1e-6));
        }
    }

    TEST_CASE("piola map preserves edge normal-trace moments")
    {
        // moments of the normal trace against arclength-weighted Legendre
        // polynomials must be identical on the reference and physical edge
        const auto basis = make_bdm_basis<double>(2);
        Mesh<double> mesh;
        mesh.vertices = { { 0.0, 0.0 }, { 0.8, 0.1 }, { 0.3, 0.7 } };
        mesh.triangles = { { 0, 1, 2 } };
        const auto g = geometry(mesh, 0);
        const auto line = gauss_legendre_01<double>(10);
        const auto edges = ref_edges();

        for (int e = 0; e < 3; ++e)
            for (int j = 0; j < basis.nedge_dof; ++j)
                for (int i = 0; i < basis.nfun; ++i) {
                    double ref_m = 0, phys_m = 0;
                    for (std::size_t q = 0; q < line.points.size(); ++q) {
                        const double s = line.points[q];
                        const Vec2<double> xhat = (1.0 - s) * edges[e].a + s * edges[e].b;
                        ref_m += line.weights[q] * edges[e].len
                               * basis.eval(i, xhat).dot(edges[e].n) * legendre01(j, s);
                        const Vec2<double> v = piola_value(g, Vec2<double>(basis.eval(i, xhat)));
                        phys_m += line.weights[q] * g.edge_len[e]
                                * v.dot(g.normal[e]) * legendre01(j, s);
                    }
                    CHECK(phys_m == doctest::Approx(ref_m).epsilon(1e-11));
                }
    }

    TEST_CASE("flip factors equal moments in the reversed edge parameter")
    {
        const auto basis = make_bdm_basis<double>(2);
        const auto line = gauss_legendre_01<double>(10);
        const auto edges = ref_edges();
        const auto flips = dof_flip_factors(basis, { true, false, true });

        for (int e : { 0, 2 })
            for (int j = 0; j < basis.nedge_dof; ++j) {
                const int dof = basis.edge_dof(e, j);
                for (int i = 0; i < basis.nfun; ++i) {
                    // moment against the weight parameterized from the other end
                    double rev = 0;
                    for (std::size_t q = 0; q < line.points.size(); ++q) {
                        const double s = line.points[q];
                        const Vec2<double> x = (1.0 - s) * edges[e].a + s * edges[e].b;
                        rev += line.weights[q] * edges[e].len
                             * basis.eval(i, x).dot(edges[e].n) * legendre01(j, 1.0 - s);
                    }
                    const double expect = (dof == i ? flips[dof] : 0.0);
                    CHECK(std::abs(rev - expect) < 1e-11);
                }
            }
    }

    TEST_CASE("only k = 1 and k = 2 are supported")
    {
        CHECK_THROWS_AS(make_bdm_basis<double>(0), std::invalid_argument);
        CHECK_THROWS_AS(make_bdm_basis<double>(3), std::invalid_argument);
    }
}
