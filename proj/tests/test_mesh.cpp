#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "zener/mesh.hpp"

using namespace zener;

TEST_SUITE("mesh")
{
    TEST_CASE("entity counts follow the closed forms")
    {
        for (int n : { 1, 2, 3, 8 }) {
            const auto mesh = build_uniform<double>(n);
            CHECK(mesh.num_vertices() == (n + 1) * (n + 1));
            CHECK(mesh.num_edges() == 3 * n * n + 2 * n);
            CHECK(mesh.num_triangles() == 2 * n * n);
            // Euler characteristic of a disk
            CHECK(mesh.num_vertices() - mesh.num_edges() + mesh.num_triangles() == 1);
        }
    }

    TEST_CASE("triangles are CCW and areas sum to the rectangle area")
    {
        const Rect<double> rect{ -1.0, 0.5, 2.0, 3.5 };
        const auto mesh = build_uniform<double>(3, rect);
        double area = 0;
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto g = geometry(mesh, t);
            CHECK(g.detJ > 0.0);
            area += g.detJ / 2.0;
        }
        CHECK(area == doctest::Approx(3.0 * 3.0).epsilon(1e-14));
    }

    TEST_CASE("boundary edges are tagged and counted")
    {
        for (int n : { 1, 2, 4 }) {
            const auto mesh = build_uniform<double>(n);
            int nbdry = 0;
            for (const auto tag : mesh.edge_tag)
                if (tag != BoundaryTag::interior)
                    ++nbdry;
            CHECK(nbdry == 4 * n);
            // default: whole boundary is essential
            for (const auto tag : mesh.edge_tag)
                CHECK(tag != BoundaryTag::neumann);
        }
    }

    TEST_CASE("shared edges carry opposite orientation signs")
    {
        const auto mesh = build_uniform<double>(3);
        std::map<int, std::vector<int>> signs_by_edge;
        for (int t = 0; t < mesh.num_triangles(); ++t)
            for (int e = 0; e < 3; ++e)
                signs_by_edge[mesh.tri_edges[t][e]].push_back(mesh.tri_edge_signs[t][e]);
        for (const auto& [edge, signs] : signs_by_edge) {
            REQUIRE(signs.size() <= 2);
            if (signs.size() == 2)
                CHECK(signs[0] == -signs[1]);
            const bool boundary = mesh.edge_tag[edge] != BoundaryTag::interior;
            CHECK(boundary == (signs.size() == 1));
        }
    }

    TEST_CASE("edge sign links the outward normal to the global edge normal")
    {
        const auto mesh = build_uniform<double>(2);
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto g = geometry(mesh, t);
            for (int e = 0; e < 3; ++e) {
                const auto& ge = mesh.edges[mesh.tri_edges[t][e]];
                const Vec2<double> tang =
                    (mesh.vertices[ge[1]] - mesh.vertices[ge[0]]).normalized();
                const Vec2<double> global_normal(tang[1], -tang[0]);
                const double s = double(mesh.tri_edge_signs[t][e]);
                CHECK((g.normal[e] - s * global_normal).norm() < 1e-14);
            }
        }
    }

    TEST_CASE("refinement doubles n and keeps coarse vertices")
    {
        const auto coarse = build_uniform<double>(2);
        const auto fine = refine(coarse);
        CHECK(fine.n == 4);
        CHECK(fine.mesh_size() == doctest::Approx(coarse.mesh_size() / 2.0));
        std::set<std::pair<double, double>> fine_pts;
        for (const auto& v : fine.vertices)
            fine_pts.insert({ v[0], v[1] });
        for (const auto& v : coarse.vertices)
            CHECK(fine_pts.count({ v[0], v[1] }) == 1);
    }

    TEST_CASE("subdomain labels follow an axis-aligned rule")
    {
        SubdomainRule<double> rule = [](const Vec2<double>& x) {
            return x[1] < 0.5 ? 1 : 2;
        };
        const auto mesh = build_uniform<double>(2, {}, rule);
        CHECK(mesh.num_subdomains == 2);
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto& tri = mesh.triangles[t];
            const Vec2<double> c = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]]
                                    + mesh.vertices[tri[2]]) / 3.0;
            CHECK(mesh.subdomain[t] == (c[1] < 0.5 ? 1 : 2));
        }
    }

    TEST_CASE("a rule that cuts through triangles is rejected")
    {
        SubdomainRule<double> bad = [](const Vec2<double>& x) {
            return x[0] + x[1] < 0.3 ? 1 : 2;
        };
        CHECK_THROWS_AS(build_uniform<double>(2, {}, bad), std::invalid_argument);
    }

    TEST_CASE("boundary rule splits essential and natural parts")
    {
        BoundaryRule<double> rule = [](const Vec2<double>& mid) {
            return mid[1] == 0.0 ? BoundaryTag::neumann : BoundaryTag::dirichlet;
        };
        const auto mesh = build_uniform<double>(2, {}, {}, rule);
        int nneu = 0;
        for (const auto tag : mesh.edge_tag)
            if (tag == BoundaryTag::neumann)
                ++nneu;
        CHECK(nneu == 2);
    }

    TEST_CASE("invalid build parameters are rejected")
    {
        CHECK_THROWS_AS(build_uniform<double>(0), std::invalid_argument);
        CHECK_THROWS_AS(build_uniform<double>(2, Rect<double>{ 0, 0, 0, 1 }),
                        std::invalid_argument);
    }

    TEST_CASE("text dump starts with the counts line")
    {
        const auto mesh = build_uniform<double>(1);
        std::ostringstream os;
        dump_text(mesh, os);
        std::istringstream is(os.str());
        int nv = 0, ne = 0, nt = 0;
        is >> nv >> ne >> nt;
        CHECK(nv == 4);
        CHECK(ne == 5);
        CHECK(nt == 2);
        int lines = 0;
        for (std::string line; std::getline(is, line);)
            if (!line.empty())
                ++lines;
        CHECK(lines == nv + ne + nt);
    }
}
