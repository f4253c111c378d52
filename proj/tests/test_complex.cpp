#include <gtest/gtest.h>

#include <cmath>

#include "cellkit/complex.hpp"
#include "cellkit/generators.hpp"
#include "cellkit/triangulation.hpp"

using namespace cellkit;

namespace {

// Number of maximal flags of an n-cube counted directly: choose the order in
// which the coordinates are freed (n!) and the corner (2^n).
long cube_flags(int n)
{
    long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f << n;
}

Complex two_squares(std::vector<int> second)
{
    Complex K(2, Mode::cubical);
    for (int v = 0; v < 6; ++v) K.add_vertex(v);
    K.add_cube({0, 1, 2, 3});
    K.add_cube(std::move(second));
    return K;
}

} // namespace

TEST(Complex, SingleSquare)
{
    Complex K = unit_cube(2);
    validate(K);
    EXPECT_EQ(K.count(0), 4u);
    EXPECT_EQ(K.count(1), 4u);
    EXPECT_EQ(K.count(2), 1u);
    EXPECT_EQ(K.euler_characteristic(), 1);
}

TEST(Complex, DominoAdjacency)
{
    Complex K = grid2(2, 1);
    validate(K);
    auto g = adjacency_graph(K);
    EXPECT_EQ(g.nodes.size(), 2u);
    EXPECT_EQ(g.edges.size(), 1u);
    EXPECT_TRUE(is_simplicially_connected(K));
}

TEST(Complex, OppositeCornersRejected)
{
    // second square has 0 and 3 as a diagonal pair
    Complex K = two_squares({0, 4, 5, 3});
    try {
        validate(K);
        FAIL() << "expected IllegalIntersection";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "IllegalIntersection");
    }
}

TEST(Complex, SharedEdgeAccepted)
{
    Complex K = two_squares({1, 4, 3, 5});
    EXPECT_NO_THROW(validate(K));
}

TEST(Complex, DisjointSquaresDisconnected)
{
    Complex K = lattice_complex(2, {{0, 0}, {3, 0}});
    validate(K);
    EXPECT_FALSE(is_simplicially_connected(K));
    EXPECT_EQ(connected_components(K), 2u);
}

TEST(Complex, SingleCubeGraph)
{
    Complex K = unit_cube(3);
    auto g = adjacency_graph(K);
    EXPECT_EQ(g.nodes.size(), 1u);
    EXPECT_TRUE(g.edges.empty());
    EXPECT_TRUE(is_simplicially_connected(K));
}

TEST(Complex, FaceOveruse)
{
    Complex K(2, Mode::simplicial);
    for (int v = 0; v < 5; ++v) K.add_vertex(v);
    K.add_simplex({0, 1, 2});
    K.add_simplex({0, 1, 3});
    K.add_simplex({0, 1, 4});
    try {
        validate(K);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "FaceOveruse");
    }
}

TEST(Complex, MissingFace)
{
    Complex K(2, Mode::simplicial);
    for (int v = 0; v < 3; ++v) K.add_vertex(v);
    int e = K.add_simplex({0, 1});
    K.add_cell_raw(2, Kind::simplex, {0, 1, 2}, {e});
    try {
        validate(K);
        FAIL();
    } catch (const Error& e2) {
        EXPECT_EQ(e2.code(), "MissingFace");
    }
}

TEST(Complex, AdjacentTypeIsFlaggedNotRejected)
{
    // two triangles on the same vertex set glued along one edge
    Complex K(2, Mode::simplicial);
    for (int v = 0; v < 3; ++v) K.add_vertex(v);
    int a = K.add_simplex({0, 1});
    int b = K.add_simplex({1, 2});
    int c = K.add_simplex({0, 2});
    int c2 = K.add_cell_raw(1, Kind::simplex, {0, 2}, {K.vertex_cell(0), K.vertex_cell(2)});
    int b2 = K.add_cell_raw(1, Kind::simplex, {1, 2}, {K.vertex_cell(1), K.vertex_cell(2)});
    K.add_cell_raw(2, Kind::simplex, {0, 1, 2}, {a, b, c});
    K.add_cell_raw(2, Kind::simplex, {0, 1, 2}, {a, b2, c2});
    EXPECT_NO_THROW(validate(K, false));
    EXPECT_FALSE(K.warnings().empty());
}

TEST(Complex, UnknownVertex)
{
    Complex K = unit_cube(2);
    try {
        star(K, 99);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "UnknownVertex");
    }
}

TEST(Triangulation, UnitEdge)
{
    auto tri = canonical_triangulation(unit_cube(1));
    EXPECT_EQ(tri.complex.count(1), 2u);
    EXPECT_EQ(tri.complex.count(0), 3u);
}

TEST(Triangulation, SquareAndCubeCounts)
{
    for (int n = 1; n <= 4; ++n) {
        Complex Q = unit_cube(n);
        auto tri = canonical_triangulation(Q);
        EXPECT_EQ(static_cast<long>(tri.complex.count(n)), cube_flags(n)) << n;
        // one new vertex per cube of positive dimension: 3^n - 2^n of them
        long added = static_cast<long>(std::pow(3, n) - std::pow(2, n));
        EXPECT_EQ(static_cast<long>(tri.complex.count(0)) - (1L << n), added);
    }
    EXPECT_EQ(canonical_triangulation(unit_cube(2)).complex.count(2), 8u);
    EXPECT_EQ(canonical_triangulation(unit_cube(2)).complex.count(0), 9u);
    EXPECT_EQ(canonical_triangulation(unit_cube(3)).complex.count(3), 48u);
}

TEST(Triangulation, NewVertexIdsAndBarycenters)
{
    Complex K = unit_cube(2);
    auto tri = canonical_triangulation(K);
    // ids 4..7 are edges in lexicographic vertex order, 8 is the face
    EXPECT_EQ(tri.origin_dim.at(8), 2);
    for (int v = 4; v < 8; ++v) EXPECT_EQ(tri.origin_dim.at(v), 1);
    const auto& c = tri.complex.coords(8);
    EXPECT_DOUBLE_EQ(c[0], 0.5);
    EXPECT_DOUBLE_EQ(c[1], 0.5);
    EXPECT_EQ(K.cell(tri.origin_cell.at(4)).verts, (VertexList{0, 1}));
}

TEST(Triangulation, RejectsSimplicialInput)
{
    Complex K(1, Mode::simplicial);
    K.add_vertex(0);
    K.add_vertex(1);
    K.add_simplex({0, 1});
    try {
        canonical_triangulation(K);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "NotCubical");
    }
}

TEST(Triangulation, RestrictionCommutes)
{
    Complex K = grid2(3, 2);
    auto tri = canonical_triangulation(K);
    // subcomplex: the two left squares
    std::vector<int> pick;
    for (int q : K.cells_of_dim(2)) {
        const auto& x = K.coords(K.cell(q).verts[0]);
        if (x[0] < 0.5) pick.push_back(q);
    }
    ASSERT_EQ(pick.size(), 2u);
    std::set<int> cl = K.closure_of(pick);
    Complex restricted = restrict_triangulation(tri, cl);
    Complex sub = subcomplex(K, pick);
    auto tri_sub = canonical_triangulation(sub);
    EXPECT_EQ(restricted.count(2), tri_sub.complex.count(2));
    EXPECT_TRUE(isomorphic(restricted, tri_sub.complex));
}

TEST(Triangulation, StarAndLink)
{
    auto tri = canonical_triangulation(unit_cube(2));
    const Complex& T = tri.complex;
    Complex s = star(T, 8);
    EXPECT_EQ(s.count(2), T.count(2));
    Complex sc = star(T, 0);
    EXPECT_EQ(sc.count(2), 2u);
    Complex lk = link(T, 8);
    EXPECT_EQ(lk.count(1), 8u);
    EXPECT_EQ(lk.count(0), 8u);
    for (int v : lk.vertex_ids()) {
        int deg = 0;
        for (int c : lk.incident(v)) deg += lk.cell(c).dim == 1;
        EXPECT_EQ(deg, 2);
    }
    EXPECT_EQ(connected_components(lk), 1u);
}

TEST(Triangulation, DoubleIsClosed)
{
    auto d = double_along_boundary(canonical_triangulation(unit_cube(2)));
    EXPECT_EQ(d.complex.count(2), 16u);
    EXPECT_TRUE(is_closed(d.complex));
    EXPECT_EQ(d.complex.euler_characteristic(), 2);
    auto d3 = double_along_boundary(canonical_triangulation(unit_cube(3)));
    EXPECT_EQ(d3.complex.count(3), 96u);
    EXPECT_TRUE(is_closed(d3.complex));
}

TEST(Isomorphism, RelabeledCopy)
{
    auto tri = canonical_triangulation(grid2(2, 2));
    const Complex& A = tri.complex;
    Complex B(2, Mode::simplicial);
    auto ids = A.vertex_ids();
    std::map<int, int> perm;
    for (std::size_t i = 0; i < ids.size(); ++i) perm[ids[i]] = 1000 - static_cast<int>(i) * 7;
    for (int v : ids) B.add_vertex(perm[v]);
    for (int s : A.cells_of_dim(2)) {
        VertexList vs;
        for (int v : A.cell(s).verts) vs.push_back(perm[v]);
        B.add_simplex(vs);
    }
    auto iso = find_isomorphism(A, B);
    ASSERT_TRUE(iso.has_value());
    EXPECT_EQ(iso->size(), perm.size());
    Complex C = canonical_triangulation(grid2(4, 1)).complex;
    EXPECT_FALSE(isomorphic(A, C));
}
