#include <gtest/gtest.h>

#include <random>

#include "cellkit/generators.hpp"
#include "cellkit/reduction.hpp"
#include "cellkit/shelling.hpp"

using namespace cellkit;

namespace {

std::string code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

int square_at(const Complex& K, int x, int y)
{
    for (int q : K.cells_of_dim(2)) {
        const auto& c = K.coords(K.cell(q).chart[0]);
        if (static_cast<int>(c[0]) == x && static_cast<int>(c[1]) == y) return q;
    }
    return -1;
}

// Planar check of a shelling: every new square meets the earlier ones in a
// nonempty arc of its own edges and in nothing else.
bool planar_shelling_ok(const Complex& K, const std::vector<int>& order)
{
    std::set<VertexList> edges_before;
    std::set<int> verts_before;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Cell& q = K.cell(order[i]);
        if (i > 0) {
            std::vector<VertexList> shared;
            for (int e : q.faces)
                if (edges_before.count(K.cell(e).verts)) shared.push_back(K.cell(e).verts);
            if (shared.empty() || shared.size() == 4) return false;
            std::set<int> touched;
            for (int v : q.verts)
                if (verts_before.count(v)) touched.insert(v);
            std::set<int> on_edges;
            for (const auto& e : shared) on_edges.insert(e.begin(), e.end());
            if (touched != on_edges) return false;
            // an arc of k edges has k + 1 vertices
            if (on_edges.size() != shared.size() + 1) return false;
        }
        for (int e : q.faces) edges_before.insert(K.cell(e).verts);
        verts_before.insert(q.verts.begin(), q.verts.end());
    }
    return true;
}

using Cells = std::set<std::pair<int, int>>;

Cells normalize(const Cells& s)
{
    int mx = 1 << 20, my = 1 << 20;
    for (auto [x, y] : s) {
        mx = std::min(mx, x);
        my = std::min(my, y);
    }
    Cells out;
    for (auto [x, y] : s) out.insert({x - mx, y - my});
    return out;
}

Cells canonical(const Cells& s)
{
    Cells best;
    bool first = true;
    for (int r = 0; r < 8; ++r) {
        Cells t;
        for (auto [x, y] : s) {
            int a = x, b = y;
            if (r & 4) a = -a;
            for (int k = 0; k < (r & 3); ++k) {
                int na = -b, nb = a;
                a = na;
                b = nb;
            }
            t.insert({a, b});
        }
        t = normalize(t);
        if (first || t < best) {
            best = t;
            first = false;
        }
    }
    return best;
}

std::vector<std::set<Cells>> free_polyominoes(int max_size)
{
    std::vector<std::set<Cells>> by(static_cast<std::size_t>(max_size + 1));
    by[1].insert(Cells{std::pair{0, 0}});
    for (int n = 2; n <= max_size; ++n)
        for (const auto& p : by[static_cast<std::size_t>(n - 1)])
            for (auto [x, y] : p)
                for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                    Cells q = p;
                    if (!q.insert({x + dx, y + dy}).second) continue;
                    by[static_cast<std::size_t>(n)].insert(canonical(q));
                }
    return by;
}

Complex from_cells(const Cells& s)
{
    std::vector<Point> cs;
    for (auto [x, y] : s) cs.push_back({x, y});
    return lattice_complex(2, cs);
}

} // namespace

TEST(Shelling, SingleCube)
{
    Complex K = unit_cube(3);
    EXPECT_TRUE(verify_shelling(K, K.cells_of_dim(3)).ok);
}

TEST(Shelling, GridOrders)
{
    Complex K = grid2(2, 2);
    std::vector<int> row{square_at(K, 0, 0), square_at(K, 1, 0), square_at(K, 0, 1), square_at(K, 1, 1)};
    EXPECT_TRUE(verify_shelling(K, row).ok);
    EXPECT_TRUE(planar_shelling_ok(K, row));
    std::vector<int> diag{square_at(K, 0, 0), square_at(K, 1, 1), square_at(K, 1, 0), square_at(K, 0, 1)};
    auto r = verify_shelling(K, diag);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.first_violation, 2);
    EXPECT_FALSE(planar_shelling_ok(K, diag));
    EXPECT_EQ(code_of([&] { verify_shelling(K, {row[0], row[1]}); }), "NotAPermutation");
}

TEST(Shelling, Rectangles)
{
    for (int w = 1; w <= 4; ++w)
        for (int h = 1; h <= 3; ++h) {
            Complex K = grid2(w, h);
            auto order = find_shelling(K);
            ASSERT_TRUE(order.has_value()) << w << "x" << h;
            EXPECT_TRUE(verify_shelling(K, *order).ok);
            EXPECT_TRUE(planar_shelling_ok(K, *order));
        }
}

TEST(Shelling, AnnulusIsNotACell)
{
    std::vector<Point> cs;
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            if (x != 1 || y != 1) cs.push_back({x, y});
    Complex K = lattice_complex(2, cs);
    EXPECT_EQ(K.euler_characteristic(), 0);
    EXPECT_FALSE(is_cell(K));
    EXPECT_EQ(code_of([&] { find_shelling(K); }), "NotACell");
}

TEST(Shelling, PinchedSquaresAreNotACell)
{
    Complex K = lattice_complex(2, {{0, 0}, {1, 1}});
    EXPECT_FALSE(is_cell(K));
}

TEST(Shelling, ThreeDimensional)
{
    for (Complex K : {grid3(2, 1, 1), grid3(2, 2, 1), grid3(2, 2, 2)}) {
        auto order = find_shelling(K);
        ASSERT_TRUE(order.has_value());
        EXPECT_TRUE(verify_shelling(K, *order).ok);
    }
}

TEST(Shelling, FreePolyominoSweep)
{
    // free polyomino counts are a known sequence; use them to check the enumerator
    auto polys = free_polyominoes(7);
    const std::vector<std::size_t> known{0, 1, 1, 2, 5, 12, 35, 108};
    for (int n = 1; n <= 7; ++n) EXPECT_EQ(polys[static_cast<std::size_t>(n)].size(), known[static_cast<std::size_t>(n)]);
    int disks = 0;
    for (int n = 1; n <= 7; ++n)
        for (const auto& p : polys[static_cast<std::size_t>(n)]) {
            Complex K = from_cells(p);
            if (!is_cell(K)) continue;
            ++disks;
            auto order = find_shelling(K);
            ASSERT_TRUE(order.has_value());
            EXPECT_TRUE(planar_shelling_ok(K, *order));
        }
    // the single heptomino with a hole is the only one excluded
    EXPECT_EQ(disks, 1 + 1 + 2 + 5 + 12 + 35 + 107);
}

TEST(Shelling, RandomPolyominoesUpToTwelve)
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        int size = 2 + static_cast<int>(rng() % 11);
        Cells s{std::pair{0, 0}};
        while (static_cast<int>(s.size()) < size) {
            auto it = s.begin();
            std::advance(it, static_cast<long>(rng() % s.size()));
            int d = static_cast<int>(rng() % 4);
            int dx = d == 0 ? 1 : d == 1 ? -1 : 0;
            int dy = d == 2 ? 1 : d == 3 ? -1 : 0;
            s.insert({it->first + dx, it->second + dy});
        }
        Complex K = from_cells(s);
        if (!is_cell(K)) continue;
        auto order = find_shelling(K);
        ASSERT_TRUE(order.has_value());
        EXPECT_TRUE(planar_shelling_ok(K, *order));
    }
}

TEST(BoundaryFaces, OpenBox)
{
    Complex Q = unit_cube(3);
    int cube = Q.cells_of_dim(3)[0];
    const auto& facets = Q.cell(cube).faces;
    std::vector<int> five(facets.begin(), facets.end() - 1);
    auto order = boundary_face_shelling(Q, cube, five);
    ASSERT_EQ(order.size(), 5u);
    // first face's opposite is missing
    int first = order[0];
    auto pos = std::find(facets.begin(), facets.end(), first) - facets.begin();
    int opp = facets[static_cast<std::size_t>(pos ^ 1)];
    EXPECT_EQ(std::count(five.begin(), five.end(), opp), 0);
    Complex P = subcomplex(Q, order);
    P.set_dimension(2);
    std::vector<int> local;
    for (int f : order) local.push_back(*P.find(Q.cell(f).verts, 2));
    EXPECT_TRUE(verify_shelling(P, local).ok);

    EXPECT_EQ(boundary_face_shelling(Q, cube, {facets[2]}), (std::vector<int>{facets[2]}));
    std::vector<int> all(facets.begin(), facets.end());
    EXPECT_EQ(code_of([&] { boundary_face_shelling(Q, cube, all); }), "AllOppositePairsPresent");
}

TEST(BoundaryFaces, CellInCubeBoundary)
{
    Complex B = cube_boundary(3);
    std::vector<int> box;
    EXPECT_FALSE(is_cell(B));
    Complex Q = unit_cube(3);
    int cube = Q.cells_of_dim(3)[0];
    const auto& f = Q.cell(cube).faces;
    // three faces around a corner
    std::vector<int> corner{f[0], f[2], f[4]};
    auto order = boundary_face_shelling(Q, cube, corner);
    EXPECT_EQ(order.size(), 3u);
    Complex P = subcomplex(Q, corner);
    P.set_dimension(2);
    EXPECT_TRUE(is_cell(P));
    auto found = find_shelling(P);
    EXPECT_TRUE(found.has_value());
}

TEST(StarReplacement, Counts)
{
    auto single = star_replacement(unit_cube(2));
    EXPECT_TRUE(isomorphic(single.complex, canonical_triangulation(unit_cube(2)).complex));

    Complex domino = grid2(2, 1);
    auto d = star_replacement(domino);
    EXPECT_EQ(canonical_triangulation(domino).complex.count(2), 16u);
    EXPECT_EQ(d.complex.count(2), 12u);

    Complex tromino = lattice_complex(2, {{0, 0}, {1, 0}, {1, 1}});
    auto t = star_replacement(tromino);
    EXPECT_EQ(t.complex.count(2), 16u);
    EXPECT_EQ((24 - 16) / 2, 4);
    // boundary of K* is the boundary of K^Delta
    Complex b1 = boundary_complex(t.complex);
    Complex b2 = boundary_complex(canonical_triangulation(tromino).complex);
    std::set<VertexList> s1, s2;
    for (const auto& c : b1.cells()) s1.insert(c.verts);
    for (const auto& c : b2.cells()) s2.insert(c.verts);
    EXPECT_EQ(s1, s2);
}
