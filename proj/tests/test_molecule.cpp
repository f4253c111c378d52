#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cellkit/dented.hpp"
#include "cellkit/molecule.hpp"
#include "cellkit/placement.hpp"

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

MoleculeSpec two_atoms()
{
    MoleculeSpec s;
    s.n = 2;
    s.atoms = {{1, {{0, 0}}}, {0, {{1, 3}}}};
    return s;
}

long factorial(int k)
{
    long f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// Boundary measure of a union of interior-disjoint boxes: total face measure
// minus twice the measure of every (n-1)-dimensional pairwise contact.
long union_boundary(const Molecule& M, const std::vector<int>& cubes)
{
    const int n = M.n;
    long total = 0;
    for (int q : cubes) {
        long f = 1;
        for (int i = 0; i < n - 1; ++i) f *= M.cubes[static_cast<std::size_t>(q)].side;
        total += 2 * n * f;
    }
    for (std::size_t a = 0; a < cubes.size(); ++a)
        for (std::size_t b = a + 1; b < cubes.size(); ++b) {
            auto I = intersect(M.cubes[static_cast<std::size_t>(cubes[a])].box(), M.cubes[static_cast<std::size_t>(cubes[b])].box());
            if (I && I->dim() == n - 1) total -= 2 * I->measure();
        }
    return total;
}

} // namespace

TEST(Molecule, SingleCubeAtom)
{
    MoleculeSpec s;
    s.n = 1;
    s.atoms = {{0, {{0}}}};
    Molecule M = build_molecule(s);
    EXPECT_EQ(M.ell, 1);
    EXPECT_EQ(M.varrho, 0);
    EXPECT_EQ(M.tail(0), std::vector<int>{0});
}

TEST(Molecule, TwoAtomsOnASubface)
{
    Molecule M = build_molecule(two_atoms());
    EXPECT_EQ(M.parent[1], 0);
    EXPECT_EQ(M.parent[0], -1);
    EXPECT_EQ(M.leading_atom, 0);
    EXPECT_EQ(M.ell, 1);
    EXPECT_EQ(M.varrho, 1);
    // the small cube's leading face is its bottom edge, inside the top of A+
    EXPECT_EQ(M.lead[1], (Box{{1, 3}, {2, 3}}));
    EXPECT_TRUE(M.kinds[1][2] & leading_face);
    EXPECT_TRUE(M.kinds[0][3] & back_second);
    EXPECT_FALSE(M.kinds[0][3] & exterior_face);
    auto lam = level_top_down(M);
    EXPECT_EQ(lam, (std::vector<long>{1, 0}));
    EXPECT_EQ(level_bottom_up(M), lam);
}

TEST(Molecule, Errors)
{
    MoleculeSpec eq;
    eq.n = 2;
    eq.atoms = {{2, {{0, 0}}}, {1, {{3, 9}}}, {1, {{3, 12}}}};
    EXPECT_EQ(code_of([&] { build_molecule(eq); }), "BadAttachment");

    MoleculeSpec dup;
    dup.n = 2;
    dup.atoms = {{1, {{0, 0}}}, {1, {{4, 0}}}, {0, {{3, 1}}}};
    EXPECT_EQ(code_of([&] { build_molecule(dup); }), "DuplicateMaxAtom");

    MoleculeSpec cyc;
    cyc.n = 2;
    cyc.atoms = {{0, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}}};
    EXPECT_EQ(code_of([&] { build_molecule(cyc); }), "NotATree");

    // smaller atom glued along a partial face
    MoleculeSpec partial;
    partial.n = 2;
    partial.atoms = {{2, {{0, 0}}}, {1, {{7, 9}}}};
    EXPECT_EQ(code_of([&] { build_molecule(partial); }), "BadAttachment");

    // off the refinement grid of the larger face
    MoleculeSpec off;
    off.n = 2;
    off.atoms = {{2, {{0, 0}}}, {1, {{2, 9}}}};
    EXPECT_EQ(code_of([&] { build_molecule(off); }), "BadAttachment");

    MoleculeSpec overlap;
    overlap.n = 2;
    overlap.atoms = {{1, {{0, 0}}}, {0, {{1, 1}}}};
    EXPECT_EQ(code_of([&] { build_molecule(overlap); }), "NotAPartition");
}

TEST(Molecule, ChainLevels)
{
    // a three-cube atom of index 2 with ell = 3
    MoleculeSpec s;
    s.n = 2;
    s.atoms = {{2, {{0, 0}, {9, 0}, {18, 0}}}};
    Molecule M = build_molecule(s);
    EXPECT_EQ(M.ell, 3);
    EXPECT_EQ(M.leading.cube, 0);
    auto lam = level_top_down(M);
    // 2, 2 - 1/3, 2 - 2/3 in units of 1/ell
    EXPECT_EQ(lam, (std::vector<long>{6, 5, 4}));
    EXPECT_EQ(level_bottom_up(M), lam);
    EXPECT_TRUE(M.kinds[0][1] & back_first);
    EXPECT_TRUE(M.kinds[1][0] & leading_face);
    EXPECT_TRUE(M.kinds[2][1] & exterior_face);
}

TEST(Molecule, ExpansionIndexOfASquare)
{
    MoleculeSpec s;
    s.n = 2;
    s.atoms = {{0, {{0, 0}}}};
    Molecule M = build_molecule(s);
    auto e = expansion_index(M, 0);
    EXPECT_EQ(e.nu, 3 * 2 - 1 * 2);
    EXPECT_EQ(e.leading_count, e.center_count);
    EXPECT_EQ(code_of([&] { expansion_index(M, 5); }), "CubeNotInMolecule");
}

TEST(Molecule, RandomMoleculesAgree)
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = trial % 4 == 3 ? 3 : 2;
        MoleculeSpec spec = random_molecule(rng, n, n == 3 ? 1 : 2, 4, 3);
        Molecule M = build_molecule(spec);
        auto td = level_top_down(M);
        EXPECT_EQ(level_bottom_up(M), td);
        for (std::size_t q = 0; q < M.cubes.size(); ++q) {
            int qi = static_cast<int>(q);
            auto e = expansion_index(M, qi);
            EXPECT_EQ(e.leading_count, e.center_count);
            const long per = factorial(n - 1) << (n - 1);
            long lead = M.lead[q].measure();
            EXPECT_EQ(e.nu, per * (union_boundary(M, M.tail(qi)) - lead) - per * lead);
            // tails are monotone along the order
            if (M.parent[q] >= 0) {
                auto big = M.tail(M.parent[q]);
                for (int c : M.tail(qi)) EXPECT_TRUE(std::binary_search(big.begin(), big.end(), c));
            }
            int leading = 0, firsts = 0;
            for (auto k : M.kinds[q]) {
                leading += (k & leading_face) != 0;
                firsts += (k & back_first) != 0;
            }
            EXPECT_EQ(leading, 1);
            int same = 0;
            for (int c : M.children[q]) same += M.cubes[static_cast<std::size_t>(c)].atom == M.cubes[q].atom;
            EXPECT_EQ(firsts, same);
            // levels stay in Z+ + {0, 1/ell, ...}
            EXPECT_GE(td[q], 0);
        }
    }
}

TEST(Molecule, TailRatioIndependentOfScale)
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        MoleculeSpec spec = random_molecule(rng, 2, 2, 3, 3);
        Molecule M = build_molecule(spec);
        Molecule M1 = build_molecule(shift_indices(spec, 1));
        for (std::size_t q = 0; q < M.cubes.size(); ++q)
            EXPECT_DOUBLE_EQ(tail_boundary_ratio(M, static_cast<int>(q)), tail_boundary_ratio(M1, static_cast<int>(q)));
    }
}

TEST(Placement, SlotTemplate)
{
    for (int n = 2; n <= 4; ++n)
        for (int ell = 1; ell <= 3; ++ell) {
            auto P = PlacementScheme::make(n, ell);
            long unit = n * ell;
            for (int i = 0; i < n - 1; ++i) unit *= 3;
            EXPECT_EQ(P.mu % unit, 0);
            EXPECT_EQ(P.mu, 10 * unit);
            EXPECT_NEAR(10 * P.c0 * std::pow(static_cast<double>(P.mu), 1.0 / (n - 1)), 1.0, 1e-12);
            long grid = 1;
            for (int i = 0; i < n - 1; ++i) grid *= P.per_axis;
            EXPECT_GE(grid, P.mu);
            // balls of radius c0 are disjoint, far apart and inside [1/10, 9/10]
            EXPECT_GT(P.min_separation(), 2 * P.c0);
            for (long s = 0; s < P.mu; s += std::max(1L, P.mu / 50))
                for (double x : P.center(s)) {
                    EXPECT_GE(x - P.c0, 0.1);
                    EXPECT_LE(x + P.c0, 0.9);
                }
        }
}

TEST(Placement, TokenGameFits)
{
    for (int n = 2; n <= 3; ++n)
        for (int rho = 1; rho <= 3; ++rho) {
            auto P = PlacementScheme::make(n, 1);
            long influx = 1;
            for (int i = 0; i < n - 1; ++i) influx *= 3;
            auto g = simulate_rearrangements(P, rho, influx);
            EXPECT_TRUE(g.ok) << g.failure << " n=" << n << " rho=" << rho << " max=" << g.max_occupancy;
            EXPECT_LE(g.max_occupancy, P.mu);
            EXPECT_GT(g.tokens, 0);
        }
    auto tiny = PlacementScheme::make(3, 1);
    tiny.mu = 2;
    EXPECT_FALSE(simulate_rearrangements(tiny, 2, 9).ok);
}

namespace {

MoleculeSpec hull_pair()
{
    MoleculeSpec h;
    h.n = 2;
    h.atoms = {{2, {{0, 0}, {9, 0}}}};
    return h;
}

} // namespace

TEST(Dents, CornerCube)
{
    Molecule H = build_molecule(hull_pair());
    ASSERT_EQ(H.leading.cube, 0);
    DentSpec d{1, {2, {{1, {{15, 0}}}}, std::nullopt}};
    Dent D = classify_dent_faces(H, d);
    EXPECT_EQ(D.beta, 1);
    const auto& f = D.faces[0];
    // faces: x low, x high, y low, y high
    EXPECT_EQ(f[2], DentFace::leading);
    EXPECT_EQ(f[1], DentFace::base);
    EXPECT_EQ(f[0], DentFace::roof);
    EXPECT_EQ(f[3], DentFace::wall);
    EXPECT_EQ(D.pairing.roof_wall_faces, 6);
    EXPECT_EQ(D.pairing.base_lead_faces, 6);
    EXPECT_EQ(D.pairing.boundary_simplices, 2);
}

TEST(Dents, TwoCubeChain)
{
    Molecule H = build_molecule(hull_pair());
    DentSpec d{1, {2, {{1, {{15, 0}, {15, 3}}}}, std::nullopt}};
    Dent D = classify_dent_faces(H, d);
    for (std::size_t q = 0; q < D.faces.size(); ++q) {
        if (static_cast<int>(q) == D.molecule.leading.cube) continue;
        int base = 0, roof = 0;
        for (auto k : D.faces[q]) {
            base += k == DentFace::base;
            roof += k == DentFace::roof;
        }
        EXPECT_EQ(base, 1);
        EXPECT_EQ(roof, 1);
    }
    EXPECT_EQ(D.pairing.pairs.size(), static_cast<std::size_t>(D.pairing.boundary_simplices));
}

TEST(Dents, ThreeDimensionalFlattening)
{
    MoleculeSpec h;
    h.n = 3;
    h.atoms = {{1, {{0, 0, 0}, {3, 0, 0}}}};
    Molecule H = build_molecule(h);
    DentSpec d{1, {3, {{0, {{5, 1, 0}}}}, std::nullopt}};
    Dent D = classify_dent_faces(H, d);
    // a corner dent: leading, base, roof and three walls
    int walls = 0;
    for (auto k : D.faces[0]) walls += k == DentFace::wall;
    EXPECT_EQ(walls, 3);
    EXPECT_EQ(D.pairing.roof_wall_faces, 4);
    EXPECT_EQ(D.pairing.base_lead_faces, 2);
    // both sides cone to the same number of cells
    EXPECT_EQ(D.pairing.boundary_simplices, 6 * 2);
}

TEST(Dents, Rejections)
{
    Molecule H = build_molecule(hull_pair());
    // touches the other hull cube along x = 9
    DentSpec touching{1, {2, {{1, {{9, 0}}}}, std::nullopt}};
    EXPECT_EQ(code_of([&] { classify_dent_faces(H, touching); }), "NotProperlyEmbedded");
    DentSpec chain{1, {2, {{1, {{15, 0}, {15, 3}, {12, 3}}}}, std::nullopt}};
    EXPECT_EQ(code_of([&] { classify_dent_faces(H, chain); }), "UnclassifiableFace");
    DentSpec same{1, {2, {{2, {{9, 0}}}}, std::nullopt}};
    EXPECT_EQ(code_of([&] { classify_dent_faces(H, same); }), "NotProperlyEmbedded");

    DentedMoleculeSpec lead{hull_pair(), {{0, {2, {{1, {{0, 3}}}}, std::nullopt}}}};
    EXPECT_EQ(code_of([&] { build_dented_molecule(lead); }), "NotProperlyEmbedded");
    DentSpec ok{1, {2, {{1, {{15, 0}}}}, std::nullopt}};
    DentedMoleculeSpec twice{hull_pair(), {ok, ok}};
    EXPECT_EQ(code_of([&] { build_dented_molecule(twice); }), "MultipleDents");
    DentedMoleculeSpec fine{hull_pair(), {ok}};
    auto DM = build_dented_molecule(fine);
    EXPECT_EQ(DM.beta_dents, 1);
}
