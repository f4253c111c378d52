#pragma once

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "cellkit/molecule.hpp"

namespace cellkit {

// A dent: a molecule inside one hull cube, in the same units as the hull.
struct DentSpec {
    int hull_cube = -1;
    MoleculeSpec molecule;
};

struct DentedMoleculeSpec {
    MoleculeSpec hulls;
    std::vector<DentSpec> dents;
};

enum class DentFace { none, leading, base, roof, wall };

inline const char* to_string(DentFace f)
{
    switch (f) {
    case DentFace::leading: return "leading";
    case DentFace::base: return "base";
    case DentFace::roof: return "roof";
    case DentFace::wall: return "wall";
    default: return "none";
    }
}

// Bijection realizing the flattening at the cell level: Roof u Wall and
// Base u {q+} are (n-1)-cells with the same triangulated boundary, so their
// cones over that boundary pair off cell by cell.
struct FlatteningPairing {
    long roof_wall_faces = 0;  // unit faces of M on Roof u Wall
    long base_lead_faces = 0;  // unit faces of M on Base u {q+}
    long boundary_simplices = 0;
    // boundary (n-2)-simplices in doubled coordinates; each one pairs its cone
    // on the Roof u Wall side with its cone on the Base u {q+} side
    std::vector<std::vector<std::vector<long>>> pairs;
};

struct Dent {
    Molecule molecule;
    int hull_cube = -1;
    int beta = 0; // refinement index of the embedded molecule
    std::vector<std::vector<DentFace>> faces; // per dent cube, per face 2*axis+side
    FlatteningPairing pairing;
};

struct DentedMolecule {
    Molecule hull;
    std::vector<Dent> dents;
    int beta_dents = 0;
};

namespace detail {

using CoordKey = std::vector<long>;

// Boundary simplices of the triangulation of a face set, keyed by doubled
// coordinates so both sides compare exactly.
inline std::set<std::vector<CoordKey>> boundary_keys(int n, const std::set<UnitFace>& F, bool* cell)
{
    Complex C = face_complex(n, F);
    *cell = is_cell(C);
    Triangulation T = canonical_triangulation(C);
    Complex B = boundary_complex(T.complex);
    std::set<std::vector<CoordKey>> out;
    for (int s : B.cells_of_dim(n - 2)) {
        std::vector<CoordKey> key;
        for (int v : B.cell(s).verts) {
            CoordKey k;
            for (double x : B.coords(v)) k.push_back(std::lround(2 * x));
            key.push_back(k);
        }
        std::sort(key.begin(), key.end());
        out.insert(key);
    }
    return out;
}

} // namespace detail

// Validates a dent as a properly embedded molecule in the hull cube and
// classifies the faces of its cubes.  Errors: NotProperlyEmbedded,
// UnclassifiableFace, NotAFlattening.
inline Dent classify_dent_faces(const Molecule& hull, const DentSpec& spec)
{
    const int n = hull.n;
    if (spec.hull_cube < 0 || static_cast<std::size_t>(spec.hull_cube) >= hull.cubes.size())
        fail("CubeNotInMolecule", "dent hull cube " + std::to_string(spec.hull_cube));
    const MCube& Q = hull.cubes[static_cast<std::size_t>(spec.hull_cube)];
    const Box qb = Q.box();
    const int K = hull.rho(spec.hull_cube);
    auto on_dQ = [&](const Box& f) {
        for (int a = 0; a < n; ++a) {
            auto ai = static_cast<std::size_t>(a);
            if (f.lo[ai] == f.hi[ai] && (f.lo[ai] == qb.lo[ai] || f.lo[ai] == qb.hi[ai])) return true;
        }
        return false;
    };
    // a leading face on dQ unless one is designated
    MoleculeSpec ms = spec.molecule;
    ms.n = n;
    Dent D;
    D.hull_cube = spec.hull_cube;
    for (const auto& A : ms.atoms) {
        if (A.rho >= K) fail("NotProperlyEmbedded", "dent cube is not in an iterated refinement of the hull cube");
        const int side = static_cast<int>(detail::pow3(A.rho));
        for (const auto& p : A.cubes) {
            MCube c{p, side, 0};
            if (!qb.contains(c.box())) fail("NotProperlyEmbedded", "dent cube leaves the hull cube");
            for (int a = 0; a < n; ++a)
                if ((p[static_cast<std::size_t>(a)] - Q.lo[static_cast<std::size_t>(a)]) % side != 0)
                    fail("NotProperlyEmbedded", "dent cube is not aligned with the refinement");
            D.beta = std::max(D.beta, K - A.rho);
        }
    }
    if (!ms.leading) {
        int top = 0;
        for (std::size_t a = 0; a < ms.atoms.size(); ++a)
            if (ms.atoms[a].rho > ms.atoms[static_cast<std::size_t>(top)].rho) top = static_cast<int>(a);
        int first = 0;
        for (int a = 0; a < top; ++a) first += static_cast<int>(ms.atoms[static_cast<std::size_t>(a)].cubes.size());
        std::optional<std::pair<Box, FaceRef>> pick;
        const int side = static_cast<int>(detail::pow3(ms.atoms[static_cast<std::size_t>(top)].rho));
        for (std::size_t i = 0; i < ms.atoms[static_cast<std::size_t>(top)].cubes.size(); ++i) {
            MCube c{ms.atoms[static_cast<std::size_t>(top)].cubes[i], side, top};
            int onb = 0;
            for (int a = 0; a < n; ++a)
                for (int s = 0; s < 2; ++s) onb += on_dQ(c.face(a, s));
            if (onb < 1 || onb > 2) continue;
            for (int a = 0; a < n; ++a)
                for (int s = 0; s < 2; ++s) {
                    Box f = c.face(a, s);
                    if (!on_dQ(f)) continue;
                    FaceRef r{first + static_cast<int>(i), a, s};
                    if (!pick || std::tie(f.lo, a) < std::tie(pick->first.lo, pick->second.axis)) pick = {f, r};
                }
        }
        if (!pick) fail("NotProperlyEmbedded", "no leading cube with one or two faces on the hull boundary");
        ms.leading = pick->second;
    }
    D.molecule = build_molecule(ms);
    const Molecule& M = D.molecule;
    const std::size_t N = M.cubes.size();
    // the dent meets no other hull cube
    for (std::size_t c = 0; c < hull.cubes.size(); ++c) {
        if (static_cast<int>(c) == spec.hull_cube) continue;
        for (const auto& dc : M.cubes)
            if (intersect(dc.box(), hull.cubes[c].box())) fail("NotProperlyEmbedded", "dent meets another hull cube");
    }
    const int root = M.leading.cube;
    const Box lead = M.lead[static_cast<std::size_t>(root)];
    if (!on_dQ(lead)) fail("NotProperlyEmbedded", "leading face of the dent is not on the hull boundary");
    auto all_boundary = boundary_faces(unit_cubes(M, all_cubes(M)), n);
    D.faces.assign(N, std::vector<DentFace>(static_cast<std::size_t>(2 * n), DentFace::none));
    for (std::size_t i = 0; i < N; ++i) {
        int onb = 0;
        for (int a = 0; a < n; ++a)
            for (int s = 0; s < 2; ++s) onb += on_dQ(M.cubes[i].face(a, s));
        if (static_cast<int>(i) == root) {
            if (onb < 1 || onb > 2) fail("NotProperlyEmbedded", "leading cube needs one or two faces on the hull boundary");
        } else if (onb != 1) {
            fail("UnclassifiableFace", "cube " + std::to_string(i) + " of the dent has " + std::to_string(onb) + " faces on the hull boundary");
        }
        for (int a = 0; a < n; ++a)
            for (int s = 0; s < 2; ++s) {
                Box f = M.cubes[i].face(a, s);
                auto& k = D.faces[i][static_cast<std::size_t>(2 * a + s)];
                if (static_cast<int>(i) == root && f == lead) k = DentFace::leading;
                else if (on_dQ(f)) k = DentFace::base;
            }
        for (int a = 0; a < n; ++a)
            for (int s = 0; s < 2; ++s)
                if (D.faces[i][static_cast<std::size_t>(2 * a + s)] == DentFace::base) {
                    auto& opp = D.faces[i][static_cast<std::size_t>(2 * a + (1 - s))];
                    if (opp != DentFace::none) fail("UnclassifiableFace", "base face opposite a base or leading face");
                    opp = DentFace::roof;
                }
        for (int a = 0; a < n; ++a)
            for (int s = 0; s < 2; ++s) {
                auto& k = D.faces[i][static_cast<std::size_t>(2 * a + s)];
                if (k != DentFace::none) continue;
                if (!faces_in(all_boundary, M.cubes[i].face(a, s)).empty()) k = DentFace::wall;
            }
    }
    // flattening: Roof u Wall versus Base u {q+}
    std::set<UnitFace> inner, outer;
    for (const auto& f : all_boundary) {
        Box b{f.first, f.first};
        for (int a = 0; a < n; ++a)
            if (a != f.second) b.hi[static_cast<std::size_t>(a)] += 1;
        (on_dQ(b) ? outer : inner).insert(f);
    }
    bool c1 = false, c2 = false;
    auto k1 = detail::boundary_keys(n, inner, &c1);
    auto k2 = detail::boundary_keys(n, outer, &c2);
    if (!c1 || !c2) fail("NotAFlattening", "Roof u Wall or Base u {q+} is not an (n-1)-cell");
    if (k1 != k2) fail("NotAFlattening", "Roof u Wall and Base u {q+} have different boundaries");
    D.pairing.roof_wall_faces = static_cast<long>(inner.size());
    D.pairing.base_lead_faces = static_cast<long>(outer.size());
    D.pairing.boundary_simplices = static_cast<long>(k1.size());
    D.pairing.pairs.assign(k1.begin(), k1.end());
    return D;
}

// Hulls form a molecule; each dent sits in a single hull cube other than the
// leading cube of its atom, with at most one dent per cube.
inline DentedMolecule build_dented_molecule(const DentedMoleculeSpec& spec)
{
    DentedMolecule DM;
    DM.hull = build_molecule(spec.hulls);
    std::set<int> used;
    for (const auto& d : spec.dents) {
        if (!used.insert(d.hull_cube).second) fail("MultipleDents", "hull cube " + std::to_string(d.hull_cube) + " has two dents");
        if (d.hull_cube >= 0 && static_cast<std::size_t>(d.hull_cube) < DM.hull.cubes.size()) {
            int atom = DM.hull.cubes[static_cast<std::size_t>(d.hull_cube)].atom;
            if (DM.hull.atom_root[static_cast<std::size_t>(atom)] == d.hull_cube)
                fail("NotProperlyEmbedded", "the leading cube of a hull atom cannot be dented");
        }
        DM.dents.push_back(classify_dent_faces(DM.hull, d));
        DM.beta_dents = std::max(DM.beta_dents, DM.dents.back().beta);
    }
    return DM;
}

} // namespace cellkit
