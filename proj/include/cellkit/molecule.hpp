#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cellkit/generators.hpp"
#include "cellkit/shelling.hpp"
#include "cellkit/triangulation.hpp"

namespace cellkit {

// Closed axis-aligned box with integer corners.
struct Box {
    Point lo, hi;

    int dim() const
    {
        int d = 0;
        for (std::size_t i = 0; i < lo.size(); ++i) d += lo[i] < hi[i];
        return d;
    }
    long measure() const
    {
        long m = 1;
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (lo[i] < hi[i]) m *= hi[i] - lo[i];
        return m;
    }
    bool contains(const Box& b) const
    {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (b.lo[i] < lo[i] || b.hi[i] > hi[i]) return false;
        return true;
    }
    bool operator==(const Box&) const = default;
    auto operator<=>(const Box&) const = default;
};

inline std::optional<Box> intersect(const Box& a, const Box& b)
{
    Box r{a.lo, a.hi};
    for (std::size_t i = 0; i < a.lo.size(); ++i) {
        r.lo[i] = std::max(a.lo[i], b.lo[i]);
        r.hi[i] = std::min(a.hi[i], b.hi[i]);
        if (r.lo[i] > r.hi[i]) return std::nullopt;
    }
    return r;
}

// Face of an n-cube: the coordinate `axis` is fixed at its lower (side 0) or
// upper (side 1) value.
struct FaceRef {
    int cube = -1;
    int axis = 0;
    int side = 0;
    bool operator==(const FaceRef&) const = default;
};

// An atom given by the lower corners of its cubes in the unit of the
// molecule; each cube has side 3^rho.
struct AtomSpec {
    int rho = 0;
    std::vector<Point> cubes;
};

struct MoleculeSpec {
    int n = 2;
    std::vector<AtomSpec> atoms;
    std::optional<FaceRef> leading; // cube index is global, in atom order
};

enum FaceKind : unsigned { leading_face = 1, exterior_face = 2, back_first = 4, back_second = 8 };

struct MCube {
    Point lo;
    int side = 1;
    int atom = 0;
    Box box() const
    {
        Box b{lo, lo};
        for (auto& x : b.hi) x += side;
        return b;
    }
    Box face(int axis, int s) const
    {
        Box b = box();
        auto a = static_cast<std::size_t>(axis);
        if (s == 0) b.hi[a] = b.lo[a];
        else b.lo[a] = b.hi[a];
        return b;
    }
};

struct Molecule {
    MoleculeSpec spec;
    int n = 2;
    std::vector<MCube> cubes;
    std::vector<int> parent;              // -1 at the leading cube
    std::vector<std::vector<int>> children;
    std::vector<Box> lead;                // q+_Q, a face of Q
    int leading_atom = 0;
    FaceRef leading;
    std::vector<int> depth;               // tree distance to Q+_M
    std::vector<int> j;                   // tree distance to the leading cube of its atom
    std::vector<int> atom_root;           // Q+_A per atom
    std::vector<std::vector<unsigned>> kinds; // per cube, per face 2*axis+side
    int ell = 1;
    int varrho = 0;

    int rho(int q) const { return spec.atoms[static_cast<std::size_t>(cubes[static_cast<std::size_t>(q)].atom)].rho; }
    std::vector<int> tail(int q) const
    {
        std::vector<int> out{q};
        for (std::size_t i = 0; i < out.size(); ++i)
            for (int c : children[static_cast<std::size_t>(out[i])]) out.push_back(c);
        std::sort(out.begin(), out.end());
        return out;
    }
};

namespace detail {

inline long pow3(int e)
{
    long r = 1;
    while (e-- > 0) r *= 3;
    return r;
}

inline bool is_tree(std::size_t nodes, const std::vector<std::pair<int, int>>& edges)
{
    if (nodes == 0) return false;
    if (edges.size() + 1 != nodes) return false;
    std::vector<std::vector<int>> adj(nodes);
    for (auto [a, b] : edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    std::vector<char> seen(nodes, 0);
    std::vector<int> st{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!st.empty()) {
        int u = st.back();
        st.pop_back();
        for (int v : adj[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                st.push_back(v);
            }
    }
    return count == nodes;
}

} // namespace detail

// Unit cubes of M at `scale` subdivisions per unit, as lower corners.
inline std::set<Point> unit_cubes(const Molecule& M, const std::vector<int>& which, int scale = 1)
{
    std::set<Point> out;
    const int n = M.n;
    for (int q : which) {
        const MCube& c = M.cubes[static_cast<std::size_t>(q)];
        const int s = c.side * scale;
        long total = 1;
        for (int i = 0; i < n; ++i) total *= s;
        for (long idx = 0; idx < total; ++idx) {
            Point p(static_cast<std::size_t>(n));
            long t = idx;
            for (int i = 0; i < n; ++i) {
                p[static_cast<std::size_t>(i)] = c.lo[static_cast<std::size_t>(i)] * scale + static_cast<int>(t % s);
                t /= s;
            }
            out.insert(p);
        }
    }
    return out;
}

inline std::vector<int> all_cubes(const Molecule& M)
{
    std::vector<int> v(M.cubes.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    return v;
}

// The cubical complex M on unit cubes (Ref(M) for scale 3).
inline Complex molecule_complex(const Molecule& M, int scale = 1)
{
    auto u = unit_cubes(M, all_cubes(M), scale);
    return lattice_complex(M.n, std::vector<Point>(u.begin(), u.end()));
}

// A unit (n-1)-cube: lower corner and normal axis.
using UnitFace = std::pair<Point, int>;

inline std::set<UnitFace> boundary_faces(const std::set<Point>& U, int n)
{
    std::set<UnitFace> out;
    for (const auto& p : U)
        for (int a = 0; a < n; ++a) {
            Point lo = p, hi = p;
            lo[static_cast<std::size_t>(a)] -= 1;
            hi[static_cast<std::size_t>(a)] += 1;
            if (!U.count(lo)) out.insert({p, a});
            if (!U.count(hi)) out.insert({hi, a});
        }
    return out;
}

inline std::set<UnitFace> faces_in(const std::set<UnitFace>& F, const Box& b)
{
    std::set<UnitFace> out;
    for (const auto& [lo, a] : F) {
        Box f{lo, lo};
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (static_cast<int>(i) != a) f.hi[i] += 1;
        if (b.contains(f)) out.insert({lo, a});
    }
    return out;
}

// Unit faces of a box of dimension n-1 at the given scale.
inline std::set<UnitFace> unit_faces_of(const Box& b, int scale)
{
    std::set<UnitFace> out;
    const std::size_t n = b.lo.size();
    int normal = -1;
    for (std::size_t i = 0; i < n; ++i)
        if (b.lo[i] == b.hi[i]) normal = static_cast<int>(i);
    std::vector<int> lo(n), ext(n);
    long total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = b.lo[i] * scale;
        ext[i] = static_cast<int>(i) == normal ? 1 : (b.hi[i] - b.lo[i]) * scale;
        total *= ext[i];
    }
    for (long idx = 0; idx < total; ++idx) {
        Point p(n);
        long t = idx;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = lo[i] + static_cast<int>(t % ext[i]);
            t /= ext[i];
        }
        out.insert({p, normal});
    }
    return out;
}

// (n-1)-dimensional cubical complex on a set of unit faces.
inline Complex face_complex(int n, const std::set<UnitFace>& F)
{
    Complex C(n - 1, Mode::cubical);
    std::map<Point, int> id;
    std::set<Point> pts;
    std::vector<std::vector<Point>> charts;
    for (const auto& [lo, a] : F) {
        std::vector<int> axes;
        for (int i = 0; i < n; ++i)
            if (i != a) axes.push_back(i);
        std::vector<Point> ch;
        for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
            Point p = lo;
            for (int t = 0; t < n - 1; ++t)
                if (mask >> t & 1) p[static_cast<std::size_t>(axes[static_cast<std::size_t>(t)])] += 1;
            ch.push_back(p);
            pts.insert(p);
        }
        charts.push_back(std::move(ch));
    }
    for (const auto& p : pts) {
        int v = static_cast<int>(id.size());
        id[p] = v;
        C.add_vertex(v, std::vector<double>(p.begin(), p.end()));
    }
    for (const auto& ch : charts) {
        std::vector<int> c;
        for (const auto& p : ch) c.push_back(id.at(p));
        C.add_cube(c);
    }
    return C;
}

// Number of top simplices in the canonical triangulation.
inline long triangulated_count(int n, const std::set<UnitFace>& F)
{
    if (F.empty()) return 0;
    return static_cast<long>(canonical_triangulation(face_complex(n, F)).complex.count(n - 1));
}

// Validates a molecule and derives the order, levels data and face kinds.
// Errors: NotACell, IllegalIntersection, NotAPartition, BadAttachment,
// DuplicateMaxAtom, NoLeadingFace, NotATree.
inline Molecule build_molecule(const MoleculeSpec& spec)
{
    Molecule M;
    M.spec = spec;
    M.n = spec.n;
    const int n = spec.n;
    if (spec.atoms.empty()) fail("NotACell", "molecule has no atoms");
    for (std::size_t a = 0; a < spec.atoms.size(); ++a) {
        const AtomSpec& A = spec.atoms[a];
        if (A.cubes.empty()) fail("NotACell", "atom " + std::to_string(a) + " is empty");
        for (const auto& p : A.cubes) {
            if (static_cast<int>(p.size()) != n) fail("MalformedCell", "cube corner has wrong dimension");
            M.cubes.push_back({p, static_cast<int>(detail::pow3(A.rho)), static_cast<int>(a)});
        }
    }
    // (5) unique atom of largest index
    int best = -1;
    M.leading_atom = 0;
    for (std::size_t a = 0; a < spec.atoms.size(); ++a) {
        if (spec.atoms[a].rho > best) {
            best = spec.atoms[a].rho;
            M.leading_atom = static_cast<int>(a);
        }
    }
    for (std::size_t a = 0; a < spec.atoms.size(); ++a)
        if (spec.atoms[a].rho == best && static_cast<int>(a) != M.leading_atom)
            fail("DuplicateMaxAtom", "two atoms have the largest refinement index");
    const std::size_t N = M.cubes.size();
    std::vector<Box> box(N);
    for (std::size_t i = 0; i < N; ++i) box[i] = M.cubes[i].box();

    // (1) essential partition, plus atoms as cubical complexes
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = i + 1; k < N; ++k) {
            auto I = intersect(box[i], box[k]);
            if (!I) continue;
            if (I->dim() == n) fail("NotAPartition", "cubes " + std::to_string(i) + " and " + std::to_string(k) + " overlap");
            if (M.cubes[i].atom == M.cubes[k].atom) {
                const int s = M.cubes[i].side;
                for (int x = 0; x < n; ++x) {
                    int d = std::abs(M.cubes[i].lo[static_cast<std::size_t>(x)] - M.cubes[k].lo[static_cast<std::size_t>(x)]);
                    if (d != 0 && d != s) fail("IllegalIntersection", "cubes of one atom meet in a partial face");
                }
            }
            if (I->dim() == n - 1) edges.push_back({static_cast<int>(i), static_cast<int>(k)});
        }
    for (std::size_t a = 0; a < spec.atoms.size(); ++a) {
        std::vector<int> ids;
        for (std::size_t i = 0; i < N; ++i)
            if (M.cubes[i].atom == static_cast<int>(a)) ids.push_back(static_cast<int>(i));
        std::map<int, int> local;
        for (std::size_t t = 0; t < ids.size(); ++t) local[ids[t]] = static_cast<int>(t);
        std::vector<std::pair<int, int>> e;
        for (auto [x, y] : edges)
            if (local.count(x) && local.count(y)) e.push_back({local[x], local[y]});
        if (!detail::is_tree(ids.size(), e)) fail("NotATree", "atom " + std::to_string(a) + " adjacency graph is not a tree");
        Complex C = lattice_complex(n, spec.atoms[a].cubes, static_cast<int>(detail::pow3(spec.atoms[a].rho)));
        if (!is_cell(C)) fail("NotACell", "atom " + std::to_string(a) + " is not a cell");
    }
    if (!detail::is_tree(N, edges)) fail("NotATree", "cube adjacency graph of the molecule is not a tree");

    // (3) meeting atoms
    const std::size_t na = spec.atoms.size();
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < na; ++b) {
            if (a >= b) continue;
            std::vector<Box> pieces;
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t k = 0; k < N; ++k) {
                    if (M.cubes[i].atom != static_cast<int>(a) || M.cubes[k].atom != static_cast<int>(b)) continue;
                    if (auto I = intersect(box[i], box[k])) pieces.push_back(*I);
                }
            if (pieces.empty()) continue;
            const int ra = spec.atoms[a].rho, rb = spec.atoms[b].rho;
            if (ra == rb) fail("BadAttachment", "atoms " + std::to_string(a) + " and " + std::to_string(b) + " meet with equal refinement index");
            const int small = ra < rb ? static_cast<int>(a) : static_cast<int>(b);
            const int big = ra < rb ? static_cast<int>(b) : static_cast<int>(a);
            const long ss = detail::pow3(spec.atoms[static_cast<std::size_t>(small)].rho);
            Box hull = pieces[0];
            for (const auto& p : pieces)
                for (int x = 0; x < n; ++x) {
                    auto xi = static_cast<std::size_t>(x);
                    hull.lo[xi] = std::min(hull.lo[xi], p.lo[xi]);
                    hull.hi[xi] = std::max(hull.hi[xi], p.hi[xi]);
                }
            bool full_face = false;
            for (std::size_t i = 0; i < N && !full_face; ++i) {
                if (M.cubes[i].atom != small) continue;
                for (int x = 0; x < n; ++x)
                    for (int s = 0; s < 2; ++s) full_face = full_face || M.cubes[i].face(x, s) == hull;
            }
            long covered = 0;
            for (const auto& p : pieces)
                if (p.dim() == n - 1) covered += p.measure();
            if (!full_face || covered != hull.measure())
                fail("BadAttachment", "intersection of atoms " + std::to_string(a) + " and " + std::to_string(b) + " is not a face of the smaller atom");
            bool aligned = false;
            for (std::size_t i = 0; i < N && !aligned; ++i) {
                if (M.cubes[i].atom != big) continue;
                for (int x = 0; x < n; ++x)
                    for (int s = 0; s < 2; ++s) {
                        Box f = M.cubes[i].face(x, s);
                        if (!f.contains(hull)) continue;
                        bool ok = true;
                        for (int y = 0; y < n; ++y)
                            ok = ok && (hull.lo[static_cast<std::size_t>(y)] - f.lo[static_cast<std::size_t>(y)]) % ss == 0;
                        aligned = aligned || ok;
                    }
            }
            if (!aligned) fail("BadAttachment", "attaching face is not a cube of a refinement of a face of the larger atom");
        }

    // (4) at most one other atom meets each face
    for (std::size_t i = 0; i < N; ++i)
        for (int x = 0; x < n; ++x)
            for (int s = 0; s < 2; ++s) {
                Box f = M.cubes[i].face(x, s);
                std::set<int> others;
                for (std::size_t k = 0; k < N; ++k)
                    if (M.cubes[k].atom != M.cubes[i].atom && intersect(f, box[k])) others.insert(M.cubes[k].atom);
                if (others.size() > 1) fail("BadAttachment", "a face of cube " + std::to_string(i) + " meets two other atoms");
            }

    // (5) leading face on the boundary
    M.varrho = best;
    auto on_boundary = [&](int q, int x, int s) {
        Box f = M.cubes[static_cast<std::size_t>(q)].face(x, s);
        for (std::size_t k = 0; k < N; ++k) {
            if (static_cast<int>(k) == q) continue;
            auto I = intersect(f, box[k]);
            if (I && I->dim() == n - 1) return false;
        }
        return true;
    };
    if (spec.leading) {
        const FaceRef& L = *spec.leading;
        if (L.cube < 0 || static_cast<std::size_t>(L.cube) >= N || M.cubes[static_cast<std::size_t>(L.cube)].atom != M.leading_atom ||
            !on_boundary(L.cube, L.axis, L.side))
            fail("NoLeadingFace", "designated leading face is not a boundary face of the leading atom");
        M.leading = L;
    } else {
        std::optional<std::pair<Box, FaceRef>> pick;
        for (std::size_t i = 0; i < N; ++i) {
            if (M.cubes[i].atom != M.leading_atom) continue;
            for (int x = 0; x < n; ++x)
                for (int s = 0; s < 2; ++s) {
                    if (!on_boundary(static_cast<int>(i), x, s)) continue;
                    Box f = M.cubes[i].face(x, s);
                    FaceRef r{static_cast<int>(i), x, s};
                    if (!pick || std::tie(f.lo, x) < std::tie(pick->first.lo, pick->second.axis)) pick = {f, r};
                }
        }
        if (!pick) fail("NoLeadingFace", "leading atom has no face on the boundary");
        M.leading = pick->second;
    }

    // the order, rooted at Q+_M
    M.parent.assign(N, -1);
    M.children.assign(N, {});
    M.depth.assign(N, 0);
    M.lead.assign(N, Box{});
    std::vector<std::vector<int>> adj(N);
    for (auto [x, y] : edges) {
        adj[static_cast<std::size_t>(x)].push_back(y);
        adj[static_cast<std::size_t>(y)].push_back(x);
    }
    const int root = M.leading.cube;
    std::vector<char> seen(N, 0);
    std::queue<int> bfs;
    bfs.push(root);
    seen[static_cast<std::size_t>(root)] = 1;
    M.lead[static_cast<std::size_t>(root)] = M.cubes[static_cast<std::size_t>(root)].face(M.leading.axis, M.leading.side);
    while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            auto vi = static_cast<std::size_t>(v);
            if (seen[vi]) continue;
            seen[vi] = 1;
            M.parent[vi] = u;
            M.children[static_cast<std::size_t>(u)].push_back(v);
            M.depth[vi] = M.depth[static_cast<std::size_t>(u)] + 1;
            M.lead[vi] = *intersect(box[static_cast<std::size_t>(u)], box[vi]);
            bfs.push(v);
        }
    }
    for (auto& c : M.children) std::sort(c.begin(), c.end());
    M.atom_root.assign(na, -1);
    M.j.assign(N, 0);
    std::vector<int> by_depth = all_cubes(M);
    std::stable_sort(by_depth.begin(), by_depth.end(), [&](int a, int b) { return M.depth[static_cast<std::size_t>(a)] < M.depth[static_cast<std::size_t>(b)]; });
    for (int q : by_depth) {
        auto qi = static_cast<std::size_t>(q);
        int p = M.parent[qi];
        if (p >= 0 && M.cubes[static_cast<std::size_t>(p)].atom == M.cubes[qi].atom) {
            M.j[qi] = M.j[static_cast<std::size_t>(p)] + 1;
            continue;
        }
        auto a = static_cast<std::size_t>(M.cubes[qi].atom);
        if (M.atom_root[a] >= 0) fail("NotATree", "atom is not a subtree of the molecule order");
        M.atom_root[a] = q;
        if (p >= 0) {
            if (spec.atoms[a].rho >= M.rho(p))
                fail("BadAttachment", "atom " + std::to_string(a) + " is attached to an atom of smaller index");
            bool face = false;
            for (int x = 0; x < n; ++x)
                for (int s = 0; s < 2; ++s) face = face || M.cubes[qi].face(x, s) == M.lead[qi];
            if (!face) fail("BadAttachment", "leading face of atom " + std::to_string(a) + " is not a full face");
        }
    }
    M.ell = 1;
    for (const auto& A : spec.atoms) M.ell = std::max(M.ell, static_cast<int>(A.cubes.size()));

    // face kinds
    M.kinds.assign(N, std::vector<unsigned>(static_cast<std::size_t>(2 * n), 0));
    for (std::size_t i = 0; i < N; ++i)
        for (int x = 0; x < n; ++x)
            for (int s = 0; s < 2; ++s) {
                Box f = M.cubes[i].face(x, s);
                unsigned& k = M.kinds[i][static_cast<std::size_t>(2 * x + s)];
                if (f == M.lead[i]) k |= leading_face;
                if (on_boundary(static_cast<int>(i), x, s)) k |= exterior_face;
                for (int c : M.children[i]) {
                    if (!f.contains(M.lead[static_cast<std::size_t>(c)])) continue;
                    k |= M.cubes[static_cast<std::size_t>(c)].atom == M.cubes[i].atom ? back_first : back_second;
                }
            }

    // |M| is a cell
    if (!is_cell(molecule_complex(M))) fail("NotACell", "space of the molecule is not a cell");
    return M;
}

// lambda * ell on the center of the leading face of each cube, by rules
// (2)-(3) from the leading cubes downwards.  The value on the boundary
// minus the leading face is 0.
inline std::vector<long> level_top_down(const Molecule& M)
{
    std::vector<long> lam(M.cubes.size(), 0);
    std::vector<int> order = all_cubes(M);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return M.depth[static_cast<std::size_t>(a)] < M.depth[static_cast<std::size_t>(b)]; });
    for (int q : order) {
        auto qi = static_cast<std::size_t>(q);
        int p = M.parent[qi];
        if (p >= 0 && M.cubes[static_cast<std::size_t>(p)].atom == M.cubes[qi].atom) lam[qi] = lam[static_cast<std::size_t>(p)] - 1;
        else lam[qi] = static_cast<long>(M.rho(q)) * M.ell;
    }
    return lam;
}

// The same values recomputed from the leaves of each atom: a cube at distance
// j below its atom's leading cube has level rho - j/ell, and each step up adds
// 1/ell.  Throws InconsistentLevels if two leaves disagree.
inline std::vector<long> level_bottom_up(const Molecule& M)
{
    const std::size_t N = M.cubes.size();
    std::vector<std::optional<long>> lam(N);
    for (std::size_t q = 0; q < N; ++q) {
        bool leaf = true;
        for (int c : M.children[q]) leaf = leaf && M.cubes[static_cast<std::size_t>(c)].atom != M.cubes[q].atom;
        if (!leaf) continue;
        int steps = 0;
        int u = static_cast<int>(q);
        while (M.parent[static_cast<std::size_t>(u)] >= 0 &&
               M.cubes[static_cast<std::size_t>(M.parent[static_cast<std::size_t>(u)])].atom == M.cubes[q].atom) {
            u = M.parent[static_cast<std::size_t>(u)];
            ++steps;
        }
        long v = static_cast<long>(M.rho(static_cast<int>(q))) * M.ell - steps;
        u = static_cast<int>(q);
        for (;;) {
            auto ui = static_cast<std::size_t>(u);
            if (lam[ui] && *lam[ui] != v) fail("InconsistentLevels", "level of cube " + std::to_string(u) + " is not unique");
            lam[ui] = v;
            int p = M.parent[ui];
            if (p < 0 || M.cubes[static_cast<std::size_t>(p)].atom != M.cubes[q].atom) break;
            u = p;
            ++v;
        }
    }
    std::vector<long> out(N);
    for (std::size_t q = 0; q < N; ++q) out[q] = *lam[q];
    return out;
}

struct ExpansionIndex {
    long nu = 0;
    long boundary_count = 0; // simplices of (M|_{d tau(Q) \ q+})^Delta
    long leading_count = 0;  // simplices of (M|_{q+})^Delta
    long center_count = 0;   // simplices of (Ref(M)|_{c(q+)})^Delta
};

inline ExpansionIndex expansion_index(const Molecule& M, int q)
{
    if (q < 0 || static_cast<std::size_t>(q) >= M.cubes.size()) fail("CubeNotInMolecule", "cube " + std::to_string(q));
    const int n = M.n;
    const Box& lead = M.lead[static_cast<std::size_t>(q)];
    auto bf = boundary_faces(unit_cubes(M, M.tail(q)), n);
    auto in_lead = faces_in(bf, lead);
    std::set<UnitFace> rest;
    for (const auto& f : bf)
        if (!in_lead.count(f)) rest.insert(f);
    ExpansionIndex e;
    e.boundary_count = triangulated_count(n, rest);
    e.leading_count = triangulated_count(n, unit_faces_of(lead, 1));
    // center of Ref(q+): the middle third on every face axis, at scale 3
    Box c{lead.lo, lead.hi};
    for (std::size_t i = 0; i < c.lo.size(); ++i) {
        c.lo[i] *= 3;
        c.hi[i] *= 3;
        if (c.lo[i] < c.hi[i]) {
            int side = (c.hi[i] - c.lo[i]) / 3;
            c.lo[i] += side;
            c.hi[i] -= side;
        }
    }
    e.center_count = triangulated_count(n, unit_faces_of(c, 1));
    e.nu = e.boundary_count - e.leading_count;
    return e;
}

// #(M|_{|tau(Q)| \cap d|M|})^{(n-1)} over #(M|_{q+_Q})^{(n-1)}.
inline double tail_boundary_ratio(const Molecule& M, int q)
{
    auto all = boundary_faces(unit_cubes(M, all_cubes(M)), M.n);
    auto tail = boundary_faces(unit_cubes(M, M.tail(q)), M.n);
    long num = 0;
    for (const auto& f : tail) num += all.count(f) ? 1 : 0;
    long den = static_cast<long>(unit_faces_of(M.lead[static_cast<std::size_t>(q)], 1).size());
    return static_cast<double>(num) / static_cast<double>(den);
}

// Shift every refinement index by `by`, scaling positions so the molecule
// keeps its shape.
inline MoleculeSpec shift_indices(const MoleculeSpec& s, int by)
{
    MoleculeSpec out = s;
    const long f = detail::pow3(by);
    for (auto& A : out.atoms) {
        A.rho += by;
        for (auto& p : A.cubes)
            for (auto& x : p) x = static_cast<int>(x * f);
    }
    return out;
}

// Random valid molecule: a leading atom of index `top` and atoms of
// decreasing index attached at the centers of exterior faces.
inline MoleculeSpec random_molecule(std::mt19937& rng, int n, int top, int max_atoms, int max_len)
{
    for (;;) {
        MoleculeSpec spec;
        spec.n = n;
        auto grow = [&](AtomSpec& A) {
            const int s = static_cast<int>(detail::pow3(A.rho));
            const int len = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_len));
            for (int tries = 0; static_cast<int>(A.cubes.size()) < len && tries < 20; ++tries) {
                Point p = A.cubes[rng() % A.cubes.size()];
                int axis = static_cast<int>(rng() % static_cast<unsigned>(n));
                p[static_cast<std::size_t>(axis)] += (rng() % 2) ? s : -s;
                if (std::find(A.cubes.begin(), A.cubes.end(), p) == A.cubes.end()) A.cubes.push_back(p);
            }
        };
        AtomSpec plus{top, {Point(static_cast<std::size_t>(n), 0)}};
        grow(plus);
        spec.atoms.push_back(plus);
        const int extra = static_cast<int>(rng() % static_cast<unsigned>(max_atoms));
        for (int t = 0; t < extra; ++t) {
            // attach to a random cube of a random atom with larger index
            const auto& host = spec.atoms[rng() % spec.atoms.size()];
            if (host.rho == 0) continue;
            const int hs = static_cast<int>(detail::pow3(host.rho));
            const int rho = host.rho - 1;
            const int cs = hs / 3;
            Point base = host.cubes[rng() % host.cubes.size()];
            int axis = static_cast<int>(rng() % static_cast<unsigned>(n));
            int side = static_cast<int>(rng() % 2);
            Point p = base;
            for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] += cs;
            p[static_cast<std::size_t>(axis)] = base[static_cast<std::size_t>(axis)] + (side ? hs : -cs);
            AtomSpec A{rho, {p}};
            if (rho > 0) grow(A);
            spec.atoms.push_back(A);
        }
        try {
            build_molecule(spec);
            return spec;
        } catch (const Error&) {
        }
    }
}

} // namespace cellkit
