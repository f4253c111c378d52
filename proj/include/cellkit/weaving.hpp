#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cellkit/complex.hpp"

namespace cellkit {

// Cyclic cell partition E_1..E_p of S^n.  Face F_k = E_k n E_{k+1 mod p}, so
// E_c has the faces F_c (sign +) and F_{c-1} (sign -).  For p = 2 both cells
// share F_1 and F_2.
struct CyclicPartition {
    int p = 2;

    static CyclicPartition make(int p)
    {
        if (p < 2) fail("BadArgument", "a cyclic partition needs p >= 2");
        return CyclicPartition{p};
    }
    int prev(int c) const { return c == 1 ? p : c - 1; }
    int next(int c) const { return c == p ? 1 : c + 1; }
    // the two cells meeting along F_k
    std::pair<int, int> cells_of(int k) const { return {k, next(k)}; }
    int face(int c, int sign) const { return sign > 0 ? c : prev(c); }
    int other_face(int c, int f) const { return f == c ? prev(c) : c; }

    int sign(int c, int f) const
    {
        if (c < 1 || c > p) fail("InconsistentFaces", "color " + std::to_string(c) + " out of range");
        if (f == c) return +1;
        if (f == prev(c)) return -1;
        fail("InconsistentFaces", "F_" + std::to_string(f) + " is not a face of E_" + std::to_string(c));
    }
};

// r_sigma: number of cells of the partition in D_sigma.  D_sigma is reached by
// walking the cycle from f_i away from E_{c(i)} until f_j.
inline int rank_sigma(int ci, int fi, int cj, int fj, int p)
{
    const auto E = CyclicPartition::make(p);
    const int si = E.sign(ci, fi);
    const int sj = E.sign(cj, fj);
    if (si == sj) fail("InconsistentFaces", "the two images of a simplex must carry opposite signs");
    const int steps = si > 0 ? fj - fi : fi - fj;
    return ((steps % p) + p) % p;
}

struct SigmaImage {
    int i = -1, j = -1;          // pieces on the two sides
    int face_i = 0, face_j = 0;  // F_k indices
    int sign_i = 0, sign_j = 0;  // 0 means derive from the face
};

// Combinatorial Alexander sketch: colored pieces and a boundary complex whose
// top simplices carry the two face images.
struct SketchSpec {
    int p = 2;
    std::vector<int> colors;        // piece -> 1..p
    Complex boundary;               // dimension n-1
    std::map<int, SigmaImage> images; // top simplex id -> images
};

inline void validate_sketch(const SketchSpec& S)
{
    const auto E = CyclicPartition::make(S.p);
    const int m = static_cast<int>(S.colors.size());
    for (int c : S.colors)
        if (c < 1 || c > S.p) fail("InconsistentFaces", "piece color out of range");
    const int d = S.boundary.dimension();
    for (int s : S.boundary.cells_of_dim(d)) {
        auto it = S.images.find(s);
        if (it == S.images.end()) fail("InconsistentFaces", "simplex " + std::to_string(s) + " has no face images");
        const auto& g = it->second;
        if (g.i < 0 || g.j < 0 || g.i >= m || g.j >= m || g.i == g.j)
            fail("InconsistentFaces", "simplex " + std::to_string(s) + " needs two distinct pieces");
        const int ci = S.colors[static_cast<std::size_t>(g.i)];
        const int cj = S.colors[static_cast<std::size_t>(g.j)];
        const int si = E.sign(ci, g.face_i);
        const int sj = E.sign(cj, g.face_j);
        if ((g.sign_i && g.sign_i != si) || (g.sign_j && g.sign_j != sj))
            fail("InconsistentFaces", "recorded sign disagrees with the face of simplex " + std::to_string(s));
        if (si == sj) fail("InconsistentFaces", "images of simplex " + std::to_string(s) + " have equal signs");
    }
    for (auto& [s, g] : S.images)
        if (s < 0 || static_cast<std::size_t>(s) >= S.boundary.size() || S.boundary.cell(s).dim != d)
            fail("InconsistentFaces", "image recorded for a non-top cell");
    // f_k alternates across (n-2)-faces inside each piece
    if (d < 1) return;
    for (int t : S.boundary.cells_of_dim(d - 1)) {
        std::vector<int> around;
        for (int s : S.boundary.cofaces(t))
            if (S.boundary.cell(s).dim == d) around.push_back(s);
        for (std::size_t a = 0; a < around.size(); ++a)
            for (std::size_t b = a + 1; b < around.size(); ++b) {
                const auto& x = S.images.at(around[a]);
                const auto& y = S.images.at(around[b]);
                auto img = [](const SigmaImage& g, int piece) { return piece == g.i ? g.face_i : piece == g.j ? g.face_j : 0; };
                for (int piece : {x.i, x.j})
                    if ((piece == y.i || piece == y.j) && img(x, piece) == img(y, piece))
                        fail("InconsistentFaces", "piece " + std::to_string(piece) + " maps adjacent simplices to the same face");
            }
    }
}

struct RankMap {
    std::map<int, int> r_sigma;
    std::map<int, int> rank; // r = 2p + r_sigma
    long pairs_checked = 0;
};

// Ranks of all top simplices, checking r + r' + 2 = 0 mod p for adjacent
// simplices between the same two pieces.
inline RankMap rank_function(const SketchSpec& S)
{
    validate_sketch(S);
    RankMap R;
    const int d = S.boundary.dimension();
    for (const auto& [s, g] : S.images) {
        const int ci = S.colors[static_cast<std::size_t>(g.i)];
        const int cj = S.colors[static_cast<std::size_t>(g.j)];
        R.r_sigma[s] = rank_sigma(ci, g.face_i, cj, g.face_j, S.p);
        R.rank[s] = 2 * S.p + R.r_sigma[s];
    }
    if (d < 1) return R;
    for (int t : S.boundary.cells_of_dim(d - 1)) {
        std::vector<int> around;
        for (int s : S.boundary.cofaces(t))
            if (S.boundary.cell(s).dim == d) around.push_back(s);
        for (std::size_t a = 0; a < around.size(); ++a)
            for (std::size_t b = a + 1; b < around.size(); ++b) {
                const auto& x = S.images.at(around[a]);
                const auto& y = S.images.at(around[b]);
                if (std::minmax(x.i, x.j) != std::minmax(y.i, y.j)) continue;
                ++R.pairs_checked;
                if ((R.rank[around[a]] + R.rank[around[b]] + 2) % S.p != 0)
                    fail("InconsistentFaces", "rank identity fails for adjacent simplices");
            }
    }
    return R;
}

struct Incidence {
    int a = -1, b = -1;
    int simplex = -1; // common (n-2)-simplex
};

struct Sphericalization {
    int m = 0;
    int m_prime = 0;
    std::vector<int> colors;                 // all pieces, originals first
    std::map<int, std::vector<int>> pieces;  // simplex -> G_{sigma,1..r-1}
    std::vector<Incidence> incidence;        // same-color pieces sharing an (n-2)-simplex
};

// m' = m + sum (r(sigma) - 1).  G_{sigma,k} gets color c(i) + k in the walking
// direction of sigma.  The (n-2)-skeleton is unchanged, so every piece around
// sigma contains each (n-2)-face of sigma.
inline Sphericalization sphericalize_counts(const SketchSpec& S, const RankMap& R)
{
    const auto E = CyclicPartition::make(S.p);
    Sphericalization out;
    out.m = static_cast<int>(S.colors.size());
    out.colors = S.colors;
    const int d = S.boundary.dimension();
    std::map<int, std::set<int>> around; // (n-2)-simplex -> pieces containing it
    for (const auto& [s, g] : S.images) {
        const int ci = S.colors[static_cast<std::size_t>(g.i)];
        const int dir = E.sign(ci, g.face_i);
        std::vector<int> ids;
        int c = ci;
        for (int k = 1; k < R.rank.at(s); ++k) {
            c = dir > 0 ? E.next(c) : E.prev(c);
            ids.push_back(static_cast<int>(out.colors.size()));
            out.colors.push_back(c);
        }
        if (d >= 1)
            for (int t : S.boundary.cell(s).faces) {
                auto& at = around[t];
                at.insert(g.i);
                at.insert(g.j);
                at.insert(ids.begin(), ids.end());
            }
        out.pieces[s] = std::move(ids);
    }
    out.m_prime = static_cast<int>(out.colors.size());
    for (const auto& [t, ps] : around) {
        std::vector<int> v(ps.begin(), ps.end());
        for (std::size_t a = 0; a < v.size(); ++a)
            for (std::size_t b = a + 1; b < v.size(); ++b)
                if (out.colors[static_cast<std::size_t>(v[a])] == out.colors[static_cast<std::size_t>(v[b])])
                    out.incidence.push_back({v[a], v[b], t});
    }
    return out;
}

struct ForestEdge {
    int parent = -1, child = -1;
    int designated = -1; // smallest common (n-2)-simplex
};

struct NeighborlyForest {
    std::vector<int> root_of;  // piece -> its root
    std::vector<int> parent;   // -1 at roots
    std::vector<ForestEdge> edges;
    std::vector<int> roots;
};

// R-forest of the neighborly graph: same-color pieces sharing an (n-2)-simplex
// are neighbors; a multi-source BFS from the roots spans every color class.
inline NeighborlyForest neighborly_forest(const std::vector<int>& colors, const std::vector<Incidence>& incidence, const std::vector<int>& roots)
{
    const std::size_t N = colors.size();
    std::map<std::pair<int, int>, int> designated;
    std::vector<std::vector<int>> adj(N);
    for (const auto& e : incidence) {
        if (e.a < 0 || e.b < 0 || static_cast<std::size_t>(e.a) >= N || static_cast<std::size_t>(e.b) >= N)
            fail("BadArgument", "incidence references an unknown piece");
        if (e.a == e.b || colors[static_cast<std::size_t>(e.a)] != colors[static_cast<std::size_t>(e.b)]) continue;
        auto key = std::minmax(e.a, e.b);
        auto it = designated.find(key);
        if (it == designated.end()) {
            designated[key] = e.simplex;
            adj[static_cast<std::size_t>(e.a)].push_back(e.b);
            adj[static_cast<std::size_t>(e.b)].push_back(e.a);
        } else {
            it->second = std::min(it->second, e.simplex);
        }
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    NeighborlyForest F;
    F.root_of.assign(N, -1);
    F.parent.assign(N, -1);
    std::queue<int> q;
    for (int r : roots) {
        if (r < 0 || static_cast<std::size_t>(r) >= N) fail("BadArgument", "unknown root piece");
        if (F.root_of[static_cast<std::size_t>(r)] != -1) continue;
        F.root_of[static_cast<std::size_t>(r)] = r;
        F.roots.push_back(r);
        q.push(r);
    }
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (F.root_of[static_cast<std::size_t>(v)] != -1) continue;
            F.root_of[static_cast<std::size_t>(v)] = F.root_of[static_cast<std::size_t>(u)];
            F.parent[static_cast<std::size_t>(v)] = u;
            F.edges.push_back({u, v, designated.at(std::minmax(u, v))});
            q.push(v);
        }
    }
    for (std::size_t v = 0; v < N; ++v)
        if (F.root_of[v] == -1)
            fail("ColorComponentWithoutRoot", "piece " + std::to_string(v) + " of color " + std::to_string(colors[v]) + " reaches no root");
    return F;
}

inline std::string forest_dot(const NeighborlyForest& F, const std::vector<int>& colors)
{
    std::ostringstream o;
    o << "graph forest {\n";
    for (std::size_t v = 0; v < F.root_of.size(); ++v) {
        o << "  p" << v << " [label=\"" << v << "\" color=" << colors[v];
        if (F.root_of[v] == static_cast<int>(v)) o << " shape=box";
        o << "];\n";
    }
    for (const auto& e : F.edges) o << "  p" << e.parent << " -- p" << e.child << " [label=\"" << e.designated << "\"];\n";
    o << "}\n";
    return o.str();
}

struct DegreeTable {
    std::vector<long> degree; // per target 1..p, index 0 unused
    bool consistent = true;
    std::vector<long> padding; // simple covers needed to reach the largest degree
};

inline DegreeTable boundary_degree_table(const std::vector<int>& assignment, const std::vector<long>& degrees, int p)
{
    if (assignment.size() != degrees.size()) fail("BadArgument", "one degree per piece");
    DegreeTable T;
    T.degree.assign(static_cast<std::size_t>(p + 1), 0);
    std::vector<char> hit(static_cast<std::size_t>(p + 1), 0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        int c = assignment[i];
        if (c < 1 || c > p) fail("BadArgument", "target out of range");
        T.degree[static_cast<std::size_t>(c)] += degrees[i];
        hit[static_cast<std::size_t>(c)] = 1;
    }
    for (int c = 1; c <= p; ++c)
        if (!hit[static_cast<std::size_t>(c)]) fail("NotSurjective", "no piece maps to target " + std::to_string(c));
    const long top = *std::max_element(T.degree.begin() + 1, T.degree.end());
    T.padding.assign(static_cast<std::size_t>(p + 1), 0);
    for (int c = 1; c <= p; ++c) {
        T.padding[static_cast<std::size_t>(c)] = top - T.degree[static_cast<std::size_t>(c)];
        if (T.padding[static_cast<std::size_t>(c)] != 0) T.consistent = false;
    }
    return T;
}

// A sketch on a planar picture: a disk cut into sectors (inner pieces) inside
// an annulus cut into sectors (outer pieces), meeting along a cycle of an even
// number of edges.  Images alternate along the cycle.
inline SketchSpec random_sketch(std::mt19937& rng, int p, int max_pieces)
{
    if (max_pieces < std::max(2, p)) fail("BadArgument", "too few pieces for the colors");
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int m = pick(std::max(2, p), max_pieces);
    const int inner = pick(1, m - 1);
    const int outer = m - inner;
    const int L = 2 * pick(std::max(inner, outer), std::max(inner, outer) + 4);
    SketchSpec S;
    S.p = p;
    const auto E = CyclicPartition::make(p);
    std::vector<int> cs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) cs[static_cast<std::size_t>(i)] = i < p ? i + 1 : pick(1, p);
    std::shuffle(cs.begin(), cs.end(), rng);
    S.colors = cs;
    // cut the cycle into arcs, every piece gets at least one arc
    auto arcs = [&](int count, int offset) {
        std::vector<int> cut(static_cast<std::size_t>(L - 1));
        for (int i = 0; i < L - 1; ++i) cut[static_cast<std::size_t>(i)] = i + 1;
        std::shuffle(cut.begin(), cut.end(), rng);
        cut.resize(static_cast<std::size_t>(count - 1));
        std::sort(cut.begin(), cut.end());
        std::vector<int> owner(static_cast<std::size_t>(L));
        int a = 0;
        for (int e = 0; e < L; ++e) {
            while (a < count - 1 && cut[static_cast<std::size_t>(a)] <= e) ++a;
            owner[static_cast<std::size_t>(e)] = offset + a;
        }
        return owner;
    };
    auto in = arcs(inner, 0);
    auto out = arcs(outer, inner);
    S.boundary = Complex(1, Mode::simplicial);
    for (int v = 0; v < L; ++v) S.boundary.add_vertex(v);
    for (int e = 0; e < L; ++e) {
        int s = S.boundary.add_simplex({e, (e + 1) % L});
        SigmaImage g;
        g.i = in[static_cast<std::size_t>(e)];
        g.j = out[static_cast<std::size_t>(e)];
        const int ci = S.colors[static_cast<std::size_t>(g.i)];
        const int cj = S.colors[static_cast<std::size_t>(g.j)];
        g.sign_i = e % 2 == 0 ? +1 : -1;
        g.sign_j = -g.sign_i;
        g.face_i = E.face(ci, g.sign_i);
        g.face_j = E.face(cj, g.sign_j);
        S.images[s] = g;
    }
    return S;
}

} // namespace cellkit
