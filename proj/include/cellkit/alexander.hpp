#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "cellkit/complex.hpp"
#include "cellkit/triangulation.hpp"

namespace cellkit {

// Vertex labels 0..n (standing for w_0..w_n) and a +/-1 parity per n-simplex.
struct AlexanderLabeling {
    Complex complex;
    std::map<int, int> label;
    std::map<int, int> parity;
};

namespace detail {

inline std::vector<int> top_cofaces(const Complex& K, int face)
{
    std::vector<int> out;
    for (int c : K.cofaces(face))
        if (K.cell(c).dim == K.dimension()) out.push_back(c);
    return out;
}

} // namespace detail

// Two-color the top simplices; each component is seeded by its
// lexicographically smallest simplex, which gets +1.
inline std::map<int, int> compute_parity(const Complex& K)
{
    const int n = K.dimension();
    std::vector<int> tops = K.cells_of_dim(n);
    std::sort(tops.begin(), tops.end(), [&](int a, int b) {
        if (K.cell(a).verts != K.cell(b).verts) return K.cell(a).verts < K.cell(b).verts;
        return a < b;
    });
    std::map<int, int> par;
    for (int seed : tops) {
        if (par.count(seed)) continue;
        par[seed] = 1;
        std::deque<int> q{seed};
        while (!q.empty()) {
            int s = q.front();
            q.pop_front();
            for (int f : K.cell(s).faces) {
                for (int t : detail::top_cofaces(K, f)) {
                    if (t == s) continue;
                    auto it = par.find(t);
                    if (it == par.end()) {
                        par[t] = -par[s];
                        q.push_back(t);
                    } else if (it->second == par[s]) {
                        fail("OddCycle", "adjacency graph of top simplices is not bipartite");
                    }
                }
            }
        }
    }
    return par;
}

inline void check_labels(const Complex& K, const std::map<int, int>& label)
{
    const int n = K.dimension();
    for (int v : K.vertex_ids())
        if (!label.count(v)) fail("LabelClash", "vertex " + std::to_string(v) + " has no label");
    for (int s : K.cells_of_dim(n)) {
        std::vector<bool> seen(static_cast<std::size_t>(n + 1), false);
        for (int v : K.cell(s).verts) {
            int l = label.at(v);
            if (l < 0 || l > n || seen[static_cast<std::size_t>(l)])
                fail("LabelClash", "simplex " + std::to_string(s) + " does not carry every label once");
            seen[static_cast<std::size_t>(l)] = true;
        }
    }
}

inline AlexanderLabeling alexander_label(Complex K, std::map<int, int> label)
{
    AlexanderLabeling L;
    L.parity = compute_parity(K);
    check_labels(K, label);
    L.complex = std::move(K);
    L.label = std::move(label);
    return L;
}

// Cubical rule: the center of a k-cube is labeled w_k.
inline AlexanderLabeling alexander_label(const Triangulation& tri)
{
    return alexander_label(tri.complex, tri.origin_dim);
}

inline long degree(const AlexanderLabeling& L)
{
    const Complex& K = L.complex;
    for (int f : K.cells_of_dim(K.dimension() - 1))
        if (detail::top_cofaces(K, f).size() != 2)
            fail("HasBoundary", "(n-1)-simplex " + std::to_string(f) + " is not shared by two n-simplices");
    long plus = 0, minus = 0;
    for (const auto& [_, p] : L.parity) (p > 0 ? plus : minus)++;
    if (plus != minus) fail("ParityImbalance", std::to_string(plus) + " vs " + std::to_string(minus));
    return plus;
}

// -- local structure at a vertex ----------------------------------------

inline std::set<int> star_cells(const Complex& K, int v)
{
    K.vertex_cell(v);
    return K.closure_of(K.incident(v));
}

// Cells of St(v) that avoid every vertex labeled t.
inline Complex reduced_star(const AlexanderLabeling& L, int v, std::optional<int> t_opt = std::nullopt)
{
    const Complex& K = L.complex;
    const int t = t_opt.value_or(K.dimension());
    if (L.label.at(v) == t) fail("BadCenterLabel", "center vertex carries the removed label");
    std::vector<int> keep;
    for (int c : star_cells(K, v)) {
        bool ok = true;
        for (int w : K.cell(c).verts) ok = ok && L.label.at(w) != t;
        if (ok) keep.push_back(c);
    }
    Complex R = subcomplex(K, keep);
    R.set_dimension(K.dimension() - 1);
    return R;
}

struct SimplePair {
    int first;
    int second;
    int shared_face;   // the common facet avoiding the removed label
};

inline std::vector<SimplePair> simple_pairs(const AlexanderLabeling& L, int v, std::optional<int> t_opt = std::nullopt)
{
    const Complex& K = L.complex;
    const int n = K.dimension();
    const int t = t_opt.value_or(n);
    if (L.label.at(v) == t) fail("BadCenterLabel", "center vertex carries the removed label");
    std::vector<int> tops;
    for (int c : K.incident(v))
        if (K.cell(c).dim == n) tops.push_back(c);
    std::sort(tops.begin(), tops.end());
    std::map<int, SimplePair> by_first;
    std::set<int> matched;
    std::vector<SimplePair> out;
    for (int s : tops) {
        if (matched.count(s)) continue;
        int face = -1;
        for (int f : K.cell(s).faces) {
            bool avoids = true;
            for (int w : K.cell(f).verts) avoids = avoids && L.label.at(w) != t;
            if (avoids) face = f;
        }
        if (face < 0) fail("UnmatchedSimplex", "simplex " + std::to_string(s) + " has no facet avoiding the label");
        auto co = detail::top_cofaces(K, face);
        int partner = -1;
        for (int c : co)
            if (c != s) partner = c;
        if (co.size() != 2 || partner < 0 || !has_vertex(K.cell(partner), v) || matched.count(partner))
            fail("UnmatchedSimplex", "simplex " + std::to_string(s) + " has no partner");
        matched.insert(s);
        matched.insert(partner);
        out.push_back({s, partner, face});
    }
    return out;
}

struct Leaf {
    int center;       // v_L
    int first;        // T
    int second;       // T'
    VertexList rib;   // vertex set of the shared facet of the simple pair
};

struct CloverComplex {
    int node = -1;
    Complex complex;              // the clover, weakly simplicial
    std::map<int, int> label;
    std::vector<Leaf> leaves;
    Complex midrib;               // one (n-1)-cell per leaf with its rim
};

// Abstract clover with one leaf per simple pair of St(v).  Each leaf is a
// pair of n-simplices on rib + {v_L} sharing the n facets through v_L.
inline CloverComplex clover_of(const AlexanderLabeling& L, int v, std::optional<int> t_opt = std::nullopt)
{
    const Complex& K = L.complex;
    const int n = K.dimension();
    const int t = t_opt.value_or(n);
    auto pairs = simple_pairs(L, v, t);
    CloverComplex C;
    C.node = v;
    C.complex = Complex(n, Mode::simplicial);
    C.midrib = Complex(n - 1, Mode::simplicial);

    int next = K.max_vertex_id() + 1;
    for (const auto& p : pairs) {
        const VertexList& rib = K.cell(p.shared_face).verts;
        for (int w : rib) {
            C.complex.add_vertex(w, K.has_coords(w) ? K.coords(w) : std::vector<double>{});
            C.label[w] = L.label.at(w);
        }
        int vl = next++;
        C.complex.add_vertex(vl);
        C.label[vl] = t;

        // two distinct copies of the rib, sharing their lower faces
        std::vector<int> rib_faces;
        if (n - 1 == 0) {
            rib_faces = {};
        } else {
            for (std::size_t i = 0; i < rib.size(); ++i) {
                VertexList f = rib;
                f.erase(f.begin() + static_cast<std::ptrdiff_t>(i));
                rib_faces.push_back(C.complex.add_simplex(f));
            }
        }
        int rib_a, rib_b;
        if (n - 1 == 0) {
            // in dimension one the rib is a vertex; the leaf is two edges on {rib, v_L}
            rib_a = rib_b = C.complex.vertex_cell(rib[0]);
        } else {
            rib_a = C.complex.add_cell_raw(n - 1, Kind::simplex, rib, rib_faces);
            rib_b = C.complex.add_cell_raw(n - 1, Kind::simplex, rib, rib_faces);
        }
        std::vector<int> shared;
        for (int w : rib) {
            VertexList f = rib;
            f.erase(std::find(f.begin(), f.end(), w));
            f.push_back(vl);
            shared.push_back(C.complex.add_simplex(f));
        }
        VertexList all = rib;
        all.push_back(vl);
        std::vector<int> fa = shared, fb = shared;
        fa.push_back(rib_a);
        fb.push_back(rib_b);
        int T = C.complex.add_cell_raw(n, Kind::simplex, all, fa);
        int U = C.complex.add_cell_raw(n, Kind::simplex, all, fb);
        C.leaves.push_back({vl, T, U, rib});

        for (int w : rib) C.midrib.add_vertex(w, K.has_coords(w) ? K.coords(w) : std::vector<double>{});
        C.midrib.add_simplex(rib);
    }
    C.label[v] = L.label.at(v);
    return C;
}

// -- collapse -------------------------------------------------------------

struct LedgerStep {
    int vertex;
    long star_top;     // #St(v)^{(n)}
    long covers;       // star_top / 2
};

struct ReductionLedger {
    std::vector<LedgerStep> steps;
    long total() const
    {
        long s = 0;
        for (const auto& x : steps) s += x.covers;
        return s;
    }
};

struct CollapseResult {
    AlexanderLabeling labeling;
    LedgerStep step;
};

// Collapse St(v) onto its reduced star modulo label t: every link vertex
// labeled t is identified with v, which then carries label t.
inline CollapseResult collapse_at(const AlexanderLabeling& L, int v, std::optional<int> t_opt = std::nullopt,
                                  bool check_boundary = true)
{
    const Complex& K = L.complex;
    const int n = K.dimension();
    const int t = t_opt.value_or(n);
    if (L.label.at(v) == t) fail("BadCenterLabel", "center vertex carries the collapsed label");

    std::set<int> st = star_cells(K, v);
    {
        std::set<VertexList> seen;
        for (int c : st)
            if (!seen.insert(K.cell(c).verts).second)
                fail("NonSimplicialStar", "star of " + std::to_string(v) + " has two cells on one vertex set");
    }
    auto is_t = [&](int w) { return L.label.at(w) == t; };
    if (check_boundary) {
        for (int f : boundary_facets(K)) {
            if (!st.count(f)) continue;
            for (int w : K.cell(f).verts)
                if (is_t(w))
                    fail("BoundaryViolation", "boundary of the star meets a vertex labeled " + std::to_string(t));
        }
    }

    std::set<int> drop;   // link vertices labeled t
    for (int c : st)
        for (int w : K.cell(c).verts)
            if (w != v && is_t(w)) drop.insert(w);

    long star_top = 0;
    for (int c : K.incident(v))
        if (K.cell(c).dim == n) ++star_top;

    auto remap = [&](const VertexList& vs) {
        VertexList out;
        for (int w : vs) out.push_back(drop.count(w) ? v : w);
        std::sort(out.begin(), out.end());
        return out;
    };

    Complex N(n, K.mode());
    std::map<int, int> id;
    std::map<VertexList, int> star_image;
    std::vector<int> order(K.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return K.cell(a).dim < K.cell(b).dim; });
    for (int c : order) {
        const Cell& cell = K.cell(c);
        bool in_star = st.count(c) != 0;
        bool with_v = has_vertex(cell, v);
        bool with_t = std::any_of(cell.verts.begin(), cell.verts.end(), [&](int w) { return drop.count(w) != 0; });
        if (in_star && with_v && with_t) continue;
        VertexList vs = remap(cell.verts);
        if (std::adjacent_find(vs.begin(), vs.end()) != vs.end())
            fail("NonSimplicialStar", "collapse would degenerate cell " + std::to_string(c));
        if (cell.dim == 0) {
            int w = vs[0];
            id[c] = N.add_vertex(w, K.has_coords(w) ? K.coords(w) : std::vector<double>{});
            continue;
        }
        if (in_star) {
            auto it = star_image.find(vs);
            if (it != star_image.end()) {
                id[c] = it->second;
                continue;
            }
        }
        std::vector<int> faces;
        for (int f : cell.faces) faces.push_back(id.at(f));
        std::sort(faces.begin(), faces.end());
        faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
        int nid = N.add_cell_raw(cell.dim, cell.kind, vs, std::move(faces), {});
        id[c] = nid;
        if (in_star) star_image[vs] = nid;
    }
    CollapseResult R;
    std::map<int, int> lab;
    for (int w : N.vertex_ids()) lab[w] = w == v ? t : L.label.at(w);
    R.labeling.parity = compute_parity(N);
    check_labels(N, lab);
    R.labeling.complex = std::move(N);
    R.labeling.label = std::move(lab);
    R.step = {v, star_top, star_top / 2};
    if (star_top % 2 != 0) fail("UnmatchedSimplex", "star has an odd number of top simplices");
    return R;
}

// -- star pairs -----------------------------------------------------------

struct MergeResult {
    AlexanderLabeling labeling;
    long covers;
    int pivot;
};

inline Complex union_complex(const Complex& A, const Complex& B)
{
    Complex U(A.dimension(), Mode::simplicial);
    for (const Complex* P : {&A, &B}) {
        for (int w : P->vertex_ids()) U.add_vertex(w, P->has_coords(w) ? P->coords(w) : std::vector<double>{});
    }
    for (const Complex* P : {&A, &B})
        for (const auto& c : P->cells())
            if (c.dim > 0) U.add_simplex(c.verts);
    return U;
}

// Merge two Alexander stars meeting in the star of a vertex u interior to
// their common (n-1)-cell.  The returned cover count is #(K1 n K2)^{(n-1)}.
inline MergeResult merge_star_pair(const AlexanderLabeling& K1, const AlexanderLabeling& K2)
{
    const int n = K1.complex.dimension();
    if (K2.complex.dimension() != n) fail("NotSimplePair", "dimensions differ");
    std::map<int, int> lab = K1.label;
    for (auto [w, l] : K2.label) {
        auto it = lab.find(w);
        if (it != lab.end() && it->second != l) fail("NotSimplePair", "labels disagree on shared vertex");
        lab[w] = l;
    }
    std::set<std::pair<int, VertexList>> c1, common;
    for (const auto& c : K1.complex.cells()) c1.insert({c.dim, c.verts});
    for (const auto& c : K2.complex.cells())
        if (c1.count({c.dim, c.verts})) common.insert({c.dim, c.verts});
    if (common.empty()) fail("NotSimplePair", "stars are disjoint");
    for (const auto& [d, _] : common)
        if (d >= n) fail("NotSimplePair", "stars share a top simplex");

    // find the pivot: every common cell lies in a common cell through u
    std::set<int> verts;
    for (const auto& [d, vs] : common)
        if (d == 0) verts.insert(vs[0]);
    std::optional<int> pivot;
    for (int u : verts) {
        bool ok = true;
        for (const auto& [d, vs] : common) {
            if (std::binary_search(vs.begin(), vs.end(), u)) continue;
            VertexList with = vs;
            with.push_back(u);
            std::sort(with.begin(), with.end());
            if (!common.count({d + 1, with})) { ok = false; break; }
        }
        if (!ok) continue;
        // u must be interior to the common (n-1)-complex
        if (n >= 2) {
            for (const auto& [d, vs] : common) {
                if (d != n - 2 || !std::binary_search(vs.begin(), vs.end(), u)) continue;
                int co = 0;
                for (const auto& [d2, vs2] : common)
                    if (d2 == n - 1 && contains_sorted(vs2, vs)) ++co;
                if (co != 2) { ok = false; break; }
            }
        }
        if (ok && lab.at(u) != n) { pivot = u; break; }
    }
    if (!pivot) fail("NotSimplePair", "intersection is not the star of an interior vertex");

    long shared_top = 0;
    for (const auto& [d, _] : common)
        if (d == n - 1) ++shared_top;

    AlexanderLabeling U = alexander_label(union_complex(K1.complex, K2.complex), lab);
    auto R = collapse_at(U, *pivot, n, false);
    if (R.step.covers != shared_top)
        fail("NotSimplePair", "cover count " + std::to_string(R.step.covers) + " differs from shared facet count");
    return {std::move(R.labeling), R.step.covers, *pivot};
}

} // namespace cellkit
