#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "cellkit/complex.hpp"

namespace cellkit {

// Simplicial complex together with, for every vertex, the cell of the
// original complex it is the center of.
struct Triangulation {
    Complex complex;
    std::map<int, int> origin_cell;   // vertex id -> cell id in the source complex
    std::map<int, int> origin_dim;    // vertex id -> dimension of that cell
    std::map<int, int> center;        // source cell id -> vertex id
};

// Canonical triangulation: one vertex per cube, simplices are chains of cubes.
inline Triangulation canonical_triangulation(const Complex& K)
{
    if (K.mode() != Mode::cubical) fail("NotCubical", "canonical triangulation needs a cubical complex");
    for (const auto& c : K.cells())
        if (c.kind != Kind::cube) fail("NotCubical", "complex contains a simplex");

    Triangulation tri;
    tri.complex = Complex(K.dimension(), Mode::simplicial);
    Complex& T = tri.complex;

    for (int v : K.vertex_ids()) {
        T.add_vertex(v, K.has_coords(v) ? K.coords(v) : std::vector<double>{});
        int cid = K.vertex_cell(v);
        tri.origin_cell[v] = cid;
        tri.origin_dim[v] = 0;
        tri.center[cid] = v;
    }

    std::vector<int> order;
    for (std::size_t i = 0; i < K.size(); ++i)
        if (K.cell(static_cast<int>(i)).dim >= 1) order.push_back(static_cast<int>(i));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Cell& A = K.cell(a);
        const Cell& B = K.cell(b);
        if (A.dim != B.dim) return A.dim < B.dim;
        return A.verts < B.verts;
    });
    int next = K.max_vertex_id() + 1;
    for (int cid : order) {
        const Cell& c = K.cell(cid);
        std::vector<double> bary;
        bool have = true;
        for (int v : c.verts) have = have && K.has_coords(v);
        if (have) {
            bary.assign(K.coords(c.verts[0]).size(), 0.0);
            for (int v : c.verts) {
                const auto& x = K.coords(v);
                for (std::size_t i = 0; i < bary.size() && i < x.size(); ++i) bary[i] += x[i];
            }
            for (double& x : bary) x /= static_cast<double>(c.verts.size());
        }
        int vid = next++;
        T.add_vertex(vid, std::move(bary));
        tri.origin_cell[vid] = cid;
        tri.origin_dim[vid] = c.dim;
        tri.center[cid] = vid;
    }

    // maximal flags q_0 < q_1 < ... < q_k = q for every maximal cube q
    std::vector<int> chain;
    std::function<void(int)> descend = [&](int cid) {
        chain.push_back(tri.center.at(cid));
        const Cell& c = K.cell(cid);
        if (c.dim == 0) {
            T.add_simplex(chain);
        } else {
            for (int f : c.faces) descend(f);
        }
        chain.pop_back();
    };
    for (int q : K.maximal_cells()) descend(q);
    return tri;
}

// Restriction of a triangulation to the simplices whose vertices are all
// centers of cells in the given set.
inline Complex restrict_triangulation(const Triangulation& tri, const std::set<int>& source_cells)
{
    const Complex& T = tri.complex;
    std::vector<int> keep;
    for (std::size_t i = 0; i < T.size(); ++i) {
        const Cell& c = T.cell(static_cast<int>(i));
        bool ok = true;
        for (int v : c.verts) ok = ok && source_cells.count(tri.origin_cell.at(v));
        if (ok) keep.push_back(static_cast<int>(i));
    }
    return subcomplex(T, keep);
}

// Two copies of a triangulated manifold glued along their common boundary.
// Interior vertices of the second copy get fresh ids; origin data is carried.
inline Triangulation double_along_boundary(const Triangulation& tri)
{
    const Complex& T = tri.complex;
    Complex B = boundary_complex(T);
    std::set<int> on_boundary;
    for (int v : B.vertex_ids()) on_boundary.insert(v);

    Triangulation out;
    out.complex = Complex(T.dimension(), Mode::simplicial);
    Complex& D = out.complex;
    std::map<int, int> copy;
    int next = T.max_vertex_id() + 1;
    for (int v : T.vertex_ids()) {
        D.add_vertex(v, T.has_coords(v) ? T.coords(v) : std::vector<double>{});
        out.origin_cell[v] = tri.origin_cell.at(v);
        out.origin_dim[v] = tri.origin_dim.at(v);
        copy[v] = v;
    }
    for (int v : T.vertex_ids()) {
        if (on_boundary.count(v)) continue;
        int w = next++;
        D.add_vertex(w);
        out.origin_cell[w] = tri.origin_cell.at(v);
        out.origin_dim[w] = tri.origin_dim.at(v);
        copy[v] = w;
    }
    out.center = tri.center;
    for (int s : T.cells_of_dim(T.dimension())) {
        const Cell& c = T.cell(s);
        D.add_simplex(c.verts);
        VertexList img;
        for (int v : c.verts) img.push_back(copy.at(v));
        D.add_simplex(img);
    }
    return out;
}

// -- isomorphism ---------------------------------------------------------

namespace detail {

inline std::vector<std::size_t> wl_colors(const Complex& K, const std::vector<int>& verts,
                                          const std::map<int, int>* labels, int rounds)
{
    std::map<int, std::size_t> idx;
    for (std::size_t i = 0; i < verts.size(); ++i) idx[verts[i]] = i;
    std::vector<std::size_t> col(verts.size(), 0);
    for (std::size_t i = 0; i < verts.size(); ++i) {
        std::vector<int> dims;
        for (int c : K.incident(verts[i])) dims.push_back(K.cell(c).dim);
        std::sort(dims.begin(), dims.end());
        std::size_t h = labels ? static_cast<std::size_t>(labels->at(verts[i]) + 7) : 7;
        for (int d : dims) h = h * 1000003u ^ static_cast<std::size_t>(d + 1);
        col[i] = h;
    }
    for (int r = 0; r < rounds; ++r) {
        std::vector<std::size_t> nxt(verts.size());
        for (std::size_t i = 0; i < verts.size(); ++i) {
            std::vector<std::size_t> sig;
            for (int c : K.incident(verts[i])) {
                const Cell& cell = K.cell(c);
                std::vector<std::size_t> others;
                for (int w : cell.verts)
                    if (w != verts[i]) others.push_back(col[idx.at(w)]);
                std::sort(others.begin(), others.end());
                std::size_t h = static_cast<std::size_t>(cell.dim) * 31u + 17u;
                for (auto o : others) h = h * 1000003u ^ o;
                sig.push_back(h);
            }
            std::sort(sig.begin(), sig.end());
            std::size_t h = col[i];
            for (auto s : sig) h = (h ^ s) * 1099511628211ull;
            nxt[i] = h;
        }
        col.swap(nxt);
    }
    return col;
}

inline std::map<std::pair<int, VertexList>, int> cell_multiset(const Complex& K)
{
    std::map<std::pair<int, VertexList>, int> ms;
    for (const auto& c : K.cells()) ms[{c.dim, c.verts}]++;
    return ms;
}

} // namespace detail

// Vertex bijection carrying the cell multiset of A onto that of B, honoring
// optional vertex labels.  Returns an empty optional if none exists.
inline std::optional<std::map<int, int>> find_isomorphism(const Complex& A, const Complex& B,
                                                          const std::map<int, int>* la = nullptr,
                                                          const std::map<int, int>* lb = nullptr)
{
    auto va = A.vertex_ids();
    auto vb = B.vertex_ids();
    if (va.size() != vb.size() || A.size() != B.size()) return std::nullopt;
    auto msa = detail::cell_multiset(A);
    auto msb = detail::cell_multiset(B);
    {
        std::map<int, int> da, db;
        for (const auto& c : A.cells()) da[c.dim]++;
        for (const auto& c : B.cells()) db[c.dim]++;
        if (da != db) return std::nullopt;
    }
    const int rounds = 4;
    auto ca = detail::wl_colors(A, va, la, rounds);
    auto cb = detail::wl_colors(B, vb, lb, rounds);
    {
        auto sa = ca, sb = cb;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return std::nullopt;
    }
    // assign the rarest color classes first
    std::map<std::size_t, int> freq;
    for (auto c : ca) freq[c]++;
    std::vector<std::size_t> order(va.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (freq[ca[x]] != freq[ca[y]]) return freq[ca[x]] < freq[ca[y]];
        return va[x] < va[y];
    });
    std::map<int, int> fwd;
    std::set<int> used;

    auto consistent = [&](int v) {
        for (int c : A.incident(v)) {
            const Cell& cell = A.cell(c);
            VertexList img;
            bool full = true;
            for (int w : cell.verts) {
                auto it = fwd.find(w);
                if (it == fwd.end()) { full = false; break; }
                img.push_back(it->second);
            }
            if (!full) continue;
            std::sort(img.begin(), img.end());
            auto it = msb.find({cell.dim, img});
            if (it == msb.end() || it->second != msa.at({cell.dim, cell.verts})) return false;
        }
        return true;
    };

    std::function<bool(std::size_t)> go = [&](std::size_t k) {
        if (k == order.size()) return true;
        std::size_t i = order[k];
        int v = va[i];
        for (std::size_t j = 0; j < vb.size(); ++j) {
            if (cb[j] != ca[i] || used.count(vb[j])) continue;
            fwd[v] = vb[j];
            used.insert(vb[j]);
            if (consistent(v) && go(k + 1)) return true;
            used.erase(vb[j]);
            fwd.erase(v);
        }
        return false;
    };
    if (!go(0)) return std::nullopt;
    return fwd;
}

inline bool isomorphic(const Complex& A, const Complex& B, const std::map<int, int>* la = nullptr,
                       const std::map<int, int>* lb = nullptr)
{
    return find_isomorphism(A, B, la, lb).has_value();
}

} // namespace cellkit
