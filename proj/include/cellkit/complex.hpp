#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cellkit/error.hpp"

namespace cellkit {

enum class Mode { cubical, simplicial };
enum class Kind { cube, simplex };

inline const char* to_string(Mode m) { return m == Mode::cubical ? "cubical" : "simplicial"; }
inline const char* to_string(Kind k) { return k == Kind::cube ? "cube" : "simplex"; }

using VertexList = std::vector<int>;

struct Cell {
    int dim = 0;
    Kind kind = Kind::simplex;
    VertexList verts;          // sorted vertex ids
    std::vector<int> faces;    // ids of codimension-one faces
    std::vector<int> chart;    // cubes only: chart[mask] is the corner at bit pattern mask
};

inline bool contains_sorted(const VertexList& big, const VertexList& small)
{
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline VertexList intersect_sorted(const VertexList& a, const VertexList& b)
{
    VertexList out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool has_vertex(const Cell& c, int v)
{
    return std::binary_search(c.verts.begin(), c.verts.end(), v);
}

// A graded cell complex whose cells are cubes or simplices.  Cells are
// appended with their faces already present, so incidence is always
// consistent; cofaces are maintained as cells are added.
class Complex {
public:
    Complex() = default;
    Complex(int dimension, Mode mode) : dim_(dimension), mode_(mode) {}

    int dimension() const { return dim_; }
    Mode mode() const { return mode_; }
    void set_mode(Mode m) { mode_ = m; }
    void set_dimension(int d) { dim_ = d; }

    std::size_t size() const { return cells_.size(); }
    const Cell& cell(int id) const { return cells_.at(static_cast<std::size_t>(id)); }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<int>& cofaces(int id) const { return cofaces_.at(static_cast<std::size_t>(id)); }

    // -- vertices ---------------------------------------------------------

    int add_vertex(int vid, std::vector<double> coords = {})
    {
        auto it = vertex_cell_.find(vid);
        if (it != vertex_cell_.end()) {
            if (!coords.empty()) coords_[vid] = std::move(coords);
            return it->second;
        }
        Cell c;
        c.dim = 0;
        c.kind = mode_ == Mode::cubical ? Kind::cube : Kind::simplex;
        c.verts = {vid};
        c.chart = {vid};
        int id = push(std::move(c));
        vertex_cell_[vid] = id;
        if (!coords.empty()) coords_[vid] = std::move(coords);
        return id;
    }

    bool has_vertex_id(int vid) const { return vertex_cell_.count(vid) != 0; }

    int vertex_cell(int vid) const
    {
        auto it = vertex_cell_.find(vid);
        if (it == vertex_cell_.end()) fail("UnknownVertex", "vertex " + std::to_string(vid));
        return it->second;
    }

    std::vector<int> vertex_ids() const
    {
        std::vector<int> out;
        out.reserve(vertex_cell_.size());
        for (const auto& [v, _] : vertex_cell_) out.push_back(v);
        return out;
    }

    int max_vertex_id() const { return vertex_cell_.empty() ? -1 : vertex_cell_.rbegin()->first; }

    bool has_coords(int vid) const { return coords_.count(vid) != 0; }
    const std::vector<double>& coords(int vid) const
    {
        auto it = coords_.find(vid);
        if (it == coords_.end()) fail("NoCoordinates", "vertex " + std::to_string(vid));
        return it->second;
    }
    bool all_coords() const
    {
        for (const auto& [v, _] : vertex_cell_)
            if (!coords_.count(v)) return false;
        return !vertex_cell_.empty();
    }
    void set_coords(int vid, std::vector<double> x) { coords_[vid] = std::move(x); }

    // -- cells ------------------------------------------------------------

    // Find-or-create a cube from its chart.  Faces are synthesized recursively.
    int add_cube(const std::vector<int>& chart)
    {
        const std::size_t m = chart.size();
        int k = 0;
        while ((std::size_t{1} << k) < m) ++k;
        if ((std::size_t{1} << k) != m) fail("MalformedCell", "cube chart size is not a power of two");
        if (k == 0) return add_vertex(chart[0]);
        for (int v : chart)
            if (!has_vertex_id(v)) fail("UnknownVertex", "cube references vertex " + std::to_string(v));
        VertexList vs(chart.begin(), chart.end());
        std::sort(vs.begin(), vs.end());
        if (std::adjacent_find(vs.begin(), vs.end()) != vs.end())
            fail("MalformedCell", "cube chart repeats a vertex");
        if (auto id = find(vs, k)) return *id;
        std::vector<int> faces;
        for (int axis = 0; axis < k; ++axis)
            for (int side = 0; side < 2; ++side) faces.push_back(add_cube(subchart(chart, k, axis, side)));
        Cell c;
        c.dim = k;
        c.kind = Kind::cube;
        c.verts = std::move(vs);
        c.faces = std::move(faces);
        c.chart = chart;
        return push(std::move(c));
    }

    // Find-or-create a simplex by vertex set.
    int add_simplex(VertexList vs)
    {
        std::sort(vs.begin(), vs.end());
        if (std::adjacent_find(vs.begin(), vs.end()) != vs.end())
            fail("MalformedCell", "simplex repeats a vertex");
        const int k = static_cast<int>(vs.size()) - 1;
        if (k < 0) fail("MalformedCell", "empty simplex");
        if (k == 0) {
            if (!has_vertex_id(vs[0])) fail("UnknownVertex", "simplex references vertex " + std::to_string(vs[0]));
            return vertex_cell_.at(vs[0]);
        }
        for (int v : vs)
            if (!has_vertex_id(v)) fail("UnknownVertex", "simplex references vertex " + std::to_string(v));
        if (auto id = find(vs, k)) return *id;
        std::vector<int> faces;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            VertexList f = vs;
            f.erase(f.begin() + static_cast<std::ptrdiff_t>(i));
            faces.push_back(add_simplex(std::move(f)));
        }
        Cell c;
        c.dim = k;
        c.kind = Kind::simplex;
        c.verts = std::move(vs);
        c.faces = std::move(faces);
        return push(std::move(c));
    }

    // Append a cell with explicit faces; never deduplicates.  Used for weakly
    // simplicial complexes where distinct cells may share a vertex set.
    int add_cell_raw(int dim, Kind kind, VertexList vs, std::vector<int> faces, std::vector<int> chart = {})
    {
        std::sort(vs.begin(), vs.end());
        if (dim == 0) {
            if (vs.size() != 1) fail("MalformedCell", "0-cell must have one vertex");
            return add_vertex(vs[0]);
        }
        for (int f : faces)
            if (f < 0 || static_cast<std::size_t>(f) >= cells_.size())
                fail("MissingFace", "face id out of range");
        Cell c;
        c.dim = dim;
        c.kind = kind;
        c.verts = std::move(vs);
        c.faces = std::move(faces);
        c.chart = std::move(chart);
        return push(std::move(c));
    }

    std::optional<int> find(const VertexList& sorted_verts, int dim) const
    {
        auto it = by_verts_.find(sorted_verts);
        if (it == by_verts_.end()) return std::nullopt;
        for (int id : it->second)
            if (cells_[static_cast<std::size_t>(id)].dim == dim) return id;
        return std::nullopt;
    }

    std::vector<int> find_all(const VertexList& sorted_verts) const
    {
        auto it = by_verts_.find(sorted_verts);
        if (it == by_verts_.end()) return {};
        return it->second;
    }

    std::vector<int> cells_of_dim(int k) const
    {
        std::vector<int> out;
        for (std::size_t i = 0; i < cells_.size(); ++i)
            if (cells_[i].dim == k) out.push_back(static_cast<int>(i));
        return out;
    }

    std::size_t count(int k) const
    {
        std::size_t c = 0;
        for (const auto& x : cells_)
            if (x.dim == k) ++c;
        return c;
    }

    int top_dim() const
    {
        int d = -1;
        for (const auto& x : cells_) d = std::max(d, x.dim);
        return d;
    }

    // Cells incident to vertex vid (all dimensions).
    const std::vector<int>& incident(int vid) const
    {
        static const std::vector<int> none;
        auto it = incident_.find(vid);
        return it == incident_.end() ? none : it->second;
    }

    long euler_characteristic() const
    {
        long chi = 0;
        for (const auto& c : cells_) chi += (c.dim % 2 == 0) ? 1 : -1;
        return chi;
    }

    // All faces (any codimension) of a cell, including itself.
    std::set<int> closure_of(int id) const
    {
        std::set<int> out;
        std::vector<int> stack{id};
        while (!stack.empty()) {
            int c = stack.back();
            stack.pop_back();
            if (!out.insert(c).second) continue;
            for (int f : cells_[static_cast<std::size_t>(c)].faces) stack.push_back(f);
        }
        return out;
    }

    std::set<int> closure_of(const std::vector<int>& ids) const
    {
        std::set<int> out;
        for (int id : ids) {
            auto s = closure_of(id);
            out.insert(s.begin(), s.end());
        }
        return out;
    }

    // Cells with no cofaces.
    std::vector<int> maximal_cells() const
    {
        std::vector<int> out;
        for (std::size_t i = 0; i < cells_.size(); ++i)
            if (cofaces_[i].empty()) out.push_back(static_cast<int>(i));
        return out;
    }

    std::vector<std::string>& warnings() { return warnings_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    static std::vector<int> subchart(const std::vector<int>& chart, int k, int axis, int side)
    {
        std::vector<int> out;
        out.reserve(chart.size() / 2);
        for (std::size_t mask = 0; mask < chart.size(); ++mask) {
            if (((mask >> axis) & 1u) != static_cast<unsigned>(side)) continue;
            out.push_back(chart[mask]);
        }
        (void)k;
        return out;
    }

private:
    int push(Cell c)
    {
        int id = static_cast<int>(cells_.size());
        for (int f : c.faces) cofaces_[static_cast<std::size_t>(f)].push_back(id);
        by_verts_[c.verts].push_back(id);
        for (int v : c.verts) incident_[v].push_back(id);
        cells_.push_back(std::move(c));
        cofaces_.emplace_back();
        return id;
    }

    int dim_ = 0;
    Mode mode_ = Mode::cubical;
    std::vector<Cell> cells_;
    std::vector<std::vector<int>> cofaces_;
    std::map<VertexList, std::vector<int>> by_verts_;
    std::map<int, int> vertex_cell_;
    std::map<int, std::vector<int>> incident_;
    std::map<int, std::vector<double>> coords_;
    std::vector<std::string> warnings_;
};

// Build a new complex from the closure of the given cells.  Vertex ids and
// coordinates are preserved; cell ids are renumbered.  If old_to_new is non
// null it receives the id map.
inline Complex subcomplex(const Complex& K, const std::vector<int>& ids, std::map<int, int>* old_to_new = nullptr)
{
    std::set<int> keep = K.closure_of(ids);
    std::vector<int> order(keep.begin(), keep.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return K.cell(a).dim < K.cell(b).dim; });
    Complex out(K.dimension(), K.mode());
    std::map<int, int> map;
    for (int id : order) {
        const Cell& c = K.cell(id);
        if (c.dim == 0) {
            int v = c.verts[0];
            map[id] = out.add_vertex(v, K.has_coords(v) ? K.coords(v) : std::vector<double>{});
            continue;
        }
        std::vector<int> faces;
        faces.reserve(c.faces.size());
        for (int f : c.faces) faces.push_back(map.at(f));
        map[id] = out.add_cell_raw(c.dim, c.kind, c.verts, std::move(faces), c.chart);
    }
    if (old_to_new) *old_to_new = std::move(map);
    return out;
}

// Structural validation.  Errors: MissingFace, IllegalIntersection (cubical),
// FaceOveruse, MalformedCell.  Advisory findings are appended to warnings.
inline void validate(Complex& K, bool strict = true)
{
    const int n = K.dimension();
    bool has_top = false;
    for (std::size_t i = 0; i < K.size(); ++i) {
        const Cell& c = K.cell(static_cast<int>(i));
        if (c.dim > n) fail("MalformedCell", "cell of dimension " + std::to_string(c.dim) + " exceeds n");
        if (c.dim == n) has_top = true;
        if (c.dim == 0) continue;
        const std::size_t want = c.kind == Kind::cube ? static_cast<std::size_t>(2 * c.dim)
                                                      : static_cast<std::size_t>(c.dim + 1);
        if (c.faces.size() != want)
            fail("MissingFace", "cell " + std::to_string(i) + " has " + std::to_string(c.faces.size()) +
                                    " faces, expected " + std::to_string(want));
        const std::size_t nv = c.kind == Kind::cube ? (std::size_t{1} << c.dim) : static_cast<std::size_t>(c.dim + 1);
        if (c.verts.size() != nv && strict)
            fail("MalformedCell", "cell " + std::to_string(i) + " has wrong vertex count");
        for (int f : c.faces) {
            const Cell& fc = K.cell(f);
            if (fc.dim != c.dim - 1 || !contains_sorted(c.verts, fc.verts))
                fail("MissingFace", "cell " + std::to_string(i) + " has an inconsistent face");
        }
    }
    if (!has_top && strict) fail("MalformedCell", "no cell of top dimension");

    if (K.mode() == Mode::cubical) {
        // vertex-determined cubes and proper pairwise intersections
        for (std::size_t i = 0; i < K.size(); ++i) {
            if (K.find_all(K.cell(static_cast<int>(i)).verts).size() > 1 && strict)
                fail("IllegalIntersection", "two cubes share the vertex set of cell " + std::to_string(i));
        }
        auto maxi = K.maximal_cells();
        std::map<int, std::set<int>> clos;
        for (int a : maxi) clos[a] = K.closure_of(a);
        for (std::size_t x = 0; x < maxi.size(); ++x) {
            for (std::size_t y = x + 1; y < maxi.size(); ++y) {
                const Cell& A = K.cell(maxi[x]);
                const Cell& B = K.cell(maxi[y]);
                VertexList common = intersect_sorted(A.verts, B.verts);
                if (common.empty()) continue;
                bool ok = false;
                for (int c : K.find_all(common))
                    if (clos[maxi[x]].count(c) && clos[maxi[y]].count(c)) ok = true;
                if (!ok)
                    fail("IllegalIntersection", "cells " + std::to_string(maxi[x]) + " and " +
                                                    std::to_string(maxi[y]) + " meet in a non-cube");
            }
        }
    } else {
        for (int f : K.cells_of_dim(n - 1)) {
            std::size_t top = 0;
            for (int c : K.cofaces(f))
                if (K.cell(c).dim == n) ++top;
            if (top > 2)
                fail("FaceOveruse", "(n-1)-simplex " + std::to_string(f) + " is a face of " + std::to_string(top) +
                                        " n-simplices");
        }
        if (strict) {
            for (std::size_t i = 0; i < K.size(); ++i) {
                const Cell& c = K.cell(static_cast<int>(i));
                if (c.dim < n && K.find_all(c.verts).size() > 1)
                    fail("MalformedCell", "the (n-1)-skeleton is not simplicial at cell " + std::to_string(i));
            }
        }
        // adjacent n-simplices sharing every vertex but only one common facet
        for (int f : K.cells_of_dim(n - 1)) {
            std::vector<int> tops;
            for (int c : K.cofaces(f))
                if (K.cell(c).dim == n) tops.push_back(c);
            if (tops.size() != 2) continue;
            const Cell& T = K.cell(tops[0]);
            const Cell& U = K.cell(tops[1]);
            if (T.verts != U.verts) continue;
            std::size_t shared = 0;
            for (int a : T.faces)
                if (std::find(U.faces.begin(), U.faces.end(), a) != U.faces.end()) ++shared;
            if (shared == 1)
                K.warnings().push_back("adjacent simplices " + std::to_string(tops[0]) + " and " +
                                       std::to_string(tops[1]) + " share all vertices but one facet");
        }
    }
}

// -- adjacency -----------------------------------------------------------

struct AdjacencyGraph {
    std::vector<int> nodes;                        // top cell ids
    std::vector<std::pair<int, int>> edges;        // pairs of top cell ids, a < b
};

inline AdjacencyGraph adjacency_graph(const Complex& K)
{
    AdjacencyGraph g;
    const int n = K.dimension();
    g.nodes = K.cells_of_dim(n);
    std::set<std::pair<int, int>> es;
    for (int f : K.cells_of_dim(n - 1)) {
        std::vector<int> tops;
        for (int c : K.cofaces(f))
            if (K.cell(c).dim == n) tops.push_back(c);
        for (std::size_t i = 0; i < tops.size(); ++i)
            for (std::size_t j = i + 1; j < tops.size(); ++j)
                es.insert({std::min(tops[i], tops[j]), std::max(tops[i], tops[j])});
    }
    g.edges.assign(es.begin(), es.end());
    return g;
}

inline std::map<int, std::vector<int>> adjacency_lists(const AdjacencyGraph& g)
{
    std::map<int, std::vector<int>> adj;
    for (int v : g.nodes) adj[v];
    for (auto [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

inline std::size_t component_count(const std::vector<int>& nodes, const std::map<int, std::vector<int>>& adj)
{
    std::set<int> seen;
    std::size_t comps = 0;
    for (int s : nodes) {
        if (seen.count(s)) continue;
        ++comps;
        std::vector<int> st{s};
        seen.insert(s);
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            auto it = adj.find(x);
            if (it == adj.end()) continue;
            for (int y : it->second)
                if (seen.insert(y).second) st.push_back(y);
        }
    }
    return comps;
}

inline bool is_simplicially_connected(const Complex& K)
{
    auto g = adjacency_graph(K);
    if (g.nodes.empty()) return false;
    return component_count(g.nodes, adjacency_lists(g)) == 1;
}

// Connectivity of the underlying space via shared vertices.
inline std::size_t connected_components(const Complex& K)
{
    std::map<int, int> parent;
    std::function<int(int)> root = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int v : K.vertex_ids()) parent[v] = v;
    for (const auto& c : K.cells())
        for (std::size_t i = 1; i < c.verts.size(); ++i) parent[root(c.verts[i])] = root(c.verts[0]);
    std::set<int> roots;
    for (int v : K.vertex_ids()) roots.insert(root(v));
    return roots.size();
}

// -- stars and links -----------------------------------------------------

inline Complex star(const Complex& K, int vid)
{
    K.vertex_cell(vid);
    return subcomplex(K, K.incident(vid));
}

inline Complex link(const Complex& K, int vid)
{
    Complex S = star(K, vid);
    std::vector<int> keep;
    for (std::size_t i = 0; i < S.size(); ++i)
        if (!has_vertex(S.cell(static_cast<int>(i)), vid)) keep.push_back(static_cast<int>(i));
    return subcomplex(S, keep);
}

// (n-1)-cells with exactly one n-coface, together with their faces.
inline std::vector<int> boundary_facets(const Complex& K)
{
    const int n = K.dimension();
    std::vector<int> out;
    for (int f : K.cells_of_dim(n - 1)) {
        int top = 0;
        for (int c : K.cofaces(f))
            if (K.cell(c).dim == n) ++top;
        if (top == 1) out.push_back(f);
    }
    return out;
}

inline Complex boundary_complex(const Complex& K)
{
    Complex B = subcomplex(K, boundary_facets(K));
    B.set_dimension(K.dimension() - 1);
    return B;
}

inline bool is_closed(const Complex& K)
{
    const int n = K.dimension();
    for (int f : K.cells_of_dim(n - 1)) {
        int top = 0;
        for (int c : K.cofaces(f))
            if (K.cell(c).dim == n) ++top;
        if (top != 2) return false;
    }
    return true;
}

} // namespace cellkit
