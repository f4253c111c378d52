#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "cellkit/complex.hpp"

namespace cellkit {

struct SeparatingComplex {
    std::vector<int> Z;                      // (n-1)-cells of K
    std::vector<std::vector<int>> pieces;     // n-cubes of K_i(Z)
    std::vector<std::vector<int>> boundaries; // boundary facets of each Sigma_i
    std::vector<std::vector<int>> collars;    // n-cubes of the collar K_i
    std::vector<int> tree_edges;              // (n-1)-faces crossed by the maximal tree
    int q1 = -1;
    std::vector<int> neighborhood; // N_K(Z)
};

namespace detail {

inline std::vector<int> facet_cubes(const Complex& K, int f)
{
    std::vector<int> out;
    for (int c : K.cofaces(f))
        if (K.cell(c).dim == K.dimension()) out.push_back(c);
    return out;
}

// Boundary facets grouped into components by shared vertices.
inline std::vector<std::vector<int>> boundary_components(const Complex& K)
{
    std::vector<int> facets = boundary_facets(K);
    std::map<int, std::vector<int>> by_vertex;
    for (int f : facets)
        for (int v : K.cell(f).verts) by_vertex[v].push_back(f);
    std::map<int, int> comp;
    std::vector<std::vector<int>> out;
    for (int f : facets) {
        if (comp.count(f)) continue;
        int id = static_cast<int>(out.size());
        out.emplace_back();
        std::queue<int> q;
        q.push(f);
        comp[f] = id;
        while (!q.empty()) {
            int g = q.front();
            q.pop();
            out.back().push_back(g);
            for (int v : K.cell(g).verts)
                for (int h : by_vertex[v])
                    if (!comp.count(h)) {
                        comp[h] = id;
                        q.push(h);
                    }
        }
        std::sort(out.back().begin(), out.back().end());
    }
    return out;
}

} // namespace detail

// Connected components of the n-cubes when crossing only (n-1)-faces that are
// not in `walls`.
inline std::vector<std::vector<int>> components_off(const Complex& K, const std::vector<int>& cubes,
                                                    const std::set<int>& walls)
{
    std::set<int> in(cubes.begin(), cubes.end());
    std::set<int> seen;
    std::vector<std::vector<int>> out;
    for (int s : cubes) {
        if (seen.count(s)) continue;
        out.emplace_back();
        std::queue<int> q;
        q.push(s);
        seen.insert(s);
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            out.back().push_back(c);
            for (int f : K.cell(c).faces) {
                if (walls.count(f)) continue;
                for (int d : detail::facet_cubes(K, f))
                    if (in.count(d) && !seen.count(d)) {
                        seen.insert(d);
                        q.push(d);
                    }
            }
        }
        std::sort(out.back().begin(), out.back().end());
    }
    return out;
}

// Checks the exact conditions (1), (2) and the proxy for (3); returns the
// first failure or an empty string.
inline std::string check_separating(const Complex& K, const SeparatingComplex& S)
{
    const int n = K.dimension();
    std::set<int> Zs(S.Z.begin(), S.Z.end());
    std::set<int> Zcl = K.closure_of(S.Z);
    // cubically connected
    if (!S.Z.empty()) {
        std::map<int, std::vector<int>> by_ridge;
        for (int f : S.Z)
            for (int r : K.cell(f).faces) by_ridge[r].push_back(f);
        std::set<int> seen{S.Z[0]};
        std::queue<int> q;
        q.push(S.Z[0]);
        while (!q.empty()) {
            int f = q.front();
            q.pop();
            for (int r : K.cell(f).faces)
                for (int g : by_ridge[r])
                    if (seen.insert(g).second) q.push(g);
        }
        if (seen.size() != S.Z.size()) return "Z is not cubically connected";
    }
    // two sides at every facet of Z
    for (int f : S.Z)
        if (detail::facet_cubes(K, f).size() != 2) return "Z meets the boundary";
    // (1) essential partition
    std::map<int, int> owner;
    for (std::size_t i = 0; i < S.pieces.size(); ++i)
        for (int q : S.pieces[i])
            if (!owner.emplace(q, static_cast<int>(i)).second) return "pieces overlap";
    if (owner.size() != K.count(n)) return "pieces do not cover K";
    // (2) pairwise intersections inside |Z|
    std::vector<std::set<int>> cl;
    for (const auto& p : S.pieces) cl.push_back(K.closure_of(p));
    for (std::size_t i = 0; i < cl.size(); ++i)
        for (std::size_t j = i + 1; j < cl.size(); ++j)
            for (int c : cl[i])
                if (cl[j].count(c) && !Zcl.count(c)) return "pieces meet outside Z";
    // (3) proxy: connected off Z, exactly one boundary component, peels to the collar
    for (std::size_t i = 0; i < S.pieces.size(); ++i) {
        if (components_off(K, S.pieces[i], Zs).size() != 1) return "piece is not connected off Z";
        std::set<int> bf;
        for (int f : boundary_facets(K))
            if (cl[i].count(f)) bf.insert(f);
        if (bf != std::set<int>(S.boundaries[i].begin(), S.boundaries[i].end()))
            return "piece does not meet exactly its boundary component";
        // remove cubes outside the collar that hang on by a single non-Z face
        std::set<int> rest(S.pieces[i].begin(), S.pieces[i].end());
        std::set<int> collar(S.collars[i].begin(), S.collars[i].end());
        bool progress = true;
        while (progress) {
            progress = false;
            for (int q : std::vector<int>(rest.begin(), rest.end())) {
                if (collar.count(q)) continue;
                int open = 0;
                for (int f : K.cell(q).faces) {
                    if (Zs.count(f)) continue;
                    for (int d : detail::facet_cubes(K, f))
                        if (d != q && rest.count(d)) ++open;
                }
                if (open == 1) {
                    rest.erase(q);
                    progress = true;
                }
            }
        }
        if (rest != collar) return "piece does not peel to its collar";
    }
    return "";
}

// Construction from the existence proof: first-layer collars, a maximal tree
// in the rest K', and Z = (K')^{[n-1]} minus q1 and the tree edges.
inline SeparatingComplex find_separating_complex(const Complex& K)
{
    const int n = K.dimension();
    SeparatingComplex S;
    S.boundaries = detail::boundary_components(K);
    if (S.boundaries.empty()) fail("NoBoundary", "complex has no boundary");
    const std::size_t m = S.boundaries.size();
    std::map<int, int> vertex_owner;
    for (std::size_t i = 0; i < m; ++i)
        for (int f : S.boundaries[i])
            for (int v : K.cell(f).verts) vertex_owner[v] = static_cast<int>(i);
    std::map<int, int> collar_of;
    S.collars.resize(m);
    for (int q : K.cells_of_dim(n)) {
        std::set<int> owners;
        for (int v : K.cell(q).verts)
            if (vertex_owner.count(v)) owners.insert(vertex_owner[v]);
        if (owners.size() > 1) fail("NoDisjointCollars", "a cube meets two boundary components");
        if (owners.size() == 1) {
            collar_of[q] = *owners.begin();
            S.collars[static_cast<std::size_t>(*owners.begin())].push_back(q);
        }
    }
    std::vector<std::set<int>> cverts(m);
    for (std::size_t i = 0; i < m; ++i)
        for (int q : S.collars[i]) cverts[i].insert(K.cell(q).verts.begin(), K.cell(q).verts.end());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (int v : cverts[i])
                if (cverts[j].count(v)) fail("NoDisjointCollars", "collars share a vertex");
    std::vector<int> rest;
    for (int q : K.cells_of_dim(n))
        if (!collar_of.count(q)) rest.push_back(q);
    if (rest.empty()) fail("NoDisjointCollars", "collars exhaust the complex");
    std::set<int> rest_set(rest.begin(), rest.end());
    // BFS maximal tree from the smallest cube of K'
    std::set<int> seen{rest[0]};
    std::set<int> tree;
    std::queue<int> q;
    q.push(rest[0]);
    while (!q.empty()) {
        int c = q.front();
        q.pop();
        for (int f : K.cell(c).faces)
            for (int d : detail::facet_cubes(K, f))
                if (rest_set.count(d) && seen.insert(d).second) {
                    tree.insert(f);
                    q.push(d);
                }
    }
    if (seen.size() != rest.size()) fail("DisconnectedInterior", "complement of the collars is not connected");
    S.tree_edges.assign(tree.begin(), tree.end());
    std::set<int> faces;
    for (int c : rest)
        for (int f : K.cell(c).faces) faces.insert(f);
    for (int f : faces) {
        bool with_first = false;
        for (int d : detail::facet_cubes(K, f)) with_first = with_first || (collar_of.count(d) && collar_of[d] == 0);
        if (with_first) {
            S.q1 = f;
            break;
        }
    }
    if (S.q1 < 0) fail("NoDisjointCollars", "first collar does not meet the interior");
    for (int f : faces)
        if (f != S.q1 && !tree.count(f)) S.Z.push_back(f);
    S.pieces = S.collars;
    S.pieces[0].insert(S.pieces[0].end(), rest.begin(), rest.end());
    for (auto& p : S.pieces) std::sort(p.begin(), p.end());
    std::set<int> zv;
    for (int c : K.closure_of(S.Z))
        if (K.cell(c).dim == 0) zv.insert(K.cell(c).verts[0]);
    for (int c : K.cells_of_dim(n)) {
        bool meets = false;
        for (int v : K.cell(c).verts) meets = meets || zv.count(v);
        if (meets) S.neighborhood.push_back(c);
    }
    return S;
}

} // namespace cellkit
