#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "cellkit/complex.hpp"

namespace cellkit {

// Euler characteristic of the k-sphere.
inline long sphere_euler(int k) { return k < 0 ? 0 : (k % 2 == 0 ? 2 : 0); }

namespace detail {

inline std::vector<int> tops_of(const Complex& K, int f, int d)
{
    std::vector<int> out;
    for (int c : K.cofaces(f))
        if (K.cell(c).dim == d) out.push_back(c);
    return out;
}

inline bool is_pseudomanifold(const Complex& K, int d)
{
    for (int f : K.cells_of_dim(d - 1))
        if (tops_of(K, f, d).size() > 2) return false;
    return true;
}

inline bool is_pure(const Complex& K, int d)
{
    for (std::size_t i = 0; i < K.size(); ++i) {
        const Cell& c = K.cell(static_cast<int>(i));
        if (c.dim < d && K.cofaces(static_cast<int>(i)).empty()) return false;
    }
    return !K.cells_of_dim(d).empty();
}

// Top cells around each vertex are connected through codimension-one faces
// containing that vertex.
inline bool no_pinch_vertices(const Complex& K, int d)
{
    for (int v : K.vertex_ids()) {
        std::vector<int> tops;
        for (int c : K.incident(v))
            if (K.cell(c).dim == d) tops.push_back(c);
        if (tops.size() <= 1) continue;
        std::set<int> seen{tops[0]};
        std::vector<int> st{tops[0]};
        while (!st.empty()) {
            int s = st.back();
            st.pop_back();
            for (int f : K.cell(s).faces) {
                if (!has_vertex(K.cell(f), v)) continue;
                for (int t : tops_of(K, f, d))
                    if (seen.insert(t).second) st.push_back(t);
            }
        }
        if (seen.size() != tops.size()) return false;
    }
    return true;
}

} // namespace detail

// Warning-level recognition of an n-cell: Euler characteristic one, boundary a
// connected (n-1)-pseudomanifold with the Euler characteristic of a sphere,
// and no pinched vertices.
inline bool is_cell(const Complex& K)
{
    const int d = K.dimension();
    if (d == 0) return K.vertex_ids().size() == 1;
    if (!detail::is_pure(K, d) || !detail::is_pseudomanifold(K, d)) return false;
    if (!is_simplicially_connected(K)) return false;
    if (K.euler_characteristic() != 1) return false;
    if (!detail::no_pinch_vertices(K, d)) return false;
    Complex B = boundary_complex(K);
    if (d == 1) return B.vertex_ids().size() == 2;
    if (B.cells_of_dim(d - 1).empty()) return false;
    if (B.euler_characteristic() != sphere_euler(d - 1)) return false;
    if (connected_components(B) != 1) return false;
    for (int f : B.cells_of_dim(d - 2))
        if (detail::tops_of(B, f, d - 1).size() != 2) return false;
    return true;
}

struct ShellingCheck {
    bool ok = true;
    int first_violation = 0;   // 1-based; 0 when ok
    std::string reason;
};

inline std::optional<std::vector<int>> find_shelling_search(const Complex& K,
                                                            std::optional<int> first = std::nullopt);

namespace detail {

// Certificate that a (d)-dimensional complex is a d-cell: nonempty, pure,
// connected, pseudomanifold, Euler characteristic one, boundary Euler
// characteristic of S^{d-1}, and recursively shellable.
inline bool cell_certificate(const Complex& P, std::string* why = nullptr)
{
    auto no = [&](const char* r) {
        if (why) *why = r;
        return false;
    };
    const int d = P.dimension();
    if (P.size() == 0) return no("empty intersection");
    if (d == 0) return P.size() == 1 ? true : no("intersection is not a single vertex");
    if (!is_pure(P, d)) return no("intersection is not pure");
    if (!is_simplicially_connected(P)) return no("intersection is disconnected");
    if (!is_pseudomanifold(P, d)) return no("intersection is not a pseudomanifold");
    if (P.euler_characteristic() != 1) return no("intersection has Euler characteristic other than one");
    Complex B = boundary_complex(P);
    if (d == 1) {
        if (B.vertex_ids().size() != 2) return no("intersection boundary is not two points");
        return true;
    }
    if (B.euler_characteristic() != sphere_euler(d - 1)) return no("intersection boundary is not a sphere");
    if (!find_shelling_search(P)) return no("intersection is not shellable");
    return true;
}

// Cells common to the closure of q and the closure of the earlier cubes,
// as a complex of one dimension less.
inline Complex prefix_intersection(const Complex& K, const std::set<int>& earlier_closure, int q)
{
    std::vector<int> common;
    for (int c : K.closure_of(q))
        if (earlier_closure.count(c)) common.push_back(c);
    Complex P = subcomplex(K, common);
    P.set_dimension(K.cell(q).dim - 1);
    return P;
}

} // namespace detail

inline ShellingCheck verify_shelling(const Complex& K, const std::vector<int>& order)
{
    const int n = K.dimension();
    auto tops = K.cells_of_dim(n);
    {
        auto a = order, b = tops;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) fail("NotAPermutation", "order is not a permutation of the top cubes");
    }
    ShellingCheck res;
    std::set<int> clos;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0) {
            Complex P = detail::prefix_intersection(K, clos, order[i]);
            std::string why;
            if (!detail::cell_certificate(P, &why)) {
                res.ok = false;
                res.first_violation = static_cast<int>(i + 1);
                res.reason = why;
                return res;
            }
        }
        auto c = K.closure_of(order[i]);
        clos.insert(c.begin(), c.end());
    }
    return res;
}

// Exhaustive search with memoized dead prefixes.  Candidates are tried by
// decreasing contact with the boundary, then by id.
inline std::optional<std::vector<int>> find_shelling_search(const Complex& K, std::optional<int> first)
{
    const int n = K.dimension();
    auto tops = K.cells_of_dim(n);
    if (tops.empty()) return std::nullopt;
    std::set<int> bnd;
    for (int f : boundary_facets(K)) bnd.insert(f);
    std::map<int, int> contact;
    for (int q : tops) {
        int c = 0;
        for (int f : K.cell(q).faces) c += bnd.count(f) ? 1 : 0;
        contact[q] = c;
    }
    std::sort(tops.begin(), tops.end(), [&](int a, int b) {
        if (contact[a] != contact[b]) return contact[a] > contact[b];
        return a < b;
    });

    std::set<std::vector<bool>> dead;
    std::vector<bool> used(tops.size(), false);
    std::vector<int> order;
    std::function<bool(const std::set<int>&)> go = [&](const std::set<int>& clos) {
        if (order.size() == tops.size()) return true;
        if (dead.count(used)) return false;
        for (std::size_t i = 0; i < tops.size(); ++i) {
            if (used[i]) continue;
            int q = tops[i];
            if (order.empty() && first && q != *first) continue;
            if (!order.empty()) {
                Complex P = detail::prefix_intersection(K, clos, q);
                if (!detail::cell_certificate(P)) continue;
            }
            used[i] = true;
            order.push_back(q);
            std::set<int> next = clos;
            auto c = K.closure_of(q);
            next.insert(c.begin(), c.end());
            if (go(next)) return true;
            order.pop_back();
            used[i] = false;
        }
        dead.insert(used);
        return false;
    };
    if (go({})) return order;
    return std::nullopt;
}

// Top cubes of K as a subcomplex.
inline Complex top_subcomplex(const Complex& K, const std::vector<int>& tops)
{
    Complex S = subcomplex(K, tops);
    S.set_dimension(K.dimension());
    return S;
}

inline std::optional<std::vector<int>> find_shelling(const Complex& K)
{
    if (!is_cell(K)) fail("NotACell", "the space of K does not pass the cell check");
    const int n = K.dimension();
    if (n == 2) {
        // peel boundary squares meeting the boundary in an arc while the rest stays a disk
        std::vector<int> remaining = K.cells_of_dim(n);
        std::vector<int> peeled;
        bool stuck = false;
        while (remaining.size() > 1 && !stuck) {
            stuck = true;
            std::map<int, int> map;
            Complex R = subcomplex(K, remaining, &map);
            R.set_dimension(n);
            std::set<int> bnd;
            for (int f : boundary_facets(R)) bnd.insert(f);
            for (std::size_t i = 0; i < remaining.size(); ++i) {
                int q = remaining[i];
                int rq = map.at(q);
                std::vector<int> contact;
                for (int f : R.cell(rq).faces)
                    if (bnd.count(f)) contact.push_back(f);
                if (contact.empty()) continue;
                Complex arc = subcomplex(R, contact);
                arc.set_dimension(1);
                if (connected_components(arc) != 1) continue;
                std::vector<int> rest = remaining;
                rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
                if (!is_cell(top_subcomplex(K, rest))) continue;
                peeled.push_back(q);
                remaining = std::move(rest);
                stuck = false;
                break;
            }
        }
        if (!stuck) {
            peeled.push_back(remaining[0]);
            std::reverse(peeled.begin(), peeled.end());
            if (verify_shelling(K, peeled).ok) return peeled;
        }
    }
    return find_shelling_search(K);
}

// Faces of the cube with id `cube` given as cell ids.  The order starts at
// the smallest face whose opposite face is absent.
inline std::vector<int> boundary_face_shelling(const Complex& K, int cube, const std::vector<int>& faces)
{
    const Cell& Q = K.cell(cube);
    const int n = Q.dim;
    std::map<int, int> opposite;
    std::vector<int> facet(static_cast<std::size_t>(2 * n));
    for (int axis = 0; axis < n; ++axis)
        for (int side = 0; side < 2; ++side) {
            auto ch = Complex::subchart(Q.chart, n, axis, side);
            VertexList vs(ch.begin(), ch.end());
            std::sort(vs.begin(), vs.end());
            auto id = K.find(vs, n - 1);
            if (!id) fail("MissingFace", "cube facet not present");
            facet[static_cast<std::size_t>(2 * axis + side)] = *id;
        }
    for (int axis = 0; axis < n; ++axis) {
        opposite[facet[static_cast<std::size_t>(2 * axis)]] = facet[static_cast<std::size_t>(2 * axis + 1)];
        opposite[facet[static_cast<std::size_t>(2 * axis + 1)]] = facet[static_cast<std::size_t>(2 * axis)];
    }
    std::set<int> given(faces.begin(), faces.end());
    for (int f : given)
        if (!opposite.count(f)) fail("MalformedCell", "face " + std::to_string(f) + " is not a facet of the cube");
    std::optional<int> start;
    for (int f : given)
        if (!given.count(opposite.at(f))) { start = f; break; }
    if (!start) fail("AllOppositePairsPresent", "every face has its opposite face present");
    if (given.size() == 1) return {*start};
    Complex P = subcomplex(K, std::vector<int>(given.begin(), given.end()));
    P.set_dimension(n - 1);
    std::map<VertexList, int> back;
    for (int f : given) back[K.cell(f).verts] = f;
    auto order = find_shelling_search(P, P.find(K.cell(*start).verts, n - 1));
    if (!order) fail("NotACell", "faces do not form a shellable cell");
    std::vector<int> out;
    for (int s : *order) out.push_back(back.at(P.cell(s).verts));
    return out;
}

} // namespace cellkit
