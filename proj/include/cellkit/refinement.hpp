#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "cellkit/complex.hpp"

namespace cellkit {

struct RefinedComplex {
    Complex base;
    int k = 0;
    Complex complex;
    std::map<int, int> ancestor; // refined maximal cell -> base maximal cell
    std::map<int, int> carrier;  // refined vertex -> smallest base cell containing it

    long factor() const { return std::lround(std::pow(3.0, k)); }
    // identity map from the base to the refinement scales distances by 3^k
    double similarity() const { return std::pow(3.0, k); }
};

namespace detail {

// A point of a cube given by multilinear weights on its corners, scaled by a
// common denominator so points on shared faces get identical keys.
using PointKey = std::vector<std::pair<int, long>>;

inline long ipow(long b, int e)
{
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

} // namespace detail

// Ref_k(K): every maximal d-cube split into 3^{dk} congruent subcubes.  Base
// vertex ids are kept; new vertices get ids above the base maximum.
inline RefinedComplex refine(const Complex& K, int k)
{
    if (K.mode() != Mode::cubical) fail("NotCubical", "refinement needs a cubical complex");
    if (k < 0) fail("BadArgument", "refinement index must be nonnegative");
    RefinedComplex R;
    R.base = K;
    R.k = k;
    R.complex = Complex(K.dimension(), Mode::cubical);
    const long N = detail::ipow(3, k);
    std::map<detail::PointKey, int> ids;
    int next = K.max_vertex_id() + 1;
    const bool embedded = K.all_coords();

    auto vertex_for = [&](const Cell& c, const std::vector<long>& a) {
        const int d = c.dim;
        std::map<int, long> w;
        for (std::size_t mask = 0; mask < c.chart.size(); ++mask) {
            long num = 1;
            for (int i = 0; i < d; ++i) num *= (mask >> i & 1u) ? a[static_cast<std::size_t>(i)] : N - a[static_cast<std::size_t>(i)];
            if (num == 0) continue;
            // rescale to the common denominator N^n
            w[c.chart[mask]] += num * detail::ipow(N, K.dimension() - d);
        }
        detail::PointKey key(w.begin(), w.end());
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int v = key.size() == 1 ? key[0].first : next++;
        ids[key] = v;
        std::vector<double> x;
        if (embedded) {
            x.assign(K.coords(key[0].first).size(), 0.0);
            const double total = static_cast<double>(detail::ipow(N, K.dimension()));
            for (auto [u, num] : key) {
                const auto& y = K.coords(u);
                for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i] * static_cast<double>(num) / total;
            }
        }
        R.complex.add_vertex(v, std::move(x));
        VertexList support;
        for (auto [u, _] : key) support.push_back(u);
        int dim = 0;
        while ((std::size_t{1} << dim) < support.size()) ++dim;
        if (auto cid = K.find(support, dim)) R.carrier[v] = *cid;
        return v;
    };

    // base vertices first so they keep their ids
    for (int v : K.vertex_ids()) {
        R.complex.add_vertex(v, K.has_coords(v) ? K.coords(v) : std::vector<double>{});
        ids[{{v, detail::ipow(N, K.dimension())}}] = v;
        R.carrier[v] = K.vertex_cell(v);
    }
    for (int m : K.maximal_cells()) {
        const Cell& c = K.cell(m);
        if (c.dim == 0) continue;
        const int d = c.dim;
        std::vector<long> a(static_cast<std::size_t>(d), 0);
        const long cubes = detail::ipow(N, d);
        for (long idx = 0; idx < cubes; ++idx) {
            long t = idx;
            for (int i = 0; i < d; ++i) {
                a[static_cast<std::size_t>(i)] = t % N;
                t /= N;
            }
            std::vector<int> chart;
            for (std::size_t mask = 0; mask < c.chart.size(); ++mask) {
                std::vector<long> b = a;
                for (int i = 0; i < d; ++i)
                    if (mask >> i & 1u) ++b[static_cast<std::size_t>(i)];
                chart.push_back(vertex_for(c, b));
            }
            R.ancestor[R.complex.add_cube(chart)] = m;
        }
    }
    return R;
}

// n-cubes that do not meet the boundary of |K|.
inline std::vector<int> core(const Complex& K)
{
    std::set<int> bv;
    const Complex B = boundary_complex(K);
    for (const auto& c : B.cells())
        if (c.dim == 0) bv.insert(c.verts[0]);
    std::vector<int> out;
    for (int q : K.cells_of_dim(K.dimension())) {
        bool touches = false;
        for (int v : K.cell(q).verts) touches = touches || bv.count(v);
        if (!touches) out.push_back(q);
    }
    return out;
}

inline std::vector<int> buffer(const Complex& K)
{
    auto c = core(K);
    std::set<int> in(c.begin(), c.end());
    std::vector<int> out;
    for (int q : K.cells_of_dim(K.dimension()))
        if (!in.count(q)) out.push_back(q);
    return out;
}

struct CenterSplit {
    RefinedComplex ref; // Ref(Q) for the closure of Q, with dimension dim Q
    int center = -1;    // c(Q)
    std::vector<int> rim;
};

// c(Q) = Core(Ref(Q)) and the remaining cubes of Ref(Q).  Works for cells
// of any positive dimension, e.g. (n-1)-faces.
inline CenterSplit center_cube(const Complex& K, int q)
{
    Complex C = subcomplex(K, {q});
    C.set_dimension(K.cell(q).dim);
    CenterSplit s;
    s.ref = refine(C, 1);
    auto c = core(s.ref.complex);
    if (c.size() != 1) fail("MalformedCell", "refined cell has no unique center cube");
    s.center = c[0];
    s.rim = buffer(s.ref.complex);
    return s;
}

// Euclidean path distance between two vertices of an embedded complex whose
// cubes are affine.  Shortest path through the vertices of Ref_j(K), moving in
// straight segments inside one base cube at a time.  A geodesic crossing c base
// cubes is approximated within 2 c sqrt(n) 3^{-j} times the largest cube side.
inline double path_distance(const Complex& K, int a, int b, int j)
{
    if (!K.all_coords()) fail("NoCoordinates", "path metric needs embedded vertices");
    K.vertex_cell(a);
    K.vertex_cell(b);
    RefinedComplex R = refine(K, j);
    const Complex& G = R.complex;
    std::map<int, std::set<int>> in_base;
    std::map<int, std::vector<int>> bases_of;
    for (auto [small, big] : R.ancestor)
        for (int v : G.cell(small).verts) in_base[big].insert(v);
    for (const auto& [big, vs] : in_base)
        for (int v : vs) bases_of[v].push_back(big);
    auto len = [&](int u, int v) {
        const auto& x = G.coords(u);
        const auto& y = G.coords(v);
        double s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(s);
    };
    std::map<int, double> dist;
    std::set<int> done;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[a] = 0;
    pq.push({0, a});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (!done.insert(u).second) continue;
        if (u == b) return d;
        for (int big : bases_of[u])
            for (int v : in_base[big]) {
                if (done.count(v)) continue;
                double nd = d + len(u, v);
                auto it = dist.find(v);
                if (it == dist.end() || nd < it->second) {
                    dist[v] = nd;
                    pq.push({nd, v});
                }
            }
    }
    return std::numeric_limits<double>::infinity();
}

struct SimplexCubes {
    Complex complex;                           // n+1 cubes, vertex id = subset bitmask
    std::vector<std::vector<VertexList>> parts; // per cube, its barycentric n-simplices
};

// Cubical structure on the barycentric subdivision of the standard n-simplex:
// the cube at vertex i is the interval of faces between {i} and the whole
// simplex.  Vertices are barycenters of faces, numbered by subset bitmask.
inline SimplexCubes simplex_to_cubes(int n)
{
    if (n < 1) fail("BadArgument", "dimension must be positive");
    SimplexCubes out;
    out.complex = Complex(n, Mode::cubical);
    const int full = (1 << (n + 1)) - 1;
    for (int s = 1; s <= full; ++s) {
        std::vector<double> x(static_cast<std::size_t>(n + 1), 0.0);
        int pop = __builtin_popcount(static_cast<unsigned>(s));
        for (int i = 0; i <= n; ++i)
            if (s >> i & 1) x[static_cast<std::size_t>(i)] = 1.0 / pop;
        out.complex.add_vertex(s, std::move(x));
    }
    for (int i = 0; i <= n; ++i) {
        std::vector<int> others;
        for (int j = 0; j <= n; ++j)
            if (j != i) others.push_back(j);
        std::vector<int> chart;
        for (int mask = 0; mask < (1 << n); ++mask) {
            int s = 1 << i;
            for (int t = 0; t < n; ++t)
                if (mask >> t & 1) s |= 1 << others[static_cast<std::size_t>(t)];
            chart.push_back(s);
        }
        out.complex.add_cube(chart);
        // maximal chains {i} = s_0 < s_1 < ... < s_n = full, one per ordering of the others
        std::vector<VertexList> chains;
        std::vector<int> perm = others;
        do {
            VertexList ch{1 << i};
            int s = 1 << i;
            for (int j : perm) {
                s |= 1 << j;
                ch.push_back(s);
            }
            std::sort(ch.begin(), ch.end());
            chains.push_back(ch);
        } while (std::next_permutation(perm.begin(), perm.end()));
        out.parts.push_back(std::move(chains));
    }
    return out;
}

} // namespace cellkit
