#pragma once

#include <map>
#include <optional>
#include <vector>

#include "cellkit/alexander.hpp"
#include "cellkit/shelling.hpp"
#include "cellkit/triangulation.hpp"

namespace cellkit {

// Cone over the boundary of K^Delta with a single interior vertex labeled w_n.
inline AlexanderLabeling star_replacement(const Complex& K)
{
    if (!is_cell(K)) fail("NotACell", "the space of K does not pass the cell check");
    const int n = K.dimension();
    Triangulation tri = canonical_triangulation(K);
    Complex B = boundary_complex(tri.complex);
    Complex S(n, Mode::simplicial);
    std::map<int, int> lab;
    for (int v : B.vertex_ids()) {
        S.add_vertex(v, B.has_coords(v) ? B.coords(v) : std::vector<double>{});
        lab[v] = tri.origin_dim.at(v);
    }
    int apex = tri.complex.max_vertex_id() + 1;
    S.add_vertex(apex);
    lab[apex] = n;
    for (int f : B.cells_of_dim(n - 1)) {
        VertexList vs = B.cell(f).verts;
        vs.push_back(apex);
        S.add_simplex(vs);
    }
    return alexander_label(std::move(S), std::move(lab));
}

struct ReductionRun {
    AlexanderLabeling result;
    ReductionLedger ledger;
    std::vector<int> shelling;
    long initial_top = 0;
};

namespace detail {

struct Driver {
    const Complex& K;
    const Triangulation& tri;
    AlexanderLabeling C;
    ReductionLedger ledger;
    std::map<int, int> alias;

    int resolve(int v) const
    {
        auto it = alias.find(v);
        while (it != alias.end()) {
            v = it->second;
            it = alias.find(v);
        }
        return v;
    }

    int center(int cell) const { return resolve(tri.center.at(cell)); }

    void collapse(int u, int t)
    {
        std::set<int> before;
        for (int w : C.complex.vertex_ids()) before.insert(w);
        CollapseResult r = collapse_at(C, u, t);
        for (int w : before)
            if (!r.labeling.complex.has_vertex_id(w)) alias[w] = u;
        C = std::move(r.labeling);
        ledger.steps.push_back(r.step);
    }

    // Collapse the union of the d-faces S of the (d+1)-cube P into the star of
    // a single vertex; returns that vertex, which carries label d.
    int reduce_faces(int P, const std::vector<int>& S, int d)
    {
        if (S.size() == 1) return center(S[0]);
        std::vector<int> order = boundary_face_shelling(K, P, S);
        int c = center(order[0]);
        std::set<int> earlier = K.closure_of(order[0]);
        for (std::size_t j = 1; j < order.size(); ++j) {
            int f = order[j];
            std::vector<int> shared;
            for (int g : K.cell(f).faces)
                if (earlier.count(g)) shared.push_back(g);
            int u = reduce_faces(f, shared, d - 1);
            collapse(u, d);
            c = u;
            auto cl = K.closure_of(f);
            earlier.insert(cl.begin(), cl.end());
        }
        return c;
    }
};

} // namespace detail

// Reduction of K^Delta to its star-replacement along a shelling of K.  Each
// cube is merged into the star built so far by collapsing at the center of
// the shared boundary region.
inline ReductionRun cubical_reduction(const Complex& K, std::optional<std::vector<int>> order = std::nullopt)
{
    const int n = K.dimension();
    if (!order) {
        order = find_shelling(K);
        if (!order) fail("NotShellable", "no shelling order exists");
    } else if (!verify_shelling(K, *order).ok) {
        fail("NotShellable", "given order is not a shelling");
    }
    Triangulation tri = canonical_triangulation(K);
    detail::Driver drv{K, tri, alexander_label(tri), {}, {}};
    ReductionRun run;
    run.initial_top = static_cast<long>(tri.complex.count(n));
    std::set<int> earlier;
    for (std::size_t i = 0; i < order->size(); ++i) {
        int q = (*order)[i];
        if (i > 0) {
            std::vector<int> shared;
            for (int f : K.cell(q).faces)
                if (earlier.count(f)) shared.push_back(f);
            int u = drv.reduce_faces(q, shared, n - 1);
            drv.collapse(u, n);
        }
        auto cl = K.closure_of(q);
        earlier.insert(cl.begin(), cl.end());
    }
    run.result = std::move(drv.C);
    run.ledger = std::move(drv.ledger);
    run.shelling = *order;
    return run;
}

// Replay a sequence of collapses on a labeling and return the ledger.
inline ReductionRun reduce_sequence(AlexanderLabeling L, const std::vector<std::pair<int, int>>& steps)
{
    ReductionRun run;
    run.initial_top = static_cast<long>(L.complex.count(L.complex.dimension()));
    for (auto [v, t] : steps) {
        auto r = collapse_at(L, v, t);
        run.ledger.steps.push_back(r.step);
        L = std::move(r.labeling);
    }
    run.result = std::move(L);
    return run;
}

} // namespace cellkit
