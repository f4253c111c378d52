#pragma once

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "cellkit/complex.hpp"

namespace cellkit {

using Point = std::vector<int>;

// Cubical complex made of axis-aligned cubes with integer corners.  Each
// entry of `corners` is the lower corner of a cube of the given side.
inline Complex lattice_complex(int n, const std::vector<Point>& corners, int side = 1)
{
    Complex K(n, Mode::cubical);
    std::map<Point, int> id;
    auto vertex = [&](const Point& p) {
        auto it = id.find(p);
        if (it != id.end()) return it->second;
        int v = static_cast<int>(id.size());
        id[p] = v;
        std::vector<double> x(p.begin(), p.end());
        K.add_vertex(v, std::move(x));
        return v;
    };
    // number vertices in lexicographic order of position
    std::set<Point> all;
    for (const auto& c : corners)
        for (int mask = 0; mask < (1 << n); ++mask) {
            Point p = c;
            for (int i = 0; i < n; ++i)
                if (mask >> i & 1) p[static_cast<std::size_t>(i)] += side;
            all.insert(p);
        }
    for (const auto& p : all) vertex(p);
    for (const auto& c : corners) {
        std::vector<int> chart;
        for (int mask = 0; mask < (1 << n); ++mask) {
            Point p = c;
            for (int i = 0; i < n; ++i)
                if (mask >> i & 1) p[static_cast<std::size_t>(i)] += side;
            chart.push_back(id.at(p));
        }
        K.add_cube(chart);
    }
    return K;
}

inline Complex unit_cube(int n) { return lattice_complex(n, {Point(static_cast<std::size_t>(n), 0)}); }

// w x h grid of unit squares.
inline Complex grid2(int w, int h)
{
    std::vector<Point> cs;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) cs.push_back({x, y});
    return lattice_complex(2, cs);
}

inline Complex grid3(int a, int b, int c)
{
    std::vector<Point> cs;
    for (int z = 0; z < c; ++z)
        for (int y = 0; y < b; ++y)
            for (int x = 0; x < a; ++x) cs.push_back({x, y, z});
    return lattice_complex(3, cs);
}

// Circle of `around` edges times a path of `height` edges, embedded in R^3.
inline Complex cylinder(int around, int height)
{
    Complex K(2, Mode::cubical);
    auto vid = [&](int i, int j) { return j * around + ((i % around) + around) % around; };
    for (int j = 0; j <= height; ++j)
        for (int i = 0; i < around; ++i) {
            double a = 2.0 * M_PI * i / around;
            K.add_vertex(vid(i, j), {std::cos(a), std::sin(a), static_cast<double>(j)});
        }
    for (int j = 0; j < height; ++j)
        for (int i = 0; i < around; ++i) K.add_cube({vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)});
    return K;
}

// Boundary of the unit n-cube as an (n-1)-dimensional cubical complex.
inline Complex cube_boundary(int n)
{
    Complex Q = unit_cube(n);
    Complex B = boundary_complex(Q);
    return B;
}

} // namespace cellkit
