#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cellkit/error.hpp"

namespace cellkit {

// Ball slots for simple covers in an (n-1)-cube, as a template on the unit
// cube [0,1]^{n-1}.  Slot centers sit on a grid inside [1/10, 9/10]^{n-1}.
struct PlacementScheme {
    int n = 2;
    int ell = 1;
    long mu = 0;
    double c0 = 0;
    int per_axis = 0;

    static PlacementScheme make(int n, int ell, long multiple = 10)
    {
        if (n < 2) fail("BadArgument", "placement needs n >= 2");
        PlacementScheme p;
        p.n = n;
        p.ell = ell;
        long base = n;
        for (int i = 0; i < n - 1; ++i) base *= 3;
        p.mu = multiple * base * ell;
        const double root = std::pow(static_cast<double>(p.mu), 1.0 / (n - 1));
        p.per_axis = static_cast<int>(std::ceil(root - 1e-9));
        p.c0 = 1.0 / (10.0 * root);
        return p;
    }

    // Center of slot i, i < mu, in lexicographic grid order.
    std::vector<double> center(long i) const
    {
        std::vector<double> x(static_cast<std::size_t>(n - 1));
        for (int a = 0; a < n - 1; ++a) {
            long k = i % per_axis;
            i /= per_axis;
            x[static_cast<std::size_t>(a)] = 0.1 + (static_cast<double>(k) + 0.5) * 0.8 / per_axis;
        }
        return x;
    }

    // Smallest distance between slot centers.
    double min_separation() const { return 0.8 / per_axis; }
};

struct TokenGame {
    bool ok = true;
    int rounds = 0;
    long tokens = 0;
    long max_occupancy = 0;
    std::string failure;
};

// Simulates the two rearrangements on a base (n-1)-cube subdivided into
// 3^rho cubes per axis.  Each round every token moves one ring towards the
// center (into a cube of the next ring meeting its own, the least loaded
// one), then each side cube adjacent to the outer ring sends `influx` new
// tokens into its neighbour.  Tokens take the lowest free slot; a cube with
// no free slot is a double occupancy and ends the game.
inline TokenGame simulate_rearrangements(const PlacementScheme& P, int rho, long influx)
{
    const int d = P.n - 1;
    long G = 1;
    for (int i = 0; i < rho; ++i) G *= 3;
    long cells = 1;
    for (int i = 0; i < d; ++i) cells *= G;
    const long rounds = G / 3 > 0 ? G / 3 : 1;
    auto coord = [&](long c, int a) {
        for (int i = 0; i < a; ++i) c /= G;
        return c % G;
    };
    auto ring = [&](long c) {
        long r = G;
        for (int a = 0; a < d; ++a) r = std::min({r, coord(c, a), G - 1 - coord(c, a)});
        return r; // 0 is the outermost ring
    };
    const long center_ring = rounds; // first ring inside c(q)
    std::vector<std::vector<char>> slots(static_cast<std::size_t>(cells), std::vector<char>(static_cast<std::size_t>(P.mu), 0));
    std::vector<long> load(static_cast<std::size_t>(cells), 0);
    TokenGame g;
    auto put = [&](long c) {
        auto& s = slots[static_cast<std::size_t>(c)];
        for (long i = 0; i < P.mu; ++i)
            if (!s[static_cast<std::size_t>(i)]) {
                s[static_cast<std::size_t>(i)] = 1;
                ++load[static_cast<std::size_t>(c)];
                g.max_occupancy = std::max(g.max_occupancy, load[static_cast<std::size_t>(c)]);
                return true;
            }
        return false;
    };
    // neighbours (sharing at least a vertex) one ring further in
    auto inward = [&](long c) {
        std::vector<long> out;
        const long r = ring(c);
        long span = 1;
        for (int a = 0; a < d; ++a) span *= 3;
        for (long m = 0; m < span; ++m) {
            long t = m, nc = 0, mul = 1;
            bool inside = true;
            for (int a = 0; a < d; ++a) {
                long x = coord(c, a) + (t % 3) - 1;
                t /= 3;
                if (x < 0 || x >= G) inside = false;
                nc += x * mul;
                mul *= G;
            }
            if (inside && ring(nc) == r + 1) out.push_back(nc);
        }
        return out;
    };
    for (long round = 0; round < rounds; ++round) {
        // first rearrangement: all tokens move at once into a fresh slot map
        std::vector<std::vector<char>> next(static_cast<std::size_t>(cells), std::vector<char>(static_cast<std::size_t>(P.mu), 0));
        std::vector<long> moving(static_cast<std::size_t>(cells), 0);
        for (long c = 0; c < cells; ++c) moving[static_cast<std::size_t>(c)] = load[static_cast<std::size_t>(c)];
        std::swap(slots, next);
        std::fill(load.begin(), load.end(), 0);
        for (long c = 0; c < cells; ++c) {
            long k = moving[static_cast<std::size_t>(c)];
            if (k == 0) continue;
            if (ring(c) >= center_ring) {
                for (long i = 0; i < k; ++i)
                    if (!put(c)) {
                        g.ok = false;
                        g.failure = "double occupancy in the center";
                        return g;
                    }
                continue;
            }
            auto targets = inward(c);
            for (long i = 0; i < k; ++i) {
                long best = targets[0];
                for (long t : targets)
                    if (load[static_cast<std::size_t>(t)] < load[static_cast<std::size_t>(best)]) best = t;
                if (!put(best)) {
                    g.ok = false;
                    g.failure = "double occupancy after the inward shift";
                    return g;
                }
            }
        }
        // second rearrangement: influx from the side band into the outer ring
        for (long c = 0; c < cells; ++c) {
            if (ring(c) != 0) continue;
            int sides = 0;
            for (int a = 0; a < d; ++a) sides += (coord(c, a) == 0) + (coord(c, a) == G - 1);
            for (long i = 0; i < influx * sides; ++i) {
                if (!put(c)) {
                    g.ok = false;
                    g.failure = "double occupancy in the outer ring";
                    return g;
                }
                ++g.tokens;
            }
        }
        ++g.rounds;
    }
    return g;
}

} // namespace cellkit
