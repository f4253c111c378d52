#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cellkit/error.hpp"

namespace cellkit {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// x -> scale * A x + t with A orthogonal.
struct Similarity4 {
    Mat4 A = Mat4::Identity();
    Vec4 t = Vec4::Zero();
    double scale = 1.0;

    Vec4 apply(const Vec4& x) const { return scale * (A * x) + t; }
    Vec4 apply_linear(const Vec4& v) const { return scale * (A * v); }
    Vec4 operator()(const Vec4& x) const { return apply(x); }

    double orthogonality_error() const { return (A.transpose() * A - Mat4::Identity()).cwiseAbs().maxCoeff(); }
    double det() const { return A.determinant(); }
};

// composition: (f * g)(x) = f(g(x))
inline Similarity4 operator*(const Similarity4& f, const Similarity4& g)
{
    Similarity4 h;
    h.A = f.A * g.A;
    h.scale = f.scale * g.scale;
    h.t = f.scale * (f.A * g.t) + f.t;
    return h;
}

inline Similarity4 phi_map()
{
    Similarity4 s;
    s.A << 1, 0, 0, 0,
           0, 0, 0, 1,
           0, 0, -1, 0,
           0, 1, 0, 0;
    s.t = Vec4(0, 0, 1, 0);
    return s;
}

inline Similarity4 psi_map()
{
    Similarity4 s;
    s.A << 0, 0, 1, 0,
           0, 0, 0, 1,
           1, 0, 0, 0,
           0, 1, 0, 0;
    s.t = Vec4(0, 0, 1, 0);
    return s;
}

// rotation by 2 pi j / m in the (x3, x4)-plane
inline Similarity4 rot_map(long j, long m)
{
    Similarity4 s;
    const double a = 2.0 * M_PI * static_cast<double>(j % m) / static_cast<double>(m);
    s.A(2, 2) = std::cos(a);
    s.A(2, 3) = -std::sin(a);
    s.A(3, 2) = std::sin(a);
    s.A(3, 3) = std::cos(a);
    return s;
}

inline Similarity4 scale_map(double b)
{
    Similarity4 s;
    s.scale = b;
    return s;
}

inline Vec4 phi(const Vec4& x) { return phi_map()(x); }
inline Vec4 psi(const Vec4& x) { return psi_map()(x); }
inline Vec4 rot(long j, long m, const Vec4& x) { return rot_map(j, m)(x); }

enum class Pattern { T, Ttilde };

inline const char* to_string(Pattern p) { return p == Pattern::T ? "T" : "Ttilde"; }

struct NecklaceParams {
    double b = 0.05;
    long m = 1700;
    double rho = 0; // 0: take min(c0, c1) / 10 from the empirical constants
    double c0 = 0, c1 = 0;

    double beta() const { return 2.0 * M_PI / static_cast<double>(m); }
    bool m_in_range() const { return 4 * b * b / 3 <= beta() && beta() <= 3 * b * b / 2; }
    bool rho_condition() const { return rho > 0 && b < rho / 10; }
    // Jacobian exponent of the branched cover built on the necklace
    double jacobian_exponent() const { return -4.0 * std::log(2.0 * static_cast<double>(m) * b) / std::log(b); }
};

inline void check_params(const NecklaceParams& P)
{
    if (!(P.b > 0 && P.b < 1)) fail("ParamsInvalid", "b must lie in (0, 1)");
    if (P.m < 4 || P.m % 2 != 0) fail("ParamsInvalid", "m must be an even integer >= 4");
    if (!P.m_in_range())
        fail("ParamsInvalid", "4b^2/3 <= 2pi/m <= 3b^2/2 fails for b = " + std::to_string(P.b) + ", m = " + std::to_string(P.m));
    if (P.rho < 0) fail("ParamsInvalid", "rho must be nonnegative");
}

// kappa(phi, theta) and kappa~(psi, theta)
inline Vec4 core_point(Pattern p, double b, double u, double v)
{
    if (p == Pattern::T) {
        const double r = 1 + b * std::sin(u);
        return Vec4(0, b * std::cos(u), r * std::cos(v), r * std::sin(v));
    }
    return Vec4(b * std::cos(u), b * std::sin(u), std::cos(v), std::sin(v));
}

inline Eigen::Matrix<double, 4, 2> core_jacobian(Pattern p, double b, double u, double v)
{
    Eigen::Matrix<double, 4, 2> J;
    if (p == Pattern::T) {
        const double r = 1 + b * std::sin(u);
        J.col(0) << 0, -b * std::sin(u), b * std::cos(u) * std::cos(v), b * std::cos(u) * std::sin(v);
        J.col(1) << 0, 0, -r * std::sin(v), r * std::cos(v);
    } else {
        J.col(0) << -b * std::sin(u), b * std::cos(u), 0, 0;
        J.col(1) << 0, 0, -std::sin(v), std::cos(v);
    }
    return J;
}

// Marked meridian: gamma for T, gamma~ for T~.
inline Vec4 meridian_point(Pattern p, double b, double t)
{
    if (p == Pattern::T) return Vec4(0, b * std::cos(t), 1 + b * std::sin(t), 0);
    return Vec4(b * std::cos(t), b * std::sin(t), 1, 0);
}

inline Vec4 meridian_tangent(Pattern p, double b, double t)
{
    if (p == Pattern::T) return Vec4(0, -b * std::sin(t), b * std::cos(t), 0);
    return Vec4(-b * std::sin(t), b * std::cos(t), 0, 0);
}

inline double dist_to_core(const Vec4& x, Pattern p, double b)
{
    const double r = std::hypot(x[2], x[3]);
    if (p == Pattern::T) return std::hypot(x[0], std::hypot(x[1], r - 1) - b);
    return std::hypot(std::hypot(x[0], x[1]) - b, r - 1);
}

struct Tube {
    std::vector<int> word;
    Similarity4 S;
    Pattern pattern = Pattern::T;
};

struct TubeSystem {
    NecklaceParams params;
    int k = 0;
    std::vector<Tube> tubes;
};

inline Pattern child_pattern(long j) { return j % 2 == 0 ? Pattern::T : Pattern::Ttilde; }

// rho^j o Phi o lambda inside T, rho^j o Psi o lambda inside T~
inline Similarity4 child_map(Pattern parent, long j, const NecklaceParams& P)
{
    return rot_map(j, P.m) * (parent == Pattern::T ? phi_map() : psi_map()) * scale_map(P.b);
}

// The m children of a tube, or the first `cap` of them when cap > 0.
inline std::vector<Tube> child_tubes(const Tube& parent, const NecklaceParams& P, long cap = 0)
{
    const long count = cap > 0 ? std::min(cap, P.m) : P.m;
    std::vector<Tube> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long j = 1; j <= count; ++j) {
        Tube t;
        t.word = parent.word;
        t.word.push_back(static_cast<int>(j));
        t.S = parent.S * child_map(parent.pattern, j, P);
        t.pattern = child_pattern(j);
        out.push_back(std::move(t));
    }
    return out;
}

inline TubeSystem generate(int k, const NecklaceParams& P, long cap = 0)
{
    check_params(P);
    if (k < 0) fail("BadArgument", "level must be nonnegative");
    const double per = static_cast<double>(cap > 0 ? std::min(cap, P.m) : P.m);
    if (std::pow(per, k) > 2e6) fail("BadArgument", "level too deep for the child count; pass a cap");
    TubeSystem sys;
    sys.params = P;
    sys.k = k;
    sys.tubes.push_back(Tube{});
    for (int level = 0; level < k; ++level) {
        std::vector<Tube> next;
        for (const auto& t : sys.tubes) {
            auto c = child_tubes(t, P, cap);
            next.insert(next.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
        }
        sys.tubes = std::move(next);
    }
    return sys;
}

// -- distances between level-1 cores ------------------------------------------

enum class Family { Phi, Psi }; // children of T or of T~

// Core torus tau_j (or tau~_j) as a map of the model core.
inline Similarity4 core_map(Family f, long j, const NecklaceParams& P)
{
    return child_map(f == Family::Phi ? Pattern::T : Pattern::Ttilde, j, P);
}

struct MinResult {
    double dist = 0;
    int converged = 0;
    int starts = 0;
    Eigen::Vector4d angles = Eigen::Vector4d::Zero();
};

// Distance between two embedded core tori by multistart damped Newton over the
// four angles.  Converged = gradient norm below 1e-10 within 500 iterations.
inline MinResult torus_distance(const Similarity4& S1, Pattern p1, const Similarity4& S2, Pattern p2, double b,
                                const std::vector<Eigen::Vector4d>& starts)
{
    const double L = std::min(S1.scale, S2.scale) * b; // meridian radius of the smaller torus
    auto residual = [&](const Eigen::Vector4d& w) {
        return Vec4((S1(core_point(p1, b, w[0], w[1])) - S2(core_point(p2, b, w[2], w[3]))) / L);
    };
    auto value = [&](const Eigen::Vector4d& w) { return residual(w).squaredNorm(); };
    auto gradient = [&](const Eigen::Vector4d& w) {
        Eigen::Matrix4d J;
        J.leftCols<2>() = S1.scale * S1.A * core_jacobian(p1, b, w[0], w[1]) / L;
        J.rightCols<2>() = -S2.scale * S2.A * core_jacobian(p2, b, w[2], w[3]) / L;
        return Eigen::Vector4d(2 * J.transpose() * residual(w));
    };
    MinResult best;
    best.dist = std::numeric_limits<double>::infinity();
    best.starts = static_cast<int>(starts.size());
    for (const auto& s : starts) {
        Eigen::Vector4d w = s;
        double f = value(w);
        double mu = 1e-3;
        bool ok = false;
        for (int it = 0; it < 500; ++it) {
            Eigen::Vector4d g = gradient(w);
            if (g.norm() < 1e-10) {
                ok = true;
                break;
            }
            Eigen::Matrix4d H;
            const double h = 1e-6;
            for (int a = 0; a < 4; ++a) {
                Eigen::Vector4d e = Eigen::Vector4d::Zero();
                e[a] = h;
                H.col(a) = (gradient(w + e) - gradient(w - e)) / (2 * h);
            }
            H = 0.5 * (H + H.transpose());
            bool moved = false;
            for (int tries = 0; tries < 40 && !moved; ++tries) {
                Eigen::Vector4d step = (H + mu * Eigen::Matrix4d::Identity()).ldlt().solve(-g);
                double nf = value(w + step);
                if (std::isfinite(nf) && nf <= f) {
                    w += step;
                    f = nf;
                    mu = std::max(mu / 3, 1e-12);
                    moved = true;
                } else {
                    mu *= 4;
                }
            }
            if (!moved) {
                ok = gradient(w).norm() < 1e-10;
                break;
            }
        }
        if (ok) ++best.converged;
        const double d = std::sqrt(f) * L;
        if (d < best.dist) {
            best.dist = d;
            best.angles = w;
        }
    }
    if (best.converged == 0) fail("MinimizationNotConverged", "no start reached a stationary point");
    return best;
}

inline std::vector<Eigen::Vector4d> random_starts(int count, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0, 2 * M_PI);
    std::vector<Eigen::Vector4d> out;
    for (int i = 0; i < count; ++i) out.emplace_back(U(rng), U(rng), U(rng), U(rng));
    return out;
}

struct PairClass {
    long i = 0, j = 0;
    double dist = 0;
    int converged = 0;
};

struct DisjointnessReport {
    Family family = Family::Phi;
    double min_dist = 0;
    double c_emp = 0; // min_dist / b^2
    long pruned = 0;  // classes ruled out by the axle bound
    std::vector<PairClass> classes;
    double equivariance_error = 0;
};

// Lower bound for dist(tau_i, tau_{i+k}): every core lies within b^2 of its
// axle, and the axles sit on rays at angle k beta apart with radius >= 1 - b.
inline double axle_bound(const NecklaceParams& P, long k)
{
    const long kk = std::min(k, P.m - k);
    const double a = P.beta() * static_cast<double>(kk);
    const double sep = (1 - P.b) * (a < M_PI / 2 ? std::sin(a) : 1.0);
    return sep - 2 * P.b * P.b;
}

// Minimum core distance over representative pairs: by rho^2 symmetry only the
// parity of i and the offset j - i matter.
inline DisjointnessReport verify_disjointness(const NecklaceParams& P, Family f, int starts = 32, unsigned seed = 0)
{
    check_params(P);
    DisjointnessReport R;
    R.family = f;
    const auto S0 = random_starts(starts, seed);
    const double b = P.b;
    std::vector<long> offsets;
    for (long k = 1; k < P.m; ++k) offsets.push_back(k);
    // nearest axles first so the bound prunes early
    std::stable_sort(offsets.begin(), offsets.end(), [&](long x, long y) { return std::min(x, P.m - x) < std::min(y, P.m - y); });
    R.min_dist = std::numeric_limits<double>::infinity();
    for (long k : offsets) {
        if (axle_bound(P, k) >= R.min_dist) {
            R.pruned += 2;
            continue;
        }
        for (long i : {P.m, 1L}) {
            const long j = (i + k - 1) % P.m + 1;
            auto mr = torus_distance(core_map(f, i, P), child_pattern(i), core_map(f, j, P), child_pattern(j), b, S0);
            R.classes.push_back({i, j, mr.dist, mr.converged});
            R.min_dist = std::min(R.min_dist, mr.dist);
        }
    }
    R.c_emp = R.min_dist / (b * b);
    // rotation by rho^2 maps tau_i to tau_{i+2}
    for (std::size_t c = 0; c < R.classes.size() && c < 8; ++c) {
        const long i = R.classes[c].i % P.m + 2, j = R.classes[c].j % P.m + 2;
        auto mr = torus_distance(core_map(f, i, P), child_pattern(i), core_map(f, j, P), child_pattern(j), b, S0);
        R.equivariance_error = std::max(R.equivariance_error, std::abs(mr.dist - R.classes[c].dist));
    }
    return R;
}

struct EmpiricalConstants {
    std::vector<double> bs, c0, c1;
    double variation = 0; // (max - min) / max over the grid, worst of c0 and c1
    bool stable = false;
};

// A conforming m for b: the even integer nearest the middle of the allowed range.
inline long middle_m(double b)
{
    const double lo = 2 * M_PI / (3 * b * b / 2), hi = 2 * M_PI / (4 * b * b / 3);
    long m = static_cast<long>(std::llround((lo + hi) / 4)) * 2;
    if (m < 4) m = 4;
    return m;
}

inline EmpiricalConstants empirical_constants(const std::vector<double>& bs, int starts = 32, unsigned seed = 0)
{
    EmpiricalConstants E;
    for (double b : bs) {
        NecklaceParams P;
        P.b = b;
        P.m = middle_m(b);
        E.bs.push_back(b);
        E.c0.push_back(verify_disjointness(P, Family::Phi, starts, seed).c_emp);
        E.c1.push_back(verify_disjointness(P, Family::Psi, starts, seed).c_emp);
    }
    auto spread = [](const std::vector<double>& v) {
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return (*hi - *lo) / *hi;
    };
    if (!bs.empty()) E.variation = std::max(spread(E.c0), spread(E.c1));
    E.stable = !bs.empty() && E.variation < 0.2;
    return E;
}

// Fill in c0, c1 and rho = min(c0, c1) / 10 from the disjointness runs at P.b.
inline NecklaceParams with_constants(NecklaceParams P, int starts = 32, unsigned seed = 0)
{
    check_params(P);
    if (P.c0 <= 0) P.c0 = verify_disjointness(P, Family::Phi, starts, seed).c_emp;
    if (P.c1 <= 0) P.c1 = verify_disjointness(P, Family::Psi, starts, seed).c_emp;
    if (P.rho <= 0) P.rho = std::min(P.c0, P.c1) / 10;
    return P;
}

struct ContainmentReport {
    double inequality_lhs = 0, inequality_rhs = 0; // rho b^2 + b^2 < rho b / 5
    bool inequality = false;
    double max_core_dist = 0; // over both parents and both child patterns
    double ratio = 0;         // max_core_dist / b^2
    bool tubes_inside = false; // max_core_dist + rho b^2 < rho b
    long samples = 0;
};

// Samples the cores of the children at model position against the parent core.
// Rotations fix kappa and kappa~, so tau_m and rho^{-1} tau_1 cover every child.
inline ContainmentReport verify_containment(const NecklaceParams& P, int per_axis = 400, long budget = 10000000)
{
    check_params(P);
    if (P.rho <= 0) fail("ParamsInvalid", "containment needs rho");
    const long total = 4L * per_axis * per_axis;
    if (total > budget) fail("SamplingBudgetExceeded", std::to_string(total) + " samples exceed the budget of " + std::to_string(budget));
    ContainmentReport R;
    const double b = P.b;
    R.inequality_lhs = P.rho * b * b + b * b;
    R.inequality_rhs = P.rho * b / 5;
    R.inequality = R.inequality_lhs < R.inequality_rhs;
    for (Pattern parent : {Pattern::T, Pattern::Ttilde})
        for (Pattern child : {Pattern::T, Pattern::Ttilde}) {
            const Similarity4 S = (parent == Pattern::T ? phi_map() : psi_map()) * scale_map(b);
            for (int a = 0; a < per_axis; ++a)
                for (int c = 0; c < per_axis; ++c) {
                    const double u = 2 * M_PI * a / per_axis, v = 2 * M_PI * c / per_axis;
                    R.max_core_dist = std::max(R.max_core_dist, dist_to_core(S(core_point(child, b, u, v)), parent, b));
                    ++R.samples;
                }
        }
    R.ratio = R.max_core_dist / (b * b);
    R.tubes_inside = R.max_core_dist + P.rho * b * b < P.rho * b;
    return R;
}

// -- linking -------------------------------------------------------------------

// sigma_j (Phi family) or sigma~_j (Psi family): image of the marked meridian
inline Similarity4 circle_map(Family f, long j, const NecklaceParams& P) { return core_map(f, j, P); }

// Gauss linking integral of sigma_i and sigma_j after dropping x2, which
// vanishes on every sigma.  Trapezoid rule with `nodes` points per circle.
inline double linking_number(Family f, long i, long j, const NecklaceParams& P, int nodes)
{
    const Similarity4 A = circle_map(f, i, P), B = circle_map(f, j, P);
    const Pattern pa = child_pattern(i), pb = child_pattern(j);
    auto proj = [](const Vec4& x) { return Eigen::Vector3d(x[0], x[2], x[3]); };
    std::vector<Eigen::Vector3d> ra, ta, rb, tb;
    for (int k = 0; k < nodes; ++k) {
        const double t = 2 * M_PI * k / nodes;
        const Vec4 xa = A(meridian_point(pa, P.b, t)), xb = B(meridian_point(pb, P.b, t));
        if (std::abs(xa[1]) > 1e-12 || std::abs(xb[1]) > 1e-12) fail("IntegralNotConverged", "circle leaves the 3-flat x2 = 0");
        ra.push_back(proj(xa));
        rb.push_back(proj(xb));
        ta.push_back(proj(A.apply_linear(meridian_tangent(pa, P.b, t))));
        tb.push_back(proj(B.apply_linear(meridian_tangent(pb, P.b, t))));
    }
    double sum = 0;
    for (int a = 0; a < nodes; ++a)
        for (int c = 0; c < nodes; ++c) {
            const Eigen::Vector3d d = ra[static_cast<std::size_t>(a)] - rb[static_cast<std::size_t>(c)];
            const double n = d.norm();
            sum += d.dot(ta[static_cast<std::size_t>(a)].cross(tb[static_cast<std::size_t>(c)])) / (n * n * n);
        }
    const double h = 2 * M_PI / nodes;
    return sum * h * h / (4 * M_PI);
}

struct LinkEntry {
    long i = 0, j = 0;
    double lk = 0;
    int expected = 0; // |lk| expected: 1 for consecutive indices mod m
};

struct LinkingReport {
    Family family = Family::Phi;
    std::vector<LinkEntry> entries;
    double max_error = 0;
    bool pass = false;
};

inline LinkingReport verify_linking(const NecklaceParams& P, Family f, int nodes = 1000, double tol = 1e-3)
{
    check_params(P);
    LinkingReport R;
    R.family = f;
    std::vector<std::pair<long, long>> pairs;
    for (long i : {1L, 2L})
        for (long k : {1L, 2L, 3L}) pairs.push_back({i, (i + k - 1) % P.m + 1});
    pairs.push_back({P.m, 1});
    for (auto [i, j] : pairs) {
        const double lk = linking_number(f, i, j, P, nodes);
        const double lk2 = linking_number(f, i, j, P, 2 * nodes);
        if (std::abs(lk - lk2) > tol / 10) fail("IntegralNotConverged", "quadrature unstable for pair " + std::to_string(i) + "," + std::to_string(j));
        long d = std::abs(i - j);
        d = std::min(d, P.m - d);
        LinkEntry e{i, j, lk2, d == 1 ? 1 : 0};
        R.max_error = std::max(R.max_error, std::abs(std::abs(e.lk) - e.expected));
        R.entries.push_back(e);
    }
    R.pass = R.max_error <= tol;
    return R;
}

// -- export --------------------------------------------------------------------

// One polyline per tube: the image of its marked meridian.
inline void export_csv(const TubeSystem& sys, std::ostream& out, int samples = 64)
{
    if (sys.tubes.empty()) return;
    out << "tube,point,x1,x2,x3,x4\n";
    for (std::size_t t = 0; t < sys.tubes.size(); ++t) {
        const auto& tube = sys.tubes[t];
        for (int s = 0; s < samples; ++s) {
            const Vec4 x = tube.S(meridian_point(tube.pattern, sys.params.b, 2 * M_PI * s / samples));
            out << t << ',' << s << ',' << x[0] << ',' << x[1] << ',' << x[2] << ',' << x[3] << '\n';
        }
    }
}

// Core tori as quad meshes, projected to (x1, x3, x4).
inline void export_obj(const TubeSystem& sys, std::ostream& out, int grid = 24)
{
    if (sys.tubes.empty()) return;
    out << "# core tori projected to (x1, x3, x4)\n";
    long base = 1;
    for (std::size_t t = 0; t < sys.tubes.size(); ++t) {
        const auto& tube = sys.tubes[t];
        out << "o tube" << t << '\n';
        for (int a = 0; a < grid; ++a)
            for (int c = 0; c < grid; ++c) {
                const Vec4 x = tube.S(core_point(tube.pattern, sys.params.b, 2 * M_PI * a / grid, 2 * M_PI * c / grid));
                out << "v " << x[0] << ' ' << x[2] << ' ' << x[3] << '\n';
            }
        for (int a = 0; a < grid; ++a)
            for (int c = 0; c < grid; ++c) {
                auto id = [&](int p, int q) { return base + ((p % grid) * grid + (q % grid)); };
                out << "f " << id(a, c) << ' ' << id(a + 1, c) << ' ' << id(a + 1, c + 1) << ' ' << id(a, c + 1) << '\n';
            }
        base += static_cast<long>(grid) * grid;
    }
}

// Closed curves where the core tori meet the 3-flat x2 = 0, by marching
// squares on the parameter torus.
inline std::vector<std::vector<Vec4>> slice_x2(const TubeSystem& sys, int grid = 64)
{
    std::vector<std::vector<Vec4>> curves;
    const double b = sys.params.b;
    for (const auto& tube : sys.tubes) {
        auto pt = [&](int a, int c) { return tube.S(core_point(tube.pattern, b, 2 * M_PI * a / grid, 2 * M_PI * c / grid)); };
        std::vector<double> val(static_cast<std::size_t>(grid * grid));
        for (int a = 0; a < grid; ++a)
            for (int c = 0; c < grid; ++c) {
                double v = pt(a, c)[1];
                if (v == 0) v = 1e-300; // keep the level set off the grid nodes
                val[static_cast<std::size_t>(a * grid + c)] = v;
            }
        auto at = [&](int a, int c) { return val[static_cast<std::size_t>(((a % grid + grid) % grid) * grid + ((c % grid + grid) % grid))]; };
        // crossing on edge (a,c)-(a+1,c) has key 2*(a*grid+c), on (a,c)-(a,c+1) key 2*(a*grid+c)+1
        auto key = [&](int a, int c, int dir) { return 2L * (((a % grid + grid) % grid) * grid + ((c % grid + grid) % grid)) + dir; };
        auto crossing = [&](long k) {
            const int cell = static_cast<int>(k / 2), dir = static_cast<int>(k % 2);
            const int a = cell / grid, c = cell % grid;
            const int a2 = dir == 0 ? a + 1 : a, c2 = dir == 0 ? c : c + 1;
            const double s = at(a, c) / (at(a, c) - at(a2, c2));
            const Vec4 x = pt(a, c), y = pt(a2 % grid, c2 % grid);
            return Vec4(x + s * (y - x));
        };
        std::map<long, std::vector<long>> link;
        for (int a = 0; a < grid; ++a)
            for (int c = 0; c < grid; ++c) {
                std::vector<long> ks;
                const long e[4] = {key(a, c, 0), key(a, c + 1, 0), key(a, c, 1), key(a + 1, c, 1)};
                const double v[4][2] = {{at(a, c), at(a + 1, c)}, {at(a, c + 1), at(a + 1, c + 1)}, {at(a, c), at(a, c + 1)}, {at(a + 1, c), at(a + 1, c + 1)}};
                for (int q = 0; q < 4; ++q)
                    if ((v[q][0] < 0) != (v[q][1] < 0)) ks.push_back(e[q]);
                if (ks.size() == 2) {
                    link[ks[0]].push_back(ks[1]);
                    link[ks[1]].push_back(ks[0]);
                } else if (ks.size() == 4) {
                    // saddle: pair by the sign of the cell center
                    const double mid = at(a, c) + at(a + 1, c) + at(a, c + 1) + at(a + 1, c + 1);
                    const bool pos = (mid > 0) == (at(a, c) > 0);
                    // edges in order: bottom(0), top(1), left(2), right(3)
                    std::pair<long, long> p1 = pos ? std::pair{ks[0], ks[3]} : std::pair{ks[0], ks[2]};
                    std::pair<long, long> p2 = pos ? std::pair{ks[2], ks[1]} : std::pair{ks[3], ks[1]};
                    for (auto [x, y] : {p1, p2}) {
                        link[x].push_back(y);
                        link[y].push_back(x);
                    }
                }
            }
        std::set<long> seen;
        for (const auto& [start, _] : link) {
            if (seen.count(start)) continue;
            std::vector<Vec4> curve;
            long prev = -1, cur = start;
            while (!seen.count(cur)) {
                seen.insert(cur);
                curve.push_back(crossing(cur));
                long nxt = -1;
                for (long n : link[cur])
                    if (n != prev && !seen.count(n)) {
                        nxt = n;
                        break;
                    }
                if (nxt == -1) break;
                prev = cur;
                cur = nxt;
            }
            curves.push_back(std::move(curve));
        }
    }
    return curves;
}

} // namespace cellkit
