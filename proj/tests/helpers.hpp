#pragma once

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "anisotropy.hpp"
#include "builders.hpp"
#include "network.hpp"

namespace netflow::testing {

constexpr double kPi = 3.14159265358979323846;

inline std::mt19937_64 make_rng(unsigned seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// finite-difference gradient of the one-homogeneous dual extension
inline Vec2 fd_dual_gradient(const SmoothAnisotropy& a, Vec2 xi, double h = 1e-5) {
    double fx = (a.dual({xi.x + h, xi.y}) - a.dual({xi.x - h, xi.y})) / (2 * h);
    double fy = (a.dual({xi.x, xi.y + h}) - a.dual({xi.x, xi.y - h})) / (2 * h);
    return {fx, fy};
}

// random valid theta length tuple (positive, closure relations satisfied)
inline std::array<double, 11> random_theta_lengths(std::mt19937_64& rng) {
    for (;;) {
        double s21 = uniform(rng, 0.6, 1.6);
        double t = uniform(rng, -0.2, 0.2);
        double s = uniform(rng, -0.2, 0.2);
        double s12 = uniform(rng, 0.6, 1.6);
        double s14 = uniform(rng, 0.6, 1.6);
        double s31 = uniform(rng, 0.6, 1.6);
        double s32 = uniform(rng, 0.6, 1.6);
        bool ok = true;
        for (double v : {s21 + t, s12 + t, s14 + t, s21 + s, s31 - s, s32 + s})
            ok = ok && v > 0.3;
        if (!ok) continue;
        return theta_lengths_from_free(s21, t, s, s12, s14, s31, s32);
    }
}

// independent brute-force minimization of the Cahn-Hoffman objective for the
// octagon triod: scan the junction offset on S1's Wulff edge, solve the other
// two offsets from the balance, and evaluate the raw objective.
struct TriodBrute {
    double objective = 1e300;
    double x = 0.0;
};

inline TriodBrute brute_force_octagon_triod(double l1, double l2, double l3, int grid) {
    auto B = CrystallinePolytope::regular(8, 1.0);
    const int seg_edge[3] = {0, 3, 5};
    const double far_off[3] = {0.0, 1.0, 0.0};
    const double len[3] = {l1, l2, l3};
    Vec2 s0 = B.edge_start(seg_edge[0]), d0 = B.edge_dir(seg_edge[0]);
    Vec2 s1 = B.edge_start(seg_edge[1]), d1 = B.edge_dir(seg_edge[1]);
    Vec2 s2 = B.edge_start(seg_edge[2]), d2 = B.edge_dir(seg_edge[2]);
    double det = cross(d1, d2);
    auto balance = [&](double p0, double& p1, double& p2) {
        Vec2 rhs = Vec2{0, 0} - (s0 + p0 * d0) - s1 - s2;
        p1 = cross(rhs, d2) / det;
        p2 = cross(d1, rhs) / det;
    };
    // scan points plus the exact parameter values where a box constraint binds
    std::vector<double> candidates;
    candidates.reserve(grid + 7);
    for (int k = 0; k <= grid; ++k) candidates.push_back(static_cast<double>(k) / grid);
    double a1, b1, a2, b2;
    balance(0.0, a1, a2);
    balance(1.0, b1, b2);
    for (double target : {0.0, 1.0}) {
        if (std::abs(b1 - a1) > 1e-14) candidates.push_back((target - a1) / (b1 - a1));
        if (std::abs(b2 - a2) > 1e-14) candidates.push_back((target - a2) / (b2 - a2));
    }
    TriodBrute best;
    for (double p0 : candidates) {
        if (p0 < -1e-12 || p0 > 1 + 1e-12) continue;
        double p1, p2;
        balance(p0, p1, p2);
        if (p1 < -1e-9 || p1 > 1 + 1e-9 || p2 < -1e-9 || p2 > 1 + 1e-9) continue;
        double obj = 0.0;
        const double ps[3] = {p0, p1, p2};
        for (int i = 0; i < 3; ++i) {
            double delta = far_off[i] - ps[i];
            obj += B.support(perp(B.edge_dir(seg_edge[i]))) * delta * delta / len[i];
        }
        if (obj < best.objective) {
            best.objective = obj;
            best.x = p0;
        }
    }
    return best;
}

// same idea for the hexagon theta: scan both junction offsets on S21's edge
struct ThetaBrute {
    double objective = 1e300;
    double x1 = 0.0, x2 = 0.0;
};

inline ThetaBrute brute_force_hexagon_theta(const std::array<double, 11>& L, int grid) {
    auto B = CrystallinePolytope::regular(6, 1.0);
    const int f1[5] = {5, 0, 1, 2, 3};
    const int f3[5] = {3, 2, 1, 0, 5};
    double phio = B.support(perp(B.edge_dir(0)));
    auto junction_offsets = [&](double x, int fa, int fb, double& pa, double& pb) {
        Vec2 rhs = Vec2{0, 0} - (B.edge_start(1) + x * B.edge_dir(1)) - B.edge_start(fa) - B.edge_start(fb);
        double det = cross(B.edge_dir(fa), B.edge_dir(fb));
        pa = cross(rhs, B.edge_dir(fb)) / det;
        pb = cross(B.edge_dir(fa), rhs) / det;
        return pa > -1e-12 && pa < 1 + 1e-12 && pb > -1e-12 && pb < 1 + 1e-12;
    };
    ThetaBrute best;
    for (int i = 0; i <= grid; ++i) {
        double x1 = static_cast<double>(i) / grid;
        double a1, b1;  // S11 on e5, S31 on e3
        if (!junction_offsets(x1, f1[0], f3[0], a1, b1)) continue;
        for (int k = 0; k <= grid; ++k) {
            double x2 = static_cast<double>(k) / grid;
            double a2, b2;  // S15 on e3, S35 on e5
            if (!junction_offsets(x2, f1[4], f3[4], a2, b2)) continue;
            double obj = (1 - a1) * (1 - a1) / L[0] + 1 / L[1] + 1 / L[2] + 1 / L[3] + a2 * a2 / L[4];
            obj += (x2 - x1) * (x2 - x1) / L[5];
            obj += b1 * b1 / L[6] + 1 / L[7] + 1 / L[8] + 1 / L[9] + (1 - b2) * (1 - b2) / L[10];
            obj *= phio;
            if (obj < best.objective) {
                best.objective = obj;
                best.x1 = x1;
                best.x2 = x2;
            }
        }
    }
    return best;
}

} // namespace netflow::testing
