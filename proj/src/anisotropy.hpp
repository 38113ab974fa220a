#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vec2.hpp"

namespace netflow {

// Smooth anisotropy given through the angle function of its dual:
//   psi(theta) = phi_dual(cos theta, sin theta),
// together with two analytic derivatives. The one-homogeneous extension is
//   phi_dual(xi) = |xi| * psi(arg xi).
class SmoothAnisotropy {
public:
    using AngleFn = std::function<double(double)>;

    SmoothAnisotropy(AngleFn psi, AngleFn psi_d1, AngleFn psi_d2, std::string family = "custom",
                     std::vector<double> params = {});

    // psi(theta) = c0 + sum_k a_k cos(k_k * theta). params = [c0, a1, k1, a2, k2, ...]
    static SmoothAnisotropy cosine(const std::vector<double>& params);
    static SmoothAnisotropy euclidean();

    double psi(double theta) const { return psi_(theta); }
    double psi_d1(double theta) const { return psi_d1_(theta); }
    double psi_d2(double theta) const { return psi_d2_(theta); }

    // phi_dual(xi) for any xi (one-homogeneous extension)
    double dual(Vec2 xi) const;

    // grad phi_dual(nu) for unit nu: psi(theta) nu + psi'(theta) nu_perp
    Vec2 dual_gradient(Vec2 nu) const;

    // tau . Hess(phi_dual)(nu) tau on the unit circle: psi + psi''
    double dual_hessian_tt(Vec2 nu) const;

    // parabolic mobility of the flow: phi_dual(nu) * (psi + psi'')(nu)
    double flow_coefficient(Vec2 nu) const;

    // Checks positivity, ellipticity (psi + psi'' >= cbar > 0) and first-derivative
    // consistency on a sampling grid. Throws on violation.
    void check_elliptic(int samples = 720) const;

    const std::string& family() const { return family_; }
    const std::vector<double>& params() const { return params_; }

private:
    AngleFn psi_, psi_d1_, psi_d2_;
    std::string family_;
    std::vector<double> params_;
};

// A point of the Wulff boundary in (edge index, arclength offset) coordinates.
// Offsets run along the clockwise parametrization of the polygon boundary.
struct BoundaryPoint {
    int edge = 0;
    double offset = 0.0;
};

// Face of the Wulff polygon realizing the subdifferential of the dual norm at a
// normal direction: either a single vertex or a whole edge.
struct WulffFace {
    bool is_edge = false;
    int edge = 0;          // supporting edge when is_edge, else edge starting at the vertex
    Vec2 a;                // first point (vertex, or edge start)
    Vec2 b;                // second point (== a for a vertex face)
    double length = 0.0;   // 0 for a vertex face

    Vec2 point_at(double offset) const;
    Vec2 direction() const;  // unit edge direction (zero vector for a vertex)
};

// Pair solution of X + Y + Z = 0 on the Wulff boundary.
struct TripletPair {
    Vec2 y, z;
    BoundaryPoint y_bp, z_bp;
};

// One-parameter family of solutions along two parallel edges: for s in
// [s_lo, s_hi], Y = point(edge_y, s) and Z = point(edge_z, z_of(s)).
struct TripletFamily {
    int edge_y = 0, edge_z = 0;
    double s_lo = 0.0, s_hi = 0.0;
    double z_at_lo = 0.0, z_slope = 0.0;  // offset on edge_z: z_at_lo + z_slope*(s - s_lo)
};

struct TripletSolutions {
    std::vector<TripletPair> pairs;
    std::vector<TripletFamily> families;
};

// Crystalline anisotropy stored as its Wulff polygon B_phi (convex, origin strictly
// inside). Vertices are kept in clockwise order; the boundary parametrization is
// clockwise, so the tangent of the edge with outward normal nu equals the clockwise
// 90-degree rotation of nu.
class CrystallinePolytope {
public:
    explicit CrystallinePolytope(std::vector<Vec2> vertices);

    static CrystallinePolytope regular(int n, double side, double first_vertex_angle = 0.0);

    int edge_count() const { return static_cast<int>(verts_.size()); }
    const std::vector<Vec2>& vertices() const { return verts_; }
    Vec2 vertex(int k) const { return verts_[wrap(k)]; }
    Vec2 edge_start(int k) const { return verts_[wrap(k)]; }
    Vec2 edge_end(int k) const { return verts_[wrap(k + 1)]; }
    Vec2 edge_dir(int k) const;  // unit, clockwise
    double edge_length(int k) const;
    Vec2 edge_normal(int k) const;  // outward unit normal

    bool even() const { return even_; }
    double diameter() const { return diameter_; }
    double boundary_tolerance() const { return 1e-9 * diameter_; }

    // dual value phi_dual(xi) = max over vertices of xi . v (support function)
    double support(Vec2 xi) const;

    // gauge phi(x) = inf { t > 0 : x/t in B_phi } by ray-edge intersection
    double gauge(Vec2 x) const;

    // subdifferential of the dual norm at nu: the face maximizing v . nu
    WulffFace face_for_normal(Vec2 nu) const;

    Vec2 point(BoundaryPoint bp) const;

    // Locate a point on the boundary within tolerance 1e-9 * diameter.
    std::optional<BoundaryPoint> locate(Vec2 p) const;

    // All pairs (Y, Z) on the boundary with X + Y + Z = 0. X must lie on the
    // boundary. Families are reported where a boundary segment parallel to X is
    // longer than |X|.
    TripletSolutions solve_triplet(Vec2 X) const;

private:
    int wrap(int k) const {
        int n = edge_count();
        return ((k % n) + n) % n;
    }

    std::vector<Vec2> verts_;
    bool even_ = false;
    double diameter_ = 0.0;
};

// Closed-form admissible-triplet geometry for a regular polygon with an even
// number n >= 6 of sides of length `side`.
struct TripletParams {
    int n = 0;
    double side = 0.0;
    double theta_n = 0.0;
    double delta = 0.0;
    double c_bar = 0.0;
    double q_y = 0.0;
    double q_z = 0.0;
    double interval_a = 0.0;
    double interval_b = 0.0;
    int step = 0;  // edge steps between the designated sides
};

TripletParams triplet_params(int n, double side);

// The three designated boundary points for offset x on edge `edge_x`:
// X at offset x, Y at offset c_bar*x + q_y on edge (edge_x + step),
// Z at offset side - (-c_bar*x + q_z) on edge (edge_x - step).
// They satisfy X + Y + Z = 0.
std::array<BoundaryPoint, 3> triplet_points(const TripletParams& tp, int edge_x, double x);

using Anisotropy = std::variant<SmoothAnisotropy, CrystallinePolytope>;

inline bool is_crystalline(const Anisotropy& a) {
    return std::holds_alternative<CrystallinePolytope>(a);
}
inline const CrystallinePolytope& as_crystalline(const Anisotropy& a) {
    return std::get<CrystallinePolytope>(a);
}
inline const SmoothAnisotropy& as_smooth(const Anisotropy& a) {
    return std::get<SmoothAnisotropy>(a);
}

// phi_dual(xi) for either representation
double dual_value(const Anisotropy& a, Vec2 xi);

} // namespace netflow
