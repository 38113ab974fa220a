#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anisotropy.hpp"
#include "vec2.hpp"

namespace netflow {

enum class EndRole { Start, End };

struct CurveEnd {
    int curve = -1;
    EndRole role = EndRole::Start;
    bool operator==(const CurveEnd&) const = default;
};

// Unbounded tail attached after the last point of a curve.
struct HalfLine {
    Vec2 direction;  // unit vector, pointing away from the last point
};

struct Curve {
    std::string id;
    int anisotropy = -1;                 // index into Network::anisotropies
    std::vector<Vec2> points;            // polyline nodes / parametrization samples
    bool closed = false;                 // closed loop: last point connects back to first
    std::optional<HalfLine> halfline;    // only on open curves, attached at points.back()
    std::optional<std::pair<int, int>> phases;  // (i, j) labels with i < j

    int segment_count() const {
        int n = static_cast<int>(points.size());
        if (closed) return n;  // wrap-around segment included
        return n - 1;
    }
    Vec2 seg_start(int s) const { return points[s]; }
    Vec2 seg_end(int s) const { return points[(s + 1) % points.size()]; }
    Vec2 seg_tangent(int s) const { return normalized(seg_end(s) - seg_start(s)); }
    Vec2 seg_normal(int s) const { return perp(seg_tangent(s)); }
    double seg_length(int s) const { return dist(seg_start(s), seg_end(s)); }
    Vec2 endpoint(EndRole r) const { return r == EndRole::Start ? points.front() : points.back(); }
};

struct Junction {
    Vec2 at;
    std::vector<CurveEnd> ends;  // in cyclic order
};

struct NamedAnisotropy {
    std::string id;
    Anisotropy aniso;
};

struct SegmentRef {
    int curve = 0;
    int seg = 0;
    bool operator==(const SegmentRef&) const = default;
};

struct Network {
    std::vector<NamedAnisotropy> anisotropies;
    std::vector<Curve> curves;
    std::vector<Junction> junctions;

    const Anisotropy& aniso_of(const Curve& c) const { return anisotropies[c.anisotropy].aniso; }
    const Anisotropy& aniso_of(int curve) const { return anisotropies[curves[curve].anisotropy].aniso; }

    int find_anisotropy(const std::string& id) const;
    int find_curve(const std::string& id) const;

    // junction index for a curve end, or -1
    int junction_of(CurveEnd e) const;

    // flattened segment enumeration (curve-major)
    int total_segments() const;
    SegmentRef segment_at(int flat) const;
    int flat_index(SegmentRef s) const;

    bool unbounded() const;

    // Snap junction positions onto the referenced curve endpoints (build-time
    // reconciliation; tolerance guards against inconsistent input).
    void reconcile_junctions(double snap_tol = 1e-9);
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ViolationKind {
    SelfIntersection,
    NonTripleJunction,
    Disconnected,
    HalfLineAtJunction,
    BrakkeSpoon,
    DegenerateSegment,
    MissingAnisotropy,
    BadJunctionRef,
};

struct Violation {
    ViolationKind kind;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
};

ValidationReport validate(const Network& net);

// ---------------------------------------------------------------------------
// Phi-length
// ---------------------------------------------------------------------------

struct Window {
    Vec2 center;
    double radius = 0.0;
};

// Sum over curves of the anisotropy-weighted length; polylines are measured
// exactly per segment, phi_dual(nu_S) * H1(S). Unbounded networks require a window.
double phi_length(const Network& net, const std::optional<Window>& window = std::nullopt);

// A window large enough to contain every bounded feature with margin; used for
// energy diagnostics of unbounded networks.
Window default_window(const Network& net, double margin_factor = 2.0);

// ---------------------------------------------------------------------------
// Distance vectors and parallelism
// ---------------------------------------------------------------------------

struct DistanceVector {
    Vec2 H;      // carrier-line translation, T = S + H
    double h;    // signed height H . nu_S
};

// Distance vector of segment T from segment S (carrier lines must be parallel
// within 1e-10 rad). H is normal to the common direction.
DistanceVector distance_vector(Vec2 s_point, Vec2 s_tangent, Vec2 t_point, Vec2 t_tangent);
DistanceVector distance_vector(const Curve& cs, int seg_s, const Curve& ct, int seg_t);

struct ParallelCheck {
    bool parallel = false;
    std::string reason;  // first failed requirement when not parallel
};

// Combinatorial + geometric parallelism of Definition-style networks:
// same curve/segment/half-line counts, per-segment parallel carriers with the
// same orientation, half-lines on the same carrier lines, and junctions formed
// by the same curve-ends in the same cyclic order. Correspondence is by index.
ParallelCheck is_parallel(const Network& a, const Network& b, double ang_tol = 1e-10);

// max over corresponding segments of |H|; requires is_parallel.
double network_distance(const Network& a, const Network& b);

// ---------------------------------------------------------------------------
// Junction geometry and height constraints
// ---------------------------------------------------------------------------

// Signed concurrency weights of a triple junction: the three shifted carrier
// lines meet at a point iff sum_i w_i h_i = 0, with w_i = cross(nu_j, nu_k)
// for (i,j,k) cyclic in the junction's incident order. |w_i| equals the sine
// of the sector angle between the other two segments.
std::vector<double> junction_height_weights(const Network& net, int junction);

// Sector angles theta_i between the two other incident segments (the sector
// not containing segment i), summing to 2*pi. Order matches junction ends.
std::vector<double> junction_sector_angles(const Network& net, int junction);

// incident segment of a curve end: the first or last segment of the curve
SegmentRef incident_segment(const Network& net, CurveEnd e);

// tangent of the incident segment pointing away from the junction
Vec2 junction_ray(const Network& net, CurveEnd e);

// +1 if the curve starts at this end, -1 if it ends there
inline double end_sign(CurveEnd e) { return e.role == EndRole::Start ? 1.0 : -1.0; }

// max over junctions of |sum_i w_i h_i| for per-segment heights h
double height_constraint_residual(const Network& net, const std::vector<double>& h);

// Unique parallel network whose segment carrier lines are shifted by h_i along
// their normals. Junction positions are recomputed as carrier intersections;
// half-line carrier lines stay fixed (their endpoints slide). Heights must
// satisfy every junction constraint within tol.
Network rebuild_from_heights(const Network& ref, const std::vector<double>& h, double tol = 1e-9);

} // namespace netflow
