#include "anisotropy.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace netflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// SmoothAnisotropy
// ---------------------------------------------------------------------------

SmoothAnisotropy::SmoothAnisotropy(AngleFn psi, AngleFn psi_d1, AngleFn psi_d2, std::string family,
                                   std::vector<double> params)
    : psi_(std::move(psi)),
      psi_d1_(std::move(psi_d1)),
      psi_d2_(std::move(psi_d2)),
      family_(std::move(family)),
      params_(std::move(params)) {}

SmoothAnisotropy SmoothAnisotropy::cosine(const std::vector<double>& params) {
    if (params.empty() || params.size() % 2 == 0)
        throw parse_error("cosine anisotropy expects params [c0, a1, k1, a2, k2, ...]");
    double c0 = params[0];
    std::vector<std::pair<double, double>> modes;  // (amplitude, frequency)
    for (size_t i = 1; i + 1 < params.size(); i += 2) modes.push_back({params[i], params[i + 1]});
    auto psi = [c0, modes](double t) {
        double v = c0;
        for (auto [a, k] : modes) v += a * std::cos(k * t);
        return v;
    };
    auto psi1 = [modes](double t) {
        double v = 0;
        for (auto [a, k] : modes) v -= a * k * std::sin(k * t);
        return v;
    };
    auto psi2 = [modes](double t) {
        double v = 0;
        for (auto [a, k] : modes) v -= a * k * k * std::cos(k * t);
        return v;
    };
    return SmoothAnisotropy(psi, psi1, psi2, "cosine", params);
}

SmoothAnisotropy SmoothAnisotropy::euclidean() { return cosine({1.0}); }

double SmoothAnisotropy::dual(Vec2 xi) const {
    if (!finite(xi)) throw domain_error("dual_value: non-finite input");
    double n = norm(xi);
    if (n == 0.0) return 0.0;
    return n * psi_(angle_of(xi));
}

Vec2 SmoothAnisotropy::dual_gradient(Vec2 nu) const {
    if (!finite(nu)) throw domain_error("dual_gradient: non-finite input");
    if (std::abs(norm(nu) - 1.0) > 1e-8) throw domain_error("dual_gradient: input must be a unit vector");
    double t = angle_of(nu);
    return psi_(t) * nu + psi_d1_(t) * perp(nu);
}

double SmoothAnisotropy::dual_hessian_tt(Vec2 nu) const {
    double t = angle_of(nu);
    return psi_(t) + psi_d2_(t);
}

double SmoothAnisotropy::flow_coefficient(Vec2 nu) const {
    double t = angle_of(nu);
    return psi_(t) * (psi_(t) + psi_d2_(t));
}

void SmoothAnisotropy::check_elliptic(int samples) const {
    double h = 2 * kPi / samples;
    for (int i = 0; i < samples; ++i) {
        double t = i * h;
        double p = psi_(t);
        if (!(p > 1e-12)) throw domain_error("anisotropy not positive at sampled angle");
        if (!(p + psi_d2_(t) > 1e-12)) throw domain_error("anisotropy not elliptic: psi + psi'' <= 0");
        double fd = (psi_(t + h) - psi_(t - h)) / (2 * h);
        if (std::abs(fd - psi_d1_(t)) > 10 * h * h + 1e-6 * std::abs(psi_d1_(t)) + 1e-9)
            throw domain_error("anisotropy derivative inconsistent with finite differences");
    }
}

// ---------------------------------------------------------------------------
// CrystallinePolytope
// ---------------------------------------------------------------------------

Vec2 WulffFace::point_at(double offset) const {
    if (!is_edge || length == 0.0) return a;
    return a + offset * normalized(b - a);
}

Vec2 WulffFace::direction() const {
    if (!is_edge || length == 0.0) return {0, 0};
    return normalized(b - a);
}

CrystallinePolytope::CrystallinePolytope(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
    int n = static_cast<int>(verts_.size());
    if (n < 3) throw domain_error("Wulff polygon needs at least 3 vertices");
    for (auto v : verts_)
        if (!finite(v)) throw domain_error("Wulff polygon has non-finite vertex");

    // signed area: normalize to clockwise orientation
    double area2 = 0.0;
    for (int k = 0; k < n; ++k) area2 += cross(verts_[k], verts_[(k + 1) % n]);
    if (area2 == 0.0) throw domain_error("Wulff polygon is degenerate");
    if (area2 > 0.0) std::reverse(verts_.begin(), verts_.end());

    // convexity + distinct consecutive vertices (clockwise: every turn is clockwise)
    for (int k = 0; k < n; ++k) {
        Vec2 e0 = verts_[(k + 1) % n] - verts_[k];
        Vec2 e1 = verts_[(k + 2) % n] - verts_[(k + 1) % n];
        if (norm(e0) < 1e-14) throw domain_error("Wulff polygon has a zero-length edge");
        if (cross(e0, e1) > 1e-12 * norm(e0) * norm(e1))
            throw domain_error("Wulff polygon is not convex");
    }

    // origin strictly inside: for clockwise orientation, cross(edge, origin - start) < 0
    for (int k = 0; k < n; ++k) {
        Vec2 e = verts_[(k + 1) % n] - verts_[k];
        if (cross(e, Vec2{0, 0} - verts_[k]) >= -1e-12 * norm(e))
            throw domain_error("Wulff polygon must contain the origin strictly inside");
    }

    for (int k = 0; k < n; ++k)
        for (int j = k + 1; j < n; ++j) diameter_ = std::max(diameter_, dist(verts_[k], verts_[j]));

    // even (centrally symmetric) vertex-for-vertex
    even_ = (n % 2 == 0);
    if (even_) {
        double tol = 1e-9 * diameter_;
        for (int k = 0; k < n / 2; ++k)
            if (dist(verts_[k], -verts_[k + n / 2]) > tol) {
                even_ = false;
                break;
            }
    }
}

CrystallinePolytope CrystallinePolytope::regular(int n, double side, double first_vertex_angle) {
    if (n < 3) throw domain_error("regular polygon needs n >= 3");
    if (!(side > 0)) throw domain_error("regular polygon needs positive side length");
    double R = side / (2 * std::sin(kPi / n));
    double t0 = (first_vertex_angle == 0.0) ? kPi / 2 : first_vertex_angle;
    std::vector<Vec2> v;
    v.reserve(n);
    for (int k = 0; k < n; ++k) v.push_back(R * dir(t0 - 2 * kPi * k / n));  // clockwise
    return CrystallinePolytope(std::move(v));
}

Vec2 CrystallinePolytope::edge_dir(int k) const {
    return normalized(edge_end(k) - edge_start(k));
}

double CrystallinePolytope::edge_length(int k) const {
    return dist(edge_start(k), edge_end(k));
}

Vec2 CrystallinePolytope::edge_normal(int k) const {
    // clockwise boundary: the ccw-perp of the travel direction points outward
    return perp(edge_dir(k));
}

double CrystallinePolytope::support(Vec2 xi) const {
    if (!finite(xi)) throw domain_error("dual_value: non-finite input");
    double best = -1e300;
    for (auto v : verts_) best = std::max(best, dot(xi, v));
    return best;
}

double CrystallinePolytope::gauge(Vec2 x) const {
    if (!finite(x)) throw domain_error("gauge: non-finite input");
    double n = norm(x);
    if (n == 0.0) return 0.0;
    // phi(x) = max over edges of (x . n_k) / (V_k . n_k), the ray-edge intersection scale
    double best = 0.0;
    for (int k = 0; k < edge_count(); ++k) {
        Vec2 nk = edge_normal(k);
        double hk = dot(edge_start(k), nk);  // support in direction nk (> 0: origin inside)
        best = std::max(best, dot(x, nk) / hk);
    }
    return best;
}

WulffFace CrystallinePolytope::face_for_normal(Vec2 nu) const {
    if (!finite(nu) || norm(nu) == 0.0) throw domain_error("face_for_normal: bad direction");
    int n = edge_count();
    double best = -1e300;
    for (auto v : verts_) best = std::max(best, dot(nu, v));
    double tol = 1e-9 * std::max(1.0, diameter_) * norm(nu);
    std::vector<int> arg;
    for (int k = 0; k < n; ++k)
        if (dot(nu, verts_[k]) >= best - tol) arg.push_back(k);

    WulffFace f;
    if (arg.size() >= 2) {
        // find the pair forming an edge (consecutive in clockwise order)
        for (int k : arg) {
            int k1 = wrap(k + 1);
            if (std::find(arg.begin(), arg.end(), k1) != arg.end()) {
                f.is_edge = true;
                f.edge = k;
                f.a = verts_[k];
                f.b = verts_[k1];
                f.length = dist(f.a, f.b);
                return f;
            }
        }
    }
    f.is_edge = false;
    f.edge = arg.front();
    f.a = f.b = verts_[arg.front()];
    f.length = 0.0;
    return f;
}

Vec2 CrystallinePolytope::point(BoundaryPoint bp) const {
    return edge_start(bp.edge) + bp.offset * edge_dir(bp.edge);
}

std::optional<BoundaryPoint> CrystallinePolytope::locate(Vec2 p) const {
    double tol = boundary_tolerance();
    for (int k = 0; k < edge_count(); ++k) {
        Vec2 a = edge_start(k), d = edge_dir(k);
        double L = edge_length(k);
        double s = dot(p - a, d);
        if (s < -tol || s > L + tol) continue;
        s = std::clamp(s, 0.0, L);
        if (dist(a + s * d, p) <= tol) return BoundaryPoint{k, s};
    }
    return std::nullopt;
}

TripletSolutions CrystallinePolytope::solve_triplet(Vec2 X) const {
    auto on = locate(X);
    if (!on) throw domain_error("solve_triplet: X is not on the Wulff boundary");
    if (!even_) throw domain_error("solve_triplet: polytope must be even (centrally symmetric)");

    TripletSolutions out;
    Vec2 C = -X;
    int n = edge_count();
    double ptol = boundary_tolerance();
    auto seen = [&](Vec2 y, Vec2 z) {
        for (const auto& pr : out.pairs) {
            if ((dist(pr.y, y) < 10 * ptol && dist(pr.z, z) < 10 * ptol) ||
                (dist(pr.y, z) < 10 * ptol && dist(pr.z, y) < 10 * ptol))
                return true;
        }
        return false;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Vec2 a1 = edge_start(i), d1 = edge_dir(i);
            Vec2 a2 = edge_start(j), d2 = edge_dir(j);
            double L1 = edge_length(i), L2 = edge_length(j);
            Vec2 rhs = C - a1 - a2;
            double det = cross(d1, d2);
            if (std::abs(det) > 1e-12) {
                double s = cross(rhs, d2) / det;
                double t = cross(d1, rhs) / det;
                if (s >= -ptol && s <= L1 + ptol && t >= -ptol && t <= L2 + ptol) {
                    s = std::clamp(s, 0.0, L1);
                    t = std::clamp(t, 0.0, L2);
                    Vec2 y = a1 + s * d1, z = a2 + t * d2;
                    if (dist(y, z) > 10 * ptol && !seen(y, z))
                        out.pairs.push_back({y, z, {i, s}, {j, t}});
                }
            } else {
                // parallel edges: s*d1 + sgn*t*d1 = rhs requires rhs parallel to d1
                if (std::abs(cross(rhs, d1)) > ptol) continue;
                double c = dot(rhs, d1);
                double sgn = dot(d1, d2) > 0 ? 1.0 : -1.0;
                // s + sgn*t = c with s in [0,L1], t in [0,L2]
                double lo, hi;
                if (sgn > 0) {
                    lo = std::max(0.0, c - L2);
                    hi = std::min(L1, c);
                } else {
                    lo = std::max(0.0, c);
                    hi = std::min(L1, c + L2);
                }
                if (lo <= hi + ptol) {
                    TripletFamily fam;
                    fam.edge_y = i;
                    fam.edge_z = j;
                    fam.s_lo = lo;
                    fam.s_hi = std::max(lo, hi);
                    fam.z_slope = -sgn;
                    fam.z_at_lo = sgn > 0 ? (c - lo) : (lo - c);
                    out.families.push_back(fam);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// TripletParams
// ---------------------------------------------------------------------------

TripletParams triplet_params(int n, double side) {
    if (n < 6 || n % 2 != 0) throw domain_error("triplet_params: n must be even and >= 6");
    if (!(side > 0)) throw domain_error("triplet_params: side length must be positive");
    TripletParams tp;
    tp.n = n;
    tp.side = side;
    int r = n % 6;
    if (r == 0) {
        tp.theta_n = 2 * kPi / 3;
        tp.step = n / 3;
    } else if (r == 2) {  // n = 6m - 4
        tp.theta_n = 2 * kPi / 3 * (1.0 + 1.0 / n);
        tp.step = (n + 1) / 3;
    } else {  // r == 4, n = 6m - 2
        tp.theta_n = 2 * kPi / 3 * (1.0 - 1.0 / n);
        tp.step = (n - 1) / 3;
    }
    tp.delta = side / (2 * (1 - std::cos(tp.theta_n)));
    tp.c_bar = -1.0 / (2 * std::cos(tp.theta_n));
    if (r == 0) {
        tp.q_y = 0.0;
        tp.q_z = side;
        tp.interval_a = 0.0;
        tp.interval_b = side;
    } else if (r == 2) {
        tp.q_y = -tp.c_bar * tp.delta;
        tp.q_z = tp.c_bar * (side - tp.delta);
        tp.interval_a = tp.delta;
        tp.interval_b = side - tp.delta;
    } else {
        tp.q_y = side - tp.c_bar * (side - tp.delta);
        tp.q_z = side + tp.c_bar * tp.delta;
        tp.interval_a = tp.delta;
        tp.interval_b = side - tp.delta;
    }
    return tp;
}

std::array<BoundaryPoint, 3> triplet_points(const TripletParams& tp, int edge_x, double x) {
    auto wrap = [&](int k) { return ((k % tp.n) + tp.n) % tp.n; };
    double y = tp.c_bar * x + tp.q_y;
    double z = -tp.c_bar * x + tp.q_z;
    BoundaryPoint X{wrap(edge_x), x};
    BoundaryPoint Y{wrap(edge_x + tp.step), y};
    BoundaryPoint Z{wrap(edge_x - tp.step), tp.side - z};
    return {X, Y, Z};
}

double dual_value(const Anisotropy& a, Vec2 xi) {
    if (is_crystalline(a)) return as_crystalline(a).support(xi);
    return as_smooth(a).dual(xi);
}

} // namespace netflow
