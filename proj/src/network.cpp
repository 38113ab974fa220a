#include "network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "errors.hpp"

namespace netflow {

namespace {

// proper segment intersection with tolerance; touching at shared endpoints is
// filtered by the caller
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
    Vec2 r = b - a, s = d - c;
    double rxs = cross(r, s);
    Vec2 qp = c - a;
    if (std::abs(rxs) < 1e-14) {
        // parallel: overlap check
        if (std::abs(cross(qp, r)) > tol * norm(r)) return false;
        double t0 = dot(qp, r) / dot(r, r);
        double t1 = t0 + dot(s, r) / dot(r, r);
        if (t1 < t0) std::swap(t0, t1);
        return t1 > tol && t0 < 1 - tol;
    }
    double t = cross(qp, s) / rxs;
    double u = cross(qp, r) / rxs;
    return t > tol && t < 1 - tol && u > tol && u < 1 - tol;
}

Vec2 line_intersect(Vec2 p1, Vec2 n1, double d1, Vec2 p2, Vec2 n2, double d2) {
    // lines n_i . x = n_i . p_i + d_i
    double det = cross(n1, n2);
    if (std::abs(det) < 1e-14) throw numeric_error("degenerate intersection of parallel carrier lines");
    double b1 = dot(n1, p1) + d1;
    double b2 = dot(n2, p2) + d2;
    return Vec2{(b1 * n2.y - b2 * n1.y) / det, (n1.x * b2 - n2.x * b1) / det};
}

} // namespace

int Network::find_anisotropy(const std::string& id) const {
    for (size_t i = 0; i < anisotropies.size(); ++i)
        if (anisotropies[i].id == id) return static_cast<int>(i);
    return -1;
}

int Network::find_curve(const std::string& id) const {
    for (size_t i = 0; i < curves.size(); ++i)
        if (curves[i].id == id) return static_cast<int>(i);
    return -1;
}

int Network::junction_of(CurveEnd e) const {
    for (size_t j = 0; j < junctions.size(); ++j)
        for (const auto& end : junctions[j].ends)
            if (end == e) return static_cast<int>(j);
    return -1;
}

int Network::total_segments() const {
    int n = 0;
    for (const auto& c : curves) n += c.segment_count();
    return n;
}

SegmentRef Network::segment_at(int flat) const {
    for (size_t c = 0; c < curves.size(); ++c) {
        int m = curves[c].segment_count();
        if (flat < m) return {static_cast<int>(c), flat};
        flat -= m;
    }
    throw domain_error("segment index out of range");
}

int Network::flat_index(SegmentRef s) const {
    int base = 0;
    for (int c = 0; c < s.curve; ++c) base += curves[c].segment_count();
    return base + s.seg;
}

bool Network::unbounded() const {
    for (const auto& c : curves)
        if (c.halfline) return true;
    return false;
}

void Network::reconcile_junctions(double snap_tol) {
    for (auto& j : junctions) {
        for (auto e : j.ends) {
            if (e.curve < 0 || e.curve >= static_cast<int>(curves.size())) continue;
            auto& c = curves[e.curve];
            if (c.points.empty() || c.closed) continue;
            Vec2& p = e.role == EndRole::Start ? c.points.front() : c.points.back();
            if (dist(p, j.at) <= snap_tol * (1.0 + norm(j.at)))
                p = j.at;  // larger mismatches are left for validate to report
        }
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ValidationReport validate(const Network& net) {
    ValidationReport rep;
    auto add = [&](ViolationKind k, std::string d) { rep.violations.push_back({k, std::move(d)}); };

    for (const auto& c : net.curves) {
        if (c.anisotropy < 0 || c.anisotropy >= static_cast<int>(net.anisotropies.size()))
            add(ViolationKind::MissingAnisotropy, "curve " + c.id + " has no anisotropy");
        if (c.points.size() < (c.halfline ? 1u : 2u))
            add(ViolationKind::DegenerateSegment, "curve " + c.id + " has too few points");
        for (int s = 0; s + 1 < static_cast<int>(c.points.size()); ++s)
            if (dist(c.points[s], c.points[s + 1]) < 1e-14)
                add(ViolationKind::DegenerateSegment, "curve " + c.id + " repeats a node");
        if (c.closed && c.halfline)
            add(ViolationKind::DegenerateSegment, "curve " + c.id + " is closed but carries a half-line");
    }

    // junction references
    std::vector<std::vector<int>> end_use(net.curves.size());
    for (size_t j = 0; j < net.junctions.size(); ++j) {
        const auto& jn = net.junctions[j];
        if (jn.ends.size() != 3)
            add(ViolationKind::NonTripleJunction,
                "junction " + std::to_string(j) + " has " + std::to_string(jn.ends.size()) + " incident ends");
        for (auto e : jn.ends) {
            if (e.curve < 0 || e.curve >= static_cast<int>(net.curves.size())) {
                add(ViolationKind::BadJunctionRef, "junction references unknown curve");
                continue;
            }
            const auto& c = net.curves[e.curve];
            if (c.closed) {
                add(ViolationKind::BadJunctionRef, "closed curve " + c.id + " used at a junction");
                continue;
            }
            if (e.role == EndRole::End && c.halfline)
                add(ViolationKind::HalfLineAtJunction, "half-line of curve " + c.id + " ends at a junction");
            if (dist(c.endpoint(e.role), jn.at) > 1e-7 * (1.0 + norm(jn.at)))
                add(ViolationKind::BadJunctionRef, "junction position does not match endpoint of " + c.id);
        }
        // Brakke spoon: a curve looping back to the same junction together with an
        // unbounded incident curve
        bool loop = false, ray = false;
        for (size_t a = 0; a < jn.ends.size(); ++a)
            for (size_t b = a + 1; b < jn.ends.size(); ++b)
                if (jn.ends[a].curve == jn.ends[b].curve) loop = true;
        for (auto e : jn.ends)
            if (e.curve >= 0 && e.curve < static_cast<int>(net.curves.size()) &&
                net.curves[e.curve].halfline)
                ray = true;
        if (loop && ray)
            add(ViolationKind::BrakkeSpoon, "closed loop with attached half-line at junction " + std::to_string(j));
    }

    // embeddedness: pairwise proper crossings (half-lines truncated to a window)
    struct Seg { Vec2 a, b; int curve; int idx; };
    std::vector<Seg> segs;
    Window win = default_window(net, 3.0);
    for (size_t ci = 0; ci < net.curves.size(); ++ci) {
        const auto& c = net.curves[ci];
        for (int s = 0; s < c.segment_count(); ++s)
            segs.push_back({c.seg_start(s), c.seg_end(s), static_cast<int>(ci), s});
        if (c.halfline && !c.points.empty()) {
            Vec2 base = c.points.back();
            segs.push_back({base, base + c.halfline->direction * (2 * win.radius + 1.0),
                            static_cast<int>(ci), c.segment_count()});
        }
    }
    double scale = 1.0;
    for (const auto& s : segs) scale = std::max({scale, norm(s.a), norm(s.b)});
    double tol = 1e-12;
    for (size_t i = 0; i < segs.size(); ++i) {
        for (size_t k = i + 1; k < segs.size(); ++k) {
            const auto& p = segs[i];
            const auto& q = segs[k];
            if (p.curve == q.curve && std::abs(p.idx - q.idx) <= 1) continue;
            if (p.curve == q.curve && net.curves[p.curve].closed) {
                int m = net.curves[p.curve].segment_count();
                if ((p.idx + 1) % m == q.idx || (q.idx + 1) % m == p.idx) continue;
            }
            // endpoints shared at a junction are fine
            double share_tol = 1e-9 * scale;
            bool shared = dist(p.a, q.a) < share_tol || dist(p.a, q.b) < share_tol ||
                          dist(p.b, q.a) < share_tol || dist(p.b, q.b) < share_tol;
            if (shared) continue;
            if (segments_cross(p.a, p.b, q.a, q.b, tol))
                add(ViolationKind::SelfIntersection,
                    "curves " + net.curves[p.curve].id + " and " + net.curves[q.curve].id + " cross");
        }
    }

    // connectivity through junction incidences
    if (net.curves.size() > 1) {
        std::vector<int> comp(net.curves.size(), -1);
        std::queue<int> bfs;
        bfs.push(0);
        comp[0] = 0;
        while (!bfs.empty()) {
            int c = bfs.front();
            bfs.pop();
            for (const auto& jn : net.junctions) {
                bool touches = false;
                for (auto e : jn.ends) touches |= (e.curve == c);
                if (!touches) continue;
                for (auto e : jn.ends)
                    if (comp[e.curve] < 0) {
                        comp[e.curve] = 0;
                        bfs.push(e.curve);
                    }
            }
        }
        for (size_t c = 0; c < net.curves.size(); ++c)
            if (comp[c] < 0) {
                add(ViolationKind::Disconnected, "curve " + net.curves[c].id + " is not connected to the rest");
                break;
            }
    }

    return rep;
}

// ---------------------------------------------------------------------------
// Phi-length
// ---------------------------------------------------------------------------

namespace {

// length of the part of [a,b] inside the disc
double clipped_length(Vec2 a, Vec2 b, const Window& w) {
    Vec2 d = b - a;
    double L = norm(d);
    if (L == 0) return 0;
    Vec2 u = d / L;
    Vec2 rel = a - w.center;
    double beta = dot(rel, u);
    double c = norm2(rel) - w.radius * w.radius;
    double disc = beta * beta - c;
    if (disc <= 0) return 0;
    double t0 = -beta - std::sqrt(disc), t1 = -beta + std::sqrt(disc);
    t0 = std::max(t0, 0.0);
    t1 = std::min(t1, L);
    return std::max(0.0, t1 - t0);
}

} // namespace

double phi_length(const Network& net, const std::optional<Window>& window) {
    if (net.unbounded() && !window)
        throw domain_error("phi_length: unbounded network requires a window");
    double total = 0.0;
    for (const auto& c : net.curves) {
        const Anisotropy& an = net.aniso_of(c);
        for (int s = 0; s < c.segment_count(); ++s) {
            double len = window ? clipped_length(c.seg_start(s), c.seg_end(s), *window) : c.seg_length(s);
            if (len > 0) total += dual_value(an, c.seg_normal(s)) * len;
        }
        if (c.halfline) {
            Vec2 base = c.points.back();
            Vec2 far = base + c.halfline->direction * (2 * window->radius + 2 * norm(base - window->center) + 1.0);
            double len = clipped_length(base, far, *window);
            if (len > 0) total += dual_value(an, perp(normalized(c.halfline->direction))) * len;
        }
    }
    return total;
}

Window default_window(const Network& net, double margin_factor) {
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    bool any = false;
    for (const auto& c : net.curves)
        for (auto p : c.points) {
            lo.x = std::min(lo.x, p.x);
            lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x);
            hi.y = std::max(hi.y, p.y);
            any = true;
        }
    if (!any) return {Vec2{0, 0}, 1.0};
    Vec2 center = (lo + hi) * 0.5;
    double r = 0.5 * dist(lo, hi);
    return {center, margin_factor * r + 1.0};
}

// ---------------------------------------------------------------------------
// Distance vectors / parallelism
// ---------------------------------------------------------------------------

DistanceVector distance_vector(Vec2 s_point, Vec2 s_tangent, Vec2 t_point, Vec2 t_tangent) {
    Vec2 ts = normalized(s_tangent), tt = normalized(t_tangent);
    if (std::abs(cross(ts, tt)) > 1e-10)
        throw domain_error("distance_vector: segments are not parallel");
    Vec2 nu = perp(ts);
    double h = dot(t_point - s_point, nu);
    return {h * nu, h};
}

DistanceVector distance_vector(const Curve& cs, int seg_s, const Curve& ct, int seg_t) {
    return distance_vector(cs.seg_start(seg_s), cs.seg_tangent(seg_s), ct.seg_start(seg_t),
                           ct.seg_tangent(seg_t));
}

ParallelCheck is_parallel(const Network& a, const Network& b, double ang_tol) {
    auto fail = [](std::string r) { return ParallelCheck{false, std::move(r)}; };
    if (a.curves.size() != b.curves.size()) return fail("different curve counts");
    if (a.junctions.size() != b.junctions.size()) return fail("different junction counts");
    double scale = 1.0;
    for (const auto& c : a.curves)
        for (auto p : c.points) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});

    for (size_t ci = 0; ci < a.curves.size(); ++ci) {
        const auto& ca = a.curves[ci];
        const auto& cb = b.curves[ci];
        if (ca.segment_count() != cb.segment_count())
            return fail("curve " + ca.id + ": different segment counts");
        if (ca.halfline.has_value() != cb.halfline.has_value())
            return fail("curve " + ca.id + ": different half-line counts");
        if (ca.closed != cb.closed) return fail("curve " + ca.id + ": different topology");
        for (int s = 0; s < ca.segment_count(); ++s) {
            Vec2 ta = ca.seg_tangent(s), tb = cb.seg_tangent(s);
            if (std::abs(cross(ta, tb)) > ang_tol || dot(ta, tb) <= 0)
                return fail("curve " + ca.id + " segment " + std::to_string(s) + " not parallel");
        }
        if (ca.halfline) {
            Vec2 da = normalized(ca.halfline->direction), db = normalized(cb.halfline->direction);
            if (std::abs(cross(da, db)) > ang_tol || dot(da, db) <= 0)
                return fail("curve " + ca.id + ": half-line direction differs");
            // same carrier line
            Vec2 nu = perp(da);
            if (std::abs(dot(cb.points.back() - ca.points.back(), nu)) > 1e-9 * scale + 1e-12)
                return fail("curve " + ca.id + ": half-line not on the same carrier line");
        }
    }

    for (size_t j = 0; j < a.junctions.size(); ++j) {
        const auto& ja = a.junctions[j].ends;
        const auto& jb = b.junctions[j].ends;
        if (ja.size() != jb.size()) return fail("junction " + std::to_string(j) + ": different arity");
        size_t m = ja.size();
        bool ok = false;
        for (size_t r = 0; r < m && !ok; ++r) {
            bool match = true;
            for (size_t k = 0; k < m; ++k)
                if (!(ja[k] == jb[(k + r) % m])) {
                    match = false;
                    break;
                }
            ok = match;
        }
        if (!ok) return fail("junction " + std::to_string(j) + ": incident ends differ in cyclic order");
    }
    return {true, ""};
}

double network_distance(const Network& a, const Network& b) {
    auto pc = is_parallel(a, b);
    if (!pc.parallel) throw domain_error("network_distance: networks not parallel: " + pc.reason);
    double d = 0.0;
    for (size_t ci = 0; ci < a.curves.size(); ++ci)
        for (int s = 0; s < a.curves[ci].segment_count(); ++s)
            d = std::max(d, norm(distance_vector(a.curves[ci], s, b.curves[ci], s).H));
    return d;
}

// ---------------------------------------------------------------------------
// Junction geometry
// ---------------------------------------------------------------------------

SegmentRef incident_segment(const Network& net, CurveEnd e) {
    const auto& c = net.curves[e.curve];
    return {e.curve, e.role == EndRole::Start ? 0 : c.segment_count() - 1};
}

Vec2 junction_ray(const Network& net, CurveEnd e) {
    const auto& c = net.curves[e.curve];
    auto s = incident_segment(net, e);
    Vec2 t = c.seg_tangent(s.seg);
    return e.role == EndRole::Start ? t : -t;
}

std::vector<double> junction_height_weights(const Network& net, int junction) {
    const auto& jn = net.junctions[junction];
    if (jn.ends.size() != 3) throw domain_error("junction height weights need a triple junction");
    std::vector<Vec2> nus;
    for (auto e : jn.ends) {
        auto s = incident_segment(net, e);
        nus.push_back(net.curves[s.curve].seg_normal(s.seg));
    }
    return {cross(nus[1], nus[2]), cross(nus[2], nus[0]), cross(nus[0], nus[1])};
}

std::vector<double> junction_sector_angles(const Network& net, int junction) {
    const auto& jn = net.junctions[junction];
    if (jn.ends.size() != 3) throw domain_error("sector angles need a triple junction");
    constexpr double kTwoPi = 6.28318530717958647692;
    std::array<double, 3> ang;
    for (int i = 0; i < 3; ++i) ang[i] = angle_of(junction_ray(net, jn.ends[i]));
    auto ccw = [&](double from, double to) {
        double d = std::fmod(to - from, kTwoPi);
        if (d < 0) d += kTwoPi;
        return d;
    };
    std::vector<double> theta(3);
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        double arc_jk = ccw(ang[j], ang[k]);
        bool i_inside = ccw(ang[j], ang[i]) < arc_jk;
        theta[i] = i_inside ? kTwoPi - arc_jk : arc_jk;
    }
    return theta;
}

double height_constraint_residual(const Network& net, const std::vector<double>& h) {
    if (static_cast<int>(h.size()) != net.total_segments())
        throw domain_error("height vector size mismatch");
    double worst = 0.0;
    for (size_t j = 0; j < net.junctions.size(); ++j) {
        auto w = junction_height_weights(net, static_cast<int>(j));
        const auto& jn = net.junctions[j];
        double r = 0.0;
        for (int i = 0; i < 3; ++i)
            r += w[i] * h[net.flat_index(incident_segment(net, jn.ends[i]))];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Rebuild from heights
// ---------------------------------------------------------------------------

Network rebuild_from_heights(const Network& ref, const std::vector<double>& h, double tol) {
    if (static_cast<int>(h.size()) != ref.total_segments())
        throw domain_error("rebuild_from_heights: height vector size mismatch");
    double resid = height_constraint_residual(ref, h);
    if (resid > tol)
        throw domain_error("rebuild_from_heights: junction compatibility violated (residual " +
                           std::to_string(resid) + ")");

    Network out = ref;

    // new junction positions from the best-conditioned pair of incident carriers
    for (size_t j = 0; j < ref.junctions.size(); ++j) {
        const auto& jn = ref.junctions[j];
        struct Carrier { Vec2 p, nu; double h; };
        std::vector<Carrier> cs;
        for (auto e : jn.ends) {
            auto s = incident_segment(ref, e);
            const auto& c = ref.curves[s.curve];
            cs.push_back({c.seg_start(s.seg), c.seg_normal(s.seg), h[ref.flat_index(s)]});
        }
        int bi = 0, bk = 1;
        double best = -1;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                if (std::abs(cross(cs[a].nu, cs[b].nu)) > best) {
                    best = std::abs(cross(cs[a].nu, cs[b].nu));
                    bi = a;
                    bk = b;
                }
        out.junctions[j].at =
            line_intersect(cs[bi].p, cs[bi].nu, cs[bi].h, cs[bk].p, cs[bk].nu, cs[bk].h);
    }

    for (size_t ci = 0; ci < ref.curves.size(); ++ci) {
        const auto& c = ref.curves[ci];
        auto& oc = out.curves[ci];
        int nseg = c.segment_count();
        if (nseg == 0) continue;  // bare half-line: carrier fixed
        auto hs = [&](int s) { return h[ref.flat_index({static_cast<int>(ci), s})]; };

        int npts = static_cast<int>(c.points.size());
        for (int v = 0; v < npts; ++v) {
            bool has_prev = c.closed ? true : (v > 0);
            bool has_next = c.closed ? true : (v < npts - 1);
            int sprev = c.closed ? (v - 1 + nseg) % nseg : v - 1;
            int snext = c.closed ? v % nseg : v;

            if (has_prev && has_next) {
                Vec2 n0 = c.seg_normal(sprev), n1 = c.seg_normal(snext);
                if (std::abs(cross(n0, n1)) < 1e-12) {
                    // collinear neighbours: carriers must agree after the shift
                    double h0 = hs(sprev), h1 = dot(n0, n1) > 0 ? hs(snext) : -hs(snext);
                    if (std::abs(h0 - h1) > tol)
                        throw numeric_error("rebuild_from_heights: collinear segments shifted apart at node of " + c.id);
                    oc.points[v] = c.points[v] + h0 * n0;
                } else {
                    oc.points[v] = line_intersect(c.seg_start(sprev), n0, hs(sprev), c.seg_start(snext),
                                                  n1, hs(snext));
                }
                continue;
            }

            CurveEnd end{static_cast<int>(ci), v == 0 ? EndRole::Start : EndRole::End};
            int jat = ref.junction_of(end);
            if (jat >= 0) {
                oc.points[v] = out.junctions[jat].at;
            } else if (v == npts - 1 && c.halfline) {
                Vec2 nu_hl = perp(normalized(c.halfline->direction));
                Vec2 nseg_ = c.seg_normal(nseg - 1);
                if (std::abs(cross(nseg_, nu_hl)) < 1e-12) {
                    if (std::abs(hs(nseg - 1)) > tol)
                        throw numeric_error(
                            "rebuild_from_heights: segment collinear with its half-line cannot shift");
                    oc.points[v] = c.points[v];
                } else {
                    oc.points[v] = line_intersect(c.seg_start(nseg - 1), nseg_, hs(nseg - 1),
                                                  c.points[v], nu_hl, 0.0);
                }
            } else {
                // free endpoint: move normally with its segment
                int s = v == 0 ? 0 : nseg - 1;
                oc.points[v] = c.points[v] + hs(s) * c.seg_normal(s);
            }
        }

        for (int s = 0; s < nseg; ++s) {
            double signed_len = dot(oc.seg_end(s) - oc.seg_start(s), c.seg_tangent(s));
            if (signed_len <= 0)
                throw numeric_error("rebuild_from_heights: segment " + std::to_string(s) + " of " + c.id +
                                    " collapsed");
        }
    }
    return out;
}

} // namespace netflow
