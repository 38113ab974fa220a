#include "crystalline.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "qp.hpp"

namespace netflow {

namespace {

const CrystallinePolytope& wulff_of(const Network& net, int curve) {
    const Anisotropy& a = net.aniso_of(curve);
    if (!is_crystalline(a))
        throw domain_error("crystalline operation on curve with smooth anisotropy: " +
                           net.curves[curve].id);
    return as_crystalline(a);
}

// Node value descriptor in Wulff edge coordinates.
struct Node {
    bool forced = true;
    int edge = 0;          // supporting edge of the curve's Wulff polygon
    double offset = 0.0;   // forced absolute offset on that edge
    int var = -1;          // variable index when not forced
};

struct Assembly {
    bool feasible = true;
    std::string obstruction;

    std::vector<std::vector<Node>> nodes;  // [curve][vertex]
    int nvar = 0;
    std::vector<int> var_edge;             // polygon edge per variable
    std::vector<int> var_curve;
    std::vector<double> var_lo, var_hi;

    // junction blocks: variable indices (size 3) per junction
    std::vector<std::array<int, 3>> junction_vars;
};

// intersection of two supporting faces of the same polygon, as a node value
std::optional<Node> intersect_faces(const CrystallinePolytope& B, const WulffFace& fa,
                                    const WulffFace& fb) {
    int n = B.edge_count();
    auto wrap = [&](int k) { return ((k % n) + n) % n; };
    double tol = B.boundary_tolerance();

    if (fa.is_edge && fb.is_edge) {
        if (fa.edge == fb.edge) return Node{false, fa.edge, 0.0, -1};  // free along the edge
        if (wrap(fa.edge + 1) == fb.edge)
            return Node{true, fa.edge, B.edge_length(fa.edge), -1};  // shared vertex, end of fa
        if (wrap(fb.edge + 1) == fa.edge) return Node{true, fa.edge, 0.0, -1};  // start of fa
        return std::nullopt;
    }
    // at least one face is a single vertex
    Vec2 pa = fa.a, pb = fb.a;
    if (!fa.is_edge && !fb.is_edge) {
        if (dist(pa, pb) > tol) return std::nullopt;
        return Node{true, fa.edge, 0.0, -1};
    }
    const WulffFace& edge_face = fa.is_edge ? fa : fb;
    Vec2 v = fa.is_edge ? pb : pa;
    double off = dot(v - edge_face.a, edge_face.direction());
    if (off < -tol || off > edge_face.length + tol) return std::nullopt;
    if (dist(edge_face.a + std::clamp(off, 0.0, edge_face.length) * edge_face.direction(), v) > tol)
        return std::nullopt;
    return Node{true, edge_face.edge, std::clamp(off, 0.0, edge_face.length), -1};
}

Assembly assemble(const Network& net) {
    Assembly as;
    as.nodes.resize(net.curves.size());

    auto new_var = [&](int curve, int edge) {
        const auto& B = wulff_of(net, curve);
        as.var_edge.push_back(edge);
        as.var_curve.push_back(curve);
        as.var_lo.push_back(0.0);
        as.var_hi.push_back(B.edge_length(edge));
        return as.nvar++;
    };
    auto new_pinned_var = [&](int curve, int edge, double off) {
        as.var_edge.push_back(edge);
        as.var_curve.push_back(curve);
        as.var_lo.push_back(off);
        as.var_hi.push_back(off);
        return as.nvar++;
    };

    for (size_t ci = 0; ci < net.curves.size() && as.feasible; ++ci) {
        const Curve& c = net.curves[ci];
        const auto& B = wulff_of(net, static_cast<int>(ci));
        int nseg = c.segment_count();
        int npts = static_cast<int>(c.points.size());
        as.nodes[ci].resize(npts);

        std::vector<WulffFace> faces(nseg);
        for (int s = 0; s < nseg; ++s) faces[s] = B.face_for_normal(c.seg_normal(s));

        for (int v = 0; v < npts; ++v) {
            bool has_prev = c.closed ? true : (v > 0);
            bool has_next = c.closed ? true : (v < npts - 1);
            int sprev = c.closed ? (v - 1 + nseg) % nseg : v - 1;
            int snext = c.closed ? v % nseg : v;

            std::optional<WulffFace> f_prev, f_next;
            if (has_prev) f_prev = faces[sprev];
            if (has_next) f_next = faces[snext];
            if (!has_next && c.halfline)
                f_next = B.face_for_normal(perp(normalized(c.halfline->direction)));

            Node node;
            if (f_prev && f_next) {
                auto isect = intersect_faces(B, *f_prev, *f_next);
                if (!isect) {
                    as.feasible = false;
                    as.obstruction = "no Cahn-Hoffman value at vertex " + std::to_string(v) +
                                     " of curve " + c.id + " (Wulff faces do not meet)";
                    break;
                }
                node = *isect;
                if (!node.forced) node.var = new_var(static_cast<int>(ci), node.edge);
            } else {
                const WulffFace& f = f_prev ? *f_prev : *f_next;
                if (f.is_edge) {
                    node.forced = false;
                    node.edge = f.edge;
                    node.var = new_var(static_cast<int>(ci), f.edge);
                } else {
                    // segment not parallel to any Wulff edge: pinned vertex value
                    node.forced = false;
                    node.edge = f.edge;
                    node.var = new_pinned_var(static_cast<int>(ci), f.edge, 0.0);
                }
            }
            as.nodes[ci][v] = node;
        }
    }
    if (!as.feasible) return as;

    for (size_t j = 0; j < net.junctions.size(); ++j) {
        const auto& jn = net.junctions[j];
        if (jn.ends.size() != 3) {
            as.feasible = false;
            as.obstruction = "junction " + std::to_string(j) + " is not a triple junction";
            return as;
        }
        std::array<int, 3> vars{};
        for (int i = 0; i < 3; ++i) {
            auto e = jn.ends[i];
            if (net.curves[e.curve].closed) {
                as.feasible = false;
                as.obstruction = "closed curve at junction " + std::to_string(j);
                return as;
            }
            int v = e.role == EndRole::Start ? 0 : static_cast<int>(net.curves[e.curve].points.size()) - 1;
            Node& node = as.nodes[e.curve][v];
            if (node.var < 0) {
                // forced by the curve side; pin it so the balance can still see it
                node.var = new_pinned_var(e.curve, node.edge, node.offset);
                node.forced = false;
            }
            vars[i] = node.var;
        }
        as.junction_vars.push_back(vars);
    }
    return as;
}

struct JunctionBlock {
    Eigen::MatrixXd A;  // 2 x 3
    Eigen::VectorXd b;  // 2
    Eigen::VectorXd lo, hi;
    std::array<int, 3> vars;
};

JunctionBlock junction_block(const Network& net, const Assembly& as, int j) {
    const auto& jn = net.junctions[j];
    JunctionBlock blk;
    blk.A = Eigen::MatrixXd::Zero(2, 3);
    blk.b = Eigen::VectorXd::Zero(2);
    blk.lo = Eigen::VectorXd::Zero(3);
    blk.hi = Eigen::VectorXd::Zero(3);
    blk.vars = as.junction_vars[j];
    for (int i = 0; i < 3; ++i) {
        auto e = jn.ends[i];
        const auto& B = wulff_of(net, e.curve);
        int var = blk.vars[i];
        int edge = as.var_edge[var];
        double s = end_sign(e);
        Vec2 d = B.edge_dir(edge), p = B.edge_start(edge);
        blk.A(0, i) = s * d.x;
        blk.A(1, i) = s * d.y;
        blk.b(0) -= s * p.x;
        blk.b(1) -= s * p.y;
        blk.lo(i) = as.var_lo[var];
        blk.hi(i) = as.var_hi[var];
    }
    return blk;
}

CahnHoffmanField extract_field(const Network& net, const Assembly& as, const Eigen::VectorXd& x) {
    CahnHoffmanField f;
    f.values.resize(net.curves.size());
    for (size_t ci = 0; ci < net.curves.size(); ++ci) {
        f.values[ci].resize(as.nodes[ci].size());
        for (size_t v = 0; v < as.nodes[ci].size(); ++v) {
            const Node& n = as.nodes[ci][v];
            double off = n.var >= 0 ? x(n.var) : n.offset;
            f.values[ci][v] = BoundaryPoint{n.edge, off};
        }
    }
    return f;
}

} // namespace

Vec2 CahnHoffmanField::at(const Network& net, int curve, int vertex) const {
    const auto& B = as_crystalline(net.aniso_of(curve));
    return B.point(values[curve][vertex]);
}

PhiRegularity phi_regular(const Network& net) {
    PhiRegularity out;
    Assembly as = assemble(net);
    if (!as.feasible) {
        out.obstruction = as.obstruction;
        return out;
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(as.nvar);
    for (int v = 0; v < as.nvar; ++v) x(v) = 0.5 * (as.var_lo[v] + as.var_hi[v]);
    for (size_t j = 0; j < net.junctions.size(); ++j) {
        auto blk = junction_block(net, as, static_cast<int>(j));
        auto fs = find_feasible_box(blk.A, blk.b, blk.lo, blk.hi, 1e-10);
        if (!fs.feasible) {
            out.obstruction = "no admissible triplet at junction " + std::to_string(j);
            return out;
        }
        for (int i = 0; i < 3; ++i) x(blk.vars[i]) = fs.x0(i);
    }
    out.regular = true;
    out.witness = extract_field(net, as, x);
    return out;
}

MinFieldResult min_field(const Network& net) {
    Assembly as = assemble(net);
    if (!as.feasible) throw domain_error("min_field: network is not Phi-regular: " + as.obstruction);

    const int n = as.nvar;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    double const_term = 0.0;

    for (size_t ci = 0; ci < net.curves.size(); ++ci) {
        const Curve& c = net.curves[ci];
        const auto& B = wulff_of(net, static_cast<int>(ci));
        int nseg = c.segment_count();
        int npts = static_cast<int>(c.points.size());
        for (int s = 0; s < nseg; ++s) {
            const Node& na = as.nodes[ci][s];
            const Node& nb = as.nodes[ci][(s + 1) % npts];
            double w = B.support(c.seg_normal(s)) / c.seg_length(s);
            // offsets of both node values measured along this segment's face edge;
            // nodes may be recorded on a neighbouring edge sharing the vertex
            int edge = B.face_for_normal(c.seg_normal(s)).edge;
            auto coeff = [&](const Node& nd, double& constant) -> int {
                if (nd.var >= 0 && nd.edge == edge) return nd.var;  // coefficient 1 on this var
                Vec2 p;
                if (nd.var >= 0) {
                    // pinned variable on another edge (lo==hi) or impossible free var mismatch
                    p = B.point(BoundaryPoint{nd.edge, as.var_lo[nd.var]});
                    if (as.var_hi[nd.var] - as.var_lo[nd.var] > 1e-12)
                        throw numeric_error("min_field: free node off the segment face");
                } else {
                    p = B.point(BoundaryPoint{nd.edge, nd.offset});
                }
                constant += dot(p - B.edge_start(edge), B.edge_dir(edge));
                return -1;
            };
            double ca = 0, cb = 0;
            int va = coeff(na, ca);
            int vb = coeff(nb, cb);
            // delta = (off_b - off_a), affine in the variables
            double c0 = cb - ca;
            if (va >= 0 && vb >= 0 && va == vb) continue;  // delta identically the constant 0
            // accumulate w * (c0 + x_vb - x_va)^2
            const_term += w * c0 * c0;
            if (vb >= 0) {
                H(vb, vb) += 2 * w;
                g(vb) += 2 * w * c0;
            }
            if (va >= 0) {
                H(va, va) += 2 * w;
                g(va) -= 2 * w * c0;
            }
            if (va >= 0 && vb >= 0) {
                H(va, vb) -= 2 * w;
                H(vb, va) -= 2 * w;
            }
        }
    }

    const int m = 2 * static_cast<int>(net.junctions.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd lo(n), hi(n), x0(n);
    for (int v = 0; v < n; ++v) {
        lo(v) = as.var_lo[v];
        hi(v) = as.var_hi[v];
        x0(v) = 0.5 * (lo(v) + hi(v));
    }
    for (size_t j = 0; j < net.junctions.size(); ++j) {
        auto blk = junction_block(net, as, static_cast<int>(j));
        auto fs = find_feasible_box(blk.A, blk.b, blk.lo, blk.hi, 1e-10);
        if (!fs.feasible)
            throw domain_error("min_field: network is not Phi-regular: no admissible triplet at junction " +
                               std::to_string(j));
        for (int i = 0; i < 3; ++i) {
            A(2 * j, blk.vars[i]) = blk.A(0, i);
            A(2 * j + 1, blk.vars[i]) = blk.A(1, i);
            x0(blk.vars[i]) = fs.x0(i);
        }
        b(2 * j) = blk.b(0);
        b(2 * j + 1) = blk.b(1);
    }

    MinFieldResult out;
    if (n > 0) {
        QPResult qp = solve_box_qp(H, g, A, b, lo, hi, x0);
        out.field = extract_field(net, as, qp.x);
        out.objective = qp.objective + const_term;
        out.unique = qp.unique;
    } else {
        out.field = extract_field(net, as, Eigen::VectorXd());
        out.objective = const_term;
        out.unique = true;
    }
    out.curvatures.resize(net.total_segments());
    for (int f = 0; f < net.total_segments(); ++f)
        out.curvatures[f] = segment_curvature(out.field, net, net.segment_at(f));
    return out;
}

double segment_curvature(const CahnHoffmanField& field, const Network& net, SegmentRef s) {
    const Curve& c = net.curves[s.curve];
    double len = c.seg_length(s.seg);
    if (len <= 0) throw domain_error("segment_curvature: zero-length segment");
    int npts = static_cast<int>(c.points.size());
    Vec2 na = field.at(net, s.curve, s.seg);
    Vec2 nb = field.at(net, s.curve, (s.seg + 1) % npts);
    return dot(nb - na, c.seg_tangent(s.seg)) / len;
}

double curvature_balance_residual(const Network& net, const std::vector<double>& curvatures) {
    double worst = 0.0;
    for (size_t j = 0; j < net.junctions.size(); ++j) {
        auto w = junction_height_weights(net, static_cast<int>(j));
        const auto& jn = net.junctions[j];
        double r = 0.0;
        for (int i = 0; i < 3; ++i) {
            auto s = incident_segment(net, jn.ends[i]);
            double phio = dual_value(net.aniso_of(s.curve), net.curves[s.curve].seg_normal(s.seg));
            r += w[i] * phio * curvatures[net.flat_index(s)];
        }
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

StabilityReport stability_margin(const Network& net, const MinFieldResult& minimizer) {
    StabilityReport rep;
    Assembly as = assemble(net);
    if (!as.feasible) throw domain_error("stability_margin: network is not Phi-regular");
    if (net.junctions.empty()) return rep;

    rep.margin = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < net.junctions.size(); ++j) {
        auto blk = junction_block(net, as, static_cast<int>(j));
        auto fs = find_feasible_box(blk.A, blk.b, blk.lo, blk.hi, 1e-10);
        if (!fs.feasible) throw domain_error("stability_margin: infeasible junction");

        const auto& jn = net.junctions[j];
        double jmargin = std::numeric_limits<double>::infinity();
        double scale = 1.0;
        for (int i = 0; i < 3; ++i) scale = std::max(scale, blk.hi(i) - blk.lo(i));
        double tol = 1e-9 * scale;
        bool at_vertex = false;
        for (int i = 0; i < 3; ++i) {
            auto e = jn.ends[i];
            int v = e.role == EndRole::Start ? 0 : static_cast<int>(net.curves[e.curve].points.size()) - 1;
            const auto& B = wulff_of(net, e.curve);
            BoundaryPoint bp = minimizer.field.values[e.curve][v];
            int edge = as.var_edge[blk.vars[i]];
            double xi = bp.offset;
            if (bp.edge != edge) xi = dot(B.point(bp) - B.edge_start(edge), B.edge_dir(edge));
            auto [plo, phi] = coordinate_range(fs, blk.lo, blk.hi, i);
            jmargin = std::min({jmargin, xi - plo, phi - xi});
            double edge_len = B.edge_length(edge);
            if (std::min(xi, edge_len - xi) < tol) at_vertex = true;
        }
        jmargin = std::max(jmargin, 0.0);
        rep.placements.push_back(at_vertex ? JunctionPlacement::AtVertex
                                           : (jmargin <= tol ? JunctionPlacement::OnRegionBoundary
                                                             : JunctionPlacement::Interior));
        rep.margin = std::min(rep.margin, jmargin);
    }
    rep.stable = rep.margin > 0.0;
    return rep;
}

TriodClosedForm closed_form_triod(double l1, double l2, double l3) {
    if (!(l1 > 0 && l2 > 0 && l3 > 0)) throw domain_error("closed_form_triod: lengths must be positive");
    const double s2 = std::sqrt(2.0);
    TriodClosedForm cf;
    cf.alpha = 1 / l1 + 1 / (2 * l2) + 1 / (2 * l3);
    cf.beta = 1 / (s2 * l3) - (s2 + 1) / (s2 * l2);
    cf.gamma = (3 + 2 * s2) / (4 * l2) + 1 / (4 * l3);
    double lo = 1 - 1 / s2, hi = 1 / s2;
    cf.x_min = std::clamp(-cf.beta / (2 * cf.alpha), lo, hi);
    cf.stable = ((s2 - 1) / l1 + 1 / (s2 * l3) < 1 / l2) && (1 / l2 < s2 / l1 + s2 / l3);
    return cf;
}

ThetaClosedForm closed_form_theta(const std::array<double, 11>& L) {
    for (double l : L)
        if (!(l > 0)) throw domain_error("closed_form_theta: lengths must be positive");
    // order: S11 S12 S13 S14 S15 | S21 | S31 S32 S33 S34 S35
    double s11 = L[0], s15 = L[4], s21 = L[5], s31 = L[6], s35 = L[10];
    ThetaClosedForm cf;
    cf.a11 = 1 / s11 + 1 / s21 + 1 / s31;
    cf.a22 = 1 / s15 + 1 / s21 + 1 / s35;
    cf.a12 = -1 / s21;
    cf.a1 = -1 / s11;
    cf.a2 = -1 / s35;
    // constant term: the six middle segments plus the completed squares of the
    // four junction-adjacent ones contribute 1/S11 and 1/S35 only
    cf.a0 = 1 / s11 + 1 / s35;
    for (int i : {1, 2, 3, 7, 8, 9}) cf.a0 += 1 / L[i];
    double den = cf.a11 * cf.a22 - cf.a12 * cf.a12;
    cf.x1_min = (cf.a12 * cf.a2 - cf.a22 * cf.a1) / den;
    cf.x2_min = (cf.a12 * cf.a1 - cf.a11 * cf.a2) / den;
    if (!(cf.x1_min > 0 && cf.x1_min < 1 && cf.x2_min > 0 && cf.x2_min < 1))
        throw numeric_error("closed_form_theta: minimizer left (0,1)^2");
    return cf;
}

std::optional<std::string> check_triangle_inequality(const Network& net, int samples) {
    // collect anisotropies by phase pair
    struct Entry { std::pair<int, int> phases; const Anisotropy* a; };
    std::vector<Entry> entries;
    for (const auto& c : net.curves) {
        if (!c.phases) continue;
        entries.push_back({*c.phases, &net.aniso_of(c)});
    }
    for (const auto& e_ij : entries)
        for (const auto& e_jk : entries) {
            if (e_ij.phases.second != e_jk.phases.first) continue;
            for (const auto& e_ik : entries) {
                if (e_ik.phases != std::make_pair(e_ij.phases.first, e_jk.phases.second)) continue;
                for (int s = 0; s < samples; ++s) {
                    double t = 2 * 3.14159265358979323846 * s / samples;
                    Vec2 nu = dir(t);
                    if (dual_value(*e_ij.a, nu) + dual_value(*e_jk.a, nu) <
                        dual_value(*e_ik.a, nu) - 1e-12)
                        return "triangle inequality fails for phases (" +
                               std::to_string(e_ij.phases.first) + "," +
                               std::to_string(e_ij.phases.second) + "," +
                               std::to_string(e_jk.phases.second) + ")";
                }
            }
        }
    return std::nullopt;
}

} // namespace netflow
