#include "smooth_flow.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "errors.hpp"

namespace netflow {

const SmoothAnisotropy& SmoothState::aniso_of(const DiscreteCurve& c) const {
    const Anisotropy& a = anisotropies[c.aniso].aniso;
    if (!std::holds_alternative<SmoothAnisotropy>(a))
        throw domain_error("smooth flow on curve with crystalline anisotropy: " + c.id);
    return std::get<SmoothAnisotropy>(a);
}

Network SmoothState::as_network() const {
    Network net;
    net.anisotropies = anisotropies;
    for (const auto& c : curves) {
        Curve nc;
        nc.id = c.id;
        nc.anisotropy = c.aniso;
        nc.points = c.nodes;
        nc.closed = c.closed;
        if (c.halfline_dir) nc.halfline = HalfLine{*c.halfline_dir};
        net.curves.push_back(std::move(nc));
    }
    net.junctions = junctions;
    return net;
}

SmoothState make_smooth_state(const Network& net) {
    SmoothState st;
    st.anisotropies = net.anisotropies;
    for (size_t ci = 0; ci < net.curves.size(); ++ci) {
        const Curve& c = net.curves[ci];
        DiscreteCurve dc;
        dc.id = c.id;
        dc.aniso = c.anisotropy;
        dc.nodes = c.points;
        dc.closed = c.closed;
        dc.junction_start = net.junction_of({static_cast<int>(ci), EndRole::Start});
        dc.junction_end = net.junction_of({static_cast<int>(ci), EndRole::End});
        if (c.halfline) {
            dc.halfline_dir = normalized(c.halfline->direction);
            dc.halfline_base = c.points.back();
        }
        if (dc.nodes.size() < 3 && !dc.closed)
            throw domain_error("smooth flow needs at least 3 nodes per curve: " + c.id);
        st.curves.push_back(std::move(dc));
    }
    st.junctions = net.junctions;
    return st;
}

Vec2 node_ux(const DiscreteCurve& c, int k) {
    const int m = static_cast<int>(c.nodes.size());
    const double h = c.param_h();
    if (c.closed) {
        return (c.nodes[(k + 1) % m] - c.nodes[(k - 1 + m) % m]) / (2 * h);
    }
    if (k == 0) return (-3.0 * c.nodes[0] + 4.0 * c.nodes[1] - c.nodes[2]) / (2 * h);
    if (k == m - 1) return (3.0 * c.nodes[m - 1] - 4.0 * c.nodes[m - 2] + c.nodes[m - 3]) / (2 * h);
    return (c.nodes[k + 1] - c.nodes[k - 1]) / (2 * h);
}

Vec2 node_uxx(const DiscreteCurve& c, int k) {
    const int m = static_cast<int>(c.nodes.size());
    const double h = c.param_h();
    if (c.closed) {
        return (c.nodes[(k + 1) % m] - 2.0 * c.nodes[k] + c.nodes[(k - 1 + m) % m]) / (h * h);
    }
    if (k == 0) return (c.nodes[0] - 2.0 * c.nodes[1] + c.nodes[2]) / (h * h);
    if (k == m - 1) return (c.nodes[m - 1] - 2.0 * c.nodes[m - 2] + c.nodes[m - 3]) / (h * h);
    return (c.nodes[k + 1] - 2.0 * c.nodes[k] + c.nodes[k - 1]) / (h * h);
}

std::vector<double> aniso_curvature(const DiscreteCurve& c, const SmoothAnisotropy& a) {
    // tangential divergence of the Cahn-Hoffman field N = grad phi_dual(nu):
    // div N = -(Hess phi_dual(nu) tau . tau) cross(u_x, u_xx) / |u_x|^3,
    // positive on a clockwise-parametrized circle (outward normal)
    const int m = static_cast<int>(c.nodes.size());
    std::vector<double> kappa(m, 0.0);
    for (int k = 0; k < m; ++k) {
        Vec2 ux = node_ux(c, k);
        Vec2 uxx = node_uxx(c, k);
        double n = norm(ux);
        if (n < 1e-14) throw numeric_error("aniso_curvature: degenerate node spacing");
        Vec2 nu = perp(ux) / n;
        kappa[k] = -a.dual_hessian_tt(nu) * cross(ux, uxx) / (n * n * n);
    }
    return kappa;
}

namespace {

struct EndStencil {
    Vec2 ux, uxx;   // one-sided derivatives in the curve's own parametrization
    Vec2 nu_in;     // unit normal oriented as if the curve ended at the junction
    Vec2 nu_own;    // unit normal of the curve's own orientation
};

EndStencil end_stencil(const DiscreteCurve& c, bool at_start) {
    EndStencil es;
    const int m = static_cast<int>(c.nodes.size());
    const double h = c.param_h();
    if (at_start) {
        es.ux = (-3.0 * c.nodes[0] + 4.0 * c.nodes[1] - c.nodes[2]) / (2 * h);
        es.uxx = (c.nodes[0] - 2.0 * c.nodes[1] + c.nodes[2]) / (h * h);
    } else {
        es.ux = (3.0 * c.nodes[m - 1] - 4.0 * c.nodes[m - 2] + c.nodes[m - 3]) / (2 * h);
        es.uxx = (c.nodes[m - 1] - 2.0 * c.nodes[m - 2] + c.nodes[m - 3]) / (h * h);
    }
    Vec2 tau = normalized(es.ux);
    es.nu_own = perp(tau);
    es.nu_in = at_start ? Vec2(-es.nu_own) : es.nu_own;
    return es;
}

} // namespace

double herring_residual(const SmoothState& st, int junction) {
    const auto& jn = st.junctions[junction];
    Vec2 sum{0, 0};
    for (auto e : jn.ends) {
        const auto& c = st.curves[e.curve];
        auto es = end_stencil(c, e.role == EndRole::Start);
        sum += st.aniso_of(c).dual_gradient(es.nu_in);
    }
    return norm(sum);
}

double compatibility_residual(const SmoothState& st, int junction) {
    const auto& jn = st.junctions[junction];
    std::vector<Vec2> v;
    for (auto e : jn.ends) {
        const auto& c = st.curves[e.curve];
        auto es = end_stencil(c, e.role == EndRole::Start);
        const auto& a = st.aniso_of(c);
        double beta = a.flow_coefficient(es.nu_own);
        v.push_back(beta / norm2(es.ux) * es.uxx);
    }
    double worst = 0.0;
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = i + 1; j < v.size(); ++j) worst = std::max(worst, norm(v[i] - v[j]));
    return worst;
}

double smooth_energy(const SmoothState& st, const std::optional<Window>& window) {
    return phi_length(st.as_network(), window);
}

FlowDiagnostics diagnostics(const SmoothState& st, const std::optional<Window>& window) {
    FlowDiagnostics d;
    d.time = st.t;
    d.energy = smooth_energy(st, window);
    for (size_t j = 0; j < st.junctions.size(); ++j) {
        d.max_herring_residual = std::max(d.max_herring_residual, herring_residual(st, static_cast<int>(j)));
        d.max_compatibility_residual =
            std::max(d.max_compatibility_residual, compatibility_residual(st, static_cast<int>(j)));
    }
    d.min_edge_length = 1e300;
    d.min_ux = 1e300;
    for (const auto& c : st.curves) {
        const int m = static_cast<int>(c.nodes.size());
        int nseg = c.closed ? m : m - 1;
        for (int k = 0; k < nseg; ++k)
            d.min_edge_length = std::min(d.min_edge_length, dist(c.nodes[k], c.nodes[(k + 1) % m]));
        for (int k = 0; k < m; ++k) d.min_ux = std::min(d.min_ux, norm(node_ux(c, k)));
    }
    // dissipation integrand: - sum int phi_dual/|u_x|^3 |Hess phi_dual u_xx|^2 approximated
    // by the normal-velocity form - int (phi_dual kappa_phi) kappa_phi |u_x| dx
    double rate = 0.0;
    for (const auto& c : st.curves) {
        const auto& a = st.aniso_of(c);
        auto kap = aniso_curvature(c, a);
        const int m = static_cast<int>(c.nodes.size());
        const double h = c.param_h();
        for (int k = c.closed ? 0 : 1; k < (c.closed ? m : m - 1); ++k) {
            Vec2 ux = node_ux(c, k);
            Vec2 nu = normalized(perp(ux));
            rate -= a.dual(nu) * kap[k] * kap[k] * norm(ux) * h;
        }
    }
    d.dissipation_rate = rate;
    return d;
}

namespace {

void clamp_halfline_end(DiscreteCurve& c) {
    if (!c.halfline_dir) return;
    Vec2 d = *c.halfline_dir;
    Vec2& p = c.nodes.back();
    p = c.halfline_base + dot(p - c.halfline_base, d) * d;
}

bool junction_newton(SmoothState& st, int junction, double tol, int max_iter) {
    auto& jn = st.junctions[junction];
    auto set_pos = [&](Vec2 q) {
        jn.at = q;
        for (auto e : jn.ends) {
            auto& c = st.curves[e.curve];
            (e.role == EndRole::Start ? c.nodes.front() : c.nodes.back()) = q;
        }
    };
    auto residual = [&](Vec2 q) {
        Vec2 saved = jn.at;
        std::vector<Vec2> savedp;
        for (auto e : jn.ends)
            savedp.push_back(e.role == EndRole::Start ? st.curves[e.curve].nodes.front()
                                                      : st.curves[e.curve].nodes.back());
        set_pos(q);
        Vec2 sum{0, 0};
        for (auto e : jn.ends) {
            const auto& c = st.curves[e.curve];
            auto es = end_stencil(c, e.role == EndRole::Start);
            sum += st.aniso_of(c).dual_gradient(es.nu_in);
        }
        jn.at = saved;
        int i = 0;
        for (auto e : jn.ends) {
            auto& c = st.curves[e.curve];
            (e.role == EndRole::Start ? c.nodes.front() : c.nodes.back()) = savedp[i++];
        }
        return sum;
    };

    Vec2 q = jn.at;
    double scale = 1e-7 * (1.0 + norm(q));
    Vec2 r = residual(q);
    for (int it = 0; it < max_iter; ++it) {
        if (norm(r) <= tol) {
            set_pos(q);
            return true;
        }
        Vec2 rx = (residual(q + Vec2{scale, 0}) - residual(q - Vec2{scale, 0})) / (2 * scale);
        Vec2 ry = (residual(q + Vec2{0, scale}) - residual(q - Vec2{0, scale})) / (2 * scale);
        double det = rx.x * ry.y - ry.x * rx.y;
        if (std::abs(det) < 1e-18) return false;
        Vec2 delta{(-r.x * ry.y + r.y * ry.x) / det, (-rx.x * r.y + rx.y * r.x) / det};
        double lambda = 1.0;
        Vec2 qn = q + delta;
        Vec2 rn = residual(qn);
        int damp = 0;
        while (norm(rn) > norm(r) && damp < 30) {
            lambda *= 0.5;
            qn = q + lambda * delta;
            rn = residual(qn);
            ++damp;
        }
        if (norm(rn) >= norm(r) && norm(r) > tol) return false;
        q = qn;
        r = rn;
    }
    if (norm(r) <= tol) {
        set_pos(q);
        return true;
    }
    return false;
}

} // namespace

StepResult flow_step(SmoothState& st, double dt, const SmoothFlowConfig& cfg) {
    SmoothState backup = st;

    auto update_curve = [&](DiscreteCurve& c) {
        const auto& a = st.aniso_of(c);
        const int m = static_cast<int>(c.nodes.size());
        std::vector<Vec2> next = c.nodes;
        int k0 = c.closed ? 0 : 1;
        int k1 = c.closed ? m : m - 1;
        for (int k = k0; k < k1; ++k) {
            Vec2 ux = node_ux(c, k);
            Vec2 uxx = node_uxx(c, k);
            double n2 = norm2(ux);
            Vec2 nu = normalized(perp(ux));
            next[k] = c.nodes[k] + dt * (a.flow_coefficient(nu) / n2) * uxx;
        }
        // far end of a truncated half-line follows the tangential PDE motion but
        // stays on its carrier line
        if (!c.closed && c.halfline_dir && c.junction_end < 0) {
            Vec2 ux = node_ux(c, m - 1);
            Vec2 uxx = node_uxx(c, m - 1);
            Vec2 nu = normalized(perp(ux));
            next[m - 1] = c.nodes[m - 1] + dt * (a.flow_coefficient(nu) / norm2(ux)) * uxx;
        }
        c.nodes = std::move(next);
        clamp_halfline_end(c);
    };

    if (cfg.threads > 1 && st.curves.size() > 1) {
        std::vector<std::future<void>> futs;
        for (auto& c : st.curves)
            futs.push_back(std::async(std::launch::async, [&update_curve, &c] { update_curve(c); }));
        for (auto& f : futs) f.get();
    } else {
        for (auto& c : st.curves) update_curve(c);
    }

    for (size_t j = 0; j < st.junctions.size(); ++j) {
        if (!junction_newton(st, static_cast<int>(j), cfg.tol_herring, cfg.newton_max_iter)) {
            st = std::move(backup);
            return {false, "junction solve diverged"};
        }
    }
    st.t += dt;
    return {true, ""};
}

void resample_by_arclength(DiscreteCurve& c) {
    const int m = static_cast<int>(c.nodes.size());
    if (m < 3) return;
    std::vector<Vec2> pts = c.nodes;
    if (c.closed) pts.push_back(pts.front());
    std::vector<double> s(pts.size(), 0.0);
    for (size_t k = 1; k < pts.size(); ++k) s[k] = s[k - 1] + dist(pts[k], pts[k - 1]);
    double total = s.back();
    if (total <= 0) return;

    std::vector<Vec2> out(m);
    out[0] = c.nodes[0];
    int count = c.closed ? m : m - 1;
    size_t seg = 0;
    for (int k = 1; k < count; ++k) {
        double target = total * k / count;
        while (seg + 1 < s.size() && s[seg + 1] < target) ++seg;
        double w = (target - s[seg]) / (s[seg + 1] - s[seg]);
        out[k] = pts[seg] + w * (pts[seg + 1] - pts[seg]);
    }
    if (!c.closed) out[m - 1] = c.nodes[m - 1];
    c.nodes = std::move(out);
}

SmoothTrajectory run_flow(const Network& net, double T, const SmoothFlowConfig& cfg) {
    SmoothState st = make_smooth_state(net);
    for (const auto& na : st.anisotropies)
        if (std::holds_alternative<SmoothAnisotropy>(na.aniso))
            std::get<SmoothAnisotropy>(na.aniso).check_elliptic();

    std::optional<Window> window;
    if (net.unbounded()) window = default_window(net, 4.0);

    SmoothTrajectory traj;
    for (size_t j = 0; j < st.junctions.size(); ++j) {
        double r0 = herring_residual(st, static_cast<int>(j));
        if (r0 > cfg.tol_herring0)
            throw domain_error("initial junction " + std::to_string(j) +
                               " violates the balance condition (residual " + std::to_string(r0) + ")");
        double c0 = compatibility_residual(st, static_cast<int>(j));
        if (c0 > 1e-6) {
            if (cfg.enforce_compatibility)
                throw domain_error("initial data violates the second-order compatibility condition");
            traj.warnings.push_back("second-order compatibility residual " + std::to_string(c0) +
                                    " at junction " + std::to_string(j));
        }
    }

    auto take_snapshot = [&]() {
        SmoothSnapshot snap;
        snap.t = st.t;
        snap.diag = diagnostics(st, window);
        for (const auto& c : st.curves) {
            snap.nodes.push_back(c.nodes);
            snap.halflines.push_back(c.halfline_dir);
        }
        traj.snapshots.push_back(std::move(snap));
    };

    take_snapshot();
    double initial_min_edge = traj.snapshots.front().diag.min_edge_length;
    double energy = traj.snapshots.front().diag.energy;
    int since_resample = 0;
    while (st.t < T - 1e-15) {
        // step bound from the parabolic mobility
        double min_edge = 1e300, max_beta = 0.0;
        for (const auto& c : st.curves) {
            const auto& a = st.aniso_of(c);
            const int m = static_cast<int>(c.nodes.size());
            int nseg = c.closed ? m : m - 1;
            for (int k = 0; k < nseg; ++k)
                min_edge = std::min(min_edge, dist(c.nodes[k], c.nodes[(k + 1) % m]));
            for (int k = 0; k < m; ++k) {
                Vec2 nu = normalized(perp(node_ux(c, k)));
                max_beta = std::max(max_beta, a.flow_coefficient(nu));
            }
        }
        if (min_edge < cfg.eps_len_factor * initial_min_edge) {
            traj.event = "edge collapse below threshold";
            break;
        }
        double dt = std::min(cfg.dt_safety * min_edge * min_edge / max_beta, T - st.t);

        bool accepted = false;
        for (int attempt = 0; attempt <= cfg.max_halvings; ++attempt) {
            SmoothState trial = st;
            auto res = flow_step(trial, dt, cfg);
            if (res.accepted) {
                double e_new = smooth_energy(trial, window);
                if (e_new <= energy * (1 + cfg.energy_slack) + 1e-300) {
                    st = std::move(trial);
                    energy = e_new;
                    accepted = true;
                    break;
                }
            }
            dt *= 0.5;
        }
        if (!accepted) {
            traj.event = "step rejected at minimal dt";
            break;
        }
        ++traj.accepted_steps;
        ++since_resample;
        if (cfg.resample_every > 0 && since_resample >= cfg.resample_every) {
            for (auto& c : st.curves) resample_by_arclength(c);
            // resampling perturbs the one-sided stencils; restore the balance
            for (size_t j = 0; j < st.junctions.size(); ++j)
                junction_newton(st, static_cast<int>(j), cfg.tol_herring, cfg.newton_max_iter);
            since_resample = 0;
            energy = smooth_energy(st, window);  // resampling never increases it
        }
        if (traj.accepted_steps % cfg.snapshot_every == 0 || st.t >= T - 1e-15) take_snapshot();
    }
    traj.final_time = st.t;
    if (traj.snapshots.back().t < st.t - 1e-15) take_snapshot();
    return traj;
}

// ---------------------------------------------------------------------------
// First variation
// ---------------------------------------------------------------------------

namespace {

double polyline_energy(const Network& net, const std::vector<std::vector<Vec2>>& shift, double s) {
    double total = 0.0;
    for (size_t ci = 0; ci < net.curves.size(); ++ci) {
        const Curve& c = net.curves[ci];
        const Anisotropy& a = net.aniso_of(c);
        const int m = static_cast<int>(c.points.size());
        int nseg = c.segment_count();
        for (int k = 0; k < nseg; ++k) {
            Vec2 p0 = c.points[k] + s * shift[ci][k];
            Vec2 p1 = c.points[(k + 1) % m] + s * shift[ci][(k + 1) % m];
            total += dual_value(a, perp(p1 - p0));  // one-homogeneous: phi_dual(nu)|edge|
        }
    }
    return total;
}

} // namespace

std::pair<double, double> first_variation_check(const Network& net,
                                                const std::vector<std::vector<Vec2>>& beta,
                                                double s0) {
    if (beta.size() != net.curves.size())
        throw domain_error("first_variation_check: perturbation field shape mismatch");
    for (size_t ci = 0; ci < net.curves.size(); ++ci)
        if (beta[ci].size() != net.curves[ci].points.size())
            throw domain_error("first_variation_check: perturbation field shape mismatch");
    // junction ends must carry matching perturbations
    for (const auto& jn : net.junctions) {
        Vec2 ref{0, 0};
        bool first = true;
        for (auto e : jn.ends) {
            int v = e.role == EndRole::Start ? 0 : static_cast<int>(net.curves[e.curve].points.size()) - 1;
            Vec2 b = beta[e.curve][v];
            if (first) {
                ref = b;
                first = false;
            } else if (dist(ref, b) > 1e-12) {
                throw domain_error("first_variation_check: perturbations disagree at a junction");
            }
        }
    }

    auto D = [&](double s) {
        return (polyline_energy(net, beta, s) - polyline_energy(net, beta, -s)) / (2 * s);
    };
    double fd = (4.0 * D(s0 / 2) - D(s0)) / 3.0;  // Richardson on the centered difference

    // formula side: quadrature of beta . nu kappa_phi over each curve + boundary terms
    double formula = 0.0;
    SmoothState st = make_smooth_state(net);
    for (size_t ci = 0; ci < st.curves.size(); ++ci) {
        const auto& c = st.curves[ci];
        const auto& a = st.aniso_of(c);
        auto kap = aniso_curvature(c, a);
        const int m = static_cast<int>(c.nodes.size());
        const double h = c.param_h();
        for (int k = 0; k < m; ++k) {
            double w = (c.closed || (k > 0 && k < m - 1)) ? 1.0 : 0.5;
            Vec2 ux = node_ux(c, k);
            Vec2 nu = normalized(perp(ux));
            formula += w * dot(beta[ci][k], nu) * kap[k] * norm(ux) * h;
        }
        // boundary terms at open ends: beta . [N]^{dSigma} = +-beta . perp(N)
        if (!c.closed) {
            auto es0 = end_stencil(c, true);
            Vec2 n0 = a.dual_gradient(normalized(perp(es0.ux)));
            formula += dot(beta[ci][0], perp(n0));
            auto es1 = end_stencil(c, false);
            Vec2 n1 = a.dual_gradient(normalized(perp(es1.ux)));
            formula -= dot(beta[ci][m - 1], perp(n1));
        }
    }
    return {fd, formula};
}

} // namespace netflow
