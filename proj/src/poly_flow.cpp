#include "poly_flow.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace netflow {

namespace {

// orthogonal projection of h onto {sum_i w_i h_i = 0 at every junction}
void project_onto_constraints(const Network& ref, std::vector<double>& h) {
    // junction rows are decoupled only when junctions share no segments; iterate
    // a few sweeps of successive projection, which converges fast at this scale
    for (int sweep = 0; sweep < 64; ++sweep) {
        double worst = 0.0;
        for (size_t j = 0; j < ref.junctions.size(); ++j) {
            auto w = junction_height_weights(ref, static_cast<int>(j));
            const auto& jn = ref.junctions[j];
            int idx[3];
            double r = 0.0, nw = 0.0;
            for (int i = 0; i < 3; ++i) {
                idx[i] = ref.flat_index(incident_segment(ref, jn.ends[i]));
                r += w[i] * h[idx[i]];
                nw += w[i] * w[i];
            }
            if (nw == 0.0) continue;
            for (int i = 0; i < 3; ++i) h[idx[i]] -= r * w[i] / nw;
            worst = std::max(worst, std::abs(r));
        }
        if (worst < 1e-15) break;
    }
}

double min_segment_length(const Network& net, int* arg_flat = nullptr) {
    double best = 1e300;
    for (int f = 0; f < net.total_segments(); ++f) {
        auto s = net.segment_at(f);
        double len = net.curves[s.curve].seg_length(s.seg);
        if (len < best) {
            best = len;
            if (arg_flat) *arg_flat = f;
        }
    }
    return best;
}

} // namespace

double poly_constraint_residual(const Network& ref, const HeightState& state) {
    return height_constraint_residual(ref, state.h);
}

double poly_balance_residual(const Network& ref, const HeightState& state) {
    Network net = rebuild_from_heights(ref, state.h, 1e-6);
    auto mf = min_field(net);
    return curvature_balance_residual(net, mf.curvatures);
}

std::vector<double> height_ode_rhs(const Network& ref, const std::vector<double>& h,
                                   double rebuild_tol) {
    Network net = rebuild_from_heights(ref, h, rebuild_tol);
    auto mf = min_field(net);
    std::vector<double> rhs(h.size());
    for (int f = 0; f < ref.total_segments(); ++f) {
        auto s = ref.segment_at(f);
        double phio = dual_value(ref.aniso_of(s.curve), ref.curves[s.curve].seg_normal(s.seg));
        rhs[f] = -phio * mf.curvatures[f];
    }
    return rhs;
}

HeightState poly_step(const Network& ref, const HeightState& state, double dt,
                      const PolyFlowConfig& config, int* projections) {
    const size_t n = state.h.size();
    auto axpy = [&](const std::vector<double>& base, double a, const std::vector<double>& d) {
        std::vector<double> out(n);
        for (size_t i = 0; i < n; ++i) out[i] = base[i] + a * d[i];
        return out;
    };
    double stage_tol = std::max(config.constraint_tol, 1e-7);
    auto k1 = height_ode_rhs(ref, state.h, stage_tol);
    auto k2 = height_ode_rhs(ref, axpy(state.h, 0.5 * dt, k1), stage_tol);
    auto k3 = height_ode_rhs(ref, axpy(state.h, 0.5 * dt, k2), stage_tol);
    auto k4 = height_ode_rhs(ref, axpy(state.h, dt, k3), stage_tol);

    HeightState next;
    next.t = state.t + dt;
    next.h.resize(n);
    for (size_t i = 0; i < n; ++i)
        next.h[i] = state.h[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);

    if (height_constraint_residual(ref, next.h) > config.constraint_tol) {
        project_onto_constraints(ref, next.h);
        if (projections) ++(*projections);
    }
    return next;
}

PolyTrajectory run_poly_flow(const Network& net0, double T, const PolyFlowConfig& config) {
    if (!(T >= 0)) throw domain_error("run_poly_flow: horizon must be nonnegative");
    auto reg = phi_regular(net0);
    if (!reg.regular) throw domain_error("run_poly_flow: initial network not Phi-regular: " + reg.obstruction);
    auto mf0 = min_field(net0);
    auto st0 = stability_margin(net0, mf0);
    if (!st0.stable) throw domain_error("run_poly_flow: initial network is not stable");

    const double eps_len = config.eps_len_factor * min_segment_length(net0);
    const double eps_stab = config.eps_stab_factor * st0.margin;
    std::optional<Window> window;
    if (net0.unbounded()) window = default_window(net0, 4.0);

    PolyTrajectory traj;
    HeightState state;
    state.t = 0.0;
    state.h.assign(net0.total_segments(), 0.0);

    auto snapshot = [&](const HeightState& s) {
        PolySnapshot sn;
        sn.t = s.t;
        sn.h = s.h;
        sn.network = rebuild_from_heights(net0, s.h, std::max(config.constraint_tol, 1e-7));
        auto mf = min_field(sn.network);
        sn.kappa = mf.curvatures;
        sn.energy = phi_length(sn.network, window);
        sn.constraint_residual = height_constraint_residual(net0, s.h);
        sn.balance_residual = curvature_balance_residual(sn.network, mf.curvatures);
        sn.stability_margin = stability_margin(sn.network, mf).margin;
        traj.snapshots.push_back(std::move(sn));
    };
    snapshot(state);

    int steps = static_cast<int>(std::ceil(T / config.dt - 1e-12));
    for (int step = 0; step < steps; ++step) {
        double dt = std::min(config.dt, T - state.t);
        if (dt <= 0) break;
        HeightState next;
        try {
            next = poly_step(net0, state, dt, config, &traj.projection_count);
        } catch (const Error& e) {
            traj.event = {FlowEventRecord::Kind::RebuildFailure, state.t + dt, e.what(), 0.0};
            break;
        }

        Network net;
        try {
            net = rebuild_from_heights(net0, next.h, std::max(config.constraint_tol, 1e-7));
        } catch (const Error& e) {
            traj.event = {FlowEventRecord::Kind::RebuildFailure, next.t, e.what(), 0.0};
            break;
        }
        int arg = 0;
        double minlen = min_segment_length(net, &arg);
        if (minlen < eps_len) {
            auto s = net.segment_at(arg);
            traj.event = {FlowEventRecord::Kind::SegmentCollapse, next.t,
                          net.curves[s.curve].id + "/" + std::to_string(s.seg), minlen};
            break;
        }
        auto mf = min_field(net);
        auto st = stability_margin(net, mf);
        if (st.margin < eps_stab) {
            traj.event = {FlowEventRecord::Kind::StabilityLoss, next.t, "", st.margin};
            break;
        }
        if (config.rho0 > 0) {
            double hmax = 0.0;
            for (double v : next.h) hmax = std::max(hmax, std::abs(v));
            if (hmax > config.rho0) {
                traj.event = {FlowEventRecord::Kind::HeightRadiusExceeded, next.t, "", hmax};
                break;
            }
        }
        state = std::move(next);
        if ((step + 1) % config.snapshot_every == 0 || state.t >= T - 1e-15) snapshot(state);
    }

    if (config.picard_check) {
        traj.picard_states = run_picard(net0, state.t, config.dt, config.picard_max_iter,
                                        config.picard_tol);
        // first-order agreement gate between the two constructions
        double rate = 1.0;
        for (double v : height_ode_rhs(net0, std::vector<double>(net0.total_segments(), 0.0)))
            rate = std::max(rate, std::abs(v));
        double tol = 5.0 * config.dt * rate + 1e-10;
        for (const auto& ps : *traj.picard_states) {
            for (const auto& sn : traj.snapshots) {
                if (std::abs(sn.t - ps.t) > 1e-12) continue;
                for (size_t i = 0; i < ps.h.size(); ++i)
                    if (std::abs(ps.h[i] - sn.h[i]) > tol)
                        throw numeric_error("fixed-point and RK4 trajectories diverged beyond O(dt)");
            }
        }
    }
    return traj;
}

std::vector<HeightState> run_picard(const Network& net0, double T, double dt, int max_iter,
                                    double tol) {
    int steps = std::max(1, static_cast<int>(std::round(T / dt)));
    dt = T / steps;
    const int n = net0.total_segments();

    std::vector<HeightState> h(steps + 1);
    for (int k = 0; k <= steps; ++k) {
        h[k].t = k * dt;
        h[k].h.assign(n, 0.0);
    }

    std::vector<std::vector<double>> rhs(steps + 1, std::vector<double>(n, 0.0));
    for (int iter = 0; iter < max_iter; ++iter) {
        for (int k = 0; k <= steps; ++k) rhs[k] = height_ode_rhs(net0, h[k].h, 1e-6);
        // cumulative trapezoid: h(t_k) = integral of rhs up to t_k
        double change = 0.0;
        std::vector<double> acc(n, 0.0);
        for (int k = 1; k <= steps; ++k) {
            for (int i = 0; i < n; ++i) {
                acc[i] += 0.5 * dt * (rhs[k - 1][i] + rhs[k][i]);
                change = std::max(change, std::abs(acc[i] - h[k].h[i]));
            }
            // keep the iterate on the constraint subspace against quadrature drift
            std::vector<double> next = acc;
            project_onto_constraints(net0, next);
            for (int i = 0; i < n; ++i) h[k].h[i] = next[i];
        }
        if (change < tol) break;
    }
    return h;
}

} // namespace netflow
