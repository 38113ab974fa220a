#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crystalline.hpp"
#include "network.hpp"

namespace netflow {

struct HeightState {
    double t = 0.0;
    std::vector<double> h;  // per flat segment index of the reference network
};

struct PolyFlowConfig {
    double dt = 1e-3;
    double T = 0.1;
    int snapshot_every = 1;          // in steps
    bool picard_check = false;       // run the fixed-point iteration alongside RK4
    int picard_max_iter = 200;
    double picard_tol = 1e-12;
    double rho0 = 0.0;               // 0: monitored operationally (no explicit bound)
    double eps_len_factor = 1e-6;    // collapse threshold relative to initial min length
    double eps_stab_factor = 1e-3;   // stability-loss threshold relative to initial margin
    double constraint_tol = 1e-9;    // junction compatibility tolerance
};

struct FlowEventRecord {
    enum class Kind { None, SegmentCollapse, StabilityLoss, HeightRadiusExceeded, RebuildFailure };
    Kind kind = Kind::None;
    double time = 0.0;
    std::string subject;
    double value = 0.0;
};

struct PolySnapshot {
    double t = 0.0;
    std::vector<double> h;
    std::vector<double> kappa;
    double energy = 0.0;
    double constraint_residual = 0.0;
    double balance_residual = 0.0;
    double stability_margin = 0.0;
    Network network;
};

struct PolyTrajectory {
    std::vector<PolySnapshot> snapshots;
    FlowEventRecord event;
    int projection_count = 0;  // times the constraint projection had to fire
    std::optional<std::vector<HeightState>> picard_states;  // when picard_check
};

// max over junctions of |sum_i w_i h_i|
double poly_constraint_residual(const Network& ref, const HeightState& state);

// max over junctions of |sum_i w_i phi_dual_i(nu_i) kappa_i| on the rebuilt network
double poly_balance_residual(const Network& ref, const HeightState& state);

// Right-hand side of the height ODE: dh_i/dt = -phi_dual_i(nu_i) * kappa_i(rebuild(h)).
std::vector<double> height_ode_rhs(const Network& ref, const std::vector<double>& h,
                                   double rebuild_tol = 1e-7);

// One classical RK4 step; projects back onto the junction constraint subspace if
// the residual drifts beyond config.constraint_tol (counted in *projections).
HeightState poly_step(const Network& ref, const HeightState& state, double dt,
                      const PolyFlowConfig& config, int* projections = nullptr);

// Integrates the height ODE from the admissible stable network net0 until T or
// the first event. Snapshots carry rebuilt networks and diagnostics.
PolyTrajectory run_poly_flow(const Network& net0, double T, const PolyFlowConfig& config);

// The fixed-point (Picard) construction on a fixed time grid: iterates
// h <- -phi_dual * integral of kappa(rebuild(h)) until stationary.
std::vector<HeightState> run_picard(const Network& net0, double T, double dt, int max_iter,
                                    double tol);

} // namespace netflow
