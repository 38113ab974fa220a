#pragma once

#include <optional>
#include <string>
#include <vector>

#include "network.hpp"

namespace netflow {

// Discretized curve on a uniform parameter grid. For unbounded curves the node
// array holds a truncated tail and the far endpoint is clamped to its carrier.
struct DiscreteCurve {
    std::string id;
    int aniso = -1;
    std::vector<Vec2> nodes;
    bool closed = false;
    int junction_start = -1;
    int junction_end = -1;
    std::optional<Vec2> halfline_dir;  // clamp for the far (end) node
    Vec2 halfline_base;                // point on the fixed carrier line

    double param_h() const { return 1.0 / (closed ? nodes.size() : nodes.size() - 1); }
};

struct SmoothState {
    double t = 0.0;
    std::vector<NamedAnisotropy> anisotropies;
    std::vector<DiscreteCurve> curves;
    std::vector<Junction> junctions;  // positions; ends reference curves by index

    const SmoothAnisotropy& aniso_of(const DiscreteCurve& c) const;
    Network as_network() const;  // polyline view (for energy / serialization)
};

SmoothState make_smooth_state(const Network& net);

struct FlowDiagnostics {
    double time = 0.0;
    double energy = 0.0;
    double max_herring_residual = 0.0;
    double max_compatibility_residual = 0.0;
    double min_edge_length = 0.0;
    double min_ux = 0.0;  // regular-parametrization proxy min |u_x|
    double dissipation_rate = 0.0;
};

// nodewise first/second parameter derivatives (central in the interior, 3-point
// biased at open endpoints)
Vec2 node_ux(const DiscreteCurve& c, int k);
Vec2 node_uxx(const DiscreteCurve& c, int k);

// Anisotropic curvature at the interior nodes (and biased values at endpoints):
// (Hess phi_dual(nu) tau . tau) * cross(u_x, u_xx) / |u_x|^3.
std::vector<double> aniso_curvature(const DiscreteCurve& c, const SmoothAnisotropy& a);

// |sum over incident ends of grad phi_dual(nu)| with normals oriented into the
// junction (one-sided stencils).
double herring_residual(const SmoothState& st, int junction);

// max pairwise difference of phi_dual(nu)(Hess phi_dual(nu) tau.tau) u_xx/|u_x|^2
// across the three incident ends.
double compatibility_residual(const SmoothState& st, int junction);

double smooth_energy(const SmoothState& st, const std::optional<Window>& window);

FlowDiagnostics diagnostics(const SmoothState& st, const std::optional<Window>& window);

struct SmoothFlowConfig {
    double dt_safety = 0.25;         // dt <= dt_safety * min_edge^2 / max beta
    double tol_herring = 1e-8;       // junction solve target after every step
    double tol_herring0 = 1e-6;      // precondition on the initial data
    int resample_every = 10;         // arclength resampling cadence (0: never)
    int snapshot_every = 10;         // snapshot cadence in accepted steps
    double eps_len_factor = 1e-4;    // collapse threshold vs initial min edge
    int max_halvings = 10;
    int newton_max_iter = 60;
    double energy_slack = 1e-10;     // relative slack for the monotonicity check
    bool enforce_compatibility = false;  // second-order condition: warn only by default
    int threads = 1;
};

struct StepResult {
    bool accepted = false;
    std::string reject_reason;
};

// One explicit step: interior Euler update, then a damped Newton solve per
// junction driving the Herring residual below tol_herring.
StepResult flow_step(SmoothState& st, double dt, const SmoothFlowConfig& cfg);

struct SmoothSnapshot {
    double t = 0.0;
    std::vector<std::vector<Vec2>> nodes;                 // per curve
    std::vector<std::optional<Vec2>> halflines;           // tail directions per curve
    FlowDiagnostics diag;
};

struct SmoothTrajectory {
    std::vector<SmoothSnapshot> snapshots;
    std::string event;  // empty: reached the horizon
    double final_time = 0.0;
    int accepted_steps = 0;
    std::vector<std::string> warnings;
};

SmoothTrajectory run_flow(const Network& net, double T, const SmoothFlowConfig& cfg);

// Arclength resampling of the interior nodes (node count preserved, endpoints
// pinned; closed curves resample the full loop starting at node 0).
void resample_by_arclength(DiscreteCurve& c);

// Centered finite difference of the network energy under the perturbation field
// beta (per curve, per node) against the first-variation formula
//   sum_i int beta.nu kappa_phi dH1 + boundary terms beta(p).[N(p)]^{dSigma}.
// Returns {finite difference (Richardson), formula value}.
std::pair<double, double> first_variation_check(const Network& net,
                                                const std::vector<std::vector<Vec2>>& beta,
                                                double s0 = 1e-4);

} // namespace netflow
