#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "network.hpp"

namespace netflow {

// Piecewise-linear Cahn-Hoffman vector field: one Wulff boundary point per curve
// vertex, linear interpolation along segments, constant along half-lines.
struct CahnHoffmanField {
    std::vector<std::vector<BoundaryPoint>> values;  // values[curve][vertex]

    Vec2 at(const Network& net, int curve, int vertex) const;
};

struct PhiRegularity {
    bool regular = false;
    std::string obstruction;
    std::optional<CahnHoffmanField> witness;
};

// Feasibility of the Cahn-Hoffman constraints: per-curve face interpolation and
// the balance condition at every junction.
PhiRegularity phi_regular(const Network& net);

struct MinFieldResult {
    CahnHoffmanField field;
    double objective = 0.0;
    bool unique = true;               // strictly convex on the feasible subspace
    std::vector<double> curvatures;   // per flat segment index
};

// Minimizer of sum_S phi_dual(nu_S) * [(N(B)-N(A)) . tau_S]^2 / H1(S) over all
// Cahn-Hoffman fields; the quadratic program runs over junction offsets after
// the forced vertex values are propagated.
MinFieldResult min_field(const Network& net);

// (N(B) - N(A)) . tau_S / H1(S); zero on half-lines by construction.
double segment_curvature(const CahnHoffmanField& field, const Network& net, SegmentRef s);

// max over junctions of |sum_i w_i phi_dual_i(nu_i) kappa_i| with the signed
// sine weights of junction_height_weights.
double curvature_balance_residual(const Network& net, const std::vector<double>& curvatures);

enum class JunctionPlacement { Interior, OnRegionBoundary, AtVertex };

struct StabilityReport {
    double margin = std::numeric_limits<double>::infinity();
    bool stable = true;
    std::vector<JunctionPlacement> placements;  // per junction
};

// Distance (in Wulff-boundary arclength) of the minimizing field's junction
// values from the boundary of the admissible-triplet regions and from the
// Wulff vertices; stable iff the margin is strictly positive.
StabilityReport stability_margin(const Network& net, const MinFieldResult& minimizer);

// Closed forms for the regular-octagon triod and regular-hexagon theta network.
struct TriodClosedForm {
    double alpha = 0, beta = 0, gamma = 0;
    double x_min = 0;
    bool stable = false;
};

TriodClosedForm closed_form_triod(double l1, double l2, double l3);

struct ThetaClosedForm {
    double a11 = 0, a22 = 0, a12 = 0, a1 = 0, a2 = 0, a0 = 0;
    double x1_min = 0, x2_min = 0;
};

// lengths in the order (S11..S15, S21, S31..S35)
ThetaClosedForm closed_form_theta(const std::array<double, 11>& lengths);

// Triangle-inequality check phi_ij + phi_jk >= phi_ik on sampled directions for
// curves with phase labels; returns a warning string when it fails (never rejects).
std::optional<std::string> check_triangle_inequality(const Network& net, int samples = 360);

} // namespace netflow
