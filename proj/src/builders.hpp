#pragma once

#include <array>

#include "network.hpp"

namespace netflow {

// Triod with a single crystalline anisotropy given by the regular octagon of
// side 1: three curves, each one segment plus one half-line, meeting at the
// origin. Segments run along the designated Wulff edge directions; half-lines
// continue along the adjacent Wulff edge so the outer Cahn-Hoffman values are
// pinned to Wulff vertices.
Network make_octagon_triod(double l1, double l2, double l3);

// Theta network for the regular hexagon of side 1: two convex hexagons with
// sides parallel to the Wulff edges sharing the segment S21. Lengths in the
// order (S11..S15, S21, S31..S35); they must satisfy the two hexagon closure
// relations L11-L14 = L15-L12 = L13-L21 and L35-L32 = L31-L34 = L33-L21.
Network make_hexagon_theta(const std::array<double, 11>& lengths);

// Triod for a regular n-gon anisotropy (n even, >= 6) whose half-lines continue
// straight along their segments; every Cahn-Hoffman field on it has zero
// divergence, so it is a fixed point of the crystalline flow.
Network make_collinear_triod(int n, double l1, double l2, double l3);

// Closed circle sampled with m nodes (m segments), centered at the origin.
Network make_circle(double radius, int m, const Anisotropy& aniso);

// Completes a valid theta length tuple from seven free parameters:
// (s21, t, s, s12, s14, s31, s32) with t = L13-L21 and s = L33-L21.
std::array<double, 11> theta_lengths_from_free(double s21, double t, double s, double s12,
                                               double s14, double s31, double s32);

} // namespace netflow
