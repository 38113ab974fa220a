#include "builders.hpp"

#include <cmath>

#include "errors.hpp"

namespace netflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Network make_octagon_triod(double l1, double l2, double l3) {
    if (!(l1 > 0 && l2 > 0 && l3 > 0)) throw domain_error("octagon triod needs positive lengths");
    Network net;
    auto B = CrystallinePolytope::regular(8, 1.0);
    net.anisotropies.push_back({"octagon", B});

    // segments on Wulff edges 0, 3, 5; half-lines on the adjacent edges 7, 4, 4
    const int seg_edge[3] = {0, 3, 5};
    const int ray_edge[3] = {7, 4, 4};
    const double len[3] = {l1, l2, l3};
    for (int i = 0; i < 3; ++i) {
        Curve c;
        c.id = "S" + std::to_string(i + 1);
        c.anisotropy = 0;
        Vec2 d = B.edge_dir(seg_edge[i]);
        c.points = {Vec2{0, 0}, len[i] * d};
        c.halfline = HalfLine{B.edge_dir(ray_edge[i])};
        net.curves.push_back(std::move(c));
    }
    net.junctions.push_back({Vec2{0, 0},
                             {CurveEnd{0, EndRole::Start}, CurveEnd{1, EndRole::Start},
                              CurveEnd{2, EndRole::Start}}});
    return net;
}

Network make_hexagon_theta(const std::array<double, 11>& L) {
    for (double l : L)
        if (!(l > 0)) throw domain_error("hexagon theta needs positive lengths");
    auto B = CrystallinePolytope::regular(6, 1.0);

    // curve faces: Sigma1 through Wulff edges (5,0,1,2,3), Sigma2 on edge 1,
    // Sigma3 through (3,2,1,0,5); all three parametrized from P to Q
    const int f1[5] = {5, 0, 1, 2, 3};
    const int f3[5] = {3, 2, 1, 0, 5};
    const double L1[5] = {L[0], L[1], L[2], L[3], L[4]};
    const double s21 = L[5];
    const double L3[5] = {L[6], L[7], L[8], L[9], L[10]};

    Vec2 P{0, 0};
    Vec2 Q = P + s21 * B.edge_dir(1);

    auto chain = [&](const int* faces, const double* lens) {
        std::vector<Vec2> pts = {P};
        for (int k = 0; k < 5; ++k) pts.push_back(pts.back() + lens[k] * B.edge_dir(faces[k]));
        return pts;
    };
    auto pts1 = chain(f1, L1);
    auto pts3 = chain(f3, L3);
    double scale = 1.0 + s21;
    if (dist(pts1.back(), Q) > 1e-9 * scale || dist(pts3.back(), Q) > 1e-9 * scale)
        throw domain_error("hexagon theta lengths violate the closure relations");
    pts1.back() = Q;
    pts3.back() = Q;

    Network net;
    net.anisotropies.push_back({"hexagon", B});
    Curve c1{"Sigma1", 0, std::move(pts1), false, std::nullopt, std::nullopt};
    Curve c2{"Sigma2", 0, {P, Q}, false, std::nullopt, std::nullopt};
    Curve c3{"Sigma3", 0, std::move(pts3), false, std::nullopt, std::nullopt};
    net.curves = {std::move(c1), std::move(c2), std::move(c3)};
    net.junctions.push_back({P,
                             {CurveEnd{0, EndRole::Start}, CurveEnd{1, EndRole::Start},
                              CurveEnd{2, EndRole::Start}}});
    net.junctions.push_back({Q,
                             {CurveEnd{0, EndRole::End}, CurveEnd{1, EndRole::End},
                              CurveEnd{2, EndRole::End}}});
    return net;
}

Network make_collinear_triod(int n, double l1, double l2, double l3) {
    auto tp = triplet_params(n, 1.0);
    auto B = CrystallinePolytope::regular(n, 1.0);
    Network net;
    net.anisotropies.push_back({"wulff", B});
    const int seg_edge[3] = {0, tp.step, n - tp.step};
    const double len[3] = {l1, l2, l3};
    for (int i = 0; i < 3; ++i) {
        Curve c;
        c.id = "S" + std::to_string(i + 1);
        c.anisotropy = 0;
        Vec2 d = B.edge_dir(seg_edge[i]);
        c.points = {Vec2{0, 0}, len[i] * d};
        c.halfline = HalfLine{d};
        net.curves.push_back(std::move(c));
    }
    net.junctions.push_back({Vec2{0, 0},
                             {CurveEnd{0, EndRole::Start}, CurveEnd{1, EndRole::Start},
                              CurveEnd{2, EndRole::Start}}});
    return net;
}

Network make_circle(double radius, int m, const Anisotropy& aniso) {
    if (m < 3) throw domain_error("circle needs at least 3 nodes");
    Network net;
    net.anisotropies.push_back({"a0", aniso});
    Curve c;
    c.id = "circle";
    c.anisotropy = 0;
    c.closed = true;
    c.points.reserve(m);
    for (int k = 0; k < m; ++k) c.points.push_back(radius * dir(2 * kPi * k / m));
    net.curves.push_back(std::move(c));
    return net;
}

std::array<double, 11> theta_lengths_from_free(double s21, double t, double s, double s12,
                                               double s14, double s31, double s32) {
    std::array<double, 11> L{};
    L[5] = s21;
    L[2] = s21 + t;   // S13
    L[1] = s12;       // S12
    L[4] = s12 + t;   // S15
    L[3] = s14;       // S14
    L[0] = s14 + t;   // S11
    L[8] = s21 + s;   // S33
    L[6] = s31;       // S31
    L[9] = s31 - s;   // S34
    L[7] = s32;       // S32
    L[10] = s32 + s;  // S35
    for (double l : L)
        if (!(l > 0)) throw domain_error("theta free parameters produce nonpositive lengths");
    return L;
}

} // namespace netflow
