#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "builders.hpp"
#include "errors.hpp"
#include "helpers.hpp"
#include "network.hpp"

using namespace netflow;
using namespace netflow::testing;

namespace {

Network euclid_triod() {
    // symmetric triod: three straight unbounded curves at 120 degrees
    Network net;
    net.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    for (int i = 0; i < 3; ++i) {
        Curve c;
        c.id = "T" + std::to_string(i);
        c.anisotropy = 0;
        Vec2 d = dir(kPi / 2 + 2 * kPi * i / 3);
        c.points = {Vec2{0, 0}, d};
        c.halfline = HalfLine{d};
        net.curves.push_back(std::move(c));
    }
    net.junctions.push_back({Vec2{0, 0},
                             {CurveEnd{0, EndRole::Start}, CurveEnd{1, EndRole::Start},
                              CurveEnd{2, EndRole::Start}}});
    return net;
}

Network translated(const Network& net, Vec2 d) {
    Network out = net;
    for (auto& c : out.curves)
        for (auto& p : c.points) p += d;
    for (auto& j : out.junctions) j.at += d;
    return out;
}

} // namespace

TEST_CASE("validate: symmetric triod is a valid network") {
    CHECK(validate(euclid_triod()).valid());
}

TEST_CASE("validate: theta network has two triple junctions and passes") {
    auto net = make_hexagon_theta({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    auto rep = validate(net);
    CHECK(rep.valid());
    CHECK(net.junctions.size() == 2);
}

TEST_CASE("validate: Brakke spoon is rejected") {
    Network net;
    net.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    Curve loop;
    loop.id = "loop";
    loop.anisotropy = 0;
    // square loop from the origin back to the origin
    loop.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    Curve ray;
    ray.id = "ray";
    ray.anisotropy = 0;
    ray.points = {{0, 0}, {-1, -1}};
    ray.halfline = HalfLine{normalized({-1, -1})};
    net.curves = {loop, ray};
    net.junctions.push_back({{0, 0},
                             {CurveEnd{0, EndRole::Start}, CurveEnd{0, EndRole::End},
                              CurveEnd{1, EndRole::Start}}});
    auto rep = validate(net);
    CHECK(!rep.valid());
    bool spoon = false;
    for (const auto& v : rep.violations) spoon |= v.kind == ViolationKind::BrakkeSpoon;
    CHECK(spoon);
}

TEST_CASE("validate: four incident ends flagged as non-triple") {
    auto net = euclid_triod();
    Curve extra;
    extra.id = "T3";
    extra.anisotropy = 0;
    extra.points = {Vec2{0, 0}, Vec2{0.3, -0.9}};
    net.curves.push_back(extra);
    net.junctions[0].ends.push_back({3, EndRole::Start});
    auto rep = validate(net);
    bool nontriple = false;
    for (const auto& v : rep.violations) nontriple |= v.kind == ViolationKind::NonTripleJunction;
    CHECK(nontriple);
}

TEST_CASE("validate: half-line end at a junction and disconnected pieces") {
    Network net;
    net.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    Curve a{"a", 0, {{1, 0}, {0, 0}}, false, HalfLine{{1, 0}}, std::nullopt};
    Curve b{"b", 0, {{0, 0}, {0, 1}}, false, std::nullopt, std::nullopt};
    Curve c{"c", 0, {{0, 0}, {-1, -1}}, false, std::nullopt, std::nullopt};
    net.curves = {a, b, c};
    net.junctions.push_back({{0, 0},
                             {CurveEnd{0, EndRole::End}, CurveEnd{1, EndRole::Start},
                              CurveEnd{2, EndRole::Start}}});
    auto rep = validate(net);
    bool hl = false;
    for (const auto& v : rep.violations) hl |= v.kind == ViolationKind::HalfLineAtJunction;
    CHECK(hl);

    Network two;
    two.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    two.curves.push_back({"p", 0, {{0, 0}, {1, 0}}, false, std::nullopt, std::nullopt});
    two.curves.push_back({"q", 0, {{5, 5}, {6, 5}}, false, std::nullopt, std::nullopt});
    auto rep2 = validate(two);
    bool disc = false;
    for (const auto& v : rep2.violations) disc |= v.kind == ViolationKind::Disconnected;
    CHECK(disc);
}

TEST_CASE("rebuild: collinear neighbours must shift together") {
    Network net;
    net.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    Curve c{"c", 0, {{0, 0}, {1, 0}, {2, 0}, {2, 1}}, false, std::nullopt, std::nullopt};
    net.curves.push_back(c);
    // equal shifts keep the two collinear segments on one carrier
    auto ok = rebuild_from_heights(net, {0.01, 0.01, -0.02});
    CHECK(ok.curves[0].seg_length(0) > 0);
    // unequal shifts tear the carrier apart
    CHECK_THROWS_AS(rebuild_from_heights(net, {0.01, -0.01, 0.02}), Error);
}

TEST_CASE("validate: crossing curves are flagged") {
    Network net;
    net.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    Curve a{"a", 0, {{-1, 0}, {1, 0}}, false, std::nullopt, std::nullopt};
    Curve b{"b", 0, {{0, -1}, {0, 1}}, false, std::nullopt, std::nullopt};
    net.curves = {a, b};
    auto rep = validate(net);
    bool crossing = false;
    for (const auto& v : rep.violations) crossing |= v.kind == ViolationKind::SelfIntersection;
    CHECK(crossing);
}

TEST_CASE("phi_length: unit segment, Euclidean") {
    Network net;
    net.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    net.curves.push_back({"s", 0, {{0, 0}, {1, 0}}, false, std::nullopt, std::nullopt});
    CHECK(phi_length(net) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("phi_length: unit vertical-normal segment under the square Wulff shape") {
    Network net;
    net.anisotropies.push_back({"sq", CrystallinePolytope({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}})});
    net.curves.push_back({"s", 0, {{0, 0}, {1, 0}}, false, std::nullopt, std::nullopt});
    // nu = (0,1): support of the square in that direction is 1
    CHECK(phi_length(net) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("phi_length: unit theta network equals 11 sides times the side support") {
    auto net = make_hexagon_theta({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    auto hex = CrystallinePolytope::regular(6, 1.0);
    double phio = hex.support(hex.edge_normal(0));  // same for every side by symmetry
    CHECK(phi_length(net) == doctest::Approx(11 * phio).epsilon(1e-12));
    CHECK(phio == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
}

TEST_CASE("phi_length: invariant under translation and point reflection") {
    auto rng = make_rng(5);
    auto net = make_hexagon_theta(random_theta_lengths(rng));
    double e0 = phi_length(net);
    CHECK(phi_length(translated(net, {3.7, -1.2})) == doctest::Approx(e0).epsilon(1e-12));
    Network refl = net;
    for (auto& c : refl.curves) {
        for (auto& p : c.points) p = -p;
        // reflection reverses tangents; even anisotropy keeps the weight
    }
    for (auto& j : refl.junctions) j.at = -j.at;
    CHECK(phi_length(refl) == doctest::Approx(e0).epsilon(1e-12));
}

TEST_CASE("phi_length: unbounded network requires a window") {
    auto net = euclid_triod();
    CHECK_THROWS_AS(phi_length(net), Error);
    Window w{{0, 0}, 10.0};
    // three unit segments + three half-lines clipped at radius 10
    CHECK(phi_length(net, w) == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("distance_vector: axis-aligned and diagonal cases") {
    auto dv = distance_vector({0, 0}, {1, 0}, {0, 2}, {1, 0});
    CHECK(dv.h == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(dv.H.x == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(dv.H.y == doctest::Approx(2.0).epsilon(1e-14));

    auto zero = distance_vector({1, 1}, {0, 1}, {1, 5}, {0, 1});
    CHECK(zero.h == doctest::Approx(0.0).epsilon(1e-14));

    // line through origin with direction (1,1)/sqrt2, second line shifted by (1,0)
    Vec2 t = normalized({1, 1});
    auto diag = distance_vector({0, 0}, t, {1, 0}, t);
    CHECK(diag.H.x == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(diag.H.y == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(std::abs(diag.h) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("distance_vector: antisymmetry and non-parallel rejection") {
    Vec2 t = dir(0.3);
    auto ab = distance_vector({0, 0}, t, {0.5, 1.5}, t);
    auto ba = distance_vector({0.5, 1.5}, t, {0, 0}, t);
    CHECK(ab.h == doctest::Approx(-ba.h).epsilon(1e-14));
    CHECK_THROWS_AS(distance_vector({0, 0}, {1, 0}, {0, 1}, dir(0.1)), Error);
}

TEST_CASE("is_parallel: translation, rotation, junction order") {
    auto net = make_hexagon_theta({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    CHECK(is_parallel(net, translated(net, {0.4, 0.7})).parallel);

    Network rot = net;
    for (auto& p : rot.curves[0].points) p = rotate(p, 5 * kPi / 180);
    CHECK(!is_parallel(net, rot).parallel);

    // same segment directions, same carriers, but the junction is formed by
    // different curve ends: two collinear curves swap their attachment
    Network a;
    a.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    a.curves.push_back({"u", 0, {{-1, 0}, {0, 0}}, false, std::nullopt, std::nullopt});
    a.curves.push_back({"v", 0, {{0, 0}, {1, 0}}, false, std::nullopt, std::nullopt});
    a.curves.push_back({"w", 0, {{0, 0}, {0, 1}}, false, std::nullopt, std::nullopt});
    a.junctions.push_back({{0, 0},
                           {CurveEnd{0, EndRole::End}, CurveEnd{1, EndRole::Start},
                            CurveEnd{2, EndRole::Start}}});
    Network b = a;
    b.curves[0].points = {{0, 0}, {1, 0}};   // u slid along its carrier
    b.curves[1].points = {{-1, 0}, {0, 0}};  // v slid the other way
    b.junctions[0].ends = {CurveEnd{0, EndRole::Start}, CurveEnd{1, EndRole::End},
                           CurveEnd{2, EndRole::Start}};
    auto pc = is_parallel(a, b);
    CHECK(!pc.parallel);
}

TEST_CASE("network_distance: translate by epsilon along a normal") {
    auto net = make_hexagon_theta({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    CHECK(network_distance(net, net) == doctest::Approx(0.0).epsilon(1e-14));
    // distance vectors ignore sliding along carriers: a translation contributes
    // only its normal component per segment
    double eps = 1e-3;
    double factor = 0.0;
    for (int f = 0; f < net.total_segments(); ++f) {
        auto s = net.segment_at(f);
        factor = std::max(factor, std::abs(net.curves[s.curve].seg_normal(s.seg).y));
    }
    CHECK(network_distance(net, translated(net, {0, eps})) ==
          doctest::Approx(eps * factor).epsilon(1e-10));
    // a translation along a segment's own normal realizes |H| = eps exactly
    Vec2 nu0 = net.curves[0].seg_normal(0);
    CHECK(network_distance(net, translated(net, eps * nu0)) == doctest::Approx(eps).epsilon(1e-10));
}

TEST_CASE("network_distance: one carrier line shifted along its normal") {
    auto ref = make_octagon_triod(1.0, 1.0, 1.0);
    std::vector<double> h(ref.total_segments(), 0.0);
    auto w = junction_height_weights(ref, 0);
    // null vector of the junction constraint: shift two segments consistently
    h[0] = 0.02 * w[1];
    h[1] = -0.02 * w[0];
    auto moved = rebuild_from_heights(ref, h);
    CHECK(network_distance(ref, moved) ==
          doctest::Approx(0.02 * std::max(std::abs(w[0]), std::abs(w[1]))).epsilon(1e-10));
}

TEST_CASE("junction sector angles sum to 2 pi and match the triod construction") {
    auto net = make_octagon_triod(1.0, 0.8, 1.2);
    auto th = junction_sector_angles(net, 0);
    CHECK(th[0] + th[1] + th[2] == doctest::Approx(2 * kPi).epsilon(1e-12));
    // octagon triod sectors: 90 between S2 and S3, 135 for the others
    std::vector<double> sorted = th;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted[0] == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(sorted[1] == doctest::Approx(3 * kPi / 4).epsilon(1e-12));
    CHECK(sorted[2] == doctest::Approx(3 * kPi / 4).epsilon(1e-12));
}

TEST_CASE("height constraint residual: zero, constructed null vector, random") {
    auto net = euclid_triod();
    std::vector<double> h(net.total_segments(), 0.0);
    CHECK(height_constraint_residual(net, h) == doctest::Approx(0.0));

    auto th = junction_sector_angles(net, 0);
    h = {std::sin(th[1]), -std::sin(th[0]), 0.0};
    CHECK(height_constraint_residual(net, h) < 1e-14);

    auto rng = make_rng(9);
    h = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    auto w = junction_height_weights(net, 0);
    double expect = std::abs(w[0] * h[0] + w[1] * h[1] + w[2] * h[2]);
    CHECK(height_constraint_residual(net, h) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("rebuild_from_heights: zero heights reproduce the reference") {
    auto net = make_hexagon_theta({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    std::vector<double> h(net.total_segments(), 0.0);
    auto out = rebuild_from_heights(net, h);
    for (size_t c = 0; c < net.curves.size(); ++c)
        for (size_t v = 0; v < net.curves[c].points.size(); ++v)
            CHECK(dist(net.curves[c].points[v], out.curves[c].points[v]) < 1e-12);
}

TEST_CASE("rebuild_from_heights: round trip reproduces the heights") {
    auto rng = make_rng(31);
    auto net = make_octagon_triod(1.0, 0.9, 1.3);
    auto w = junction_height_weights(net, 0);
    for (int trial = 0; trial < 20; ++trial) {
        double a = uniform(rng, -0.05, 0.05), b = uniform(rng, -0.05, 0.05);
        std::vector<double> h = {a, b, -(w[0] * a + w[1] * b) / w[2]};
        auto out = rebuild_from_heights(net, h);
        CHECK(is_parallel(net, out).parallel);
        for (int f = 0; f < net.total_segments(); ++f) {
            auto s = net.segment_at(f);
            auto dv = distance_vector(net.curves[s.curve], s.seg, out.curves[s.curve], s.seg);
            CHECK(dv.h == doctest::Approx(h[f]).epsilon(1e-12));
        }
    }
}

TEST_CASE("rebuild_from_heights: violated junction constraint is rejected") {
    auto net = make_octagon_triod(1.0, 1.0, 1.0);
    std::vector<double> h = {1e-3, 0.0, 0.0};
    if (height_constraint_residual(net, h) < 1e-9) h = {1e-3, 1e-3, 1e-3};
    CHECK_THROWS_AS(rebuild_from_heights(net, h), Error);
}

TEST_CASE("rebuild length of an interior segment is affine in the heights") {
    // chain of four segments; the middle segment J has non-junction neighbors
    Network net;
    net.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    Curve c;
    c.id = "chain";
    c.anisotropy = 0;
    std::vector<double> angs = {15, 75, 10, -50};
    std::vector<double> lens = {1.0, 0.8, 1.3, 0.9};
    c.points = {{0, 0}};
    for (int i = 0; i < 4; ++i)
        c.points.push_back(c.points.back() + lens[i] * dir(angs[i] * kPi / 180));
    net.curves.push_back(c);

    auto Jlen = [&](const std::vector<double>& h) {
        auto out = rebuild_from_heights(net, h);
        return out.curves[0].seg_length(2);
    };
    std::vector<double> h0 = {0.01, -0.02, 0.015, -0.01};
    for (int i = 0; i < 4; ++i) {
        auto hp = h0, hm = h0;
        hp[i] += 0.013;
        hm[i] -= 0.013;
        double second = Jlen(hp) - 2 * Jlen(h0) + Jlen(hm);
        CHECK(std::abs(second) < 1e-12);
    }
    // all eight sign configurations stay affine
    for (int mask = 0; mask < 8; ++mask) {
        std::vector<double> h = {0.0, (mask & 1) ? 0.02 : -0.02, (mask & 2) ? 0.02 : -0.02,
                                 (mask & 4) ? 0.02 : -0.02};
        auto hp = h, hm = h;
        hp[2] += 0.005;
        hm[2] -= 0.005;
        CHECK(std::abs(Jlen(hp) - 2 * Jlen(h) + Jlen(hm)) < 1e-12);
    }
}

TEST_CASE("length-change coefficients match the angle formulas") {
    // configuration with counterclockwise turns chosen so the length change of J is
    //   -h_{S'}/sin t1 + h_J (cot t1 - cot t2) - h_{S''}/sin t2
    // with t1 the turn angle from tau_{S'} to tau_J and t2 = pi - turn(tau_J -> tau_{S''})
    double t1 = 115 * kPi / 180, t2 = 120 * kPi / 180;
    double a0 = 20 * kPi / 180;
    std::vector<double> angs = {a0, a0 + t1, a0 + t1 + (kPi - t2)};
    Network net;
    net.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    Curve c;
    c.id = "chain";
    c.anisotropy = 0;
    c.points = {{0, 0}};
    for (double a : angs) c.points.push_back(c.points.back() + dir(a));
    net.curves.push_back(c);

    auto Jlen = [&](const std::vector<double>& h) {
        return rebuild_from_heights(net, h).curves[0].seg_length(1);
    };
    auto rng = make_rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> h = {uniform(rng, -0.03, 0.03), uniform(rng, -0.03, 0.03),
                                 uniform(rng, -0.03, 0.03)};
        double predicted = 1.0 - h[0] / std::sin(t1) + h[1] * (1 / std::tan(t1) - 1 / std::tan(t2)) -
                           h[2] / std::sin(t2);
        CHECK(Jlen(h) == doctest::Approx(predicted).epsilon(1e-12));
    }
}

TEST_CASE("length change at a triple junction end matches x3/sin - x1 cot") {
    // triod with curves oriented from the junction; J = first segment of curve 0.
    // x1 = h_J, x3 = -h_{S''} with S'' chosen as the incident segment whose
    // clockwise turn from tau_J is pi - t1.
    double t1 = 105 * kPi / 180;
    Network net;
    net.anisotropies.push_back({"e", SmoothAnisotropy::euclidean()});
    // J along +x; S'' turned clockwise by pi - t1 so that cross(tau_J, tau_S'') = -sin t1
    // and dot(tau_J, tau_S'') = -cos t1
    Vec2 tauJ{1, 0};
    Vec2 tauS2 = dir(-(kPi - t1));
    Vec2 tauS3 = dir(kPi - 0.8);
    Curve j{"J", 0, {{0, 0}, tauJ}, false, std::nullopt, std::nullopt};
    Curve s2{"S2", 0, {{0, 0}, tauS2}, false, std::nullopt, std::nullopt};
    Curve s3{"S3", 0, {{0, 0}, tauS3}, false, std::nullopt, std::nullopt};
    net.curves = {j, s2, s3};
    net.junctions.push_back({{0, 0},
                             {CurveEnd{0, EndRole::Start}, CurveEnd{1, EndRole::Start},
                              CurveEnd{2, EndRole::Start}}});

    auto w = junction_height_weights(net, 0);
    auto rng = make_rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        double hJ = uniform(rng, -0.02, 0.02);
        double hS2 = uniform(rng, -0.02, 0.02);
        double hS3 = -(w[0] * hJ + w[1] * hS2) / w[2];
        auto out = rebuild_from_heights(net, {hJ, hS2, hS3});
        // far endpoint of J is free: moves by hJ along its normal, so the whole
        // length change comes from the junction end
        double x1 = hJ, x3 = -hS2;
        double predicted = 1.0 + x3 / std::sin(t1) - x1 / std::tan(t1);
        CHECK(out.curves[0].seg_length(0) == doctest::Approx(predicted).epsilon(1e-12));
    }
}

TEST_CASE("rebuild: half-line endpoints slide along their carrier") {
    auto net = make_octagon_triod(1.0, 1.0, 1.0);
    auto w = junction_height_weights(net, 0);
    std::vector<double> h = {0.01 * w[1], -0.01 * w[0], 0.0};
    auto out = rebuild_from_heights(net, h);
    for (int i = 0; i < 3; ++i) {
        const auto& c0 = net.curves[i];
        const auto& c1 = out.curves[i];
        Vec2 d = c0.halfline->direction;
        // new half-line base stays on the old carrier line
        CHECK(std::abs(cross(c1.points.back() - c0.points.back(), d)) < 1e-12);
        CHECK(norm(c1.halfline->direction - d) < 1e-15);
    }
}
