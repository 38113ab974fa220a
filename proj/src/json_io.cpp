#include "json_io.hpp"

#include "crystalline.hpp"
#include "errors.hpp"

namespace netflow {

using nlohmann::json;

namespace {

Vec2 vec_from(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw parse_error("expected [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

json vec_to(Vec2 v) { return json::array({v.x, v.y}); }

} // namespace

Anisotropy anisotropy_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw parse_error("anisotropy needs a \"kind\"");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "smooth") {
        std::string family = j.value("family", "cosine");
        std::vector<double> params = j.value("params", std::vector<double>{1.0});
        if (family == "cosine") return SmoothAnisotropy::cosine(params);
        if (family == "euclidean") return SmoothAnisotropy::euclidean();
        throw parse_error("unknown smooth anisotropy family: " + family);
    }
    if (kind == "crystalline") {
        if (!j.contains("vertices")) throw parse_error("crystalline anisotropy needs \"vertices\"");
        std::vector<Vec2> verts;
        for (const auto& v : j.at("vertices")) verts.push_back(vec_from(v));
        return CrystallinePolytope(std::move(verts));
    }
    throw parse_error("unknown anisotropy kind: " + kind);
}

json anisotropy_to_json(const Anisotropy& a) {
    json j;
    if (is_crystalline(a)) {
        j["kind"] = "crystalline";
        json verts = json::array();
        for (auto v : as_crystalline(a).vertices()) verts.push_back(vec_to(v));
        j["vertices"] = verts;
    } else {
        const auto& s = as_smooth(a);
        j["kind"] = "smooth";
        j["family"] = s.family();
        j["params"] = s.params();
    }
    return j;
}

Network network_from_json(const json& j) {
    if (!j.is_object()) throw parse_error("network file must be a JSON object");
    if (j.value("schema", 0) != 1) throw parse_error("unsupported or missing schema version");
    Network net;
    for (const auto& a : j.value("anisotropies", json::array())) {
        if (!a.contains("id")) throw parse_error("anisotropy entry needs an \"id\"");
        net.anisotropies.push_back({a.at("id").get<std::string>(), anisotropy_from_json(a)});
    }
    for (const auto& c : j.value("curves", json::array())) {
        Curve cv;
        cv.id = c.value("id", "curve" + std::to_string(net.curves.size()));
        std::string aid = c.value("anisotropy", "");
        cv.anisotropy = net.find_anisotropy(aid);
        if (cv.anisotropy < 0) throw parse_error("curve " + cv.id + ": unknown anisotropy \"" + aid + "\"");
        if (!c.contains("points")) throw parse_error("curve " + cv.id + " needs \"points\"");
        for (const auto& p : c.at("points")) cv.points.push_back(vec_from(p));
        cv.closed = c.value("closed", false);
        if (c.contains("halfline")) {
            Vec2 d = vec_from(c.at("halfline").at("direction"));
            if (norm(d) < 1e-14) throw parse_error("curve " + cv.id + ": zero half-line direction");
            cv.halfline = HalfLine{normalized(d)};
        }
        if (c.contains("phases")) {
            auto ph = c.at("phases");
            cv.phases = std::make_pair(ph.at(0).get<int>(), ph.at(1).get<int>());
        }
        net.curves.push_back(std::move(cv));
    }
    for (const auto& jn : j.value("junctions", json::array())) {
        Junction junc;
        junc.at = vec_from(jn.at("at"));
        for (const auto& e : jn.at("ends")) {
            std::string cid = e.at(0).get<std::string>();
            std::string role = e.at(1).get<std::string>();
            int ci = net.find_curve(cid);
            if (ci < 0) throw parse_error("junction references unknown curve \"" + cid + "\"");
            if (role != "start" && role != "end")
                throw parse_error("junction end role must be \"start\" or \"end\"");
            junc.ends.push_back({ci, role == "start" ? EndRole::Start : EndRole::End});
        }
        net.junctions.push_back(std::move(junc));
    }
    net.reconcile_junctions();
    return net;
}

Network network_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);  // keep the position information of parse errors
    } catch (const json::parse_error& e) {
        throw parse_error(e.what());
    }
    return network_from_json(j);
}

json network_to_json(const Network& net) {
    json j;
    j["schema"] = 1;
    j["anisotropies"] = json::array();
    for (const auto& a : net.anisotropies) {
        json e = anisotropy_to_json(a.aniso);
        e["id"] = a.id;
        j["anisotropies"].push_back(e);
    }
    j["curves"] = json::array();
    for (const auto& c : net.curves) {
        json e;
        e["id"] = c.id;
        e["anisotropy"] = net.anisotropies[c.anisotropy].id;
        e["points"] = json::array();
        for (auto p : c.points) e["points"].push_back(vec_to(p));
        if (c.closed) e["closed"] = true;
        if (c.halfline) e["halfline"] = {{"direction", vec_to(c.halfline->direction)}};
        if (c.phases) e["phases"] = {c.phases->first, c.phases->second};
        j["curves"].push_back(e);
    }
    j["junctions"] = json::array();
    for (const auto& jn : net.junctions) {
        json e;
        e["at"] = vec_to(jn.at);
        e["ends"] = json::array();
        for (auto en : jn.ends)
            e["ends"].push_back(json::array(
                {net.curves[en.curve].id, en.role == EndRole::Start ? "start" : "end"}));
        j["junctions"].push_back(e);
    }
    return j;
}

json validation_to_json(const ValidationReport& rep) {
    json j;
    j["valid"] = rep.valid();
    j["violations"] = json::array();
    for (const auto& v : rep.violations) {
        const char* kind = "";
        switch (v.kind) {
            case ViolationKind::SelfIntersection: kind = "self-intersection"; break;
            case ViolationKind::NonTripleJunction: kind = "non-triple junction"; break;
            case ViolationKind::Disconnected: kind = "disconnected"; break;
            case ViolationKind::HalfLineAtJunction: kind = "half-line at junction"; break;
            case ViolationKind::BrakkeSpoon: kind = "spoon topology"; break;
            case ViolationKind::DegenerateSegment: kind = "degenerate segment"; break;
            case ViolationKind::MissingAnisotropy: kind = "missing anisotropy"; break;
            case ViolationKind::BadJunctionRef: kind = "bad junction reference"; break;
        }
        j["violations"].push_back({{"kind", kind}, {"detail", v.detail}});
    }
    return j;
}

json curvature_report(const Network& net) {
    auto reg = phi_regular(net);
    json j;
    j["schema"] = 1;
    j["phi_regular"] = reg.regular;
    if (auto warn = check_triangle_inequality(net)) j["warnings"] = json::array({*warn});
    if (!reg.regular) {
        j["obstruction"] = reg.obstruction;
        return j;
    }
    auto mf = min_field(net);
    auto st = stability_margin(net, mf);
    j["objective"] = mf.objective;
    j["unique_minimizer"] = mf.unique;
    j["segments"] = json::array();
    for (int f = 0; f < net.total_segments(); ++f) {
        auto s = net.segment_at(f);
        const Curve& c = net.curves[s.curve];
        json e;
        e["curve"] = c.id;
        e["segment"] = s.seg;
        e["length"] = c.seg_length(s.seg);
        e["kappa"] = mf.curvatures[f];
        j["segments"].push_back(e);
    }
    j["offsets"] = json::array();
    for (size_t ci = 0; ci < net.curves.size(); ++ci) {
        json e;
        e["curve"] = net.curves[ci].id;
        e["values"] = json::array();
        for (const auto& bp : mf.field.values[ci])
            e["values"].push_back({{"edge", bp.edge}, {"offset", bp.offset}});
        j["offsets"].push_back(e);
    }
    json stab;
    stab["stable"] = st.stable;
    if (std::isfinite(st.margin)) stab["margin"] = st.margin;
    else stab["margin"] = nullptr;
    stab["junctions"] = json::array();
    for (auto p : st.placements) {
        const char* s2 = p == JunctionPlacement::Interior ? "interior"
                         : p == JunctionPlacement::OnRegionBoundary ? "on-region-boundary"
                                                                    : "at-vertex";
        stab["junctions"].push_back(s2);
    }
    j["stability"] = stab;
    j["curvature_balance_residual"] = curvature_balance_residual(net, mf.curvatures);
    return j;
}

json smooth_snapshot_to_json(const SmoothSnapshot& snap, const std::vector<std::string>& curve_ids) {
    json j;
    j["t"] = snap.t;
    j["curves"] = json::array();
    for (size_t c = 0; c < snap.nodes.size(); ++c) {
        json e;
        e["id"] = c < curve_ids.size() ? curve_ids[c] : "curve" + std::to_string(c);
        e["nodes"] = json::array();
        for (auto p : snap.nodes[c]) e["nodes"].push_back(json::array({p.x, p.y}));
        if (c < snap.halflines.size() && snap.halflines[c])
            e["halfline"] = {{"direction", json::array({snap.halflines[c]->x, snap.halflines[c]->y})}};
        j["curves"].push_back(e);
    }
    j["energy"] = snap.diag.energy;
    j["herring_residual"] = snap.diag.max_herring_residual;
    j["compatibility_residual"] = snap.diag.max_compatibility_residual;
    j["min_edge"] = snap.diag.min_edge_length;
    j["dissipation_rate"] = snap.diag.dissipation_rate;
    return j;
}

json poly_snapshot_to_json(const PolySnapshot& snap) {
    json j;
    j["t"] = snap.t;
    j["h"] = snap.h;
    j["kappa"] = snap.kappa;
    j["energy"] = snap.energy;
    j["constraint_residual"] = snap.constraint_residual;
    j["balance_residual"] = snap.balance_residual;
    if (std::isfinite(snap.stability_margin)) j["stability_margin"] = snap.stability_margin;
    j["curves"] = json::array();
    for (const auto& c : snap.network.curves) {
        json e;
        e["id"] = c.id;
        e["nodes"] = json::array();
        for (auto p : c.points) e["nodes"].push_back(json::array({p.x, p.y}));
        if (c.halfline)
            e["halfline"] = {{"direction", vec_to(c.halfline->direction)}};
        j["curves"].push_back(e);
    }
    return j;
}

EvolveConfig evolve_config_from_json(const json& j) {
    EvolveConfig cfg;
    cfg.mode = j.value("mode", "smooth");
    if (cfg.mode != "smooth" && cfg.mode != "crystalline")
        throw parse_error("mode must be \"smooth\" or \"crystalline\"");
    cfg.T = j.value("T", 0.1);
    if (!(cfg.T >= 0)) throw parse_error("horizon T must be nonnegative");
    cfg.render_radius = j.value("render_radius", 5.0);
    cfg.smooth.dt_safety = j.value("dt_safety", cfg.smooth.dt_safety);
    cfg.smooth.tol_herring = j.value("tol_herring", cfg.smooth.tol_herring);
    cfg.smooth.tol_herring0 = j.value("tol_herring0", cfg.smooth.tol_herring0);
    cfg.smooth.resample_every = j.value("resample_every", cfg.smooth.resample_every);
    cfg.smooth.snapshot_every = j.value("snapshot_every", cfg.smooth.snapshot_every);
    if (cfg.smooth.dt_safety <= 0 || cfg.smooth.tol_herring <= 0)
        throw parse_error("tolerances and dt safety must be positive");
    cfg.poly.dt = j.value("dt", cfg.poly.dt);
    if (!(cfg.poly.dt > 0)) throw parse_error("dt must be positive");
    cfg.poly.T = cfg.T;
    cfg.poly.snapshot_every = j.value("snapshot_every", cfg.poly.snapshot_every);
    cfg.poly.picard_check = j.value("picard_check", false);
    cfg.poly.rho0 = j.value("rho0", 0.0);
    return cfg;
}

} // namespace netflow
