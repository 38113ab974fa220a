#include "netflow.h"

#include <cstring>
#include <string>

#include "builders.hpp"
#include "crystalline.hpp"
#include "errors.hpp"
#include "json_io.hpp"
#include "network.hpp"
#include "poly_flow.hpp"
#include "smooth_flow.hpp"
#include "svg.hpp"

using namespace netflow;
using nlohmann::json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

nf_status status_of(const Error& e) {
    switch (e.code()) {
        case ErrorCode::Parse: return NF_ERR_PARSE;
        case ErrorCode::Numeric: return NF_ERR_NUMERIC;
        default: return NF_ERR_DOMAIN;
    }
}

template <typename Fn>
nf_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const json::exception& e) {
        g_last_error = e.what();
        return NF_ERR_PARSE;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NF_ERR_NUMERIC;
    }
}

} // namespace

struct nf_network {
    Network net;
};

struct nf_sim {
    EvolveConfig cfg;
    // one of the two trajectories is populated depending on the mode
    SmoothTrajectory smooth;
    PolyTrajectory poly;
    std::vector<std::string> curve_ids;
    size_t cursor = 0;
    bool crystalline_mode = false;
};

extern "C" {

const char* nf_version(void) { return "netflow 1.0.0"; }

const char* nf_last_error(void) { return g_last_error.c_str(); }

nf_status nf_network_parse(const char* text, nf_network** out) {
    if (!text || !out) return NF_ERR_ARG;
    *out = nullptr;
    return guarded([&]() {
        auto handle = new nf_network{network_from_string(text)};
        *out = handle;
        return NF_OK;
    });
}

void nf_network_free(nf_network* net) { delete net; }

nf_status nf_network_to_json(const nf_network* net, char** out) {
    if (!net || !out) return NF_ERR_ARG;
    return guarded([&]() {
        *out = dup_string(network_to_json(net->net).dump());
        return NF_OK;
    });
}

nf_status nf_network_validate(const nf_network* net, char** report_json) {
    if (!net) return NF_ERR_ARG;
    return guarded([&]() {
        auto rep = validate(net->net);
        if (report_json) *report_json = dup_string(validation_to_json(rep).dump());
        if (!rep.valid()) {
            g_last_error = rep.violations.front().detail;
            return NF_ERR_DOMAIN;
        }
        return NF_OK;
    });
}

nf_status nf_network_energy(const nf_network* net, double window_radius, double* out) {
    if (!net || !out) return NF_ERR_ARG;
    return guarded([&]() {
        std::optional<Window> w;
        if (window_radius > 0) {
            Window base = default_window(net->net, 1.0);
            w = Window{base.center, window_radius};
        }
        *out = phi_length(net->net, w);
        return NF_OK;
    });
}

nf_status nf_curvature(const nf_network* net, char** report_json) {
    if (!net || !report_json) return NF_ERR_ARG;
    return guarded([&]() {
        json rep = curvature_report(net->net);
        *report_json = dup_string(rep.dump());
        if (!rep.value("phi_regular", false)) {
            g_last_error = rep.value("obstruction", "network is not Phi-regular");
            return NF_ERR_DOMAIN;
        }
        return NF_OK;
    });
}

nf_status nf_sim_create(const nf_network* net, const char* config_json, nf_sim** out) {
    if (!net || !config_json || !out) return NF_ERR_ARG;
    *out = nullptr;
    return guarded([&]() {
        json jc = json::parse(config_json, nullptr, false);
        if (jc.is_discarded()) throw parse_error("malformed config JSON");
        EvolveConfig cfg = evolve_config_from_json(jc);
        if (const char* env = std::getenv("NETFLOW_THREADS")) {
            int t = std::atoi(env);
            if (t > 0) cfg.smooth.threads = t;
        }
        auto sim = std::make_unique<nf_sim>();
        sim->cfg = cfg;
        for (const auto& c : net->net.curves) sim->curve_ids.push_back(c.id);
        if (cfg.mode == "crystalline") {
            sim->crystalline_mode = true;
            sim->poly = run_poly_flow(net->net, cfg.T, cfg.poly);
        } else {
            sim->smooth = run_flow(net->net, cfg.T, cfg.smooth);
        }
        *out = sim.release();
        return NF_OK;
    });
}

void nf_sim_free(nf_sim* sim) { delete sim; }

nf_status nf_sim_next(nf_sim* sim, char** snapshot_json) {
    if (!sim || !snapshot_json) return NF_ERR_ARG;
    return guarded([&]() {
        *snapshot_json = nullptr;
        if (sim->crystalline_mode) {
            if (sim->cursor >= sim->poly.snapshots.size()) return NF_OK;
            *snapshot_json = dup_string(poly_snapshot_to_json(sim->poly.snapshots[sim->cursor]).dump());
        } else {
            if (sim->cursor >= sim->smooth.snapshots.size()) return NF_OK;
            *snapshot_json =
                dup_string(smooth_snapshot_to_json(sim->smooth.snapshots[sim->cursor], sim->curve_ids).dump());
        }
        ++sim->cursor;
        return NF_OK;
    });
}

nf_status nf_sim_summary(const nf_sim* sim, char** summary_json) {
    if (!sim || !summary_json) return NF_ERR_ARG;
    return guarded([&]() {
        json j;
        if (sim->crystalline_mode) {
            const auto& tr = sim->poly;
            j["mode"] = "crystalline";
            j["snapshots"] = tr.snapshots.size();
            j["final_time"] = tr.snapshots.empty() ? 0.0 : tr.snapshots.back().t;
            j["projections"] = tr.projection_count;
            const char* kind = "none";
            switch (tr.event.kind) {
                case FlowEventRecord::Kind::SegmentCollapse: kind = "segment-collapse"; break;
                case FlowEventRecord::Kind::StabilityLoss: kind = "stability-loss"; break;
                case FlowEventRecord::Kind::HeightRadiusExceeded: kind = "height-radius-exceeded"; break;
                case FlowEventRecord::Kind::RebuildFailure: kind = "rebuild-failure"; break;
                default: break;
            }
            j["event"] = {{"kind", kind}, {"time", tr.event.time}, {"subject", tr.event.subject}};
            if (!tr.snapshots.empty()) {
                j["energy_initial"] = tr.snapshots.front().energy;
                j["energy_final"] = tr.snapshots.back().energy;
            }
        } else {
            const auto& tr = sim->smooth;
            j["mode"] = "smooth";
            j["snapshots"] = tr.snapshots.size();
            j["final_time"] = tr.final_time;
            j["accepted_steps"] = tr.accepted_steps;
            if (tr.event.empty()) j["event"] = nullptr;
            else j["event"] = tr.event;
            if (!tr.snapshots.empty()) {
                j["energy_initial"] = tr.snapshots.front().diag.energy;
                j["energy_final"] = tr.snapshots.back().diag.energy;
            }
            j["warnings"] = tr.warnings;
        }
        *summary_json = dup_string(j.dump());
        return NF_OK;
    });
}

nf_status nf_render_svg(const char* network_or_snapshot_json, const char* options_json, char** svg) {
    if (!network_or_snapshot_json || !svg) return NF_ERR_ARG;
    return guarded([&]() {
        json j = json::parse(network_or_snapshot_json, nullptr, false);
        if (j.is_discarded()) throw parse_error("malformed JSON");
        SvgOptions opt;
        if (options_json && *options_json) {
            json jo = json::parse(options_json, nullptr, false);
            if (jo.is_discarded()) throw parse_error("malformed options JSON");
            opt.width = jo.value("width", opt.width);
            opt.height = jo.value("height", opt.height);
            opt.halfline_radius = jo.value("halfline_radius", opt.halfline_radius);
            opt.wulff_inset = jo.value("wulff_inset", opt.wulff_inset);
            opt.cahn_hoffman_arrows = jo.value("arrows", opt.cahn_hoffman_arrows);
        }
        Network net;
        if (j.contains("schema") && j.contains("curves") && !j.contains("t")) {
            net = network_from_json(j);
        } else {
            // evolve snapshot: polylines only
            net.anisotropies.push_back({"none", SmoothAnisotropy::euclidean()});
            for (const auto& c : j.value("curves", json::array())) {
                Curve cv;
                cv.id = c.value("id", "curve");
                cv.anisotropy = 0;
                for (const auto& p : c.at("nodes")) cv.points.push_back({p[0].get<double>(), p[1].get<double>()});
                if (c.contains("halfline")) {
                    const auto& d = c.at("halfline").at("direction");
                    cv.halfline = HalfLine{normalized({d[0].get<double>(), d[1].get<double>()})};
                }
                net.curves.push_back(std::move(cv));
            }
        }
        if (opt.cahn_hoffman_arrows) {
            bool crystalline = !net.curves.empty();
            for (const auto& c : net.curves) crystalline &= is_crystalline(net.aniso_of(c));
            if (crystalline) {
                auto reg = phi_regular(net);
                if (reg.regular) {
                    auto mf = min_field(net);
                    *svg = dup_string(render_svg(net, opt, &mf.field));
                    return NF_OK;
                }
            }
        }
        *svg = dup_string(render_svg(net, opt));
        return NF_OK;
    });
}

void nf_string_free(char* s) { std::free(s); }

} // extern "C"
