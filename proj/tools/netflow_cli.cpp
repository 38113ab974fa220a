// Command-line front end for the netflow shared library. Talks to the core
// exclusively through the C API in netflow.h.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "netflow.h"

namespace {

// exit codes: 0 ok, 1 domain violation, 2 I/O or parse error, 3 numerical failure
int exit_code(nf_status st) {
    switch (st) {
        case NF_OK: return 0;
        case NF_ERR_DOMAIN: return 1;
        case NF_ERR_PARSE: return 2;
        case NF_ERR_NUMERIC: return 3;
        default: return 2;
    }
}

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

struct NetHandle {
    nf_network* net = nullptr;
    ~NetHandle() { nf_network_free(net); }
};

struct StrHandle {
    char* s = nullptr;
    ~StrHandle() { nf_string_free(s); }
};

int load_network(const std::string& path, NetHandle& h) {
    std::string text;
    if (!read_file(path, text)) {
        std::cerr << "error: cannot read " << path << "\n";
        return 2;
    }
    nf_status st = nf_network_parse(text.c_str(), &h.net);
    if (st != NF_OK) {
        std::cerr << "error: " << nf_last_error() << "\n";
        return exit_code(st);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"netflow: anisotropic and crystalline curvature flow of planar networks"};
    app.require_subcommand(1);

    std::string path, out_path, config_json, svg_dir;
    double window_radius = -1.0;
    double T = 0.1, dt = 1e-3, dt_safety = 0.25, tol_herring = 1e-8;
    int snapshot_every = 10, resample_every = 10;
    bool picard = false;
    std::string mode = "smooth";
    std::string traj_path;
    double svg_width = 640, svg_height = 640, halfline_radius = 5.0;
    bool wulff_inset = false, arrows = false;

    auto* cmd_validate = app.add_subcommand("validate", "check a network file");
    cmd_validate->add_option("network", path, "network JSON file")->required();

    auto* cmd_curv = app.add_subcommand("curvature", "crystalline curvature of a network");
    cmd_curv->add_option("network", path, "network JSON file")->required();

    auto* cmd_energy = app.add_subcommand("energy", "anisotropy-weighted length");
    cmd_energy->add_option("network", path, "network JSON file")->required();
    cmd_energy->add_option("--window", window_radius, "clip to a disc of this radius");

    auto* cmd_evolve = app.add_subcommand("evolve", "run a curvature flow");
    cmd_evolve->add_option("network", path, "network JSON file")->required();
    cmd_evolve->add_option("--mode", mode, "smooth | crystalline")->check(CLI::IsMember({"smooth", "crystalline"}));
    cmd_evolve->add_option("--T", T, "time horizon");
    cmd_evolve->add_option("--dt", dt, "step size (crystalline mode)");
    cmd_evolve->add_option("--dt-safety", dt_safety, "parabolic step safety factor (smooth mode)");
    cmd_evolve->add_option("--tol-herring", tol_herring, "junction balance tolerance (smooth mode)");
    cmd_evolve->add_option("--resample-every", resample_every, "arclength resampling cadence");
    cmd_evolve->add_option("--snapshot-every", snapshot_every, "snapshot cadence in steps");
    cmd_evolve->add_flag("--picard-check", picard, "also run the fixed-point iteration (crystalline)");
    cmd_evolve->add_option("-o,--out", out_path, "trajectory output (JSON lines; default stdout)");
    cmd_evolve->add_option("--svg-dir", svg_dir, "write one SVG per snapshot into this directory");
    bool fail_on_event = false;
    cmd_evolve->add_flag("--fail-on-event", fail_on_event,
                         "exit with status 3 when the run stops at an event before the horizon");

    auto* cmd_svg = app.add_subcommand("svg", "render a network or snapshot to SVG");
    cmd_svg->add_option("input", path, "network JSON or trajectory snapshot line")->required();
    cmd_svg->add_option("-o,--out", out_path, "output file (default stdout)");
    cmd_svg->add_option("--width", svg_width, "canvas width");
    cmd_svg->add_option("--height", svg_height, "canvas height");
    cmd_svg->add_option("--halfline-radius", halfline_radius, "half-line truncation length");
    cmd_svg->add_flag("--wulff-inset", wulff_inset, "draw Wulff polygons");
    cmd_svg->add_flag("--arrows", arrows, "draw Cahn-Hoffman arrows when available");

    CLI11_PARSE(app, argc, argv);

    if (cmd_validate->parsed()) {
        NetHandle h;
        if (int rc = load_network(path, h)) return rc;
        StrHandle rep;
        nf_status st = nf_network_validate(h.net, &rep.s);
        if (rep.s) std::cout << rep.s << "\n";
        if (st != NF_OK && st != NF_ERR_DOMAIN) std::cerr << "error: " << nf_last_error() << "\n";
        return exit_code(st);
    }

    if (cmd_curv->parsed()) {
        NetHandle h;
        if (int rc = load_network(path, h)) return rc;
        StrHandle rep;
        nf_status st = nf_curvature(h.net, &rep.s);
        if (rep.s) std::cout << rep.s << "\n";
        if (st != NF_OK) std::cerr << "error: " << nf_last_error() << "\n";
        return exit_code(st);
    }

    if (cmd_energy->parsed()) {
        NetHandle h;
        if (int rc = load_network(path, h)) return rc;
        double e = 0;
        nf_status st = nf_network_energy(h.net, window_radius, &e);
        if (st != NF_OK) {
            std::cerr << "error: " << nf_last_error() << "\n";
            return exit_code(st);
        }
        std::printf("%.17g\n", e);
        return 0;
    }

    if (cmd_evolve->parsed()) {
        NetHandle h;
        if (int rc = load_network(path, h)) return rc;
        std::ostringstream cfg;
        cfg << "{\"mode\":\"" << mode << "\",\"T\":" << T << ",\"dt\":" << dt
            << ",\"dt_safety\":" << dt_safety << ",\"tol_herring\":" << tol_herring
            << ",\"resample_every\":" << resample_every << ",\"snapshot_every\":" << snapshot_every
            << ",\"picard_check\":" << (picard ? "true" : "false") << "}";
        nf_sim* sim = nullptr;
        nf_status st = nf_sim_create(h.net, cfg.str().c_str(), &sim);
        if (st != NF_OK) {
            std::cerr << "error: " << nf_last_error() << "\n";
            return exit_code(st);
        }
        if (!svg_dir.empty()) std::filesystem::create_directories(svg_dir);
        std::ofstream out_file;
        std::ostream* out = &std::cout;
        if (!out_path.empty()) {
            out_file.open(out_path, std::ios::binary);
            if (!out_file) {
                std::cerr << "error: cannot write " << out_path << "\n";
                nf_sim_free(sim);
                return 2;
            }
            out = &out_file;
        }
        int snap_index = 0;
        for (;;) {
            StrHandle line;
            st = nf_sim_next(sim, &line.s);
            if (st != NF_OK || !line.s) break;
            (*out) << line.s << "\n";
            if (!svg_dir.empty()) {
                StrHandle svg;
                if (nf_render_svg(line.s, "{}", &svg.s) == NF_OK) {
                    char name[64];
                    std::snprintf(name, sizeof(name), "/snapshot-%05d.svg", snap_index);
                    std::ofstream sf(svg_dir + name, std::ios::binary);
                    sf << svg.s;
                }
            }
            ++snap_index;
        }
        StrHandle summary;
        nf_sim_summary(sim, &summary.s);
        if (summary.s) std::cerr << summary.s << "\n";
        nf_sim_free(sim);
        if (st != NF_OK) return exit_code(st);
        if (fail_on_event && summary.s) {
            std::string s(summary.s);
            bool event = s.find("\"kind\":\"none\"") == std::string::npos &&
                         s.find("\"event\":null") == std::string::npos;
            if (event) return 3;
        }
        return 0;
    }

    if (cmd_svg->parsed()) {
        std::string text;
        if (!read_file(path, text)) {
            std::cerr << "error: cannot read " << path << "\n";
            return 2;
        }
        std::ostringstream opts;
        opts << "{\"width\":" << svg_width << ",\"height\":" << svg_height
             << ",\"halfline_radius\":" << halfline_radius
             << ",\"wulff_inset\":" << (wulff_inset ? "true" : "false")
             << ",\"arrows\":" << (arrows ? "true" : "false") << "}";
        StrHandle svg;
        nf_status st = nf_render_svg(text.c_str(), opts.str().c_str(), &svg.s);
        if (st != NF_OK) {
            std::cerr << "error: " << nf_last_error() << "\n";
            return exit_code(st);
        }
        if (out_path.empty()) {
            std::cout << svg.s;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            out << svg.s;
        }
        return 0;
    }

    return 2;
}
