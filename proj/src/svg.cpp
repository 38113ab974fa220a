#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace netflow {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

std::string render_svg(const Network& net, const SvgOptions& opt, const CahnHoffmanField* field) {
    // bounding box over nodes and truncated half-lines
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    auto grow = [&](Vec2 p) {
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    };
    for (const auto& c : net.curves) {
        for (auto p : c.points) grow(p);
        if (c.halfline && !c.points.empty())
            grow(c.points.back() + c.halfline->direction * opt.halfline_radius);
    }
    if (xlo > xhi) {
        xlo = ylo = -1;
        xhi = yhi = 1;
    }
    double spanx = std::max(xhi - xlo, 1e-9), spany = std::max(yhi - ylo, 1e-9);
    double span = std::max(spanx, spany);
    double scale = (1 - 2 * opt.margin) * std::min(opt.width, opt.height) / span;
    double cx = 0.5 * (xlo + xhi), cy = 0.5 * (ylo + yhi);
    auto X = [&](Vec2 p) { return opt.width / 2 + (p.x - cx) * scale; };
    auto Y = [&](Vec2 p) { return opt.height / 2 - (p.y - cy) * scale; };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(opt.width) << "\" height=\""
        << fmt(opt.height) << "\" viewBox=\"0 0 " << fmt(opt.width) << " " << fmt(opt.height)
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (size_t ci = 0; ci < net.curves.size(); ++ci) {
        const auto& c = net.curves[ci];
        if (c.points.empty()) continue;
        out << "<path d=\"M " << fmt(X(c.points[0])) << " " << fmt(Y(c.points[0]));
        for (size_t k = 1; k < c.points.size(); ++k)
            out << " L " << fmt(X(c.points[k])) << " " << fmt(Y(c.points[k]));
        if (c.closed) out << " Z";
        out << "\" fill=\"none\" stroke=\"" << palette[ci % 6] << "\" stroke-width=\"1.5\"/>\n";
        if (c.halfline) {
            Vec2 a = c.points.back();
            Vec2 b = a + c.halfline->direction * opt.halfline_radius;
            out << "<path d=\"M " << fmt(X(a)) << " " << fmt(Y(a)) << " L " << fmt(X(b)) << " "
                << fmt(Y(b)) << "\" fill=\"none\" stroke=\"" << palette[ci % 6]
                << "\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>\n";
        }
    }
    for (const auto& jn : net.junctions)
        out << "<circle cx=\"" << fmt(X(jn.at)) << "\" cy=\"" << fmt(Y(jn.at))
            << "\" r=\"3.5\" fill=\"black\"/>\n";

    if (field && !net.curves.empty()) {
        double alen = 0.35 / scale;  // arrows in model units scaled back
        for (size_t ci = 0; ci < net.curves.size(); ++ci) {
            const auto& c = net.curves[ci];
            if (!is_crystalline(net.aniso_of(c))) continue;
            for (size_t v = 0; v < c.points.size() && v < field->values[ci].size(); ++v) {
                Vec2 n = field->at(net, static_cast<int>(ci), static_cast<int>(v));
                Vec2 a = c.points[v];
                Vec2 b = a + n * alen;
                out << "<path d=\"M " << fmt(X(a)) << " " << fmt(Y(a)) << " L " << fmt(X(b)) << " "
                    << fmt(Y(b)) << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"0.8\"/>\n";
            }
        }
    }

    if (opt.wulff_inset) {
        double inset = 0.18 * std::min(opt.width, opt.height);
        double ox = opt.width - inset - 8, oy = 8;
        int drawn = 0;
        for (const auto& na : net.anisotropies) {
            if (!is_crystalline(na.aniso)) continue;
            const auto& B = as_crystalline(na.aniso);
            double r = 0;
            for (auto v : B.vertices()) r = std::max(r, norm(v));
            double s = inset / (2 * r);
            out << "<path d=\"";
            for (size_t k = 0; k < B.vertices().size(); ++k) {
                Vec2 v = B.vertices()[k];
                out << (k == 0 ? "M " : " L ") << fmt(ox + inset / 2 + v.x * s) << " "
                    << fmt(oy + inset / 2 - v.y * s + drawn * (inset + 6));
            }
            out << " Z\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
            ++drawn;
        }
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace netflow
