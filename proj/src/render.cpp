#include "lowner/render.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lowner {

namespace {
std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}
}  // namespace

void write_trace_csv(const Trace& trace, std::ostream& out) {
    out << "index,kind,t,x,y\n";
    for (const auto& p : trace.points) {
        out << p.index << "," << p.kind << "," << fmt17(p.t) << ","
            << fmt17(p.pos.real()) << "," << fmt17(p.pos.imag()) << "\n";
    }
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FieldError("cannot open '" + path + "' for writing");
    write_trace_csv(trace, f);
}

std::string render_svg_string(const Trace& trace, Chart chart) {
    if (trace.points.empty()) throw FieldError("render_svg: empty trace");
    double x0, y0, w, h;
    if (chart == Chart::Disk) {
        x0 = -1.05;
        y0 = -1.05;
        w = h = 2.1;
    } else {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        auto grow = [&](cplx p) {
            xmin = std::min(xmin, p.real());
            xmax = std::max(xmax, p.real());
            ymin = std::min(ymin, p.imag());
            ymax = std::max(ymax, p.imag());
        };
        for (const auto& p : trace.points) grow(p.pos);
        for (const auto& arc : trace.arcs)
            for (const auto& p : arc) grow(p);
        grow(0.0);
        double mx = 0.05 * std::max(1e-6, xmax - xmin) + 0.02;
        double my = 0.05 * std::max(1e-6, ymax - ymin) + 0.02;
        x0 = xmin - mx;
        y0 = ymin - my;
        w = (xmax - xmin) + 2 * mx;
        h = (ymax - ymin) + 2 * my;
    }
    std::ostringstream svg;
    // flip the y axis so the upper half-plane points up
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
        << "viewBox=\"" << fmt17(x0) << " " << fmt17(-(y0 + h)) << " " << fmt17(w)
        << " " << fmt17(h) << "\">\n";
    svg << "<g fill=\"none\" stroke-width=\"" << fmt17(0.004 * std::max(w, h))
        << "\">\n";
    if (chart == Chart::Disk) {
        svg << "<circle cx=\"0\" cy=\"0\" r=\"1\" stroke=\"#888888\"/>\n";
    } else if (chart == Chart::HalfPlane || chart == Chart::Log) {
        svg << "<line x1=\"" << fmt17(x0) << "\" y1=\"0\" x2=\"" << fmt17(x0 + w)
            << "\" y2=\"0\" stroke=\"#888888\"/>\n";
    } else if (chart == Chart::Strip) {
        svg << "<line x1=\"" << fmt17(x0) << "\" y1=\"0\" x2=\"" << fmt17(x0 + w)
            << "\" y2=\"0\" stroke=\"#888888\"/>\n";
        svg << "<line x1=\"" << fmt17(x0) << "\" y1=\"" << fmt17(-M_PI)
            << "\" x2=\"" << fmt17(x0 + w) << "\" y2=\"" << fmt17(-M_PI)
            << "\" stroke=\"#888888\"/>\n";
    }
    auto polyline = [&](const std::vector<cplx>& pts, const char* color) {
        if (pts.size() < 2) return;
        svg << "<polyline stroke=\"" << color << "\" points=\"";
        for (const auto& p : pts)
            svg << fmt17(p.real()) << "," << fmt17(-p.imag()) << " ";
        svg << "\"/>\n";
    };
    if (trace.arcs.empty()) {
        std::vector<cplx> line;
        line.push_back(chart == Chart::Disk ? cplx(1.0, 0.0) : cplx(0.0, 0.0));
        for (const auto& p : trace.points)
            if (p.kind == 'a') line.push_back(p.pos);
        polyline(line, "#c02020");
    } else {
        for (const auto& arc : trace.arcs) polyline(arc, "#c02020");
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

void render_svg(const Trace& trace, Chart chart, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw FieldError("cannot open '" + path + "' for writing");
    f << render_svg_string(trace, chart);
}

}  // namespace lowner
