#pragma once

#include <iosfwd>
#include <string>

#include "lowner/zipper.hpp"

namespace lowner {

// "index,kind,t,x,y" rows, floats with 17 significant digits.
void write_trace_csv(const Trace& trace, std::ostream& out);
void write_trace_csv(const Trace& trace, const std::string& path);

// Polyline rendering; the disk chart draws the unit circle, the half-plane
// draws the real axis, strips draw both boundary lines.
void render_svg(const Trace& trace, Chart chart, const std::string& path);
std::string render_svg_string(const Trace& trace, Chart chart);

}  // namespace lowner
