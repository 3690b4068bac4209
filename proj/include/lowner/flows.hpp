#pragma once

#include <optional>

#include "lowner/chart.hpp"
#include "lowner/mobius.hpp"

namespace lowner {

struct FlowResult {
    cplx value;
    bool complete = true;          // reached the requested time
    double exit_time = 0.0;        // where integration stopped if not
};

inline constexpr double kOdeTol = 1e-10;

// One-parameter flow H_t[v] applied pointwise: dz/dt = v(z), adaptive
// Dormand-Prince 5(4).  Complete fields take the exact Moebius route.
FlowResult flow_point(const WittField& v, double t, cplx z,
                      Chart chart = Chart::HalfPlane, double rel_tol = kOdeTol);

// sqrt(z^2 + 4t) continued from z at t=0 (branch with Im >= 0, boundary
// sign following Re z).
cplx chordal_exact(double t, cplx z);

// Branch-stable root of a + b z^2 used by every classical step flow:
// picks the value in the closed upper half-plane, boundary sign following
// the side the point came from.
cplx upper_sqrt(cplx w, double side_hint);

}  // namespace lowner
