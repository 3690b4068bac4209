#pragma once

#include <optional>

#include "lowner/complexjet.hpp"
#include "lowner/field.hpp"

namespace lowner {

enum class Chart { HalfPlane, Disk, Strip, Log };

const char* chart_name(Chart c);
std::optional<Chart> chart_from_name(const std::string& name);

// A chart point; transitions can legitimately land at infinity
// (e.g. Disk -> HalfPlane at z = -1), which is carried as a tagged
// sentinel rather than a floating Inf.
struct CPoint {
    cplx value{};
    bool at_infinity = false;

    static CPoint inf() { return {0.0, true}; }
    static CPoint at(cplx z) { return {z, false}; }
};

// Transition map to the half-plane chart, with first/second derivative.
CJet to_halfplane(Chart from, cplx z);
// Inverse: from half-plane coordinates into `to` (principal branch for Log).
CPoint from_halfplane(Chart to, cplx w);

// General transition through the half-plane hub.
CPoint transition(Chart from, Chart to, cplx z);

// v in chart `chart`: v^psi(z) = v^H(tau(z)) / tau'(z).
cplx field_in_chart(const WittField& v, Chart chart, cplx z);
// z-derivative of the chart representation (exact, via jets).
cplx field_deriv_in_chart(const WittField& v, Chart chart, cplx z);
// full second-order jet (value, first and second derivative)
CJet field_chart_jet(const WittField& v, Chart chart, cplx z);

// Orders of a real pre-pre-Schwarzian: mu_star = conj(mu).
// chi type: mu = i chi/2; Q type: mu = Q/2.
struct PpsOrder {
    cplx mu{0.0, 0.0};
    cplx mu_star{0.0, 0.0};

    static PpsOrder chi_type(double chi) { return {cplx(0.0, chi / 2.0), cplx(0.0, -chi / 2.0)}; }
    static PpsOrder q_type(double q) { return {cplx(q / 2.0, 0.0), cplx(q / 2.0, 0.0)}; }
    static PpsOrder scalar() { return {}; }
};

// value + mu log(d) + mu* conj(log d) for a map derivative d != 0.
double pps_push(double value, const PpsOrder& order, cplx map_derivative);

// Ito drift of the stochastic flow in a fixed chart:
// (delta + sigma sigma'/2)^psi(z).
cplx ito_drift(const WittField& delta, const WittField& sigma, Chart chart,
               cplx z);

}  // namespace lowner
