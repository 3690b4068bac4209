#include "lowner/chart.hpp"

#include <cmath>

namespace lowner {

const char* chart_name(Chart c) {
    switch (c) {
        case Chart::HalfPlane: return "halfplane";
        case Chart::Disk: return "disk";
        case Chart::Strip: return "strip";
        case Chart::Log: return "log";
    }
    return "?";
}

std::optional<Chart> chart_from_name(const std::string& name) {
    if (name == "halfplane") return Chart::HalfPlane;
    if (name == "disk") return Chart::Disk;
    if (name == "strip") return Chart::Strip;
    if (name == "log") return Chart::Log;
    return std::nullopt;
}

CJet to_halfplane(Chart from, cplx z) {
    CJet x = CJet::var(z);
    switch (from) {
        case Chart::HalfPlane:
            return x;
        case Chart::Disk:
            // tau(z) = i(1-z)/(1+z); z=1 -> origin, z=-1 -> infinity
            return cplx(0.0, 1.0) * (1.0 - x) / (1.0 + x);
        case Chart::Strip:
            return tanh(0.5 * x);
        case Chart::Log:
            return tan(0.5 * x);
    }
    return x;
}

CPoint from_halfplane(Chart to, cplx w) {
    switch (to) {
        case Chart::HalfPlane:
            return CPoint::at(w);
        case Chart::Disk: {
            cplx den = cplx(0.0, 1.0) + w;
            if (std::abs(den) == 0.0) return CPoint::inf();
            return CPoint::at((cplx(0.0, 1.0) - w) / den);
        }
        case Chart::Strip: {
            // 2 artanh(w) = log((1+w)/(1-w)); w = ±1 are the strip ends
            if (w == cplx(1.0) || w == cplx(-1.0)) return CPoint::inf();
            return CPoint::at(std::log((1.0 + w) / (1.0 - w)));
        }
        case Chart::Log: {
            // 2 arctan(w), principal sheet
            cplx i(0.0, 1.0);
            if (w == i) return CPoint::inf();
            return CPoint::at(-i * std::log((1.0 + i * w) / (1.0 - i * w)));
        }
    }
    return CPoint::at(w);
}

CPoint transition(Chart from, Chart to, cplx z) {
    if (from == to) return CPoint::at(z);
    cplx w = to_halfplane(from, z).f;
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return CPoint::inf();
    return from_halfplane(to, w);
}

namespace {
CJet field_jet(const WittField& v, Chart chart, cplx z) {
    CJet tau = to_halfplane(chart, z);
    // v^psi = v^H(tau) / tau'; build Sum c_n tau^{n+1} as a jet and divide
    // by the jet of tau' (carried in tau.d, tau.dd; third derivative of tau
    // is needed for the second derivative of the result).
    // Compose v^H with tau as jets:
    cplx f = v.eval_h(tau.f);
    cplx fd = v.deriv_h(tau.f);
    cplx fdd = 0.0;
    for (auto& [n, c] : v.coeffs()) {
        double k = double(n + 1);
        if (n + 1 != 0 && n != 0) fdd += c * k * double(n) * std::pow(tau.f, n - 1);
    }
    CJet num = lift(tau, f, fd, fdd);
    // jet of tau' needs tau''': exact for the four charts
    cplx tau3;
    switch (chart) {
        case Chart::HalfPlane:
            tau3 = 0.0;
            break;
        case Chart::Disk:
            // tau' = -2i/(1+z)^2 -> tau''' = -12i/(1+z)^4
            tau3 = cplx(0.0, -12.0) / std::pow(1.0 + z, 4);
            break;
        case Chart::Strip: {
            // tau = th(z/2): tau' = (1-tau^2)/2, tau'' = -tau tau',
            // tau''' = -tau'^2 - tau tau''
            cplx t = tau.f, t1 = tau.d, t2 = tau.dd;
            tau3 = -t1 * t1 - t * t2;
            break;
        }
        case Chart::Log: {
            // tau = tg(z/2): tau' = (1+tau^2)/2, tau'' = tau tau',
            // tau''' = tau'^2 + tau tau''
            cplx t = tau.f, t1 = tau.d, t2 = tau.dd;
            tau3 = t1 * t1 + t * t2;
            break;
        }
    }
    CJet dtau{tau.d, tau.dd, tau3};
    return num / dtau;
}
}  // namespace

cplx field_in_chart(const WittField& v, Chart chart, cplx z) {
    if (chart == Chart::HalfPlane) return v.eval_h(z);
    return field_jet(v, chart, z).f;
}

cplx field_deriv_in_chart(const WittField& v, Chart chart, cplx z) {
    if (chart == Chart::HalfPlane) return v.deriv_h(z);
    return field_jet(v, chart, z).d;
}

CJet field_chart_jet(const WittField& v, Chart chart, cplx z) {
    if (chart == Chart::HalfPlane) {
        cplx dd = 0.0;
        for (auto& [n, c] : v.coeffs())
            if (n + 1 != 0 && n != 0) dd += c * double(n + 1) * double(n) * std::pow(z, n - 1);
        return {v.eval_h(z), v.deriv_h(z), dd};
    }
    return field_jet(v, chart, z);
}

double pps_push(double value, const PpsOrder& order, cplx map_derivative) {
    cplx l = std::log(map_derivative);
    cplx out = value + order.mu * l + order.mu_star * std::conj(l);
    return out.real();
}

cplx ito_drift(const WittField& delta, const WittField& sigma, Chart chart,
               cplx z) {
    cplx d = field_in_chart(delta, chart, z);
    if (sigma.is_zero()) return d;
    cplx s = field_in_chart(sigma, chart, z);
    cplx sp = field_deriv_in_chart(sigma, chart, z);
    return d + 0.5 * s * sp;
}

}  // namespace lowner
