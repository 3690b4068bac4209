#include "lowner/flows.hpp"

#include <cmath>

namespace lowner {

cplx upper_sqrt(cplx w, double side_hint) {
    cplx r = std::sqrt(w);
    if (r.imag() < 0.0) r = -r;
    if (r.imag() == 0.0 && side_hint < 0.0) r = -r;
    return r;
}

cplx chordal_exact(double t, cplx z) {
    return upper_sqrt(z * z + 4.0 * t, z.real());
}

namespace {

// Dormand-Prince 5(4) pair.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = B1 - 5179.0 / 57600, E3 = B3 - 7571.0 / 16695,
                 E4 = B4 - 393.0 / 640, E5 = B5 + 92097.0 / 339200,
                 E6 = B6 - 187.0 / 2100, E7 = -1.0 / 40;

}  // namespace

FlowResult flow_point(const WittField& v, double t, cplx z, Chart chart,
                      double rel_tol) {
    if (t == 0.0) return {z, true, 0.0};
    if (v.sigma_candidate()) {
        // complete field: exact Moebius flow, evaluated through the
        // half-plane hub when another chart is requested
        MoebiusMap M = mobius_of_complete(v, t);
        if (chart == Chart::HalfPlane) return {M.apply(z), true, t};
        cplx w = to_halfplane(chart, z).f;
        CPoint back = from_halfplane(chart, M.apply(w));
        if (back.at_infinity) return {z, false, 0.0};
        return {back.value, true, t};
    }

    auto f = [&](cplx y) { return field_in_chart(v, chart, y); };
    double dir = t > 0 ? 1.0 : -1.0;
    double T = std::abs(t);
    double s = 0.0;
    double h = T / 16.0;
    const double h_floor = 1e-14 * T;
    cplx y = z;
    cplx k1 = f(y);
    int rejects_in_row = 0;
    while (s < T) {
        if (h < h_floor) return {y, false, dir * s};
        if (s + h > T) h = T - s;
        double hd = dir * h;
        cplx k2 = f(y + hd * (A21 * k1));
        cplx k3 = f(y + hd * (A31 * k1 + A32 * k2));
        cplx k4 = f(y + hd * (A41 * k1 + A42 * k2 + A43 * k3));
        cplx k5 = f(y + hd * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        cplx k6 = f(y + hd * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        cplx ynew = y + hd * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        cplx k7 = f(ynew);
        cplx errv = hd * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        double scale = rel_tol * std::max(1.0, std::max(std::abs(y), std::abs(ynew)));
        double err = std::abs(errv) / scale;
        if (!std::isfinite(err) || !std::isfinite(ynew.real()) ||
            !std::isfinite(ynew.imag())) {
            h *= 0.25;
            if (++rejects_in_row > 60) return {y, false, dir * s};
            continue;
        }
        if (err <= 1.0) {
            s += h;
            y = ynew;
            k1 = k7;  // FSAL
            rejects_in_row = 0;
        } else if (++rejects_in_row > 60) {
            return {y, false, dir * s};
        }
        double fac = 0.9 * std::pow(err > 1e-30 ? err : 1e-30, -0.2);
        h *= std::min(5.0, std::max(0.2, fac));
    }
    return {y, true, t};
}

}  // namespace lowner
