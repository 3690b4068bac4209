#include "lowner/gff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>

namespace lowner {

namespace {

double log_abs(cplx z) { return std::log(std::abs(z)); }

cplx hub_transform(Chart from, Chart to, cplx z) {
    CPoint p = transition(from, to, z);
    if (p.at_infinity) throw FieldError("kernel point mapped to infinity");
    return p.value;
}

// jet of the transition map from chart `from` into chart `to`
CJet chart_to_chart_jet(Chart from, Chart to, cplx z) {
    CJet w = to_halfplane(from, z);
    if (to == Chart::HalfPlane) return w;
    cplx i(0.0, 1.0);
    switch (to) {
        case Chart::Disk: {
            // (i - w)/(i + w)
            return (i - w) / (i + w);
        }
        case Chart::Strip:
            return log((1.0 + w) * inv(CJet(1.0 - w.f, -w.d, -w.dd)));
        case Chart::Log:
            return -i * log((1.0 + i * w) * inv(CJet(1.0 - i * w.f, -i * w.d, -i * w.dd)));
        default:
            return w;
    }
}

}  // namespace

Kernel Kernel::dirichlet() { return Kernel(KernelTag::GammaD); }
Kernel Kernel::neumann() { return Kernel(KernelTag::GammaN); }
Kernel Kernel::dirichlet_neumann() { return Kernel(KernelTag::GammaDN); }
Kernel Kernel::twisted() { return Kernel(KernelTag::GammaTw); }

Chart Kernel::home() const {
    switch (tag_) {
        case KernelTag::GammaD: return Chart::HalfPlane;
        case KernelTag::GammaN: return Chart::HalfPlane;
        case KernelTag::GammaDN: return Chart::Strip;
        case KernelTag::GammaTw: return Chart::Log;
    }
    return Chart::HalfPlane;
}

namespace {

struct KernelForm {
    // Gamma = -log|A(z,w)| + sB log|B(z,conj(w))|
    bool valid = false;
    double sB = 1.0;
    CJet (*A)(CJet, cplx) = nullptr;
    CJet (*B)(CJet, cplx) = nullptr;
};

CJet form_lin(CJet z, cplx w) { return z - w; }
CJet form_sin(CJet z, cplx w) { return sin(0.5 * (z - w)); }
CJet form_sinh(CJet z, cplx w) { return sinh(0.5 * (z - w)); }
CJet form_tanh4(CJet z, cplx w) { return tanh(0.25 * (z - w)); }
CJet form_tan4(CJet z, cplx w) { return tan(0.25 * (z - w)); }

KernelForm native_form(KernelTag tag, Chart chart) {
    KernelForm f;
    switch (tag) {
        case KernelTag::GammaD:
        case KernelTag::GammaN: {
            double s = (tag == KernelTag::GammaD) ? 1.0 : -1.0;
            if (chart == Chart::HalfPlane) f = {true, s, form_lin, form_lin};
            if (chart == Chart::Strip) f = {true, s, form_sinh, form_sinh};
            if (chart == Chart::Log) f = {true, s, form_sin, form_sin};
            break;
        }
        case KernelTag::GammaDN:
            if (chart == Chart::Strip) f = {true, 1.0, form_tanh4, form_tanh4};
            break;
        case KernelTag::GammaTw:
            if (chart == Chart::Log) f = {true, 1.0, form_tan4, form_tan4};
            break;
    }
    return f;
}

}  // namespace

double Kernel::eval(Chart chart, cplx z, cplx w) const {
    KernelForm f = native_form(tag_, chart);
    if (f.valid) {
        double g = -log_abs(f.A(CJet::var(z), w).f) +
                   f.sB * log_abs(f.B(CJet::var(z), std::conj(w)).f);
        return g;
    }
    // extra independent closed forms kept for the covariance checks
    if (tag_ == KernelTag::GammaD && chart == Chart::Disk)
        return -log_abs(z - w) + log_abs(1.0 - z * std::conj(w));
    if (tag_ == KernelTag::GammaN && chart == Chart::Disk)
        return -log_abs(z - w) - log_abs(1.0 - z * std::conj(w));
    if (tag_ == KernelTag::GammaDN && chart == Chart::HalfPlane) {
        cplx zb = std::conj(z), wb = std::conj(w);
        auto rt = [](cplx u) { return std::sqrt(1.0 - u * u); };
        return -log_abs(z - w) + log_abs(z - wb) -
               log_abs(1.0 - zb * w + rt(zb) * rt(w)) +
               log_abs(1.0 - z * w + rt(z) * rt(w));
    }
    if (tag_ == KernelTag::GammaTw && chart == Chart::Disk) {
        cplx sz = std::sqrt(z), sw = std::sqrt(w), swb = std::conj(sw);
        return -log_abs(sz - sw) + log_abs(sz + sw) + log_abs(1.0 - sz * swb) -
               log_abs(1.0 + sz * swb);
    }
    // fall back to the scalar pullback through the home chart
    Chart h = home();
    return eval(h, hub_transform(chart, h, z), hub_transform(chart, h, w));
}

void Kernel::wirtinger(Chart chart, cplx z, cplx w, double& value, cplx& dz,
                       cplx& dw) const {
    KernelForm f = native_form(tag_, chart);
    if (!f.valid) throw FieldError("kernel derivatives need a native chart form");
    CJet A = f.A(CJet::var(z), w);
    CJet B = f.B(CJet::var(z), std::conj(w));
    value = -log_abs(A.f) + f.sB * log_abs(B.f);
    dz = -0.5 * A.d / A.f + f.sB * 0.5 * B.d / B.f;
    // symmetry Gamma(z,w) = Gamma(w,z): d/dw equals d/dz at swapped slots
    CJet Aw = f.A(CJet::var(w), z);
    CJet Bw = f.B(CJet::var(w), std::conj(z));
    dw = -0.5 * Aw.d / Aw.f + f.sB * 0.5 * Bw.d / Bw.f;
}

double CouplingCase::chi() const {
    double s = std::sqrt(kappa);
    return 2.0 / s - s / 2.0;
}

double CouplingCase::q() const {
    double s = std::sqrt(kappa);
    return 2.0 / s + s / 2.0;
}

namespace {

struct EtaAcc {
    EtaJet jet;
    // eta += Re(coef * h(z)) for holomorphic h
    void add(cplx coef, const CJet& h) {
        jet.value += (coef * h.f).real();
        jet.d1 += 0.5 * coef * h.d;
        jet.d2 += 0.5 * coef * h.dd;
    }
};

}  // namespace

EtaJet CouplingCase::eta_jet_prim(cplx z) const {
    double s = std::sqrt(kappa);
    cplx i(0.0, 1.0);
    bool fwd = direction == FlowDirection::Forward;
    CJet zj = CJet::var(z);
    EtaAcc acc;
    auto arg_term = [&](double coef, const CJet& f) {
        // coef * arg f == Re(-i coef log f)
        acc.add(-i * coef, log(f));
    };
    auto logabs_term = [&](double coef, const CJet& f) { acc.add(cplx(coef), log(f)); };
    auto im_term = [&](double coef, const CJet& f) { acc.add(-i * coef, f); };
    auto re_term = [&](double coef, const CJet& f) { acc.add(cplx(coef), f); };

    if (name == "chordal" || name == "chordal-tc") {
        double nu_eff = (name == "chordal") ? nu : 0.0;
        if (fwd) {
            arg_term(-2.0 / s, zj);
            im_term(-nu_eff / s, zj);
        } else {
            logabs_term(2.0 / s, zj);
            re_term(-nu_eff / s, zj);
        }
    } else if (name == "dipolar" || name == "dn") {
        double nu_eff = nu;
        CJet one_m_z2 = 1.0 - zj * zj;
        CJet arcth = 0.5 * log((1.0 + zj) / (1.0 - zj));
        if (name == "dn") {
            // kappa = 4 combined-boundary case, strip chart:
            // eta = -arg cth(z/4)
            arg_term(-1.0, inv(tanh(0.25 * zj)));
            return acc.jet;
        }
        if (fwd) {
            arg_term(-2.0 / s, zj);
            arg_term(-(kappa - 6.0) / (2.0 * s), one_m_z2);
            im_term(-nu_eff / s, arcth);
        } else {
            logabs_term(2.0 / s, zj);
            logabs_term(-(kappa + 6.0) / (2.0 * s), one_m_z2);
            re_term(-nu_eff / s, arcth);
        }
    } else if (name == "radial" || name == "twisted") {
        if (name == "twisted") {
            // kappa = 4 double-cover case, logarithmic chart; the source
            // jump is 2 pi / sqrt(kappa) = pi, which fixes the coefficient
            // of arg ctg(z/4) at one (the hyperbolic-to-trigonometric
            // analogue of the combined-boundary case)
            arg_term(-1.0, inv(tan(0.25 * zj)));
            return acc.jet;
        }
        // logarithmic chart forms
        CJet sn = sin(0.5 * zj);
        if (fwd) {
            arg_term(-2.0 / s, sn);
            im_term(-nu / (2.0 * s), zj);
        } else {
            logabs_term(2.0 / s, sn);
            re_term(-nu / (2.0 * s), zj);
        }
    } else if (name == "fixed-pt-r" || name == "fixed-pt-l") {
        CJet lin = (name == "fixed-pt-r") ? (1.0 - zj) : (1.0 + zj);
        if (fwd) {
            arg_term(-2.0 / s, zj);
            arg_term(-(kappa - 6.0) / s, lin);
        } else {
            logabs_term(2.0 / s, zj);
            logabs_term(-(kappa + 6.0) / s, lin);
        }
    } else {
        throw FieldError("unknown coupling case '" + name + "'");
    }
    return acc.jet;
}

const std::vector<std::string>& coupling_case_names() {
    static const std::vector<std::string> names = {
        "chordal", "dipolar", "radial", "chordal-tc",
        "fixed-pt-r", "fixed-pt-l", "dn", "twisted"};
    return names;
}

CouplingCase make_coupling_case(const std::string& name, FlowDirection dir,
                                double kappa, double nu) {
    if (kappa <= 0.0) throw FieldError("coupling case needs kappa > 0");
    CouplingCase c;
    c.name = name;
    c.direction = dir;
    c.kappa = kappa;
    c.nu = nu;
    double s = std::sqrt(kappa);
    bool fwd = dir == FlowDirection::Forward;
    double sign = fwd ? 1.0 : -1.0;
    c.order = fwd ? PpsOrder::chi_type(c.chi()) : PpsOrder::q_type(c.q());
    c.kernel = fwd ? Kernel::dirichlet() : Kernel::neumann();
    c.prim = Chart::HalfPlane;

    WittField l_2 = WittField::mode(-2), l_1 = WittField::mode(-1),
              l0 = WittField::mode(0), l1 = WittField::mode(1);
    if (name == "chordal") {
        c.delta = sign * 2.0 * l_2 - nu * l_1;
        c.sigma = -s * l_1;
    } else if (name == "chordal-tc") {
        double xi = nu;
        c.delta = sign * 2.0 * l_2 + 2.0 * xi * l0;
        c.sigma = -s * l_1;
    } else if (name == "dipolar") {
        c.delta = sign * 2.0 * (l_2 - l0) - nu * (l_1 - l1);
        c.sigma = -s * (l_1 - l1);
    } else if (name == "radial") {
        c.delta = sign * 2.0 * (l_2 + l0) - nu * (l_1 + l1);
        c.sigma = -s * (l_1 + l1);
        c.prim = Chart::Log;
    } else if (name == "fixed-pt-r") {
        c.delta = sign * 2.0 * l_2 + (kappa - sign * 6.0) * l_1 +
                  2.0 * (sign * 3.0 - kappa + sign * nu) * l0 +
                  (-sign * 2.0 + kappa - sign * 2.0 * nu) * l1;
        c.sigma = -s * (l_1 - l1);
    } else if (name == "fixed-pt-l") {
        c.delta = sign * 2.0 * l_2 - (kappa - sign * 6.0) * l_1 +
                  2.0 * (sign * 3.0 - kappa + sign * nu) * l0 -
                  (-sign * 2.0 + kappa - sign * 2.0 * nu) * l1;
        c.sigma = -s * (l_1 - l1);
    } else if (name == "dn") {
        if (!fwd) throw FieldError("dn coupling is a forward case");
        c.delta = 2.0 * (l_2 - l0) - nu * (l_1 - l1);
        c.sigma = -s * (l_1 - l1);
        c.kernel = Kernel::dirichlet_neumann();
        c.prim = Chart::Strip;
    } else if (name == "twisted") {
        if (!fwd) throw FieldError("twisted coupling is a forward case");
        c.delta = 2.0 * (l_2 + l0) - nu * (l_1 + l1);
        c.sigma = -s * (l_1 + l1);
        c.kernel = Kernel::twisted();
        c.prim = Chart::Log;
    } else {
        throw FieldError("unknown coupling case '" + name + "'");
    }
    return c;
}

EtaValue eta_eval(const CouplingCase& c, Chart chart, cplx z) {
    if (chart == c.prim) return {c.eta_jet_prim(z).value, 0.0};
    CJet tau = chart_to_chart_jet(chart, c.prim, z);
    double v = c.eta_jet_prim(tau.f).value;
    return {pps_push(v, c.order, tau.d), 0.0};
}

namespace {

// finite-difference jet of eta with one Richardson pass
EtaJet eta_fd_jet(const CouplingCase& c, cplx z) {
    auto val = [&](cplx p) { return c.eta_jet_prim(p).value; };
    double h = 1e-4 * (1.0 + std::abs(z));
    auto jet_at = [&](double hh) {
        EtaJet j;
        cplx dx(hh, 0.0), dy(0.0, hh);
        double fpx = val(z + dx), fmx = val(z - dx);
        double fpy = val(z + dy), fmy = val(z - dy);
        double f0 = val(z);
        double ex = (fpx - fmx) / (2.0 * hh), ey = (fpy - fmy) / (2.0 * hh);
        double exx = (fpx - 2.0 * f0 + fmx) / (hh * hh);
        double eyy = (fpy - 2.0 * f0 + fmy) / (hh * hh);
        double exy = (val(z + dx + dy) + val(z - dx - dy) - val(z + dx - dy) -
                      val(z - dx + dy)) /
                     (4.0 * hh * hh);
        j.value = f0;
        j.d1 = 0.5 * cplx(ex, -ey);
        j.d2 = 0.25 * cplx(exx - eyy, -2.0 * exy);
        return j;
    };
    EtaJet a = jet_at(h), b = jet_at(0.5 * h);
    EtaJet out;
    out.value = a.value;
    out.d1 = (4.0 * b.d1 - a.d1) / 3.0;
    out.d2 = (4.0 * b.d2 - a.d2) / 3.0;
    return out;
}

double mixed_dzdzbar_fd(const CouplingCase& c, cplx z) {
    auto val = [&](cplx p) { return c.eta_jet_prim(p).value; };
    double h = 1e-4 * (1.0 + std::abs(z));
    cplx dx(h, 0.0), dy(0.0, h);
    double lap = (val(z + dx) + val(z - dx) + val(z + dy) + val(z - dy) -
                  4.0 * val(z)) /
                 (h * h);
    return 0.25 * lap;
}

struct KernelDeriv {
    double value;
    cplx dz, dw;
};

KernelDeriv kernel_deriv(const Kernel& k, Chart chart, cplx z, cplx w,
                         DerivRoute route) {
    KernelDeriv out{};
    if (route == DerivRoute::ClosedForm) {
        k.wirtinger(chart, z, w, out.value, out.dz, out.dw);
        return out;
    }
    auto val = [&](cplx a, cplx b) { return k.eval(chart, a, b); };
    double h = 1e-5 * (1.0 + std::abs(z) + std::abs(w));
    auto wirt = [&](double hh) {
        cplx dx(hh, 0.0), dy(0.0, hh);
        cplx dz_ = 0.5 * cplx((val(z + dx, w) - val(z - dx, w)) / (2.0 * hh),
                              -(val(z + dy, w) - val(z - dy, w)) / (2.0 * hh));
        cplx dw_ = 0.5 * cplx((val(z, w + dx) - val(z, w - dx)) / (2.0 * hh),
                              -(val(z, w + dy) - val(z, w - dy)) / (2.0 * hh));
        return std::pair<cplx, cplx>(dz_, dw_);
    };
    auto [a1, b1] = wirt(h);
    auto [a2, b2] = wirt(0.5 * h);
    out.value = val(z, w);
    out.dz = (4.0 * a2 - a1) / 3.0;
    out.dw = (4.0 * b2 - b1) / 3.0;
    return out;
}

}  // namespace

double lie_deriv_eta(const WittField& v, const CouplingCase& c, cplx z,
                     DerivRoute route) {
    EtaJet j = (route == DerivRoute::ClosedForm) ? c.eta_jet_prim(z)
                                                 : eta_fd_jet(c, z);
    cplx vf = field_in_chart(v, c.prim, z);
    cplx vd = field_deriv_in_chart(v, c.prim, z);
    // eta is real, so the anti-holomorphic half is the conjugate term
    return 2.0 * (vf * j.d1).real() + 2.0 * (c.order.mu * vd).real();
}

double lie_deriv_kernel(const WittField& v, const Kernel& k, Chart chart,
                        cplx z, cplx w, DerivRoute route) {
    KernelDeriv g = kernel_deriv(k, chart, z, w, route);
    cplx vz = field_in_chart(v, chart, z);
    cplx vw = field_in_chart(v, chart, w);
    return 2.0 * (vz * g.dz).real() + 2.0 * (vw * g.dw).real();
}

double lie_deriv_scalar_fd(const WittField& v, Chart chart,
                           const std::function<double(cplx)>& f, cplx z) {
    double h = 1e-5 * (1.0 + std::abs(z));
    cplx dx(h, 0.0), dy(0.0, h);
    cplx dzf = 0.5 * cplx((f(z + dx) - f(z - dx)) / (2.0 * h),
                          -(f(z + dy) - f(z - dy)) / (2.0 * h));
    cplx vf = field_in_chart(v, chart, z);
    return 2.0 * (vf * dzf).real();
}

namespace {

// r1 residual at one point: L_delta eta + 1/2 L_sigma^2 eta
double r1_at(const CouplingCase& c, cplx z, DerivRoute route) {
    cplx mu = c.order.mu;
    CJet dj = field_chart_jet(c.delta, c.prim, z);
    CJet sj = field_chart_jet(c.sigma, c.prim, z);
    EtaJet e = (route == DerivRoute::ClosedForm) ? c.eta_jet_prim(z)
                                                 : eta_fd_jet(c, z);
    cplx hol = dj.f * e.d1 + mu * dj.d + 0.5 * sj.f * sj.d * e.d1 +
               0.5 * sj.f * sj.f * e.d2 + 0.5 * mu * sj.f * sj.dd;
    double r = 2.0 * hol.real();
    if (route == DerivRoute::FiniteDifference)
        r += std::norm(sj.f) * mixed_dzdzbar_fd(c, z);  // |sigma|^2 dzdzbar eta
    return r;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// subtract the best additive constant
double residual_mod_constant(std::vector<double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    for (double& x : v) x -= mean;
    return max_abs(v);
}

// subtract the best separable correction beta_i + beta_j over off-diagonal
// samples of a symmetric matrix
double residual_mod_separable(const std::vector<std::vector<double>>& R) {
    size_t n = R.size();
    std::vector<double> row(n, 0.0);
    double total = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (i != j) {
                row[i] += R[i][j];
                total += R[i][j];
            }
    // minimize sum_{i != j} (R_ij - b_i - b_j)^2:
    // row_i = (n-2) b_i + S,  S = total / (2n - 2)
    double S = total / (2.0 * double(n) - 2.0);
    std::vector<double> b(n);
    for (size_t i = 0; i < n; ++i)
        b[i] = (n > 2) ? (row[i] - S) / (double(n) - 2.0) : 0.0;
    double m = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (i != j) m = std::max(m, std::abs(R[i][j] - b[i] - b[j]));
    return m;
}

}  // namespace

Residuals coupling_residuals(const CouplingCase& c, const std::vector<cplx>& points,
                             DerivRoute route) {
    if (points.size() < 2) throw FieldError("need at least two points");
    const size_t n = points.size();
    bool freedom = c.kernel.additive_freedom();

    std::vector<double> r1s;
    std::vector<double> j(n);
    for (size_t i = 0; i < n; ++i) {
        r1s.push_back(r1_at(c, points[i], route));
        j[i] = lie_deriv_eta(c.sigma, c, points[i], route);
    }

    std::vector<std::vector<double>> r2(n, std::vector<double>(n, 0.0)), r3 = r2;
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            KernelDeriv g = kernel_deriv(c.kernel, c.prim, points[a], points[b], route);
            cplx dz_ = field_in_chart(c.delta, c.prim, points[a]);
            cplx dw_ = field_in_chart(c.delta, c.prim, points[b]);
            cplx sz_ = field_in_chart(c.sigma, c.prim, points[a]);
            cplx sw_ = field_in_chart(c.sigma, c.prim, points[b]);
            double ld = 2.0 * (dz_ * g.dz).real() + 2.0 * (dw_ * g.dw).real();
            double ls = 2.0 * (sz_ * g.dz).real() + 2.0 * (sw_ * g.dw).real();
            r2[a][b] = ld + j[a] * j[b];
            r3[a][b] = ls;
        }

    Residuals out{};
    if (freedom) {
        out.r1 = residual_mod_constant(r1s);
        out.r2 = residual_mod_separable(r2);
        out.r3 = residual_mod_separable(r3);
    } else {
        out.r1 = max_abs(r1s);
        double m2 = 0.0, m3 = 0.0;
        for (size_t a = 0; a < n; ++a)
            for (size_t b = 0; b < n; ++b) {
                m2 = std::max(m2, std::abs(r2[a][b]));
                m3 = std::max(m3, std::abs(r3[a][b]));
            }
        out.r2 = m2;
        out.r3 = m3;
    }
    return out;
}

namespace {

void partition_sum(const std::vector<double>& eta, const std::vector<std::vector<double>>& gam,
                   const std::vector<int>& left, double acc, double& total) {
    if (left.empty()) {
        total += acc;
        return;
    }
    int first = left[0];
    std::vector<int> rest(left.begin() + 1, left.end());
    // first as a singleton
    partition_sum(eta, gam, rest, acc * eta[first], total);
    // first paired with each remaining index
    for (size_t k = 0; k < rest.size(); ++k) {
        std::vector<int> rem;
        for (size_t m = 0; m < rest.size(); ++m)
            if (m != k) rem.push_back(rest[m]);
        partition_sum(eta, gam, rem, acc * gam[first][rest[k]], total);
    }
}

}  // namespace

double schwinger(int n, const CouplingCase& c, const std::vector<cplx>& pts) {
    if (n < 1 || n > 4) throw FieldError("schwinger: n in 1..4");
    if (int(pts.size()) != n) throw FieldError("schwinger: need n points");
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (pts[a] == pts[b]) throw FieldError("schwinger: coincident points");
    std::vector<double> eta(n);
    std::vector<std::vector<double>> gam(n, std::vector<double>(n, 0.0));
    for (int a = 0; a < n; ++a) {
        eta[a] = c.eta_jet_prim(pts[a]).value;
        for (int b = 0; b < n; ++b)
            if (a != b) gam[a][b] = c.kernel.eval(c.prim, pts[a], pts[b]);
    }
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    double total = 0.0;
    partition_sum(eta, gam, idx, 1.0, total);
    return total;
}

double m1_eval(const CouplingCase& c, const LoewnerChain& chain, cplx z,
               double chi_shift) {
    EvalResult g = chain.evaluate(z);
    // stopped paths use the value and derivative at the stopping step
    cplx gz = g.value;
    double eta = eta_eval(c, Chart::HalfPlane, gz).value;
    PpsOrder ord = c.order;
    if (chi_shift != 0.0) {
        if (c.direction == FlowDirection::Forward)
            ord = PpsOrder::chi_type(c.chi() + chi_shift);
        else
            ord = PpsOrder::q_type(c.q() + chi_shift);
    }
    return pps_push(eta, ord, g.derivative);
}

McResult mc_martingale(const CouplingCase& c, cplx z, double t, int n_paths,
                       const SimConfig& cfg, double chi_shift, int n_threads) {
    if (n_threads <= 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, n_paths);
    struct Block {
        double mean = 0.0, m2 = 0.0;
        long n = 0;
        int stopped = 0;
        void push(double x) {
            ++n;
            double d = x - mean;
            mean += d / double(n);
            m2 += d * (x - mean);
        }
    };
    std::vector<Block> blocks(n_threads);
    std::vector<std::string> worker_errors(n_threads);
    auto worker = [&](int b, int lo, int hi) {
        try {
            for (int p = lo; p < hi; ++p) {
                SimConfig pc = cfg;
                pc.T = t;
                pc.seed = mix_seed(cfg.seed, std::uint64_t(p) + 1);
                DriverPath driver = DriverPath::brownian(1.0, 0.0, pc.seed);
                AdaptiveSampler s(c.delta, c.sigma, std::move(driver), pc);
                s.run(t);
                EvalResult g = s.chain().evaluate(z);
                if (!g.ok()) ++blocks[b].stopped;
                double m1 = m1_eval(c, s.chain(), z, chi_shift);
                blocks[b].push(m1);
            }
        } catch (const std::exception& e) {
            worker_errors[b] = e.what();
        }
    };
    std::vector<std::thread> pool;
    int per = (n_paths + n_threads - 1) / n_threads;
    for (int b = 0; b < n_threads; ++b) {
        int lo = b * per, hi = std::min(n_paths, (b + 1) * per);
        if (lo >= hi) break;
        pool.emplace_back(worker, b, lo, hi);
    }
    for (auto& th : pool) th.join();
    for (auto& err : worker_errors)
        if (!err.empty()) throw FieldError("martingale worker failed: " + err);
    // merge blocks in fixed order so the result is thread-count independent
    McResult out;
    double mean = 0.0, m2 = 0.0;
    long n = 0;
    for (auto& b : blocks) {
        if (b.n == 0) continue;
        double d = b.mean - mean;
        long nn = n + b.n;
        m2 += b.m2 + d * d * double(n) * double(b.n) / double(nn);
        mean += d * double(b.n) / double(nn);
        n = nn;
        out.stopped += b.stopped;
    }
    out.mean = mean;
    out.total = int(n);
    out.std_error = (n > 1) ? std::sqrt(m2 / double(n - 1) / double(n)) : 0.0;
    out.flagged = out.stopped > n_paths / 5;
    return out;
}

std::vector<std::vector<double>> gff_grid_sample(int n_modes, std::uint64_t seed,
                                                 int grid_n) {
    if (n_modes < 1) throw FieldError("gff_grid_sample: n_modes >= 1");
    // first n_modes basis labels ordered by i^2+j^2
    int K = int(std::ceil(2.2 * std::sqrt(double(n_modes)))) + 2;
    std::vector<std::array<int, 2>> modes;
    for (int i = 1; i <= K; ++i)
        for (int j = 1; j <= K; ++j) modes.push_back({i, j});
    std::sort(modes.begin(), modes.end(), [](auto& a, auto& b) {
        int ra = a[0] * a[0] + a[1] * a[1], rb = b[0] * b[0] + b[1] * b[1];
        if (ra != rb) return ra < rb;
        return a < b;
    });
    modes.resize(n_modes);
    RngStream rng(mix_seed(seed, 0xf1e7d));
    std::vector<std::vector<double>> grid(grid_n, std::vector<double>(grid_n, 0.0));
    std::vector<double> sx(grid_n), sy(grid_n);
    for (auto& m : modes) {
        double xi = rng.normal();
        double norm = 1.0 / std::sqrt(double(m[0] * m[0] + m[1] * m[1]));
        for (int a = 0; a < grid_n; ++a) {
            double x = M_PI * a / double(grid_n - 1);
            sx[a] = std::sin(m[0] * x);
            sy[a] = std::sin(m[1] * x);
        }
        for (int a = 0; a < grid_n; ++a)
            for (int b = 0; b < grid_n; ++b)
                grid[a][b] += xi * norm * sx[a] * sy[b];
    }
    return grid;
}

double gff_mode_covariance(cplx p, cplx q, int n_modes) {
    int K = int(std::ceil(2.2 * std::sqrt(double(n_modes)))) + 2;
    std::vector<std::array<int, 2>> modes;
    for (int i = 1; i <= K; ++i)
        for (int j = 1; j <= K; ++j) modes.push_back({i, j});
    std::sort(modes.begin(), modes.end(), [](auto& a, auto& b) {
        int ra = a[0] * a[0] + a[1] * a[1], rb = b[0] * b[0] + b[1] * b[1];
        if (ra != rb) return ra < rb;
        return a < b;
    });
    modes.resize(n_modes);
    double total = 0.0;
    for (auto& m : modes) {
        double w = 1.0 / double(m[0] * m[0] + m[1] * m[1]);
        total += w * std::sin(m[0] * p.real()) * std::sin(m[1] * p.imag()) *
                 std::sin(m[0] * q.real()) * std::sin(m[1] * q.imag());
    }
    return total;
}

}  // namespace lowner
