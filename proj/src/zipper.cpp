#include "lowner/zipper.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace lowner {

namespace {

struct CubicRoots {
    // finite roots plus an explicit flag for a zero at infinity
    std::vector<cplx> finite;
    bool at_infinity = false;
    int inf_order = 0;
};

// roots of p(z) = c0 + c1 z + c2 z^2 + c3 z^3 (zeros of z v(z))
CubicRoots cubic_roots(double c0, double c1, double c2, double c3) {
    CubicRoots out;
    double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2), std::abs(c3)});
    auto tiny = [&](double x) { return std::abs(x) < 1e-14 * scale; };
    if (tiny(c3)) {
        out.at_infinity = true;
        if (tiny(c2)) {
            out.inf_order = tiny(c1) ? 3 : 2;
            if (!tiny(c1)) out.finite.push_back(cplx(-c0 / c1));
            return out;
        }
        out.inf_order = 1;
        double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc >= 0.0) {
            double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
            out.finite.push_back(cplx(q / c2));
            out.finite.push_back(cplx(c0 / q));
        } else {
            double re = -0.5 * c1 / c2, im = 0.5 * std::sqrt(-disc) / c2;
            out.finite.push_back(cplx(re, im));
            out.finite.push_back(cplx(re, -im));
        }
        return out;
    }
    // monic cubic x^3 + b x^2 + c x + d
    double b = c2 / c3, c = c1 / c3, d = c0 / c3;
    double p = c - b * b / 3.0;
    double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    double shift = -b / 3.0;
    double D = -4.0 * p * p * p - 27.0 * q * q;
    if (D >= 0.0 && p < 0.0) {
        double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            out.finite.push_back(
                cplx(shift + m * std::cos(theta - 2.0 * M_PI * k / 3.0)));
    } else {
        double disc = q * q / 4.0 + p * p * p / 27.0;  // >= 0 here
        double rt = std::sqrt(std::max(0.0, disc));
        double u = std::cbrt(-q / 2.0 + rt);
        double v = std::cbrt(-q / 2.0 - rt);
        double t0 = u + v;
        out.finite.push_back(cplx(shift + t0));
        double re = shift - t0 / 2.0, im = std::sqrt(3.0) / 2.0 * std::abs(u - v);
        out.finite.push_back(cplx(re, im));
        out.finite.push_back(cplx(re, -im));
    }
    return out;
}

// chart-independent derivative of v at a zero z0 (finite or infinity)
double zero_derivative(const WittField& v, const cplx* z0 /*null = infinity*/) {
    if (z0 == nullptr) return -v.coeff(0);
    cplx d = v.deriv_h(*z0);
    return d.real();
}

// polynomial refinement: one Newton step on p to tighten a root
cplx polish_root(double c0, double c1, double c2, double c3, cplx r) {
    for (int it = 0; it < 2; ++it) {
        cplx p = c0 + r * (c1 + r * (c2 + r * c3));
        cplx dp = c1 + r * (2.0 * c2 + 3.0 * r * c3);
        if (std::abs(dp) < 1e-300) break;
        r -= p / dp;
    }
    return r;
}

}  // namespace

cplx chart_position(Chart chart, cplx halfplane_point) {
    CPoint p = from_halfplane(chart, halfplane_point);
    if (p.at_infinity) return cplx(1e300, 0.0);
    return p.value;
}

cplx StepMap::apply(cplx z) const {
    if (dt == 0.0 && du == 0.0) return z;
    if (variant == StepVariant::LinearInterp) {
        FlowResult r = flow_point(ode_field, dt, z);
        return r.value;
    }
    cplx w = pre.apply(z);
    cplx s = upper_sqrt(fa + fb * w * w, w.real());
    return post.apply(s);
}

cplx StepMap::apply_inverse(cplx z) const {
    if (dt == 0.0 && du == 0.0) return z;
    if (variant == StepVariant::LinearInterp) {
        FlowResult r = flow_point(ode_field, -dt, z);
        return r.value;
    }
    cplx w = post.inverse().apply(z);
    cplx s = upper_sqrt((w * w - fa) / fb, w.real());
    return pre.inverse().apply(s);
}

cplx StepMap::derivative(cplx z) const {
    if (dt == 0.0 && du == 0.0) return 1.0;
    if (variant == StepVariant::LinearInterp) {
        // central difference fallback; the classified variants carry exact forms
        double h = 1e-6 * (1.0 + std::abs(z));
        cplx zp = apply(z + h), zm = apply(z - h);
        return (zp - zm) / (2.0 * h);
    }
    cplx w = pre.apply(z);
    cplx s = upper_sqrt(fa + fb * w * w, w.real());
    return post.deriv(s) * (fb * w / s) * pre.deriv(z);
}

bool StepMap::swallows(cplx z, double eps) const {
    if (dt == 0.0 && du == 0.0) return false;
    if (variant == StepVariant::LinearInterp) return std::abs(z) < eps;
    if (fa / fb <= 0.0) return std::abs(z) < eps;  // inverse-direction step
    cplx w = pre.apply(z);
    // slit of the forward map: the segment [0, i sqrt(fa/fb)] in the frame;
    // the tolerance is rescaled by the local frame stretch
    double h = std::sqrt(fa / fb);
    double y = std::clamp(w.imag(), 0.0, h);
    return std::hypot(w.real(), w.imag() - y) < eps * std::abs(pre.deriv(z));
}

StepMap StepMap::inverted() const {
    StepMap inv = *this;
    if (variant == StepVariant::LinearInterp) {
        inv.ode_field = -ode_field;
        inv.du = -du;
        return inv;
    }
    inv.pre = post.inverse();
    inv.post = pre.inverse();
    inv.fa = -fa / fb;
    inv.fb = 1.0 / fb;
    inv.du = -du;
    return inv;
}

namespace {

// Split the combined field v (pole at the origin) into a classical part
// whose flow has the sqrt closed form and a complete remainder.
StepMap classified_step(const WittField& v, double dt) {
    StepMap s;
    s.variant = StepVariant::ClassifiedExact;
    s.dt = dt;
    double v2 = v.coeff(-2), v1 = v.coeff(-1), v0 = v.coeff(0), vp1 = v.coeff(1);
    FieldClass cls = delta3(v);
    s.kind = cls.kind;

    MoebiusMap M;  // frame: source stays at 0
    switch (cls.kind) {
        case FieldKind::Parabolic: {
            // double (or triple) zero b -> infinity; b from p'(z) roots
            double b = 0.0;
            bool b_at_inf = false;
            double scale = v.max_abs_coeff();
            if (std::abs(vp1) < 1e-12 * scale && std::abs(v0) < 1e-12 * scale) {
                b_at_inf = true;
            } else {
                // p'(z) = v1 + 2 v0 z + 3 vp1 z^2
                double qa = 3.0 * vp1, qb = 2.0 * v0, qc = v1;
                double cand1, cand2;
                if (std::abs(qa) < 1e-13 * scale) {
                    cand1 = cand2 = -qc / qb;
                } else {
                    double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
                    double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
                    cand1 = q / qa;
                    cand2 = (q != 0.0) ? qc / q : cand1;
                }
                auto pval = [&](double x) {
                    return std::abs(v2 + x * (v1 + x * (v0 + x * vp1)));
                };
                b = pval(cand1) <= pval(cand2) ? cand1 : cand2;
            }
            if (!b_at_inf && std::abs(b) > 1e12) b_at_inf = true;
            if (b_at_inf) {
                M = MoebiusMap::identity();
            } else {
                M = MoebiusMap{b, 0.0, -1.0, b};  // 0 -> 0, b -> infinity
                M.renormalize();
            }
            break;
        }
        case FieldKind::Hyperbolic: {
            CubicRoots roots = cubic_roots(v2, v1, v0, vp1);
            // collect the three boundary zeros with their stability sign
            struct Z {
                bool inf;
                double x;
                double slope;
            };
            std::vector<Z> zs;
            for (auto& r : roots.finite) {
                cplx rr = polish_root(v2, v1, v0, vp1, r);
                zs.push_back({false, rr.real(), zero_derivative(v, &rr)});
            }
            if (roots.at_infinity) zs.push_back({true, 0.0, zero_derivative(v, nullptr)});
            // pin the two zeros that the slit tip does not run to
            double dir = v2 > 0 ? 1.0 : -1.0;
            std::sort(zs.begin(), zs.end(),
                      [&](const Z& a, const Z& b2) { return a.slope * dir < b2.slope * dir; });
            // zs[0], zs[1] pinned; zs[2] is the target zero
            double p1 = zs[0].inf ? INFINITY : zs[0].x;
            double p2 = zs[1].inf ? INFINITY : zs[1].x;
            M = MoebiusMap::from_boundary_triple(0.0, p1, p2, 0.0, 1.0, -1.0);
            break;
        }
        case FieldKind::Elliptic: {
            CubicRoots roots = cubic_roots(v2, v1, v0, vp1);
            cplx z0(0.0, 1.0);
            for (auto& r : roots.finite)
                if (r.imag() > 1e-14) z0 = polish_root(v2, v1, v0, vp1, r);
            double x0 = z0.real(), y0 = z0.imag();
            double mod = std::abs(z0);
            double a = std::sqrt(y0) / mod;
            M = MoebiusMap{a, 0.0, -a * x0 / y0, a * mod * mod / y0};
            M.renormalize();
            break;
        }
    }
    s.pre = M;

    WittField w = pushforward(M, v);
    double r = w.coeff(-2);
    WittField classical;
    switch (cls.kind) {
        case FieldKind::Parabolic:
            classical.set(-2, r);
            // flow: H^2 = z^2 + 2 r t
            s.fa = 2.0 * r * dt;
            s.fb = 1.0;
            break;
        case FieldKind::Hyperbolic:
            classical.set(-2, r);
            classical.set(0, -r);
            // 1 - H^2 = e^{-2rt}(1 - z^2)
            s.fa = 1.0 - std::exp(-2.0 * r * dt);
            s.fb = std::exp(-2.0 * r * dt);
            break;
        case FieldKind::Elliptic:
            classical.set(-2, r);
            classical.set(0, r);
            // 1 + H^2 = e^{2rt}(1 + z^2)
            s.fa = std::exp(2.0 * r * dt) - 1.0;
            s.fb = std::exp(2.0 * r * dt);
            break;
    }
    WittField remainder = w - classical;
    remainder.set(-2, 0.0);  // complete by construction; drop rounding dust
    MoebiusMap mob = mobius_of_complete(remainder, dt);
    s.post = M.inverse() * mob;
    return s;
}

}  // namespace

StepMap step_map(const WittField& delta, const WittField& sigma, double dt,
                 double du, StepVariant variant) {
    if (dt < 0.0) throw FieldError("step_map: dt must be positive");
    if (dt == 0.0) {
        StepMap id;
        id.variant = variant;
        return id;
    }
    switch (variant) {
        case StepVariant::ClassifiedExact: {
            WittField v = delta + (du / dt) * sigma;
            StepMap s = classified_step(v, dt);
            s.du = du;
            return s;
        }
        case StepVariant::PiecewiseConst: {
            // H_du[sigma] after the pure delta flow
            StepMap s = classified_step(delta, dt);
            s.variant = StepVariant::PiecewiseConst;
            s.du = du;
            s.post = mobius_of_complete(sigma, du) * s.post;
            return s;
        }
        case StepVariant::LinearInterp: {
            StepMap s;
            s.variant = StepVariant::LinearInterp;
            s.dt = dt;
            s.du = du;
            s.ode_field = delta + (du / dt) * sigma;
            return s;
        }
    }
    throw FieldError("step_map: unknown variant");
}

StepMap delta_flow_step(const WittField& delta, double s) {
    if (s == 0.0) return StepMap{};
    if (s > 0.0) return classified_step(delta, s);
    StepMap fwd = classified_step(delta, -s);
    return fwd.inverted();
}

void LoewnerChain::push_step(StepMap s) {
    times_.push_back(times_.back() + s.dt);
    steps_.push_back(std::move(s));
}

EvalResult LoewnerChain::evaluate(cplx z) const {
    EvalResult r{z, 1.0, -1};
    for (size_t i = 0; i < steps_.size(); ++i) {
        if (steps_[i].swallows(r.value, eps_swallow)) {
            r.swallowed_at = int(i);
            return r;
        }
        r.derivative *= steps_[i].derivative(r.value);
        r.value = steps_[i].apply(r.value);
    }
    return r;
}

EvalResult LoewnerChain::evaluate_inverse(cplx z) const {
    EvalResult r{z, 1.0, -1};
    for (size_t i = steps_.size(); i-- > 0;) {
        r.value = steps_[i].apply_inverse(r.value);
    }
    return r;
}

cplx LoewnerChain::joint_point(const StepMap* candidate) const {
    cplx x = 0.0;
    if (candidate) x = candidate->apply_inverse(x);
    for (size_t i = steps_.size(); i-- > 0;) x = steps_[i].apply_inverse(x);
    return x;
}

Trace trace_joints(const LoewnerChain& chain, bool include_b, int arc_samples) {
    if (chain.empty()) throw FieldError("trace_joints: empty chain");
    Trace tr;
    const auto& steps = chain.steps();
    const auto& times = chain.times();
    for (size_t n = 1; n <= steps.size(); ++n) {
        cplx x = 0.0;
        for (size_t k = n; k-- > 0;) x = steps[k].apply_inverse(x);
        tr.points.push_back({int(n), 'a', times[n], chart_position(chain.chart(), x)});
    }
    if (include_b) {
        for (size_t n = 0; n + 1 <= steps.size(); ++n) {
            // gamma_{n,b}: the next interval's pure-delta flow tip pulled back
            double dtn = steps[n].dt;
            StepMap tipflow = delta_flow_step(chain.delta(), -dtn);
            cplx x = tipflow.apply(0.0);
            std::vector<cplx> arc;
            if (arc_samples > 1) {
                for (int j = 1; j <= arc_samples; ++j) {
                    StepMap part = delta_flow_step(chain.delta(), -dtn * j / arc_samples);
                    arc.push_back(part.apply(0.0));
                }
            }
            for (size_t k = n; k-- > 0;) {
                x = steps[k].apply_inverse(x);
                for (auto& p : arc) p = steps[k].apply_inverse(p);
            }
            tr.points.push_back({int(n), 'b', times[n + 1], chart_position(chain.chart(), x)});
            if (!arc.empty()) {
                for (auto& p : arc) p = chart_position(chain.chart(), p);
                tr.arcs.push_back(std::move(arc));
            }
        }
    }
    return tr;
}

LoewnerChain reverse_chain(const LoewnerChain& chain) {
    LoewnerChain rc(-chain.delta(), chain.sigma(), chain.chart());
    rc.eps_swallow = chain.eps_swallow;
    const auto& steps = chain.steps();
    for (size_t i = steps.size(); i-- > 0;) rc.push_step(steps[i].inverted());
    return rc;
}

LoewnerChain reverse_chain_resimulated(const LoewnerChain& chain) {
    LoewnerChain rc(-chain.delta(), chain.sigma(), chain.chart());
    rc.eps_swallow = chain.eps_swallow;
    const auto& steps = chain.steps();
    for (size_t i = steps.size(); i-- > 0;) {
        rc.push_step(step_map(-chain.delta(), chain.sigma(), steps[i].dt,
                              -steps[i].du, steps[i].variant));
    }
    return rc;
}

}  // namespace lowner
