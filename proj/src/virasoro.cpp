#include "lowner/virasoro.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace lowner {

HighestWeight hc_from_kappa(double kappa, FlowDirection dir) {
    if (kappa <= 0.0) throw FieldError("hc_from_kappa: kappa > 0 required");
    double k = (dir == FlowDirection::Forward) ? kappa : -kappa;
    double h = -(k - 6.0) / (2.0 * k);
    double c = h * (3.0 * k - 8.0);
    return {h, c};
}

VermaVector VermaVector::vacuum(int level_cap) {
    VermaVector v(level_cap);
    v.add({}, 1.0);
    return v;
}

void VermaVector::add(const Monomial& m, double coeff) {
    if (coeff == 0.0) return;
    double& slot = terms_[m];
    slot += coeff;
    if (slot == 0.0) terms_.erase(m);
}

double VermaVector::coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

double VermaVector::max_abs() const {
    double out = 0.0;
    for (auto& [m, c] : terms_) out = std::max(out, std::abs(c));
    return out;
}

VermaVector& VermaVector::operator+=(const VermaVector& o) {
    for (auto& [m, c] : o.terms_) add(m, c);
    return *this;
}

VermaVector& VermaVector::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
}

std::string VermaVector::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto& [m, c] : terms_) {
        if (!first) out << " + ";
        out << c;
        for (int k : m) out << "*L[-" << k << "]";
        out << "|>";
        first = false;
    }
    return out.str();
}

namespace {

int level_of(const VermaVector::Monomial& m) {
    return std::accumulate(m.begin(), m.end(), 0);
}

// L_n acting on one monomial, recursive commutation toward the vacuum
void apply_mono(int n, const VermaVector::Monomial& mono, double coeff,
                const HighestWeight& hw, int cap, VermaVector& out) {
    if (coeff == 0.0) return;
    if (mono.empty()) {
        if (n >= 1) return;
        if (n == 0) {
            out.add({}, -hw.h * coeff);
            return;
        }
        if (-n > cap) throw FieldError("verma level overflow");
        out.add({-n}, coeff);
        return;
    }
    int k1 = mono.front();
    int m = -k1;
    VermaVector::Monomial rest(mono.begin() + 1, mono.end());
    // [L_n, L_m] rest = (m-n) L_{n+m} rest + central term
    apply_mono(n + m, rest, coeff * double(m - n), hw, cap, out);
    if (n + m == 0)
        out.add(rest, coeff * hw.c / 12.0 * double(n) * (double(n) * n - 1.0));
    // L_m (L_n rest)
    VermaVector inner(cap);
    apply_mono(n, rest, coeff, hw, cap, inner);
    for (auto& [mm, cc] : inner.terms()) {
        if (k1 >= (mm.empty() ? 1 : mm.front())) {
            // fast path: prepending keeps the canonical order
            if (level_of(mm) + k1 > cap) throw FieldError("verma level overflow");
            VermaVector::Monomial grown;
            grown.reserve(mm.size() + 1);
            grown.push_back(k1);
            grown.insert(grown.end(), mm.begin(), mm.end());
            out.add(grown, cc);
        } else {
            apply_mono(m, mm, cc, hw, cap, out);
        }
    }
}

}  // namespace

VermaVector apply_generator(int n, const VermaVector& v, const HighestWeight& hw) {
    VermaVector out(v.level_cap());
    for (auto& [m, c] : v.terms()) apply_mono(n, m, c, hw, v.level_cap(), out);
    return out;
}

namespace {

VermaVector apply_field(const WittField& f, const VermaVector& v,
                        const HighestWeight& hw) {
    VermaVector out(v.level_cap());
    for (auto& [n, c] : f.coeffs()) {
        VermaVector part = apply_generator(n, v, hw);
        part *= c;
        out += part;
    }
    return out;
}

}  // namespace

VermaVector ahat_vacuum(const WittField& delta, const WittField& sigma,
                        const HighestWeight& hw) {
    if (!sigma.sigma_candidate())
        throw FieldError("ahat_vacuum: sigma must be complete");
    VermaVector vac = VermaVector::vacuum();
    VermaVector out = apply_field(delta, vac, hw);
    VermaVector ss = apply_field(sigma, apply_field(sigma, vac, hw), hw);
    ss *= 0.5;
    out += ss;
    return out;
}

bool singular_check(double kappa, FlowDirection dir, double tol) {
    HighestWeight hw = hc_from_kappa(kappa, dir);
    double sign = (dir == FlowDirection::Forward) ? 1.0 : -1.0;
    VermaVector x(6);
    x.add({2}, 2.0);
    x.add({1, 1}, sign * 0.5 * kappa);
    double scale = std::max(1.0, kappa);
    for (int n = 1; n <= 2; ++n) {
        VermaVector img = apply_generator(n, x, hw);
        if (img.max_abs() > tol * scale) return false;
    }
    return true;
}

}  // namespace lowner
