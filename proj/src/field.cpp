#include "lowner/field.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace lowner {

namespace {
constexpr double kDropTol = 0.0;  // exact zero only; callers decide rounding
}

WittField::WittField(std::map<int, double> coeffs) : coeffs_(std::move(coeffs)) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (it->second == kDropTol)
            it = coeffs_.erase(it);
        else
            ++it;
    }
}

WittField WittField::mode(int n, double c) {
    WittField f;
    f.set(n, c);
    return f;
}

double WittField::coeff(int n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? 0.0 : it->second;
}

void WittField::set(int n, double c) {
    if (c == 0.0)
        coeffs_.erase(n);
    else
        coeffs_[n] = c;
}

int WittField::min_mode() const {
    if (coeffs_.empty()) throw FieldError("min_mode of zero field");
    return coeffs_.begin()->first;
}

int WittField::max_mode() const {
    if (coeffs_.empty()) throw FieldError("max_mode of zero field");
    return coeffs_.rbegin()->first;
}

bool WittField::sigma_candidate() const {
    for (auto& [n, c] : coeffs_)
        if (n < -1 || n > 1) return false;
    return true;
}

bool WittField::delta_candidate() const {
    if (coeff(-2) == 0.0) return false;
    for (auto& [n, c] : coeffs_)
        if (n < -2 || n > 1) return false;
    return true;
}

WittField& WittField::operator+=(const WittField& o) {
    for (auto& [n, c] : o.coeffs_) set(n, coeff(n) + c);
    return *this;
}

WittField& WittField::operator-=(const WittField& o) {
    for (auto& [n, c] : o.coeffs_) set(n, coeff(n) - c);
    return *this;
}

WittField& WittField::operator*=(double s) {
    if (s == 0.0) {
        coeffs_.clear();
        return *this;
    }
    for (auto& [n, c] : coeffs_) c *= s;
    return *this;
}

cplx WittField::eval_h(cplx z) const {
    cplx out = 0.0;
    for (auto& [n, c] : coeffs_) out += c * std::pow(z, n + 1);
    return out;
}

cplx WittField::deriv_h(cplx z) const {
    cplx out = 0.0;
    for (auto& [n, c] : coeffs_)
        if (n + 1 != 0) out += c * double(n + 1) * std::pow(z, n);
    return out;
}

double WittField::max_abs_coeff() const {
    double m = 0.0;
    for (auto& [n, c] : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

WittField WittField::parse(const std::string& text) {
    WittField f;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw FieldError("bad field token '" + item + "', expected n:coeff");
        int n = std::stoi(item.substr(0, colon));
        double c = std::stod(item.substr(colon + 1));
        f.set(n, f.coeff(n) + c);
    }
    return f;
}

std::string WittField::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto& [n, c] : coeffs_) {
        if (!first) out << ",";
        out << n << ":" << c;
        first = false;
    }
    return out.str();
}

WittField bracket(const WittField& v, const WittField& w) {
    WittField out;
    for (auto& [n, a] : v.coeffs())
        for (auto& [m, b] : w.coeffs())
            if (n != m) out.set(n + m, out.coeff(n + m) + a * b * double(m - n));
    return out;
}

const char* kind_name(FieldKind k) {
    switch (k) {
        case FieldKind::Parabolic: return "parabolic";
        case FieldKind::Hyperbolic: return "hyperbolic";
        case FieldKind::Elliptic: return "elliptic";
    }
    return "?";
}

namespace {
FieldClass classify(double disc, double scale) {
    double tol = kClassifyTol * std::max(1.0, scale);
    FieldKind k = FieldKind::Parabolic;
    if (disc > tol)
        k = FieldKind::Hyperbolic;
    else if (disc < -tol)
        k = FieldKind::Elliptic;
    return {k, disc};
}
}  // namespace

FieldClass delta2(const WittField& sigma) {
    if (!sigma.sigma_candidate())
        throw FieldError("delta2: support must be within modes {-1,0,1}");
    double s_1 = sigma.coeff(-1), s0 = sigma.coeff(0), s1 = sigma.coeff(1);
    double d = 0.25 * s0 * s0 - s1 * s_1;
    double scale = sigma.max_abs_coeff();
    return classify(d, scale * scale);
}

FieldClass delta3(const WittField& delta) {
    if (!delta.delta_candidate())
        throw FieldError("delta3: needs support in {-2..1} with nonzero l_-2 part");
    double d_2 = delta.coeff(-2), d_1 = delta.coeff(-1), d0 = delta.coeff(0),
           d1 = delta.coeff(1);
    double disc = 18.0 * d_1 * d0 * d1 - 4.0 * d0 * d0 * d0 +
                  (d_1 * d_1 * d0 * d0 - 4.0 * d_1 * d_1 * d_1 * d1) / d_2 -
                  27.0 * d_2 * d1 * d1;
    double scale = delta.max_abs_coeff();
    return classify(disc, scale * scale * scale);
}

SleParams kappa_nu(const WittField& delta, const WittField& sigma) {
    return normalize_pair(delta, sigma).params;
}

NormalizedPair normalize_pair(const WittField& delta, const WittField& sigma) {
    if (!delta.delta_candidate()) throw FieldError("kappa_nu: invalid delta");
    if (!sigma.sigma_candidate() || sigma.coeff(-1) == 0.0)
        throw FieldError("kappa_nu: sigma needs nonzero l_-1 part");
    double d_2 = delta.coeff(-2);
    double s_1 = sigma.coeff(-1);
    FlowDirection dir = d_2 > 0 ? FlowDirection::Forward : FlowDirection::Reverse;
    double kappa = 2.0 * s_1 * s_1 / std::abs(d_2);

    WittField sigma_norm = sigma * (-1.0 / s_1);          // sigma_-1 = -1
    WittField delta_star = delta * (2.0 / std::abs(d_2));  // delta_-2 = ±2
    // drift normalization 2 d_{-1}/d_{-2} = 3 s_0/s_{-1} fixes nu in
    // delta_star = delta_norm + nu * sigma_norm
    double target = 1.5 * delta_star.coeff(-2) * sigma_norm.coeff(0) /
                    sigma_norm.coeff(-1);
    double nu = (delta_star.coeff(-1) - target) / sigma_norm.coeff(-1);
    WittField delta_norm = delta_star - nu * sigma_norm;
    return {delta_norm, sigma_norm, {kappa, nu, dir}};
}

TransformedTriple apply_elementary(const ElementaryTransform& t,
                                   const WittField& delta,
                                   const WittField& sigma,
                                   const DriverTransform& meta) {
    WittField d = delta, s = sigma;
    DriverTransform m = meta;
    double c = t.c;
    auto apply_V = [&](double cc) {
        if (cc == 0.0) throw FieldError("V_c needs c != 0");
        s *= cc;
        m.a /= cc;
        m.d /= cc;
    };
    auto apply_T = [&](double cc) {
        if (cc <= 0.0) throw FieldError("T_c needs c > 0");
        d *= cc;
        m.b *= cc;
        m.d *= cc;
    };
    auto apply_S = [&](double cc) {
        WittField dn, sn;
        for (auto& [n, v] : d.coeffs()) dn.set(n, v * std::exp(n * cc));
        for (auto& [n, v] : s.coeffs()) sn.set(n, v * std::exp(n * cc));
        d = dn;
        s = sn;
    };
    switch (t.tag) {
        case TransformTag::V:
            apply_V(c);
            break;
        case TransformTag::T:
            apply_T(c);
            break;
        case TransformTag::D:
            d -= c * s;
            m.d += c;
            break;
        case TransformTag::R: {
            double d_2 = d.coeff(-2), d_1 = d.coeff(-1), d0 = d.coeff(0),
                   d1 = d.coeff(1);
            double s_1 = s.coeff(-1), s0 = s.coeff(0), s1 = s.coeff(1);
            WittField dn, sn;
            dn.set(-2, d_2);
            dn.set(-1, d_1 - 3.0 * c * d_2);
            dn.set(0, d0 - 2.0 * c * d_1 + 3.0 * c * c * d_2);
            dn.set(1, d1 - c * d0 + c * c * d_1 - c * c * c * d_2);
            sn.set(-1, s_1);
            sn.set(0, s0 - 2.0 * c * s_1);
            sn.set(1, s1 - c * s0 + c * c * s_1);
            d = dn;
            s = sn;
            break;
        }
        case TransformTag::S:
            apply_S(c);
            break;
        case TransformTag::P:
            // P_c = V_{e^c} o T_{e^{2c}} o S_c
            apply_S(c);
            apply_T(std::exp(2.0 * c));
            apply_V(std::exp(c));
            break;
    }
    return {d, s, m};
}

namespace {
// Solve a small dense linear system in place (partial pivoting).
bool solve_dense(std::vector<std::vector<double>>& A, std::vector<double>& b) {
    const size_t n = A.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-13) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (size_t cc = col; cc < n; ++cc) A[r][cc] -= f * A[col][cc];
            b[r] -= f * b[col];
        }
    }
    for (size_t i = 0; i < n; ++i) b[i] /= A[i][i];
    return true;
}
}  // namespace

CommutationInvariants commutation_invariants(const WittField& delta,
                                             const WittField& sigma) {
    if (delta.coeff(-2) == 0.0 || sigma.coeff(-1) == 0.0)
        throw FieldError("commutation_invariants: need delta_-2 and sigma_-1 nonzero");
    WittField ds = bracket(delta, sigma);
    WittField lhs = bracket(ds, delta);
    WittField dss = bracket(ds, sigma);
    WittField dsss = bracket(dss, sigma);
    // unknowns: x5, x4, x3, x2, x1, w0, w1; equations: modes -5..1
    const std::array<const WittField*, 5> basis = {&dsss, &dss, &ds, &delta, &sigma};
    std::vector<std::vector<double>> A(7, std::vector<double>(7, 0.0));
    std::vector<double> b(7, 0.0);
    for (int mode = -5; mode <= 1; ++mode) {
        int row = mode + 5;
        for (int j = 0; j < 5; ++j) A[row][j] = basis[j]->coeff(mode);
        if (mode == 0) A[row][5] = 1.0;
        if (mode == 1) A[row][6] = 1.0;
        b[row] = lhs.coeff(mode);
    }
    CommutationInvariants out{};
    auto Acopy = A;
    auto bcopy = b;
    if (!solve_dense(Acopy, bcopy)) {
        out.singular = true;
        return out;
    }
    out.x5 = bcopy[0];
    out.x4 = bcopy[1];
    out.x3 = bcopy[2];
    out.x2 = bcopy[3];
    out.x1 = bcopy[4];
    out.w.set(0, bcopy[5]);
    out.w.set(1, bcopy[6]);
    return out;
}

}  // namespace lowner
