#pragma once

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace lowner {

using cplx = std::complex<double>;

// Finite real combination of the basis modes l_n, with l_n(z) = z^{n+1}
// in the half-plane chart.  Zero coefficients are never stored.
class WittField {
public:
    WittField() = default;
    explicit WittField(std::map<int, double> coeffs);
    static WittField mode(int n, double c = 1.0);

    double coeff(int n) const;
    void set(int n, double c);
    const std::map<int, double>& coeffs() const { return coeffs_; }

    bool is_zero() const { return coeffs_.empty(); }
    int min_mode() const;   // throws on zero field
    int max_mode() const;

    // support restrictions used throughout: sigma in span{l_-1,l_0,l_1},
    // delta in span{l_-2,...,l_1} with nonzero l_-2 part
    bool sigma_candidate() const;
    bool delta_candidate() const;

    WittField& operator+=(const WittField& o);
    WittField& operator-=(const WittField& o);
    WittField& operator*=(double s);
    friend WittField operator+(WittField a, const WittField& b) { return a += b; }
    friend WittField operator-(WittField a, const WittField& b) { return a -= b; }
    friend WittField operator*(double s, WittField a) { return a *= s; }
    friend WittField operator*(WittField a, double s) { return a *= s; }
    friend WittField operator-(WittField a) { return a *= -1.0; }

    // value and z-derivative of the half-plane representation
    cplx eval_h(cplx z) const;
    cplx deriv_h(cplx z) const;

    double max_abs_coeff() const;

    // "n:coeff,n:coeff" text form (CLI flag format)
    static WittField parse(const std::string& text);
    std::string to_string() const;

private:
    std::map<int, double> coeffs_;
};

// [l_n,l_m] = (m-n) l_{n+m}
WittField bracket(const WittField& v, const WittField& w);

enum class FieldKind { Parabolic, Hyperbolic, Elliptic };

struct FieldClass {
    FieldKind kind;
    double discriminant;
};

const char* kind_name(FieldKind k);

// Classification tolerance relative to coefficient magnitude.
inline constexpr double kClassifyTol = 1e-10;

// Complete fields: Delta2 = sigma_0^2/4 - sigma_1 sigma_{-1}.  Sign decides
// the number and position of zeros (0: one boundary double zero, >0: two
// boundary zeros, <0: an interior zero).
FieldClass delta2(const WittField& sigma);

// Semicomplete fields with a simple pole: the cubic discriminant divided by
// delta_{-2}.
FieldClass delta3(const WittField& delta);

enum class FlowDirection { Forward, Reverse };

struct SleParams {
    double kappa;
    double nu;
    FlowDirection direction;
};

// kappa = 2 sigma_{-1}^2 / |delta_{-2}|; nu is the coefficient of the
// normalized sigma in delta = delta_norm + nu*sigma_norm once delta_norm
// satisfies the drift normalization 2 d_{-1}/d_{-2} = 3 s_0/s_{-1}.
SleParams kappa_nu(const WittField& delta, const WittField& sigma);

// Normalized representative (delta_-2 = ±2, sigma_-1 = -1, drift-normalized
// delta part) together with kappa, nu.
struct NormalizedPair {
    WittField delta_norm;   // drift-normalized, delta_-2 = ±2
    WittField sigma_norm;   // sigma_-1 = -1
    SleParams params;
};
NormalizedPair normalize_pair(const WittField& delta, const WittField& sigma);

enum class TransformTag { V, T, D, R, S, P };

struct ElementaryTransform {
    TransformTag tag;
    double c;
};

// Symbolic record of what happened to the driving function:
// u_t -> a * u_{b t} + d * t.
struct DriverTransform {
    double a = 1.0;
    double b = 1.0;
    double d = 0.0;
};

struct TransformedTriple {
    WittField delta;
    WittField sigma;
    DriverTransform driver;
};

TransformedTriple apply_elementary(const ElementaryTransform& t,
                                   const WittField& delta,
                                   const WittField& sigma,
                                   const DriverTransform& meta = {});

// Coefficients of [[d,s],d] = x5 [[[d,s],s],s] + x4 [[d,s],s] + x3 [d,s]
//                             + x2 d + x1 s + w,
// with w supported on modes {0,1} (vanishing at the source).
struct CommutationInvariants {
    double x1, x2, x3, x4, x5;
    WittField w;
    bool singular = false;   // defining linear system was rank-deficient
};

CommutationInvariants commutation_invariants(const WittField& delta,
                                             const WittField& sigma);

struct FieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lowner
