#pragma once

#include "lowner/field.hpp"

namespace lowner {

// Real 2x2 unit-determinant matrix acting on the half-plane chart as
// z -> (az+b)/(cz+d).
struct MoebiusMap {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    cplx apply(cplx z) const { return (a * z + b) / (c * z + d); }
    cplx deriv(cplx z) const {
        cplx den = c * z + d;
        return 1.0 / (den * den);  // det = 1
    }
    MoebiusMap inverse() const { return {d, -b, -c, a}; }
    double det() const { return a * d - b * c; }
    void renormalize();

    static MoebiusMap identity() { return {}; }
    // determined by three boundary points p -> q (entries may be infinity,
    // passed as (num, 0) homogeneous pairs); result is H-preserving
    static MoebiusMap from_boundary_triple(double p0, double p1, double p2,
                                           double q0, double q1, double q2);
};

MoebiusMap operator*(const MoebiusMap& A, const MoebiusMap& B);  // composition A after B

// Exact flow H_s[sigma] of a complete field: exp(s M) with generator
// M = [[s0/2, s_{-1}], [-s1, -s0/2]].
MoebiusMap mobius_of_complete(const WittField& sigma, double s);

// Pushforward of a mode-(-2..1) field under a Moebius map fixing the origin
// (recovers exact coefficients from four point samples).
WittField pushforward(const MoebiusMap& M, const WittField& v);

}  // namespace lowner
