#include "lowner/mobius.hpp"

#include <array>
#include <cmath>

namespace lowner {

void MoebiusMap::renormalize() {
    double dt = det();
    if (dt <= 0.0) throw FieldError("MoebiusMap: nonpositive determinant");
    double s = 1.0 / std::sqrt(dt);
    a *= s;
    b *= s;
    c *= s;
    d *= s;
}

MoebiusMap operator*(const MoebiusMap& A, const MoebiusMap& B) {
    MoebiusMap M{A.a * B.a + A.b * B.c, A.a * B.b + A.b * B.d,
                 A.c * B.a + A.d * B.c, A.c * B.b + A.d * B.d};
    M.renormalize();
    return M;
}

MoebiusMap mobius_of_complete(const WittField& sigma, double s) {
    if (!sigma.sigma_candidate())
        throw FieldError("mobius_of_complete: field is not complete");
    double s_1 = sigma.coeff(-1), s0 = sigma.coeff(0), s1 = sigma.coeff(1);
    // generator
    double ga = 0.5 * s0, gb = s_1, gc = -s1, gd = -0.5 * s0;
    // exp(s X) for trace-free X with X^2 = q I
    double q = ga * ga + gb * gc;
    double ch, sh;  // cosh(sqrt(q) s), sinh(..)/sqrt(q)
    if (q > 1e-300) {
        double r = std::sqrt(q);
        ch = std::cosh(r * s);
        sh = std::sinh(r * s) / r;
    } else if (q < -1e-300) {
        double r = std::sqrt(-q);
        ch = std::cos(r * s);
        sh = std::sin(r * s) / r;
    } else {
        ch = 1.0;
        sh = s;
    }
    MoebiusMap M{ch + ga * sh, gb * sh, gc * sh, ch + gd * sh};
    M.renormalize();
    return M;
}

MoebiusMap MoebiusMap::from_boundary_triple(double p0, double p1, double p2,
                                            double q0, double q1, double q2) {
    // standard cross-ratio construction: map triple -> (0, 1, inf), compose.
    // infinities are encoded as NaN-free "huge" via std::isinf on inputs.
    auto to01inf = [](double x0, double x1, double x2) {
        // rows of the matrix sending x0->0, x1->1, x2->inf
        double a, b, c, d;
        if (std::isinf(x0)) {
            a = 0.0;
            b = -(x1 - x2);
            c = -1.0;
            d = x2;
        } else if (std::isinf(x1)) {
            a = 1.0;
            b = -x0;
            c = 1.0;
            d = -x2;
        } else if (std::isinf(x2)) {
            a = 1.0 / (x1 - x0);
            b = -x0 / (x1 - x0);
            c = 0.0;
            d = 1.0;
        } else {
            a = x1 - x2;
            b = -x0 * (x1 - x2);
            c = x1 - x0;
            d = -x2 * (x1 - x0);
        }
        return std::array<double, 4>{a, b, c, d};
    };
    auto A = to01inf(p0, p1, p2);
    auto B = to01inf(q0, q1, q2);
    // M = B^{-1} A (unnormalized inverse is fine up to scale)
    double ia = B[3], ib = -B[1], ic = -B[2], id = B[0];
    MoebiusMap M{ia * A[0] + ib * A[2], ia * A[1] + ib * A[3],
                 ic * A[0] + id * A[2], ic * A[1] + id * A[3]};
    double dt = M.det();
    if (dt == 0.0) throw FieldError("degenerate boundary triple");
    if (dt < 0.0) {
        M.a = -M.a;
        M.b = -M.b;  // flip sign of one row: negates determinant
    }
    M.renormalize();
    return M;
}

WittField pushforward(const MoebiusMap& M, const WittField& v) {
    // (M_* v)(z) = v(M^{-1} z) / (M^{-1})'(z); z * result is a cubic in z,
    // recovered from four interior samples.
    MoebiusMap Q = M.inverse();
    const std::array<cplx, 4> pts = {cplx(0.0, 2.0), cplx(1.0, 1.0),
                                     cplx(-1.0, 3.0), cplx(0.5, 0.7)};
    std::array<std::array<cplx, 4>, 4> A{};
    std::array<cplx, 4> rhs{};
    for (int i = 0; i < 4; ++i) {
        cplx z = pts[i];
        cplx w = v.eval_h(Q.apply(z)) / Q.deriv(z);
        rhs[i] = w * z;
        A[i] = {cplx(1.0), z, z * z, z * z * z};
    }
    // 4x4 complex solve, partial pivoting
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[piv], A[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            cplx f = A[r][col] / A[col][col];
            for (int cc = col; cc < 4; ++cc) A[r][cc] -= f * A[col][cc];
            rhs[r] -= f * rhs[col];
        }
    }
    WittField out;
    for (int i = 0; i < 4; ++i) {
        double coef = (rhs[i] / A[i][i]).real();
        if (std::abs(coef) > 1e-12) out.set(i - 2, coef);
    }
    return out;
}

}  // namespace lowner
