#pragma once

#include <map>
#include <vector>

#include "lowner/field.hpp"

namespace lowner {

struct HighestWeight {
    double h;
    double c;
};

// h = -(±k - 6)/(±2k), c = h(±3k - 8); upper signs forward, lower reverse.
HighestWeight hc_from_kappa(double kappa, FlowDirection dir);

// Graded vector in the highest-weight module: coefficients over ordered
// monomials L_{-k1} L_{-k2} ... |> with k1 >= k2 >= ... >= 1.
class VermaVector {
public:
    using Monomial = std::vector<int>;

    explicit VermaVector(int level_cap = 6) : level_cap_(level_cap) {}
    static VermaVector vacuum(int level_cap = 6);

    void add(const Monomial& m, double coeff);
    double coeff(const Monomial& m) const;
    const std::map<Monomial, double>& terms() const { return terms_; }
    int level_cap() const { return level_cap_; }
    double max_abs() const;
    VermaVector& operator+=(const VermaVector& o);
    VermaVector& operator*=(double s);
    std::string to_string() const;

private:
    std::map<Monomial, double> terms_;
    int level_cap_;
};

// Normal-ordered action of L_n (bracket [L_n,L_m] = (m-n) L_{n+m}
// + (1/12)(n^3-n) delta_{n+m} I, highest-weight rules L_{n>=1}|> = 0,
// L_0|> = -h|>, I|> = c|>).
VermaVector apply_generator(int n, const VermaVector& v, const HighestWeight& hw);

// (delta_hat + sigma_hat^2 / 2)|>
VermaVector ahat_vacuum(const WittField& delta, const WittField& sigma,
                        const HighestWeight& hw);

// L_1 and L_2 annihilate (2 L_{-2} ± (k/2) L_{-1}^2)|> at the weight from
// hc_from_kappa.
bool singular_check(double kappa, FlowDirection dir, double tol = 1e-12);

}  // namespace lowner
