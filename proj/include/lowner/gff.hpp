#pragma once

#include <string>
#include <vector>

#include "lowner/slesim.hpp"

namespace lowner {

enum class KernelTag { GammaD, GammaN, GammaDN, GammaTw };

// Covariance kernels with the -1/2 log singularity on the diagonal.
// Neumann-type kernels are defined only modulo beta(z) + beta(w); the flag
// tells residual computations to fit that freedom out before reporting.
class Kernel {
public:
    static Kernel dirichlet();
    static Kernel neumann();
    static Kernel dirichlet_neumann();
    static Kernel twisted();

    KernelTag tag() const { return tag_; }
    bool additive_freedom() const { return tag_ == KernelTag::GammaN; }
    Chart home() const;  // chart carrying the defining closed form

    double eval(Chart chart, cplx z, cplx w) const;
    // d/dz and d/dw Wirtinger derivatives in the kernel's home chart (or any
    // chart with a native A/B form)
    void wirtinger(Chart chart, cplx z, cplx w, double& value, cplx& dz,
                   cplx& dw) const;

private:
    explicit Kernel(KernelTag t) : tag_(t) {}
    KernelTag tag_;
};

// Harmonic-jet of a one-point function: value, d/dz and d^2/dz^2 (the
// anti-holomorphic derivatives follow by conjugation, mixed ones vanish).
struct EtaJet {
    double value = 0.0;
    cplx d1{0.0}, d2{0.0};
};

struct EtaValue {
    double value;
    double branch_offset = 0.0;  // accumulated continuity unwrap, if any
};

// One row of the coupling catalog: fields, kappa/nu (nu doubles as the xi
// parameter of the time-change and fixed-point rows), pre-pre-Schwarzian
// order, eta closed form and covariance kernel.
struct CouplingCase {
    std::string name;
    FlowDirection direction = FlowDirection::Forward;
    double kappa = 4.0;
    double nu = 0.0;
    WittField delta, sigma;
    PpsOrder order;
    Kernel kernel = Kernel::dirichlet();
    Chart prim = Chart::HalfPlane;

    double chi() const;  // forward order parameter 2/sqrt(k) - sqrt(k)/2
    double q() const;    // reverse order parameter 2/sqrt(k) + sqrt(k)/2
    EtaJet eta_jet_prim(cplx z) const;
};

CouplingCase make_coupling_case(const std::string& name, FlowDirection dir,
                                double kappa, double nu);
const std::vector<std::string>& coupling_case_names();

EtaValue eta_eval(const CouplingCase& c, Chart chart, cplx z);

enum class DerivRoute { ClosedForm, FiniteDifference };

// L_v eta and L_v Gamma evaluated pointwise (in the case's primary chart /
// the kernel's native chart).
double lie_deriv_eta(const WittField& v, const CouplingCase& c, cplx z,
                     DerivRoute route = DerivRoute::ClosedForm);
double lie_deriv_kernel(const WittField& v, const Kernel& k, Chart chart,
                        cplx z, cplx w, DerivRoute route = DerivRoute::ClosedForm);
// Lie derivative of a plain scalar by finite differences (test utility).
double lie_deriv_scalar_fd(const WittField& v, Chart chart,
                           const std::function<double(cplx)>& f, cplx z);

struct Residuals {
    double r1, r2, r3;
};

// Max-abs residuals of the three coupling equations over the sample points
// (Neumann-type spaces are compared modulo the allowed constant / separable
// correction).
Residuals coupling_residuals(const CouplingCase& c, const std::vector<cplx>& points,
                             DerivRoute route = DerivRoute::ClosedForm);

// n-point Schwinger function: sum over all partitions of the points into
// Gamma-pairs and eta-singletons (primary chart).
double schwinger(int n, const CouplingCase& c, const std::vector<cplx>& pts);

// Pushforward one-point function G_t^{-1}_* eta evaluated in the half-plane
// chart; chi_shift perturbs the pre-pre-Schwarzian order (negative controls).
double m1_eval(const CouplingCase& c, const LoewnerChain& chain, cplx z,
               double chi_shift = 0.0);

struct McResult {
    double mean = 0.0;
    double std_error = 0.0;
    int stopped = 0;
    int total = 0;
    bool flagged = false;  // more than 20% of paths stopped early
};

McResult mc_martingale(const CouplingCase& c, cplx z, double t, int n_paths,
                       const SimConfig& cfg, double chi_shift = 0.0,
                       int n_threads = 0);

// Truncated spectral sample of the zero-boundary field on [0,pi]^2
// (sin(ix) sin(jy) / sqrt(i^2+j^2) modes, iid standard normal weights).
std::vector<std::vector<double>> gff_grid_sample(int n_modes, std::uint64_t seed,
                                                 int grid_n = 65);
// Partial spectral sum of the covariance at two points (series oracle).
double gff_mode_covariance(cplx p, cplx q, int n_modes);

}  // namespace lowner
