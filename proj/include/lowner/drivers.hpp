#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "lowner/field.hpp"

namespace lowner {

// Counter-based stream: every sampled knot gets its own generator seeded by
// (path seed, insertion index), so refinement order never perturbs values
// recorded earlier and parallel ensembles stay reproducible.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform();        // (0,1)
    double normal();         // Box-Muller
    double exponential();    // rate 1

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter);

// One sample of the positive stable subordinator Y_t with
// E[exp(-l Y_t)] = exp(-t (2l)^{alpha/2}), so that a centered Gaussian of
// variance Y_t has characteristic function exp(-t |theta|^alpha).
double levy_subordinator(double alpha, double t, RngStream& rng);

enum class DriverKind { Deterministic, Brownian, Levy };

// Lazily refined sample store for the driving function.  Brownian paths hold
// u_t = sqrt(kappa) B_t + nu t; Levy paths hold the stable process itself.
// Once a knot (t, v) is recorded it never changes; queries between knots
// sample the conditional bridge, queries beyond the last knot extend it.
class DriverPath {
public:
    static DriverPath deterministic(std::function<double(double)> f);
    static DriverPath brownian(double kappa, double nu, std::uint64_t seed);
    static DriverPath levy(double alpha, std::uint64_t seed);

    double value_at(double t);

    DriverKind kind() const { return kind_; }
    double kappa() const { return kappa_; }
    double nu() const { return nu_; }
    double alpha() const { return alpha_; }
    std::uint64_t seed() const { return seed_; }
    const std::map<double, double>& knots() const { return knots_; }

    // named deterministic closures usable from the CLI
    static std::function<double(double)> named_closure(const std::string& id);

private:
    DriverKind kind_ = DriverKind::Deterministic;
    double kappa_ = 1.0, nu_ = 0.0, alpha_ = 2.0;
    std::uint64_t seed_ = 0;
    std::function<double(double)> closure_;
    std::map<double, double> knots_;
    std::uint64_t insert_counter_ = 0;

    RngStream stream_for_next_knot();
};

double levy_bridge(double t0, double v0, double t1, double v1, double t,
                   double alpha, RngStream& rng);

}  // namespace lowner
