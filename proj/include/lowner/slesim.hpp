#pragma once

#include "lowner/drivers.hpp"
#include "lowner/zipper.hpp"

namespace lowner {

struct SimConfig {
    double d_min = 0.01;
    double d_max = 0.02;
    int n_max = 100000;
    double T = 1.0;
    Chart chart = Chart::HalfPlane;
    std::uint64_t seed = 0;
    StepVariant variant = StepVariant::ClassifiedExact;
    int max_depth = 64;
};

// Distance used to accept a candidate interval.
enum class AdaptMetric {
    ConsecutiveA,  // d(gamma_{n+1,a}, gamma_{n,a})
    ViaB,          // d(gamma_{n+1,a}, gamma_{n,b}) + d(gamma_{n,b}, gamma_{n,a})
    LevyArc        // d(gamma_{n,b}, gamma_{n,a}) (tree slits)
};

// Recursive interval refinement: candidate joint points are computed for the
// current interval; intervals whose spacing is too large are subdivided by
// sampling an interior driver knot, intervals that land too close park an
// "additional point" register (the knot stays recorded and keeps
// constraining future bridges).
class AdaptiveSampler {
public:
    AdaptiveSampler(WittField delta, WittField sigma, DriverPath driver,
                    SimConfig cfg, AdaptMetric metric = AdaptMetric::ConsecutiveA);

    // resolve [last horizon, T]; can be called repeatedly with growing T
    void run(double T);

    const LoewnerChain& chain() const { return chain_; }
    DriverPath& driver() { return driver_; }
    bool truncated() const { return truncated_; }
    Trace trace(bool include_b = false, int arc_samples = 0) const;

private:
    void routine_r(double tx, double ux, double ty, double uy, int depth);
    double candidate_distance(const StepMap& cand, cplx* joint_out);
    void commit(const StepMap& cand, double t, double u, cplx joint);
    int resolution_limited_ = 0;

    LoewnerChain chain_;
    DriverPath driver_;
    SimConfig cfg_;
    AdaptMetric metric_;
    std::vector<TracePoint> committed_;
    cplx last_joint_;
    double last_t_ = 0.0, last_u_ = 0.0;
    double prev_interval_ = 0.0;
    bool add_active_ = false;
    double add_t_ = 0.0, add_u_ = 0.0;
    bool truncated_ = false;
    bool stop_ = false;
};

Trace simulate_sle(const WittField& delta, const WittField& sigma,
                   const SleParams& params, const SimConfig& cfg);

Trace simulate_levy_tree(const WittField& delta, const WittField& sigma,
                         double alpha, const SimConfig& cfg, int arc_samples = 8);

struct AdaptiveResult {
    Partition partition;
    Trace trace;
};

// Deterministic-driver partitioning with the same interval routine.
AdaptiveResult adaptive_partition(const WittField& delta, const WittField& sigma,
                                  std::function<double(double)> driver,
                                  double d_min, double d_max, Chart chart,
                                  double t_end,
                                  AdaptMetric metric = AdaptMetric::ConsecutiveA,
                                  StepVariant variant = StepVariant::ClassifiedExact);

}  // namespace lowner
