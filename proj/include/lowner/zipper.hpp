#pragma once

#include <vector>

#include "lowner/flows.hpp"

namespace lowner {

enum class StepVariant { LinearInterp, PiecewiseConst, ClassifiedExact };

// One-interval approximation of the chain.  The classified variants are a
// Moebius / sqrt-form / Moebius sandwich: the singular part of the combined
// field delta + (du/dt) sigma is conjugated onto a classical chordal,
// dipolar or radial field whose flow is z -> sqrt(a + b z^2) in the frame
// where its special points sit at 0, ±1 or i; the complete remainder flows
// exactly as a Moebius map.
struct StepMap {
    StepVariant variant = StepVariant::ClassifiedExact;
    double dt = 0.0, du = 0.0;
    FieldKind kind = FieldKind::Parabolic;

    MoebiusMap pre;    // frame map (fixes the source at 0)
    double fa = 0.0, fb = 1.0;
    MoebiusMap post;

    WittField ode_field;  // LinearInterp only

    cplx apply(cplx z) const;
    cplx apply_inverse(cplx z) const;
    cplx derivative(cplx z) const;
    StepMap inverted() const;  // exact inverse (classified variants)
    // true when z sits within eps of the slit this step removes
    bool swallows(cplx z, double eps) const;
};

// Build the step map for the interval: combined field delta + (du/dt) sigma.
StepMap step_map(const WittField& delta, const WittField& sigma, double dt,
                 double du, StepVariant variant = StepVariant::ClassifiedExact);

// Flow of the pure delta field over time s expressed as a step map
// (exact for classical delta, O(s^2)-accurate split otherwise).
StepMap delta_flow_step(const WittField& delta, double s);

struct Partition {
    std::vector<double> times;  // t_0 = 0 < t_1 < ... < t_N
};

struct EvalResult {
    cplx value{};
    cplx derivative{1.0, 0.0};
    int swallowed_at = -1;  // step index if the point entered the cut locus
    bool ok() const { return swallowed_at < 0; }
};

struct TracePoint {
    int index;
    char kind;  // 'a' or 'b'
    double t;
    cplx pos;   // in the chain's chart
};

struct Trace {
    std::vector<TracePoint> points;
    std::vector<std::vector<cplx>> arcs;  // polyline segments (Levy trees)
    bool truncated = false;               // N_max exhausted
    int resolution_limited = 0;  // steps committed at the double-precision
                                 // time floor (local map derivative so large
                                 // that no representable dt fits the bounds)
};

class LoewnerChain {
public:
    LoewnerChain() = default;
    LoewnerChain(WittField delta, WittField sigma, Chart chart = Chart::HalfPlane)
        : delta_(std::move(delta)), sigma_(std::move(sigma)), chart_(chart) {}

    void push_step(StepMap s);
    size_t size() const { return steps_.size(); }
    bool empty() const { return steps_.empty(); }
    double total_time() const { return times_.empty() ? 0.0 : times_.back(); }
    const std::vector<StepMap>& steps() const { return steps_; }
    const std::vector<double>& times() const { return times_; }
    const WittField& delta() const { return delta_; }
    const WittField& sigma() const { return sigma_; }
    Chart chart() const { return chart_; }
    double eps_swallow = 1e-9;

    // composed image G^N = G_N o ... o G_1, half-plane coordinates
    EvalResult evaluate(cplx z) const;
    EvalResult evaluate_inverse(cplx z) const;

    // joint point gamma_{n,a} for the current chain plus one extra candidate
    // step (used by the adaptive partitioner); candidate == nullptr gives
    // the current last joint point
    cplx joint_point(const StepMap* candidate) const;

private:
    WittField delta_, sigma_;
    Chart chart_ = Chart::HalfPlane;
    std::vector<StepMap> steps_;
    std::vector<double> times_{0.0};
};

// Pull the source (and post-flow images) back through the inverse steps.
Trace trace_joints(const LoewnerChain& chain, bool include_b = false,
                   int arc_samples = 0);

// The (-delta, sigma) chain driven by u_{T-t} - u_T; composed with the
// original it gives the identity map.
LoewnerChain reverse_chain(const LoewnerChain& chain);
// Same reversal built through fresh step maps (standard composition order,
// O(dt) inversion error; kept for cross-validation).
LoewnerChain reverse_chain_resimulated(const LoewnerChain& chain);

// chart-coordinate position of a half-plane point (used for distances)
cplx chart_position(Chart chart, cplx halfplane_point);

}  // namespace lowner
