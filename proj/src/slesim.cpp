#include "lowner/slesim.hpp"

#include <cmath>

namespace lowner {

AdaptiveSampler::AdaptiveSampler(WittField delta, WittField sigma,
                                 DriverPath driver, SimConfig cfg,
                                 AdaptMetric metric)
    : chain_(std::move(delta), std::move(sigma), cfg.chart),
      driver_(std::move(driver)),
      cfg_(cfg),
      metric_(metric) {
    if (!(cfg.d_min > 0.0 && cfg.d_min < cfg.d_max))
        throw FieldError("need 0 < d_min < d_max");
    if (cfg.n_max < 1) throw FieldError("n_max must be >= 1");
    chain_.eps_swallow = 10.0 * cfg.d_min;
    last_joint_ = chart_position(cfg.chart, 0.0);
}

double AdaptiveSampler::candidate_distance(const StepMap& cand, cplx* joint_out) {
    cplx ja = chain_.joint_point(&cand);
    cplx pa = chart_position(cfg_.chart, ja);
    if (joint_out) *joint_out = pa;
    switch (metric_) {
        case AdaptMetric::ConsecutiveA:
            return std::abs(pa - last_joint_);
        case AdaptMetric::ViaB:
        case AdaptMetric::LevyArc: {
            // b-point of the current interval: the pure delta-flow tip pulled
            // back through the committed steps
            StepMap tip = delta_flow_step(chain_.delta(), -cand.dt);
            cplx jb = chain_.joint_point(nullptr);  // warm start not needed; compute directly
            cplx x = tip.apply(0.0);
            for (size_t k = chain_.size(); k-- > 0;)
                x = chain_.steps()[k].apply_inverse(x);
            jb = x;
            cplx pb = chart_position(cfg_.chart, jb);
            if (metric_ == AdaptMetric::LevyArc) return std::abs(pb - last_joint_);
            return std::abs(pa - pb) + std::abs(pb - last_joint_);
        }
    }
    return 0.0;
}

void AdaptiveSampler::commit(const StepMap& cand, double t, double u, cplx joint) {
    chain_.push_step(cand);
    committed_.push_back({int(chain_.size()), 'a', t, joint});
    prev_interval_ = t - last_t_;
    last_t_ = t;
    last_u_ = u;
    last_joint_ = joint;
    if (add_active_ && add_t_ <= last_t_) add_active_ = false;
    if (int(chain_.size()) >= cfg_.n_max) {
        truncated_ = true;
        stop_ = true;
    }
}

void AdaptiveSampler::routine_r(double tx, double ux, double ty, double uy,
                                int depth) {
    while (!stop_) {
        double dt = ty - tx;
        if (dt <= 0.0)
            throw FieldError("step underflow in adaptive partition");
        StepMap cand = step_map(chain_.delta(), chain_.sigma(), dt, uy - ux,
                                cfg_.variant);
        cplx joint;
        double d = candidate_distance(cand, &joint);
        // Near-pinch points of the trace the pulled-back spacing can stay
        // outside the bounds for every representable dt (the local conformal
        // derivative exceeds 1/ulp).  Commit at the resolution floor (or when
        // the subdivision ladder exhausts its depth budget) rather than
        // looping on sub-ulp intervals; the trace carries a counter so such
        // steps stay visible.
        if (dt <= 64.0 * 1e-16 * std::max(1.0, std::abs(ty)) ||
            depth >= cfg_.max_depth) {
            if (driver_.kind() == DriverKind::Deterministic)
                throw FieldError("step underflow in adaptive partition");
            ++resolution_limited_;
            commit(cand, ty, uy, joint);
            return;
        }
        if (!add_active_) {
            if (d > cfg_.d_max) {
                double span = ty - tx;
                double step0 = prev_interval_ > 0.0 ? prev_interval_ : 0.5 * span;
                double tz = tx + std::min(step0, 0.5 * span);
                double uz = driver_.value_at(tz);
                routine_r(tx, ux, tz, uz, depth + 1);
                if (stop_) return;
                tx = last_t_;
                ux = last_u_;
                continue;
            }
            if (d < cfg_.d_min) {
                add_active_ = true;
                add_t_ = ty;
                add_u_ = uy;
                return;
            }
            commit(cand, ty, uy, joint);
            return;
        }
        // an additional point (add_t_, add_u_) inside (tx, ty) is parked
        if (d > cfg_.d_max) {
            double tz = add_t_ + 0.5 * (ty - add_t_);
            double uz = driver_.value_at(tz);
            routine_r(tx, ux, tz, uz, depth + 1);
            if (stop_) return;
            tx = last_t_;
            ux = last_u_;
            continue;
        }
        if (d < cfg_.d_min) {
            add_t_ = ty;
            add_u_ = uy;
            return;
        }
        commit(cand, ty, uy, joint);
        add_active_ = false;
        return;
    }
}

void AdaptiveSampler::run(double T) {
    if (T <= last_t_ || stop_) return;
    double uT = driver_.value_at(T);
    routine_r(last_t_, last_u_, T, uT, 0);
    // commit whatever remains between the last accepted time and T: the
    // routine ends either at the horizon or with a parked short interval
    if (!stop_ && last_t_ < T) {
        double dt = T - last_t_;
        if (dt > 1e-15 * T) {
            StepMap cand = step_map(chain_.delta(), chain_.sigma(), dt,
                                    uT - last_u_, cfg_.variant);
            cplx joint;
            candidate_distance(cand, &joint);
            commit(cand, T, uT, joint);  // final point exempt from the bounds
        }
        add_active_ = false;
    }
}

Trace AdaptiveSampler::trace(bool include_b, int arc_samples) const {
    Trace tr;
    if (!include_b) {
        tr.points = committed_;
    } else {
        tr = trace_joints(chain_, true, arc_samples);
    }
    tr.truncated = truncated_;
    tr.resolution_limited = resolution_limited_;
    return tr;
}

Trace simulate_sle(const WittField& delta, const WittField& sigma,
                   const SleParams& params, const SimConfig& cfg) {
    DriverPath driver = DriverPath::brownian(params.kappa, params.nu, cfg.seed);
    AdaptiveSampler s(delta, sigma, std::move(driver), cfg, AdaptMetric::ConsecutiveA);
    s.run(cfg.T);
    return s.trace();
}

Trace simulate_levy_tree(const WittField& delta, const WittField& sigma,
                         double alpha, const SimConfig& cfg, int arc_samples) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw FieldError("levy tree needs 0 < alpha < 2");
    SimConfig c = cfg;
    c.variant = StepVariant::PiecewiseConst;  // jumps enter as exact Moebius moves
    DriverPath driver = DriverPath::levy(alpha, cfg.seed);
    AdaptiveSampler s(delta, sigma, std::move(driver), c, AdaptMetric::LevyArc);
    s.run(c.T);
    return s.trace(true, arc_samples);
}

AdaptiveResult adaptive_partition(const WittField& delta, const WittField& sigma,
                                  std::function<double(double)> driver,
                                  double d_min, double d_max, Chart chart,
                                  double t_end, AdaptMetric metric,
                                  StepVariant variant) {
    SimConfig cfg;
    cfg.d_min = d_min;
    cfg.d_max = d_max;
    cfg.chart = chart;
    cfg.T = t_end;
    cfg.variant = variant;
    AdaptiveSampler s(delta, sigma, DriverPath::deterministic(std::move(driver)),
                      cfg, metric);
    s.run(t_end);
    AdaptiveResult out;
    out.partition.times = s.chain().times();
    out.trace = s.trace();
    return out;
}

}  // namespace lowner
