#include "lowner/drivers.hpp"

#include <cmath>

namespace lowner {

std::uint64_t RngStream::next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double RngStream::uniform() {
    return (next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

double RngStream::exponential() { return -std::log(uniform()); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (counter + 0x51ed2701));
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
}

double levy_subordinator(double alpha, double t, RngStream& rng) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw FieldError("alpha out of (0,2]");
    if (!(t > 0.0)) throw FieldError("subordinator needs t > 0");
    if (alpha == 2.0) return 2.0 * t;
    double ap = 0.5 * alpha;                 // one-sided index in (0,1)
    double x = M_PI * (rng.uniform() - 0.5);  // U(-pi/2, pi/2)
    double y = rng.exponential();
    double U = x + 0.5 * M_PI;
    double s = std::sin(ap * U) / std::pow(std::cos(x), 1.0 / ap) *
               std::pow(std::cos(x - ap * U) / y, (1.0 - ap) / ap);
    return 2.0 * std::pow(t, 1.0 / ap) * s;
}

double levy_bridge(double t0, double v0, double t1, double v1, double t,
                   double alpha, RngStream& rng) {
    if (!(t0 < t && t < t1)) throw FieldError("levy_bridge: t outside (t0,t1)");
    double y1 = levy_subordinator(alpha, t - t0, rng);
    double y2 = levy_subordinator(alpha, t1 - t, rng);
    double mean = v0 + (v1 - v0) * y1 / (y1 + y2);
    double var = y1 * y2 / (y1 + y2);
    return mean + std::sqrt(var) * rng.normal();
}

DriverPath DriverPath::deterministic(std::function<double(double)> f) {
    DriverPath p;
    p.kind_ = DriverKind::Deterministic;
    p.closure_ = std::move(f);
    return p;
}

DriverPath DriverPath::brownian(double kappa, double nu, std::uint64_t seed) {
    if (kappa < 0.0) throw FieldError("brownian driver: kappa must be >= 0");
    DriverPath p;
    p.kind_ = DriverKind::Brownian;
    p.kappa_ = kappa;
    p.nu_ = nu;
    p.seed_ = seed;
    p.knots_[0.0] = 0.0;
    return p;
}

DriverPath DriverPath::levy(double alpha, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw FieldError("levy driver: alpha out of (0,2]");
    DriverPath p;
    p.kind_ = DriverKind::Levy;
    p.alpha_ = alpha;
    p.seed_ = seed;
    p.knots_[0.0] = 0.0;
    return p;
}

RngStream DriverPath::stream_for_next_knot() {
    return RngStream(mix_seed(seed_, insert_counter_++));
}

double DriverPath::value_at(double t) {
    if (t < 0.0) throw FieldError("driver queried at negative time");
    if (kind_ == DriverKind::Deterministic) return closure_(t);
    auto it = knots_.find(t);
    if (it != knots_.end()) return it->second;
    auto after = knots_.upper_bound(t);
    double v;
    if (after == knots_.end()) {
        auto last = std::prev(after);
        double dt = t - last->first;
        RngStream rng = stream_for_next_knot();
        if (kind_ == DriverKind::Brownian) {
            v = last->second + nu_ * dt + std::sqrt(kappa_ * dt) * rng.normal();
        } else {
            double y = levy_subordinator(alpha_, dt, rng);
            v = last->second + std::sqrt(y) * rng.normal();
        }
    } else {
        auto before = std::prev(after);
        RngStream rng = stream_for_next_knot();
        if (kind_ == DriverKind::Brownian) {
            double t0 = before->first, v0 = before->second;
            double t1 = after->first, v1 = after->second;
            double mean = v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            double var = kappa_ * (t - t0) * (t1 - t) / (t1 - t0);
            v = mean + std::sqrt(var) * rng.normal();
        } else {
            v = levy_bridge(before->first, before->second, after->first,
                            after->second, t, alpha_, rng);
        }
    }
    knots_[t] = v;
    return v;
}

std::function<double(double)> DriverPath::named_closure(const std::string& id) {
    if (id == "zero") return [](double) { return 0.0; };
    if (id == "sin20") return [](double t) { return std::sin(20.0 * t); };
    if (id == "poly4")
        return [](double s) { return -4.0 * s * s * (s - 1.0) * (s - 2.0); };
    throw FieldError("unknown deterministic driver '" + id + "'");
}

}  // namespace lowner
