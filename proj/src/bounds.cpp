#include "bounds.hpp"

#include <algorithm>
#include <cmath>

namespace bufsim::bounds {

static void check_n(double n) {
    if (!(n >= 1)) throw std::domain_error("n must be >= 1");
}

static void check_bdp(double bdp) {
    if (!(bdp > 0)) throw std::domain_error("bdp must be > 0");
}

double single_flow_min_buffer(const cc::AlgorithmKind& kind, double bdp,
                              double gamma) {
    check_bdp(bdp);
    if (!(gamma > 0 && gamma <= 1))
        throw std::domain_error("target utilization must be in (0, 1]");
    double b = 0;
    switch (kind.algo) {
        case cc::Algo::Reno:
        case cc::Algo::RandomizedReno: b = (2.0 * gamma - 1.0) * bdp; break;
        case cc::Algo::MultiplicativeDecrease: b = (gamma / kind.beta - 1.0) * bdp; break;
        case cc::Algo::Cubic: b = (10.0 * gamma / 7.0 - 1.0) * bdp; break;
        case cc::Algo::Scalable: b = (8.0 * gamma / 7.0 - 1.0) * bdp; break;
        case cc::Algo::BbrCycle: b = (gamma - 0.75) * bdp; break;
        case cc::Algo::BbrIncrement:
            throw std::domain_error(
                "single_flow_min_buffer: no single-flow rule for bbr_increment");
    }
    return std::max(b, 0.0);
}

double sqrt_n_buffer(const FairnessBand& band, double bdp, double n) {
    band.validate();
    check_bdp(bdp);
    check_n(n);
    return band.delta_hi * bdp / std::sqrt(n);
}

double utilization_floor(const FairnessBand& band, double n) {
    band.validate();
    check_n(n);
    return std::max(0.0, 1.0 - band.delta_hi / std::sqrt(n));
}

double bbr_buffer(const FairnessBand& band, double bdp, double n, double delta) {
    band.validate();
    check_bdp(bdp);
    check_n(n);
    if (!(delta > 0 && delta <= 1))
        throw std::domain_error("failure probability delta must be in (0, 1]");
    return band.delta_hi * bdp * std::sqrt(std::log(1.0 / delta)) / std::sqrt(2.0 * n);
}

double desync_window_floor(const FairnessBand& band, double bdp, double buffer,
                           double n, double extra_flows) {
    band.validate();
    check_bdp(bdp);
    check_n(n);
    if (!(extra_flows >= 0)) throw std::domain_error("extra flow count must be >= 0");
    return bdp + buffer - extra_flows * band.delta_hi * bdp / n;
}

double min_decreasing_flows(double n, double w_min) {
    check_n(n);
    if (!(w_min >= 2)) throw std::domain_error("w_min must be >= 2");
    return std::ceil(n / (1.0 + w_min / 2.0));
}

TailBound bernoulli_sync_tail(const FairnessBand& band, double bdp, double n) {
    band.validate();
    check_bdp(bdp);
    check_n(n);
    return TailBound{n * n / (band.delta_lo * bdp) + std::sqrt(n),
                     std::exp(-0.5)};
}

double bernoulli_sync_threshold(const FairnessBand& band, double bdp, double n,
                                double delta) {
    band.validate();
    check_bdp(bdp);
    check_n(n);
    if (!(delta > 0 && delta < 1))
        throw std::domain_error("failure probability delta must be in (0, 1)");
    return n * n / (band.delta_lo * bdp) + std::sqrt(2.0 * n * std::log(1.0 / delta));
}

double random_loss_buffer(const FairnessBand& band, double bdp, double p,
                          double n, double delta) {
    band.validate();
    check_bdp(bdp);
    check_n(n);
    if (!(p > 0 && p <= 1)) throw std::domain_error("loss probability p must be in (0, 1]");
    if (!(delta > 0 && delta < 1))
        throw std::domain_error("failure probability delta must be in (0, 1)");
    if (!(n * p > 0)) throw std::domain_error("n*p must be > 0");
    return band.delta_hi / 2.0 * bdp * p *
           (1.0 + std::sqrt(2.0 * std::log(1.0 / delta) / (n * p)));
}

WindowFloor theorem2_window_floor(const FairnessBand& band, double bdp,
                                  double buffer, double n) {
    band.validate();
    check_bdp(bdp);
    check_n(n);
    WindowFloor out;
    out.floor = std::max(0.0, bdp + buffer - band.delta_hi * bdp / std::sqrt(n));
    out.premise_cap = n * n / (band.delta_hi * bdp) + std::sqrt(n);
    return out;
}

double theorem2_event_cap(const FairnessBand& band, double bdp, double n) {
    band.validate();
    check_bdp(bdp);
    check_n(n);
    double w_plus = band.delta_hi * bdp / n;
    return (n + std::sqrt(n) * w_plus) / (1.0 + w_plus / 2.0);
}

}  // namespace bufsim::bounds
