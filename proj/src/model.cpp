#include "model.hpp"

#include <algorithm>

namespace bufsim::model {

static void check_inflight(double inflight) {
    if (!(inflight >= 0)) throw std::domain_error("inflight must be >= 0");
}

double queue_occupancy(double inflight, const LinkConfig& link) {
    link.validate();
    check_inflight(inflight);
    if (inflight <= link.bdp) return 0.0;
    return std::min(inflight - link.bdp, link.buffer);
}

bool loss_predicate(double inflight, const LinkConfig& link) {
    link.validate();
    check_inflight(inflight);
    return inflight >= link.bdp + link.buffer;
}

double utilization(double inflight, const LinkConfig& link) {
    link.validate();
    check_inflight(inflight);
    return std::min(inflight / link.bdp, 1.0);
}

AggregateState aggregate_state(double inflight, const LinkConfig& link) {
    return AggregateState{inflight, queue_occupancy(inflight, link),
                          utilization(inflight, link)};
}

}  // namespace bufsim::model
