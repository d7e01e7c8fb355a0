#include <doctest.h>

#include "model.hpp"

using namespace bufsim;

namespace {
const model::LinkConfig kLink{100.0, 40.0};
}

TEST_CASE("queue occupancy follows the three-branch map") {
    CHECK(model::queue_occupancy(50, kLink) == 0.0);
    CHECK(model::queue_occupancy(120, kLink) == doctest::Approx(20.0));
    CHECK(model::queue_occupancy(200, kLink) == doctest::Approx(40.0));

    SUBCASE("branch boundaries are exact") {
        CHECK(model::queue_occupancy(100, kLink) == 0.0);           // W = bdp
        CHECK(model::queue_occupancy(101, kLink) == doctest::Approx(1.0));
        CHECK(model::queue_occupancy(140, kLink) == doctest::Approx(40.0));  // W = bdp+B
        CHECK(model::queue_occupancy(139, kLink) == doctest::Approx(39.0));
    }
}

TEST_CASE("loss predicate fires exactly at a full queue") {
    CHECK_FALSE(model::loss_predicate(139, kLink));
    CHECK(model::loss_predicate(140, kLink));
    CHECK(model::loss_predicate(1000, kLink));

    SUBCASE("zero-buffer link loses at one bdp") {
        model::LinkConfig zero{100.0, 0.0};
        CHECK(model::loss_predicate(100, zero));
        CHECK_FALSE(model::loss_predicate(99.5, zero));
    }
}

TEST_CASE("utilization law") {
    CHECK(model::utilization(100, kLink) == 1.0);
    CHECK(model::utilization(50, kLink) == doctest::Approx(0.5));
    CHECK(model::utilization(150, kLink) == 1.0);
}

TEST_CASE("negative in-flight is a domain error") {
    CHECK_THROWS_AS(model::queue_occupancy(-1, kLink), std::domain_error);
    CHECK_THROWS_AS(model::loss_predicate(-1, kLink), std::domain_error);
    CHECK_THROWS_AS(model::utilization(-1, kLink), std::domain_error);
}

TEST_CASE("piecewise consistency and monotonicity over a grid") {
    double prev_q = 0, prev_u = 0;
    for (int i = 0; i <= 400; ++i) {
        double w = i * 0.5;
        double q = model::queue_occupancy(w, kLink);
        double u = model::utilization(w, kLink);

        // Non-empty queue iff the link is saturated past one bdp.
        if (w > kLink.bdp) CHECK(u == 1.0);
        if (q > 0) CHECK(u == 1.0);
        CHECK(q >= 0);
        CHECK(q <= kLink.buffer);

        CHECK(q >= prev_q);
        CHECK(u >= prev_u);
        prev_q = q;
        prev_u = u;

        // Loss happens exactly when the queue saturates at W >= bdp + B.
        bool loss = model::loss_predicate(w, kLink);
        CHECK(loss == (q == kLink.buffer && w >= kLink.bdp + kLink.buffer));
    }
}
