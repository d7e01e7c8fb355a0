#include <doctest.h>

#include <cmath>

#include "algorithms.hpp"

using namespace bufsim;
using cc::AlgorithmKind;
using cc::FlowState;

namespace {
FlowState make(AlgorithmKind kind, double window, double base = 0, int phase = 2) {
    FlowState f;
    f.algorithm = kind;
    f.window = window;
    f.bbr_base = base;
    f.bbr_phase = phase;
    return f;
}
}  // namespace

TEST_CASE("increase rules") {
    CHECK(cc::increase(make(AlgorithmKind::reno(), 10)).window == 11.0);
    CHECK(cc::increase(make(AlgorithmKind::cubic(), 7)).window == 8.0);
    CHECK(cc::increase(make(AlgorithmKind::randomized_reno(), 3)).window == 4.0);
    CHECK(cc::increase(make(AlgorithmKind::scalable(), 100)).window ==
          doctest::Approx(101.0));
    CHECK(cc::increase(make(AlgorithmKind::bbr_cycle(), 100, 100)).window == 100.0);
}

TEST_CASE("scalable growth equals the per-ack rule compounded once per RTT") {
    // Brute force: each of the w acks in one RTT adds 0.01 of a packet.
    for (double w0 : {5.0, 64.0, 100.0, 333.5}) {
        double acked = w0;
        double brute = w0;
        for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(acked); ++i)
            brute += 0.01;
        brute += 0.01 * (acked - std::floor(acked));  // fractional tail ack
        CHECK(cc::increase(make(AlgorithmKind::scalable(), w0)).window ==
              doctest::Approx(brute));
    }
}

TEST_CASE("multiplicative decrease is exact for every MD kind") {
    CHECK(cc::decrease(make(AlgorithmKind::reno(), 80), nullptr).window == 40.0);
    CHECK(cc::decrease(make(AlgorithmKind::cubic(), 1024), nullptr).window == 717.0);
    CHECK(cc::decrease(make(AlgorithmKind::scalable(), 64), nullptr).window == 56.0);
    CHECK(cc::decrease(make(AlgorithmKind::md(0.6), 50), nullptr).window ==
          doctest::Approx(30.0));

    SUBCASE("ratio is independent of the window") {
        for (double w : {3.0, 17.5, 911.0}) {
            auto kind = AlgorithmKind::md(0.37);
            CHECK(cc::decrease(make(kind, w), nullptr).window / w ==
                  doctest::Approx(0.37));
        }
    }
}

TEST_CASE("rng contract for randomized kinds") {
    CHECK_THROWS_AS(cc::decrease(make(AlgorithmKind::randomized_reno(), 8), nullptr),
                    std::invalid_argument);
    CHECK_THROWS_AS(cc::decrease(make(AlgorithmKind::bbr_increment(), 8, 8), nullptr),
                    std::invalid_argument);
    CHECK_THROWS_AS(cc::advance_bbr(make(AlgorithmKind::bbr_cycle(), 8, 8), false, nullptr),
                    std::invalid_argument);
    CHECK_THROWS_AS(cc::advance_bbr(make(AlgorithmKind::reno(), 8), false, nullptr),
                    std::invalid_argument);
}

TEST_CASE("randomized reno halves with probability 1/w") {
    const double w = 25.0;
    const int trials = 100000;
    Rng rng = Rng::stream(2024, 1);
    int halved = 0;
    for (int i = 0; i < trials; ++i) {
        auto next = cc::decrease(make(AlgorithmKind::randomized_reno(), w), &rng);
        if (next.window < w) {
            CHECK(next.window == doctest::Approx(w / 2));
            ++halved;
        }
    }
    double p = 1.0 / w;
    double se = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(static_cast<double>(halved) / trials - p) < 3 * se);
}

TEST_CASE("bbr probe cycle") {
    auto kind = AlgorithmKind::bbr_cycle();
    Rng rng = Rng::stream(5, 1);

    SUBCASE("entering the probe slot lifts the window by a quarter base") {
        auto f = make(kind, 100, 100, 7);  // last cruise slot
        auto next = cc::advance_bbr(f, false, &rng);
        CHECK(next.bbr_phase == cc::kProbePhase);
        CHECK(next.window == doctest::Approx(125.0));
    }

    SUBCASE("the drain slot takes back the quarter") {
        auto f = make(kind, 125, 100, cc::kProbePhase);
        auto next = cc::advance_bbr(f, false, &rng);
        CHECK(next.bbr_phase == cc::kDrainPhase);
        CHECK(next.window == doctest::Approx(100.0));
    }

    SUBCASE("cruise slots pin the window to the base rate") {
        auto f = make(kind, 85, 100, cc::kDrainPhase);
        auto next = cc::advance_bbr(f, false, &rng);
        CHECK(next.bbr_phase == 2);
        CHECK(next.window == doctest::Approx(100.0));
    }

    SUBCASE("a full cycle is rate-neutral") {
        double sum = 0;
        for (double g : cc::kGainCycle) sum += g;
        CHECK(sum == doctest::Approx(8.0));

        auto f = make(kind, 100, 100, 2);
        for (int i = 0; i < 8; ++i) f = cc::advance_bbr(f, false, &rng);
        CHECK(f.bbr_phase == 2);
        CHECK(f.window == doctest::Approx(100.0));
    }

    SUBCASE("loss outside the probe phase is ignored") {
        auto f = make(kind, 100, 100, 4);
        auto dec = cc::decrease(f, &rng);
        CHECK(dec.window == f.window);
        CHECK_FALSE(dec.bbr_loss_pending);
    }

    SUBCASE("loss in the probe phase marks the pending reduction") {
        auto f = make(kind, 125, 100, cc::kProbePhase);
        auto dec = cc::decrease(f, &rng);
        CHECK(dec.window == 125.0);
        CHECK(dec.bbr_loss_pending);
    }
}

TEST_CASE("bbr increment distribution") {
    auto kind = AlgorithmKind::bbr_increment();
    const double base = 100.0;
    Rng rng = Rng::stream(99, 3);

    SUBCASE("no loss means no change") {
        auto f = make(kind, 100, base);
        CHECK(cc::advance_bbr(f, false, &rng).window == 100.0);
    }

    SUBCASE("increments are 0 or +-base/4 with the 1/8 weights, mean zero") {
        const int trials = 100000;
        int up = 0, down = 0;
        double sum = 0;
        for (int i = 0; i < trials; ++i) {
            auto f = make(kind, 100, base);
            double d = cc::advance_bbr(f, true, &rng).window - 100.0;
            CHECK(std::abs(d) <= base / 4 + 1e-12);
            CHECK((d == 0.0 || d == 25.0 || d == -25.0));
            sum += d;
            if (d > 0) ++up;
            if (d < 0) ++down;
        }
        // Empirical mean within 3 standard errors of zero.
        double var = 2.0 / 8.0 * 625.0;
        double se = std::sqrt(var / trials);
        CHECK(std::abs(sum / trials) < 3 * se);
        double pse = std::sqrt(0.125 * 0.875 / trials);
        CHECK(std::abs(static_cast<double>(up) / trials - 0.125) < 3 * pse);
        CHECK(std::abs(static_cast<double>(down) / trials - 0.125) < 3 * pse);
    }
}

TEST_CASE("identical seeds give identical trajectories") {
    for (auto kind : {AlgorithmKind::randomized_reno(), AlgorithmKind::bbr_increment()}) {
        Rng a = Rng::stream(77, 4);
        Rng b = Rng::stream(77, 4);
        auto fa = make(kind, 40, 40);
        auto fb = make(kind, 40, 40);
        for (int i = 0; i < 200; ++i) {
            fa = cc::decrease(fa, &a);
            fb = cc::decrease(fb, &b);
            CHECK(fa.window == fb.window);
        }
    }
}

TEST_CASE("initial probe phase avoids the drain slot") {
    Rng rng = Rng::stream(13, 8);
    bool seen_probe = false;
    for (int i = 0; i < 500; ++i) {
        int p = cc::random_initial_phase(rng);
        CHECK(p != cc::kDrainPhase);
        CHECK(p >= 0);
        CHECK(p < 8);
        if (p == cc::kProbePhase) seen_probe = true;
    }
    CHECK(seen_probe);
}
