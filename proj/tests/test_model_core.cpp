#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bicoid/params.hpp"
#include "bicoid/rng.hpp"

using namespace bicoid;

TEST_CASE("source rate is s0 through the cutoff and decays afterwards") {
    ModelParams p;
    p.s0 = 10.0;

    CHECK(source_rate(p.t0 / 2.0, p) == 10.0);
    CHECK(source_rate(0.0, p) == 10.0);

    // jump convention: the step function is 1 at t0 itself
    p.s0 = 7.5;
    CHECK(source_rate(p.t0, p) == 7.5);

    p.s0 = 10.0;
    CHECK(source_rate(p.t0 + p.tau_m, p) == Catch::Approx(10.0 * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("source rate rejects negative time") {
    ModelParams p;
    CHECK_THROWS_AS(source_rate(-1.0, p), std::invalid_argument);
}

TEST_CASE("source rate is constant before t0, nonincreasing after, and never zero for s0 > 0") {
    ModelParams p;
    p.s0 = 3.25;
    double prev = source_rate(p.t0, p);
    for (int k = 0; k <= 20; ++k) {
        const double t_before = p.t0 * static_cast<double>(k) / 20.0;
        CHECK(source_rate(t_before, p) == 3.25);
        const double t_after = p.t0 + 200.0 * static_cast<double>(k);
        const double s = source_rate(t_after, p);
        CHECK(s <= prev);
        CHECK(s > 0.0);
        prev = s;
    }
    CHECK(source_rate(p.t0 + 100.0 * p.tau_m, p) > 0.0);
}

TEST_CASE("hop rate is D over h squared") {
    ModelParams p; // D = 3, h = 5
    const double oracle = 3.0 / 25.0;
    CHECK(hop_rate(p) == oracle);
    CHECK(p.hop_rate() == oracle);

    p.D = 0.0;
    CHECK(hop_rate(p) == 0.0);

    p.D = 25.0;
    p.h = 5.0;
    CHECK(hop_rate(p) == 1.0);
}

TEST_CASE("hop rate rejects h = 0 and validate rejects bad fields") {
    ModelParams p;
    p.h = 0.0;
    CHECK_THROWS_AS(hop_rate(p), std::invalid_argument);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    ModelParams q;
    q.n_compartments = 1;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = ModelParams{};
    q.tau_p = 0.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = ModelParams{};
    q.s0 = -1.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("hop rate scales exactly as 1/h^2") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        ModelParams a;
        a.D = uniform_open(rng) * 50.0;
        a.h = uniform_open(rng) * 20.0 + 0.01;
        ModelParams b = a;
        b.h = 2.0 * a.h;
        // doubling h divides the rate by exactly 4 (power-of-two scaling)
        CHECK(hop_rate(b) == hop_rate(a) / 4.0);
    }
}
