#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bicoid/calibration.hpp"
#include "bicoid/rng.hpp"

using namespace bicoid;

namespace {

Trajectory synthetic(std::vector<double> times, int n_comp, double (*f)(std::size_t, int)) {
    Trajectory t;
    t.sample_times = std::move(times);
    t.n_compartments = n_comp;
    for (std::size_t r = 0; r < t.sample_times.size(); ++r)
        for (int c = 0; c < n_comp; ++c) t.samples.push_back(f(r, c));
    t.meta.sample_interval = t.rows() > 1 ? t.sample_times[1] - t.sample_times[0] : 0.0;
    return t;
}

SweepSpec singleton_spec(AbmConfig base) {
    SweepSpec s;
    s.source_decay_rate = {base.source_decay_rate, base.source_decay_rate, 1.0};
    s.protein_decay_rate = {base.protein_decay_rate, base.protein_decay_rate, 1.0};
    s.prob_right = {base.prob_right, base.prob_right, 1.0};
    s.prob_left = {base.prob_left, base.prob_left, 1.0};
    s.source_production_prob = {base.source_production_prob, base.source_production_prob, 1.0};
    s.base = base;
    return s;
}

} // namespace

TEST_CASE("grid sizes follow floor((high-low)/step)+1 despite rounding") {
    CHECK(ParamRange{0.1, 0.3, 0.1}.count() == 3);
    CHECK(ParamRange{0.5, 0.5, 1.0}.count() == 1);
    CHECK(ParamRange{0.01, 0.05, 0.01}.count() == 5); // (0.05-0.01)/0.01 rounds below 4
    CHECK(ParamRange{0.2, 1.0, 0.1}.count() == 9);
}

TEST_CASE("case enumeration is a row-major cartesian product") {
    AbmConfig base;
    SweepSpec s = singleton_spec(base);

    SECTION("one axis varying") {
        s.prob_right = {0.1, 0.3, 0.1};
        s.prob_left = {0.1, 0.1, 1.0};
        const auto cases = enumerate_cases(s);
        REQUIRE(cases.size() == 3);
        CHECK(cases[0][2] == Catch::Approx(0.1));
        CHECK(cases[1][2] == Catch::Approx(0.2));
        CHECK(cases[2][2] == Catch::Approx(0.3));
    }

    SECTION("all singletons yield exactly one case") {
        const auto cases = enumerate_cases(s);
        REQUIRE(cases.size() == 1);
        CHECK(cases[0][0] == base.source_decay_rate);
        CHECK(cases[0][4] == base.source_production_prob);
    }

    SECTION("two five-point axes yield 25 cases, last axis fastest") {
        s.source_decay_rate = {0.1, 0.5, 0.1};
        s.source_production_prob = {0.1, 0.5, 0.1};
        const auto cases = enumerate_cases(s);
        REQUIRE(cases.size() == 25);
        CHECK(cases[0][0] == Catch::Approx(0.1));
        CHECK(cases[0][4] == Catch::Approx(0.1));
        CHECK(cases[1][4] == Catch::Approx(0.2)); // innermost (last field) advances first
        CHECK(cases[5][0] == Catch::Approx(0.2));
        CHECK(cases[24][0] == Catch::Approx(0.5));
        CHECK(cases[24][4] == Catch::Approx(0.5));
    }
}

TEST_CASE("the full calibration grid enumerates 5625 cases") {
    const SweepSpec s = full_sweep_spec();
    CHECK(s.case_count() == 5625);
    const auto cases = enumerate_cases(s);
    CHECK(cases.size() == 5625);
    CHECK(cases.front()[0] == Catch::Approx(0.01));
    CHECK(cases.back()[4] == Catch::Approx(1.0));
}

TEST_CASE("square distance worked examples") {
    auto base = synthetic({0.0, 60.0, 120.0}, 5, [](std::size_t r, int c) {
        return static_cast<double>(r) * 3.0 + static_cast<double>(c);
    });

    SECTION("identity scores zero") {
        CHECK(square_distance(base, base, {0.0, 60.0, 120.0}) == 0.0);
    }

    SECTION("a constant offset of one scores one") {
        auto shifted = base;
        for (auto& v : shifted.samples) v += 1.0;
        CHECK(square_distance(shifted, base, {0.0, 120.0}) == 1.0);
    }

    SECTION("a single-snapshot perturbation scores mean(v^2)") {
        auto perturbed = base;
        const double v[5] = {1.0, 2.0, 3.0, 0.0, -2.0};
        for (int c = 0; c < 5; ++c) perturbed.at(1, c) += v[c];
        // oracle by hand: (1 + 4 + 9 + 0 + 4) / 5 = 3.6
        std::vector<double> partials;
        CHECK(square_distance(perturbed, base, {60.0}, {}, &partials) == Catch::Approx(3.6));
        REQUIRE(partials.size() == 1);
        CHECK(partials[0] == Catch::Approx(3.6));
    }

    SECTION("score is symmetric") {
        auto other = base;
        for (auto& v : other.samples) v *= 1.7;
        CHECK(square_distance(base, other, {0.0, 60.0}) == square_distance(other, base, {0.0, 60.0}));
    }

    SECTION("scaling both trajectories by c scales the score by c^2") {
        auto a = base, b = base;
        for (auto& v : b.samples) v += 2.5;
        const double raw = square_distance(a, b, {60.0, 120.0});
        auto a2 = a, b2 = b;
        for (auto& v : a2.samples) v *= 2.5;
        for (auto& v : b2.samples) v *= 2.5;
        CHECK(square_distance(a2, b2, {60.0, 120.0}) == Catch::Approx(raw * 6.25).epsilon(1e-12));
    }

    SECTION("a time outside the trajectory names the time") {
        CHECK_THROWS_WITH(square_distance(base, base, {600.0}), Catch::Matchers::ContainsSubstring("600"));
    }

    SECTION("compartment subsets restrict the cells") {
        auto perturbed = base;
        perturbed.at(1, 0) += 10.0;
        CHECK(square_distance(perturbed, base, {60.0}, {1, 2}) == 0.0);
        CHECK(square_distance(perturbed, base, {60.0}, {0}) == 100.0);
    }
}

TEST_CASE("case seeds depend on the tuple, not the grid") {
    const CaseParams p1{0.02, 0.01, 0.2, 0.3, 0.7};
    const CaseParams p2{0.02, 0.01, 0.2, 0.3, 0.8};
    CHECK(case_seed(5, p1) == case_seed(5, p1));
    CHECK(case_seed(5, p1) != case_seed(5, p2));
    CHECK(case_seed(5, p1) != case_seed(6, p1));
}

TEST_CASE("adding a case to the grid never changes existing scores") {
    AbmConfig base;
    base.n_compartments = 10;
    base.n_iterations = 300;
    base.source_time_produce = 5;

    SweepSpec narrow = singleton_spec(base);
    narrow.prob_right = {0.2, 0.3, 0.1};
    narrow.prob_left = {0.3, 0.3, 1.0};
    narrow.runs_per_case = 4;
    narrow.comparison_minutes = {5.0};

    SweepSpec wide = narrow;
    wide.prob_right = {0.2, 0.4, 0.1};

    const auto target = run_abm(base, 31);

    const auto r_narrow = run_sweep(narrow, target, 777);
    const auto r_wide = run_sweep(wide, target, 777);

    auto score_of = [](const std::vector<CaseResult>& rs, double prob_right) {
        for (const auto& r : rs)
            if (std::abs(r.params[2] - prob_right) < 1e-12) return r.score;
        FAIL("case not found");
        return 0.0;
    };
    CHECK(score_of(r_narrow, 0.2) == score_of(r_wide, 0.2));
    CHECK(score_of(r_narrow, 0.3) == score_of(r_wide, 0.3));
}

TEST_CASE("tied scores rank by case id") {
    AbmConfig base;
    base.n_compartments = 8;
    base.n_iterations = 120;
    SweepSpec s = singleton_spec(base);
    s.prob_right = {0.1, 0.3, 0.1};
    s.runs_per_case = 2;
    s.comparison_minutes = {0.0}; // every case matches the empty initial row exactly

    const auto target = run_abm(base, 1);
    const auto results = run_sweep(s, target, 99);
    REQUIRE(results.size() == 3);
    for (std::size_t i = 0; i < results.size(); ++i) {
        CHECK(results[i].score == 0.0);
        CHECK(results[i].case_id == static_cast<std::int64_t>(i) + 1);
    }
}

TEST_CASE("sweep recovers the generating parameters of a synthetic target") {
    AbmConfig base;
    base.n_compartments = 20;
    base.n_iterations = 600;
    base.source_time_produce = 10;
    base.source_time_decay = 400;
    const CaseParams truth{0.02, 0.01, 0.2, 0.4, 0.8};

    const auto target_stats = run_abm_ensemble(apply_case(base, truth), 30, 999, 2);
    const auto target = target_stats.mean_trajectory();

    SweepSpec s = singleton_spec(apply_case(base, truth));
    s.prob_right = {0.1, 0.3, 0.1}; // truth in the middle
    s.runs_per_case = 30;
    s.comparison_minutes = {5.0, 10.0};

    const auto results = run_sweep(s, target, 555, 2);
    REQUIRE(results.size() == 3);
    CHECK(results.front().params[2] == Catch::Approx(0.2));
}

TEST_CASE("sweeps with the same seed are reproducible and thread-count independent") {
    AbmConfig base;
    base.n_compartments = 8;
    base.n_iterations = 200;
    base.source_time_produce = 4;
    SweepSpec s = singleton_spec(base);
    s.prob_left = {0.1, 0.3, 0.1};
    s.runs_per_case = 3;
    s.comparison_minutes = {2.0};

    const auto target = run_abm(base, 17);
    const auto a = run_sweep(s, target, 42, 1);
    const auto b = run_sweep(s, target, 42, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].case_id == b[i].case_id);
        CHECK(a[i].score == b[i].score);
    }
}

TEST_CASE("sweep validation rejects impossible grids") {
    SweepSpec s = singleton_spec(AbmConfig{});
    s.prob_right = {0.5, 0.7, 0.1};
    s.prob_left = {0.4, 0.4, 1.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = singleton_spec(AbmConfig{});
    s.comparison_minutes.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = singleton_spec(AbmConfig{});
    s.source_decay_rate = {0.5, 0.1, 0.1};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
