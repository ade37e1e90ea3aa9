#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "bicoid/config.hpp"
#include "bicoid/rng.hpp"

using namespace bicoid;

TEST_CASE("an abm-only document yields the standard starting conditions") {
    const auto cfg = parse_config("ENGINE=abm\n");
    REQUIRE(cfg.engine == EngineKind::Abm);
    CHECK(cfg.abm.source_decay_rate == 0.01);
    CHECK(cfg.abm.source_time_decay == 8640);
    CHECK(cfg.abm.source_time_produce == 50);
    CHECK(cfg.abm.source_production_prob == 1.0);
    CHECK(cfg.abm.protein_decay_rate == 0.01);
    CHECK(cfg.abm.compartment_dim_x == 5.0);
    CHECK(cfg.abm.compartment_dim_y == 15.0);
    CHECK(cfg.abm.prob_right == 0.5);
    CHECK(cfg.abm.prob_left == 0.1);
    CHECK(cfg.abm.die_threshold == 0.001);
    CHECK(cfg.abm.n_compartments == 100);
    CHECK(cfg.abm.n_iterations == 12000);
    cfg.validate();
}

TEST_CASE("movement probabilities summing past one are rejected") {
    CHECK_THROWS_WITH(parse_config("ENGINE=abm\nPROB_RIGHT=0.6\nPROB_LEFT=0.6\n"),
                      Catch::Matchers::ContainsSubstring("PROB_RIGHT") &&
                          Catch::Matchers::ContainsSubstring("PROB_LEFT"));
}

TEST_CASE("unknown, duplicate and malformed keys are named in errors") {
    CHECK_THROWS_WITH(parse_config("ENGINE=abm\nPROB_RIHGT=0.5\n"),
                      Catch::Matchers::ContainsSubstring("PROB_RIHGT"));
    CHECK_THROWS_WITH(parse_config("ENGINE=abm\nSEED=1\nSEED=2\n"),
                      Catch::Matchers::ContainsSubstring("duplicate key SEED"));
    CHECK_THROWS_WITH(parse_config("ENGINE=abm\nPROB_RIGHT=banana\n"),
                      Catch::Matchers::ContainsSubstring("PROB_RIGHT"));
    CHECK_THROWS_WITH(parse_config("ENGINE=submarine\n"), Catch::Matchers::ContainsSubstring("ENGINE"));
    CHECK_THROWS_AS(parse_config("just some words\n"), std::invalid_argument);
}

TEST_CASE("comments, blank lines and whitespace are tolerated") {
    const auto cfg = parse_config("# run setup\n\n  ENGINE = ssa\n\tSEED =  9\nS0=2.5\n");
    CHECK(cfg.engine == EngineKind::Ssa);
    CHECK(cfg.seed == std::uint64_t{9});
    CHECK(cfg.model.s0 == 2.5);
}

TEST_CASE("source time decay maps onto simulated minute 144") {
    const auto cfg = parse_config("ENGINE=abm\nSOURCE_TIME_DECAY=8640\n");
    CHECK(cfg.abm.source_time_decay == 8640);
    CHECK(static_cast<double>(cfg.abm.source_time_decay) / 60.0 == 144.0);
}

TEST_CASE("missing engine is an error on use") {
    const auto cfg = parse_config("SEED=4\n");
    CHECK_THROWS_WITH(cfg.validate(), Catch::Matchers::ContainsSubstring("ENGINE"));
}

TEST_CASE("snapshot minutes beyond the horizon are rejected") {
    auto cfg = parse_config("ENGINE=ssa\nFINAL_TIME=600\nSNAPSHOT_MINUTES=5,10\n");
    cfg.validate();
    cfg = parse_config("ENGINE=ssa\nFINAL_TIME=600\nSNAPSHOT_MINUTES=5,11\n");
    CHECK_THROWS_WITH(cfg.validate(), Catch::Matchers::ContainsSubstring("11"));

    // sweeps write no snapshot file, so a short horizon must not trip the check
    cfg = parse_config("ENGINE=sweep\nN_ITERATIONS=2000\nCOMPARISON_MINUTES=10,30\n");
    cfg.validate();
}

TEST_CASE("presets expand before explicit keys override") {
    const auto cfg = parse_config("ENGINE=abm\nPRESET=calibrated\n");
    CHECK(cfg.abm.source_decay_rate == 0.03);
    CHECK(cfg.abm.prob_right == 0.2);
    CHECK(cfg.abm.prob_left == 0.3);
    CHECK(cfg.abm.source_production_prob == 0.7);

    const auto overridden = parse_config("PRESET=calibrated\nENGINE=abm\nPROB_RIGHT=0.25\n");
    CHECK(overridden.abm.prob_right == 0.25);
    CHECK(overridden.abm.prob_left == 0.3);

    const auto sweep = parse_config("ENGINE=sweep\nSWEEP_PRESET=full\nTARGET=t.csv\n");
    CHECK(sweep.sweep.to_spec(sweep.abm).case_count() == 5625);
}

TEST_CASE("sweep ranges parse from low:high:step and single values") {
    const auto cfg = parse_config("ENGINE=sweep\nSWEEP_PROB_RIGHT=0.1:0.5:0.1\nSWEEP_PROB_LEFT=0.2\n"
                                  "RUNS_PER_CASE=5\nCOMPARISON_MINUTES=10,20\nCOMPARISON_COMPARTMENTS=1-3,7\n"
                                  "TARGET=target.csv\n");
    CHECK(cfg.sweep.prob_right.count() == 5);
    CHECK(cfg.sweep.prob_left.count() == 1);
    CHECK(cfg.sweep.runs_per_case == 5);
    CHECK(cfg.sweep.comparison_minutes == std::vector<double>{10.0, 20.0});
    CHECK(cfg.sweep.compartments == std::vector<int>{0, 1, 2, 6});
    CHECK(cfg.sweep.target_path == "target.csv");
}

TEST_CASE("render and parse round-trip exactly") {
    SECTION("handcrafted config") {
        RunConfig cfg;
        cfg.engine = EngineKind::Sweep;
        cfg.seed = 0xDEADBEEFull;
        cfg.n_runs = 20;
        cfg.threads = 3;
        cfg.final_time = 4321.5;
        cfg.sample_interval = 2.25;
        cfg.snapshot_minutes = {1.5, 20.0};
        cfg.out_dir = "results/run1";
        cfg.model.s0 = 1.0 / 3.0;
        cfg.model.tau_m = 123.456789;
        cfg.source_mode = SourceMode::Literal;
        cfg.ode_dt = 0.05;
        cfg.abm.prob_right = 0.125;
        cfg.abm.prob_left = 0.375;
        cfg.abm.produce_semantics = ProduceSemantics::InitialDelay;
        cfg.sweep.prob_right = {0.1, 0.4, 0.15};
        cfg.sweep.compartments = {0, 1, 2, 9};
        cfg.sweep.target_path = "t.csv";
        const auto back = parse_config(render_config(cfg));
        CHECK(back == cfg);
    }

    SECTION("randomized configs") {
        Rng rng(2718);
        for (int rep = 0; rep < 50; ++rep) {
            RunConfig cfg;
            cfg.engine = EngineKind::Abm;
            cfg.seed = rng();
            cfg.n_runs = 1 + static_cast<int>(rng() % 40);
            cfg.model.s0 = uniform_open(rng) * 20.0;
            cfg.model.tau_p = uniform_open(rng) * 9000.0 + 1.0;
            cfg.abm.source_decay_rate = uniform_open(rng);
            cfg.abm.prob_right = uniform_open(rng) * 0.5;
            cfg.abm.prob_left = uniform_open(rng) * 0.5;
            cfg.abm.die_threshold = uniform_open(rng) * 0.9 + 1e-6;
            cfg.snapshot_minutes = {uniform_open(rng) * 100.0, 150.0};
            const auto back = parse_config(render_config(cfg));
            CHECK(back == cfg);
        }
    }
}
