#include <doctest.h>

#include <set>
#include <string>
#include <utility>

#include <voiplan/errors.hpp>
#include <voiplan/experiments.hpp>
#include <voiplan/scenario.hpp>

using namespace voiplan;

TEST_SUITE("scenario") {

TEST_CASE("defaults validate and match the reference constants") {
    Scenario s = case_study_scenario();
    CHECK(s.radio.ref_gain_db == -50.0);
    CHECK(s.radio.bandwidth_hz == 2e6);
    CHECK(s.radio.noise_psd_dbm_hz == -110.0);
    CHECK(s.radio.success_distance == 1.0);
    CHECK(s.step_length == 1);
    CHECK(s.radio.ref_gain() == doctest::Approx(1e-5).epsilon(1e-14));
    CHECK(s.radio.noise_psd() == doctest::Approx(1e-14).epsilon(1e-14));

    LearnerConfig c;
    CHECK(c.learning_rate == 0.75);
    CHECK(c.discount == 0.9);
    CHECK(c.penalty == 100.0);
    c.validate();
}

TEST_CASE("desk_config rescales the exploration schedule") {
    const LearnerConfig c = desk_config(200000, 11);
    CHECK(c.episodes == 200000);
    CHECK(c.epsilon_decrement == 1.0 / 200000);
    CHECK(c.rng_seed == 11);
    // epsilon reaches zero exactly on the final episode
    CHECK(c.epsilon_init - static_cast<double>(c.episodes) * c.epsilon_decrement <= 1e-12);
}

TEST_CASE("generate_random produces a valid, distinct layout") {
    const Scenario s = generate_random(4, 5, 0.5, 0.5, 7);
    s.validate();
    CHECK(s.node_count() == 4);
    CHECK(s.grid_extent == 5);
    std::set<std::pair<int, int>> positions;
    for (const auto& n : s.nodes) {
        CHECK(s.contains(n.position));
        CHECK(n.correlation > 0.0);
        CHECK(n.correlation < 1.0);
        positions.insert({n.position.x, n.position.y});
    }
    CHECK(positions.size() == 4); // all distinct
    CHECK(s.contains(s.entity_start));
}

TEST_CASE("generate_random is a pure function of its arguments") {
    const Scenario a = generate_random(4, 5, 0.5, 0.5, 7);
    const Scenario b = generate_random(4, 5, 0.5, 0.5, 7);
    CHECK(a == b);
    const Scenario c = generate_random(4, 5, 0.5, 0.5, 8);
    CHECK(a != c);
}

TEST_CASE("generate_random placement limits") {
    // a single lattice point fits one node (the entity may share it)
    const Scenario one = generate_random(1, 0, 0.5, 0.0, 3);
    one.validate();
    CHECK(one.nodes[0].position == GridPoint{0, 0});
    CHECK(one.entity_start == GridPoint{0, 0});
    // but not two
    CHECK_THROWS_AS(generate_random(2, 0, 0.5, 0.0, 3), contract_error);
}

TEST_CASE("generate_random rejects an empty correlation interval") {
    CHECK_THROWS_AS(generate_random(2, 5, 2.0, 0.5, 1), contract_error);
    CHECK_THROWS_AS(generate_random(2, 5, -1.0, 0.5, 1), contract_error);
    CHECK_THROWS_AS(generate_random(2, 5, 1.0, 0.0, 1), contract_error);
}

TEST_CASE("generate_random with zero halfwidth pins the correlation") {
    const Scenario s = generate_random(3, 5, 0.42, 0.0, 9);
    for (const auto& n : s.nodes) CHECK(n.correlation == 0.42);
}

TEST_CASE("save/load round-trips field-for-field") {
    const Scenario s = case_study_scenario();
    const LearnerConfig c = desk_config(200000, 17);
    const auto [s2, c2] = load(save(s, c));
    CHECK(s2 == s);
    CHECK(c2 == c);
}

TEST_CASE("save/load round-trips random scenarios exactly") {
    for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
        Scenario s = generate_random(5, 6, 0.5, 0.49, seed);
        s.horizon = 17;
        LearnerConfig c;
        c.learning_rate = 0.3125;
        c.epsilon_decrement = 7.25e-6;
        c.rng_seed = seed;
        const auto [s2, c2] = load(save(s, c));
        CHECK(s2 == s);
        CHECK(c2 == c);
    }
}

TEST_CASE("load reports invariant violations by field name") {
    const std::string doc = save(case_study_scenario(), LearnerConfig{});

    SUBCASE("empty node list") {
        std::string broken = doc;
        const auto pos = broken.find("\"nodes\"");
        REQUIRE(pos != std::string::npos);
        const auto open = broken.find('[', pos);
        const auto close = broken.find("]", open);
        // splice the node array out
        broken = broken.substr(0, open + 1) + broken.substr(close);
        // tx_power must shrink too or it trips its own invariant first
        try {
            load(broken);
            FAIL("expected an error");
        } catch (const invariant_error& e) {
            CHECK(std::string(e.field()).find("nodes") != std::string::npos);
        }
    }

    SUBCASE("correlation on the boundary") {
        std::string broken = doc;
        const auto pos = broken.find("\"rho\": 0.7");
        REQUIRE(pos != std::string::npos);
        broken.replace(pos, 10, "\"rho\": 1.0");
        try {
            load(broken);
            FAIL("expected an error");
        } catch (const invariant_error& e) {
            CHECK(std::string(e.field()) == "nodes[0].rho");
        }
    }
}

TEST_CASE("load reports schema violations with a path") {
    CHECK_THROWS_AS(load("not json at all"), schema_error);
    CHECK_THROWS_AS(load("[1,2,3]"), schema_error);
    try {
        load("{\"grid_extent\": 5}");
        FAIL("expected an error");
    } catch (const schema_error& e) {
        CHECK(std::string(e.path()).find("nodes") != std::string::npos);
    }
}

TEST_CASE("load accepts a scalar tx_power and broadcasts it") {
    std::string doc = save(case_study_scenario(), LearnerConfig{});
    const auto pos = doc.find("\"tx_power\"");
    REQUIRE(pos != std::string::npos);
    const auto open = doc.find('[', pos);
    const auto close = doc.find(']', open);
    doc = doc.substr(0, open) + "2.5" + doc.substr(close + 1);
    const auto [s, c] = load(doc);
    REQUIRE(s.radio.tx_power_watts.size() == 3);
    for (double p : s.radio.tx_power_watts) CHECK(p == 2.5);
}

TEST_CASE("fingerprint keys the world, not the solver settings") {
    const Scenario a = case_study_scenario();
    Scenario b = a;
    CHECK(scenario_fingerprint(a) == scenario_fingerprint(b));
    b.nodes[0].correlation = 0.71;
    CHECK(scenario_fingerprint(a) != scenario_fingerprint(b));
    Scenario c = a;
    c.horizon = 9;
    CHECK(scenario_fingerprint(a) != scenario_fingerprint(c));
}

TEST_CASE("validate flags out-of-range fields") {
    Scenario s = case_study_scenario();
    s.entity_start = {9, 9};
    CHECK_THROWS_AS(s.validate(), invariant_error);

    Scenario h = case_study_scenario();
    h.horizon = 0;
    CHECK_THROWS_AS(h.validate(), invariant_error);

    Scenario n = case_study_scenario();
    n.nodes.clear();
    n.radio.tx_power_watts.clear();
    CHECK_THROWS_AS(n.validate(), invariant_error);

    LearnerConfig c;
    c.learning_rate = 0.0;
    CHECK_THROWS_AS(c.validate(), invariant_error);
    c = LearnerConfig{};
    c.discount = 1.5;
    CHECK_THROWS_AS(c.validate(), invariant_error);
    c = LearnerConfig{};
    c.penalty = -1.0;
    CHECK_THROWS_AS(c.validate(), invariant_error);
}

} // TEST_SUITE
