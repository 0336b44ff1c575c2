#include <cmath>
#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"
#include "trust_atlas/error.hpp"
#include "trust_atlas/io.hpp"

using namespace trust_atlas;
using namespace trust_atlas::io;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::NoData;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("load_preferences") {
    testing::TempDir dir;
    const auto p = dir.path() / "prefs.jsonl";

    write_file(p, "");
    CHECK(load_preferences(p).empty());

    write_file(p, R"({"participant": "p07", "preferred": "herding", "other": "cyclic_pursuit", "timestamp": 1699999999.0})"
                  "\n");
    auto one = load_preferences(p);
    REQUIRE(one.size() == 1);
    CHECK(one[0].participant == "p07");
    CHECK(one[0].preferred == "herding");
    CHECK(one[0].other == "cyclic_pursuit");
    CHECK(one[0].timestamp == 1699999999.0);

    write_file(p, R"({"participant": null, "preferred": "a", "other": "b"})"
                  "\n\n"
                  R"({"participant": null, "preferred": "a", "other": "a"})"
                  "\n");
    try {
        load_preferences(p);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }

    write_file(p, "{not json\n");
    CHECK(code_of([&] { load_preferences(p); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { load_preferences(dir.path() / "absent.jsonl"); }) == ErrorCode::MissingFile);
}

TEST_CASE("event log appends with increasing seq") {
    testing::TempDir dir;
    const auto log = event_log_path(dir.path() / "nested", "s1");
    CHECK(log.filename() == "s1.events.jsonl");
    CHECK(append_event(log, {99, EventKind::SessionCreated, json{{"participant", "p"}}, 1.0}) == 0);
    CHECK(append_event(log, {0, EventKind::PairShown, json{{"pair_id", "a|b"}}, 2.0}) == 1);
    CHECK(append_event(log, {0, EventKind::PreferenceRecorded, json{{"preferred", "a"}}, 3.0}) == 2);
    auto events = read_events(log);
    REQUIRE(events.size() == 3);
    CHECK(events[0].kind == EventKind::SessionCreated);
    CHECK(events[2].payload["preferred"] == "a");
    for (std::size_t i = 0; i < events.size(); ++i) CHECK(events[i].seq == i);
}

TEST_CASE("a torn final record is ignored and overwritten") {
    testing::TempDir dir;
    const auto log = dir.path() / "t.events.jsonl";
    append_event(log, {0, EventKind::SessionCreated, json::object(), 1.0});
    {
        std::ofstream out(log, std::ios::app);
        out << R"({"seq": 1, "kind": "PairSh)";
    }
    CHECK(read_events(log).size() == 1);
    CHECK(append_event(log, {0, EventKind::PairShown, json::object(), 2.0}) == 1);
    CHECK(read_events(log).size() == 2);
}

TEST_CASE("data_dir honours the environment") {
    ::setenv("TRUST_ATLAS_DATA", "/tmp/somewhere", 1);
    CHECK(data_dir() == fs::path("/tmp/somewhere"));
    ::unsetenv("TRUST_ATLAS_DATA");
    CHECK(data_dir() == fs::path("data"));
}

TEST_CASE("round trips") {
    testing::TempDir dir;
    oracle::Lcg rng(12);

    SUBCASE("trajectory") {
        auto t = swarm::simulate(swarm::default_spec(swarm::BehaviorKind::CyclicPursuit), 50, 0.05);
        t.frames[3][1].position.x = 0.1 + 0.2;  // not exactly representable in short decimal
        t.frames[4][0].heading = 1e-310;        // subnormal
        const auto p = dir.path() / "t.json";
        write_json(p, to_json(t));
        CHECK(trajectory_from_json(read_json(p)) == t);
    }
    SUBCASE("features") {
        FeatureFile f;
        f.q = 3;
        f.standardized = true;
        f.descriptor_names = {"x", "y", "z"};
        for (int i = 0; i < 4; ++i)
            f.features.push_back({"b" + std::to_string(i), {rng.uniform(-1, 1), rng.uniform(-1e6, 1e6), rng.uniform() * 1e-9}});
        const auto p = dir.path() / "f.json";
        write_json(p, to_json(f));
        auto g = features_from_json(read_json(p));
        CHECK(g.q == f.q);
        CHECK(g.standardized);
        CHECK(g.descriptor_names == f.descriptor_names);
        CHECK(g.features == f.features);

        json bad = to_json(f);
        bad["b0"] = json::array({1.0});
        CHECK(code_of([&] { features_from_json(bad); }) == ErrorCode::MismatchedDimensions);
    }
    SUBCASE("preferences") {
        std::vector<graph::Preference> prefs;
        for (int i = 0; i < 30; ++i) {
            graph::Preference p;
            if (i % 3) p.participant = "p" + std::to_string(i % 5) + "\"quoted\" \xc3\xa9";
            p.preferred = "b" + std::to_string(i % 4);
            p.other = "c" + std::to_string(i % 7);
            if (i % 2) p.timestamp = rng.uniform(0, 2e9);
            prefs.push_back(p);
        }
        const auto p = dir.path() / "p.jsonl";
        save_preferences(p, prefs);
        CHECK(load_preferences(p) == prefs);
    }
    SUBCASE("events") {
        const auto log = dir.path() / "e.events.jsonl";
        std::vector<EventRecord> written;
        for (int i = 0; i < 10; ++i) {
            EventRecord r{static_cast<std::uint64_t>(i), static_cast<EventKind>(i % 4), json{{"v", rng.uniform()}},
                          rng.uniform(0, 2e9)};
            append_event(log, r);
            written.push_back(r);
        }
        CHECK(read_events(log) == written);
    }
}

TEST_CASE("graph and result exports") {
    auto pop = graph::aggregate_population({{std::nullopt, "A", "B", {}},
                                            {std::nullopt, "A", "B", {}},
                                            {std::nullopt, "A", "B", {}},
                                            {std::nullopt, "B", "A", {}}});
    auto doc = to_json(pop);
    REQUIRE(doc["links"].size() == 1);
    CHECK(doc["links"][0]["source"] == "A");
    CHECK(doc["links"][0]["weight"].get<double>() == 0.75);
    CHECK(doc["links"][0]["count"] == 3);
    CHECK(doc["nodes"].size() == 2);

    geometry::PreferencePolytope poly;
    poly.dim = 1;
    poly.halfspaces.push_back({{1.0}, 1.0, {"A", "B"}});
    auto r = geometry::chebyshev_center(poly);
    auto pj = polytope_to_json(poly, r);
    CHECK(pj["status"] == "BoxBounded");
    CHECK(pj["halfspaces"][0]["source_pair"] == json::array({"A", "B"}));
    CHECK(pj["radius"].get<double>() == doctest::Approx(5.5));

    group::CohesionResult c;
    c.status = group::SolveStatus::Optimal;
    c.mean = {0.5};
    c.alpha = 0.5;
    auto cj = cohesion_to_json(c, {{1.0, 0.25}, {2.0, 1.0}});
    CHECK(cj["coverage"]["1"].get<double>() == 0.25);
    CHECK(cj["coverage"]["2"].get<double>() == 1.0);
}
