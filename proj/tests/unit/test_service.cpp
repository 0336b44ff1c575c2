#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "doctest.h"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"
#include "trust_atlas/error.hpp"
#include "trust_atlas/http_server.hpp"
#include "trust_atlas/service.hpp"

using namespace trust_atlas;
using namespace trust_atlas::service;
using io::json;

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

Catalog line_catalog() {
    Catalog c;
    c.features = {{"A", {0.0}}, {"B", {2.0}}, {"C", {10.0}}};
    return c;
}

Catalog plane_catalog(int n, std::uint64_t seed) {
    oracle::Lcg rng(seed);
    Catalog c;
    for (int i = 0; i < n; ++i) c.features["b" + std::to_string(i)] = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
    return c;
}

ServiceOptions options(Catalog c) {
    ServiceOptions o;
    o.catalog = std::move(c);
    double t = 0.0;
    o.clock = [t]() mutable { return t += 1.0; };
    return o;
}

// Answers every pair the service offers with the deterministic answerer.
void answer_all(Service& svc, const std::string& id, const geometry::Vector& optimum, int limit = 1 << 30) {
    Xorshift64Star rng(1);
    const auto& f = svc.catalog().features;
    for (int i = 0; i < limit; ++i) {
        auto next = svc.next_pair(id);
        if (next.complete) return;
        auto p = simulate_participant(optimum, 0.0, rng, next.first, f.at(next.first), next.second, f.at(next.second));
        svc.record_preference(id, next.pair_id, p.preferred);
    }
}

}  // namespace

TEST_CASE("create_session") {
    Service svc(options(plane_catalog(5, 1)));
    auto id = svc.create_session("p1");
    CHECK(svc.snapshot(id).total_pairs() == 10);
    auto two = svc.create_session("p2", {"b0", "b3"});
    CHECK(svc.snapshot(two).total_pairs() == 1);
    CHECK(id != two);
    CHECK(code_of([&] { svc.create_session("p3", {"b0", "nope"}); }) == ErrorCode::UnknownBehavior);
    CHECK(code_of([&] { svc.create_session("p3", {"b0", "b0"}); }) == ErrorCode::InvalidSpec);
    CHECK(code_of([&] { svc.next_pair("missing"); }) == ErrorCode::UnknownSession);
}

TEST_CASE("next_pair order") {
    Service svc(options(line_catalog()));
    auto id = svc.create_session("p");
    auto first = svc.next_pair(id);
    CHECK(first.pair_id == "A|B");
    CHECK(svc.next_pair(id).pair_id == "A|B");  // unanswered pair is offered again

    svc.record_preference(id, "A|B", "A");
    const auto s = svc.snapshot(id);
    const auto center = geometry::chebyshev_center(s.polytope);
    CHECK(center.center[0] == doctest::Approx(-4.5));
    // Bisectors sit at 5 (A,C) and 6 (B,C); the first is nearer the center.
    CHECK(std::abs(5.0 - center.center[0]) < std::abs(6.0 - center.center[0]));
    CHECK(svc.next_pair(id).pair_id == "A|C");
    svc.record_preference(id, "A|C", "A");
    CHECK(svc.next_pair(id).pair_id == "B|C");
    svc.record_preference(id, "B|C", "B");
    CHECK(svc.next_pair(id).complete);
    CHECK(svc.snapshot(id).complete());
}

TEST_CASE("fixed order and random modes") {
    Service svc(options(plane_catalog(4, 2)));
    auto fixed = svc.create_session("p", {}, SelectionMode::FixedOrder);
    std::vector<std::string> order;
    for (;;) {
        auto n = svc.next_pair(fixed);
        if (n.complete) break;
        order.push_back(n.pair_id);
        svc.record_preference(fixed, n.pair_id, n.second);
    }
    CHECK(order == std::vector<std::string>{"b0|b1", "b0|b2", "b0|b3", "b1|b2", "b1|b3", "b2|b3"});

    auto r1 = svc.create_session("p", {}, SelectionMode::Random, 5);
    auto r2 = svc.create_session("q", {}, SelectionMode::Random, 5);
    for (int i = 0; i < 6; ++i) {
        auto a = svc.next_pair(r1);
        auto b = svc.next_pair(r2);
        CHECK(a.pair_id == b.pair_id);
        svc.record_preference(r1, a.pair_id, a.first);
        svc.record_preference(r2, b.pair_id, b.first);
    }
    CHECK(svc.next_pair(r1).complete);
}

TEST_CASE("record_preference") {
    Service svc(options(line_catalog()));
    auto id = svc.create_session("p");
    CHECK(code_of([&] { svc.record_preference(id, "A|B", "A"); }) == ErrorCode::UnknownPair);
    svc.next_pair(id);
    CHECK(code_of([&] { svc.record_preference(id, "A|C", "A"); }) == ErrorCode::UnknownPair);
    CHECK(code_of([&] { svc.record_preference(id, "B|A", "A"); }) == ErrorCode::UnknownPair);
    CHECK(code_of([&] { svc.record_preference(id, "garbage", "A"); }) == ErrorCode::UnknownPair);
    CHECK(code_of([&] { svc.record_preference(id, "A|B", "C"); }) == ErrorCode::NotAMember);

    CHECK(svc.record_preference(id, "A|B", "B"));
    const auto after = svc.snapshot(id).to_json();
    CHECK(svc.snapshot(id).polytope.halfspaces.size() == 1);
    CHECK_FALSE(svc.record_preference(id, "A|B", "B"));
    CHECK(svc.snapshot(id).to_json() == after);
    CHECK(code_of([&] { svc.record_preference(id, "A|B", "A"); }) == ErrorCode::AlreadyAnswered);
}

TEST_CASE("next_pair is a pure function of state") {
    oracle::Lcg rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        Service svc(options(plane_catalog(6, 100 + trial)));
        auto id = svc.create_session("p");
        answer_all(svc, id, {rng.uniform(-2, 2), rng.uniform(-2, 2)}, 1 + trial % 7);
        const auto s = svc.snapshot(id);
        const SessionState copy = s;
        CHECK(choose_next_pair(s) == choose_next_pair(copy));
    }
}

TEST_CASE("session_report") {
    Service svc(options(default_catalog(200)));
    auto id = svc.create_session("p");
    auto r = svc.session_report(id);
    CHECK(r["answered"] == 0);
    CHECK(r["remaining"] == 10);
    CHECK(r["acyclic"] == true);
    CHECK(r["chebyshev"]["status"] == "BoxBounded");
    for (const auto& c : r["chebyshev"]["center"]) CHECK(std::abs(c.get<double>()) <= 1e-9);
    CHECK(r["chebyshev"]["center"].size() == embedding::kDescriptorCount);

    answer_all(svc, id, geometry::Vector(embedding::kDescriptorCount, 0.3));
    r = svc.session_report(id);
    CHECK(r["answered"] == 10);
    CHECK(r["remaining"] == 0);
    CHECK(r["complete"] == true);
    CHECK(r["acyclic"] == true);
    CHECK(r["consistent"] == true);
}

TEST_CASE("contradictory answers injected into a log are flagged") {
    testing::TempDir dir;
    const auto log = io::event_log_path(dir.path(), "s000000");
    SessionState s = new_session("s000000", "p", {"A", "B", "C"}, line_catalog(), SelectionMode::Active, 0);
    io::append_event(log, {0, io::EventKind::SessionCreated, session_created_payload(s), 1.0});
    io::append_event(log, {0, io::EventKind::PairShown, pair_shown_payload({"A", "B"}), 2.0});
    io::append_event(log, {0, io::EventKind::PreferenceRecorded, preference_payload(s, {"A", "B"}, "A"), 3.0});
    io::append_event(log, {0, io::EventKind::PreferenceRecorded, preference_payload(s, {"A", "B"}, "B"), 4.0});

    auto o = options(line_catalog());
    o.data_dir = dir.path();
    Service svc(o);
    auto r = svc.session_report("s000000");
    CHECK(r["consistent"] == false);
    CHECK(r["acyclic"] == false);
    // The next session id continues after the replayed one.
    CHECK(svc.create_session("q") == "s000001");
}

TEST_CASE("replay reproduces live state") {
    testing::TempDir dir;
    auto o = options(plane_catalog(7, 9));
    o.data_dir = dir.path();
    std::string id;
    json live_state;
    json live_report;
    {
        Service svc(o);
        id = svc.create_session("p");
        answer_all(svc, id, {0.4, -1.1}, 10);
        svc.next_pair(id);  // shown, unanswered
        live_state = svc.snapshot(id).to_json();
        live_report = service::session_report(svc.snapshot(id));
    }
    const auto replayed = replay(io::read_events(io::event_log_path(dir.path(), id)));
    CHECK(replayed.to_json().dump() == live_state.dump());

    Service restarted(o);
    CHECK(restarted.snapshot(id).to_json().dump() == live_state.dump());
    CHECK(restarted.session_report(id).dump() == live_report.dump());
}

TEST_CASE("simulate_participant") {
    Xorshift64Star rng(3);
    auto p = simulate_participant({0, 0}, 0.0, rng, "A", {1, 0}, "B", {3, 0});
    CHECK(p.preferred == "A");
    CHECK(p.other == "B");
    auto tie = simulate_participant({0, 0}, 0.0, rng, "Z", {0, 2}, "M", {2, 0});
    CHECK(tie.preferred == "M");
    auto tie2 = simulate_participant({0, 0}, 0.0, rng, "M", {0, 2}, "Z", {2, 0});
    CHECK(tie2.preferred == "M");

    // Pair at -1 vs +3 has its bisector at 1; the far option wins when the
    // perturbed optimum lands past it.
    int flips = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i)
        if (simulate_participant({0.0}, 1.0, rng, "A", {-1.0}, "B", {3.0}).preferred == "B") ++flips;
    const double expected = 1.0 - oracle::phi_series(1.0);
    CHECK(std::abs(static_cast<double>(flips) / draws - expected) <= 0.03);
}

TEST_CASE("population_report") {
    SUBCASE("no sessions") {
        Service svc(options(line_catalog()));
        CHECK(code_of([&] { svc.population_report(); }) == ErrorCode::NoData);
    }
    SUBCASE("one session") {
        Service svc(options(plane_catalog(5, 3)));
        auto id = svc.create_session("p");
        answer_all(svc, id, {1.0, 0.5});
        auto r = svc.population_report();
        CHECK(r["distinctiveness"]["objective"].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(r["individuals"].size() == 1);
        CHECK(r["aggregate_chebyshev"]["status"] != "Empty");
    }
    SUBCASE("two identical participants") {
        auto o = options(plane_catalog(6, 4));
        o.z_score = 0.0;
        Service svc(o);
        for (auto name : {"p", "q"}) answer_all(svc, svc.create_session(name), {0.2, -0.7});
        auto r = svc.population_report();
        CHECK(std::abs(r["distinctiveness"]["objective"].get<double>()) <= 1e-9);
        CHECK(r["cohesion"]["status"] == "Optimal");
        // p = 1 clamps to a one-sided slab: a.x <= b is hard on every edge, and
        // alpha only measures how far the mean sits from the bisectors.
        CHECK(r["cohesion"]["alpha"].get<double>() > 0.0);
        const auto mean = r["cohesion"]["mean"].get<geometry::Vector>();
        const auto& f = svc.catalog().features;
        for (const auto& link : r["population_graph"]["links"]) {
            CHECK(link["weight"].get<double>() == 1.0);
            const auto h = geometry::halfspace_from_pair(f.at(link["source"]), f.at(link["target"]));
            CHECK(h.eval(mean) <= 1e-9);
        }
    }
    SUBCASE("planted clusters") {
        Service svc(options(plane_catalog(8, 5)));
        oracle::Lcg rng(6);
        std::map<std::string, bool> planted;
        for (int k = 0; k < 12; ++k) {
            const bool right = k % 3 == 0;
            const geometry::Vector opt{right ? 2.5 : -1.0, right ? 2.0 : -1.0};
            auto id = svc.create_session("p" + std::to_string(k));
            answer_all(svc, id, {opt[0] + 0.05 * rng.uniform(-1, 1), opt[1] + 0.05 * rng.uniform(-1, 1)});
            planted[id] = right;
        }
        auto r = svc.population_report();
        CHECK(r["coverage"].contains("2"));
        // The majority cluster absorbs the reference, so only the planted
        // minority should need a large perturbation.
        std::vector<double> minority, majority;
        for (const auto& [id, right] : planted)
            (right ? minority : majority).push_back(r["distinctiveness"]["norms_l1"][id].get<double>());
        CHECK(*std::min_element(minority.begin(), minority.end()) >
              *std::max_element(majority.begin(), majority.end()));
    }
}

TEST_CASE("independent sessions run concurrently") {
    testing::TempDir dir;
    auto o = options(plane_catalog(6, 8));
    o.data_dir = dir.path();
    o.clock = [] { return 0.0; };
    Service svc(o);
    std::vector<std::string> ids;
    for (int i = 0; i < 8; ++i) ids.push_back(svc.create_session("p" + std::to_string(i)));
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i)
        threads.emplace_back([&, i] { answer_all(svc, ids[i], {0.1 * i, -0.1 * i}); });
    for (auto& t : threads) t.join();
    for (const auto& id : ids) {
        CHECK(svc.snapshot(id).complete());
        CHECK(replay(io::read_events(io::event_log_path(dir.path(), id))).to_json() == svc.snapshot(id).to_json());
    }
    CHECK_NOTHROW(svc.population_report());
}

TEST_CASE("http api") {
    Catalog c = line_catalog();
    c.trajectories["A"] = swarm::simulate(swarm::default_spec(swarm::BehaviorKind::Herding), 5, 0.05);
    Service svc(options(c));
    HttpServer server(svc);
    const int port = server.bind_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread serving([&] { server.serve(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);

    auto res = client.Get("/v1/population/report");
    REQUIRE(res);
    CHECK(res->status == 404);

    res = client.Post("/v1/sessions", R"({"participant": "p1"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 201);
    const std::string id = json::parse(res->body)["session_id"];

    res = client.Get("/v1/sessions/" + id + "/next-pair");
    REQUIRE(res);
    CHECK(res->status == 200);
    auto pair = json::parse(res->body);
    CHECK(pair["pair_id"] == "A|B");
    CHECK(pair["first"] == "A");
    CHECK(pair["trajectories"][0] == "/v1/behaviors/A/trajectory");

    const std::string prefs = "/v1/sessions/" + id + "/preferences";
    res = client.Post(prefs, R"({"pair_id": "A|B", "preferred": "A"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 204);
    res = client.Post(prefs, R"({"pair_id": "A|B", "preferred": "A"})", "application/json");
    CHECK(res->status == 204);
    res = client.Post(prefs, R"({"pair_id": "A|B", "preferred": "B"})", "application/json");
    CHECK(res->status == 409);
    CHECK(json::parse(res->body)["code"] == "AlreadyAnswered");
    res = client.Post(prefs, R"({"pair_id": "B|C", "preferred": "B"})", "application/json");
    CHECK(res->status == 404);
    CHECK(json::parse(res->body)["code"] == "UnknownPair");
    res = client.Post(prefs, "{not json", "application/json");
    CHECK(res->status == 400);
    res = client.Post(prefs, R"({"pair_id": 3})", "application/json");
    CHECK(res->status == 400);
    res = client.Post("/v1/sessions", R"({"participant": "p", "behavior_set": ["A", "Q"]})", "application/json");
    CHECK(res->status == 400);
    CHECK(json::parse(res->body)["code"] == "UnknownBehavior");

    res = client.Get("/v1/sessions/nope/next-pair");
    CHECK(res->status == 404);
    CHECK(json::parse(res->body)["code"] == "UnknownSession");

    res = client.Get("/v1/sessions/" + id + "/report");
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["answered"] == 1);

    res = client.Get("/v1/population/report");
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["sessions"] == 1);

    res = client.Get("/v1/behaviors");
    CHECK(json::parse(res->body) == json::array({"A", "B", "C"}));
    res = client.Get("/v1/behaviors/A/trajectory");
    CHECK(res->status == 200);
    CHECK(io::trajectory_from_json(json::parse(res->body)) == c.trajectories["A"]);
    res = client.Get("/v1/behaviors/B/trajectory");
    CHECK(res->status == 404);

    for (int i = 0; i < 5; ++i) {
        res = client.Get("/v1/sessions/" + id + "/next-pair");
        auto body = json::parse(res->body);
        if (body.contains("complete")) {
            CHECK(body["complete"] == true);
            break;
        }
        client.Post(prefs, json{{"pair_id", body["pair_id"]}, {"preferred", body["first"]}}.dump(), "application/json");
    }
    CHECK(svc.snapshot(id).complete());

    server.stop();
    serving.join();
}
