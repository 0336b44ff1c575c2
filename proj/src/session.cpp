#include "trust_atlas/session.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "trust_atlas/embedding.hpp"
#include "trust_atlas/error.hpp"

namespace trust_atlas::service {

std::vector<BehaviorId> Catalog::behaviors() const {
    std::vector<BehaviorId> out;
    for (const auto& [id, _] : features) out.push_back(id);
    return out;
}

Catalog default_catalog(int steps, double dt) {
    Catalog c;
    std::vector<embedding::FeatureVector> raw;
    for (auto k : swarm::all_behaviors()) {
        auto t = swarm::simulate(swarm::default_spec(k), steps, dt);
        raw.push_back(embedding::extract_features(t));
        c.trajectories[t.behavior_id] = std::move(t);
    }
    for (auto& f : embedding::standardize(raw)) c.features[f.behavior_id] = std::move(f.values);
    return c;
}

const char* to_string(SelectionMode m) {
    switch (m) {
        case SelectionMode::Active: return "active";
        case SelectionMode::FixedOrder: return "fixed";
        case SelectionMode::Random: return "random";
    }
    return "?";
}

SelectionMode parse_selection_mode(const std::string& s) {
    for (auto m : {SelectionMode::Active, SelectionMode::FixedOrder, SelectionMode::Random})
        if (s == to_string(m)) return m;
    throw Error(ErrorCode::ParseError, "unknown selection mode '" + s + "'");
}

std::string pair_id(const BehaviorId& a, const BehaviorId& b) { return a < b ? a + "|" + b : b + "|" + a; }

Edge parse_pair_id(const std::string& id) {
    const auto bar = id.find('|');
    if (bar == std::string::npos || bar == 0 || bar + 1 == id.size() || id.find('|', bar + 1) != std::string::npos)
        throw Error(ErrorCode::UnknownPair, "malformed pair id '" + id + "'");
    return {id.substr(0, bar), id.substr(bar + 1)};
}

std::vector<Edge> canonical_pairs(const std::vector<BehaviorId>& behaviors) {
    std::vector<BehaviorId> sorted = behaviors;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Edge> out;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        for (std::size_t j = i + 1; j < sorted.size(); ++j) out.emplace_back(sorted[i], sorted[j]);
    return out;
}

std::size_t SessionState::total_pairs() const {
    const std::size_t n = behavior_set.size();
    return n * (n - 1) / 2;
}

std::optional<Edge> SessionState::pending() const {
    for (const auto& e : shown)
        if (!answers.count(pair_id(e.first, e.second))) return e;
    return std::nullopt;
}

io::json SessionState::to_json() const {
    io::json shown_j = io::json::array();
    for (const auto& e : shown) shown_j.push_back(io::json::array({e.first, e.second}));
    io::json rec = io::json::array();
    for (const auto& p : recorded) rec.push_back(io::to_json(p));
    io::json ans = io::json::object();
    for (const auto& [k, v] : answers) ans[k] = v;
    io::json feats = io::json::object();
    for (const auto& [k, v] : features) feats[k] = v;
    io::json hs = io::json::array();
    for (const auto& h : polytope.halfspaces) hs.push_back(io::to_json(h));
    return io::json{{"session_id", session_id},
                    {"participant", participant},
                    {"behavior_set", behavior_set},
                    {"features", std::move(feats)},
                    {"box_bound", box_bound},
                    {"mode", to_string(mode)},
                    {"seed", seed},
                    {"shown", std::move(shown_j)},
                    {"recorded", std::move(rec)},
                    {"answers", std::move(ans)},
                    {"halfspaces", std::move(hs)},
                    {"complete", complete()}};
}

SessionState new_session(std::string session_id, std::string participant, std::vector<BehaviorId> behavior_set,
                         const Catalog& catalog, SelectionMode mode, std::uint64_t seed) {
    std::sort(behavior_set.begin(), behavior_set.end());
    behavior_set.erase(std::unique(behavior_set.begin(), behavior_set.end()), behavior_set.end());
    if (behavior_set.size() < 2) throw Error(ErrorCode::InvalidSpec, "a session needs at least two behaviors");
    SessionState s;
    s.session_id = std::move(session_id);
    s.participant = std::move(participant);
    s.box_bound = catalog.box_bound;
    s.mode = mode;
    s.seed = seed;
    for (const auto& b : behavior_set) {
        auto it = catalog.features.find(b);
        if (it == catalog.features.end()) throw Error(ErrorCode::UnknownBehavior, "no features for behavior '" + b + "'");
        s.features[b] = it->second;
    }
    for (const auto& [a, b] : canonical_pairs(behavior_set))
        geometry::halfspace_from_pair(s.features[a], s.features[b]);  // rejects coincident features up front
    s.behavior_set = std::move(behavior_set);
    s.polytope.dim = s.features.begin()->second.size();
    s.polytope.box_bound = s.box_bound;
    return s;
}

std::optional<Edge> choose_next_pair(const SessionState& s) {
    if (auto p = s.pending()) return p;
    std::set<Edge> seen(s.shown.begin(), s.shown.end());
    std::vector<Edge> unseen;
    for (auto& e : canonical_pairs(s.behavior_set))
        if (!seen.count(e)) unseen.push_back(std::move(e));
    if (unseen.empty()) return std::nullopt;

    switch (s.mode) {
        case SelectionMode::FixedOrder:
            return unseen.front();
        case SelectionMode::Random: {
            Xorshift64Star rng(splitmix64(s.seed) ^ s.shown.size());
            return unseen[rng.below(unseen.size())];
        }
        case SelectionMode::Active:
            break;
    }
    if (s.recorded.empty()) return unseen.front();
    const auto center = geometry::chebyshev_center(s.polytope);
    if (center.empty()) return unseen.front();

    // Cut nearest the in-center; strict comparison keeps the first
    // (lexicographically smallest) pair on ties.
    std::optional<Edge> best;
    double best_distance = std::numeric_limits<double>::infinity();
    for (const auto& e : unseen) {
        const auto h = geometry::halfspace_from_pair(s.features.at(e.first), s.features.at(e.second));
        const double d = std::abs(h.eval(center.center));
        if (!best || d < best_distance) {
            best = e;
            best_distance = d;
        }
    }
    return best;
}

io::json session_created_payload(const SessionState& s) {
    io::json feats = io::json::object();
    for (const auto& [k, v] : s.features) feats[k] = v;
    return io::json{{"session_id", s.session_id},
                    {"participant", s.participant},
                    {"behavior_set", s.behavior_set},
                    {"features", std::move(feats)},
                    {"box_bound", s.box_bound},
                    {"mode", to_string(s.mode)},
                    {"seed", s.seed}};
}

io::json pair_shown_payload(const Edge& pair) {
    return io::json{{"pair_id", pair_id(pair.first, pair.second)}, {"first", pair.first}, {"second", pair.second}};
}

io::json preference_payload(const SessionState& s, const Edge& pair, const BehaviorId& preferred) {
    const BehaviorId& other = preferred == pair.first ? pair.second : pair.first;
    return io::json{{"pair_id", pair_id(pair.first, pair.second)},
                    {"participant", s.participant},
                    {"preferred", preferred},
                    {"other", other}};
}

void apply_event(SessionState& s, const io::EventRecord& e) {
    const auto& p = e.payload;
    switch (e.kind) {
        case io::EventKind::SessionCreated: {
            s = SessionState{};
            s.session_id = p.at("session_id").get<std::string>();
            s.participant = p.at("participant").get<std::string>();
            s.behavior_set = p.at("behavior_set").get<std::vector<std::string>>();
            for (auto it = p.at("features").begin(); it != p.at("features").end(); ++it)
                s.features[it.key()] = it.value().get<geometry::Vector>();
            s.box_bound = p.at("box_bound").get<double>();
            s.mode = parse_selection_mode(p.at("mode").get<std::string>());
            s.seed = p.at("seed").get<std::uint64_t>();
            s.polytope.dim = s.features.empty() ? 0 : s.features.begin()->second.size();
            s.polytope.box_bound = s.box_bound;
            break;
        }
        case io::EventKind::PairShown: {
            Edge pair{p.at("first").get<std::string>(), p.at("second").get<std::string>()};
            if (std::find(s.shown.begin(), s.shown.end(), pair) == s.shown.end()) s.shown.push_back(std::move(pair));
            break;
        }
        case io::EventKind::PreferenceRecorded: {
            graph::Preference pref{p.at("participant").get<std::string>(), p.at("preferred").get<std::string>(),
                                   p.at("other").get<std::string>(), e.wall_time};
            s.answers[p.at("pair_id").get<std::string>()] = pref.preferred;
            s.polytope = geometry::add_preference(
                s.polytope, geometry::halfspace_from_pair(s.features.at(pref.preferred), s.features.at(pref.other),
                                                          {pref.preferred, pref.other}));
            s.recorded.push_back(std::move(pref));
            break;
        }
        case io::EventKind::AnalysisRun:
            break;
    }
}

SessionState replay(const std::vector<io::EventRecord>& events) {
    if (events.empty() || events.front().kind != io::EventKind::SessionCreated)
        throw Error(ErrorCode::ParseError, "event log does not start with SessionCreated");
    SessionState s;
    try {
        for (const auto& e : events) apply_event(s, e);
    } catch (const io::json::exception& ex) {
        throw Error(ErrorCode::ParseError, std::string("malformed event payload: ") + ex.what());
    }
    return s;
}

io::json session_report(const SessionState& s) {
    bool consistent = true;
    bool acyclic = true;
    try {
        acyclic = graph::is_acyclic(graph::build_individual_graph(s.recorded)).acyclic;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ContradictoryPair) throw;
        consistent = false;
        acyclic = false;
    }
    const auto center = geometry::chebyshev_center(s.polytope);
    return io::json{{"session_id", s.session_id},
                    {"participant", s.participant},
                    {"acyclic", acyclic},
                    {"consistent", consistent},
                    {"chebyshev", io::to_json(center)},
                    {"answered", s.answers.size()},
                    {"remaining", s.total_pairs() - s.answers.size()},
                    {"complete", s.complete()}};
}

graph::Preference simulate_participant(const geometry::Vector& optimum, double sigma, Xorshift64Star& rng,
                                       const BehaviorId& first, const geometry::Vector& x1,
                                       const BehaviorId& second, const geometry::Vector& x2,
                                       std::optional<std::string> participant) {
    geometry::Vector perturbed = optimum;
    if (sigma > 0.0)
        for (double& v : perturbed) v += sigma * rng.normal();
    bool first_wins = false;
    switch (geometry::predict_preference(perturbed, x1, x2)) {
        case geometry::Prediction::PrefersFirst: first_wins = true; break;
        case geometry::Prediction::PrefersSecond: first_wins = false; break;
        case geometry::Prediction::Tie: first_wins = first < second; break;
    }
    graph::Preference p;
    p.participant = std::move(participant);
    p.preferred = first_wins ? first : second;
    p.other = first_wins ? second : first;
    return p;
}

}  // namespace trust_atlas::service
