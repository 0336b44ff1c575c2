#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trust_atlas/geometry.hpp"
#include "trust_atlas/io.hpp"
#include "trust_atlas/preference_graph.hpp"
#include "trust_atlas/rng.hpp"
#include "trust_atlas/swarm.hpp"

namespace trust_atlas::service {

using graph::BehaviorId;
using graph::Edge;

/// Behaviors a service can show: a feature vector for each, plus an optional
/// trajectory for playback.
struct Catalog {
    geometry::FeatureMap features;
    std::map<BehaviorId, swarm::Trajectory> trajectories;
    double box_bound = geometry::kDefaultBox;

    std::vector<BehaviorId> behaviors() const;
};

/// The five default behaviors simulated for `steps` frames, with standardized
/// descriptors as features.
Catalog default_catalog(int steps = 600, double dt = 0.05);

enum class SelectionMode { Active, FixedOrder, Random };
const char* to_string(SelectionMode m);
SelectionMode parse_selection_mode(const std::string& s);

/// "A|B" with A < B.
std::string pair_id(const BehaviorId& a, const BehaviorId& b);
Edge parse_pair_id(const std::string& id);
/// All unordered pairs in lexicographic order, each with first < second.
std::vector<Edge> canonical_pairs(const std::vector<BehaviorId>& behaviors);

struct SessionState {
    std::string session_id;
    std::string participant;
    std::vector<BehaviorId> behavior_set;  // sorted, unique
    geometry::FeatureMap features;         // of behavior_set only
    double box_bound = geometry::kDefaultBox;
    SelectionMode mode = SelectionMode::Active;
    std::uint64_t seed = 0;

    std::vector<Edge> shown;                      // canonical orientation, in show order
    std::vector<graph::Preference> recorded;      // in answer order
    std::map<std::string, BehaviorId> answers;    // pair_id -> preferred
    geometry::PreferencePolytope polytope;

    std::size_t total_pairs() const;
    bool complete() const { return answers.size() == total_pairs(); }
    /// Shown but not yet answered, if any.
    std::optional<Edge> pending() const;

    /// Canonical serialization; equal states give equal bytes.
    io::json to_json() const;
};

SessionState new_session(std::string session_id, std::string participant, std::vector<BehaviorId> behavior_set,
                         const Catalog& catalog, SelectionMode mode, std::uint64_t seed);

/// Pure selection rule: the pending pair if there is one, otherwise the next
/// unseen pair for the session's mode; nullopt once every pair is shown.
std::optional<Edge> choose_next_pair(const SessionState& s);

/// Applies one event to the state. No validation beyond what is needed to
/// keep the state well-formed; used for replay.
void apply_event(SessionState& s, const io::EventRecord& e);

/// Rebuilds a session from its event log records.
SessionState replay(const std::vector<io::EventRecord>& events);

io::json session_created_payload(const SessionState& s);
io::json pair_shown_payload(const Edge& pair);
io::json preference_payload(const SessionState& s, const Edge& pair, const BehaviorId& preferred);

/// {session_id, participant, acyclic, consistent, chebyshev, answered, remaining, complete}
io::json session_report(const SessionState& s);

/// Synthetic answerer: perturbs the optimum by a fresh N(0, sigma^2 I) draw and
/// answers with predict_preference. Ties go to the lexicographically smaller id.
graph::Preference simulate_participant(const geometry::Vector& optimum, double sigma, Xorshift64Star& rng,
                                       const BehaviorId& first, const geometry::Vector& x1,
                                       const BehaviorId& second, const geometry::Vector& x2,
                                       std::optional<std::string> participant = std::nullopt);

}  // namespace trust_atlas::service
