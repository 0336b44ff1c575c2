#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace trust_atlas::graph {

using BehaviorId = std::string;
using Edge = std::pair<BehaviorId, BehaviorId>;  // (preferred, other)

struct Preference {
    std::optional<std::string> participant;  // nullopt when anonymized
    BehaviorId preferred;
    BehaviorId other;
    std::optional<double> timestamp;

    bool operator==(const Preference&) const = default;
};

struct IndividualGraph {
    std::string participant;
    std::set<BehaviorId> vertices;
    std::vector<Edge> edges;  // insertion order, one per unordered pair
};

/// One edge per unordered pair, oriented preferred -> other. Repeating an
/// answer in the same orientation is absorbed; answering a pair both ways
/// raises ContradictoryPair.
IndividualGraph build_individual_graph(const std::vector<Preference>& prefs);

struct AcyclicResult {
    bool acyclic = true;
    std::vector<BehaviorId> order;  // topological order when acyclic
};

/// Kahn's algorithm, always expanding the lexicographically smallest ready
/// vertex, so the returned order is deterministic.
AcyclicResult is_acyclic(const IndividualGraph& g);

struct PopulationGraph {
    std::set<BehaviorId> vertices;
    std::map<Edge, int> counts;  // a_ij keyed by (i, j)
    std::vector<Edge> edges;     // sorted
    std::map<Edge, double> weights;
    std::map<Edge, int> samples;

    int count(const BehaviorId& i, const BehaviorId& j) const;
};

/// Aggregates anonymized preferences. Edge (i, j) exists when a_ij > a_ji,
/// or when a_ij == a_ji != 0 and i sorts before j. Weight a_ij / (a_ij + a_ji).
PopulationGraph aggregate_population(const std::vector<Preference>& prefs);

/// Groups labeled preferences by participant (unlabeled entries are skipped).
std::map<std::string, std::vector<Preference>> by_participant(const std::vector<Preference>& prefs);

}  // namespace trust_atlas::graph
