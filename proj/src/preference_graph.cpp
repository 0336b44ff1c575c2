#include "trust_atlas/preference_graph.hpp"

#include <algorithm>
#include <queue>

#include "trust_atlas/error.hpp"

namespace trust_atlas::graph {

IndividualGraph build_individual_graph(const std::vector<Preference>& prefs) {
    IndividualGraph g;
    if (prefs.empty()) return g;
    g.participant = prefs.front().participant.value_or("");
    std::set<Edge> seen;
    for (const auto& p : prefs) {
        if (p.participant.value_or("") != g.participant)
            throw Error(ErrorCode::ContradictoryPair, "preferences from more than one participant");
        if (p.preferred == p.other)
            throw Error(ErrorCode::ContradictoryPair, "behavior '" + p.preferred + "' compared with itself");
        if (seen.count({p.other, p.preferred}))
            throw Error(ErrorCode::ContradictoryPair, "participant '" + g.participant + "' answered pair (" +
                                                          p.preferred + ", " + p.other + ") both ways");
        if (!seen.insert({p.preferred, p.other}).second) continue;
        g.vertices.insert(p.preferred);
        g.vertices.insert(p.other);
        g.edges.emplace_back(p.preferred, p.other);
    }
    return g;
}

AcyclicResult is_acyclic(const IndividualGraph& g) {
    std::map<BehaviorId, int> indegree;
    std::map<BehaviorId, std::vector<BehaviorId>> out;
    for (const auto& v : g.vertices) indegree[v] = 0;
    for (const auto& [from, to] : g.edges) {
        out[from].push_back(to);
        ++indegree[to];
        indegree.try_emplace(from, 0);
    }
    std::priority_queue<BehaviorId, std::vector<BehaviorId>, std::greater<>> ready;
    for (const auto& [v, d] : indegree)
        if (d == 0) ready.push(v);

    AcyclicResult result;
    while (!ready.empty()) {
        BehaviorId v = ready.top();
        ready.pop();
        result.order.push_back(v);
        for (const auto& w : out[v])
            if (--indegree[w] == 0) ready.push(w);
    }
    if (result.order.size() != indegree.size()) {
        result.acyclic = false;
        result.order.clear();
    }
    return result;
}

int PopulationGraph::count(const BehaviorId& i, const BehaviorId& j) const {
    auto it = counts.find({i, j});
    return it == counts.end() ? 0 : it->second;
}

PopulationGraph aggregate_population(const std::vector<Preference>& prefs) {
    PopulationGraph g;
    for (const auto& p : prefs) {
        if (p.preferred == p.other) continue;
        g.vertices.insert(p.preferred);
        g.vertices.insert(p.other);
        ++g.counts[{p.preferred, p.other}];
    }
    // Visit each unordered pair once, from its lexicographically smaller end.
    std::set<Edge> pairs;
    for (const auto& [e, c] : g.counts)
        pairs.insert(e.first < e.second ? e : Edge{e.second, e.first});
    for (const auto& [i, j] : pairs) {
        const int a_ij = g.count(i, j);
        const int a_ji = g.count(j, i);
        const Edge e = a_ji > a_ij ? Edge{j, i} : Edge{i, j};
        const int forward = std::max(a_ij, a_ji);
        g.edges.push_back(e);
        g.weights[e] = static_cast<double>(forward) / static_cast<double>(a_ij + a_ji);
        g.samples[e] = a_ij + a_ji;
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

std::map<std::string, std::vector<Preference>> by_participant(const std::vector<Preference>& prefs) {
    std::map<std::string, std::vector<Preference>> out;
    for (const auto& p : prefs)
        if (p.participant) out[*p.participant].push_back(p);
    return out;
}

}  // namespace trust_atlas::graph
