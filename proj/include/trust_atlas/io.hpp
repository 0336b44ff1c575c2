#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "trust_atlas/embedding.hpp"
#include "trust_atlas/geometry.hpp"
#include "trust_atlas/group.hpp"
#include "trust_atlas/preference_graph.hpp"
#include "trust_atlas/swarm.hpp"

namespace trust_atlas::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Files

std::string read_text(const fs::path& path);
json read_json(const fs::path& path);
/// Writes to a sibling temp file and renames it into place.
void write_text(const fs::path& path, const std::string& text);
void write_json(const fs::path& path, const json& doc);
std::string dump(const json& doc);  // two-space indent, trailing newline
/// Shortest decimal that reads back to the same double ("2", "0.5").
std::string shortest_number(double v);

// Trajectories: {behavior_id, dt, frames: [[[x, y, heading], ...], ...]}

json to_json(const swarm::Trajectory& t);
swarm::Trajectory trajectory_from_json(const json& doc);

// Features: {"q", "standardized", "descriptor_names", <behavior_id>: [...]}

struct FeatureFile {
    std::size_t q = 0;
    bool standardized = false;
    std::vector<std::string> descriptor_names;
    std::vector<embedding::FeatureVector> features;  // file order

    geometry::FeatureMap map() const;
};

json to_json(const FeatureFile& f);
FeatureFile features_from_json(const json& doc);

// Preferences, one JSON object per line

json to_json(const graph::Preference& p);
graph::Preference preference_from_json(const json& doc);
std::vector<graph::Preference> load_preferences(const fs::path& path);
void save_preferences(const fs::path& path, const std::vector<graph::Preference>& prefs);

// Graphs as node-link documents

json to_json(const graph::IndividualGraph& g);
json to_json(const graph::PopulationGraph& g);

// Analysis results

json to_json(const geometry::Halfspace& h);
json to_json(const geometry::ChebyshevResult& r);
/// {halfspaces, box_bound, center, radius, status}
json polytope_to_json(const geometry::PreferencePolytope& p, const geometry::ChebyshevResult& r);
json to_json(const group::DistinctivenessResult& r);
json to_json(const group::Partition& p);
/// {mean, alpha, delta_per_edge, slabs, coverage: {s: fraction}}
json cohesion_to_json(const group::CohesionResult& r, const std::map<double, double>& coverage);

// Event log

enum class EventKind { SessionCreated, PairShown, PreferenceRecorded, AnalysisRun };
const char* to_string(EventKind k);
EventKind parse_event_kind(const std::string& s);

struct EventRecord {
    std::uint64_t seq = 0;
    EventKind kind = EventKind::SessionCreated;
    json payload;
    double wall_time = 0.0;

    bool operator==(const EventRecord&) const = default;
};

json to_json(const EventRecord& r);
EventRecord event_from_json(const json& doc);

/// Appends `record` with the next sequence number and flushes before
/// returning. The record's own seq is ignored.
std::uint64_t append_event(const fs::path& log_path, EventRecord record);

/// Every complete record in file order. A final line without a newline is a
/// torn write and is dropped.
std::vector<EventRecord> read_events(const fs::path& log_path);

/// TRUST_ATLAS_DATA, or ./data when unset.
fs::path data_dir();
fs::path event_log_path(const fs::path& dir, const std::string& session_id);

double wall_clock_seconds();

}  // namespace trust_atlas::io
