#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "trust_atlas/group.hpp"
#include "trust_atlas/io.hpp"
#include "trust_atlas/session.hpp"

namespace trust_atlas::service {

struct ServiceOptions {
    Catalog catalog;
    std::optional<io::fs::path> data_dir;  // nullopt keeps everything in memory
    SelectionMode mode = SelectionMode::Active;
    double z_score = group::kDefaultZ;
    double threshold = group::kDefaultThreshold;
    std::vector<double> coverage_levels{1.0, 2.0};
    std::function<double()> clock = io::wall_clock_seconds;
};

struct NextPair {
    bool complete = false;
    std::string pair_id;
    BehaviorId first;
    BehaviorId second;
};

/// Session registry. Each session has its own lock; the registry lock is only
/// held to look sessions up, so independent sessions proceed in parallel.
class Service {
public:
    explicit Service(ServiceOptions options);

    const Catalog& catalog() const { return options_.catalog; }
    const ServiceOptions& options() const { return options_; }

    /// An empty behavior set means every catalog behavior.
    std::string create_session(const std::string& participant, std::vector<BehaviorId> behavior_set = {},
                               std::optional<SelectionMode> mode = std::nullopt, std::uint64_t seed = 0);
    NextPair next_pair(const std::string& session_id);
    /// Returns false when the call repeated an identical earlier answer.
    bool record_preference(const std::string& session_id, const std::string& pair_id, const BehaviorId& preferred);
    io::json session_report(const std::string& session_id);
    io::json population_report();

    SessionState snapshot(const std::string& session_id) const;
    std::vector<std::string> session_ids() const;

private:
    struct Entry {
        mutable std::mutex mutex;
        SessionState state;
    };

    std::shared_ptr<Entry> find(const std::string& session_id) const;
    void commit(Entry& entry, io::EventKind kind, io::json payload);

    ServiceOptions options_;
    mutable std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::uint64_t next_ordinal_ = 0;
};

/// Population statistics over a set of sessions (empty sessions included).
io::json population_report(const std::vector<SessionState>& sessions, double z_score, double threshold,
                           const std::vector<double>& coverage_levels);

}  // namespace trust_atlas::service
