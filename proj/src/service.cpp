#include "trust_atlas/service.hpp"

#include <algorithm>
#include <cstdio>

#include "trust_atlas/error.hpp"

namespace trust_atlas::service {

namespace {

constexpr const char* kLogSuffix = ".events.jsonl";

std::string session_id_for(std::uint64_t ordinal) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(ordinal));
    return buf;
}

std::optional<std::uint64_t> ordinal_of(const std::string& id) {
    if (id.size() < 2 || id[0] != 's') return std::nullopt;
    std::uint64_t v = 0;
    for (std::size_t i = 1; i < id.size(); ++i) {
        if (id[i] < '0' || id[i] > '9') return std::nullopt;
        v = v * 10 + static_cast<std::uint64_t>(id[i] - '0');
    }
    return v;
}

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)) {
    if (!options_.data_dir) return;
    std::error_code ec;
    io::fs::create_directories(*options_.data_dir, ec);
    if (ec) throw Error(ErrorCode::StorageFailure, "cannot create data directory " + options_.data_dir->string());
    std::vector<io::fs::path> logs;
    for (const auto& entry : io::fs::directory_iterator(*options_.data_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > std::string(kLogSuffix).size() &&
            name.compare(name.size() - std::string(kLogSuffix).size(), std::string::npos, kLogSuffix) == 0)
            logs.push_back(entry.path());
    }
    std::sort(logs.begin(), logs.end());
    for (const auto& path : logs) {
        auto events = io::read_events(path);
        if (events.empty()) continue;
        auto entry = std::make_shared<Entry>();
        entry->state = replay(events);
        if (auto ord = ordinal_of(entry->state.session_id)) next_ordinal_ = std::max(next_ordinal_, *ord + 1);
        sessions_[entry->state.session_id] = std::move(entry);
    }
}

std::shared_ptr<Service::Entry> Service::find(const std::string& session_id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + session_id + "'");
    return it->second;
}

void Service::commit(Entry& entry, io::EventKind kind, io::json payload) {
    io::EventRecord record{0, kind, std::move(payload), options_.clock()};
    if (options_.data_dir)
        record.seq = io::append_event(io::event_log_path(*options_.data_dir, entry.state.session_id), record);
    apply_event(entry.state, record);
}

std::string Service::create_session(const std::string& participant, std::vector<BehaviorId> behavior_set,
                                    std::optional<SelectionMode> mode, std::uint64_t seed) {
    if (behavior_set.empty()) behavior_set = options_.catalog.behaviors();
    std::lock_guard lock(registry_mutex_);
    const std::string id = session_id_for(next_ordinal_);
    auto entry = std::make_shared<Entry>();
    const SessionState fresh =
        new_session(id, participant, std::move(behavior_set), options_.catalog, mode.value_or(options_.mode), seed);
    entry->state.session_id = id;
    commit(*entry, io::EventKind::SessionCreated, session_created_payload(fresh));
    ++next_ordinal_;
    sessions_[id] = std::move(entry);
    return id;
}

NextPair Service::next_pair(const std::string& session_id) {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    const auto pair = choose_next_pair(entry->state);
    if (!pair) return NextPair{true, {}, {}, {}};
    const auto& shown = entry->state.shown;
    if (std::find(shown.begin(), shown.end(), *pair) == shown.end())
        commit(*entry, io::EventKind::PairShown, pair_shown_payload(*pair));
    return NextPair{false, pair_id(pair->first, pair->second), pair->first, pair->second};
}

bool Service::record_preference(const std::string& session_id, const std::string& pid, const BehaviorId& preferred) {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    const Edge pair = parse_pair_id(pid);
    const auto& s = entry->state;
    if (pid != pair_id(pair.first, pair.second) ||
        std::find(s.shown.begin(), s.shown.end(), pair) == s.shown.end())
        throw Error(ErrorCode::UnknownPair, "pair '" + pid + "' has not been shown in session '" + session_id + "'");
    if (preferred != pair.first && preferred != pair.second)
        throw Error(ErrorCode::NotAMember, "'" + preferred + "' is not part of pair '" + pid + "'");
    if (auto it = s.answers.find(pid); it != s.answers.end()) {
        if (it->second == preferred) return false;
        throw Error(ErrorCode::AlreadyAnswered, "pair '" + pid + "' was already answered with '" + it->second + "'");
    }
    commit(*entry, io::EventKind::PreferenceRecorded, preference_payload(s, pair, preferred));
    return true;
}

io::json Service::session_report(const std::string& session_id) {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    auto report = service::session_report(entry->state);
    commit(*entry, io::EventKind::AnalysisRun, io::json{{"report", "session"}});
    return report;
}

SessionState Service::snapshot(const std::string& session_id) const {
    auto entry = find(session_id);
    std::lock_guard lock(entry->mutex);
    return entry->state;
}

std::vector<std::string> Service::session_ids() const {
    std::lock_guard lock(registry_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : sessions_) out.push_back(id);
    return out;
}

io::json Service::population_report() {
    std::vector<std::shared_ptr<Entry>> entries;
    {
        std::lock_guard lock(registry_mutex_);
        for (const auto& [_, e] : sessions_) entries.push_back(e);
    }
    std::vector<SessionState> states;
    for (const auto& e : entries) {
        std::lock_guard lock(e->mutex);
        states.push_back(e->state);
    }
    return service::population_report(states, options_.z_score, options_.threshold, options_.coverage_levels);
}

io::json population_report(const std::vector<SessionState>& sessions, double z_score, double threshold,
                           const std::vector<double>& coverage_levels) {
    if (sessions.empty()) throw Error(ErrorCode::NoData, "no sessions recorded yet");

    geometry::FeatureMap features;
    for (const auto& s : sessions)
        for (const auto& [k, v] : s.features) features.emplace(k, v);
    const double box = sessions.front().box_bound;

    std::vector<graph::Preference> anonymized;
    std::vector<group::Individual> individuals;
    std::vector<geometry::ChebyshevResult> centers;
    for (const auto& s : sessions) {
        for (auto p : s.recorded) {
            p.participant.reset();
            anonymized.push_back(std::move(p));
        }
        individuals.push_back({s.session_id, s.polytope.halfspaces});
        centers.push_back(geometry::chebyshev_center(s.polytope));
    }
    const auto population = graph::aggregate_population(anonymized);

    const auto distinct = group::solve_distinctiveness(individuals, box);
    const auto cohesion = group::solve_cohesion(population, features, z_score, box);
    const auto aggregate = geometry::chebyshev_center(geometry::build_polytope(population.edges, features, box));

    std::vector<geometry::Vector> answered_centers;
    for (std::size_t k = 0; k < sessions.size(); ++k)
        if (!sessions[k].recorded.empty() && !centers[k].empty()) answered_centers.push_back(centers[k].center);
    io::json coverage = io::json::object();
    for (double s : coverage_levels) {
        const std::string key = io::shortest_number(s);
        if (cohesion.status == group::SolveStatus::Optimal && cohesion.alpha > 0.0 && !answered_centers.empty())
            coverage[key] = group::coverage_fraction(answered_centers, cohesion.mean, cohesion.alpha, s);
        else
            coverage[key] = nullptr;
    }

    io::json people = io::json::array();
    for (std::size_t k = 0; k < sessions.size(); ++k) {
        const auto& s = sessions[k];
        people.push_back(io::json{{"session_id", s.session_id},
                                  {"participant", s.participant},
                                  {"answered", s.answers.size()},
                                  {"chebyshev", io::to_json(centers[k])},
                                  {"distinctiveness_l1", distinct.status == group::SolveStatus::Optimal
                                                             ? io::json(distinct.norms_l1.at(s.session_id))
                                                             : io::json(nullptr)},
                                  {"distinctiveness_l2", distinct.status == group::SolveStatus::Optimal
                                                             ? io::json(distinct.norms_l2.at(s.session_id))
                                                             : io::json(nullptr)}});
    }

    io::json cohesion_doc = io::cohesion_to_json(cohesion, {});
    cohesion_doc.erase("coverage");
    return io::json{{"sessions", sessions.size()},
                    {"population_graph", io::to_json(population)},
                    {"distinctiveness", io::to_json(distinct)},
                    {"partition", distinct.status == group::SolveStatus::Optimal
                                      ? io::to_json(group::cluster_by_distinctiveness(distinct, threshold))
                                      : io::json(nullptr)},
                    {"threshold", threshold},
                    {"cohesion", std::move(cohesion_doc)},
                    {"coverage", std::move(coverage)},
                    {"aggregate_chebyshev", io::to_json(aggregate)},
                    {"individuals", std::move(people)}};
}

}  // namespace trust_atlas::service
