#include "trust_atlas/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "trust_atlas/error.hpp"

namespace trust_atlas::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& doc, const char* key) {
    if (!doc.is_object()) parse_error("expected a JSON object");
    auto it = doc.find(key);
    if (it == doc.end()) parse_error(std::string("missing field '") + key + "'");
    return *it;
}

double number(const json& v, const char* what) {
    if (!v.is_number()) parse_error(std::string("'") + what + "' must be a number");
    return v.get<double>();
}

std::string string_field(const json& doc, const char* key) {
    const json& v = field(doc, key);
    if (!v.is_string()) parse_error(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const char* what) {
    if (!v.is_array()) parse_error(std::string("'") + what + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(number(x, what));
    return out;
}

json edge_json(const graph::Edge& e) { return json::array({e.first, e.second}); }

}  // namespace

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& path) {
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        parse_error(path.string() + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        out.flush();
        if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::StorageFailure, "cannot move " + tmp.string() + " to " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, dump(doc)); }

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string shortest_number(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

json to_json(const swarm::Trajectory& t) {
    json frames = json::array();
    for (const auto& f : t.frames) {
        json agents = json::array();
        for (const auto& a : f) agents.push_back(json::array({a.position.x, a.position.y, a.heading}));
        frames.push_back(std::move(agents));
    }
    return json{{"behavior_id", t.behavior_id}, {"dt", t.dt}, {"frames", std::move(frames)}};
}

swarm::Trajectory trajectory_from_json(const json& doc) {
    swarm::Trajectory t;
    t.behavior_id = string_field(doc, "behavior_id");
    t.dt = number(field(doc, "dt"), "dt");
    const json& frames = field(doc, "frames");
    if (!frames.is_array()) parse_error("'frames' must be an array");
    for (const auto& f : frames) {
        if (!f.is_array()) parse_error("each frame must be an array");
        swarm::Frame frame;
        for (const auto& a : f) {
            auto v = numbers(a, "agent");
            if (v.size() != 3) parse_error("agent state must be [x, y, heading]");
            frame.push_back({{v[0], v[1]}, v[2]});
        }
        t.frames.push_back(std::move(frame));
    }
    return t;
}

geometry::FeatureMap FeatureFile::map() const {
    geometry::FeatureMap m;
    for (const auto& f : features) m[f.behavior_id] = f.values;
    return m;
}

json to_json(const FeatureFile& f) {
    json doc{{"q", f.q}, {"standardized", f.standardized}, {"descriptor_names", f.descriptor_names}};
    for (const auto& v : f.features) doc[v.behavior_id] = v.values;
    return doc;
}

FeatureFile features_from_json(const json& doc) {
    FeatureFile f;
    const json& q = field(doc, "q");
    if (!q.is_number_unsigned()) parse_error("'q' must be a non-negative integer");
    f.q = q.get<std::size_t>();
    const json& st = field(doc, "standardized");
    if (!st.is_boolean()) parse_error("'standardized' must be a boolean");
    f.standardized = st.get<bool>();
    if (auto it = doc.find("descriptor_names"); it != doc.end()) {
        if (!it->is_array()) parse_error("'descriptor_names' must be an array");
        for (const auto& n : *it) {
            if (!n.is_string()) parse_error("descriptor names must be strings");
            f.descriptor_names.push_back(n.get<std::string>());
        }
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (it.key() == "q" || it.key() == "standardized" || it.key() == "descriptor_names") continue;
        auto values = numbers(it.value(), it.key().c_str());
        if (values.size() != f.q)
            throw Error(ErrorCode::MismatchedDimensions, "feature vector '" + it.key() + "' has length " +
                                                             std::to_string(values.size()) + ", expected " +
                                                             std::to_string(f.q));
        f.features.push_back({it.key(), std::move(values)});
    }
    return f;
}

json to_json(const graph::Preference& p) {
    json doc;
    doc["participant"] = p.participant ? json(*p.participant) : json(nullptr);
    doc["preferred"] = p.preferred;
    doc["other"] = p.other;
    doc["timestamp"] = p.timestamp ? json(*p.timestamp) : json(nullptr);
    return doc;
}

graph::Preference preference_from_json(const json& doc) {
    graph::Preference p;
    if (auto it = doc.find("participant"); it != doc.end() && !it->is_null()) {
        if (!it->is_string()) parse_error("'participant' must be a string or null");
        p.participant = it->get<std::string>();
    }
    p.preferred = string_field(doc, "preferred");
    p.other = string_field(doc, "other");
    if (auto it = doc.find("timestamp"); it != doc.end() && !it->is_null()) p.timestamp = number(*it, "timestamp");
    if (p.preferred == p.other) parse_error("preferred and other are both '" + p.preferred + "'");
    return p;
}

std::vector<graph::Preference> load_preferences(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    std::vector<graph::Preference> out;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(preference_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            parse_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            parse_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void save_preferences(const fs::path& path, const std::vector<graph::Preference>& prefs) {
    std::string text;
    for (const auto& p : prefs) text += to_json(p).dump() + "\n";
    write_text(path, text);
}

json to_json(const graph::IndividualGraph& g) {
    json nodes = json::array();
    for (const auto& v : g.vertices) nodes.push_back(json{{"id", v}});
    json links = json::array();
    for (const auto& [a, b] : g.edges) links.push_back(json{{"source", a}, {"target", b}});
    return json{{"directed", true},
                {"multigraph", false},
                {"graph", json{{"participant", g.participant}}},
                {"nodes", std::move(nodes)},
                {"links", std::move(links)}};
}

json to_json(const graph::PopulationGraph& g) {
    json nodes = json::array();
    for (const auto& v : g.vertices) nodes.push_back(json{{"id", v}});
    json links = json::array();
    for (const auto& e : g.edges) {
        links.push_back(json{{"source", e.first},
                             {"target", e.second},
                             {"count", g.count(e.first, e.second)},
                             {"reverse_count", g.count(e.second, e.first)},
                             {"weight", g.weights.at(e)},
                             {"samples", g.samples.at(e)}});
    }
    return json{{"directed", true}, {"multigraph", false}, {"nodes", std::move(nodes)}, {"links", std::move(links)}};
}

json to_json(const geometry::Halfspace& h) {
    return json{{"a", h.a}, {"b", h.b}, {"source_pair", edge_json(h.source_pair)}};
}

json to_json(const geometry::ChebyshevResult& r) {
    return json{{"status", geometry::to_string(r.status)},
                {"center", r.empty() ? json(nullptr) : json(r.center)},
                {"radius", r.empty() ? json(nullptr) : json(r.radius)},
                {"box_active", r.box_active}};
}

json polytope_to_json(const geometry::PreferencePolytope& p, const geometry::ChebyshevResult& r) {
    json hs = json::array();
    for (const auto& h : p.halfspaces) hs.push_back(to_json(h));
    return json{{"dim", p.dim},
                {"halfspaces", std::move(hs)},
                {"box_bound", p.box_bound},
                {"center", r.empty() ? json(nullptr) : json(r.center)},
                {"radius", r.empty() ? json(nullptr) : json(r.radius)},
                {"status", geometry::to_string(r.status)},
                {"box_active", r.box_active}};
}

json to_json(const group::DistinctivenessResult& r) {
    json pert = json::object();
    for (const auto& [k, v] : r.perturbations) pert[k] = v;
    json l1 = json::object();
    for (const auto& [k, v] : r.norms_l1) l1[k] = v;
    json l2 = json::object();
    for (const auto& [k, v] : r.norms_l2) l2[k] = v;
    return json{{"status", group::to_string(r.status)},
                {"reference", r.reference},
                {"perturbations", std::move(pert)},
                {"norms_l1", std::move(l1)},
                {"norms_l2", std::move(l2)},
                {"objective", r.objective}};
}

json to_json(const group::Partition& p) { return json{{"low", p.low}, {"high", p.high}}; }

json cohesion_to_json(const group::CohesionResult& r, const std::map<double, double>& coverage) {
    json deltas = json::array();
    json slabs = json::array();
    for (const auto& s : r.per_edge) {
        deltas.push_back(s.delta);
        slabs.push_back(json{{"edge", edge_json(s.edge)},
                             {"probability", s.probability},
                             {"delta", s.delta},
                             {"samples", s.samples},
                             {"lower", s.lower},
                             {"upper", s.upper}});
    }
    json cov = json::object();
    for (const auto& [s, frac] : coverage) cov[shortest_number(s)] = frac;
    return json{{"status", group::to_string(r.status)},
                {"mean", r.mean},
                {"alpha", r.alpha},
                {"z_score", r.z_score},
                {"delta_per_edge", std::move(deltas)},
                {"slabs", std::move(slabs)},
                {"coverage", std::move(cov)}};
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::SessionCreated: return "SessionCreated";
        case EventKind::PairShown: return "PairShown";
        case EventKind::PreferenceRecorded: return "PreferenceRecorded";
        case EventKind::AnalysisRun: return "AnalysisRun";
    }
    return "?";
}

EventKind parse_event_kind(const std::string& s) {
    for (auto k : {EventKind::SessionCreated, EventKind::PairShown, EventKind::PreferenceRecorded, EventKind::AnalysisRun})
        if (s == to_string(k)) return k;
    parse_error("unknown event kind '" + s + "'");
}

json to_json(const EventRecord& r) {
    return json{{"seq", r.seq}, {"kind", to_string(r.kind)}, {"payload", r.payload}, {"wall_time", r.wall_time}};
}

EventRecord event_from_json(const json& doc) {
    EventRecord r;
    const json& seq = field(doc, "seq");
    if (!seq.is_number_unsigned()) parse_error("'seq' must be a non-negative integer");
    r.seq = seq.get<std::uint64_t>();
    r.kind = parse_event_kind(string_field(doc, "kind"));
    r.payload = field(doc, "payload");
    r.wall_time = number(field(doc, "wall_time"), "wall_time");
    return r;
}

std::vector<EventRecord> read_events(const fs::path& log_path) {
    const std::string text = read_text(log_path);
    std::vector<EventRecord> out;
    std::size_t start = 0;
    for (int lineno = 1; start < text.size(); ++lineno) {
        const std::size_t end = text.find('\n', start);
        if (end == std::string::npos) break;  // torn final write
        const std::string line = text.substr(start, end - start);
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(event_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            parse_error(log_path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            parse_error(log_path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (out.size() > 1 && out.back().seq <= out[out.size() - 2].seq)
            parse_error(log_path.string() + ":" + std::to_string(lineno) + ": sequence number does not increase");
    }
    return out;
}

std::uint64_t append_event(const fs::path& log_path, EventRecord record) {
    std::uint64_t seq = 0;
    std::error_code ec;
    if (fs::exists(log_path, ec)) {
        const auto existing = read_events(log_path);
        if (!existing.empty()) seq = existing.back().seq + 1;
        // Drop a torn tail so the new record starts on its own line.
        const std::string text = read_text(log_path);
        const auto last_nl = text.find_last_of('\n');
        const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
        if (keep != text.size()) {
            fs::resize_file(log_path, keep, ec);
            if (ec) throw Error(ErrorCode::StorageFailure, "cannot truncate " + log_path.string());
        }
    } else if (log_path.has_parent_path()) {
        fs::create_directories(log_path.parent_path(), ec);
        if (ec) throw Error(ErrorCode::StorageFailure, "cannot create " + log_path.parent_path().string());
    }
    record.seq = seq;
    std::ofstream out(log_path, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::StorageFailure, "cannot open " + log_path.string());
    out << to_json(record).dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::StorageFailure, "write to " + log_path.string() + " failed");
    return seq;
}

fs::path data_dir() {
    if (const char* env = std::getenv("TRUST_ATLAS_DATA"); env && *env) return fs::path(env);
    return fs::path("data");
}

fs::path event_log_path(const fs::path& dir, const std::string& session_id) {
    return dir / (session_id + ".events.jsonl");
}

double wall_clock_seconds() {
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
}

}  // namespace trust_atlas::io
