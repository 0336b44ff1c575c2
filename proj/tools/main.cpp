#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "trust_atlas/embedding.hpp"
#include "trust_atlas/error.hpp"
#include "trust_atlas/group.hpp"
#include "trust_atlas/http_server.hpp"
#include "trust_atlas/io.hpp"
#include "trust_atlas/service.hpp"

using namespace trust_atlas;
using io::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInfeasible = 4;

// Raised for an optimization that has no solution; carries the partial output.
struct Infeasible {
    std::string message;
    json output;
};

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        io::write_text(out, text);
}

void emit_json(const std::string& out, const json& doc) { emit(out, io::dump(doc)); }

void report_error(std::string_view code, const std::string& message) {
    std::cerr << json{{"code", code}, {"message", message}}.dump() << "\n";
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

geometry::Vector parse_vector(const std::string& s) {
    geometry::Vector v;
    for (const auto& part : split(s, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "not a number list: '" + s + "'");
        }
    }
    return v;
}

std::string participant_label(int k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%03d", k);
    return buf;
}

// Individual polytopes from labeled preferences.
std::map<std::string, geometry::PreferencePolytope> individual_polytopes(const std::vector<graph::Preference>& prefs,
                                                                         const geometry::FeatureMap& features,
                                                                         double box) {
    std::map<std::string, geometry::PreferencePolytope> out;
    for (const auto& [who, list] : graph::by_participant(prefs)) {
        auto g = graph::build_individual_graph(list);
        out[who] = geometry::build_polytope(g.edges, features, box);
    }
    if (out.empty()) throw Error(ErrorCode::NoData, "no labeled preferences");
    return out;
}

group::DistinctivenessResult distinctiveness_of(const std::map<std::string, geometry::PreferencePolytope>& polytopes,
                                                double box) {
    std::vector<group::Individual> people;
    for (const auto& [who, p] : polytopes) people.push_back({who, p.halfspaces});
    return group::solve_distinctiveness(people, box);
}

struct Options {
    // simulate
    std::string behavior;
    int agents = 0;
    int steps = 2000;
    double dt = 0.05;
    std::uint64_t seed = 1;
    // shared
    std::vector<std::string> inputs;
    std::string prefs;
    std::string features;
    std::string out;
    std::string participant;
    double box = geometry::kDefaultBox;
    double threshold = group::kDefaultThreshold;
    double z = group::kDefaultZ;
    std::vector<double> levels{1.0, 2.0};
    bool standardize = false;
    // synth
    int participants = 20;
    int behaviors = 8;
    int q = 2;
    std::string center;
    double spread = 0.3;
    double noise = 0.0;
    int clusters = 1;
    double separation = 2.0;
    int minority = 0;
    bool anonymize = false;
    std::string truth_out;
    std::string features_out;
    // serve
    std::string host = "0.0.0.0";
    int port = 8080;
    std::string data;
    bool fixed_order = false;
    int catalog_steps = 600;
    // export-plot
    std::string trust_scores;
    std::string format = "csv";
};

int cmd_simulate(const Options& o) {
    auto spec = swarm::default_spec(swarm::parse_behavior(o.behavior));
    if (o.agents > 0) spec.n_agents = o.agents;
    spec.seed = o.seed;
    emit_json(o.out, io::to_json(swarm::simulate(spec, o.steps, o.dt)));
    return 0;
}

int cmd_embed(const Options& o) {
    io::FeatureFile file;
    file.q = embedding::kDescriptorCount;
    file.descriptor_names = embedding::descriptor_names();
    for (const auto& in : o.inputs) file.features.push_back(embedding::extract_features(io::trajectory_from_json(io::read_json(in))));
    if (o.standardize) {
        file.features = embedding::standardize(file.features);
        file.standardized = true;
    }
    emit_json(o.out, io::to_json(file));
    return 0;
}

int cmd_graph(const Options& o) {
    const auto prefs = io::load_preferences(o.prefs);
    if (o.participant.empty()) {
        emit_json(o.out, io::to_json(graph::aggregate_population(prefs)));
        return 0;
    }
    std::vector<graph::Preference> mine;
    for (const auto& p : prefs)
        if (p.participant == o.participant) mine.push_back(p);
    if (mine.empty()) throw Error(ErrorCode::NoData, "no preferences for participant '" + o.participant + "'");
    const auto g = graph::build_individual_graph(mine);
    const auto acyclic = graph::is_acyclic(g);
    json doc = io::to_json(g);
    doc["acyclic"] = acyclic.acyclic;
    doc["order"] = acyclic.acyclic ? json(acyclic.order) : json(nullptr);
    emit_json(o.out, doc);
    return 0;
}

int cmd_analyze_individual(const Options& o) {
    const auto prefs = io::load_preferences(o.prefs);
    const auto features = io::features_from_json(io::read_json(o.features)).map();
    std::vector<graph::Preference> mine;
    for (const auto& p : prefs)
        if (o.participant.empty() || p.participant == o.participant) mine.push_back(p);
    if (mine.empty()) throw Error(ErrorCode::NoData, "no preferences to analyze");
    const auto g = graph::build_individual_graph(mine);
    const auto poly = geometry::build_polytope(g.edges, features, o.box);
    const auto center = geometry::chebyshev_center(poly);
    json doc = io::polytope_to_json(poly, center);
    doc["participant"] = o.participant.empty() ? json(nullptr) : json(o.participant);
    doc["acyclic"] = graph::is_acyclic(g).acyclic;
    if (center.empty()) throw Infeasible{"preference polytope is empty", doc};
    emit_json(o.out, doc);
    return 0;
}

int cmd_analyze_group(const Options& o) {
    const auto prefs = io::load_preferences(o.prefs);
    const auto features = io::features_from_json(io::read_json(o.features)).map();
    const auto polys = individual_polytopes(prefs, features, o.box);
    const auto r = distinctiveness_of(polys, o.box);
    json doc{{"distinctiveness", io::to_json(r)}, {"threshold", o.threshold}};
    if (r.status != group::SolveStatus::Optimal) throw Infeasible{"distinctiveness program is infeasible", doc};
    doc["partition"] = io::to_json(group::cluster_by_distinctiveness(r, o.threshold));
    emit_json(o.out, doc);
    return 0;
}

int cmd_cohesion(const Options& o) {
    const auto prefs = io::load_preferences(o.prefs);
    const auto features = io::features_from_json(io::read_json(o.features)).map();
    const auto pop = graph::aggregate_population(prefs);
    const auto r = group::solve_cohesion(pop, features, o.z, o.box);
    if (r.status != group::SolveStatus::Optimal)
        throw Infeasible{"cohesion program is infeasible", io::cohesion_to_json(r, {})};

    // Coverage needs individual centers, which only labeled preferences give.
    std::map<double, double> coverage;
    if (r.alpha > 0.0 && !graph::by_participant(prefs).empty()) {
        std::vector<geometry::Vector> centers;
        for (const auto& [who, p] : individual_polytopes(prefs, features, o.box)) {
            const auto c = geometry::chebyshev_center(p);
            if (!c.empty()) centers.push_back(c.center);
        }
        if (!centers.empty())
            for (double s : o.levels) coverage[s] = group::coverage_fraction(centers, r.mean, r.alpha, s);
    }
    emit_json(o.out, io::cohesion_to_json(r, coverage));
    return 0;
}

int cmd_synth(const Options& o) {
    Xorshift64Star rng(o.seed);
    geometry::FeatureMap features;
    std::size_t q = 0;
    if (!o.features.empty()) {
        features = io::features_from_json(io::read_json(o.features)).map();
        q = features.begin()->second.size();
    } else {
        q = static_cast<std::size_t>(o.q);
        io::FeatureFile file;
        file.q = q;
        for (int i = 0; i < o.behaviors; ++i) {
            geometry::Vector v(q);
            for (double& x : v) x = rng.uniform(-3.0, 3.0);
            char id[16];
            std::snprintf(id, sizeof id, "b%02d", i);
            features[id] = v;
            file.features.push_back({id, v});
        }
        if (!o.features_out.empty()) io::write_json(o.features_out, io::to_json(file));
    }
    geometry::Vector base = o.center.empty() ? geometry::Vector(q, 0.0) : parse_vector(o.center);
    if (base.size() != q) throw Error(ErrorCode::DimensionMismatch, "--center must have q components");

    const auto pairs = service::canonical_pairs([&] {
        std::vector<std::string> ids;
        for (const auto& [k, _] : features) ids.push_back(k);
        return ids;
    }());
    std::string text;
    json truth = json::object();
    for (int k = 0; k < o.participants; ++k) {
        const std::string who = participant_label(k);
        geometry::Vector optimum = base;
        int cluster = 0;
        if (o.clusters == 2) {
            const bool in_minority = o.minority > 0 ? k < o.minority : k % 2 == 1;
            cluster = in_minority ? 1 : 0;
            optimum[0] += in_minority ? o.separation : -o.separation;
        }
        for (double& x : optimum) x += o.spread * rng.normal();
        truth[who] = json{{"optimum", optimum}, {"cluster", cluster}};
        for (const auto& [a, b] : pairs) {
            auto p = service::simulate_participant(optimum, o.noise, rng, a, features.at(a), b, features.at(b));
            if (!o.anonymize) p.participant = who;
            text += io::to_json(p).dump() + "\n";
        }
    }
    emit(o.out, text);
    if (!o.truth_out.empty()) io::write_json(o.truth_out, truth);
    return 0;
}

service::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

int cmd_serve(const Options& o) {
    service::ServiceOptions so;
    so.catalog = service::default_catalog(o.catalog_steps);
    so.data_dir = o.data.empty() ? io::data_dir() : io::fs::path(o.data);
    so.mode = o.fixed_order ? service::SelectionMode::FixedOrder : service::SelectionMode::Active;
    so.z_score = o.z;
    so.threshold = o.threshold;
    service::Service svc(std::move(so));
    service::HttpServer server(svc);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on " << o.host << ":" << o.port << "\n";
    if (!server.listen(o.host, o.port)) throw Error(ErrorCode::StorageFailure, "cannot listen on port " + std::to_string(o.port));
    g_server = nullptr;
    return 0;
}

int cmd_export_plot(const Options& o) {
    const auto prefs = io::load_preferences(o.prefs);
    const auto features = io::features_from_json(io::read_json(o.features)).map();
    const auto polys = individual_polytopes(prefs, features, o.box);
    const auto dist = distinctiveness_of(polys, o.box);
    if (dist.status != group::SolveStatus::Optimal) throw Infeasible{"distinctiveness program is infeasible", json()};

    std::map<std::string, std::string> scores;
    if (!o.trust_scores.empty()) {
        std::istringstream in(io::read_text(o.trust_scores));
        std::string line;
        for (int lineno = 1; std::getline(in, line); ++lineno) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || (lineno == 1 && line.rfind("participant", 0) == 0)) continue;
            auto cells = split(line, ',');
            if (cells.size() != 2)
                throw Error(ErrorCode::ParseError, o.trust_scores + ":" + std::to_string(lineno) + ": expected participant,trust_score");
            parse_vector(cells[1]);
            scores[cells[0]] = cells[1];
        }
    }

    const std::size_t q = features.begin()->second.size();
    if (o.format == "json") {
        json rows = json::array();
        for (const auto& [who, p] : polys) {
            const auto c = geometry::chebyshev_center(p);
            rows.push_back(json{{"participant", who},
                                {"center", c.empty() ? json(nullptr) : json(c.center)},
                                {"radius", c.empty() ? json(nullptr) : json(c.radius)},
                                {"distinctiveness_l1", dist.norms_l1.at(who)},
                                {"distinctiveness_l2", dist.norms_l2.at(who)},
                                {"trust_score", scores.count(who) ? json(std::stod(scores[who])) : json(nullptr)}});
        }
        emit_json(o.out, rows);
        return 0;
    }
    std::string csv = "participant";
    for (std::size_t j = 0; j < q; ++j) csv += ",center_" + std::to_string(j);
    csv += ",radius,distinctiveness_l1,distinctiveness_l2,trust_score\n";
    for (const auto& [who, p] : polys) {
        const auto c = geometry::chebyshev_center(p);
        csv += who;
        for (std::size_t j = 0; j < q; ++j) csv += "," + (c.empty() ? std::string() : io::shortest_number(c.center[j]));
        csv += "," + (c.empty() ? std::string() : io::shortest_number(c.radius));
        csv += "," + io::shortest_number(dist.norms_l1.at(who));
        csv += "," + io::shortest_number(dist.norms_l2.at(who));
        csv += "," + (scores.count(who) ? scores[who] : std::string()) + "\n";
    }
    emit(o.out, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Swarm trust preference analysis"};
    app.require_subcommand(1);
    Options o;

    auto positive_box = [&](CLI::App* sub) {
        sub->add_option("--box", o.box, "Half-width M of the feature-space box")->check(CLI::PositiveNumber);
    };
    auto prefs_and_features = [&](CLI::App* sub) {
        sub->add_option("--prefs,--in", o.prefs, "Preferences (JSON Lines)")->required();
        sub->add_option("--features", o.features, "Features JSON")->required();
        positive_box(sub);
    };

    auto* simulate = app.add_subcommand("simulate", "Simulate a behavior and write its trajectory");
    simulate->add_option("--behavior", o.behavior, "Behavior id")->required();
    simulate->add_option("--agents", o.agents, "Agent count (default per behavior)")->check(CLI::PositiveNumber);
    simulate->add_option("--steps", o.steps, "Integration steps")->check(CLI::PositiveNumber);
    simulate->add_option("--dt", o.dt, "Time step (s)")->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", o.seed, "Seed");
    simulate->add_option("--out", o.out, "Output file (default stdout)");

    auto* embed = app.add_subcommand("embed", "Extract descriptors from trajectories");
    embed->add_option("--in", o.inputs, "Trajectory JSON files")->required();
    embed->add_flag("--standardize", o.standardize, "Z-score each descriptor across the inputs");
    embed->add_option("--out", o.out, "Output file (default stdout)");

    auto* graph_cmd = app.add_subcommand("graph", "Build a preference graph");
    graph_cmd->add_option("--in,--prefs", o.prefs, "Preferences (JSON Lines)")->required();
    graph_cmd->add_option("--participant", o.participant, "Individual graph for this participant");
    graph_cmd->add_option("--out", o.out, "Output file (default stdout)");

    auto* individual = app.add_subcommand("analyze-individual", "Preference polytope and Chebyshev center");
    prefs_and_features(individual);
    individual->add_option("--participant", o.participant, "Participant to analyze (default all rows)");
    individual->add_option("--out", o.out, "Output file (default stdout)");

    auto* group_cmd = app.add_subcommand("analyze-group", "Distinctiveness and clustering");
    prefs_and_features(group_cmd);
    group_cmd->add_option("--threshold", o.threshold, "Low/high distinctiveness cut")->check(CLI::NonNegativeNumber);
    group_cmd->add_option("--out", o.out, "Output file (default stdout)");

    auto* cohesion = app.add_subcommand("cohesion", "Population cohesion bound");
    prefs_and_features(cohesion);
    cohesion->add_option("--z", o.z, "Confidence Z-score (0 disables the band)")->check(CLI::NonNegativeNumber);
    cohesion->add_option("--levels", o.levels, "Coverage levels s")->delimiter(',')->check(CLI::PositiveNumber);
    cohesion->add_option("--out", o.out, "Output file (default stdout)");

    auto* synth = app.add_subcommand("synth", "Generate a planted synthetic population");
    synth->add_option("--features", o.features, "Features JSON (default: random features)");
    synth->add_option("--behaviors", o.behaviors, "Random behaviors when no features are given")->check(CLI::Range(2, 1000));
    synth->add_option("--q", o.q, "Random feature dimension")->check(CLI::PositiveNumber);
    synth->add_option("--features-out", o.features_out, "Write the random features here");
    synth->add_option("--participants", o.participants, "Population size")->check(CLI::PositiveNumber);
    synth->add_option("--center", o.center, "Population optimum, comma separated (default origin)");
    synth->add_option("--spread", o.spread, "Std of individual optima about the center")->check(CLI::NonNegativeNumber);
    synth->add_option("--noise", o.noise, "Std of the per-decision perturbation")->check(CLI::NonNegativeNumber);
    synth->add_option("--clusters", o.clusters, "1, or 2 for a planted split along the first axis")->check(CLI::Range(1, 2));
    synth->add_option("--separation", o.separation, "Cluster offset from the center")->check(CLI::NonNegativeNumber);
    synth->add_option("--minority", o.minority, "Size of the second cluster (default: alternate)")->check(CLI::NonNegativeNumber);
    synth->add_flag("--anonymize", o.anonymize, "Drop participant labels");
    synth->add_option("--seed", o.seed, "Seed");
    synth->add_option("--truth-out", o.truth_out, "Write planted optima here");
    synth->add_option("--out", o.out, "Output file (default stdout)");

    auto* serve = app.add_subcommand("serve", "Run the elicitation HTTP service");
    serve->add_option("--host", o.host, "Bind address");
    serve->add_option("--port", o.port, "Port")->check(CLI::Range(1, 65535));
    serve->add_option("--data", o.data, "Data directory (default TRUST_ATLAS_DATA or ./data)");
    serve->add_flag("--fixed-order", o.fixed_order, "Show pairs in canonical order instead of active selection");
    serve->add_option("--steps", o.catalog_steps, "Simulation steps for the behavior catalog")->check(CLI::PositiveNumber);
    serve->add_option("--z", o.z, "Confidence Z-score for population reports")->check(CLI::NonNegativeNumber);
    serve->add_option("--threshold", o.threshold, "Distinctiveness cut for population reports")->check(CLI::NonNegativeNumber);

    auto* plot = app.add_subcommand("export-plot", "Per-participant plot data");
    prefs_and_features(plot);
    plot->add_option("--trust-scores", o.trust_scores, "CSV participant,trust_score");
    plot->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    plot->add_option("--out", o.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("Usage", e.what());
        return kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(o);
        if (*embed) return cmd_embed(o);
        if (*graph_cmd) return cmd_graph(o);
        if (*individual) return cmd_analyze_individual(o);
        if (*group_cmd) return cmd_analyze_group(o);
        if (*cohesion) return cmd_cohesion(o);
        if (*synth) return cmd_synth(o);
        if (*serve) return cmd_serve(o);
        if (*plot) return cmd_export_plot(o);
    } catch (const Infeasible& e) {
        if (!e.output.is_null()) emit_json(o.out, e.output);
        report_error("Infeasible", e.message);
        return kExitInfeasible;
    } catch (const Error& e) {
        report_error(code_name(e.code()), e.what());
        return e.code() == ErrorCode::InvalidSpec ? kExitUsage : kExitData;
    } catch (const std::exception& e) {
        report_error("Internal", e.what());
        return kExitData;
    }
    return kExitUsage;
}
