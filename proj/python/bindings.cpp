#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trust_atlas/embedding.hpp"
#include "trust_atlas/error.hpp"
#include "trust_atlas/group.hpp"
#include "trust_atlas/io.hpp"
#include "trust_atlas/lp.hpp"
#include "trust_atlas/service.hpp"

namespace py = pybind11;
using namespace trust_atlas;
using io::json;

namespace {

py::object to_python(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return py::none();
        case json::value_t::boolean: return py::bool_(j.get<bool>());
        case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
        case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
        case json::value_t::number_float: return py::float_(j.get<double>());
        case json::value_t::string: return py::str(j.get<std::string>());
        case json::value_t::array: {
            py::list out;
            for (const auto& v : j) out.append(to_python(v));
            return std::move(out);
        }
        case json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = to_python(it.value());
            return std::move(out);
        }
        default: return py::none();
    }
}

json from_python(const py::handle& o) {
    if (o.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(o)) return o.cast<bool>();
    if (py::isinstance<py::int_>(o)) return o.cast<std::int64_t>();
    if (py::isinstance<py::float_>(o)) return o.cast<double>();
    if (py::isinstance<py::str>(o)) return o.cast<std::string>();
    if (py::isinstance<py::dict>(o)) {
        json out = json::object();
        for (auto item : o.cast<py::dict>()) out[py::str(item.first).cast<std::string>()] = from_python(item.second);
        return out;
    }
    if (py::isinstance<py::sequence>(o)) {
        json out = json::array();
        for (auto item : o.cast<py::sequence>()) out.push_back(from_python(item));
        return out;
    }
    throw py::type_error("cannot convert object to JSON");
}

std::vector<geometry::Halfspace> halfspaces(const std::vector<std::pair<std::vector<double>, double>>& rows) {
    std::vector<geometry::Halfspace> out;
    for (const auto& [a, b] : rows) out.push_back({a, b, {}});
    return out;
}

lp::Relation relation(const std::string& s) {
    if (s == "<=") return lp::Relation::LessEqual;
    if (s == ">=") return lp::Relation::GreaterEqual;
    if (s == "==" || s == "=") return lp::Relation::Equal;
    throw Error(ErrorCode::MalformedProgram, "relation must be one of <=, >=, ==");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Swarm trust preference analysis";

    static py::exception<Error> error(m, "Error", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error.ptr())(py::str(e.what()));
            exc.attr("code") = py::str(std::string(code_name(e.code())));
            PyErr_SetObject(error.ptr(), exc.ptr());
        }
    });

    m.def(
        "solve_lp",
        [](const std::vector<double>& objective, const std::vector<std::tuple<std::vector<double>, std::string, double>>& rows,
           const std::vector<std::pair<std::optional<double>, std::optional<double>>>& bounds, bool maximize) {
            lp::LinearProgram program(objective.size(), maximize ? lp::Sense::Maximize : lp::Sense::Minimize);
            program.objective = objective;
            for (const auto& [a, rel, b] : rows) program.add(a, relation(rel), b);
            if (!bounds.empty() && bounds.size() != objective.size())
                throw Error(ErrorCode::MalformedProgram, "bounds must list every variable");
            for (std::size_t j = 0; j < bounds.size(); ++j) {
                if (bounds[j].first) program.set_lower(j, *bounds[j].first);
                if (bounds[j].second) program.set_upper(j, *bounds[j].second);
            }
            const auto s = lp::solve(program);
            py::dict out;
            out["status"] = lp::to_string(s.status);
            out["x"] = s.x;
            out["objective"] = s.objective_value;
            return out;
        },
        py::arg("objective"), py::arg("constraints") = std::vector<std::tuple<std::vector<double>, std::string, double>>{},
        py::arg("bounds") = std::vector<std::pair<std::optional<double>, std::optional<double>>>{},
        py::arg("maximize") = false,
        "Dense simplex. constraints: [(coeffs, '<=' | '>=' | '==', rhs)]; bounds: [(lower, upper)] with None for free.");

    m.def("behaviors", [] {
        std::vector<std::string> out;
        for (auto k : swarm::all_behaviors()) out.emplace_back(swarm::behavior_id(k));
        return out;
    });
    m.def(
        "simulate",
        [](const std::string& behavior, int steps, double dt, std::optional<std::uint64_t> seed, int agents) {
            auto spec = swarm::default_spec(swarm::parse_behavior(behavior));
            if (seed) spec.seed = *seed;
            if (agents > 0) spec.n_agents = agents;
            return to_python(io::to_json(swarm::simulate(spec, steps, dt)));
        },
        py::arg("behavior"), py::arg("steps") = 2000, py::arg("dt") = 0.05, py::arg("seed") = py::none(),
        py::arg("agents") = 0, "Trajectory as {behavior_id, dt, frames}.");
    m.def(
        "extract_features",
        [](const py::dict& trajectory) {
            return embedding::extract_features(io::trajectory_from_json(from_python(trajectory))).values;
        },
        py::arg("trajectory"));
    m.def("descriptor_names", &embedding::descriptor_names);

    m.def("trust_value", &geometry::trust_value, py::arg("x"), py::arg("optimum"));
    m.def(
        "halfspace_from_pair",
        [](const geometry::Vector& preferred, const geometry::Vector& other) {
            const auto h = geometry::halfspace_from_pair(preferred, other);
            return std::make_pair(h.a, h.b);
        },
        py::arg("preferred"), py::arg("other"), "Unit-normal (a, b) with a.x <= b on the preferred side.");
    m.def(
        "chebyshev_center",
        [](const std::vector<std::pair<std::vector<double>, double>>& rows, std::size_t dim, double box) {
            geometry::PreferencePolytope p;
            p.dim = dim;
            p.halfspaces = halfspaces(rows);
            p.box_bound = box;
            return to_python(io::to_json(geometry::chebyshev_center(p)));
        },
        py::arg("halfspaces"), py::arg("dim"), py::arg("box") = geometry::kDefaultBox);

    m.def("norm_cdf", &group::norm_cdf, py::arg("x"));
    m.def("inv_norm_cdf", &group::inv_norm_cdf, py::arg("p"));
    m.def("confidence_delta", &group::confidence_delta, py::arg("samples"), py::arg("z") = group::kDefaultZ);
    m.def(
        "solve_distinctiveness",
        [](const std::map<std::string, std::vector<std::pair<std::vector<double>, double>>>& people, double box) {
            std::vector<group::Individual> individuals;
            for (const auto& [who, rows] : people) individuals.push_back({who, halfspaces(rows)});
            return to_python(io::to_json(group::solve_distinctiveness(individuals, box)));
        },
        py::arg("individuals"), py::arg("box") = geometry::kDefaultBox,
        "individuals: {participant: [(a, b), ...]}");
    m.def(
        "solve_cohesion",
        [](const std::vector<std::tuple<std::vector<double>, double, double, double>>& slabs, std::size_t dim,
           double box) {
            std::vector<group::SlabInput> in;
            for (const auto& [a, b, p, delta] : slabs) in.push_back({{a, b, {}}, p, delta, 0});
            return to_python(io::cohesion_to_json(group::solve_cohesion(in, dim, box), {}));
        },
        py::arg("slabs"), py::arg("dim"), py::arg("box") = geometry::kDefaultBox,
        "slabs: [(a, b, probability, delta), ...]");
    m.def("coverage_fraction", &group::coverage_fraction, py::arg("centers"), py::arg("mean"), py::arg("alpha"),
          py::arg("s"));

    m.def(
        "load_preferences",
        [](const std::string& path) {
            py::list out;
            for (const auto& p : io::load_preferences(path)) out.append(to_python(io::to_json(p)));
            return out;
        },
        py::arg("path"));

    py::class_<service::Service>(m, "Service")
        .def(py::init([](const std::map<std::string, std::vector<double>>& features, std::optional<std::string> data_dir,
                         const std::string& mode) {
                 service::ServiceOptions o;
                 if (features.empty())
                     o.catalog = service::default_catalog();
                 else
                     o.catalog.features = features;
                 if (data_dir) o.data_dir = *data_dir;
                 o.mode = service::parse_selection_mode(mode);
                 return std::make_unique<service::Service>(std::move(o));
             }),
             py::arg("features") = std::map<std::string, std::vector<double>>{}, py::arg("data_dir") = py::none(),
             py::arg("mode") = "active")
        .def("create_session",
             [](service::Service& s, const std::string& participant, std::vector<std::string> behaviors) {
                 return s.create_session(participant, std::move(behaviors));
             },
             py::arg("participant"), py::arg("behavior_set") = std::vector<std::string>{})
        .def("next_pair",
             [](service::Service& s, const std::string& id) -> py::object {
                 const auto n = s.next_pair(id);
                 py::dict out;
                 if (n.complete) {
                     out["complete"] = true;
                     return std::move(out);
                 }
                 out["pair_id"] = n.pair_id;
                 out["first"] = n.first;
                 out["second"] = n.second;
                 return std::move(out);
             },
             py::arg("session_id"))
        .def("record_preference", &service::Service::record_preference, py::arg("session_id"), py::arg("pair_id"),
             py::arg("preferred"))
        .def("session_report", [](service::Service& s, const std::string& id) { return to_python(s.session_report(id)); },
             py::arg("session_id"))
        .def("population_report", [](service::Service& s) { return to_python(s.population_report()); });
}
