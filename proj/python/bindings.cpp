#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "memnet/algorithms.hpp"
#include "memnet/analysis.hpp"
#include "memnet/error.hpp"
#include "memnet/io.hpp"
#include "memnet/oracle.hpp"
#include "memnet/scenario.hpp"

namespace py = pybind11;
using namespace memnet;

namespace {

py::dict solve_dict(const SolveResult& r) {
    py::dict d;
    d["potentials"] = r.potentials;
    d["edge_currents"] = r.edge_currents;
    d["source_current"] = r.source_current;
    d["kcl_residual"] = r.kcl_residual;
    d["relative_residual"] = r.relative_residual();
    return d;
}

py::dict path_dict(const PathResult& r) {
    py::dict d;
    d["on_edges"] = r.on_edges;
    d["paths"] = r.paths;
    d["path_edges"] = r.path_edges;
    d["hop_count"] = r.hop_count;
    d["geometric_length"] = r.geometric_length;
    d["degenerate"] = r.degenerate;
    d["cap_hit"] = r.cap_hit;
    d["dead_ends"] = r.dead_ends;
    d["disconnected_segments"] = r.disconnected_segments;
    return d;
}

py::dict trajectory_dict(const Trajectory& t) {
    py::dict d;
    d["edge_ids"] = t.edge_ids;
    d["times"] = t.times;
    d["resistances"] = t.resistances;
    d["source_current"] = t.source_current;
    d["elapsed"] = t.elapsed;
    d["steps_taken"] = t.steps_taken;
    d["status"] = std::string(to_string(t.status));
    d["reached_steady"] = t.reached_steady;
    d["max_relative_residual"] = t.max_relative_residual;
    return d;
}

py::tuple run_dict(const ShortestPathRun& r) {
    py::dict d = path_dict(r.result);
    d["trajectory"] = trajectory_dict(r.trajectory);
    return py::make_tuple(r.network, d);
}

oracle::Metric metric_of(const std::string& m) {
    if (m == "hop_count") return oracle::Metric::hop_count;
    if (m == "geometric_length") return oracle::Metric::geometric_length;
    throw InvalidArgument("metric must be 'hop_count' or 'geometric_length'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Memristive network simulator";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
    py::register_exception<SingularSystem>(m, "SingularSystem", error.ptr());
    py::register_exception<DisconnectedTerminals>(m, "DisconnectedTerminals", error.ptr());
    py::register_exception<SamplingFailure>(m, "SamplingFailure", error.ptr());
    py::register_exception<NoSolution>(m, "NoSolution", error.ptr());
    py::register_exception<ZeroCurrent>(m, "ZeroCurrent", error.ptr());
    py::register_exception<NonConvergence>(m, "NonConvergence", error.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

    py::class_<DeviceParams>(m, "DeviceParams")
        .def(py::init<>())
        .def(py::init([](double r_on, double r_off, double gamma, double i_threshold) {
                 DeviceParams p{r_on, r_off, gamma, i_threshold};
                 p.validate();
                 return p;
             }),
             py::arg("r_on") = 10.0, py::arg("r_off") = 200.0, py::arg("gamma") = 1.0e6,
             py::arg("i_threshold") = 0.01)
        .def_readwrite("r_on", &DeviceParams::r_on)
        .def_readwrite("r_off", &DeviceParams::r_off)
        .def_readwrite("gamma", &DeviceParams::gamma)
        .def_readwrite("i_threshold", &DeviceParams::i_threshold)
        .def("unit_on_resistance", &DeviceParams::unit_on_resistance)
        .def("unit_off_resistance", &DeviceParams::unit_off_resistance)
        .def("unit_on_threshold", &DeviceParams::unit_on_threshold);

    py::class_<Network>(m, "Network")
        .def(py::init<DeviceParams>(), py::arg("params") = DeviceParams{})
        .def("add_node", [](Network& n, double x, double y) { return n.add_node({x, y}); })
        .def("add_edge", &Network::add_edge)
        .def_property_readonly("node_count", &Network::node_count)
        .def_property_readonly("edge_count", &Network::edge_count)
        .def_property_readonly("params", &Network::params)
        .def("nodes",
             [](const Network& n) {
                 py::list out;
                 for (const Node& v : n.nodes()) out.append(py::make_tuple(v.id, v.position.x, v.position.y));
                 return out;
             })
        .def("edges",
             [](const Network& n) {
                 py::list out;
                 for (const Edge& e : n.edges()) out.append(py::make_tuple(e.id, e.from, e.to));
                 return out;
             })
        .def("unit_resistances",
             [](const Network& n) {
                 std::vector<double> r;
                 for (const Edge& e : n.edges()) r.push_back(e.unit.resistance());
                 return r;
             })
        .def("find_edge", &Network::find_edge)
        .def("reset_states", &Network::reset_states)
        .def("snapshot_json",
             [](const Network& n, const std::vector<NodeId>& highlight) { return snapshot_json(n, highlight, std::nullopt); },
             py::arg("highlight") = std::vector<NodeId>{});

    py::class_<RandomNetworkOptions>(m, "RandomNetworkOptions")
        .def(py::init<>())
        .def_readwrite("min_dist", &RandomNetworkOptions::min_dist)
        .def_readwrite("connect_radius", &RandomNetworkOptions::connect_radius)
        .def_readwrite("node_count", &RandomNetworkOptions::node_count)
        .def_readwrite("density", &RandomNetworkOptions::density)
        .def_readwrite("max_consecutive_rejections", &RandomNetworkOptions::max_consecutive_rejections);

    m.def("generate_grid", &generate_grid, py::arg("rows"), py::arg("cols"), py::arg("params") = DeviceParams{});
    m.def("generate_random", &generate_random, py::arg("n_scale"), py::arg("seed"),
          py::arg("params") = DeviceParams{}, py::arg("options") = RandomNetworkOptions{});
    m.def("remove_edges", [](const Network& n, const std::vector<EdgeId>& ids) { return remove_edges(n, ids); });
    m.def("nearest_node", [](const Network& n, double x, double y) { return nearest_node(n, {x, y}); });
    m.def("connected", &connected);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("max_steps", &SimConfig::max_steps)
        .def_readwrite("record_stride", &SimConfig::record_stride)
        .def_readwrite("max_change_fraction", &SimConfig::max_change_fraction)
        .def_property(
            "unipolar", [](const SimConfig& c) { return c.mode == DynamicsMode::unipolar; },
            [](SimConfig& c, bool u) { c.mode = u ? DynamicsMode::unipolar : DynamicsMode::bipolar; });

    m.def(
        "solve_dc",
        [](const Network& n, NodeId input, NodeId output, double volts) {
            return solve_dict(solve_dc(n, SourceSpec::pair(input, output, volts), SolveOptions{true}));
        },
        py::arg("net"), py::arg("input"), py::arg("output"), py::arg("volts"));
    m.def(
        "dense_solve",
        [](const Network& n, NodeId input, NodeId output, double volts) {
            return solve_dict(oracle::dense_solve(n, SourceSpec::pair(input, output, volts)));
        },
        py::arg("net"), py::arg("input"), py::arg("output"), py::arg("volts"));

    m.def(
        "apply_pulse",
        [](const Network& n, NodeId input, NodeId output, double amplitude, std::optional<double> duration,
           const SimConfig& cfg) {
            PulseOutcome r = apply_pulse(n, PulseSpec{input, output, amplitude, duration}, cfg);
            return py::make_tuple(std::move(r.network), trajectory_dict(r.trajectory));
        },
        py::arg("net"), py::arg("input"), py::arg("output"), py::arg("amplitude"), py::arg("duration") = py::none(),
        py::arg("sim") = SimConfig{});
    m.def("switching_onset_amplitude",
          [](const Network& n, NodeId input, NodeId output) { return switching_onset_amplitude(n, input, output); });

    m.def("classify_on", &classify_on);
    m.def(
        "solve_shortest_path",
        [](const Network& n, NodeId input, NodeId output, double amplitude, const SimConfig& cfg) {
            return run_dict(solve_shortest_path(n, input, output, amplitude, cfg));
        },
        py::arg("net"), py::arg("input"), py::arg("output"), py::arg("amplitude"), py::arg("sim") = SimConfig{});
    m.def(
        "heal",
        [](const Network& n, NodeId input, NodeId output, double amplitude, const SimConfig& cfg) {
            return run_dict(heal(n, input, output, amplitude, cfg));
        },
        py::arg("net"), py::arg("input"), py::arg("output"), py::arg("amplitude"), py::arg("sim") = SimConfig{});
    m.def(
        "solve_tsp",
        [](const Network& n, const std::vector<NodeId>& cities, std::size_t n_pulses, double onset_multiple,
           std::uint64_t seed, std::size_t passes, const SimConfig& cfg) {
            TspSchedule s;
            s.n_pulses = n_pulses;
            s.amplitude = Amplitude::onset_multiple(onset_multiple);
            s.seed = seed;
            s.duration_fraction = 1.0;
            const TourResult r = solve_tsp(n, cities, s, cfg, passes);
            py::dict d;
            d["valid"] = r.tour.valid;
            d["tour"] = r.tour.tour;
            d["order"] = r.tour.order;
            d["tour_length"] = r.tour.tour_length;
            d["on_edges"] = r.on_edges;
            d["initial_on_edges"] = r.initial_on_edges;
            d["post_process_passes"] = r.post_process_passes;
            d["stage_amplitudes"] = r.stage_amplitudes;
            d["stage_durations"] = r.stage_durations;
            return py::make_tuple(r.network, d);
        },
        py::arg("net"), py::arg("cities"), py::arg("n_pulses") = 100, py::arg("onset_multiple") = 1.1,
        py::arg("seed") = 1, py::arg("passes") = 2, py::arg("sim") = SimConfig{});

    m.def("current_entropy", [](const std::vector<double>& i) { return current_entropy(i); });

    m.def(
        "dijkstra",
        [](const Network& n, NodeId src, NodeId dst, const std::string& metric) {
            const oracle::GraphPath p = oracle::dijkstra(n, src, dst, metric_of(metric));
            py::dict d;
            d["nodes"] = p.nodes;
            d["edges"] = p.edges;
            d["weight"] = p.weight;
            return d;
        },
        py::arg("net"), py::arg("src"), py::arg("dst"), py::arg("metric") = "hop_count");
    m.def("brute_force_tsp", [](const std::vector<std::vector<double>>& d) {
        const oracle::Tour t = oracle::brute_force_tsp(d);
        return py::make_tuple(t.length, t.order);
    });

    m.def(
        "run_scenario",
        [](const std::string& config_text, const std::filesystem::path& out_dir) {
            const ScenarioConfig cfg = parse_config(config_text);
            ScenarioReport r;
            {
                py::gil_scoped_release release;
                r = run_scenario(cfg, out_dir);
            }
            return py::make_tuple(r.exit_code, r.summary_json);
        },
        py::arg("config_json"), py::arg("out_dir"));
}
