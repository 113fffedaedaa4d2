#include "memnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "memnet/analysis.hpp"
#include "memnet/error.hpp"
#include "memnet/io.hpp"
#include "memnet/oracle.hpp"

namespace memnet {

using ojson = nlohmann::ordered_json;

NodeId NodeRef::resolve(const Network& net) const {
    if (id) {
        if (!net.has_node(*id)) throw InvalidArgument("unknown node id " + std::to_string(*id));
        return *id;
    }
    return nearest_node(net, near);
}

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::shortest_path: return "shortest_path";
        case Algorithm::heal: return "heal";
        case Algorithm::tsp: return "tsp";
        case Algorithm::entropy_study: return "entropy_study";
    }
    return "?";
}

namespace {

// ---------------------------------------------------------------- parsing

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ConfigError("config field '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const ojson& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) bad(path.empty() ? "<root>" : path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
        if (!known) bad(join(path, it.key()), "unknown key");
    }
}

double number(const ojson& obj, const std::string& path, const char* key, double def) {
    if (!obj.contains(key)) return def;
    const ojson& v = obj[key];
    if (!v.is_number()) bad(join(path, key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad(join(path, key), "must be finite");
    return d;
}

double positive(const ojson& obj, const std::string& path, const char* key, double def) {
    const double d = number(obj, path, key, def);
    if (!(d > 0.0)) bad(join(path, key), "must be positive");
    return d;
}

std::uint64_t count(const ojson& obj, const std::string& path, const char* key, std::uint64_t def) {
    if (!obj.contains(key)) return def;
    const ojson& v = obj[key];
    if (!v.is_number_unsigned()) bad(join(path, key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string text(const ojson& obj, const std::string& path, const char* key, const std::string& def) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_string()) bad(join(path, key), "expected a string");
    return obj[key].get<std::string>();
}

bool flag(const ojson& obj, const std::string& path, const char* key, bool def) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_boolean()) bad(join(path, key), "expected true or false");
    return obj[key].get<bool>();
}

NodeRef node_ref(const ojson& v, const std::string& path) {
    if (v.is_number_unsigned()) {
        const auto id = v.get<std::uint64_t>();
        if (id > std::numeric_limits<NodeId>::max()) bad(path, "node id out of range");
        return NodeRef::by_id(static_cast<NodeId>(id));
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return NodeRef::nearest(Point{v[0].get<double>(), v[1].get<double>()});
    bad(path, "expected a node id or an [x, y] point");
}

Amplitude amplitude(const ojson& v, const std::string& path) {
    if (v.is_number()) return Amplitude::volts(v.get<double>());
    check_keys(v, path, {"volts", "onset_multiple"});
    if (v.size() != 1) bad(path, "give exactly one of volts or onset_multiple");
    if (v.contains("volts")) return Amplitude::volts(number(v, path, "volts", 0.0));
    return Amplitude::onset_multiple(positive(v, path, "onset_multiple", 1.0));
}

NetworkSpec network_spec(const ojson& j, const std::string& path) {
    NetworkSpec s;
    const std::string kind = text(j, path, "kind", "grid");
    if (kind == "grid") {
        check_keys(j, path, {"kind", "rows", "cols"});
        s.kind = NetworkSpec::Kind::grid;
        s.rows = static_cast<int>(count(j, path, "rows", 11));
        s.cols = static_cast<int>(count(j, path, "cols", 11));
        if (s.rows < 2 || s.cols < 2) bad(path, "grid needs at least 2 rows and 2 columns");
    } else if (kind == "random") {
        check_keys(j, path,
                   {"kind", "n_scale", "seed", "node_count", "density", "min_dist", "connect_radius",
                    "max_consecutive_rejections"});
        s.kind = NetworkSpec::Kind::random;
        s.n_scale = static_cast<int>(count(j, path, "n_scale", 20));
        if (s.n_scale < 2) bad(join(path, "n_scale"), "must be at least 2");
        s.seed = count(j, path, "seed", 1);
        s.random.node_count = count(j, path, "node_count", 0);
        s.random.density = positive(j, path, "density", s.random.density);
        s.random.min_dist = positive(j, path, "min_dist", s.random.min_dist);
        s.random.connect_radius = positive(j, path, "connect_radius", s.random.connect_radius);
        s.random.max_consecutive_rejections =
            count(j, path, "max_consecutive_rejections", s.random.max_consecutive_rejections);
    } else {
        bad(join(path, "kind"), "expected grid or random");
    }
    return s;
}

SimConfig sim_config(const ojson& j, const std::string& path) {
    check_keys(j, path, {"dt", "max_steps", "record_stride", "drive", "max_change_fraction"});
    SimConfig c;
    c.dt = number(j, path, "dt", 0.0);
    if (c.dt < 0.0) bad(join(path, "dt"), "must be >= 0");
    c.max_steps = count(j, path, "max_steps", c.max_steps);
    c.record_stride = count(j, path, "record_stride", c.record_stride);
    c.max_change_fraction = positive(j, path, "max_change_fraction", c.max_change_fraction);
    const std::string drive = text(j, path, "drive", "unit_current");
    if (drive == "unit_current")
        c.drive = ThresholdDrive::unit_current;
    else if (drive == "branch_current")
        c.drive = ThresholdDrive::branch_current;
    else
        bad(join(path, "drive"), "expected unit_current or branch_current");
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        bad(path, e.what());
    }
    return c;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text_in) {
    ojson j;
    try {
        j = ojson::parse(text_in);
    } catch (const ojson::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    check_keys(j, "",
               {"name", "network", "device", "algorithm", "terminals", "cities", "amplitude", "post_process",
                "damage", "section_column", "sweep", "tsp", "sim", "render", "out_dir"});

    ScenarioConfig c;
    c.name = text(j, "", "name", c.name);
    if (j.contains("network")) c.network = network_spec(j["network"], "network");

    if (j.contains("device")) {
        const ojson& d = j["device"];
        check_keys(d, "device", {"r_on", "r_off", "gamma", "i_threshold"});
        c.device.r_on = positive(d, "device", "r_on", c.device.r_on);
        c.device.r_off = positive(d, "device", "r_off", c.device.r_off);
        c.device.gamma = positive(d, "device", "gamma", c.device.gamma);
        c.device.i_threshold = number(d, "device", "i_threshold", c.device.i_threshold);
        try {
            c.device.validate();
        } catch (const InvalidArgument& e) {
            bad("device", e.what());
        }
    }

    const std::string algo = text(j, "", "algorithm", "shortest_path");
    if (algo == "shortest_path")
        c.algorithm = Algorithm::shortest_path;
    else if (algo == "heal")
        c.algorithm = Algorithm::heal;
    else if (algo == "tsp")
        c.algorithm = Algorithm::tsp;
    else if (algo == "entropy_study")
        c.algorithm = Algorithm::entropy_study;
    else
        bad("algorithm", "expected shortest_path, heal, tsp or entropy_study");

    if (j.contains("terminals")) {
        const ojson& t = j["terminals"];
        check_keys(t, "terminals", {"input", "output"});
        if (!t.contains("input") || !t.contains("output")) bad("terminals", "needs input and output");
        c.input = node_ref(t["input"], "terminals.input");
        c.output = node_ref(t["output"], "terminals.output");
    } else if (c.algorithm != Algorithm::tsp) {
        bad("terminals", "required for " + algo);
    }

    if (j.contains("cities")) {
        if (!j["cities"].is_array()) bad("cities", "expected an array");
        for (std::size_t k = 0; k < j["cities"].size(); ++k)
            c.cities.push_back(node_ref(j["cities"][k], "cities[" + std::to_string(k) + "]"));
    }
    if (c.algorithm == Algorithm::tsp && c.cities.size() < 3) bad("cities", "tsp needs at least 3 cities");

    if (j.contains("amplitude")) c.amplitude = amplitude(j["amplitude"], "amplitude");

    if (j.contains("post_process")) {
        const ojson& p = j["post_process"];
        check_keys(p, "post_process", {"passes", "amplitude"});
        c.post_passes = count(p, "post_process", "passes", 1);
        if (p.contains("amplitude")) c.post_amplitude = amplitude(p["amplitude"], "post_process.amplitude");
    }

    if (j.contains("damage")) {
        const ojson& d = j["damage"];
        if (!d.is_array()) bad("damage", "expected an array of node pairs");
        for (std::size_t k = 0; k < d.size(); ++k) {
            const std::string path = "damage[" + std::to_string(k) + "]";
            if (!d[k].is_array() || d[k].size() != 2) bad(path, "expected a pair of nodes");
            c.damage.emplace_back(node_ref(d[k][0], path + "[0]"), node_ref(d[k][1], path + "[1]"));
        }
    }
    if (c.algorithm == Algorithm::heal && c.damage.empty()) bad("damage", "heal needs at least one damaged edge");

    c.section_column = static_cast<int>(count(j, "", "section_column", 0));

    if (j.contains("sweep")) {
        const ojson& s = j["sweep"];
        if (!s.is_array()) bad("sweep", "expected an array");
        for (std::size_t k = 0; k < s.size(); ++k) {
            const std::string path = "sweep[" + std::to_string(k) + "]";
            check_keys(s[k], path, {"r_on", "volts"});
            c.sweep.push_back(SweepPoint{positive(s[k], path, "r_on", 10.0), number(s[k], path, "volts", 6.0)});
            if (!(c.sweep.back().r_on < c.device.r_off)) bad(path + ".r_on", "must be below device.r_off");
        }
    }
    if (c.algorithm == Algorithm::entropy_study && c.sweep.empty()) bad("sweep", "entropy_study needs a sweep");

    c.tsp.seed = c.network.seed;
    if (j.contains("tsp")) {
        const ojson& t = j["tsp"];
        check_keys(t, "tsp", {"n_pulses", "duration", "duration_fraction", "seed", "passes"});
        c.tsp.n_pulses = count(t, "tsp", "n_pulses", c.tsp.n_pulses);
        if (t.contains("duration")) c.tsp.duration = positive(t, "tsp", "duration", 1.0);
        c.tsp.duration_fraction = positive(t, "tsp", "duration_fraction", c.tsp.duration_fraction);
        c.tsp.seed = count(t, "tsp", "seed", c.tsp.seed);
        c.tsp_passes = count(t, "tsp", "passes", c.tsp_passes);
    }

    if (j.contains("sim")) c.sim = sim_config(j["sim"], "sim");
    c.render = flag(j, "", "render", c.render);
    c.out_dir = text(j, "", "out_dir", c.out_dir.string());
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

void override_seed(ScenarioConfig& cfg, std::uint64_t seed) {
    cfg.network.seed = seed;
    cfg.tsp.seed = seed;
}

Network build_network(const ScenarioConfig& cfg) {
    if (cfg.network.kind == NetworkSpec::Kind::grid) return generate_grid(cfg.network.rows, cfg.network.cols, cfg.device);
    return generate_random(cfg.network.n_scale, cfg.network.seed, cfg.device, cfg.network.random);
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const DisconnectedTerminals*>(&e)) return 4;
    if (dynamic_cast<const NonConvergence*>(&e) || dynamic_cast<const NoSolution*>(&e)) return 3;
    if (dynamic_cast<const InvalidArgument*>(&e)) return 2;
    return 1;
}

namespace {

// ---------------------------------------------------------------- running

struct Writer {
    std::filesystem::path dir;
    ScenarioReport& report;
    void put(const std::string& name, std::string_view content) {
        write_file(dir / name, content);
        report.files.push_back(dir / name);
    }
};

struct Summary {
    ojson json = ojson::object();
    std::vector<std::string> lines;

    template <class T>
    void add(const std::string& key, const T& value, const std::string& line) {
        json[key] = value;
        lines.push_back(line);
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string yes(bool b) { return b ? "true" : "false"; }

void require_converged(const Trajectory& t, const std::string& what) {
    if (t.status == PulseStatus::max_steps_exhausted)
        throw NonConvergence(what + ": no steady state within " + std::to_string(t.steps_taken) + " steps");
}

std::vector<EdgeId> sorted(std::vector<EdgeId> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::optional<CrossSection> section_for(const ScenarioConfig& cfg, const Network& net, NodeId in, NodeId out) {
    if (cfg.section_column <= 0) return std::nullopt;
    if (!net.grid()) throw ConfigError("config field 'section_column': needs a grid network");
    return grid_cross_section(net, cfg.section_column, in, out);
}

// Largest increase between consecutive finite entropy samples over the last
// half of the trace.
double tail_max_increase(const EntropyTrace& e) {
    double worst = 0.0;
    for (std::size_t k = e.values.size() / 2 + 1; k < e.values.size(); ++k)
        if (std::isfinite(e.values[k]) && std::isfinite(e.values[k - 1]))
            worst = std::max(worst, e.values[k] - e.values[k - 1]);
    return worst;
}

double last_finite(const std::vector<double>& v) {
    for (auto it = v.rbegin(); it != v.rend(); ++it)
        if (std::isfinite(*it)) return *it;
    return std::numeric_limits<double>::quiet_NaN();
}

// Copy of the component containing `root`, device states kept.
Network component_of(const Network& net, NodeId root) {
    const std::vector<int> labels = component_labels(net);
    const int want = labels[net.node_index(root)];
    Network sub(net.params());
    for (std::size_t k = 0; k < net.node_count(); ++k)
        if (labels[k] == want) sub.insert_node(net.nodes()[k]);
    for (const Edge& e : net.edges())
        if (labels[net.node_index(e.from)] == want) sub.insert_edge(e);
    return sub;
}

// Sparse vs dense currents on the terminals' component, relative to the
// largest current.
std::optional<double> dense_agreement(const Network& net, NodeId in, NodeId out, double volts) {
    const Network sub = component_of(net, in);
    if (sub.node_count() > 500) return std::nullopt;
    const SourceSpec src = SourceSpec::pair(in, out, volts);
    const SolveResult a = solve_dc(net, src, SolveOptions{true});
    const SolveResult b = oracle::dense_solve(sub, src);
    double scale = 0.0, diff = 0.0;
    for (const Edge& e : sub.edges()) {
        const double ia = a.current(net, e.id), ib = b.current(sub, e.id);
        scale = std::max(scale, std::abs(ib));
        diff = std::max(diff, std::abs(ia - ib));
    }
    return scale > 0.0 ? diff / scale : diff;
}

void render_pair(Writer& w, const std::string& stem, const Network& net, std::vector<NodeId> highlight,
                 const std::optional<PulseSpec>& pulse) {
    w.put(stem + ".svg", render_svg(net, highlight, RenderMode::resistance));
    if (pulse) {
        const SolveResult r = solve_dc(net, SourceSpec::pair(pulse->input, pulse->output, pulse->amplitude),
                                       SolveOptions{true});
        w.put(stem + "_currents.svg", render_svg(net, highlight, RenderMode::current, &r));
    }
}

std::string label_of(std::string prefix) {
    std::replace(prefix.begin(), prefix.end(), '_', ' ');
    return prefix;
}

void add_path_report(Summary& s, ojson& oracle_json, const std::string& prefix, const Network& net,
                     const PathResult& r, NodeId in, NodeId out) {
    const std::string label = label_of(prefix);
    const oracle::GraphPath hop = oracle::dijkstra(net, in, out, oracle::Metric::hop_count);
    const oracle::GraphPath geo = oracle::dijkstra(net, in, out, oracle::Metric::geometric_length);
    const bool hops_match = r.hop_count == hop.edges.size();
    const std::vector<EdgeId> on = sorted(r.on_edges);
    const bool set_equal = on == sorted(hop.edges);
    const double ratio = r.geometric_length / geo.weight;
    bool all_optimal = !r.hop_counts.empty();
    for (std::size_t h : r.hop_counts) all_optimal = all_optimal && h == hop.edges.size();

    s.add(prefix + "on_edges", on.size(), label + "ON units = " + std::to_string(on.size()));
    s.add(prefix + "path_hops", r.hop_count,
          label + "path hops = " + std::to_string(r.hop_count) + ", matches oracle: " + yes(hops_match));
    s.add(prefix + "matches_oracle", hops_match,
          label + "ON set equals oracle path: " + yes(set_equal));
    s.json[prefix + "on_set_equals_oracle_path"] = set_equal;
    s.add(prefix + "path_length", r.geometric_length,
          label + "path length = " + fmt(r.geometric_length) + " (oracle " + fmt(geo.weight) +
              ", ratio " + fmt(ratio) + ")");
    s.json[prefix + "length_ratio"] = ratio;
    s.add(prefix + "paths_found", r.paths.size(),
          label + "paths found = " + std::to_string(r.paths.size()) + (r.cap_hit ? " (capped)" : "") +
              ", all hop-optimal: " + yes(all_optimal) + ", degenerate: " + yes(r.degenerate));
    s.json[prefix + "all_paths_hop_optimal"] = all_optimal;
    s.json[prefix + "degenerate"] = r.degenerate;
    s.add(prefix + "dead_ends", r.dead_ends.size(),
          label + "dead ends = " + std::to_string(r.dead_ends.size()) +
              ", disconnected segments = " + std::to_string(r.disconnected_segments));
    s.json[prefix + "disconnected_segments"] = r.disconnected_segments;

    oracle_json[prefix + "dijkstra_hops"] = hop.edges.size();
    oracle_json[prefix + "dijkstra_hop_path_edges"] = hop.edges;
    oracle_json[prefix + "dijkstra_length"] = geo.weight;
    oracle_json[prefix + "path_hops"] = r.hop_count;
    oracle_json[prefix + "path_length"] = r.geometric_length;
    oracle_json[prefix + "hops_match"] = hops_match;
    oracle_json[prefix + "on_set_equals_oracle_path"] = set_equal;
    oracle_json[prefix + "length_ratio"] = ratio;
}

void add_pulse_report(Summary& s, const std::string& prefix, const Trajectory& t, double volts) {
    const std::string label = label_of(prefix);
    s.add(prefix + "amplitude", volts, label + "amplitude = " + fmt(volts) + " V");
    s.add(prefix + "status", std::string(to_string(t.status)),
          label + "pulse status = " + to_string(t.status) + " after " + std::to_string(t.steps_taken) +
              " steps, " + fmt(t.elapsed) + " s");
    s.json[prefix + "steps"] = t.steps_taken;
    s.json[prefix + "elapsed"] = t.elapsed;
    s.add(prefix + "max_relative_kcl_residual", t.max_relative_residual,
          label + "max relative KCL residual = " + fmt(t.max_relative_residual));
}

void add_entropy(Summary& s, Writer& w, const std::string& stem, const Trajectory& t,
                 const std::optional<CrossSection>& section, std::span<const EdgeId> tracked) {
    const EntropyTrace e = entropy_trace(t, section);
    const double final_entropy = last_finite(e.values);
    const double tail = tail_max_increase(e);
    s.add(stem + "_final_entropy", final_entropy,
          stem + " final " + (section ? "cross-section" : "network") + " entropy = " + fmt(final_entropy) +
              " nats, largest tail increase = " + fmt(tail));
    s.json[stem + "_tail_max_increase"] = tail;
    w.put(stem + ".csv", trace_csv(t, e, tracked));
}

void two_sided(Summary& s, const Network& net, const Trajectory& t, const std::vector<EdgeId>& path_edges) {
    if (path_edges.size() < 3) return;
    const auto times = first_crossing_times(t, path_edges, net.params().unit_on_threshold());
    if (!std::all_of(times.begin(), times.end(), [](const auto& v) { return v.has_value(); })) return;
    std::size_t arg = 0;
    for (std::size_t k = 1; k < times.size(); ++k)
        if (*times[k] > *times[arg]) arg = k;
    const double peak = *times[arg];
    const bool interior = *times.front() < peak && *times.back() < peak;
    std::vector<double> out;
    for (const auto& v : times) out.push_back(*v);
    s.add("crossing_times", out, "two-sided emergence (latest ON crossing strictly inside the path): " + yes(interior));
    s.json["two_sided_emergence"] = interior;
}

void run_shortest(const ScenarioConfig& cfg, Writer& w, Summary& s, ojson& oj) {
    Network net = build_network(cfg);
    const NodeId in = cfg.input.resolve(net), out = cfg.output.resolve(net);
    if (!connected(net, in, out)) throw DisconnectedTerminals("terminals are not connected");
    const std::vector<NodeId> hl{in, out};
    w.put("initial.json", snapshot_json(net, hl, std::nullopt));

    const double volts = cfg.amplitude.resolve(net, in, out, cfg.sim.drive);
    ShortestPathRun run = solve_shortest_path(net, in, out, volts, cfg.sim);
    require_converged(run.trajectory, "shortest-path pulse");
    s.add("input", in, "terminals = " + std::to_string(in) + " -> " + std::to_string(out));
    s.json["output"] = out;
    add_pulse_report(s, "", run.trajectory, volts);
    add_path_report(s, oj, "", run.network, run.result, in, out);

    const oracle::GraphPath hop = oracle::dijkstra(net, in, out, oracle::Metric::hop_count);
    if (net.grid()) two_sided(s, net, run.trajectory, hop.edges);
    add_entropy(s, w, "trace", run.trajectory, section_for(cfg, net, in, out), hop.edges);
    if (auto d = dense_agreement(run.network, in, out, volts)) {
        oj["dense_vs_sparse_current_rel_diff"] = *d;
        s.add("dense_agreement", *d, "dense vs sparse solve, relative current difference = " + fmt(*d));
    }

    const PulseSpec pulse{in, out, volts, std::nullopt};
    w.put("final.json", snapshot_json(run.network, hl, pulse));
    if (cfg.render) render_pair(w, "final", run.network, hl, pulse);

    if (cfg.post_passes > 0) {
        const PostProcessRun pp = post_process_path(run.network, run.result.on_edges, in, out,
                                                    cfg.post_amplitude.value_or(cfg.amplitude), cfg.sim,
                                                    cfg.post_passes);
        s.add("post_passes", pp.passes_run, "post-processing passes = " + std::to_string(pp.passes_run));
        // Oracle distances are those of the full network: the reduced network
        // is a subgraph, so its optimum can only be longer.
        const oracle::GraphPath geo = oracle::dijkstra(net, in, out, oracle::Metric::geometric_length);
        const double ratio = pp.result.geometric_length / geo.weight;
        s.add("post_on_edges", pp.on_edges.size(), "post ON units = " + std::to_string(pp.on_edges.size()));
        s.add("post_path_length", pp.result.geometric_length,
              "post path length = " + fmt(pp.result.geometric_length) + " (oracle " + fmt(geo.weight) + ", ratio " +
                  fmt(ratio) + ")");
        s.json["post_length_ratio"] = ratio;
        s.json["post_dead_ends"] = pp.result.dead_ends.size();
        s.json["post_max_relative_kcl_residual"] = pp.max_relative_residual;
        oj["post_length_ratio"] = ratio;
        w.put("post.json", snapshot_json(pp.network, hl, std::nullopt));
        if (cfg.render) render_pair(w, "post", pp.network, hl, std::nullopt);
    }
}

void run_heal(const ScenarioConfig& cfg, Writer& w, Summary& s, ojson& oj) {
    Network net = build_network(cfg);
    const NodeId in = cfg.input.resolve(net), out = cfg.output.resolve(net);
    if (!connected(net, in, out)) throw DisconnectedTerminals("terminals are not connected");
    const std::vector<NodeId> hl{in, out};
    const double volts = cfg.amplitude.resolve(net, in, out, cfg.sim.drive);
    const PulseSpec pulse{in, out, volts, std::nullopt};

    const ShortestPathRun solved = solve_shortest_path(net, in, out, volts, cfg.sim);
    require_converged(solved.trajectory, "initial pulse");
    add_path_report(s, oj, "initial_", solved.network, solved.result, in, out);
    w.put("solved.json", snapshot_json(solved.network, hl, pulse));

    std::vector<EdgeId> removed;
    for (const auto& [a, b] : cfg.damage) {
        const NodeId na = a.resolve(net), nb = b.resolve(net);
        const auto e = net.find_edge(na, nb);
        if (!e) throw ConfigError("config field 'damage': no edge between " + std::to_string(na) + " and " +
                                  std::to_string(nb));
        removed.push_back(*e);
    }
    const Network damaged = remove_edges(solved.network, removed);
    if (!connected(damaged, in, out)) throw DisconnectedTerminals("damage disconnects the terminals");
    s.add("removed_edges", removed, "removed units = " + std::to_string(removed.size()));
    w.put("damaged.json", snapshot_json(damaged, hl, pulse));

    const ShortestPathRun healed = heal(damaged, in, out, volts, cfg.sim);
    require_converged(healed.trajectory, "heal pulse");
    add_pulse_report(s, "heal_", healed.trajectory, volts);

    const oracle::GraphPath hop = oracle::dijkstra(damaged, in, out, oracle::Metric::hop_count);
    bool valid = !healed.result.path_edges.empty();
    for (const auto& p : healed.result.path_edges)
        for (EdgeId e : p) valid = valid && damaged.has_edge(e);
    const bool optimal = healed.result.hop_count == hop.edges.size();
    s.add("healed_valid", valid, "healed path valid in damaged graph: " + yes(valid));
    s.add("healed_hops", healed.result.hop_count,
          "healed hops = " + std::to_string(healed.result.hop_count) + ", damaged-graph oracle hops = " +
              std::to_string(hop.edges.size()) + ", optimal: " + yes(optimal));
    s.json["healed_optimal"] = optimal;
    oj["damaged_dijkstra_hops"] = hop.edges.size();
    oj["healed_hops"] = healed.result.hop_count;
    oj["healed_optimal"] = optimal;
    add_entropy(s, w, "heal_trace", healed.trajectory, std::nullopt, hop.edges);

    w.put("healed.json", snapshot_json(healed.network, hl, pulse));
    if (cfg.render) {
        render_pair(w, "solved", solved.network, hl, std::nullopt);
        render_pair(w, "damaged", damaged, hl, std::nullopt);
        render_pair(w, "healed", healed.network, hl, pulse);
    }
}

void run_entropy(const ScenarioConfig& cfg, Writer& w, Summary& s, ojson&) {
    std::vector<double> finals;
    ojson points = ojson::array();
    for (const SweepPoint& pt : cfg.sweep) {
        ScenarioConfig c = cfg;
        c.device.r_on = pt.r_on;
        Network net = build_network(c);
        const NodeId in = c.input.resolve(net), out = c.output.resolve(net);
        if (!connected(net, in, out)) throw DisconnectedTerminals("terminals are not connected");
        SimConfig sim = c.sim;
        sim.mode = DynamicsMode::bipolar;
        const PulseOutcome po = apply_pulse(net, PulseSpec{in, out, pt.volts, std::nullopt}, sim);
        require_converged(po.trajectory, "entropy-study pulse");
        const std::optional<CrossSection> section = section_for(c, net, in, out);
        const EntropyTrace e = entropy_trace(po.trajectory, section);
        const double final_entropy = last_finite(e.values);
        const double tail = tail_max_increase(e);
        const double ratio = c.device.r_off / pt.r_on;
        finals.push_back(final_entropy);

        char stem[64];
        std::snprintf(stem, sizeof stem, "ratio_%g", ratio);
        const std::vector<EdgeId> tracked = section ? section->edges : std::vector<EdgeId>{};
        w.put(std::string(stem) + ".csv", trace_csv(po.trajectory, e, tracked));
        w.put(std::string(stem) + ".json", snapshot_json(po.network, std::vector<NodeId>{in, out}, std::nullopt));
        if (c.render) w.put(std::string(stem) + ".svg", render_svg(po.network, std::vector<NodeId>{in, out},
                                                                    RenderMode::resistance));
        const std::size_t on = classify_on(po.network).size();
        points.push_back({{"ratio", ratio}, {"r_on", pt.r_on}, {"volts", pt.volts}, {"final_entropy", final_entropy},
                          {"tail_max_increase", tail}, {"on_edges", on}, {"steps", po.trajectory.steps_taken},
                          {"max_relative_kcl_residual", po.trajectory.max_relative_residual}});
        s.lines.push_back("ratio " + fmt(ratio) + " at " + fmt(pt.volts) + " V: final entropy = " +
                          fmt(final_entropy) + " nats, largest tail increase = " + fmt(tail) +
                          ", ON units = " + std::to_string(on));
    }
    s.json["sweep"] = points;
    // Points are listed with decreasing ratio; entropy should rise along the list.
    bool increasing = true;
    for (std::size_t k = 1; k < finals.size(); ++k) increasing = increasing && finals[k] > finals[k - 1];
    s.add("entropy_increases_as_ratio_decreases", increasing,
          "entropy increases as the ratio decreases: " + yes(increasing));
}

void run_tsp(const ScenarioConfig& cfg, Writer& w, Summary& s, ojson& oj) {
    Network net = build_network(cfg);
    std::vector<NodeId> cities;
    for (const NodeRef& r : cfg.cities) cities.push_back(r.resolve(net));
    w.put("initial.json", snapshot_json(net, cities, std::nullopt));

    TspSchedule sched = cfg.tsp;
    sched.amplitude = cfg.amplitude;
    sched.post_amplitude = cfg.post_amplitude;
    const TourResult r = solve_tsp(net, cities, sched, cfg.sim, cfg.tsp_passes);

    const oracle::Tour best =
        oracle::brute_force_tsp(oracle::city_distances(net, cities, oracle::Metric::geometric_length));
    s.add("cities", cities, "cities = " + std::to_string(cities.size()));
    s.add("stage_amplitudes", r.stage_amplitudes, "stages run = " + std::to_string(r.stage_amplitudes.size()) +
                                                      ", pulses applied = " + std::to_string(r.pulses_applied));
    s.json["stage_durations"] = r.stage_durations;
    s.add("initial_on_edges", r.initial_on_edges.size(),
          "ON units: initial = " + std::to_string(r.initial_on_edges.size()) +
              ", final = " + std::to_string(r.on_edges.size()));
    s.json["final_on_edges"] = r.on_edges.size();
    s.add("tour_valid", r.tour.valid, "valid closed tour: " + yes(r.tour.valid));
    const double ratio = r.tour.valid ? r.tour.tour_length / best.length : std::numeric_limits<double>::quiet_NaN();
    s.add("tour_length", r.tour.tour_length,
          "tour length = " + fmt(r.tour.tour_length) + " (oracle optimum " + fmt(best.length) + ")");
    s.json["tour_order"] = r.tour.order;
    s.json["optimum_length"] = best.length;
    s.add("max_relative_kcl_residual", r.max_relative_residual,
          "max relative KCL residual = " + fmt(r.max_relative_residual));
    oj["held_karp_length"] = best.length;
    oj["held_karp_order"] = best.order;
    oj["tour_valid"] = r.tour.valid;
    oj["tour_length"] = r.tour.tour_length;
    if (r.tour.valid) oj["length_ratio"] = ratio;

    w.put("final.json", snapshot_json(r.network, cities, std::nullopt));
    if (cfg.render) w.put("final.svg", render_svg(r.network, cities, RenderMode::resistance));
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    ScenarioReport report;
    Writer w{out_dir, report};
    Summary s;
    ojson oj = ojson::object();
    s.add("name", cfg.name, "scenario = " + cfg.name);
    s.add("algorithm", std::string(to_string(cfg.algorithm)), std::string("algorithm = ") + to_string(cfg.algorithm));
    if (cfg.network.kind == NetworkSpec::Kind::random) s.json["seed"] = cfg.network.seed;

    switch (cfg.algorithm) {
        case Algorithm::shortest_path: run_shortest(cfg, w, s, oj); break;
        case Algorithm::heal: run_heal(cfg, w, s, oj); break;
        case Algorithm::entropy_study: run_entropy(cfg, w, s, oj); break;
        case Algorithm::tsp: run_tsp(cfg, w, s, oj); break;
    }

    std::ostringstream text;
    for (const std::string& line : s.lines) text << line << '\n';
    report.summary_text = text.str();
    report.summary_json = s.json.dump(2) + "\n";
    w.put("summary.txt", report.summary_text);
    w.put("summary.json", report.summary_json);
    w.put("oracle.json", oj.dump(2) + "\n");
    return report;
}

}  // namespace memnet
