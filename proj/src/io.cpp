#include "memnet/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "memnet/error.hpp"

namespace memnet {

using ojson = nlohmann::ordered_json;

namespace {

std::string num(double v, const char* fmt = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

struct Rgb {
    double r, g, b;
};

std::string mix(Rgb a, Rgb b, double t) {
    t = std::clamp(t, 0.0, 1.0);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(a.r + (b.r - a.r) * t)),
                  static_cast<int>(std::lround(a.g + (b.g - a.g) * t)),
                  static_cast<int>(std::lround(a.b + (b.b - a.b) * t)));
    return buf;
}

}  // namespace

std::string snapshot_json(const Network& net, std::span<const NodeId> highlight,
                          const std::optional<PulseSpec>& pulse) {
    ojson j;
    j["format"] = "memnet-snapshot";
    j["version"] = 1;
    const DeviceParams& p = net.params();
    j["params"] = {{"r_on", p.r_on}, {"r_off", p.r_off}, {"gamma", p.gamma}, {"i_threshold", p.i_threshold}};
    if (net.grid())
        j["grid"] = {{"rows", net.grid()->rows}, {"cols", net.grid()->cols}};
    else
        j["grid"] = nullptr;
    ojson nodes = ojson::array();
    for (const Node& n : net.nodes()) nodes.push_back({n.id, n.position.x, n.position.y});
    j["nodes"] = std::move(nodes);
    ojson edges = ojson::array();
    for (const Edge& e : net.edges()) edges.push_back({e.id, e.from, e.to, e.unit.a.x, e.unit.b.x});
    j["edges"] = std::move(edges);
    j["highlight"] = std::vector<NodeId>(highlight.begin(), highlight.end());
    if (pulse)
        j["pulse"] = {{"input", pulse->input}, {"output", pulse->output}, {"amplitude", pulse->amplitude}};
    else
        j["pulse"] = nullptr;
    return j.dump(1) + "\n";
}

Snapshot parse_snapshot(std::string_view text) {
    try {
        const ojson j = ojson::parse(text);
        if (j.value("format", "") != "memnet-snapshot") throw ConfigError("snapshot: missing format tag");
        const ojson& jp = j.at("params");
        DeviceParams p{jp.at("r_on").get<double>(), jp.at("r_off").get<double>(), jp.at("gamma").get<double>(),
                       jp.at("i_threshold").get<double>()};
        p.validate();
        Snapshot s{Network(p), {}, std::nullopt};
        for (const ojson& n : j.at("nodes"))
            s.network.insert_node(Node{n.at(0).get<NodeId>(), Point{n.at(1).get<double>(), n.at(2).get<double>()}});
        for (const ojson& e : j.at("edges")) {
            Edge edge;
            edge.id = e.at(0).get<EdgeId>();
            edge.from = e.at(1).get<NodeId>();
            edge.to = e.at(2).get<NodeId>();
            edge.unit = BasicUnit::off(p);
            edge.unit.a.x = e.at(3).get<double>();
            edge.unit.b.x = e.at(4).get<double>();
            for (double x : {edge.unit.a.x, edge.unit.b.x})
                if (!(x >= p.r_on && x <= p.r_off))
                    throw ConfigError("snapshot: edge " + std::to_string(edge.id) + " memristance out of range");
            edge.length = distance(s.network.node(edge.from).position, s.network.node(edge.to).position);
            s.network.insert_edge(edge);
        }
        if (!j.at("grid").is_null())
            s.network.set_grid(GridShape{j["grid"].at("rows").get<int>(), j["grid"].at("cols").get<int>()});
        s.highlight = j.at("highlight").get<std::vector<NodeId>>();
        for (NodeId id : s.highlight)
            if (!s.network.has_node(id)) throw ConfigError("snapshot: unknown highlight node " + std::to_string(id));
        if (!j.at("pulse").is_null()) {
            const ojson& q = j["pulse"];
            s.pulse = PulseSpec{q.at("input").get<NodeId>(), q.at("output").get<NodeId>(),
                                q.at("amplitude").get<double>(), std::nullopt};
        }
        return s;
    } catch (const ojson::exception& e) {
        throw ConfigError(std::string("snapshot: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("snapshot: ") + e.what());
    }
}

Snapshot load_snapshot(const std::filesystem::path& path) { return parse_snapshot(read_file(path)); }

std::string trace_csv(const Trajectory& traj, const EntropyTrace& entropy, std::span<const EdgeId> tracked) {
    std::map<EdgeId, std::size_t> column;
    for (std::size_t k = 0; k < traj.edge_ids.size(); ++k) column[traj.edge_ids[k]] = k;
    std::vector<std::size_t> cols;
    for (EdgeId e : tracked) {
        auto it = column.find(e);
        if (it == column.end()) throw InvalidArgument("trace_csv: edge " + std::to_string(e) + " not recorded");
        cols.push_back(it->second);
    }
    if (entropy.values.size() != traj.sample_count()) throw InvalidArgument("trace_csv: entropy length mismatch");

    std::ostringstream os;
    os << "time,source_current,entropy";
    for (EdgeId e : tracked) os << ",R_e" << e;
    os << '\n';
    for (std::size_t s = 0; s < traj.sample_count(); ++s) {
        os << num(traj.times[s]) << ',' << num(traj.source_current[s]) << ',' << num(entropy.values[s]);
        for (std::size_t c : cols) os << ',' << num(traj.resistances[s][c]);
        os << '\n';
    }
    return os.str();
}

std::string render_svg(const Network& net, std::span<const NodeId> highlight, RenderMode mode,
                       const SolveResult* currents) {
    if (mode == RenderMode::current && currents == nullptr)
        throw InvalidArgument("render_svg: current map needs a solve result");
    if (net.node_count() == 0) throw InvalidArgument("render_svg: empty network");

    double x0 = net.nodes()[0].position.x, x1 = x0, y0 = net.nodes()[0].position.y, y1 = y0;
    for (const Node& n : net.nodes()) {
        x0 = std::min(x0, n.position.x);
        x1 = std::max(x1, n.position.x);
        y0 = std::min(y0, n.position.y);
        y1 = std::max(y1, n.position.y);
    }
    const double span = std::max({x1 - x0, y1 - y0, 1.0});
    const double s = std::min(60.0, 800.0 / span);
    const double margin = s;
    const double width = (x1 - x0) * s + 2 * margin, height = (y1 - y0) * s + 2 * margin;
    auto px = [&](Point p) { return std::pair{margin + (p.x - x0) * s, margin + (y1 - p.y) * s}; };

    const DeviceParams& p = net.params();
    const double r_hi = p.unit_off_resistance(), r_lo = p.unit_on_resistance();
    double i_max = 0.0;
    if (currents)
        for (double i : currents->edge_currents) i_max = std::max(i_max, std::abs(i));

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width, "%.1f") << "\" height=\""
       << num(height, "%.1f") << "\" viewBox=\"0 0 " << num(width, "%.1f") << ' ' << num(height, "%.1f")
       << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g stroke-linecap=\"round\">\n";
    for (std::size_t k = 0; k < net.edge_count(); ++k) {
        const Edge& e = net.edges()[k];
        const auto [ax, ay] = px(net.node(e.from).position);
        const auto [bx, by] = px(net.node(e.to).position);
        std::string color;
        double w = 0.12 * s;
        if (mode == RenderMode::resistance) {
            const double t = std::log(r_hi / e.unit.resistance()) / std::log(r_hi / r_lo);
            color = mix({205, 212, 228}, {190, 0, 20}, t);
        } else {
            const double t = i_max > 0.0 ? std::abs(currents->edge_currents[k]) / i_max : 0.0;
            color = mix({230, 230, 230}, {10, 60, 200}, t);
            w = (0.05 + 0.25 * t) * s;
        }
        os << "<line x1=\"" << num(ax, "%.2f") << "\" y1=\"" << num(ay, "%.2f") << "\" x2=\"" << num(bx, "%.2f")
           << "\" y2=\"" << num(by, "%.2f") << "\" stroke=\"" << color << "\" stroke-width=\"" << num(w, "%.2f")
           << "\"/>\n";
    }
    os << "</g>\n<g fill=\"#404040\">\n";
    for (const Node& n : net.nodes()) {
        const auto [cx, cy] = px(n.position);
        os << "<circle cx=\"" << num(cx, "%.2f") << "\" cy=\"" << num(cy, "%.2f") << "\" r=\""
           << num(0.1 * s, "%.2f") << "\"/>\n";
    }
    os << "</g>\n<g fill=\"#ffd700\" stroke=\"black\" stroke-width=\"" << num(0.05 * s, "%.2f") << "\">\n";
    for (NodeId id : highlight) {
        const auto [cx, cy] = px(net.node(id).position);
        os << "<circle cx=\"" << num(cx, "%.2f") << "\" cy=\"" << num(cy, "%.2f") << "\" r=\""
           << num(0.35 * s, "%.2f") << "\"/>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace memnet
