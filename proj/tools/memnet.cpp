// memnet command-line tool: generate, run, render, batch.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "memnet/error.hpp"
#include "memnet/io.hpp"
#include "memnet/scenario.hpp"

namespace fs = std::filesystem;
using namespace memnet;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "text";
};

void add_common(CLI::App* app, Common& c, bool need_config = true) {
    auto* opt = app->add_option("--config", c.config, "scenario JSON file");
    if (need_config) opt->required();
    app->add_option("--seed", c.seed, "override the network and schedule seed");
    app->add_option("--out", c.out, "output directory (default: out_dir from the config)");
    app->add_option("--format", c.format, "stdout summary format")->check(CLI::IsMember({"text", "structured"}));
}

ScenarioConfig load(const Common& c) {
    ScenarioConfig cfg = load_config(c.config);
    if (c.seed) override_seed(cfg, *c.seed);
    if (!c.out.empty()) cfg.out_dir = c.out;
    return cfg;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(spec);
    std::string part;
    try {
        while (std::getline(ss, part, ',')) {
            const auto dash = part.find('-');
            if (dash == std::string::npos) {
                out.push_back(std::stoull(part));
            } else {
                const std::uint64_t a = std::stoull(part.substr(0, dash)), b = std::stoull(part.substr(dash + 1));
                if (b < a) throw ConfigError("--seeds: empty range " + part);
                for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
            }
        }
    } catch (const std::logic_error&) {
        throw ConfigError("--seeds: cannot parse '" + spec + "'");
    }
    if (out.empty()) throw ConfigError("--seeds: no seeds given");
    return out;
}

int report_error(const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
}

int cmd_generate(const Common& c) {
    const ScenarioConfig cfg = load(c);
    const Network net = build_network(cfg);
    std::vector<NodeId> highlight;
    if (cfg.algorithm == Algorithm::tsp) {
        for (const NodeRef& r : cfg.cities) highlight.push_back(r.resolve(net));
    } else {
        highlight = {cfg.input.resolve(net), cfg.output.resolve(net)};
    }
    write_file(cfg.out_dir / "network.json", snapshot_json(net, highlight, std::nullopt));
    if (cfg.render) write_file(cfg.out_dir / "network.svg", render_svg(net, highlight, RenderMode::resistance));

    const std::vector<int> labels = component_labels(net);
    const int components = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    if (c.format == "structured") {
        nlohmann::ordered_json j{{"nodes", net.node_count()}, {"edges", net.edge_count()},
                                 {"components", components}, {"highlight", highlight}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "nodes = " << net.node_count() << "\nedges = " << net.edge_count()
                  << "\ncomponents = " << components << '\n';
    }
    return 0;
}

int cmd_run(const Common& c) {
    const ScenarioConfig cfg = load(c);
    const ScenarioReport r = run_scenario(cfg, cfg.out_dir);
    std::cout << (c.format == "structured" ? r.summary_json : r.summary_text);
    return r.exit_code;
}

int cmd_render(const std::string& snapshot, const std::string& out, bool currents) {
    const Snapshot s = load_snapshot(snapshot);
    const fs::path dir = out.empty() ? fs::path(snapshot).parent_path() : fs::path(out);
    const std::string stem = fs::path(snapshot).stem().string();
    write_file(dir / (stem + ".svg"), render_svg(s.network, s.highlight, RenderMode::resistance));
    if (currents) {
        if (!s.pulse) throw ConfigError("snapshot has no pulse to compute currents from");
        const SolveResult r = solve_dc(s.network, SourceSpec::pair(s.pulse->input, s.pulse->output, s.pulse->amplitude),
                                       SolveOptions{true});
        write_file(dir / (stem + "_currents.svg"), render_svg(s.network, s.highlight, RenderMode::current, &r));
    }
    std::cout << "wrote " << (dir / (stem + ".svg")).string() << '\n';
    return 0;
}

int cmd_batch(const Common& c, const std::string& seeds_spec, unsigned jobs) {
    const ScenarioConfig base = load(c);
    const std::vector<std::uint64_t> seeds = parse_seeds(seeds_spec);
    struct Slot {
        int code = 0;
        std::string error;
        std::string summary;
    };
    std::vector<Slot> slots(seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < seeds.size(); k = next++) {
            ScenarioConfig cfg = base;
            override_seed(cfg, seeds[k]);
            const fs::path dir = base.out_dir / ("seed_" + std::to_string(seeds[k]));
            try {
                slots[k].summary = run_scenario(cfg, dir).summary_json;
            } catch (const std::exception& e) {
                slots[k].code = exit_code_for(e);
                slots[k].error = e.what();
            }
        }
    };
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(seeds.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    std::ostringstream text;
    int code = 0;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        nlohmann::ordered_json row{{"seed", seeds[k]}, {"exit_code", slots[k].code}};
        if (slots[k].code == 0)
            row["summary"] = nlohmann::ordered_json::parse(slots[k].summary);
        else
            row["error"] = slots[k].error;
        j.push_back(row);
        text << "seed " << seeds[k] << ": "
             << (slots[k].code == 0 ? std::string("ok") : "exit " + std::to_string(slots[k].code) + " (" + slots[k].error + ")")
             << '\n';
        if (code == 0) code = slots[k].code;
    }
    write_file(base.out_dir / "batch.json", j.dump(2) + "\n");
    write_file(base.out_dir / "batch.txt", text.str());
    std::cout << (c.format == "structured" ? j.dump(2) + "\n" : text.str());
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Memristive network simulator"};
    app.require_subcommand(1);

    Common gen, run, bat;
    std::string seeds = "1-10";
    unsigned jobs = 0;
    std::string snapshot, render_out;
    bool currents = false;

    add_common(app.add_subcommand("generate", "build the network of a scenario and write it"), gen);
    add_common(app.add_subcommand("run", "run a scenario"), run);
    auto* rnd = app.add_subcommand("render", "render a state snapshot as SVG");
    rnd->add_option("--snapshot", snapshot, "snapshot JSON written by run or generate")->required();
    rnd->add_option("--out", render_out, "output directory (default: next to the snapshot)");
    rnd->add_flag("--currents", currents, "also draw the current map of the snapshot's pulse");
    auto* bt = app.add_subcommand("batch", "run a scenario for several seeds concurrently");
    add_common(bt, bat);
    bt->add_option("--seeds", seeds, "seed list, e.g. 1-10 or 1,4,7");
    bt->add_option("--jobs", jobs, "worker threads (default: hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("generate")) return cmd_generate(gen);
        if (app.got_subcommand("run")) return cmd_run(run);
        if (app.got_subcommand("render")) return cmd_render(snapshot, render_out, currents);
        return cmd_batch(bat, seeds, jobs);
    } catch (const std::exception& e) {
        return report_error(e);
    }
}
