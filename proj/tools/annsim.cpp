// Command-line front end: validate documents, run networks serially or on
// the simulated worker fabric, inspect partitions, and run benchmark sweeps.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "annsim/engine.hpp"
#include "annsim/graph.hpp"
#include "annsim/model.hpp"
#include "annsim/partition.hpp"
#include "annsim/report.hpp"
#include "annsim/util.hpp"
#include "annsim/xml.hpp"

namespace {

using namespace annsim;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;  // validate: violations; run: evaluation errors
constexpr int kExitConfig = 2;     // bad flags, unreadable files, malformed documents

struct DocPaths {
    std::string arch;
    std::string inputs;
    std::string weights;  // optional; empty weight document when unset
    std::string outputs;  // optional; sinks become the outputs when unset
};

struct Documents {
    model::ArchitectureDoc arch;
    model::InputValuesDoc inputs;
    model::WeightValuesDoc weights;
    std::optional<model::OutputSelectionDoc> outputs;
};

// Throws: std::runtime_error (I/O), xml::SyntaxError, model::SchemaError.
Documents load_documents(const DocPaths& paths) {
    Documents docs;
    docs.arch = model::parse_architecture(util::read_file(paths.arch));
    docs.inputs = model::parse_inputs(util::read_file(paths.inputs));
    if (!paths.weights.empty())
        docs.weights = model::parse_weights(util::read_file(paths.weights));
    if (!paths.outputs.empty())
        docs.outputs = model::parse_outputs(util::read_file(paths.outputs));
    return docs;
}

model::ValidationReport single_violation(const std::string& code, const std::string& message,
                                         std::optional<long long> node) {
    model::ValidationReport r;
    r.violations.push_back(model::Violation{code, message, node});
    return r;
}

int cmd_validate(const DocPaths& paths) {
    Documents docs;
    try {
        docs = load_documents(paths);
    } catch (const model::SchemaError& e) {
        std::cout << report::validation_to_json(
            single_violation(e.code(), e.what(), e.node_index()));
        return kExitViolation;
    }

    model::ValidationReport rep =
        model::validate_cross_refs(docs.arch, docs.inputs, docs.weights, docs.outputs);
    if (!rep.ok()) {
        std::cout << report::validation_to_json(rep);
        return kExitViolation;
    }

    // Cross references are clean; cycles, bad expressions and output
    // resolution are only detectable by building the graph.
    try {
        graph::build_graph(docs.arch, docs.weights, docs.inputs, docs.outputs);
    } catch (const graph::BuildError& e) {
        rep.violations.push_back(model::Violation{e.code(), e.what(), e.node()});
        std::cout << report::validation_to_json(rep);
        return kExitViolation;
    }

    std::cout << report::validation_to_json(rep);
    return kExitOk;
}

struct RunOptions {
    std::string mode = "serial";
    int workers = 1;
    std::string policy = "round_robin";
    engine::CostModel cost;
    std::string format = "json";
    bool verbose = false;
};

// Diagnostics were already written; main just returns the code.
struct CommandFailed {
    int code;
};

// Shared by run and partition: documents -> validated graph, or exit 2.
graph::NeuronGraph build_checked(const Documents& docs) {
    model::ValidationReport rep =
        model::validate_cross_refs(docs.arch, docs.inputs, docs.weights, docs.outputs);
    if (!rep.ok()) {
        std::cerr << "invalid network:\n";
        for (const model::Violation& v : rep.violations)
            std::cerr << "  " << v.code << ": " << v.message << "\n";
        throw CommandFailed{kExitConfig};
    }
    return graph::build_graph(docs.arch, docs.weights, docs.inputs, docs.outputs);
}

int cmd_run(const DocPaths& paths, const RunOptions& opt) {
    Documents docs = load_documents(paths);
    graph::NeuronGraph g = build_checked(docs);

    auto started = std::chrono::steady_clock::now();
    engine::SimReport rep;
    try {
        if (opt.mode == "serial") {
            rep = engine::run_serial(g, docs.inputs, opt.cost);
        } else {
            partition::Assignment a =
                partition::map_nodes(g, opt.workers, partition::policy_from_name(opt.policy));
            rep = engine::run_distributed(g, a, docs.inputs, opt.cost);
        }
    } catch (const engine::Error& e) {
        if (e.kind() != engine::Error::Kind::missing_input &&
            e.kind() != engine::Error::Kind::node_eval)
            throw;  // configuration problems keep exit code 2
        std::cerr << "run failed: " << e.what() << "\n";
        return kExitViolation;
    }
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);

    if (opt.format == "csv")
        std::cout << report::outputs_to_csv(rep);
    else
        std::cout << report::report_to_json(rep);
    if (opt.verbose)
        std::cerr << "wall-clock: " << elapsed.count() << " s (not part of the report)\n";
    return kExitOk;
}

int cmd_partition(const DocPaths& paths, int workers, const std::string& policy,
                  const std::string& dot_path, const std::string& format) {
    Documents docs = load_documents(paths);
    graph::NeuronGraph g = build_checked(docs);

    partition::Assignment a =
        partition::map_nodes(g, workers, partition::policy_from_name(policy));
    partition::PartitionStats st = partition::stats(g, a);

    if (!dot_path.empty()) {
        std::string dot = graph::to_dot(g, &a.worker_of);
        if (dot_path == "-") {
            std::cout << dot;
        } else {
            std::ofstream out(dot_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write file: " + dot_path);
            out << dot;
        }
    }

    if (format == "csv")
        std::cout << report::partition_to_csv(a);
    else
        std::cout << report::partition_to_json(a, st);
    return kExitOk;
}

int cmd_bench(const std::string& spec_path, std::optional<std::uint64_t> seed,
              const std::string& format) {
    engine::SweepSpec spec;
    try {
        spec = report::sweep_spec_from_json(util::read_file(spec_path));
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "sweep spec: " << e.what() << "\n";
        return kExitConfig;
    }
    if (seed) spec.seed = *seed;

    std::vector<engine::SweepRow> rows = engine::bench_sweep(spec);
    if (format == "csv")
        std::cout << report::sweep_to_csv(rows);
    else
        std::cout << report::sweep_to_json(rows);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"annsim - distributed neural-network forward-propagation simulator"};
    app.require_subcommand(1);

    DocPaths paths;
    RunOptions run_opt;
    std::string dot_path;
    std::string partition_format = "json";
    int partition_workers = 1;
    std::string partition_policy = "round_robin";
    std::string bench_spec_path;
    std::string bench_format = "json";
    std::optional<std::uint64_t> bench_seed;

    auto add_doc_flags = [&paths](CLI::App* cmd) {
        cmd->add_option("--arch", paths.arch, "architecture XML file")->required();
        cmd->add_option("--inputs", paths.inputs, "input values XML file")->required();
        cmd->add_option("--weights", paths.weights,
                        "weight values XML file (all weights default to 1 when omitted)");
        cmd->add_option("--outputs", paths.outputs,
                        "output selection XML file (sinks are used when omitted)");
    };
    const std::vector<std::string> policies{"round_robin", "layer_block", "balanced_fanin"};

    CLI::App* validate =
        app.add_subcommand("validate", "parse a document set and report violations");
    add_doc_flags(validate);

    CLI::App* run = app.add_subcommand("run", "execute one forward pass and print the report");
    add_doc_flags(run);
    run->add_option("--mode", run_opt.mode, "execution mode")
        ->check(CLI::IsMember({"serial", "distributed"}))
        ->capture_default_str();
    run->add_option("--workers", run_opt.workers, "simulated worker count")
        ->check(CLI::Range(1, 1 << 20))
        ->capture_default_str();
    run->add_option("--policy", run_opt.policy, "partition policy")
        ->check(CLI::IsMember(policies))
        ->capture_default_str();
    run->add_option("--mac-cost", run_opt.cost.mac_cost,
                    "seconds per multiply-accumulate")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    run->add_option("--transfer-cost", run_opt.cost.transfer_eval_cost,
                    "seconds per transfer-function evaluation")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    run->add_option("--latency", run_opt.cost.msg_latency, "seconds per message")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    run->add_option("--byte-cost", run_opt.cost.byte_cost, "seconds per transmitted byte")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    run->add_option("--value-size", run_opt.cost.value_size, "bytes per transmitted value")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    run->add_option("--format", run_opt.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    run->add_flag("-v,--verbose", run_opt.verbose, "print wall-clock timing to stderr");

    CLI::App* part = app.add_subcommand("partition", "map neurons to workers and print stats");
    add_doc_flags(part);
    part->add_option("--workers", partition_workers, "worker count")
        ->check(CLI::Range(1, 1 << 20))
        ->capture_default_str();
    part->add_option("--policy", partition_policy, "partition policy")
        ->check(CLI::IsMember(policies))
        ->capture_default_str();
    part->add_option("--dot", dot_path, "write a worker-colored DOT graph to this path ('-' for stdout)");
    part->add_option("--format", partition_format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    CLI::App* bench = app.add_subcommand("bench", "run a benchmark sweep from a JSON spec");
    bench->add_option("spec", bench_spec_path, "sweep specification file")->required();
    bench->add_option("--seed", bench_seed, "override the seed in the spec file");
    bench->add_option("--format", bench_format, "table format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return kExitConfig;
    }

    try {
        if (validate->parsed()) return cmd_validate(paths);
        if (run->parsed()) return cmd_run(paths, run_opt);
        if (part->parsed())
            return cmd_partition(paths, partition_workers, partition_policy, dot_path,
                                 partition_format);
        if (bench->parsed()) return cmd_bench(bench_spec_path, bench_seed, bench_format);
    } catch (const CommandFailed& e) {
        return e.code;
    } catch (const xml::SyntaxError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const model::SchemaError& e) {
        std::cerr << "schema error: " << e.code() << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const graph::BuildError& e) {
        std::cerr << "invalid network: " << e.code() << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const partition::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const engine::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
