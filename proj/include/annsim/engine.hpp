#ifndef ANNSIM_ENGINE_HPP
#define ANNSIM_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "annsim/graph.hpp"
#include "annsim/model.hpp"
#include "annsim/partition.hpp"

namespace annsim::engine {

class Error : public std::runtime_error {
public:
    enum class Kind {
        missing_input,       // an external slot has no value in the input document
        node_eval,           // transfer evaluation failed at run time
        invalid_assignment,  // assignment is not total or names an out-of-range worker
        invalid_spec,        // bad sweep specification or cost model
    };

    Error(Kind kind, std::string msg, std::optional<long long> neuron = std::nullopt)
        : std::runtime_error(std::move(msg)), kind_(kind), neuron_(neuron) {}

    Kind kind() const { return kind_; }
    std::optional<long long> neuron() const { return neuron_; }

private:
    Kind kind_;
    std::optional<long long> neuron_;
};

// Parameters of the simulated clock. All times are in seconds; sending one
// message costs msg_latency plus byte_cost per payload byte, where each
// transmitted value occupies value_size bytes.
struct CostModel {
    double mac_cost = 0.0;
    double transfer_eval_cost = 0.0;
    double msg_latency = 0.0;
    double byte_cost = 0.0;
    long long value_size = 8;

    void validate() const;  // throws Error{invalid_spec} on negative/non-finite fields
};

// One simulated transmission: all values computed by src_worker in `layer`
// that some neuron owned by dst_worker consumes, aggregated into a single
// message. Payload is ordered by neuron id.
struct ValueMsg {
    int src_worker = 0;
    int dst_worker = 0;
    int layer = 0;
    std::vector<std::pair<long long, double>> payload;
};

struct SimReport {
    std::string mode;    // "serial" | "distributed"
    std::string policy;  // partition policy, or "serial"
    int workers = 1;
    std::vector<std::pair<long long, double>> outputs;  // in output order
    double sim_time = 0.0;
    double serial_time = 0.0;
    long long messages = 0;
    long long bytes = 0;
    std::vector<double> per_layer_time;
    partition::PartitionStats stats;
};

// Reference execution: one neuron at a time in layer order and ascending id,
// accumulating weight*input over slots in ascending slot order, then
// f(sum + bias). The summation order is the contract every distributed run
// must reproduce bit-exactly.
SimReport run_serial(const graph::NeuronGraph& g, const model::InputValuesDoc& inputs,
                     const CostModel& cm = {});

// Layer-synchronous simulation over `a.worker_count` workers. Each worker
// computes its owned neurons of the current layer (same arithmetic as
// run_serial), then sends one message per destination worker that owns a
// successor of any value it just produced. Per-layer simulated time is the
// slowest worker's compute plus the slowest worker's send cost.
//
// When `trace` is non-null every message is appended to it in send order.
SimReport run_distributed(const graph::NeuronGraph& g, const partition::Assignment& a,
                          const model::InputValuesDoc& inputs, const CostModel& cm,
                          std::vector<ValueMsg>* trace = nullptr);

struct ComparisonRecord {
    double serial_time = 0.0;
    double sim_time = 0.0;
    double ratio = 1.0;         // sim_time / serial_time
    bool outputs_equal = true;  // bit-exact output comparison
};

ComparisonRecord compare_runs(const graph::NeuronGraph& g, const partition::Assignment& a,
                              const model::InputValuesDoc& inputs, const CostModel& cm);

// Family of generated benchmark networks: `depth` fully connected layers of
// `width` neurons each; layer 0 reads one external input per neuron.
struct SweepSpec {
    std::vector<int> widths;
    int depth = 3;
    std::vector<int> workers;
    std::vector<partition::Policy> policies;
    CostModel cost;
    std::uint64_t seed = 0;
    std::string transfer = "f(x)=x";
    double weight = 1.0;
    double bias = 0.0;
};

struct SweepRow {
    int width = 0;
    int depth = 0;
    int workers = 0;
    std::string policy;
    ComparisonRecord record;
    long long messages = 0;
    long long bytes = 0;
    long long cut_edges = 0;
};

// Documents for one generated network; input values are drawn from a
// deterministic generator seeded as given, so equal seeds reproduce equal
// documents on every platform.
struct GeneratedNetwork {
    model::ArchitectureDoc arch;
    model::InputValuesDoc inputs;
    model::WeightValuesDoc weights;
};

GeneratedNetwork make_layered_docs(int width, int depth, const std::string& transfer,
                                   double weight, double bias, std::uint64_t seed);

// One row per (policy, workers, width), widths varying fastest.
std::vector<SweepRow> bench_sweep(const SweepSpec& spec);

}  // namespace annsim::engine

#endif
