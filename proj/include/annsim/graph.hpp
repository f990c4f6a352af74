#ifndef ANNSIM_GRAPH_HPP
#define ANNSIM_GRAPH_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "annsim/expr.hpp"
#include "annsim/model.hpp"

namespace annsim::graph {

class BuildError : public std::runtime_error {
public:
    enum class Kind {
        cycle,
        slot_gap,
        empty_outputs,
        dangling_reference,
        unknown_node,
        bad_expression,
    };

    BuildError(Kind kind, std::string msg, std::optional<long long> node = std::nullopt)
        : std::runtime_error(std::move(msg)), kind_(kind), node_(node) {}

    Kind kind() const { return kind_; }
    std::optional<long long> node() const { return node_; }
    const char* code() const;

private:
    Kind kind_;
    std::optional<long long> node_;
};

// One input position of a neuron: either the output of another neuron (edge)
// or a value supplied by the input-values document (external).
struct Slot {
    enum class Kind { edge, external };
    Kind kind = Kind::external;
    long long source = 0;  // producing neuron id; meaningful for edges only
    double weight = 1.0;
    bool operator==(const Slot&) const = default;
};

struct Neuron {
    long long id = 0;
    double bias = 0.0;
    expr::TransferExpr transfer;
    std::vector<Slot> slots;  // dense, index == input slot

    std::size_t fan_in() const { return slots.size(); }
    bool operator==(const Neuron&) const = default;
};

// Validated feed-forward network. Immutable after build; safe to share
// across threads. Layer 0 first; ids inside a layer are ascending.
struct NeuronGraph {
    std::map<long long, Neuron> neurons;
    std::vector<std::vector<long long>> layers;
    std::vector<long long> outputs;

    std::size_t layer_of(long long id) const;
    long long edge_count() const;  // number of edge slots (parallel edges count)
    long long slot_count() const;  // edges plus externals; the MAC total

    // Calls f(source_id, target_id, slot_index, weight) for every edge,
    // ordered by target id then slot index.
    template <typename F>
    void for_each_edge(F&& f) const {
        for (const auto& [id, neuron] : neurons)
            for (std::size_t s = 0; s < neuron.slots.size(); ++s)
                if (neuron.slots[s].kind == Slot::Kind::edge)
                    f(neuron.slots[s].source, id, s, neuron.slots[s].weight);
    }

    bool operator==(const NeuronGraph&) const = default;
};

// Builds the executable graph from validated documents: evaluates biases,
// parses transfer functions, assembles dense slot vectors (weights default
// to 1 when absent), assigns longest-path layers and resolves outputs
// (explicit selection, or all sinks in ascending id when absent).
NeuronGraph build_graph(const model::ArchitectureDoc& arch,
                        const model::WeightValuesDoc& weights,
                        const model::InputValuesDoc& inputs,
                        const std::optional<model::OutputSelectionDoc>& outputs);

// Longest-path layering: layer(n) = 0 when n has no edge slots, otherwise
// 1 + max over its edge sources. Recomputed from the neuron table.
std::vector<std::vector<long long>> assign_layers(const NeuronGraph& g);

// Graphviz export: one node per neuron annotated with its layer, one line
// per edge labeled with the weight. When worker_of is given, nodes are
// filled with a per-worker color.
std::string to_dot(const NeuronGraph& g,
                   const std::map<long long, int>* worker_of = nullptr);

}  // namespace annsim::graph

#endif
