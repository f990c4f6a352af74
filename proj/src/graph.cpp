#include "annsim/graph.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "annsim/util.hpp"

namespace annsim::graph {

const char* BuildError::code() const {
    switch (kind_) {
        case Kind::cycle: return model::code::cycle;
        case Kind::slot_gap: return model::code::slot_gap;
        case Kind::empty_outputs: return model::code::empty_outputs;
        case Kind::dangling_reference: return model::code::dangling_pre_node;
        case Kind::unknown_node: return model::code::unknown_node;
        case Kind::bad_expression: return model::code::bad_expression;
    }
    return "unknown";
}

std::size_t NeuronGraph::layer_of(long long id) const {
    for (std::size_t l = 0; l < layers.size(); ++l)
        if (std::binary_search(layers[l].begin(), layers[l].end(), id)) return l;
    throw std::out_of_range("no such neuron: " + std::to_string(id));
}

long long NeuronGraph::edge_count() const {
    long long n = 0;
    for (const auto& [id, neuron] : neurons)
        for (const Slot& s : neuron.slots)
            if (s.kind == Slot::Kind::edge) ++n;
    return n;
}

long long NeuronGraph::slot_count() const {
    long long n = 0;
    for (const auto& [id, neuron] : neurons) n += static_cast<long long>(neuron.slots.size());
    return n;
}

namespace {

// Kahn layering over edge dependencies. On a cycle, walks predecessors among
// the unresolved nodes to recover one concrete cycle for the diagnostic.
std::vector<std::vector<long long>> compute_layers(const std::map<long long, Neuron>& neurons) {
    std::unordered_map<long long, std::size_t> indegree;
    std::unordered_map<long long, std::vector<long long>> successors;
    for (const auto& [id, neuron] : neurons) {
        indegree[id] += 0;
        for (const Slot& s : neuron.slots)
            if (s.kind == Slot::Kind::edge) {
                ++indegree[id];
                successors[s.source].push_back(id);
            }
    }

    std::unordered_map<long long, std::size_t> layer;
    std::set<long long> ready;
    for (const auto& [id, deg] : indegree)
        if (deg == 0) ready.insert(id);

    std::size_t resolved = 0;
    while (!ready.empty()) {
        long long id = *ready.begin();
        ready.erase(ready.begin());
        ++resolved;
        const Neuron& n = neurons.at(id);
        std::size_t depth = 0;
        bool has_edges = false;
        for (const Slot& s : n.slots)
            if (s.kind == Slot::Kind::edge) {
                has_edges = true;
                depth = std::max(depth, layer.at(s.source) + 1);
            }
        layer[id] = has_edges ? depth : 0;
        for (long long succ : successors[id])
            if (--indegree[succ] == 0) ready.insert(succ);
    }

    if (resolved != neurons.size()) {
        // Every unresolved node has an unresolved predecessor, so walking
        // predecessors must revisit a node.
        std::set<long long> unresolved;
        for (const auto& [id, deg] : indegree)
            if (deg != 0) unresolved.insert(id);
        std::vector<long long> walk{*unresolved.begin()};
        std::unordered_map<long long, std::size_t> pos{{walk[0], 0}};
        for (;;) {
            long long pred = -1;
            for (const Slot& s : neurons.at(walk.back()).slots)
                if (s.kind == Slot::Kind::edge && unresolved.count(s.source)) {
                    if (pred < 0 || s.source < pred) pred = s.source;
                }
            auto seen = pos.find(pred);
            if (seen != pos.end()) {
                std::string msg = "network contains a cycle: ";
                for (std::size_t i = walk.size(); i-- > seen->second;)
                    msg += std::to_string(walk[i]) + " -> ";
                msg += std::to_string(pred);
                throw BuildError(BuildError::Kind::cycle, msg, pred);
            }
            pos[pred] = walk.size();
            walk.push_back(pred);
        }
    }

    std::size_t depth = 0;
    for (const auto& [id, l] : layer) depth = std::max(depth, l + 1);
    std::vector<std::vector<long long>> layers(depth);
    for (const auto& [id, neuron] : neurons) layers[layer.at(id)].push_back(id);
    return layers;  // ascending ids per layer: the neuron map is ordered
}

}  // namespace

NeuronGraph build_graph(const model::ArchitectureDoc& arch,
                        const model::WeightValuesDoc& weights,
                        const model::InputValuesDoc& inputs,
                        const std::optional<model::OutputSelectionDoc>& outputs) {
    std::set<long long> known;
    for (const model::NodeDecl& n : arch.nodes) known.insert(n.node_index);

    std::map<std::pair<long long, long long>, double> weight_of;
    for (const model::NodeValues& nv : weights.entries)
        for (const model::ValueItem& vi : nv.items)
            weight_of[{nv.node_index, vi.input_index}] = vi.value;

    std::map<long long, std::set<long long>> external_slots;
    std::set<long long> declared_in_inputs;
    for (const model::NodeValues& nv : inputs.entries) {
        if (!known.count(nv.node_index))
            throw BuildError(BuildError::Kind::unknown_node,
                             "inputValues entry references undeclared node " +
                                 std::to_string(nv.node_index),
                             nv.node_index);
        declared_in_inputs.insert(nv.node_index);
        for (const model::ValueItem& vi : nv.items)
            external_slots[nv.node_index].insert(vi.input_index);
    }

    NeuronGraph g;
    for (const model::NodeDecl& decl : arch.nodes) {
        Neuron n;
        n.id = decl.node_index;
        try {
            n.bias = expr::eval_const(decl.bias_expr);
        } catch (const expr::Error& e) {
            throw BuildError(BuildError::Kind::bad_expression,
                             "node " + std::to_string(n.id) + ": bias: " + e.what(), n.id);
        }
        try {
            n.transfer = expr::parse_function(decl.function_text);
        } catch (const expr::Error& e) {
            throw BuildError(BuildError::Kind::bad_expression,
                             "node " + std::to_string(n.id) + ": function: " + e.what(), n.id);
        }

        std::map<long long, Slot> by_slot;
        for (const model::PreNodeRef& p : decl.pre_nodes) {
            if (!known.count(p.source_node_index))
                throw BuildError(BuildError::Kind::dangling_reference,
                                 "preNode of node " + std::to_string(n.id) +
                                     " references undeclared node " +
                                     std::to_string(p.source_node_index),
                                 n.id);
            Slot s;
            s.kind = Slot::Kind::edge;
            s.source = p.source_node_index;
            by_slot[p.input_index] = s;
        }
        auto ext = external_slots.find(n.id);
        if (ext != external_slots.end())
            for (long long slot : ext->second) {
                if (by_slot.count(slot))
                    throw BuildError(BuildError::Kind::slot_gap,
                                     "node " + std::to_string(n.id) + " slot " +
                                         std::to_string(slot) +
                                         " is both a preNode slot and an external input",
                                     n.id);
                by_slot[slot] = Slot{Slot::Kind::external, 0, 1.0};
            }

        if (by_slot.empty() && !declared_in_inputs.count(n.id))
            throw BuildError(BuildError::Kind::slot_gap,
                             "node " + std::to_string(n.id) +
                                 " has no preNodes and no input values (a constant node must "
                                 "be listed in inputValues with an empty <items>)",
                             n.id);

        long long expected = 0;
        for (auto& [slot, s] : by_slot) {
            if (slot != expected)
                throw BuildError(BuildError::Kind::slot_gap,
                                 "node " + std::to_string(n.id) + " slot set is missing slot " +
                                     std::to_string(expected),
                                 n.id);
            auto w = weight_of.find({n.id, slot});
            if (w != weight_of.end()) s.weight = w->second;
            n.slots.push_back(s);
            ++expected;
        }
        g.neurons.emplace(n.id, std::move(n));
    }

    g.layers = compute_layers(g.neurons);

    if (outputs && !outputs->node_indices.empty()) {
        for (long long id : outputs->node_indices) {
            if (!g.neurons.count(id))
                throw BuildError(BuildError::Kind::unknown_node,
                                 "outputValues selects undeclared node " + std::to_string(id),
                                 id);
            g.outputs.push_back(id);
        }
    } else {
        std::set<long long> has_successor;
        g.for_each_edge([&](long long src, long long, std::size_t, double) {
            has_successor.insert(src);
        });
        for (const auto& [id, neuron] : g.neurons)
            if (!has_successor.count(id)) g.outputs.push_back(id);
    }
    if (g.outputs.empty())
        throw BuildError(BuildError::Kind::empty_outputs, "network has no output nodes");

    return g;
}

std::vector<std::vector<long long>> assign_layers(const NeuronGraph& g) {
    return compute_layers(g.neurons);
}

std::string to_dot(const NeuronGraph& g, const std::map<long long, int>* worker_of) {
    std::string out = "digraph network {\n  rankdir=LR;\n";
    for (const auto& [id, neuron] : g.neurons) {
        out += "  n" + std::to_string(id) + " [label=\"" + std::to_string(id) + "\\nlayer " +
               std::to_string(g.layer_of(id));
        if (worker_of) {
            auto w = worker_of->find(id);
            int worker = w != worker_of->end() ? w->second : 0;
            out += "\\nworker " + std::to_string(worker) +
                   "\", style=filled, colorscheme=set312, fillcolor=" +
                   std::to_string(worker % 12 + 1) + "];\n";
        } else {
            out += "\"];\n";
        }
    }
    g.for_each_edge([&](long long src, long long dst, std::size_t, double weight) {
        out += "  n" + std::to_string(src) + " -> n" + std::to_string(dst) + " [label=\"" +
               util::format_double(weight) + "\"];\n";
    });
    out += "}\n";
    return out;
}

}  // namespace annsim::graph
