#include "annsim/partition.hpp"

#include <algorithm>

namespace annsim::partition {

std::string_view policy_name(Policy p) {
    switch (p) {
        case Policy::round_robin: return "round_robin";
        case Policy::layer_block: return "layer_block";
        case Policy::balanced_fanin: return "balanced_fanin";
    }
    return "?";
}

Policy policy_from_name(std::string_view name) {
    if (name == "round_robin") return Policy::round_robin;
    if (name == "layer_block") return Policy::layer_block;
    if (name == "balanced_fanin") return Policy::balanced_fanin;
    throw Error("unknown policy '" + std::string(name) +
                "' (expected round_robin, layer_block or balanced_fanin)");
}

Assignment map_nodes(const graph::NeuronGraph& g, int worker_count, Policy policy) {
    if (worker_count < 1)
        throw Error("worker count must be at least 1, got " + std::to_string(worker_count));

    Assignment a;
    a.policy = policy_name(policy);
    a.worker_count = worker_count;

    switch (policy) {
        case Policy::round_robin: {
            // Position in ascending id order decides the worker, so the
            // mapping is a function of the id set alone.
            int next = 0;
            for (const auto& [id, neuron] : g.neurons) {
                a.worker_of[id] = next;
                next = (next + 1) % worker_count;
            }
            break;
        }
        case Policy::layer_block: {
            for (const std::vector<long long>& layer : g.layers) {
                std::size_t m = layer.size();
                std::size_t base = m / static_cast<std::size_t>(worker_count);
                std::size_t extra = m % static_cast<std::size_t>(worker_count);
                std::size_t i = 0;
                for (int w = 0; w < worker_count; ++w) {
                    std::size_t block = base + (static_cast<std::size_t>(w) < extra ? 1 : 0);
                    for (std::size_t k = 0; k < block; ++k) a.worker_of[layer[i++]] = w;
                }
            }
            break;
        }
        case Policy::balanced_fanin: {
            std::vector<const graph::Neuron*> order;
            order.reserve(g.neurons.size());
            for (const auto& [id, neuron] : g.neurons) order.push_back(&neuron);
            std::stable_sort(order.begin(), order.end(),
                             [](const graph::Neuron* x, const graph::Neuron* y) {
                                 return x->fan_in() > y->fan_in();
                             });  // equal fan-in keeps ascending id
            std::vector<long long> load(static_cast<std::size_t>(worker_count), 0);
            for (const graph::Neuron* n : order) {
                int best = 0;
                for (int w = 1; w < worker_count; ++w)
                    if (load[static_cast<std::size_t>(w)] <
                        load[static_cast<std::size_t>(best)])
                        best = w;
                a.worker_of[n->id] = best;
                load[static_cast<std::size_t>(best)] += static_cast<long long>(n->fan_in());
            }
            break;
        }
    }
    return a;
}

PartitionStats stats(const graph::NeuronGraph& g, const Assignment& a) {
    PartitionStats st;
    st.per_worker_macs.assign(static_cast<std::size_t>(a.worker_count), 0);
    for (const auto& [id, neuron] : g.neurons)
        st.per_worker_macs[static_cast<std::size_t>(a.worker_of.at(id))] +=
            static_cast<long long>(neuron.fan_in());

    g.for_each_edge([&](long long src, long long dst, std::size_t, double) {
        if (a.worker_of.at(src) != a.worker_of.at(dst)) ++st.cut_edges;
    });

    long long total = 0, max_load = 0;
    for (long long m : st.per_worker_macs) {
        total += m;
        max_load = std::max(max_load, m);
    }
    double mean = static_cast<double>(total) / static_cast<double>(a.worker_count);
    st.imbalance = total == 0 ? 1.0 : static_cast<double>(max_load) / mean;
    return st;
}

}  // namespace annsim::partition
