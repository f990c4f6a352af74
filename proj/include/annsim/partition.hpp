#ifndef ANNSIM_PARTITION_HPP
#define ANNSIM_PARTITION_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "annsim/graph.hpp"

namespace annsim::partition {

class Error : public std::runtime_error {
public:
    explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

enum class Policy {
    round_robin,     // ascending ids, cyclically
    layer_block,     // contiguous id blocks within each layer
    balanced_fanin,  // greedy: heaviest fan-in to the least-loaded worker
};

std::string_view policy_name(Policy p);
Policy policy_from_name(std::string_view name);  // throws Error on unknown names

// Total mapping neuron id -> worker id in [0, worker_count).
struct Assignment {
    std::map<long long, int> worker_of;
    std::string policy;
    int worker_count = 1;
};

struct PartitionStats {
    std::vector<long long> per_worker_macs;  // sum of fan-in of owned neurons
    long long cut_edges = 0;                 // edges whose endpoints differ in worker
    double imbalance = 1.0;                  // max/mean of per_worker_macs
};

// Deterministic for fixed inputs; throws Error when worker_count < 1.
Assignment map_nodes(const graph::NeuronGraph& g, int worker_count, Policy policy);

PartitionStats stats(const graph::NeuronGraph& g, const Assignment& a);

}  // namespace annsim::partition

#endif
