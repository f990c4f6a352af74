#ifndef ANNSIM_TESTS_RANDOM_NETWORK_HPP
#define ANNSIM_TESTS_RANDOM_NETWORK_HPP

// Deterministic generator of small random feed-forward networks, expressed
// as documents so tests exercise the whole parse -> build pipeline. The
// generator never uses std:: distributions, so a seed produces the same
// network on every platform.

#include <cstdint>
#include <string>
#include <vector>

#include "annsim/model.hpp"
#include "annsim/util.hpp"

namespace annsim::testsupport {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    // Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

private:
    std::uint64_t state_;
};

struct RandomNetwork {
    model::ArchitectureDoc arch;
    model::InputValuesDoc inputs;
    model::WeightValuesDoc weights;
};

// Up to 64 neurons with at most 4 slots each, random edge/external slot
// layouts, occasional zero-slot constant nodes and a mix of transfer
// functions. Weights stay small so no transfer can overflow.
inline RandomNetwork random_network(std::uint64_t seed) {
    Rng rng(seed);
    const int n = 1 + static_cast<int>(rng.below(64));

    // Random id labels so topological position and id order are unrelated.
    std::vector<long long> label(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) label[static_cast<std::size_t>(i)] = i + 1;
    for (int i = n - 1; i > 0; --i)
        std::swap(label[static_cast<std::size_t>(i)],
                  label[rng.below(static_cast<std::uint64_t>(i + 1))]);

    static const std::vector<std::string> transfers = {
        "f(x)=x",
        "f(x)=sigmoid(x)",
        "f(x)=tanh(x)",
        "f(x)=relu(x)",
        "f(x)=abs(x)",
        "f(x)=step(x)",
        "f(x)=1/(1+exp(-x))",
        "f(x)=x/2+1/4",
    };

    RandomNetwork net;
    for (int p = 0; p < n; ++p) {
        model::NodeDecl decl;
        decl.node_index = label[static_cast<std::size_t>(p)];
        decl.bias_expr = util::format_double(rng.range(-1.0, 1.0));
        decl.function_text = transfers[rng.below(transfers.size())];

        int max_edges = p < 4 ? p : 4;
        int edges = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_edges) + 1));
        int externals;
        if (edges == 0) {
            // Mostly source nodes; sometimes an explicit constant node.
            externals = rng.below(8) == 0 ? 0 : 1 + static_cast<int>(rng.below(3));
        } else {
            externals = static_cast<int>(rng.below(static_cast<std::uint64_t>(4 - edges) + 1));
        }
        int slots = edges + externals;

        // Distinct source positions among the earlier nodes.
        std::vector<int> sources;
        while (static_cast<int>(sources.size()) < edges) {
            int cand = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
            bool fresh = true;
            for (int s : sources) fresh = fresh && s != cand;
            if (fresh) sources.push_back(cand);
        }

        // Shuffle which slot indices carry edges.
        std::vector<bool> is_edge(static_cast<std::size_t>(slots), false);
        for (int i = 0; i < edges; ++i) is_edge[static_cast<std::size_t>(i)] = true;
        for (int i = slots - 1; i > 0; --i) {
            auto j = rng.below(static_cast<std::uint64_t>(i + 1));
            std::swap(is_edge[static_cast<std::size_t>(i)], is_edge[j]);
        }

        model::NodeValues input_entry;
        input_entry.node_index = decl.node_index;
        model::NodeValues weight_entry;
        weight_entry.node_index = decl.node_index;

        int next_source = 0;
        for (int s = 0; s < slots; ++s) {
            if (is_edge[static_cast<std::size_t>(s)]) {
                long long src = label[static_cast<std::size_t>(sources[
                    static_cast<std::size_t>(next_source++)])];
                decl.pre_nodes.push_back(model::PreNodeRef{src, s});
            } else {
                input_entry.items.push_back(model::ValueItem{s, rng.range(-1.0, 1.0)});
            }
            weight_entry.items.push_back(model::ValueItem{s, rng.range(-0.25, 0.25)});
        }

        // List the node in the input document when it has external slots, or
        // when it has no slots at all (the explicit constant-node form).
        if (!input_entry.items.empty() || slots == 0)
            net.inputs.entries.push_back(std::move(input_entry));
        if (!weight_entry.items.empty())
            net.weights.entries.push_back(std::move(weight_entry));
        net.arch.nodes.push_back(std::move(decl));
    }
    return net;
}

}  // namespace annsim::testsupport

#endif
