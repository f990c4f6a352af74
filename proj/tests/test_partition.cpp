#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>

#include "annsim/graph.hpp"
#include "annsim/partition.hpp"
#include "annsim/util.hpp"
#include "support/oracles.hpp"
#include "support/random_network.hpp"

using namespace annsim;
using partition::Policy;

namespace {

std::string fixture(const std::string& rel) {
    return util::read_file(std::string(ANNSIM_FIXTURE_DIR) + "/" + rel);
}

graph::NeuronGraph diamond() {
    return graph::build_graph(
        model::parse_architecture(fixture("diamond/architecture.xml")),
        model::parse_weights(fixture("diamond/weights.xml")),
        model::parse_inputs(fixture("diamond/inputs.xml")),
        model::parse_outputs(fixture("diamond/outputs.xml")));
}

std::map<long long, int> mapping(const partition::Assignment& a) { return a.worker_of; }

}  // namespace

TEST_CASE("round robin walks ascending ids cyclically") {
    graph::NeuronGraph g = diamond();
    auto a = partition::map_nodes(g, 2, Policy::round_robin);
    CHECK(mapping(a) ==
          std::map<long long, int>{{1, 0}, {2, 1}, {3, 0}, {4, 1}, {5, 0}});
    CHECK(a.policy == "round_robin");
    CHECK(partition::stats(g, a).cut_edges == 6);  // every diamond edge crosses
}

TEST_CASE("layer_block splits each layer into contiguous blocks") {
    graph::NeuronGraph g = diamond();
    auto a = partition::map_nodes(g, 2, Policy::layer_block);
    CHECK(mapping(a) ==
          std::map<long long, int>{{1, 0}, {3, 1}, {2, 0}, {4, 1}, {5, 0}});
    CHECK(partition::stats(g, a).cut_edges == 3);  // 3->2, 1->4, 4->5
}

TEST_CASE("balanced_fanin assigns heavy neurons first to the least-loaded worker") {
    graph::NeuronGraph g = diamond();
    auto a = partition::map_nodes(g, 2, Policy::balanced_fanin);
    // Fan-ins: 2,4,5 have two slots; 1,3 have one. Order 2,4,5,1,3 with
    // ties broken toward the lower worker id.
    CHECK(mapping(a) ==
          std::map<long long, int>{{2, 0}, {4, 1}, {5, 0}, {1, 1}, {3, 1}});
    auto st = partition::stats(g, a);
    CHECK(st.per_worker_macs == std::vector<long long>{4, 4});
    CHECK(st.imbalance == 1.0);
}

TEST_CASE("one worker degenerates to serial placement") {
    graph::NeuronGraph g = diamond();
    for (Policy p : {Policy::round_robin, Policy::layer_block, Policy::balanced_fanin}) {
        auto a = partition::map_nodes(g, 1, p);
        for (const auto& [id, w] : a.worker_of) CHECK(w == 0);
        auto st = partition::stats(g, a);
        CHECK(st.cut_edges == 0);
        CHECK(st.per_worker_macs == std::vector<long long>{8});
    }
}

TEST_CASE("invalid worker counts are rejected") {
    graph::NeuronGraph g = diamond();
    CHECK_THROWS_AS(partition::map_nodes(g, 0, Policy::round_robin), partition::Error);
    CHECK_THROWS_AS(partition::map_nodes(g, -3, Policy::layer_block), partition::Error);
}

TEST_CASE("policy names round-trip") {
    for (Policy p : {Policy::round_robin, Policy::layer_block, Policy::balanced_fanin})
        CHECK(partition::policy_from_name(partition::policy_name(p)) == p);
    CHECK_THROWS_AS(partition::policy_from_name("magic"), partition::Error);
}

TEST_CASE("more workers than neurons leaves the extras idle") {
    graph::NeuronGraph g = diamond();
    for (Policy p : {Policy::round_robin, Policy::layer_block, Policy::balanced_fanin}) {
        auto a = partition::map_nodes(g, 8, p);
        auto st = partition::stats(g, a);
        long long total = 0;
        for (long long m : st.per_worker_macs) total += m;
        CHECK(total == g.slot_count());
        CHECK(st.per_worker_macs.size() == 8);
    }
}

TEST_CASE("round robin depends on ids, not declaration order") {
    auto arch = model::parse_architecture(fixture("diamond/architecture.xml"));
    auto inputs = model::parse_inputs(fixture("diamond/inputs.xml"));
    auto weights = model::parse_weights(fixture("diamond/weights.xml"));

    model::ArchitectureDoc shuffled = arch;
    std::reverse(shuffled.nodes.begin(), shuffled.nodes.end());

    graph::NeuronGraph g1 = graph::build_graph(arch, weights, inputs, std::nullopt);
    graph::NeuronGraph g2 = graph::build_graph(shuffled, weights, inputs, std::nullopt);
    CHECK(partition::map_nodes(g1, 3, Policy::round_robin).worker_of ==
          partition::map_nodes(g2, 3, Policy::round_robin).worker_of);
}

TEST_CASE("random graphs: stats invariants") {
    for (std::uint64_t seed = 200; seed < 240; ++seed) {
        CAPTURE(seed);
        auto net = testsupport::random_network(seed);
        graph::NeuronGraph g =
            graph::build_graph(net.arch, net.weights, net.inputs, std::nullopt);

        long long max_fanin = 0;
        for (const auto& [id, n] : g.neurons)
            max_fanin = std::max(max_fanin, static_cast<long long>(n.fan_in()));

        for (int workers : {1, 2, 3, 8}) {
            for (Policy p : {Policy::round_robin, Policy::layer_block, Policy::balanced_fanin}) {
                auto a = partition::map_nodes(g, workers, p);
                REQUIRE(a.worker_of.size() == g.neurons.size());
                auto st = partition::stats(g, a);

                long long total = 0;
                for (long long m : st.per_worker_macs) total += m;
                REQUIRE(total == g.slot_count());
                REQUIRE(st.cut_edges <= g.edge_count());
                if (workers == 1) REQUIRE(st.cut_edges == 0);

                if (p == Policy::balanced_fanin) {
                    long long lo = st.per_worker_macs[0], hi = st.per_worker_macs[0];
                    for (long long m : st.per_worker_macs) {
                        lo = std::min(lo, m);
                        hi = std::max(hi, m);
                    }
                    // Greedy LPT-style spread bound.
                    REQUIRE(hi - lo <= max_fanin);
                }
            }
        }
    }
}
