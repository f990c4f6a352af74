#include "annsim/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "annsim/util.hpp"

namespace annsim::engine {

namespace {

double phase_cost(long long macs, long long evals, const CostModel& cm) {
    return static_cast<double>(macs) * cm.mac_cost +
           static_cast<double>(evals) * cm.transfer_eval_cost;
}

// Per-layer simulated time of the serial baseline. Both run modes derive
// their serial_time from this one routine so that a single-worker
// distributed run reproduces the serial clock bit-for-bit.
std::vector<double> serial_layer_times(const graph::NeuronGraph& g, const CostModel& cm) {
    std::vector<double> times;
    times.reserve(g.layers.size());
    for (const std::vector<long long>& layer : g.layers) {
        long long macs = 0;
        for (long long id : layer)
            macs += static_cast<long long>(g.neurons.at(id).fan_in());
        times.push_back(phase_cost(macs, static_cast<long long>(layer.size()), cm));
    }
    return times;
}

double sum_in_order(const std::vector<double>& xs) {
    double total = 0.0;
    for (double x : xs) total += x;
    return total;
}

using InputMap = std::unordered_map<long long, std::unordered_map<long long, double>>;

InputMap build_input_map(const model::InputValuesDoc& inputs) {
    InputMap m;
    for (const model::NodeValues& nv : inputs.entries)
        for (const model::ValueItem& vi : nv.items) m[nv.node_index][vi.input_index] = vi.value;
    return m;
}

double external_value(const InputMap& m, long long neuron, long long slot) {
    auto node = m.find(neuron);
    if (node != m.end()) {
        auto item = node->second.find(slot);
        if (item != node->second.end()) return item->second;
    }
    throw Error(Error::Kind::missing_input,
                "neuron " + std::to_string(neuron) + " slot " + std::to_string(slot) +
                    " has no input value",
                neuron);
}

// f(sum w_j * x_j + b) with ascending slot order; values come from `lookup`.
template <typename Lookup>
double fire_neuron(const graph::Neuron& n, const InputMap& inputs, Lookup&& lookup) {
    double acc = 0.0;
    for (std::size_t s = 0; s < n.slots.size(); ++s) {
        const graph::Slot& slot = n.slots[s];
        double in = slot.kind == graph::Slot::Kind::edge
                        ? lookup(slot.source)
                        : external_value(inputs, n.id, static_cast<long long>(s));
        acc += slot.weight * in;
    }
    try {
        return n.transfer.eval(acc + n.bias);
    } catch (const expr::Error& e) {
        throw Error(Error::Kind::node_eval,
                    "neuron " + std::to_string(n.id) + ": " + e.what(), n.id);
    }
}

partition::Assignment single_worker_assignment(const graph::NeuronGraph& g) {
    partition::Assignment a;
    a.policy = "serial";
    a.worker_count = 1;
    for (const auto& [id, neuron] : g.neurons) a.worker_of[id] = 0;
    return a;
}

void check_assignment(const graph::NeuronGraph& g, const partition::Assignment& a) {
    if (a.worker_count < 1)
        throw Error(Error::Kind::invalid_assignment, "assignment has no workers");
    for (const auto& [id, neuron] : g.neurons) {
        auto it = a.worker_of.find(id);
        if (it == a.worker_of.end())
            throw Error(Error::Kind::invalid_assignment,
                        "assignment does not map neuron " + std::to_string(id), id);
        if (it->second < 0 || it->second >= a.worker_count)
            throw Error(Error::Kind::invalid_assignment,
                        "neuron " + std::to_string(id) + " is mapped to worker " +
                            std::to_string(it->second) + " outside 0.." +
                            std::to_string(a.worker_count - 1),
                        id);
    }
}

bool bits_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

ComparisonRecord make_comparison(const SimReport& serial, const SimReport& dist) {
    ComparisonRecord rec;
    rec.serial_time = serial.sim_time;
    rec.sim_time = dist.sim_time;
    if (rec.serial_time == 0.0)
        rec.ratio = rec.sim_time == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    else
        rec.ratio = rec.sim_time / rec.serial_time;

    rec.outputs_equal = serial.outputs.size() == dist.outputs.size();
    for (std::size_t i = 0; rec.outputs_equal && i < serial.outputs.size(); ++i)
        rec.outputs_equal = serial.outputs[i].first == dist.outputs[i].first &&
                            bits_equal(serial.outputs[i].second, dist.outputs[i].second);
    return rec;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

void CostModel::validate() const {
    auto bad = [](double v) { return !(v >= 0.0) || !std::isfinite(v); };
    if (bad(mac_cost) || bad(transfer_eval_cost) || bad(msg_latency) || bad(byte_cost) ||
        value_size < 0)
        throw Error(Error::Kind::invalid_spec,
                    "cost model fields must be non-negative and finite");
}

SimReport run_serial(const graph::NeuronGraph& g, const model::InputValuesDoc& inputs,
                     const CostModel& cm) {
    cm.validate();
    InputMap input_map = build_input_map(inputs);

    SimReport r;
    r.mode = "serial";
    r.policy = "serial";
    r.workers = 1;

    std::unordered_map<long long, double> value;
    value.reserve(g.neurons.size());
    for (const std::vector<long long>& layer : g.layers)
        for (long long id : layer) {
            const graph::Neuron& n = g.neurons.at(id);
            value[id] = fire_neuron(n, input_map, [&](long long src) { return value.at(src); });
        }

    for (long long id : g.outputs) r.outputs.emplace_back(id, value.at(id));
    r.per_layer_time = serial_layer_times(g, cm);
    r.sim_time = sum_in_order(r.per_layer_time);
    r.serial_time = r.sim_time;
    r.stats = partition::stats(g, single_worker_assignment(g));
    return r;
}

SimReport run_distributed(const graph::NeuronGraph& g, const partition::Assignment& a,
                          const model::InputValuesDoc& inputs, const CostModel& cm,
                          std::vector<ValueMsg>* trace) {
    cm.validate();
    check_assignment(g, a);
    const int P = a.worker_count;
    InputMap input_map = build_input_map(inputs);

    // Workers that own at least one successor of each neuron, ascending.
    std::unordered_map<long long, std::vector<int>> succ_workers;
    g.for_each_edge([&](long long src, long long dst, std::size_t, double) {
        std::vector<int>& ws = succ_workers[src];
        int w = a.worker_of.at(dst);
        auto pos = std::lower_bound(ws.begin(), ws.end(), w);
        if (pos == ws.end() || *pos != w) ws.insert(pos, w);
    });

    SimReport r;
    r.mode = "distributed";
    r.policy = a.policy;
    r.workers = P;

    // Worker-local value tables: a worker sees only what it computed itself
    // plus payloads delivered to it.
    std::vector<std::unordered_map<long long, double>> local(static_cast<std::size_t>(P));

    for (std::size_t L = 0; L < g.layers.size(); ++L) {
        std::vector<long long> macs(static_cast<std::size_t>(P), 0);
        std::vector<long long> evals(static_cast<std::size_t>(P), 0);

        // Compute phase: ascending id order inside each worker's owned set;
        // the arithmetic per neuron is identical to run_serial.
        for (long long id : g.layers[L]) {
            const graph::Neuron& n = g.neurons.at(id);
            auto w = static_cast<std::size_t>(a.worker_of.at(id));
            local[w][id] =
                fire_neuron(n, input_map, [&](long long src) { return local[w].at(src); });
            macs[w] += static_cast<long long>(n.fan_in());
            evals[w] += 1;
        }
        double compute = 0.0;
        for (int w = 0; w < P; ++w)
            compute = std::max(compute, phase_cost(macs[static_cast<std::size_t>(w)],
                                                   evals[static_cast<std::size_t>(w)], cm));

        // Exchange phase: one aggregated message per (src, dst) pair.
        double comm = 0.0;
        for (int w = 0; w < P; ++w) {
            std::map<int, std::vector<std::pair<long long, double>>> outbox;
            for (long long id : g.layers[L]) {
                if (a.worker_of.at(id) != w) continue;
                auto succ = succ_workers.find(id);
                if (succ == succ_workers.end()) continue;
                double v = local[static_cast<std::size_t>(w)].at(id);
                for (int dst : succ->second)
                    if (dst != w) outbox[dst].emplace_back(id, v);
            }
            double send_cost = 0.0;
            for (auto& [dst, payload] : outbox) {
                long long payload_bytes =
                    static_cast<long long>(payload.size()) * cm.value_size;
                send_cost += cm.msg_latency + static_cast<double>(payload_bytes) * cm.byte_cost;
                r.messages += 1;
                r.bytes += payload_bytes;
                for (const auto& [id, v] : payload)
                    local[static_cast<std::size_t>(dst)][id] = v;
                if (trace)
                    trace->push_back(ValueMsg{w, dst, static_cast<int>(L), std::move(payload)});
            }
            comm = std::max(comm, send_cost);
        }

        r.per_layer_time.push_back(compute + comm);
    }

    for (long long id : g.outputs) {
        auto w = static_cast<std::size_t>(a.worker_of.at(id));
        r.outputs.emplace_back(id, local[w].at(id));
    }
    r.sim_time = sum_in_order(r.per_layer_time);
    r.serial_time = sum_in_order(serial_layer_times(g, cm));
    r.stats = partition::stats(g, a);
    return r;
}

ComparisonRecord compare_runs(const graph::NeuronGraph& g, const partition::Assignment& a,
                              const model::InputValuesDoc& inputs, const CostModel& cm) {
    SimReport serial = run_serial(g, inputs, cm);
    SimReport dist = run_distributed(g, a, inputs, cm);
    return make_comparison(serial, dist);
}

GeneratedNetwork make_layered_docs(int width, int depth, const std::string& transfer,
                                   double weight, double bias, std::uint64_t seed) {
    if (width < 1 || depth < 1)
        throw Error(Error::Kind::invalid_spec, "generated networks need width >= 1, depth >= 1");

    GeneratedNetwork net;
    auto id_of = [width](int layer, int pos) {
        return static_cast<long long>(layer) * width + pos + 1;
    };
    const std::string bias_text = util::format_double(bias);

    for (int l = 0; l < depth; ++l)
        for (int j = 0; j < width; ++j) {
            model::NodeDecl decl;
            decl.node_index = id_of(l, j);
            if (l > 0)
                for (int k = 0; k < width; ++k)
                    decl.pre_nodes.push_back(model::PreNodeRef{id_of(l - 1, k), k});
            decl.bias_expr = bias_text;
            decl.function_text = transfer;
            net.arch.nodes.push_back(std::move(decl));
        }

    std::uint64_t state = seed;
    for (int j = 0; j < width; ++j) {
        model::NodeValues nv;
        nv.node_index = id_of(0, j);
        nv.items.push_back(model::ValueItem{0, unit_double(splitmix64(state))});
        net.inputs.entries.push_back(std::move(nv));
    }

    if (weight != 1.0) {  // weight 1 is the documented default
        for (int l = 1; l < depth; ++l)
            for (int j = 0; j < width; ++j) {
                model::NodeValues nv;
                nv.node_index = id_of(l, j);
                for (int k = 0; k < width; ++k)
                    nv.items.push_back(model::ValueItem{k, weight});
                net.weights.entries.push_back(std::move(nv));
            }
        for (int j = 0; j < width; ++j) {
            model::NodeValues nv;
            nv.node_index = id_of(0, j);
            nv.items.push_back(model::ValueItem{0, weight});
            net.weights.entries.push_back(std::move(nv));
        }
    }
    return net;
}

std::vector<SweepRow> bench_sweep(const SweepSpec& spec) {
    spec.cost.validate();
    if (spec.widths.empty())
        throw Error(Error::Kind::invalid_spec, "sweep spec lists no widths");
    if (spec.workers.empty())
        throw Error(Error::Kind::invalid_spec, "sweep spec lists no worker counts");
    if (spec.policies.empty())
        throw Error(Error::Kind::invalid_spec, "sweep spec lists no policies");
    if (spec.depth < 1)
        throw Error(Error::Kind::invalid_spec, "sweep depth must be at least 1");
    for (int w : spec.widths)
        if (w < 1) throw Error(Error::Kind::invalid_spec, "sweep widths must be at least 1");
    for (int p : spec.workers)
        if (p < 1)
            throw Error(Error::Kind::invalid_spec, "sweep worker counts must be at least 1");

    struct Built {
        graph::NeuronGraph g;
        model::InputValuesDoc inputs;
    };
    std::map<int, Built> cache;
    for (int width : spec.widths) {
        if (cache.count(width)) continue;
        std::uint64_t state = spec.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(width));
        GeneratedNetwork net = make_layered_docs(width, spec.depth, spec.transfer, spec.weight,
                                                 spec.bias, splitmix64(state));
        Built b{graph::build_graph(net.arch, net.weights, net.inputs, std::nullopt),
                std::move(net.inputs)};
        cache.emplace(width, std::move(b));
    }

    std::vector<SweepRow> rows;
    for (partition::Policy policy : spec.policies)
        for (int workers : spec.workers)
            for (int width : spec.widths) {
                const Built& b = cache.at(width);
                partition::Assignment a = partition::map_nodes(b.g, workers, policy);
                SimReport serial = run_serial(b.g, b.inputs, spec.cost);
                SimReport dist = run_distributed(b.g, a, b.inputs, spec.cost);

                SweepRow row;
                row.width = width;
                row.depth = spec.depth;
                row.workers = workers;
                row.policy = a.policy;
                row.record = make_comparison(serial, dist);
                row.messages = dist.messages;
                row.bytes = dist.bytes;
                row.cut_edges = dist.stats.cut_edges;
                rows.push_back(std::move(row));
            }
    return rows;
}

}  // namespace annsim::engine
