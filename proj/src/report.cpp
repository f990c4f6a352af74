#include "annsim/report.hpp"

#include <json.hpp>

namespace annsim::report {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json outputs_json(const std::vector<std::pair<long long, double>>& outputs) {
    ordered_json arr = ordered_json::array();
    for (const auto& [id, value] : outputs) arr.push_back(ordered_json::array({id, value}));
    return arr;
}

ordered_json stats_json(const partition::PartitionStats& st) {
    ordered_json j;
    j["per_worker_macs"] = st.per_worker_macs;
    j["cut_edges"] = st.cut_edges;
    j["imbalance"] = st.imbalance;
    return j;
}

// Shortest round-trip form, shared with the JSON renderer so CSV and JSON
// cells agree byte-for-byte.
std::string num(double v) { return ordered_json(v).dump(); }

ordered_json sweep_row_json(const engine::SweepRow& row) {
    ordered_json j;
    j["policy"] = row.policy;
    j["workers"] = row.workers;
    j["width"] = row.width;
    j["depth"] = row.depth;
    j["serial_time"] = row.record.serial_time;
    j["sim_time"] = row.record.sim_time;
    j["ratio"] = row.record.ratio;
    j["messages"] = row.messages;
    j["bytes"] = row.bytes;
    j["cut_edges"] = row.cut_edges;
    j["outputs_equal"] = row.record.outputs_equal;
    return j;
}

}  // namespace

std::string report_to_json(const engine::SimReport& r) {
    ordered_json j;
    j["mode"] = r.mode;
    j["policy"] = r.policy;
    j["workers"] = r.workers;
    j["outputs"] = outputs_json(r.outputs);
    j["sim_time"] = r.sim_time;
    j["serial_time"] = r.serial_time;
    j["messages"] = r.messages;
    j["bytes"] = r.bytes;
    j["per_layer_time"] = r.per_layer_time;
    j["stats"] = stats_json(r.stats);
    return j.dump() + "\n";
}

std::string validation_to_json(const model::ValidationReport& r) {
    ordered_json j;
    ordered_json violations = ordered_json::array();
    for (const model::Violation& v : r.violations) {
        ordered_json jv;
        jv["code"] = v.code;
        jv["message"] = v.message;
        if (v.node_index) jv["node"] = *v.node_index;
        violations.push_back(jv);
    }
    j["violations"] = violations;
    j["warnings"] = r.warnings;
    return j.dump() + "\n";
}

std::string partition_to_json(const partition::Assignment& a,
                              const partition::PartitionStats& st) {
    ordered_json j;
    j["policy"] = a.policy;
    j["workers"] = a.worker_count;
    ordered_json mapping = ordered_json::array();
    for (const auto& [id, worker] : a.worker_of)
        mapping.push_back(ordered_json::array({id, worker}));
    j["assignment"] = mapping;
    j["stats"] = stats_json(st);
    return j.dump() + "\n";
}

std::string partition_to_csv(const partition::Assignment& a) {
    std::string out = "neuron,worker\n";
    for (const auto& [id, worker] : a.worker_of)
        out += std::to_string(id) + "," + std::to_string(worker) + "\n";
    return out;
}

std::string sweep_to_json(const std::vector<engine::SweepRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const engine::SweepRow& row : rows) arr.push_back(sweep_row_json(row));
    return arr.dump(2) + "\n";
}

std::string sweep_to_csv(const std::vector<engine::SweepRow>& rows) {
    std::string out =
        "policy,workers,width,depth,serial_time,sim_time,ratio,messages,bytes,cut_edges,"
        "outputs_equal\n";
    for (const engine::SweepRow& row : rows) {
        out += row.policy + "," + std::to_string(row.workers) + "," +
               std::to_string(row.width) + "," + std::to_string(row.depth) + "," +
               num(row.record.serial_time) + "," + num(row.record.sim_time) + "," +
               num(row.record.ratio) + "," + std::to_string(row.messages) + "," +
               std::to_string(row.bytes) + "," + std::to_string(row.cut_edges) + "," +
               (row.record.outputs_equal ? "true" : "false") + "\n";
    }
    return out;
}

std::string outputs_to_csv(const engine::SimReport& r) {
    std::string out = "neuron,value\n";
    for (const auto& [id, value] : r.outputs)
        out += std::to_string(id) + "," + num(value) + "\n";
    return out;
}

engine::SweepSpec sweep_spec_from_json(const std::string& text) {
    auto bad = [](const std::string& msg) {
        return engine::Error(engine::Error::Kind::invalid_spec, "sweep spec: " + msg);
    };

    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw bad("top level must be an object");

    engine::SweepSpec spec;
    for (const auto& [key, value] : j.items()) {
        if (key == "widths") {
            if (!value.is_array()) throw bad("widths must be an array of integers");
            for (const auto& v : value) {
                if (!v.is_number_integer()) throw bad("widths must be an array of integers");
                spec.widths.push_back(v.get<int>());
            }
        } else if (key == "depth") {
            if (!value.is_number_integer()) throw bad("depth must be an integer");
            spec.depth = value.get<int>();
        } else if (key == "workers") {
            if (value.is_number_integer()) {
                spec.workers.push_back(value.get<int>());
            } else if (value.is_array()) {
                for (const auto& v : value) {
                    if (!v.is_number_integer())
                        throw bad("workers must be an integer or an array of integers");
                    spec.workers.push_back(v.get<int>());
                }
            } else {
                throw bad("workers must be an integer or an array of integers");
            }
        } else if (key == "policy") {
            auto read_policy = [&](const nlohmann::json& v) {
                if (!v.is_string()) throw bad("policy must be a string or an array of strings");
                try {
                    return partition::policy_from_name(v.get<std::string>());
                } catch (const partition::Error& e) {
                    throw bad(e.what());
                }
            };
            if (value.is_array())
                for (const auto& v : value) spec.policies.push_back(read_policy(v));
            else
                spec.policies.push_back(read_policy(value));
        } else if (key == "mac_cost" || key == "transfer_cost" || key == "msg_latency" ||
                   key == "byte_cost") {
            if (!value.is_number()) throw bad(key + " must be a number");
            double d = value.get<double>();
            if (key == "mac_cost") spec.cost.mac_cost = d;
            else if (key == "transfer_cost") spec.cost.transfer_eval_cost = d;
            else if (key == "msg_latency") spec.cost.msg_latency = d;
            else spec.cost.byte_cost = d;
        } else if (key == "value_size") {
            if (!value.is_number_integer()) throw bad("value_size must be an integer");
            spec.cost.value_size = value.get<long long>();
        } else if (key == "seed") {
            if (!value.is_number_integer()) throw bad("seed must be an integer");
            spec.seed = value.get<std::uint64_t>();
        } else if (key == "transfer") {
            if (!value.is_string()) throw bad("transfer must be a string");
            spec.transfer = value.get<std::string>();
        } else if (key == "weight") {
            if (!value.is_number()) throw bad("weight must be a number");
            spec.weight = value.get<double>();
        } else if (key == "bias") {
            if (!value.is_number()) throw bad("bias must be a number");
            spec.bias = value.get<double>();
        } else {
            throw bad("unknown key '" + key + "'");
        }
    }
    if (spec.workers.empty()) spec.workers.push_back(1);
    if (spec.policies.empty()) spec.policies.push_back(partition::Policy::layer_block);
    return spec;
}

}  // namespace annsim::report
