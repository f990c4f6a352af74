#ifndef ANNSIM_REPORT_HPP
#define ANNSIM_REPORT_HPP

#include <string>
#include <vector>

#include "annsim/engine.hpp"
#include "annsim/model.hpp"
#include "annsim/partition.hpp"

namespace annsim::report {

// All serializations use a fixed key order and a deterministic number
// rendering, so equal data always produces byte-identical text.

std::string report_to_json(const engine::SimReport& r);  // one line

std::string validation_to_json(const model::ValidationReport& r);  // one line

std::string partition_to_json(const partition::Assignment& a,
                              const partition::PartitionStats& st);
std::string partition_to_csv(const partition::Assignment& a);

std::string sweep_to_json(const std::vector<engine::SweepRow>& rows);
std::string sweep_to_csv(const std::vector<engine::SweepRow>& rows);

// Reads a sweep specification from JSON text. Keys: widths (array), depth,
// workers (int or array), policy (string or array), mac_cost, transfer_cost,
// msg_latency, byte_cost, value_size, seed, and optional generator overrides
// transfer, weight, bias. Unknown keys or wrong types raise
// engine::Error{invalid_spec}; malformed JSON propagates the json parse error.
engine::SweepSpec sweep_spec_from_json(const std::string& text);

// neuron,value rows for the outputs of one run.
std::string outputs_to_csv(const engine::SimReport& r);

}  // namespace annsim::report

#endif
