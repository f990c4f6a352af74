#ifndef ANNSIM_MODEL_HPP
#define ANNSIM_MODEL_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace annsim::model {

// Stable diagnostic codes. Validation output and schema errors carry one of
// these so callers (and tests) can match on the kind without parsing prose.
namespace code {
inline constexpr const char* unexpected_element = "unexpected-element";
inline constexpr const char* missing_element = "missing-element";
inline constexpr const char* unexpected_content = "unexpected-content";
inline constexpr const char* bad_integer = "bad-integer";
inline constexpr const char* non_numeric_value = "non-numeric-value";
inline constexpr const char* duplicate_node_index = "duplicate-node-index";
inline constexpr const char* duplicate_slot = "duplicate-slot";
inline constexpr const char* self_loop = "self-loop";
inline constexpr const char* empty_architecture = "empty-architecture";
inline constexpr const char* empty_function = "empty-function";
inline constexpr const char* dangling_pre_node = "dangling-pre-node";
inline constexpr const char* unknown_node = "unknown-node";
inline constexpr const char* unknown_slot = "unknown-slot";
inline constexpr const char* slot_gap = "slot-gap";
inline constexpr const char* cycle = "cycle";
inline constexpr const char* empty_outputs = "empty-outputs";
inline constexpr const char* bad_expression = "bad-expression";
}  // namespace code

// A document that is well-formed XML but does not match the dialect.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string diag_code, std::string path, std::string msg,
                std::optional<long long> node_index = std::nullopt)
        : std::runtime_error(path + ": " + msg),
          code_(std::move(diag_code)),
          path_(std::move(path)),
          node_index_(node_index) {}

    const std::string& code() const { return code_; }
    // Slash-separated element path with 1-based positions, e.g.
    // /architecture/node[2]/preNodes/element[1].
    const std::string& path() const { return path_; }
    std::optional<long long> node_index() const { return node_index_; }

private:
    std::string code_;
    std::string path_;
    std::optional<long long> node_index_;
};

struct PreNodeRef {
    long long source_node_index = 0;
    long long input_index = 0;
    bool operator==(const PreNodeRef&) const = default;
};

struct NodeDecl {
    long long node_index = 0;
    std::vector<PreNodeRef> pre_nodes;
    std::string bias_expr;      // raw text of <b>, trimmed
    std::string function_text;  // raw text of <function>, trimmed
    bool operator==(const NodeDecl&) const = default;
};

struct ArchitectureDoc {
    std::vector<NodeDecl> nodes;  // declaration order preserved
    bool operator==(const ArchitectureDoc&) const = default;
};

struct ValueItem {
    long long input_index = 0;
    double value = 0.0;
    bool operator==(const ValueItem&) const = default;
};

// One <node> entry of an inputValues/weightValues document. A node may
// appear in several entries; only (node, slot) pairs must be unique.
struct NodeValues {
    long long node_index = 0;
    std::vector<ValueItem> items;
    bool operator==(const NodeValues&) const = default;
};

struct InputValuesDoc {
    std::vector<NodeValues> entries;
    bool operator==(const InputValuesDoc&) const = default;
};

struct WeightValuesDoc {
    std::vector<NodeValues> entries;
    bool operator==(const WeightValuesDoc&) const = default;
};

struct OutputSelectionDoc {
    std::vector<long long> node_indices;
    bool operator==(const OutputSelectionDoc&) const = default;
};

// Parsers. All throw xml::SyntaxError for malformed XML and SchemaError for
// dialect mismatches; they never return a partially filled document.
ArchitectureDoc parse_architecture(std::string_view xml_text);
InputValuesDoc parse_inputs(std::string_view xml_text);
WeightValuesDoc parse_weights(std::string_view xml_text);
OutputSelectionDoc parse_outputs(std::string_view xml_text);

// Canonical serialization; parsing the result reproduces the document.
std::string serialize(const ArchitectureDoc&);
std::string serialize(const InputValuesDoc&);
std::string serialize(const WeightValuesDoc&);
std::string serialize(const OutputSelectionDoc&);

struct Violation {
    std::string code;
    std::string message;
    std::optional<long long> node_index;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<std::string> warnings;  // e.g. weights defaulting to 1
    bool ok() const { return violations.empty(); }
};

// Checks consistency across individually well-formed documents: dangling
// preNode sources, entries for undeclared nodes, out-of-range slots, slot-set
// gaps, undeclared output selections. Violations are data, not exceptions.
//
// Slot rules: a node's slot set is the union of its preNode inputIndex values
// (edge slots) and the slots listed for it in the input-values document
// (external slots); the union must be exactly {0..k-1}. An input value that
// targets an edge slot or lies at/beyond the slot count is reported as
// unknown-slot against that entry; a hole that is not attributable to such an
// entry is reported as slot-gap against the node. A node with no slots at all
// is valid only when the input document lists it with an empty <items> (an
// explicit constant node).
ValidationReport validate_cross_refs(const ArchitectureDoc& arch,
                                     const InputValuesDoc& inputs,
                                     const WeightValuesDoc& weights,
                                     const std::optional<OutputSelectionDoc>& outputs);

}  // namespace annsim::model

#endif
