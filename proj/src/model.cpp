#include "annsim/model.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "annsim/xml.hpp"

namespace annsim::model {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Walks the children of one element in declaration order, enforcing the fixed
// child sequence of the dialect and building diagnostic paths as it goes.
class Cursor {
public:
    Cursor(const xml::Element& el, std::string path) : el_(el), path_(std::move(path)) {
        if (!el.attributes.empty())
            throw SchemaError(code::unexpected_content, path_,
                              "attributes are not allowed on <" + el.name + ">");
        if (!el.children.empty() && !xml::trimmed(el.text).empty())
            throw SchemaError(code::unexpected_content, path_,
                              "stray text inside <" + el.name + ">");
    }

    const std::string& path() const { return path_; }

    bool done() const { return next_ >= el_.children.size(); }

    // Child must be present and named `name`.
    const xml::Element& require(std::string_view name) {
        const xml::Element* c = accept(name);
        if (!c)
            throw SchemaError(code::missing_element, path_,
                              "expected <" + std::string(name) + "> inside <" + el_.name + ">");
        return *c;
    }

    // Consumes the next child if it is named `name`.
    const xml::Element* accept(std::string_view name) {
        if (done() || el_.children[next_].name != name) return nullptr;
        ++counts_[el_.children[next_].name];
        return &el_.children[next_++];
    }

    void finish() const {
        if (!done()) {
            const xml::Element& extra = el_.children[next_];
            throw SchemaError(code::unexpected_element, child_path(extra),
                              "unexpected element <" + extra.name + ">");
        }
    }

    std::string child_path(const xml::Element& child) const {
        std::size_t nth = 1;
        for (std::size_t i = 0; i < el_.children.size(); ++i) {
            if (&el_.children[i] == &child) break;
            if (el_.children[i].name == child.name) ++nth;
        }
        return path_ + "/" + child.name + "[" + std::to_string(nth) + "]";
    }

private:
    const xml::Element& el_;
    std::string path_;
    std::size_t next_ = 0;
    std::unordered_map<std::string, std::size_t> counts_;
};

// Leaf element: no children, no attributes; returns the trimmed text.
std::string leaf_text(const xml::Element& el, const std::string& path) {
    if (!el.attributes.empty())
        throw SchemaError(code::unexpected_content, path,
                          "attributes are not allowed on <" + el.name + ">");
    if (!el.children.empty())
        throw SchemaError(code::unexpected_element, path,
                          "<" + el.name + "> must contain text only");
    return std::string(xml::trimmed(el.text));
}

long long parse_integer(const xml::Element& el, const std::string& path, long long min_value) {
    std::string text = leaf_text(el, path);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw SchemaError(code::bad_integer, path, "'" + text + "' is not an integer");
    if (value < min_value)
        throw SchemaError(code::bad_integer, path,
                          "value " + text + " is below the minimum " + std::to_string(min_value));
    return value;
}

double parse_value(const xml::Element& el, const std::string& path) {
    std::string text = leaf_text(el, path);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
        throw SchemaError(code::non_numeric_value, path, "'" + text + "' is not a finite number");
    return value;
}

const xml::Element& parse_root(const xml::Element& root, std::string_view expected) {
    if (root.name != expected)
        throw SchemaError(code::unexpected_element, "/" + root.name,
                          "expected root element <" + std::string(expected) + ">");
    return root;
}

std::vector<NodeValues> parse_values_entries(std::string_view xml_text,
                                             std::string_view root_name) {
    xml::Element root = xml::parse_document(xml_text);
    parse_root(root, root_name);
    std::string root_path = "/" + std::string(root_name);
    Cursor doc(root, root_path);

    std::vector<NodeValues> entries;
    std::set<std::pair<long long, long long>> seen;
    while (const xml::Element* node = doc.accept("node")) {
        std::string node_path = doc.child_path(*node);
        Cursor cur(*node, node_path);
        NodeValues nv;
        nv.node_index = parse_integer(cur.require("nodeIndex"),
                                      node_path + "/nodeIndex", 1);
        const xml::Element& items = cur.require("items");
        std::string items_path = node_path + "/items";
        Cursor item_cur(items, items_path);
        while (const xml::Element* item = item_cur.accept("item")) {
            std::string item_path = item_cur.child_path(*item);
            Cursor ic(*item, item_path);
            ValueItem vi;
            vi.input_index = parse_integer(ic.require("inputIndex"),
                                           item_path + "/inputIndex", 0);
            vi.value = parse_value(ic.require("value"), item_path + "/value");
            ic.finish();
            if (!seen.insert({nv.node_index, vi.input_index}).second)
                throw SchemaError(code::duplicate_slot, item_path,
                                  "duplicate entry for node " + std::to_string(nv.node_index) +
                                      " slot " + std::to_string(vi.input_index),
                                  nv.node_index);
            nv.items.push_back(vi);
        }
        item_cur.finish();
        cur.finish();
        entries.push_back(std::move(nv));
    }
    doc.finish();
    return entries;
}

std::string serialize_values(const std::vector<NodeValues>& entries,
                             std::string_view root_name) {
    std::string out;
    out += "<" + std::string(root_name) + ">\n";
    for (const NodeValues& nv : entries) {
        out += "  <node>\n";
        out += "    <nodeIndex>" + std::to_string(nv.node_index) + "</nodeIndex>\n";
        out += "    <items>\n";
        for (const ValueItem& vi : nv.items) {
            out += "      <item>\n";
            out += "        <inputIndex>" + std::to_string(vi.input_index) + "</inputIndex>\n";
            out += "        <value>" + format_double(vi.value) + "</value>\n";
            out += "      </item>\n";
        }
        out += "    </items>\n";
        out += "  </node>\n";
    }
    out += "</" + std::string(root_name) + ">\n";
    return out;
}

}  // namespace

ArchitectureDoc parse_architecture(std::string_view xml_text) {
    xml::Element root = xml::parse_document(xml_text);
    parse_root(root, "architecture");
    Cursor doc(root, "/architecture");

    ArchitectureDoc arch;
    std::unordered_set<long long> ids;
    while (const xml::Element* node = doc.accept("node")) {
        std::string node_path = doc.child_path(*node);
        Cursor cur(*node, node_path);
        NodeDecl decl;
        decl.node_index = parse_integer(cur.require("nodeIndex"),
                                        node_path + "/nodeIndex", 1);
        if (!ids.insert(decl.node_index).second)
            throw SchemaError(code::duplicate_node_index, node_path + "/nodeIndex",
                              "nodeIndex " + std::to_string(decl.node_index) +
                                  " is declared more than once",
                              decl.node_index);

        if (const xml::Element* pre = cur.accept("preNodes")) {
            std::string pre_path = node_path + "/preNodes";
            Cursor pre_cur(*pre, pre_path);
            std::unordered_set<long long> slots;
            while (const xml::Element* element = pre_cur.accept("element")) {
                std::string el_path = pre_cur.child_path(*element);
                Cursor ec(*element, el_path);
                PreNodeRef ref;
                ref.source_node_index = parse_integer(ec.require("nodeIndex"),
                                                      el_path + "/nodeIndex", 1);
                ref.input_index = parse_integer(ec.require("inputIndex"),
                                                el_path + "/inputIndex", 0);
                ec.finish();
                if (ref.source_node_index == decl.node_index)
                    throw SchemaError(code::self_loop, el_path,
                                      "node " + std::to_string(decl.node_index) +
                                          " lists itself as a preNode",
                                      decl.node_index);
                if (!slots.insert(ref.input_index).second)
                    throw SchemaError(code::duplicate_slot, el_path,
                                      "node " + std::to_string(decl.node_index) +
                                          " declares inputIndex " +
                                          std::to_string(ref.input_index) + " twice",
                                      decl.node_index);
                decl.pre_nodes.push_back(ref);
            }
            pre_cur.finish();
        }

        decl.bias_expr = leaf_text(cur.require("b"), node_path + "/b");
        decl.function_text = leaf_text(cur.require("function"), node_path + "/function");
        if (decl.function_text.empty())
            throw SchemaError(code::empty_function, node_path + "/function",
                              "node " + std::to_string(decl.node_index) +
                                  " has an empty transfer function",
                              decl.node_index);
        cur.finish();
        arch.nodes.push_back(std::move(decl));
    }
    doc.finish();
    if (arch.nodes.empty())
        throw SchemaError(code::empty_architecture, "/architecture",
                          "architecture declares no nodes");
    return arch;
}

InputValuesDoc parse_inputs(std::string_view xml_text) {
    return InputValuesDoc{parse_values_entries(xml_text, "inputValues")};
}

WeightValuesDoc parse_weights(std::string_view xml_text) {
    return WeightValuesDoc{parse_values_entries(xml_text, "weightValues")};
}

OutputSelectionDoc parse_outputs(std::string_view xml_text) {
    xml::Element root = xml::parse_document(xml_text);
    parse_root(root, "outputValues");
    Cursor doc(root, "/outputValues");

    OutputSelectionDoc out;
    std::unordered_set<long long> seen;
    while (const xml::Element* node = doc.accept("node")) {
        std::string node_path = doc.child_path(*node);
        Cursor cur(*node, node_path);
        long long id = parse_integer(cur.require("nodeIndex"), node_path + "/nodeIndex", 1);
        cur.finish();
        if (!seen.insert(id).second)
            throw SchemaError(code::duplicate_node_index, node_path + "/nodeIndex",
                              "node " + std::to_string(id) + " is selected more than once", id);
        out.node_indices.push_back(id);
    }
    doc.finish();
    return out;
}

std::string serialize(const ArchitectureDoc& arch) {
    std::string out = "<architecture>\n";
    for (const NodeDecl& n : arch.nodes) {
        out += "  <node>\n";
        out += "    <nodeIndex>" + std::to_string(n.node_index) + "</nodeIndex>\n";
        if (!n.pre_nodes.empty()) {
            out += "    <preNodes>\n";
            for (const PreNodeRef& p : n.pre_nodes) {
                out += "      <element>\n";
                out += "        <nodeIndex>" + std::to_string(p.source_node_index) +
                       "</nodeIndex>\n";
                out += "        <inputIndex>" + std::to_string(p.input_index) +
                       "</inputIndex>\n";
                out += "      </element>\n";
            }
            out += "    </preNodes>\n";
        }
        out += "    <b>" + xml::escape_text(n.bias_expr) + "</b>\n";
        out += "    <function>" + xml::escape_text(n.function_text) + "</function>\n";
        out += "  </node>\n";
    }
    out += "</architecture>\n";
    return out;
}

std::string serialize(const InputValuesDoc& doc) {
    return serialize_values(doc.entries, "inputValues");
}

std::string serialize(const WeightValuesDoc& doc) {
    return serialize_values(doc.entries, "weightValues");
}

std::string serialize(const OutputSelectionDoc& doc) {
    std::string out = "<outputValues>\n";
    for (long long id : doc.node_indices) {
        out += "  <node>\n    <nodeIndex>" + std::to_string(id) + "</nodeIndex>\n  </node>\n";
    }
    out += "</outputValues>\n";
    return out;
}

ValidationReport validate_cross_refs(const ArchitectureDoc& arch,
                                     const InputValuesDoc& inputs,
                                     const WeightValuesDoc& weights,
                                     const std::optional<OutputSelectionDoc>& outputs) {
    ValidationReport report;
    auto violation = [&](const char* vcode, std::string msg,
                         std::optional<long long> node = std::nullopt) {
        report.violations.push_back(Violation{vcode, std::move(msg), node});
    };

    std::map<long long, std::set<long long>> edge_slots;  // node -> preNode slots
    for (const NodeDecl& n : arch.nodes) edge_slots[n.node_index];
    for (const NodeDecl& n : arch.nodes)
        for (const PreNodeRef& p : n.pre_nodes) {
            if (!edge_slots.count(p.source_node_index))
                violation(code::dangling_pre_node,
                          "preNode of node " + std::to_string(n.node_index) +
                              " references undeclared node " +
                              std::to_string(p.source_node_index),
                          n.node_index);
            edge_slots[n.node_index].insert(p.input_index);
        }
    // Restrict to declared nodes again (dangling sources were recorded above
    // but must not look like architecture nodes).
    std::set<long long> known;
    for (const NodeDecl& n : arch.nodes) known.insert(n.node_index);

    std::map<long long, std::set<long long>> external_slots;
    std::set<long long> declared_in_inputs;
    for (const NodeValues& nv : inputs.entries) {
        if (!known.count(nv.node_index)) {
            violation(code::unknown_node,
                      "inputValues entry references undeclared node " +
                          std::to_string(nv.node_index),
                      nv.node_index);
            continue;
        }
        declared_in_inputs.insert(nv.node_index);
        for (const ValueItem& vi : nv.items)
            external_slots[nv.node_index].insert(vi.input_index);
    }

    std::set<long long> flagged;  // nodes whose slot problem is already reported
    for (const NodeValues& nv : inputs.entries) {
        if (!known.count(nv.node_index)) continue;
        const std::set<long long>& edges = edge_slots[nv.node_index];
        std::size_t slot_count = edges.size();
        for (long long s : external_slots[nv.node_index])
            if (!edges.count(s)) ++slot_count;
        for (const ValueItem& vi : nv.items) {
            if (edges.count(vi.input_index)) {
                violation(code::unknown_slot,
                          "input value for node " + std::to_string(nv.node_index) +
                              " targets slot " + std::to_string(vi.input_index) +
                              ", which is fed by a preNode",
                          nv.node_index);
                flagged.insert(nv.node_index);
            } else if (vi.input_index >= static_cast<long long>(slot_count)) {
                violation(code::unknown_slot,
                          "input value for node " + std::to_string(nv.node_index) +
                              " references slot " + std::to_string(vi.input_index) +
                              " outside the node's slot set {0.." +
                              std::to_string(slot_count - 1) + "}",
                          nv.node_index);
                flagged.insert(nv.node_index);
            }
        }
    }

    std::set<std::pair<long long, long long>> weighted;
    for (const NodeValues& nv : weights.entries) {
        if (!known.count(nv.node_index)) {
            violation(code::unknown_node,
                      "weightValues entry references undeclared node " +
                          std::to_string(nv.node_index),
                      nv.node_index);
            continue;
        }
        for (const ValueItem& vi : nv.items) {
            weighted.insert({nv.node_index, vi.input_index});
            if (!edge_slots[nv.node_index].count(vi.input_index) &&
                !external_slots[nv.node_index].count(vi.input_index)) {
                violation(code::unknown_slot,
                          "weight for node " + std::to_string(nv.node_index) + " slot " +
                              std::to_string(vi.input_index) + ", which is not a declared slot",
                          nv.node_index);
                flagged.insert(nv.node_index);
            }
        }
    }

    if (outputs)
        for (long long id : outputs->node_indices)
            if (!known.count(id))
                violation(code::unknown_node,
                          "outputValues selects undeclared node " + std::to_string(id), id);

    for (const NodeDecl& n : arch.nodes) {
        if (flagged.count(n.node_index)) continue;
        std::set<long long> slots = edge_slots[n.node_index];
        auto ext = external_slots.find(n.node_index);
        if (ext != external_slots.end()) slots.insert(ext->second.begin(), ext->second.end());
        if (slots.empty()) {
            if (!declared_in_inputs.count(n.node_index))
                violation(code::slot_gap,
                          "node " + std::to_string(n.node_index) +
                              " has no preNodes and no input values (a constant node must be "
                              "listed in inputValues with an empty <items>)",
                          n.node_index);
            continue;
        }
        long long expected = 0;
        for (long long s : slots) {
            if (s != expected) {
                violation(code::slot_gap,
                          "node " + std::to_string(n.node_index) + " slot set is missing slot " +
                              std::to_string(expected),
                          n.node_index);
                break;
            }
            ++expected;
        }
    }

    if (report.ok()) {
        for (const NodeDecl& n : arch.nodes) {
            std::set<long long> slots = edge_slots[n.node_index];
            auto ext = external_slots.find(n.node_index);
            if (ext != external_slots.end()) slots.insert(ext->second.begin(), ext->second.end());
            for (long long s : slots)
                if (!weighted.count({n.node_index, s}))
                    report.warnings.push_back("node " + std::to_string(n.node_index) + " slot " +
                                              std::to_string(s) +
                                              " has no declared weight; defaulting to 1");
        }
    }

    return report;
}

}  // namespace annsim::model
