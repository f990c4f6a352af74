#ifndef ANNSIM_XML_HPP
#define ANNSIM_XML_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace annsim::xml {

// Thrown for malformed input: bad UTF-8, unbalanced tags, stray characters,
// unknown entities, unsupported encodings.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::string msg, std::size_t line, std::size_t column)
        : std::runtime_error("xml syntax error at " + std::to_string(line) + ":" +
                             std::to_string(column) + ": " + std::move(msg)),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// One parsed element. Character data from all text runs inside the element is
// concatenated into `text`; comments and processing instructions are dropped.
struct Element {
    std::string name;
    std::string text;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Element> children;
    std::size_t line = 0;
    std::size_t column = 0;

    bool has_child_elements() const { return !children.empty(); }
};

// Parses a complete document and returns its root element.
// Accepts an optional XML declaration (UTF-8 only), comments, processing
// instructions and CDATA sections. No namespaces, no DOCTYPE.
Element parse_document(std::string_view input);

// Strips leading/trailing ASCII whitespace.
std::string_view trimmed(std::string_view s);

// Escapes &, <, >, " for use in element content or attribute values.
std::string escape_text(std::string_view s);

}  // namespace annsim::xml

#endif
