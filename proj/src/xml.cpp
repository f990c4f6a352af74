#include "annsim/xml.hpp"

#include <array>
#include <cctype>

namespace annsim::xml {

namespace {

constexpr int kMaxNestingDepth = 128;

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

// Rejects byte sequences that are not well-formed UTF-8 before the structural
// scan runs; reports the position of the first offending byte.
void check_utf8(std::string_view s) {
    std::size_t line = 1, col = 1;
    std::size_t i = 0;
    auto fail = [&]() {
        throw SyntaxError("invalid UTF-8 byte sequence", line, col);
    };
    while (i < s.size()) {
        unsigned char b = static_cast<unsigned char>(s[i]);
        std::size_t need = 0;
        unsigned char lo = 0x80, hi = 0xBF;
        if (b < 0x80) {
            if (b == '\n') { ++line; col = 1; } else { ++col; }
            ++i;
            continue;
        } else if (b >= 0xC2 && b <= 0xDF) {
            need = 1;
        } else if (b == 0xE0) {
            need = 2; lo = 0xA0;
        } else if (b >= 0xE1 && b <= 0xEC) {
            need = 2;
        } else if (b == 0xED) {
            need = 2; hi = 0x9F;
        } else if (b >= 0xEE && b <= 0xEF) {
            need = 2;
        } else if (b == 0xF0) {
            need = 3; lo = 0x90;
        } else if (b >= 0xF1 && b <= 0xF3) {
            need = 3;
        } else if (b == 0xF4) {
            need = 3; hi = 0x8F;
        } else {
            fail();
        }
        if (i + need >= s.size()) fail();
        for (std::size_t k = 1; k <= need; ++k) {
            unsigned char c = static_cast<unsigned char>(s[i + k]);
            unsigned char l = (k == 1) ? lo : 0x80;
            unsigned char h = (k == 1) ? hi : 0xBF;
            if (c < l || c > h) fail();
        }
        i += need + 1;
        ++col;
    }
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Element parse() {
        skip_misc();
        if (eof() || peek() != '<')
            fail("expected root element");
        Element root = parse_element(0);
        skip_misc();
        if (!eof())
            fail("unexpected content after root element");
        return root;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg, line_, col_);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
    }

    char take() {
        char c = s_[pos_++];
        if (c == '\n') { ++line_; col_ = 1; } else { ++col_; }
        return c;
    }

    bool starts_with(std::string_view t) const {
        return s_.compare(pos_, t.size(), t) == 0;
    }

    void expect(std::string_view t, const char* what) {
        if (!starts_with(t)) fail(std::string("expected ") + what);
        for (std::size_t k = 0; k < t.size(); ++k) take();
    }

    void skip_ws() {
        while (!eof() && is_ws(peek())) take();
    }

    // Whitespace, comments and processing instructions between markup.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                skip_comment();
            } else if (starts_with("<?")) {
                skip_pi();
            } else if (starts_with("<!")) {
                fail("doctype and other declarations are not supported");
            } else {
                return;
            }
        }
    }

    void skip_comment() {
        expect("<!--", "comment");
        while (!starts_with("-->")) {
            if (eof()) fail("unterminated comment");
            take();
        }
        expect("-->", "end of comment");
    }

    void skip_pi() {
        std::size_t start = pos_;
        expect("<?", "processing instruction");
        std::size_t body_begin = pos_;
        while (!starts_with("?>")) {
            if (eof()) fail("unterminated processing instruction");
            take();
        }
        std::string_view body = s_.substr(body_begin, pos_ - body_begin);
        expect("?>", "end of processing instruction");
        if (start == 0 || body.substr(0, 3) == "xml")
            check_encoding(body);
    }

    // UTF-8 is the only accepted encoding; a declaration naming anything else
    // is rejected outright.
    void check_encoding(std::string_view decl) const {
        std::size_t p = decl.find("encoding");
        if (p == std::string_view::npos) return;
        p = decl.find_first_of("\"'", p);
        if (p == std::string_view::npos) return;
        char quote = decl[p];
        std::size_t end = decl.find(quote, p + 1);
        if (end == std::string_view::npos) return;
        std::string value(decl.substr(p + 1, end - p - 1));
        for (char& c : value) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (value != "utf-8" && value != "utf8")
            throw SyntaxError("unsupported encoding '" + value + "' (UTF-8 only)", line_, col_);
    }

    std::string parse_name() {
        if (eof() || !is_name_start(peek())) fail("expected a name");
        std::string name;
        while (!eof() && is_name_char(peek())) name.push_back(take());
        return name;
    }

    // Resolves &lt; &gt; &amp; &apos; &quot; and numeric character references.
    void parse_reference(std::string& out) {
        expect("&", "entity reference");
        if (peek() == '#') {
            take();
            int base = 10;
            if (peek() == 'x' || peek() == 'X') { take(); base = 16; }
            unsigned long cp = 0;
            bool any = false;
            while (!eof() && peek() != ';') {
                int d;
                char c = peek();
                if (c >= '0' && c <= '9') d = c - '0';
                else if (base == 16 && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (base == 16 && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else fail("bad character reference");
                cp = cp * static_cast<unsigned long>(base) + static_cast<unsigned long>(d);
                if (cp > 0x10FFFF) fail("character reference out of range");
                any = true;
                take();
            }
            if (!any || eof()) fail("bad character reference");
            take();  // ';'
            append_utf8(out, cp);
            return;
        }
        std::string name = parse_name();
        if (eof() || peek() != ';') fail("unterminated entity reference");
        take();
        if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "amp") out.push_back('&');
        else if (name == "apos") out.push_back('\'');
        else if (name == "quot") out.push_back('"');
        else fail("unknown entity '&" + name + ";'");
    }

    static void append_utf8(std::string& out, unsigned long cp) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    std::string parse_attribute_value() {
        if (peek() != '"' && peek() != '\'') fail("expected quoted attribute value");
        char quote = take();
        std::string value;
        while (!eof() && peek() != quote) {
            if (peek() == '<') fail("'<' is not allowed in attribute values");
            if (peek() == '&') parse_reference(value);
            else value.push_back(take());
        }
        if (eof()) fail("unterminated attribute value");
        take();
        return value;
    }

    Element parse_element(int depth) {
        if (depth > kMaxNestingDepth) fail("element nesting too deep");
        Element el;
        el.line = line_;
        el.column = col_;
        expect("<", "element");
        el.name = parse_name();
        for (;;) {
            skip_ws();
            if (eof()) fail("unterminated start tag for <" + el.name + ">");
            if (peek() == '>') { take(); break; }
            if (starts_with("/>")) { expect("/>", "empty-element tag"); return el; }
            std::string attr = parse_name();
            skip_ws();
            expect("=", "'=' in attribute");
            skip_ws();
            el.attributes.emplace_back(std::move(attr), parse_attribute_value());
        }
        parse_content(el, depth);
        return el;
    }

    void parse_content(Element& el, int depth) {
        for (;;) {
            if (eof()) fail("missing end tag for <" + el.name + ">");
            if (peek() == '<') {
                if (starts_with("</")) {
                    expect("</", "end tag");
                    std::string name = parse_name();
                    if (name != el.name)
                        fail("end tag </" + name + "> does not match <" + el.name + ">");
                    skip_ws();
                    expect(">", "'>' in end tag");
                    return;
                }
                if (starts_with("<!--")) {
                    skip_comment();
                } else if (starts_with("<![CDATA[")) {
                    parse_cdata(el.text);
                } else if (starts_with("<?")) {
                    skip_pi();
                } else if (starts_with("<!")) {
                    fail("declarations are not allowed inside elements");
                } else {
                    el.children.push_back(parse_element(depth + 1));
                }
            } else if (peek() == '&') {
                parse_reference(el.text);
            } else {
                el.text.push_back(take());
            }
        }
    }

    void parse_cdata(std::string& out) {
        expect("<![CDATA[", "CDATA section");
        while (!starts_with("]]>")) {
            if (eof()) fail("unterminated CDATA section");
            out.push_back(take());
        }
        expect("]]>", "end of CDATA section");
    }
};

}  // namespace

Element parse_document(std::string_view input) {
    // Skip a UTF-8 byte-order mark if present.
    if (input.substr(0, 3) == "\xEF\xBB\xBF") input.remove_prefix(3);
    check_utf8(input);
    return Parser(input).parse();
}

std::string_view trimmed(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ws(s[b])) ++b;
    while (e > b && is_ws(s[e - 1])) --e;
    return s.substr(b, e - b);
}

std::string escape_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace annsim::xml
