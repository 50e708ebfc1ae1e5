#pragma once

// Minimal well-formedness-checking XML reader: elements, attributes,
// character data, comments, processing instructions and the five predefined
// entities plus numeric character references. Enough for the net-exchange
// subset this project reads; errors carry the source line.

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpnet/petri.hpp"

namespace cpnet {

class XmlError : public NetError {
public:
    using NetError::NetError;
};

struct XmlNode {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<XmlNode> children;
    std::string text;  // concatenated character data directly below this node

    const std::string* attr(std::string_view key) const {
        for (const auto& [k, v] : attrs)
            if (k == key) return &v;
        return nullptr;
    }

    const XmlNode* child(std::string_view name_) const {
        for (const XmlNode& c : children)
            if (c.name == name_) return &c;
        return nullptr;
    }
};

namespace detail {

class XmlParser {
public:
    explicit XmlParser(std::string_view input) : in_(input) {}

    XmlNode parse_document() {
        skip_misc();
        if (eof()) fail("document contains no element");
        XmlNode root = parse_element();
        skip_misc();
        if (!eof()) fail("content after the document element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        std::size_t line = 1;
        for (std::size_t i = 0; i < pos_ && i < in_.size(); ++i)
            if (in_[i] == '\n') ++line;
        throw XmlError("XML error at line " + std::to_string(line) + ": " +
                       message);
    }

    bool eof() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }
    bool starts_with(std::string_view s) const {
        return in_.compare(pos_, s.size(), s) == 0;
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    // Whitespace, comments, processing instructions, doctype.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                const std::size_t end = in_.find("-->", pos_ + 4);
                if (end == std::string_view::npos) fail("unterminated comment");
                pos_ = end + 3;
            } else if (starts_with("<?")) {
                const std::size_t end = in_.find("?>", pos_ + 2);
                if (end == std::string_view::npos)
                    fail("unterminated processing instruction");
                pos_ = end + 2;
            } else if (starts_with("<!DOCTYPE")) {
                const std::size_t end = in_.find('>', pos_);
                if (end == std::string_view::npos) fail("unterminated doctype");
                pos_ = end + 1;
            } else {
                return;
            }
        }
    }

    static bool is_name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
               c == '-' || c == '.' || c == ':';
    }

    std::string parse_name() {
        const std::size_t start = pos_;
        while (!eof() && is_name_char(peek())) ++pos_;
        if (pos_ == start) fail("expected a name");
        return std::string(in_.substr(start, pos_ - start));
    }

    std::string decode(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            const std::size_t semi = raw.find(';', i);
            if (semi == std::string_view::npos) fail("unterminated entity");
            const std::string_view name = raw.substr(i + 1, semi - i - 1);
            if (name == "amp") out.push_back('&');
            else if (name == "lt") out.push_back('<');
            else if (name == "gt") out.push_back('>');
            else if (name == "quot") out.push_back('"');
            else if (name == "apos") out.push_back('\'');
            else if (!name.empty() && name[0] == '#') {
                int code = 0;
                for (char c : name.substr(1)) {
                    if (!std::isdigit(static_cast<unsigned char>(c)))
                        fail("bad character reference");
                    code = code * 10 + (c - '0');
                }
                if (code <= 0 || code > 127)
                    fail("unsupported character reference");
                out.push_back(static_cast<char>(code));
            } else {
                fail("unknown entity '&" + std::string(name) + ";'");
            }
            i = semi;
        }
        return out;
    }

    XmlNode parse_element() {
        if (eof() || peek() != '<') fail("expected '<'");
        ++pos_;
        XmlNode node;
        node.name = parse_name();
        for (;;) {
            skip_ws();
            if (eof()) fail("unterminated start tag for <" + node.name + ">");
            if (peek() == '>') {
                ++pos_;
                break;
            }
            if (starts_with("/>")) {
                pos_ += 2;
                return node;
            }
            const std::string key = parse_name();
            skip_ws();
            if (eof() || peek() != '=') fail("expected '=' after attribute name");
            ++pos_;
            skip_ws();
            if (eof() || (peek() != '"' && peek() != '\''))
                fail("expected quoted attribute value");
            const char quote = peek();
            ++pos_;
            const std::size_t start = pos_;
            while (!eof() && peek() != quote && peek() != '<') ++pos_;
            if (eof() || peek() != quote)
                fail("unterminated attribute value");
            node.attrs.emplace_back(key, decode(in_.substr(start, pos_ - start)));
            ++pos_;
        }
        // Content until the matching end tag.
        for (;;) {
            const std::size_t text_start = pos_;
            while (!eof() && peek() != '<') ++pos_;
            if (pos_ > text_start)
                node.text += decode(in_.substr(text_start, pos_ - text_start));
            if (eof()) fail("missing end tag for <" + node.name + ">");
            if (starts_with("</")) {
                pos_ += 2;
                const std::string closing = parse_name();
                if (closing != node.name)
                    fail("mismatched end tag: expected </" + node.name +
                         ">, found </" + closing + ">");
                skip_ws();
                if (eof() || peek() != '>') fail("malformed end tag");
                ++pos_;
                return node;
            }
            if (starts_with("<!--")) {
                const std::size_t end = in_.find("-->", pos_ + 4);
                if (end == std::string_view::npos) fail("unterminated comment");
                pos_ = end + 3;
            } else if (starts_with("<?")) {
                const std::size_t end = in_.find("?>", pos_ + 2);
                if (end == std::string_view::npos)
                    fail("unterminated processing instruction");
                pos_ = end + 2;
            } else {
                node.children.push_back(parse_element());
            }
        }
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline XmlNode parse_xml(std::string_view input) {
    return detail::XmlParser(input).parse_document();
}

inline std::string xml_escape(std::string_view raw, bool attribute = false) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += attribute ? "&quot;" : "\""; break;
            case '\'': out += attribute ? "&apos;" : "'"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace cpnet
