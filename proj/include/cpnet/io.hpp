#pragma once

// Net serialization. Two interchangeable formats:
//
//  * a line-based text format:
//        place <label> [tokens]
//        trans <label>
//        arc <from> <to>
//    '#' starts a comment, blank lines are ignored, declarations may appear
//    in any order (arcs may reference nodes declared later);
//
//  * a place/transition subset of the PNML interchange format: one <net>
//    holding <place> (with optional <initialMarking><text>), <transition>
//    and <arc source target> elements; id attributes become labels; known
//    decorations are ignored, unknown elements are skipped with a warning.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cpnet/petri.hpp"
#include "cpnet/xml.hpp"

namespace cpnet {

class ParseError : public NetError {
public:
    using NetError::NetError;
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        if (i > start) out.emplace_back(line.substr(start, i - start));
    }
    return out;
}

[[noreturn]] inline void parse_fail(int line, const std::string& message) {
    throw ParseError("line " + std::to_string(line) + ": " + message);
}

}  // namespace detail

inline PetriNet parse_net_text(std::string_view text) {
    struct Arc {
        std::string from, to;
        int line;
    };
    PetriNetBuilder builder;
    std::vector<Arc> arcs;
    std::istringstream stream{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(stream, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const auto fields = detail::split_ws(line);
        if (fields.empty()) continue;
        const std::string& keyword = fields[0];
        try {
            if (keyword == "place") {
                if (fields.size() < 2 || fields.size() > 3)
                    detail::parse_fail(lineno, "expected: place <label> [tokens]");
                std::uint32_t tokens = 0;
                if (fields.size() == 3) {
                    const auto& s = fields[2];
                    const auto res =
                        std::from_chars(s.data(), s.data() + s.size(), tokens);
                    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                        detail::parse_fail(lineno, "bad token count '" + s + "'");
                }
                builder.add_place(fields[1], tokens);
            } else if (keyword == "trans") {
                if (fields.size() != 2)
                    detail::parse_fail(lineno, "expected: trans <label>");
                builder.add_transition(fields[1]);
            } else if (keyword == "arc") {
                if (fields.size() != 3)
                    detail::parse_fail(lineno, "expected: arc <from> <to>");
                arcs.push_back({fields[1], fields[2], lineno});
            } else {
                detail::parse_fail(lineno, "unknown keyword '" + keyword + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const NetError& e) {
            detail::parse_fail(lineno, e.what());
        }
    }
    for (const Arc& arc : arcs) {
        try {
            builder.add_flow(arc.from, arc.to);
        } catch (const NetError& e) {
            detail::parse_fail(arc.line, e.what());
        }
    }
    return builder.build();
}

inline std::string write_net_text(const PetriNet& net) {
    for (NodeId v = 0; v < net.node_count(); ++v)
        for (char c : net.label(v))
            if (std::isspace(static_cast<unsigned char>(c)) || c == '#')
                throw NetError("label '" + net.label(v) +
                               "' cannot be written to the text format");
    std::ostringstream out;
    // Nodes in id order so that reading the output reproduces the ids.
    for (NodeId v = 0; v < net.node_count(); ++v) {
        if (net.is_place(v)) {
            out << "place " << net.label(v);
            if (net.initial_tokens(v) > 0) out << ' ' << net.initial_tokens(v);
            out << '\n';
        } else {
            out << "trans " << net.label(v) << '\n';
        }
    }
    for (const Flow& f : net.flows())
        out << "arc " << net.label(f.from) << ' ' << net.label(f.to) << '\n';
    return out.str();
}

inline PetriNet parse_pnml(std::string_view xml,
                           std::vector<std::string>* warnings = nullptr) {
    const XmlNode root = parse_xml(xml);
    auto warn = [&](const std::string& message) {
        if (warnings) warnings->push_back(message);
    };
    const XmlNode* net_node = nullptr;
    if (root.name == "pnml") {
        for (const XmlNode& c : root.children) {
            if (c.name == "net") {
                if (net_node) {
                    warn("additional <net> elements ignored");
                    break;
                }
                net_node = &c;
            } else {
                warn("skipping unknown element <" + c.name + ">");
            }
        }
    } else if (root.name == "net") {
        net_node = &root;
    }
    if (!net_node) throw ParseError("no <net> element found");

    struct Arc {
        std::string source, target;
    };
    PetriNetBuilder builder;
    std::vector<Arc> arcs;
    auto trimmed = [](const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    };
    for (const XmlNode& c : net_node->children) {
        try {
            if (c.name == "place") {
                const std::string* id = c.attr("id");
                if (!id) throw ParseError("<place> without id attribute");
                std::uint32_t tokens = 0;
                if (const XmlNode* mark = c.child("initialMarking")) {
                    const XmlNode* text = mark->child("text");
                    const std::string value =
                        trimmed(text ? text->text : mark->text);
                    if (!value.empty()) {
                        const auto res = std::from_chars(
                            value.data(), value.data() + value.size(), tokens);
                        if (res.ec != std::errc() ||
                            res.ptr != value.data() + value.size())
                            throw ParseError("bad initial marking '" + value +
                                             "' on place '" + *id + "'");
                    }
                }
                for (const XmlNode& sub : c.children)
                    if (sub.name != "initialMarking" && sub.name != "name" &&
                        sub.name != "graphics" && sub.name != "toolspecific")
                        warn("skipping unknown element <" + sub.name +
                             "> in place '" + *id + "'");
                builder.add_place(*id, tokens);
            } else if (c.name == "transition") {
                const std::string* id = c.attr("id");
                if (!id) throw ParseError("<transition> without id attribute");
                builder.add_transition(*id);
            } else if (c.name == "arc") {
                const std::string* source = c.attr("source");
                const std::string* target = c.attr("target");
                if (!source || !target)
                    throw ParseError("<arc> needs source and target attributes");
                arcs.push_back({*source, *target});
            } else if (c.name == "name" || c.name == "graphics" ||
                       c.name == "toolspecific") {
                // Known decoration; nothing to extract.
            } else {
                warn("skipping unknown element <" + c.name + ">");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const NetError& e) {
            throw ParseError(e.what());
        }
    }
    for (const Arc& arc : arcs) {
        try {
            builder.add_flow(arc.source, arc.target);
        } catch (const NetError& e) {
            throw ParseError("arc " + arc.source + " -> " + arc.target + ": " +
                             e.what());
        }
    }
    return builder.build();
}

inline std::string write_pnml(const PetriNet& net) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<pnml xmlns=\"http://www.pnml.org/version-2009/grammar/pnml\">\n"
        << "  <net id=\"net0\" "
           "type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n";
    // Nodes in id order so that reading the output reproduces the ids.
    for (NodeId v = 0; v < net.node_count(); ++v) {
        if (net.is_place(v)) {
            out << "    <place id=\"" << xml_escape(net.label(v), true) << "\"";
            if (net.initial_tokens(v) > 0)
                out << ">\n      <initialMarking>\n        <text>"
                    << net.initial_tokens(v)
                    << "</text>\n      </initialMarking>\n    </place>\n";
            else
                out << "/>\n";
        } else {
            out << "    <transition id=\"" << xml_escape(net.label(v), true)
                << "\"/>\n";
        }
    }
    std::size_t arc_id = 0;
    for (const Flow& f : net.flows())
        out << "    <arc id=\"arc" << arc_id++ << "\" source=\""
            << xml_escape(net.label(f.from), true) << "\" target=\""
            << xml_escape(net.label(f.to), true) << "\"/>\n";
    out << "  </net>\n</pnml>\n";
    return out.str();
}

enum class NetFormat { Text, Pnml };

inline NetFormat format_for_path(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    return (ext == ".pnml" || ext == ".xml") ? NetFormat::Pnml : NetFormat::Text;
}

inline PetriNet load_net(const std::filesystem::path& path,
                         std::optional<NetFormat> format = std::nullopt,
                         std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw NetError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const NetFormat f = format ? *format : format_for_path(path);
    return f == NetFormat::Pnml ? parse_pnml(buffer.str(), warnings)
                                : parse_net_text(buffer.str());
}

inline void save_net(const std::filesystem::path& path, const PetriNet& net,
                     std::optional<NetFormat> format = std::nullopt) {
    std::ofstream out(path);
    if (!out) throw NetError("cannot write '" + path.string() + "'");
    const NetFormat f = format ? *format : format_for_path(path);
    out << (f == NetFormat::Pnml ? write_pnml(net) : write_net_text(net));
}

}  // namespace cpnet
