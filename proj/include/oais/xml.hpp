// Minimal strict XML reader/writer.
//
// No system XML library is available in this toolchain, and every format this
// service speaks (OAI-PMH envelopes, DIP documents, ContextObject containers)
// is produced and consumed by this codebase, so a small DOM with a strict
// parser covers the need. Supported: one root element, attributes, character
// data, CDATA, comments, processing instructions, the five predefined
// entities and numeric character references. DOCTYPE is rejected.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oais::xml {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t offset)
        : std::runtime_error(std::move(message)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

struct Node;

struct Element {
    std::string name;  // qualified name as written
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Node> children;

    Element() = default;
    explicit Element(std::string n) : name(std::move(n)) {}

    Element& attr(std::string key, std::string value);
    Element& text(std::string value);
    Element& child(Element e);

    const std::string* find_attr(std::string_view key) const;
    const Element* first_child(std::string_view name) const;
    std::vector<const Element*> children_named(std::string_view name) const;
    std::vector<const Element*> element_children() const;
    // Concatenated character data of direct text children.
    std::string text_content() const;

    bool operator==(const Element&) const = default;
};

struct Node {
    std::variant<std::string, Element> value;  // text or element

    bool is_text() const { return value.index() == 0; }
    const std::string& text() const { return std::get<std::string>(value); }
    const Element& element() const { return std::get<Element>(value); }
    bool operator==(const Node&) const = default;
};

// Throws ParseError. Input must contain exactly one root element; an optional
// XML declaration, comments and PIs may surround it.
Element parse(std::string_view input);

// Pretty-printed serialization with two-space indentation. An element whose
// children are text-only renders inline so character payloads stay exact.
// Elements with mixed content render children verbatim with no added
// whitespace.
std::string write_element(const Element& root);

// write_element with the XML declaration prepended and a trailing newline.
std::string write_document(const Element& root);

std::string escape_text(std::string_view s);
std::string escape_attr(std::string_view s);

// Removes whitespace-only text nodes recursively (used to normalize elements
// extracted from an indented enclosing document before re-serializing them).
void strip_whitespace_nodes(Element& e);

// "prefix:local" -> "local"
std::string_view local_name(std::string_view qname);

}  // namespace oais::xml
