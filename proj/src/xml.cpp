#include "oais/xml.hpp"

#include <cctype>

namespace oais::xml {

Element& Element::attr(std::string key, std::string value) {
    attributes.emplace_back(std::move(key), std::move(value));
    return *this;
}

Element& Element::text(std::string value) {
    children.push_back(Node{std::move(value)});
    return *this;
}

Element& Element::child(Element e) {
    children.push_back(Node{std::move(e)});
    return *this;
}

const std::string* Element::find_attr(std::string_view key) const {
    for (const auto& [k, v] : attributes)
        if (k == key) return &v;
    return nullptr;
}

const Element* Element::first_child(std::string_view name) const {
    for (const auto& n : children)
        if (!n.is_text() && n.element().name == name) return &n.element();
    return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view name) const {
    std::vector<const Element*> out;
    for (const auto& n : children)
        if (!n.is_text() && n.element().name == name) out.push_back(&n.element());
    return out;
}

std::vector<const Element*> Element::element_children() const {
    std::vector<const Element*> out;
    for (const auto& n : children)
        if (!n.is_text()) out.push_back(&n.element());
    return out;
}

std::string Element::text_content() const {
    std::string out;
    for (const auto& n : children)
        if (n.is_text()) out += n.text();
    return out;
}

std::string_view local_name(std::string_view qname) {
    const auto colon = qname.rfind(':');
    return colon == std::string_view::npos ? qname : qname.substr(colon + 1);
}

namespace {

bool is_name_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

class Parser {
public:
    explicit Parser(std::string_view in) : in_(in) {}

    Element parse_document() {
        if (in_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;  // UTF-8 BOM
        skip_prolog();
        if (eof() || peek() != '<') fail("expected root element");
        Element root = parse_element();
        skip_misc();
        if (!eof()) fail("content after document root");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos_); }

    bool eof() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }
    char get() {
        if (eof()) fail("unexpected end of input");
        return in_[pos_++];
    }
    bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }
    void expect(std::string_view s) {
        if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
        pos_ += s.size();
    }
    void skip_ws() {
        while (!eof() && is_ws(peek())) ++pos_;
    }

    void skip_comment() {
        expect("<!--");
        const auto end = in_.find("-->", pos_);
        if (end == std::string_view::npos) fail("unterminated comment");
        pos_ = end + 3;
    }

    void skip_pi() {
        expect("<?");
        const auto end = in_.find("?>", pos_);
        if (end == std::string_view::npos) fail("unterminated processing instruction");
        pos_ = end + 2;
    }

    void skip_prolog() {
        skip_ws();
        if (starts_with("<?xml")) skip_pi();
        skip_misc();
        if (starts_with("<!DOCTYPE")) fail("DOCTYPE is not supported");
    }

    void skip_misc() {
        while (true) {
            skip_ws();
            if (starts_with("<!--"))
                skip_comment();
            else if (starts_with("<?"))
                skip_pi();
            else
                return;
        }
    }

    std::string parse_name() {
        if (eof() || !is_name_start(peek())) fail("expected name");
        const auto start = pos_;
        ++pos_;
        while (!eof() && is_name_char(peek())) ++pos_;
        return std::string(in_.substr(start, pos_ - start));
    }

    void append_char_ref(std::string& out) {
        // positioned just after "&"
        if (starts_with("#x") || starts_with("#X")) {
            pos_ += 2;
            unsigned code = 0;
            bool any = false;
            while (!eof() && std::isxdigit(static_cast<unsigned char>(peek()))) {
                const char c = get();
                code = code * 16 + (c <= '9' ? c - '0' : (std::tolower(c) - 'a' + 10));
                any = true;
                if (code > 0x10FFFF) fail("character reference out of range");
            }
            if (!any) fail("bad character reference");
            expect(";");
            append_codepoint(out, code);
        } else if (starts_with("#")) {
            ++pos_;
            unsigned code = 0;
            bool any = false;
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
                code = code * 10 + (get() - '0');
                any = true;
                if (code > 0x10FFFF) fail("character reference out of range");
            }
            if (!any) fail("bad character reference");
            expect(";");
            append_codepoint(out, code);
        } else {
            const auto semi = in_.find(';', pos_);
            if (semi == std::string_view::npos || semi - pos_ > 8) fail("unterminated entity reference");
            const auto name = in_.substr(pos_, semi - pos_);
            pos_ = semi + 1;
            if (name == "amp")
                out += '&';
            else if (name == "lt")
                out += '<';
            else if (name == "gt")
                out += '>';
            else if (name == "apos")
                out += '\'';
            else if (name == "quot")
                out += '"';
            else
                fail("unknown entity '" + std::string(name) + "'");
        }
    }

    static void append_codepoint(std::string& out, unsigned cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    std::string parse_attr_value() {
        const char quote = get();
        if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
        std::string out;
        while (true) {
            if (eof()) fail("unterminated attribute value");
            const char c = peek();
            if (c == quote) {
                ++pos_;
                return out;
            }
            if (c == '<') fail("'<' in attribute value");
            if (c == '&') {
                ++pos_;
                append_char_ref(out);
            } else {
                out += get();
            }
        }
    }

    Element parse_element() {
        expect("<");
        Element e;
        e.name = parse_name();
        while (true) {
            const bool had_ws = !eof() && is_ws(peek());
            skip_ws();
            if (eof()) fail("unterminated start tag");
            if (peek() == '>') {
                ++pos_;
                parse_content(e);
                return e;
            }
            if (starts_with("/>")) {
                pos_ += 2;
                return e;
            }
            if (!had_ws) fail("expected whitespace before attribute");
            std::string key = parse_name();
            skip_ws();
            expect("=");
            skip_ws();
            std::string value = parse_attr_value();
            for (const auto& [k, v] : e.attributes)
                if (k == key) fail("duplicate attribute '" + key + "'");
            e.attributes.emplace_back(std::move(key), std::move(value));
        }
    }

    void parse_content(Element& e) {
        std::string text;
        auto flush_text = [&] {
            if (!text.empty()) {
                e.children.push_back(Node{std::move(text)});
                text.clear();
            }
        };
        while (true) {
            if (eof()) fail("unterminated element '" + e.name + "'");
            const char c = peek();
            if (c == '<') {
                if (starts_with("</")) {
                    flush_text();
                    pos_ += 2;
                    const std::string name = parse_name();
                    if (name != e.name) fail("mismatched end tag '" + name + "' for '" + e.name + "'");
                    skip_ws();
                    expect(">");
                    return;
                }
                if (starts_with("<!--")) {
                    skip_comment();
                    continue;
                }
                if (starts_with("<![CDATA[")) {
                    pos_ += 9;
                    const auto end = in_.find("]]>", pos_);
                    if (end == std::string_view::npos) fail("unterminated CDATA section");
                    text += in_.substr(pos_, end - pos_);
                    pos_ = end + 3;
                    continue;
                }
                if (starts_with("<?")) {
                    skip_pi();
                    continue;
                }
                if (starts_with("<!")) fail("unsupported markup declaration");
                flush_text();
                e.children.push_back(Node{parse_element()});
                continue;
            }
            if (c == '&') {
                ++pos_;
                append_char_ref(text);
                continue;
            }
            text += get();
        }
    }

    std::string_view in_;
    std::size_t pos_ = 0;
};

void write_node(const Element& e, std::string& out, int depth, bool pretty);

bool text_only(const Element& e) {
    for (const auto& n : e.children)
        if (!n.is_text()) return false;
    return true;
}

bool whitespace_only(std::string_view s) {
    for (const char c : s)
        if (!is_ws(c)) return false;
    return true;
}

bool has_mixed_content(const Element& e) {
    bool has_element = false, has_text = false;
    for (const auto& n : e.children) {
        if (n.is_text() && !whitespace_only(n.text()))
            has_text = true;
        else if (!n.is_text())
            has_element = true;
    }
    return has_element && has_text;
}

void write_open_tag(const Element& e, std::string& out, bool self_close) {
    out += '<';
    out += e.name;
    for (const auto& [k, v] : e.attributes) {
        out += ' ';
        out += k;
        out += "=\"";
        out += escape_attr(v);
        out += '"';
    }
    out += self_close ? "/>" : ">";
}

void write_node(const Element& e, std::string& out, int depth, bool pretty) {
    const std::string indent = pretty ? std::string(static_cast<std::size_t>(depth) * 2, ' ') : std::string();
    out += indent;
    if (e.children.empty()) {
        write_open_tag(e, out, true);
        return;
    }
    if (text_only(e)) {
        write_open_tag(e, out, false);
        out += escape_text(e.text_content());
        out += "</" + e.name + ">";
        return;
    }
    if (has_mixed_content(e)) {
        // verbatim: no inserted whitespace
        write_open_tag(e, out, false);
        for (const auto& n : e.children) {
            if (n.is_text())
                out += escape_text(n.text());
            else
                write_node(n.element(), out, 0, false);
        }
        out += "</" + e.name + ">";
        return;
    }
    write_open_tag(e, out, false);
    for (const auto& n : e.children) {
        if (n.is_text()) continue;  // whitespace-only between elements
        out += '\n';
        write_node(n.element(), out, pretty ? depth + 1 : 0, pretty);
    }
    out += '\n';
    out += indent;
    out += "</" + e.name + ">";
}

}  // namespace

Element parse(std::string_view input) { return Parser(input).parse_document(); }

std::string write_element(const Element& root) {
    std::string out;
    write_node(root, out, 0, true);
    return out;
}

std::string write_document(const Element& root) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_node(root, out, 0, true);
    out += '\n';
    return out;
}

std::string escape_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '\r': out += "&#13;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_attr(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += "&#9;"; break;
            default: out += c;
        }
    }
    return out;
}

void strip_whitespace_nodes(Element& e) {
    std::vector<Node> kept;
    kept.reserve(e.children.size());
    for (auto& n : e.children) {
        if (n.is_text() && whitespace_only(n.text())) continue;
        if (!n.is_text()) strip_whitespace_nodes(std::get<Element>(n.value));
        kept.push_back(std::move(n));
    }
    e.children = std::move(kept);
}

}  // namespace oais::xml
