#include "oais/openurl_container.hpp"

#include <array>

#include "oais/base64.hpp"
#include "oais/kev.hpp"
#include "oais/text.hpp"

namespace oais::openurl {

namespace {

struct EntityName {
    std::string_view element;
    Entity ContextObject::* member;
};

constexpr std::array<EntityName, 6> kEntities = {{
    {"referent", &ContextObject::referent},
    {"service-type", &ContextObject::service_type},
    {"requester", &ContextObject::requester},
    {"referrer", &ContextObject::referrer},
    {"referring-entity", &ContextObject::referring_entity},
    {"resolver", &ContextObject::resolver},
}};

std::string encode_kev_pairs(const std::vector<std::pair<std::string, std::string>>& kev) {
    std::string out;
    for (const auto& [k, v] : kev) {
        if (!out.empty()) out += '&';
        out += encode_kev_pair(k, v);
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> decode_kev_pairs(std::string_view text_in) {
    std::vector<std::pair<std::string, std::string>> out;
    if (text_in.empty()) return out;
    for (const auto& part : text::split(text_in, '&')) {
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string::npos)
            throw KevError(KevErrc::MalformedKev, "kev text segment without '='");
        const auto k = text::percent_decode(std::string_view(part).substr(0, eq));
        const auto v = text::percent_decode(std::string_view(part).substr(eq + 1));
        if (!k || !v) throw KevError(KevErrc::MalformedKev, "bad percent-encoding in kev text");
        out.emplace_back(*k, *v);
    }
    return out;
}

xml::Element render_entity(std::string_view element_name, const Entity& entity) {
    xml::Element el{std::string(element_name)};
    for (const auto& d : entity.descriptors) {
        switch (d.kind) {
            case DescriptorKind::Identifier:
                el.child(xml::Element("identifier").text(d.identifier_uri));
                break;
            case DescriptorKind::ByValueMetadata: {
                xml::Element md("metadata-by-val");
                md.attr("format", d.metadata_format_uri);
                md.child(xml::Element("kev").text(encode_kev_pairs(d.metadata_kev)));
                el.child(std::move(md));
                break;
            }
            case DescriptorKind::ByReferenceMetadata: {
                xml::Element md("metadata-by-ref");
                md.attr("format", d.metadata_format_uri);
                md.text(d.metadata_location);
                el.child(std::move(md));
                break;
            }
            case DescriptorKind::PrivateData:
                el.child(xml::Element("private-data").text(base64::encode(d.private_payload)));
                break;
        }
    }
    return el;
}

Entity parse_entity(const xml::Element& el) {
    Entity out;
    for (const auto* c : el.element_children()) {
        const auto name = xml::local_name(c->name);
        if (name == "identifier") {
            out.descriptors.push_back(Descriptor::identifier(c->text_content()));
        } else if (name == "metadata-by-val") {
            const auto* fmt = c->find_attr("format");
            if (!fmt) throw KevError(KevErrc::MalformedKev, "metadata-by-val without format");
            const auto* kev = c->first_child("kev");
            out.descriptors.push_back(
                Descriptor::by_value(*fmt, decode_kev_pairs(kev ? kev->text_content() : "")));
        } else if (name == "metadata-by-ref") {
            const auto* fmt = c->find_attr("format");
            if (!fmt) throw KevError(KevErrc::MalformedKev, "metadata-by-ref without format");
            out.descriptors.push_back(Descriptor::by_reference(*fmt, c->text_content()));
        } else if (name == "private-data") {
            const auto decoded = base64::decode(c->text_content());
            if (!decoded) throw KevError(KevErrc::MalformedKev, "private-data is not base64");
            out.descriptors.push_back(Descriptor::private_data(*decoded));
        }
    }
    return out;
}

}  // namespace

xml::Element render_container(const std::vector<ContextObject>& cos) {
    xml::Element root("context-objects");
    root.attr("xmlns", std::string(kContainerNamespace));
    root.attr("count", std::to_string(cos.size()));
    for (const auto& co : cos) {
        xml::Element el("context-object");
        for (const auto& e : kEntities) {
            const Entity& entity = co.*(e.member);
            if (!entity.empty()) el.child(render_entity(e.element, entity));
        }
        root.child(std::move(el));
    }
    return root;
}

std::string render_container_document(const std::vector<ContextObject>& cos) {
    return xml::write_document(render_container(cos));
}

std::vector<ContextObject> parse_container(const xml::Element& root) {
    if (xml::local_name(root.name) != "context-objects")
        throw KevError(KevErrc::MalformedKev, "root element is not 'context-objects'");
    std::vector<ContextObject> out;
    for (const auto* child : root.element_children()) {
        if (xml::local_name(child->name) != "context-object") continue;
        ContextObject co;
        for (const auto* ec : child->element_children()) {
            const auto name = xml::local_name(ec->name);
            for (const auto& e : kEntities)
                if (name == e.element) co.*(e.member) = parse_entity(*ec);
        }
        out.push_back(std::move(co));
    }
    if (const auto* count = root.find_attr("count")) {
        if (*count != std::to_string(out.size()))
            throw KevError(KevErrc::MalformedKev, "container count attribute disagrees with content");
    } else {
        throw KevError(KevErrc::MalformedKev, "container lacks a count attribute");
    }
    return out;
}

std::vector<ContextObject> parse_container_document(std::string_view bytes) {
    xml::Element root;
    try {
        root = xml::parse(bytes);
    } catch (const xml::ParseError& e) {
        throw KevError(KevErrc::MalformedKev, std::string("bad container document: ") + e.what());
    }
    return parse_container(root);
}

}  // namespace oais::openurl
