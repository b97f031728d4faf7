#include "oais/packaging.hpp"

#include <set>

#include "oais/base64.hpp"
#include "oais/text.hpp"
#include "oais/time.hpp"

namespace oais::packaging {

std::string_view to_string(PackagingErrc c) {
    switch (c) {
        case PackagingErrc::DuplicateFormat: return "DuplicateFormat";
        case PackagingErrc::UnknownFormat: return "UnknownFormat";
        case PackagingErrc::InvalidDescriptor: return "InvalidDescriptor";
        case PackagingErrc::MalformedXml: return "MalformedXml";
        case PackagingErrc::BadBase64: return "BadBase64";
        case PackagingErrc::MissingFragmentId: return "MissingFragmentId";
    }
    return "PackagingError";
}

DipFormatDescriptor native_format() {
    DipFormatDescriptor d;
    d.format_uri = std::string(kNativeDipFormat);
    d.metadata_prefix = "pathways_dip_xml";
    d.namespace_uri = std::string(kNativeDipFormat);
    d.schema_url = "http://localhost/schemas/pathways-dip.xsd";
    d.embed_mode = EmbedMode::Inline;
    return d;
}

void FormatRegistry::register_format(DipFormatDescriptor desc) {
    if (!text::is_absolute_uri(desc.format_uri))
        throw PackagingError(PackagingErrc::InvalidDescriptor,
                             "format_uri is not an absolute URI: '" + desc.format_uri + "'");
    if (!text::is_metadata_prefix(desc.metadata_prefix))
        throw PackagingError(PackagingErrc::InvalidDescriptor,
                             "metadata prefix has illegal characters: '" + desc.metadata_prefix + "'");
    if (desc.namespace_uri.empty())
        throw PackagingError(PackagingErrc::InvalidDescriptor, "namespace_uri must not be empty");
    for (const auto& f : formats_) {
        if (f.format_uri == desc.format_uri)
            throw PackagingError(PackagingErrc::DuplicateFormat, "'" + desc.format_uri + "'");
        if (f.metadata_prefix == desc.metadata_prefix)
            throw PackagingError(PackagingErrc::DuplicateFormat,
                                 "prefix '" + desc.metadata_prefix + "' already registered");
    }
    formats_.push_back(std::move(desc));
}

const DipFormatDescriptor* FormatRegistry::find(std::string_view prefix_or_uri) const {
    for (const auto& f : formats_)
        if (f.metadata_prefix == prefix_or_uri || f.format_uri == prefix_or_uri) return &f;
    // svc-qualified alias: info:pathways/svc/dip.X -> info:pathways/dip.X
    constexpr std::string_view alias_prefix = "info:pathways/svc/dip";
    if (prefix_or_uri.rfind(alias_prefix, 0) == 0) {
        const std::string unaliased = "info:pathways/dip" + std::string(prefix_or_uri.substr(alias_prefix.size()));
        for (const auto& f : formats_)
            if (f.format_uri == unaliased) return &f;
    }
    return nullptr;
}

const DipFormatDescriptor* FormatRegistry::find_by_namespace(std::string_view namespace_uri) const {
    for (const auto& f : formats_)
        if (f.namespace_uri == namespace_uri) return &f;
    return nullptr;
}

xml::Element FormatRegistry::derive_element(const archive::Aip& aip,
                                            const DipFormatDescriptor& desc) const {
    xml::Element root("dip");
    root.attr("xmlns", desc.namespace_uri)
        .attr("ciId", aip.ci_id.value)
        .attr("aipId", aip.aip_id.value)
        .attr("created", time::format_utc(aip.created));
    for (const auto& ds : aip.datastreams) {
        xml::Element component("component");
        component.attr("id", ds.fragment_id).attr("mimeType", ds.media_type);
        xml::Element resource("resource");
        if (desc.embed_mode == EmbedMode::Inline) {
            resource.text(base64::encode(ds.content));
        } else {
            if (!ref_url_)
                throw PackagingError(PackagingErrc::InvalidDescriptor,
                                     "by-reference format needs a dissemination URL builder");
            resource.attr("ref", ref_url_(aip, ds.fragment_id));
        }
        component.child(std::move(resource));
        root.child(std::move(component));
    }
    return root;
}

DipDocument derive_dip(const archive::Aip& aip, std::string_view format_uri,
                       const FormatRegistry& registry) {
    const auto* desc = registry.find(format_uri);
    if (!desc) throw PackagingError(PackagingErrc::UnknownFormat, "'" + std::string(format_uri) + "'");
    DipDocument doc;
    doc.format_uri = desc->format_uri;
    doc.xml = xml::write_document(registry.derive_element(aip, *desc));
    doc.source_aip = aip.aip_id;
    doc.ci_id = aip.ci_id;
    return doc;
}

ParsedDip parse_dip_element(const xml::Element& root, const FormatRegistry& registry) {
    if (xml::local_name(root.name) != "dip")
        throw PackagingError(PackagingErrc::MalformedXml, "root element is not 'dip'");
    const auto* ns = root.find_attr("xmlns");
    const auto* desc = ns ? registry.find_by_namespace(*ns) : nullptr;
    if (!desc)
        throw PackagingError(PackagingErrc::UnknownFormat,
                             ns ? "namespace '" + *ns + "' is not registered" : "root has no namespace");
    ParsedDip out;
    const auto* ci = root.find_attr("ciId");
    const auto* aip = root.find_attr("aipId");
    const auto* created = root.find_attr("created");
    if (!ci || !aip || !created)
        throw PackagingError(PackagingErrc::MalformedXml, "dip element missing identity attributes");
    out.ci_id.value = *ci;
    out.source_aip.value = *aip;
    const auto t = time::parse_utc(*created);
    if (!t) throw PackagingError(PackagingErrc::MalformedXml, "bad created instant: " + *created);
    out.created = *t;

    std::set<std::string_view> seen;
    for (const auto* el : root.element_children()) {
        if (xml::local_name(el->name) != "component") continue;
        const auto* id = el->find_attr("id");
        if (!id || id->empty())
            throw PackagingError(PackagingErrc::MissingFragmentId, "component without id attribute");
        if (!seen.insert(*id).second)
            throw PackagingError(PackagingErrc::MalformedXml, "duplicate fragment id '" + *id + "'");
        archive::Datastream ds;
        ds.fragment_id = *id;
        if (const auto* mime = el->find_attr("mimeType")) ds.media_type = *mime;
        const auto* resource = el->first_child("resource");
        if (!resource || (resource->text_content().empty() && resource->find_attr("ref")))
            throw PackagingError(PackagingErrc::BadBase64,
                                 "component '" + *id + "' carries no inline payload");
        const auto decoded = base64::decode(resource->text_content());
        if (!decoded)
            throw PackagingError(PackagingErrc::BadBase64,
                                 "component '" + *id + "' payload is not base64");
        ds.content = *decoded;
        out.datastreams.push_back(std::move(ds));
    }
    return out;
}

ParsedDip parse_dip(std::string_view xml_bytes, const FormatRegistry& registry) {
    xml::Element root;
    try {
        root = xml::parse(xml_bytes);
    } catch (const xml::ParseError& e) {
        throw PackagingError(PackagingErrc::MalformedXml, e.what());
    }
    return parse_dip_element(root, registry);
}

}  // namespace oais::packaging
