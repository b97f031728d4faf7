// DIP format registry and the neutral XML packaging format.
//
// The native format (format URI info:pathways/dip.xml) serializes an AIP as
//   <dip xmlns=NS ciId=".." aipId=".." created="..">
//     <component id=FRAG mimeType=MIME><resource>BASE64</resource></component>*
//   </dip>
// Inline mode embeds datastream bytes as one unwrapped base64 run; ByReference
// mode emits <resource ref="URL"/> where URL is the Level-2 identity-service
// request for that fragment. Additional formats register through the same
// descriptor and are rendered with the same structure under their own
// namespace.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oais/archive.hpp"
#include "oais/xml.hpp"

namespace oais::packaging {

enum class EmbedMode { Inline, ByReference };

struct DipFormatDescriptor {
    std::string format_uri;
    std::string metadata_prefix;  // OAI-PMH-legal token
    std::string namespace_uri;    // XML namespace of the root element
    std::string schema_url;
    EmbedMode embed_mode = EmbedMode::Inline;

    bool operator==(const DipFormatDescriptor&) const = default;
};

enum class PackagingErrc {
    DuplicateFormat,
    UnknownFormat,
    InvalidDescriptor,
    MalformedXml,
    BadBase64,
    MissingFragmentId,
};

std::string_view to_string(PackagingErrc c);

class PackagingError : public std::runtime_error {
public:
    PackagingError(PackagingErrc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
    PackagingErrc code() const { return code_; }

private:
    PackagingErrc code_;
};

// Builds the dissemination URL embedded by ByReference formats.
using ReferenceUrlBuilder =
    std::function<std::string(const archive::Aip&, const std::string& fragment_id)>;

// Registrations happen at configuration time; afterwards the registry is
// read-only and freely shared across request threads.
class FormatRegistry {
public:
    void register_format(DipFormatDescriptor desc);

    // Lookup by metadata prefix, by format URI, or by the svc-qualified alias
    // of a format URI (info:pathways/svc/dip.X resolves to info:pathways/dip.X).
    const DipFormatDescriptor* find(std::string_view prefix_or_uri) const;
    const DipFormatDescriptor* find_by_namespace(std::string_view namespace_uri) const;
    const std::vector<DipFormatDescriptor>& formats() const { return formats_; }

    void set_reference_url_builder(ReferenceUrlBuilder builder) { ref_url_ = std::move(builder); }

    xml::Element derive_element(const archive::Aip& aip, const DipFormatDescriptor& desc) const;

private:
    std::vector<DipFormatDescriptor> formats_;
    ReferenceUrlBuilder ref_url_;
};

struct DipDocument {
    std::string format_uri;
    std::string xml;  // full document bytes
    archive::AipId source_aip;
    archive::CiId ci_id;
};

struct ParsedDip {
    archive::CiId ci_id;
    archive::AipId source_aip;
    std::int64_t created = 0;
    std::vector<archive::Datastream> datastreams;
};

// Pure function of (AIP contents, format descriptor): repeated calls return
// byte-identical documents. Throws UnknownFormat for unregistered URIs.
DipDocument derive_dip(const archive::Aip& aip, std::string_view format_uri,
                       const FormatRegistry& registry);

// Inverse of derive_dip for Inline documents in a registered format.
ParsedDip parse_dip(std::string_view xml_bytes, const FormatRegistry& registry);
ParsedDip parse_dip_element(const xml::Element& root, const FormatRegistry& registry);

inline constexpr std::string_view kNativeDipFormat = "info:pathways/dip.xml";

// The native descriptor with default prefix/schema fields.
DipFormatDescriptor native_format();

}  // namespace oais::packaging
