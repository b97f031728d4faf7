// NISO Z39.88 ContextObject: six entities, each described by descriptors of
// four kinds. This is the abstract envelope; representations live in kev.hpp
// (Key/Encoded-Value) and openurl_container.hpp (XML container).
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oais::openurl {

enum class DescriptorKind { Identifier, ByValueMetadata, ByReferenceMetadata, PrivateData };

struct Descriptor {
    DescriptorKind kind = DescriptorKind::Identifier;
    std::string identifier_uri;                                      // Identifier
    std::string metadata_format_uri;                                 // ByValue / ByReference
    std::vector<std::pair<std::string, std::string>> metadata_kev;   // ByValue
    std::string metadata_location;                                   // ByReference
    std::string private_payload;                                     // PrivateData

    static Descriptor identifier(std::string uri);
    static Descriptor by_value(std::string format_uri,
                               std::vector<std::pair<std::string, std::string>> kev);
    static Descriptor by_reference(std::string format_uri, std::string location);
    static Descriptor private_data(std::string payload);

    // Value of a by-value metadata key, when this is a ByValueMetadata descriptor.
    std::optional<std::string> kev_value(std::string_view key) const;

    bool operator==(const Descriptor&) const = default;
};

struct Entity {
    std::vector<Descriptor> descriptors;

    bool empty() const { return descriptors.empty(); }
    // First Identifier descriptor's URI, if any.
    std::optional<std::string> identifier() const;
    const Descriptor* by_value(std::string_view format_uri) const;

    bool operator==(const Entity&) const = default;
};

struct ContextObject {
    Entity referent;
    Entity referring_entity;
    Entity requester;
    Entity service_type;
    Entity resolver;
    Entity referrer;
    // Unknown KEV keys, preserved verbatim in input order.
    std::vector<std::pair<std::string, std::string>> extras;

    bool operator==(const ContextObject&) const = default;
};

// Metadata format the pathways application uses for referent by-value data.
inline constexpr std::string_view kPathwaysFormat = "info:ofi/fmt:kev:mtx:pathways";
// Service identifiers fixed by the application profile.
inline constexpr std::string_view kSvcDipBootstrap = "info:pathways/svc/dip";
inline constexpr std::string_view kSvcDisseminationBootstrap = "info:pathways/svc/bootstrap";
inline constexpr std::string_view kSvcGetDatastream = "info:pathways/svc/getDatastream";

}  // namespace oais::openurl
