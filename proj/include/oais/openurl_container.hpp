// XML container of ContextObjects: the response body of the disambiguation
// and service-listing steps. Structural subset of the registry's XML
// ContextObject Format: root <context-objects count=N> with <context-object>
// children; each entity child holds <identifier>, <metadata-by-val> (format
// attribute, <kev> text in percent-encoded k=v&... form), <metadata-by-ref>
// (format attribute, location text) and <private-data> (base64) elements.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "oais/context_object.hpp"
#include "oais/xml.hpp"

namespace oais::openurl {

inline constexpr std::string_view kContainerNamespace = "info:ofi/fmt:xml:xsd:ctx";

xml::Element render_container(const std::vector<ContextObject>& cos);
std::string render_container_document(const std::vector<ContextObject>& cos);

// Throws KevError(MalformedKev) on structural problems (bad count attribute,
// undecodable kev text, unknown entity elements are ignored).
std::vector<ContextObject> parse_container(const xml::Element& root);
std::vector<ContextObject> parse_container_document(std::string_view bytes);

}  // namespace oais::openurl
