// Key/Encoded-Value representation of a ContextObject, transported in an HTTP
// query string (Z39.88 By-Value transport, HTTP GET instantiation).
//
// Key layout per entity prefix (rft, svc, req, rfr, rfe, res):
//   <pfx>_id        Identifier descriptor (repeatable)
//   <pfx>_val_fmt   format of the By-Value Metadata descriptor (single)
//   <pfx>.<key>     one By-Value metadata pair
//   <pfx>_ref_fmt   format of the By-Reference Metadata descriptor (single)
//   <pfx>_ref       location of the By-Reference Metadata descriptor (single)
// Bookkeeping keys url_ver / url_ctx_fmt are always emitted and accepted but
// not required on input. Unknown keys are preserved as extras, not rejected.
//
// parse_kev and serialize_kev are mutual inverses on the representable
// subset: entities in canonical descriptor order (Identifiers, then ByValue,
// then ByReference), at most one ByValue and one ByReference per entity, and
// no PrivateData descriptors.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "oais/context_object.hpp"

namespace oais::openurl {

enum class KevErrc { MalformedKev, Unrepresentable };

class KevError : public std::runtime_error {
public:
    KevError(KevErrc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    KevErrc code() const { return code_; }

private:
    KevErrc code_;
};

// Parses a raw URL query string (the part after '?'). Throws KevError
// (MalformedKev) on undecodable percent escapes or repeated singleton keys.
ContextObject parse_kev(std::string_view query);

// Deterministic key order, RFC 3986 percent-encoding. Throws KevError
// (Unrepresentable) for PrivateData descriptors or multiple ByValue /
// ByReference descriptors on one entity.
std::string serialize_kev(const ContextObject& co);

// One k=v pair codec, shared with the XML container's embedded KEV text.
std::string encode_kev_pair(std::string_view key, std::string_view value);

}  // namespace oais::openurl
