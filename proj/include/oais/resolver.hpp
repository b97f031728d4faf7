// OpenURL resolver (Z39.88 application profile over the archive).
//
// Conformance Level 1 orders DIPs: bootstrap (svc id info:pathways/svc/dip)
// lists one ContextObject per AIP of the referent; replaying one of those
// lists the registered DIP formats as service types; replaying again returns
// the DIP document.
// Conformance Level 2 requests datastream disseminations: bootstrap (svc id
// info:pathways/svc/bootstrap) lists AIPs; the next step lists dissemination
// services per applicable fragment; the final step streams the MIME-typed
// bytes. The built-in identity service info:pathways/svc/getDatastream
// returns stored bytes unchanged.
//
// Requests are self-contained: every handshake step is routed purely from the
// transported ContextObject (service id plus presence of the aip/version
// referent key), so handling is stateless and concurrently executable.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oais/archive.hpp"
#include "oais/context_object.hpp"
#include "oais/packaging.hpp"

namespace oais::openurl {

enum class VersionKeyMode { Aip, VersionGlobal, VersionScoped };
enum class AutoSelect { Off, Latest };

std::string_view to_string(VersionKeyMode m);
std::optional<VersionKeyMode> version_key_mode_from_string(std::string_view s);

struct ResolverConfig {
    VersionKeyMode mode = VersionKeyMode::Aip;
    // In version-scoped mode, resolve an instant shared by several AIPs to the
    // aip_id maximum instead of failing with AmbiguousVersion.
    bool scoped_tiebreak = false;
    AutoSelect auto_select = AutoSelect::Off;
};

enum class ResolverErrc {
    MissingReferentId,
    UnknownReferent,
    UnknownAip,
    AipCiMismatch,
    UnknownFormat,
    UnknownService,
    UnknownFragment,
    UnknownVersion,
    AmbiguousVersion,
    BadRequest,
};

std::string_view to_string(ResolverErrc c);
int http_status(ResolverErrc c);

class ResolverError : public std::runtime_error {
public:
    ResolverError(ResolverErrc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}
    ResolverErrc code() const { return code_; }

private:
    ResolverErrc code_;
};

struct Dissemination {
    std::string media_type;
    archive::Bytes bytes;
};

struct DisseminationService {
    using Handler = std::function<Dissemination(
        const archive::Aip& aip, const std::vector<std::string>& fragment_ids,
        const std::vector<std::pair<std::string, std::string>>& service_args)>;

    std::string service_uri;  // info:pathways/svc/* style
    Handler handler;
    std::vector<std::string> arg_schema;  // permitted service-argument keys
    // Enumerate one ContextObject per fragment (single-fragment services);
    // otherwise one ContextObject carrying all applicable fragments in args.
    bool per_fragment = true;
};

enum class ServiceKind { DipFormat, Dissemination };

// Context-sensitivity hook: may filter the candidate service list using any
// entity of the request. Default passes everything through.
using ServicePolicy = std::function<std::vector<std::string>(
    const ContextObject& request, ServiceKind kind, std::vector<std::string> candidates)>;

struct HttpReply {
    int status = 200;
    std::string content_type;
    std::string body;
};

class Resolver {
public:
    Resolver(const archive::Archive& archive, const packaging::FormatRegistry& formats,
             ResolverConfig config);

    // Ships with the identity service registered; further services may be
    // added before the resolver starts answering requests.
    void register_dissemination_service(DisseminationService service);
    void set_policy(ServicePolicy policy);

    const ResolverConfig& config() const { return config_; }

    // Handshake steps (throw ResolverError). Containers are ordered oldest
    // AIP first, (created, aip_id) ascending.
    std::vector<ContextObject> bootstrap(const ContextObject& request) const;
    std::vector<ContextObject> aip_selection(const ContextObject& request) const;
    std::vector<ContextObject> dissemination_selection(const ContextObject& request) const;
    packaging::DipDocument dip(const ContextObject& request) const;
    Dissemination disseminate(const ContextObject& request) const;

    // Interprets a version key by the configured scheme: VersionGlobal treats
    // it as a full AIP identifier, VersionScoped as a created instant scoped
    // to the Content Information Identifier.
    archive::Aip resolve_version_key(const archive::CiId& ci, const std::string& version_value) const;

    // Full KEV entry point: routes the query to the right step and maps
    // errors onto HTTP statuses.
    HttpReply handle_query(std::string_view raw_query) const;

    // The referent key pair this resolver emits for an AIP ("aip" or
    // "version" depending on mode).
    std::pair<std::string, std::string> referent_key(const archive::Aip& aip) const;

private:
    struct ReferentView {
        std::string ci;
        std::optional<std::string> key_value;  // aip or version key, per mode
        std::vector<std::string> args;
    };

    ReferentView read_referent(const ContextObject& request) const;
    archive::Aip resolve_aip(const ReferentView& ref) const;
    ContextObject stage_co(const ContextObject& request, const archive::Aip& aip,
                           const std::optional<std::string>& args_value,
                           const std::optional<std::string>& service_uri) const;
    std::vector<ContextObject> formats_container(const ContextObject& request,
                                                 const archive::Aip& aip) const;
    std::vector<ContextObject> services_container(const ContextObject& request,
                                                  const archive::Aip& aip) const;

    const archive::Archive& archive_;
    const packaging::FormatRegistry& formats_;
    ResolverConfig config_;
    std::vector<DisseminationService> services_;
    ServicePolicy policy_;
};

// The identity service handler (exposed for direct registration in tests).
DisseminationService make_identity_service();

}  // namespace oais::openurl
