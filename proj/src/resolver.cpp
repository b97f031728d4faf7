#include "oais/resolver.hpp"

#include <algorithm>

#include "oais/kev.hpp"
#include "oais/openurl_container.hpp"
#include "oais/text.hpp"
#include "oais/time.hpp"

namespace oais::openurl {

std::string_view to_string(VersionKeyMode m) {
    switch (m) {
        case VersionKeyMode::Aip: return "aip";
        case VersionKeyMode::VersionGlobal: return "version-global";
        case VersionKeyMode::VersionScoped: return "version-scoped";
    }
    return "aip";
}

std::optional<VersionKeyMode> version_key_mode_from_string(std::string_view s) {
    if (s == "aip") return VersionKeyMode::Aip;
    if (s == "version-global") return VersionKeyMode::VersionGlobal;
    if (s == "version-scoped") return VersionKeyMode::VersionScoped;
    return std::nullopt;
}

std::string_view to_string(ResolverErrc c) {
    switch (c) {
        case ResolverErrc::MissingReferentId: return "MissingReferentId";
        case ResolverErrc::UnknownReferent: return "UnknownReferent";
        case ResolverErrc::UnknownAip: return "UnknownAip";
        case ResolverErrc::AipCiMismatch: return "AipCiMismatch";
        case ResolverErrc::UnknownFormat: return "UnknownFormat";
        case ResolverErrc::UnknownService: return "UnknownService";
        case ResolverErrc::UnknownFragment: return "UnknownFragment";
        case ResolverErrc::UnknownVersion: return "UnknownVersion";
        case ResolverErrc::AmbiguousVersion: return "AmbiguousVersion";
        case ResolverErrc::BadRequest: return "BadRequest";
    }
    return "ResolverError";
}

int http_status(ResolverErrc c) {
    switch (c) {
        case ResolverErrc::MissingReferentId:
        case ResolverErrc::AipCiMismatch:
        case ResolverErrc::BadRequest: return 400;
        case ResolverErrc::UnknownReferent:
        case ResolverErrc::UnknownAip:
        case ResolverErrc::UnknownFragment:
        case ResolverErrc::UnknownVersion:
        case ResolverErrc::AmbiguousVersion: return 404;
        case ResolverErrc::UnknownFormat:
        case ResolverErrc::UnknownService: return 501;
    }
    return 500;
}

DisseminationService make_identity_service() {
    DisseminationService svc;
    svc.service_uri = std::string(kSvcGetDatastream);
    svc.per_fragment = true;
    svc.handler = [](const archive::Aip& aip, const std::vector<std::string>& fragments,
                     const std::vector<std::pair<std::string, std::string>>&) -> Dissemination {
        if (fragments.size() != 1)
            throw ResolverError(ResolverErrc::BadRequest,
                                "the identity service takes exactly one fragment");
        const auto* ds = aip.find_datastream(fragments.front());
        if (!ds)
            throw ResolverError(ResolverErrc::UnknownFragment,
                                "'" + fragments.front() + "' in " + aip.aip_id.value);
        return Dissemination{ds->media_type, ds->content};
    };
    return svc;
}

Resolver::Resolver(const archive::Archive& archive, const packaging::FormatRegistry& formats,
                   ResolverConfig config)
    : archive_(archive), formats_(formats), config_(config) {
    register_dissemination_service(make_identity_service());
}

void Resolver::register_dissemination_service(DisseminationService service) {
    if (service.service_uri.rfind("info:pathways/svc", 0) != 0)
        throw ResolverError(ResolverErrc::BadRequest,
                            "dissemination service URIs use the info:pathways/svc prefix");
    if (service.service_uri == kSvcDipBootstrap || service.service_uri == kSvcDisseminationBootstrap)
        throw ResolverError(ResolverErrc::BadRequest, "bootstrap service URIs are reserved");
    for (const auto& s : services_)
        if (s.service_uri == service.service_uri)
            throw ResolverError(ResolverErrc::BadRequest,
                                "service '" + service.service_uri + "' already registered");
    services_.push_back(std::move(service));
}

void Resolver::set_policy(ServicePolicy policy) { policy_ = std::move(policy); }

std::pair<std::string, std::string> Resolver::referent_key(const archive::Aip& aip) const {
    switch (config_.mode) {
        case VersionKeyMode::Aip: return {"aip", aip.aip_id.value};
        case VersionKeyMode::VersionGlobal: return {"version", aip.aip_id.value};
        case VersionKeyMode::VersionScoped: return {"version", time::format_utc(aip.created)};
    }
    return {"aip", aip.aip_id.value};
}

Resolver::ReferentView Resolver::read_referent(const ContextObject& request) const {
    ReferentView out;
    const auto id = request.referent.identifier();
    if (!id || id->empty())
        throw ResolverError(ResolverErrc::MissingReferentId,
                            "the referent carries no Identifier descriptor");
    out.ci = *id;
    const auto* md = request.referent.by_value(kPathwaysFormat);
    if (md) {
        const auto key_name = config_.mode == VersionKeyMode::Aip ? "aip" : "version";
        if (auto v = md->kev_value(key_name)) out.key_value = *v;
        if (auto a = md->kev_value("args")) {
            for (auto& frag : text::split(*a, ','))
                if (!frag.empty()) out.args.push_back(std::move(frag));
        }
    }
    return out;
}

archive::Aip Resolver::resolve_aip(const ReferentView& ref) const {
    archive::Aip aip;
    if (config_.mode == VersionKeyMode::Aip) {
        try {
            aip = archive_.get_aip(archive::AipId{*ref.key_value});
        } catch (const archive::ArchiveError&) {
            throw ResolverError(ResolverErrc::UnknownAip, "'" + *ref.key_value + "'");
        }
        if (aip.ci_id.value != ref.ci)
            throw ResolverError(ResolverErrc::AipCiMismatch,
                                "AIP " + aip.aip_id.value + " packages '" + aip.ci_id.value + "'");
        return aip;
    }
    return resolve_version_key(archive::CiId{ref.ci}, *ref.key_value);
}

archive::Aip Resolver::resolve_version_key(const archive::CiId& ci,
                                           const std::string& version_value) const {
    switch (config_.mode) {
        case VersionKeyMode::Aip:
            throw ResolverError(ResolverErrc::BadRequest, "resolver is not in version-key mode");
        case VersionKeyMode::VersionGlobal: {
            archive::Aip aip;
            try {
                aip = archive_.get_aip(archive::AipId{version_value});
            } catch (const archive::ArchiveError&) {
                throw ResolverError(ResolverErrc::UnknownVersion, "'" + version_value + "'");
            }
            if (aip.ci_id != ci)
                throw ResolverError(ResolverErrc::AipCiMismatch,
                                    "version '" + version_value + "' packages '" + aip.ci_id.value + "'");
            return aip;
        }
        case VersionKeyMode::VersionScoped: {
            const auto instant = time::parse_utc(version_value);
            if (!instant)
                throw ResolverError(ResolverErrc::UnknownVersion,
                                    "'" + version_value + "' is not a creation instant");
            std::vector<archive::Aip> matches;
            for (auto& aip : archive_.aips_for_ci(ci))
                if (aip.created == *instant) matches.push_back(std::move(aip));
            if (matches.empty())
                throw ResolverError(ResolverErrc::UnknownVersion,
                                    "no AIP of '" + ci.value + "' created at " + version_value);
            if (matches.size() > 1 && !config_.scoped_tiebreak)
                throw ResolverError(ResolverErrc::AmbiguousVersion,
                                    std::to_string(matches.size()) + " AIPs of '" + ci.value +
                                        "' share " + version_value);
            return matches.back();  // aips_for_ci orders by (created, aip_id); back() is the tiebreak max
        }
    }
    throw ResolverError(ResolverErrc::BadRequest, "unreachable");
}

ContextObject Resolver::stage_co(const ContextObject& request, const archive::Aip& aip,
                                 const std::optional<std::string>& args_value,
                                 const std::optional<std::string>& service_uri) const {
    ContextObject out;
    std::vector<std::pair<std::string, std::string>> kev;
    kev.push_back(referent_key(aip));
    if (args_value) kev.emplace_back("args", *args_value);
    const auto ci = request.referent.identifier();
    out.referent.descriptors.push_back(Descriptor::identifier(ci ? *ci : aip.ci_id.value));
    out.referent.descriptors.push_back(Descriptor::by_value(std::string(kPathwaysFormat), std::move(kev)));
    if (service_uri)
        out.service_type.descriptors.push_back(Descriptor::identifier(*service_uri));
    else
        out.service_type = request.service_type;
    // remaining entities travel through the whole handshake unchanged
    out.requester = request.requester;
    out.referrer = request.referrer;
    out.referring_entity = request.referring_entity;
    out.resolver = request.resolver;
    return out;
}

std::vector<ContextObject> Resolver::formats_container(const ContextObject& request,
                                                       const archive::Aip& aip) const {
    std::vector<std::string> candidates;
    for (const auto& f : formats_.formats()) candidates.push_back(f.format_uri);
    if (policy_) candidates = policy_(request, ServiceKind::DipFormat, std::move(candidates));
    std::vector<ContextObject> out;
    for (const auto& uri : candidates) out.push_back(stage_co(request, aip, std::nullopt, uri));
    return out;
}

std::vector<ContextObject> Resolver::services_container(const ContextObject& request,
                                                        const archive::Aip& aip) const {
    std::vector<std::string> candidates;
    for (const auto& s : services_) candidates.push_back(s.service_uri);
    if (policy_) candidates = policy_(request, ServiceKind::Dissemination, std::move(candidates));
    std::vector<ContextObject> out;
    for (const auto& uri : candidates) {
        const auto it = std::find_if(services_.begin(), services_.end(),
                                     [&](const DisseminationService& s) { return s.service_uri == uri; });
        if (it == services_.end()) continue;
        if (it->per_fragment) {
            for (const auto& ds : aip.datastreams)
                out.push_back(stage_co(request, aip, ds.fragment_id, uri));
        } else {
            std::string all;
            for (const auto& ds : aip.datastreams) {
                if (!all.empty()) all += ',';
                all += ds.fragment_id;
            }
            out.push_back(stage_co(request, aip, all, uri));
        }
    }
    return out;
}

std::vector<ContextObject> Resolver::bootstrap(const ContextObject& request) const {
    const auto ref = read_referent(request);
    const auto aips = archive_.aips_for_ci(archive::CiId{ref.ci});
    if (aips.empty())
        throw ResolverError(ResolverErrc::UnknownReferent, "'" + ref.ci + "'");
    const auto svc = request.service_type.identifier();
    if (config_.auto_select == AutoSelect::Latest) {
        // disambiguation bypass: jump straight to the second container for
        // the most recent AIP
        const auto& latest = aips.back();
        return svc == kSvcDisseminationBootstrap ? services_container(request, latest)
                                                 : formats_container(request, latest);
    }
    std::vector<ContextObject> out;
    out.reserve(aips.size());
    for (const auto& aip : aips) out.push_back(stage_co(request, aip, std::nullopt, std::nullopt));
    return out;
}

std::vector<ContextObject> Resolver::aip_selection(const ContextObject& request) const {
    const auto ref = read_referent(request);
    if (!ref.key_value)
        throw ResolverError(ResolverErrc::BadRequest, "referent carries no aip/version key");
    return formats_container(request, resolve_aip(ref));
}

std::vector<ContextObject> Resolver::dissemination_selection(const ContextObject& request) const {
    const auto ref = read_referent(request);
    if (!ref.key_value)
        throw ResolverError(ResolverErrc::BadRequest, "referent carries no aip/version key");
    return services_container(request, resolve_aip(ref));
}

packaging::DipDocument Resolver::dip(const ContextObject& request) const {
    const auto ref = read_referent(request);
    if (!ref.key_value)
        throw ResolverError(ResolverErrc::BadRequest, "referent carries no aip/version key");
    const auto svc = request.service_type.identifier();
    const auto* desc = svc ? formats_.find(*svc) : nullptr;
    if (!desc)
        throw ResolverError(ResolverErrc::UnknownFormat, svc ? "'" + *svc + "'" : "no service type");
    return packaging::derive_dip(resolve_aip(ref), desc->format_uri, formats_);
}

Dissemination Resolver::disseminate(const ContextObject& request) const {
    const auto ref = read_referent(request);
    if (!ref.key_value)
        throw ResolverError(ResolverErrc::BadRequest, "referent carries no aip/version key");
    const auto svc = request.service_type.identifier();
    const auto it = std::find_if(services_.begin(), services_.end(), [&](const DisseminationService& s) {
        return svc && s.service_uri == *svc;
    });
    if (it == services_.end())
        throw ResolverError(ResolverErrc::UnknownService, svc ? "'" + *svc + "'" : "no service type");
    const auto aip = resolve_aip(ref);
    if (ref.args.empty())
        throw ResolverError(ResolverErrc::UnknownFragment, "the args key names no fragment");
    for (const auto& frag : ref.args)
        if (!aip.find_datastream(frag))
            throw ResolverError(ResolverErrc::UnknownFragment,
                                "'" + frag + "' in " + aip.aip_id.value);
    std::vector<std::pair<std::string, std::string>> service_args;
    if (const auto* md = request.service_type.by_value("")) {
        for (const auto& [k, v] : md->metadata_kev) {
            if (!it->arg_schema.empty() &&
                std::find(it->arg_schema.begin(), it->arg_schema.end(), k) == it->arg_schema.end())
                throw ResolverError(ResolverErrc::BadRequest,
                                    "service argument '" + k + "' is not accepted");
            service_args.emplace_back(k, v);
        }
    }
    return it->handler(aip, ref.args, service_args);
}

HttpReply Resolver::handle_query(std::string_view raw_query) const {
    try {
        ContextObject co;
        try {
            co = parse_kev(raw_query);
        } catch (const KevError& e) {
            return HttpReply{400, "text/plain", std::string("MalformedKev: ") + e.what() + "\n"};
        }
        const auto ci = co.referent.identifier();
        if (!ci || ci->empty())
            throw ResolverError(ResolverErrc::MissingReferentId,
                                "the referent carries no Identifier descriptor");
        const auto svc = co.service_type.identifier();
        const bool has_key = [&] {
            const auto* md = co.referent.by_value(kPathwaysFormat);
            if (!md) return false;
            return md->kev_value(config_.mode == VersionKeyMode::Aip ? "aip" : "version").has_value();
        }();

        auto container_reply = [](const std::vector<ContextObject>& cos) {
            return HttpReply{200, "application/xml", render_container_document(cos)};
        };

        if (svc == kSvcDipBootstrap)
            return container_reply(has_key ? aip_selection(co) : bootstrap(co));
        if (svc == kSvcDisseminationBootstrap)
            return container_reply(has_key ? dissemination_selection(co) : bootstrap(co));
        if (svc && formats_.find(*svc)) return HttpReply{200, "application/xml", dip(co).xml};
        const bool known_service = svc && std::any_of(services_.begin(), services_.end(),
                                                      [&](const DisseminationService& s) {
                                                          return s.service_uri == *svc;
                                                      });
        if (known_service) {
            auto d = disseminate(co);
            return HttpReply{200, d.media_type, std::move(d.bytes)};
        }
        throw ResolverError(ResolverErrc::UnknownService,
                            svc ? "'" + *svc + "'" : "request carries no service type");
    } catch (const ResolverError& e) {
        return HttpReply{http_status(e.code()), "text/plain", std::string(e.what()) + "\n"};
    }
}

}  // namespace oais::openurl
