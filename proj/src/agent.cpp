#include "oais/agent.hpp"

#include <algorithm>

#include "oais/kev.hpp"
#include "oais/openurl_container.hpp"

namespace oais::client {

using openurl::ContextObject;
using openurl::Descriptor;

std::optional<Chooser> Chooser::parse(const std::string& text) {
    if (text == "latest") return latest();
    if (text == "first") return first();
    if (text.rfind("aip:", 0) == 0 && text.size() > 4) return by_key(text.substr(4));
    return std::nullopt;
}

const ContextObject& Chooser::choose(const std::vector<ContextObject>& list) const {
    if (list.empty()) throw ClientError(ClientErrc::EmptyChoice, "container holds no ContextObjects");
    switch (kind) {
        case Kind::First: return list.front();
        case Kind::Latest: return list.back();
        case Kind::ByKey:
            for (const auto& co : list) {
                const auto* md = co.referent.by_value(openurl::kPathwaysFormat);
                if (!md) continue;
                const auto aip = md->kev_value("aip");
                const auto version = md->kev_value("version");
                if ((aip && *aip == key_value) || (version && *version == key_value)) return co;
            }
            throw ClientError(ClientErrc::EmptyChoice, "no ContextObject carries key '" + key_value + "'");
    }
    throw ClientError(ClientErrc::EmptyChoice, "unreachable");
}

OpenUrlAgent::OpenUrlAgent(std::string base_url, FetchOptions opts)
    : base_url_(std::move(base_url)), opts_(opts) {}

HttpResponse OpenUrlAgent::replay(const ContextObject& request) {
    return http_get(base_url_, openurl::serialize_kev(request), opts_);
}

std::vector<ContextObject> OpenUrlAgent::fetch_container(const ContextObject& request) {
    const auto res = replay(request);
    if (res.status != 200)
        throw ClientError(ClientErrc::Protocol,
                          "resolver answered " + std::to_string(res.status) + ": " + res.body,
                          "http_" + std::to_string(res.status));
    try {
        return openurl::parse_container_document(res.body);
    } catch (const openurl::KevError& e) {
        throw ClientError(ClientErrc::Protocol, e.what(), "malformed");
    }
}

namespace {

ContextObject bootstrap_request(const std::string& ci_id, std::string_view svc) {
    ContextObject co;
    co.referent.descriptors.push_back(Descriptor::identifier(ci_id));
    co.service_type.descriptors.push_back(Descriptor::identifier(std::string(svc)));
    return co;
}

bool is_bootstrap_stage(const std::vector<ContextObject>& list) {
    // before the service stage every ContextObject still carries the
    // bootstrap service id
    if (list.empty()) return false;
    const auto svc = list.front().service_type.identifier();
    return svc == openurl::kSvcDipBootstrap || svc == openurl::kSvcDisseminationBootstrap;
}

}  // namespace

std::vector<ContextObject> OpenUrlAgent::service_stage(const std::string& ci_id,
                                                       std::string_view bootstrap_svc,
                                                       const Chooser& chooser) {
    auto list = fetch_container(bootstrap_request(ci_id, bootstrap_svc));
    if (is_bootstrap_stage(list)) {
        // AIP disambiguation round; a resolver configured to auto-select
        // skips it and answers with the service stage directly
        const auto& chosen = chooser.choose(list);
        list = fetch_container(chosen);
    }
    return list;
}

packaging::DipDocument OpenUrlAgent::order_dip(const std::string& ci_id, const Chooser& chooser,
                                               const ServiceFilter& service_filter) {
    auto list = service_stage(ci_id, openurl::kSvcDipBootstrap, chooser);
    const ContextObject* pick = nullptr;
    for (const auto& co : list) {
        const auto svc = co.service_type.identifier();
        if (!svc) continue;
        if (service_filter && !service_filter(*svc)) continue;
        pick = &co;
        break;
    }
    if (!pick) throw ClientError(ClientErrc::EmptyChoice, "no DIP format passed the filter");

    const auto res = replay(*pick);
    if (res.status != 200)
        throw ClientError(ClientErrc::Protocol,
                          "DIP request answered " + std::to_string(res.status) + ": " + res.body,
                          "http_" + std::to_string(res.status));
    packaging::DipDocument dip;
    dip.format_uri = pick->service_type.identifier().value_or("");
    dip.xml = res.body;
    if (const auto id = pick->referent.identifier()) dip.ci_id.value = *id;
    if (const auto* md = pick->referent.by_value(openurl::kPathwaysFormat)) {
        if (const auto aip = md->kev_value("aip")) dip.source_aip.value = *aip;
    }
    return dip;
}

std::vector<AgentStream> OpenUrlAgent::disseminate(const std::string& ci_id, const Chooser& chooser,
                                                   const ServiceFilter& service_filter) {
    auto list = service_stage(ci_id, openurl::kSvcDisseminationBootstrap, chooser);
    std::vector<AgentStream> out;
    for (const auto& co : list) {
        const auto svc = co.service_type.identifier();
        if (!svc) continue;
        if (service_filter && !service_filter(*svc)) continue;
        const auto res = replay(co);
        if (res.status < 200 || res.status >= 300)
            throw ClientError(ClientErrc::Dissemination,
                              "dissemination answered " + std::to_string(res.status) + ": " + res.body);
        AgentStream stream;
        if (const auto* md = co.referent.by_value(openurl::kPathwaysFormat))
            stream.fragment_id = md->kev_value("args").value_or("");
        // strip any media-type parameters the transport added
        stream.media_type = res.content_type.substr(0, res.content_type.find(';'));
        stream.bytes = res.body;
        out.push_back(std::move(stream));
    }
    std::sort(out.begin(), out.end(),
              [](const AgentStream& a, const AgentStream& b) { return a.fragment_id < b.fragment_id; });
    return out;
}

}  // namespace oais::client
