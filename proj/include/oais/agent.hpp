// Scripted OpenURL agent: walks the Conformance Level 1 handshake to order a
// DIP and the Level 2 handshake to fetch datastream disseminations.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oais/archive.hpp"
#include "oais/context_object.hpp"
#include "oais/http_fetch.hpp"
#include "oais/packaging.hpp"

namespace oais::client {

// Deterministic selection policy over a disambiguation container. Containers
// are ordered oldest AIP first, so Latest picks the last element. ByKey
// matches the referent's aip/version key value.
struct Chooser {
    enum class Kind { Latest, First, ByKey };
    Kind kind = Kind::Latest;
    std::string key_value;  // ByKey

    static Chooser latest() { return {Kind::Latest, ""}; }
    static Chooser first() { return {Kind::First, ""}; }
    static Chooser by_key(std::string value) { return {Kind::ByKey, std::move(value)}; }
    // "latest" | "first" | "aip:VALUE"
    static std::optional<Chooser> parse(const std::string& text);

    const openurl::ContextObject& choose(const std::vector<openurl::ContextObject>& list) const;
};

using ServiceFilter = std::function<bool(const std::string& service_uri)>;

struct AgentStream {
    std::string fragment_id;
    std::string media_type;
    archive::Bytes bytes;
};

class OpenUrlAgent {
public:
    explicit OpenUrlAgent(std::string base_url, FetchOptions opts = {});

    // Level 1: bootstrap, choose an AIP, pick the first DIP-format service
    // passing the filter, fetch the DIP.
    packaging::DipDocument order_dip(const std::string& ci_id, const Chooser& chooser,
                                     const ServiceFilter& service_filter = {});

    // Level 2: bootstrap, choose an AIP, fetch every dissemination matching
    // the filter. Results are ordered by fragment id.
    std::vector<AgentStream> disseminate(const std::string& ci_id, const Chooser& chooser,
                                         const ServiceFilter& service_filter = {});

    // Raw container step (exposed for flow-walking tests).
    std::vector<openurl::ContextObject> fetch_container(const openurl::ContextObject& request);
    HttpResponse replay(const openurl::ContextObject& request);

private:
    std::vector<openurl::ContextObject> service_stage(const std::string& ci_id,
                                                      std::string_view bootstrap_svc,
                                                      const Chooser& chooser);

    std::string base_url_;
    FetchOptions opts_;
};

}  // namespace oais::client
