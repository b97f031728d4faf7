// OAI-PMH 2.0 data-provider interface: the six verbs over the archive.
// Content Information Identifiers act as OAI-PMH identifiers, AIP creation
// instants as datestamps, and registered DIP formats as metadata formats. A
// selective-harvest window yields at most one record per identifier, derived
// from the (created, aip_id)-maximal AIP inside the window.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oais/archive.hpp"
#include "oais/oai_token.hpp"
#include "oais/packaging.hpp"
#include "oais/xml.hpp"

namespace oais::oaipmh {

inline constexpr std::string_view kNamespace = "http://www.openarchives.org/OAI/2.0/";
inline constexpr std::string_view kContentType = "text/xml; charset=UTF-8";

struct OaiConfig {
    std::string repository_name = "oais-gateway";
    std::string base_url = "http://localhost:8080/oaipmh";
    std::string admin_email = "admin@localhost";
    std::size_t page_size = 100;
    std::int64_t token_ttl_seconds = 86400;
    std::string token_secret = "oais-gateway-dev-secret";
    std::vector<std::pair<std::string, std::string>> sets;  // (spec, name)

    bool sets_enabled() const { return !sets.empty(); }
};

// Harvest-window selection: AIPs filtered by set membership and
// from <= created <= until, grouped by ci_id keeping the (created, aip_id)
// maximum, ordered by (created, ci_id). Exposed so tests can pit it against
// an independent oracle.
std::vector<archive::AipInfo> select_window(const archive::Archive& archive,
                                            std::optional<std::int64_t> from,
                                            std::optional<std::int64_t> until,
                                            const std::string& set);

class OaiService {
public:
    OaiService(const archive::Archive& archive, const packaging::FormatRegistry& formats,
               OaiConfig config);

    // Raw query (or form-encoded POST body) in, complete response envelope
    // out. Never throws for protocol-level problems; those become <error>
    // elements per OAI-PMH.
    std::string handle_query(std::string_view raw_query, std::int64_t now) const;

    const OaiConfig& config() const { return config_; }

private:
    struct ProtocolError {
        std::string code;
        std::string message;
    };

    struct Arguments {
        std::vector<std::pair<std::string, std::string>> pairs;
        const std::string* find(std::string_view key) const;
    };

    struct WindowQuery {
        const packaging::DipFormatDescriptor* desc = nullptr;
        std::optional<std::int64_t> from;
        std::optional<std::int64_t> until;
        std::string set;
        std::size_t cursor = 0;
        std::size_t total_hint = 0;  // from a resumed token
        bool resumed = false;
    };

    xml::Element dispatch(const std::string& verb, const Arguments& args, std::int64_t now) const;
    xml::Element do_identify(const Arguments& args) const;
    xml::Element do_list_metadata_formats(const Arguments& args) const;
    xml::Element do_list_sets(const Arguments& args) const;
    xml::Element do_get_record(const Arguments& args) const;
    xml::Element do_list(const std::string& verb, const Arguments& args, std::int64_t now,
                         bool with_metadata) const;

    WindowQuery parse_window_query(const std::string& verb, const Arguments& args,
                                   std::int64_t now) const;
    void require_only(const Arguments& args, std::initializer_list<std::string_view> allowed) const;
    xml::Element record_header(const archive::Aip& aip) const;
    xml::Element record_element(const archive::Aip& aip,
                                const packaging::DipFormatDescriptor& desc) const;

    const archive::Archive& archive_;
    const packaging::FormatRegistry& formats_;
    OaiConfig config_;
};

}  // namespace oais::oaipmh
