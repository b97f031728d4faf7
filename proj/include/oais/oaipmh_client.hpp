// Consumer side of the OAI-PMH interface: format discovery, GetRecord and
// paged ListRecords against a remote data provider.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oais/http_fetch.hpp"
#include "oais/xml.hpp"

namespace oais::client {

struct FormatInfo {
    std::string metadata_prefix;
    std::string schema_url;
    std::string format_uri;  // advertised as metadataNamespace
};

struct RawRecord {
    std::string identifier;
    std::int64_t datestamp = 0;
    std::vector<std::string> set_specs;
    xml::Element metadata;  // the embedded DIP root element
};

struct ListPage {
    std::vector<RawRecord> records;
    std::optional<std::string> resumption_token;  // present and non-empty when more pages remain
};

class OaiPmhClient {
public:
    explicit OaiPmhClient(std::string base_url, FetchOptions opts = {});

    std::vector<FormatInfo> list_metadata_formats();
    RawRecord get_record(const std::string& identifier, const std::string& metadata_prefix);

    // One page. params carries metadataPrefix/from/until/set, or a sole
    // resumptionToken. OAI error responses surface as ClientError(Protocol)
    // with the protocol code preserved.
    ListPage list_records(const std::vector<std::pair<std::string, std::string>>& params);

    const std::string& base_url() const { return base_url_; }

private:
    xml::Element request_verb(const std::string& verb,
                              const std::vector<std::pair<std::string, std::string>>& params);
    static RawRecord parse_record(const xml::Element& record);

    std::string base_url_;
    FetchOptions opts_;
};

}  // namespace oais::client
