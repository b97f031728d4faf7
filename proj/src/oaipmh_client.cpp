#include "oais/oaipmh_client.hpp"

#include "oais/text.hpp"
#include "oais/time.hpp"

namespace oais::client {

OaiPmhClient::OaiPmhClient(std::string base_url, FetchOptions opts)
    : base_url_(std::move(base_url)), opts_(opts) {}

xml::Element OaiPmhClient::request_verb(
    const std::string& verb, const std::vector<std::pair<std::string, std::string>>& params) {
    std::string query = "verb=" + text::percent_encode(verb);
    for (const auto& [k, v] : params) query += "&" + k + "=" + text::percent_encode(v);

    const auto res = http_get(base_url_, query, opts_);
    if (res.status != 200)
        throw ClientError(ClientErrc::Protocol, "unexpected HTTP status " + std::to_string(res.status),
                          "http_" + std::to_string(res.status));
    xml::Element root;
    try {
        root = xml::parse(res.body);
    } catch (const xml::ParseError& e) {
        throw ClientError(ClientErrc::Protocol, std::string("response is not XML: ") + e.what(),
                          "malformed");
    }
    if (xml::local_name(root.name) != "OAI-PMH")
        throw ClientError(ClientErrc::Protocol, "response is not an OAI-PMH envelope", "malformed");
    if (const auto* error = root.first_child("error")) {
        const auto* code = error->find_attr("code");
        throw ClientError(ClientErrc::Protocol, error->text_content(), code ? *code : "unknown");
    }
    if (const auto* payload = root.first_child(verb)) return *payload;
    throw ClientError(ClientErrc::Protocol, "envelope lacks a " + verb + " element", "malformed");
}

std::vector<FormatInfo> OaiPmhClient::list_metadata_formats() {
    const auto payload = request_verb("ListMetadataFormats", {});
    std::vector<FormatInfo> out;
    for (const auto* f : payload.children_named("metadataFormat")) {
        FormatInfo info;
        if (const auto* p = f->first_child("metadataPrefix")) info.metadata_prefix = p->text_content();
        if (const auto* s = f->first_child("schema")) info.schema_url = s->text_content();
        if (const auto* n = f->first_child("metadataNamespace")) info.format_uri = n->text_content();
        if (info.metadata_prefix.empty() || info.format_uri.empty())
            throw ClientError(ClientErrc::Protocol, "metadataFormat entry missing fields", "malformed");
        out.push_back(std::move(info));
    }
    return out;
}

RawRecord OaiPmhClient::parse_record(const xml::Element& record) {
    RawRecord out;
    const auto* header = record.first_child("header");
    if (!header) throw ClientError(ClientErrc::Protocol, "record lacks a header", "malformed");
    if (const auto* id = header->first_child("identifier")) out.identifier = id->text_content();
    if (const auto* ds = header->first_child("datestamp")) {
        const auto t = time::parse_utc(ds->text_content());
        if (!t) throw ClientError(ClientErrc::Protocol, "bad record datestamp", "malformed");
        out.datestamp = *t;
    }
    for (const auto* s : header->children_named("setSpec")) out.set_specs.push_back(s->text_content());
    const auto* metadata = record.first_child("metadata");
    if (!metadata || metadata->element_children().empty())
        throw ClientError(ClientErrc::Protocol, "record lacks metadata", "malformed");
    out.metadata = *metadata->element_children().front();
    return out;
}

RawRecord OaiPmhClient::get_record(const std::string& identifier, const std::string& metadata_prefix) {
    const auto payload =
        request_verb("GetRecord", {{"identifier", identifier}, {"metadataPrefix", metadata_prefix}});
    const auto* record = payload.first_child("record");
    if (!record) throw ClientError(ClientErrc::Protocol, "GetRecord lacks a record", "malformed");
    return parse_record(*record);
}

ListPage OaiPmhClient::list_records(const std::vector<std::pair<std::string, std::string>>& params) {
    const auto payload = request_verb("ListRecords", params);
    ListPage page;
    for (const auto* record : payload.children_named("record")) page.records.push_back(parse_record(*record));
    if (const auto* token = payload.first_child("resumptionToken")) {
        const auto value = token->text_content();
        if (!value.empty()) page.resumption_token = value;
    }
    return page;
}

}  // namespace oais::client
