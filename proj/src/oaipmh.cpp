#include "oais/oaipmh.hpp"

#include <algorithm>
#include <map>

#include "oais/text.hpp"
#include "oais/time.hpp"

namespace oais::oaipmh {

namespace {

const std::vector<std::string_view> kVerbs = {"Identify",  "ListMetadataFormats", "ListSets",
                                              "GetRecord", "ListRecords",         "ListIdentifiers"};

bool set_member(const archive::AipInfo& info, const std::string& set) {
    return std::find(info.sets.begin(), info.sets.end(), set) != info.sets.end();
}

}  // namespace

std::vector<archive::AipInfo> select_window(const archive::Archive& archive,
                                            std::optional<std::int64_t> from,
                                            std::optional<std::int64_t> until, const std::string& set) {
    std::map<std::string, archive::AipInfo> best;  // ci -> maximal in-window AIP
    for (auto& info : archive.list_infos()) {
        if (!set.empty() && !set_member(info, set)) continue;
        if (from && info.created < *from) continue;
        if (until && info.created > *until) continue;
        auto [it, inserted] = best.try_emplace(info.ci_id.value, info);
        if (!inserted) {
            const auto& cur = it->second;
            if (info.created > cur.created ||
                (info.created == cur.created && info.aip_id.value > cur.aip_id.value))
                it->second = info;
        }
    }
    std::vector<archive::AipInfo> rows;
    rows.reserve(best.size());
    for (auto& [ci, info] : best) rows.push_back(std::move(info));
    std::sort(rows.begin(), rows.end(), [](const archive::AipInfo& a, const archive::AipInfo& b) {
        if (a.created != b.created) return a.created < b.created;
        return a.ci_id.value < b.ci_id.value;
    });
    return rows;
}

const std::string* OaiService::Arguments::find(std::string_view key) const {
    for (const auto& [k, v] : pairs)
        if (k == key) return &v;
    return nullptr;
}

OaiService::OaiService(const archive::Archive& archive, const packaging::FormatRegistry& formats,
                       OaiConfig config)
    : archive_(archive), formats_(formats), config_(std::move(config)) {}

void OaiService::require_only(const Arguments& args,
                              std::initializer_list<std::string_view> allowed) const {
    for (const auto& [k, v] : args.pairs) {
        if (k == "verb") continue;
        bool ok = false;
        for (const auto a : allowed)
            if (k == a) ok = true;
        if (!ok) throw ProtocolError{"badArgument", "argument '" + k + "' is not allowed here"};
    }
}

xml::Element OaiService::record_header(const archive::Aip& aip) const {
    xml::Element header("header");
    header.child(xml::Element("identifier").text(aip.ci_id.value));
    header.child(xml::Element("datestamp").text(time::format_utc(aip.created)));
    for (const auto& s : aip.sets) header.child(xml::Element("setSpec").text(s));
    return header;
}

xml::Element OaiService::record_element(const archive::Aip& aip,
                                        const packaging::DipFormatDescriptor& desc) const {
    xml::Element record("record");
    record.child(record_header(aip));
    xml::Element metadata("metadata");
    metadata.child(formats_.derive_element(aip, desc));
    record.child(std::move(metadata));
    return record;
}

xml::Element OaiService::do_identify(const Arguments& args) const {
    require_only(args, {});
    xml::Element out("Identify");
    out.child(xml::Element("repositoryName").text(config_.repository_name));
    out.child(xml::Element("baseURL").text(config_.base_url));
    out.child(xml::Element("protocolVersion").text("2.0"));
    out.child(xml::Element("adminEmail").text(config_.admin_email));
    const auto earliest = archive_.earliest_created();
    out.child(xml::Element("earliestDatestamp").text(time::format_utc(earliest.value_or(0))));
    out.child(xml::Element("deletedRecord").text("no"));
    out.child(xml::Element("granularity").text("YYYY-MM-DDThh:mm:ssZ"));
    return out;
}

xml::Element OaiService::do_list_metadata_formats(const Arguments& args) const {
    require_only(args, {"identifier"});
    if (const auto* id = args.find("identifier")) {
        if (!text::is_absolute_uri(*id))
            throw ProtocolError{"badArgument", "identifier is not an absolute URI"};
        if (archive_.aips_for_ci(archive::CiId{*id}).empty())
            throw ProtocolError{"idDoesNotExist", "'" + *id + "'"};
    }
    if (formats_.formats().empty())
        throw ProtocolError{"noMetadataFormats", "no DIP formats are registered"};
    xml::Element out("ListMetadataFormats");
    for (const auto& f : formats_.formats()) {
        xml::Element el("metadataFormat");
        el.child(xml::Element("metadataPrefix").text(f.metadata_prefix));
        el.child(xml::Element("schema").text(f.schema_url));
        el.child(xml::Element("metadataNamespace").text(f.format_uri));
        out.child(std::move(el));
    }
    return out;
}

xml::Element OaiService::do_list_sets(const Arguments& args) const {
    require_only(args, {"resumptionToken"});
    if (args.find("resumptionToken"))
        throw ProtocolError{"badResumptionToken", "this repository never issues ListSets tokens"};
    if (!config_.sets_enabled())
        throw ProtocolError{"noSetHierarchy", "this repository does not support sets"};
    xml::Element out("ListSets");
    for (const auto& [spec, name] : config_.sets) {
        xml::Element el("set");
        el.child(xml::Element("setSpec").text(spec));
        el.child(xml::Element("setName").text(name));
        out.child(std::move(el));
    }
    return out;
}

xml::Element OaiService::do_get_record(const Arguments& args) const {
    require_only(args, {"identifier", "metadataPrefix"});
    const auto* id = args.find("identifier");
    const auto* prefix = args.find("metadataPrefix");
    if (!id || !prefix)
        throw ProtocolError{"badArgument", "GetRecord requires identifier and metadataPrefix"};
    if (!text::is_absolute_uri(*id))
        throw ProtocolError{"badArgument", "identifier is not an absolute URI"};
    const auto* desc = formats_.find(*prefix);
    if (!desc) throw ProtocolError{"cannotDisseminateFormat", "'" + *prefix + "'"};
    try {
        const auto aip = archive_.latest_for_ci(archive::CiId{*id});
        xml::Element out("GetRecord");
        out.child(record_element(aip, *desc));
        return out;
    } catch (const archive::ArchiveError& e) {
        if (e.code() == archive::ArchiveErrc::NoSuchContent)
            throw ProtocolError{"idDoesNotExist", "'" + *id + "'"};
        throw;
    }
}

OaiService::WindowQuery OaiService::parse_window_query(const std::string& verb, const Arguments& args,
                                                       std::int64_t now) const {
    WindowQuery q;
    const auto* token_arg = args.find("resumptionToken");
    if (token_arg) {
        auto tp = decode_token(*token_arg, config_.token_secret);
        if (!tp) throw ProtocolError{"badResumptionToken", "malformed or tampered token"};
        if (now - tp->issued > config_.token_ttl_seconds)
            throw ProtocolError{"badResumptionToken", "token has expired"};
        if (tp->verb != verb)
            throw ProtocolError{"badResumptionToken", "token was issued for " + tp->verb};
        q.desc = formats_.find(tp->format_uri);
        if (!q.desc)
            throw ProtocolError{"badResumptionToken", "token names an unregistered format"};
        // A token is bound to the exact query it was issued for; any argument
        // repeated alongside it must agree with the fingerprint.
        if (const auto* p = args.find("metadataPrefix")) {
            const auto* d = formats_.find(*p);
            if (!d || d->format_uri != tp->format_uri)
                throw ProtocolError{"badResumptionToken", "token does not match metadataPrefix"};
        }
        if (const auto* f = args.find("from")) {
            const auto v = time::parse_datestamp(*f, false);
            if (!v || v != tp->from)
                throw ProtocolError{"badResumptionToken", "token does not match 'from'"};
        }
        if (const auto* u = args.find("until")) {
            const auto v = time::parse_datestamp(*u, true);
            if (!v || v != tp->until)
                throw ProtocolError{"badResumptionToken", "token does not match 'until'"};
        }
        if (const auto* s = args.find("set")) {
            if (*s != tp->set) throw ProtocolError{"badResumptionToken", "token does not match 'set'"};
        }
        q.from = tp->from;
        q.until = tp->until;
        q.set = tp->set;
        q.cursor = tp->cursor;
        q.total_hint = tp->total;
        q.resumed = true;
        return q;
    }

    const auto* prefix = args.find("metadataPrefix");
    if (!prefix)
        throw ProtocolError{"badArgument", verb + " requires metadataPrefix or resumptionToken"};
    q.desc = formats_.find(*prefix);
    if (!q.desc) throw ProtocolError{"cannotDisseminateFormat", "'" + *prefix + "'"};

    const auto* from = args.find("from");
    const auto* until = args.find("until");
    if (from) {
        const auto v = time::parse_datestamp(*from, false);
        if (!v) throw ProtocolError{"badArgument", "cannot parse 'from' datestamp"};
        q.from = *v;
    }
    if (until) {
        const auto v = time::parse_datestamp(*until, true);
        if (!v) throw ProtocolError{"badArgument", "cannot parse 'until' datestamp"};
        q.until = *v;
    }
    if (from && until && time::is_day_granularity(*from) != time::is_day_granularity(*until))
        throw ProtocolError{"badArgument", "'from' and 'until' use different granularities"};
    if (q.from && q.until && *q.from > *q.until)
        throw ProtocolError{"badArgument", "'from' is after 'until'"};
    if (const auto* set = args.find("set")) {
        if (!config_.sets_enabled())
            throw ProtocolError{"noSetHierarchy", "this repository does not support sets"};
        if (!text::is_set_spec(*set)) throw ProtocolError{"badArgument", "malformed set spec"};
        q.set = *set;
    }
    return q;
}

xml::Element OaiService::do_list(const std::string& verb, const Arguments& args, std::int64_t now,
                                 bool with_metadata) const {
    require_only(args, {"metadataPrefix", "from", "until", "set", "resumptionToken"});
    const WindowQuery q = parse_window_query(verb, args, now);
    const auto rows = select_window(archive_, q.from, q.until, q.set);
    if (rows.empty() || q.cursor >= rows.size())
        throw ProtocolError{"noRecordsMatch", "no records in the requested window"};

    const std::size_t total = q.resumed ? q.total_hint : rows.size();
    const std::size_t end = std::min(rows.size(), q.cursor + config_.page_size);

    xml::Element out(verb);
    for (std::size_t i = q.cursor; i < end; ++i) {
        const auto aip = archive_.get_aip(rows[i].aip_id);
        out.child(with_metadata ? record_element(aip, *q.desc) : record_header(aip));
    }

    const bool more = end < rows.size();
    if (more || q.resumed) {
        xml::Element token("resumptionToken");
        token.attr("completeListSize", std::to_string(total));
        token.attr("cursor", std::to_string(q.cursor));
        if (more) {
            TokenPayload next;
            next.verb = verb;
            next.format_uri = q.desc->format_uri;
            next.from = q.from;
            next.until = q.until;
            next.set = q.set;
            next.cursor = end;
            next.total = total;
            next.issued = now;
            token.text(encode_token(next, config_.token_secret));
        }
        out.child(std::move(token));
    }
    return out;
}

xml::Element OaiService::dispatch(const std::string& verb, const Arguments& args,
                                  std::int64_t now) const {
    if (verb == "Identify") return do_identify(args);
    if (verb == "ListMetadataFormats") return do_list_metadata_formats(args);
    if (verb == "ListSets") return do_list_sets(args);
    if (verb == "GetRecord") return do_get_record(args);
    if (verb == "ListRecords") return do_list(verb, args, now, true);
    if (verb == "ListIdentifiers") return do_list(verb, args, now, false);
    throw ProtocolError{"badVerb", "unknown verb '" + verb + "'"};
}

std::string OaiService::handle_query(std::string_view raw_query, std::int64_t now) const {
    Arguments args;
    std::optional<ProtocolError> error;

    if (!raw_query.empty() && raw_query.front() == '?') raw_query.remove_prefix(1);
    for (const auto& part : text::split(raw_query, '&')) {
        if (part.empty()) continue;
        const auto eq = part.find('=');
        const auto key = text::percent_decode(
            eq == std::string::npos ? std::string_view(part) : std::string_view(part).substr(0, eq));
        const auto value = eq == std::string::npos
                               ? std::optional<std::string>("")
                               : text::percent_decode(std::string_view(part).substr(eq + 1));
        if (!key || !value) {
            error = ProtocolError{"badArgument", "undecodable percent-encoding in request"};
            break;
        }
        if (args.find(*key)) {
            error = ProtocolError{*key == "verb" ? "badVerb" : "badArgument",
                                  "argument '" + *key + "' is repeated"};
            break;
        }
        args.pairs.emplace_back(*key, *value);
    }

    std::string verb;
    if (!error) {
        const auto* v = args.find("verb");
        if (!v)
            error = ProtocolError{"badVerb", "the 'verb' argument is missing"};
        else if (std::find(kVerbs.begin(), kVerbs.end(), *v) == kVerbs.end())
            error = ProtocolError{"badVerb", "unknown verb '" + *v + "'"};
        else
            verb = *v;
    }

    xml::Element payload;
    if (!error) {
        try {
            payload = dispatch(verb, args, now);
        } catch (const ProtocolError& e) {
            error = e;
        }
    }

    xml::Element root("OAI-PMH");
    root.attr("xmlns", std::string(kNamespace))
        .attr("xmlns:xsi", "http://www.w3.org/2001/XMLSchema-instance")
        .attr("xsi:schemaLocation",
              "http://www.openarchives.org/OAI/2.0/ http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd");
    root.child(xml::Element("responseDate").text(time::format_utc(now)));

    xml::Element request("request");
    // badVerb / badArgument responses must not echo the arguments
    const bool suppress_echo = error && (error->code == "badVerb" || error->code == "badArgument");
    if (!suppress_echo)
        for (const auto& [k, v] : args.pairs) request.attr(k, v);
    request.text(config_.base_url);
    root.child(std::move(request));

    if (error) {
        xml::Element el("error");
        el.attr("code", error->code);
        el.text(error->message);
        root.child(std::move(el));
    } else {
        root.child(std::move(payload));
    }
    return xml::write_document(root);
}

}  // namespace oais::oaipmh
