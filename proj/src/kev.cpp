#include "oais/kev.hpp"

#include <array>

#include "oais/text.hpp"

namespace oais::openurl {

Descriptor Descriptor::identifier(std::string uri) {
    Descriptor d;
    d.kind = DescriptorKind::Identifier;
    d.identifier_uri = std::move(uri);
    return d;
}

Descriptor Descriptor::by_value(std::string format_uri,
                                std::vector<std::pair<std::string, std::string>> kev) {
    Descriptor d;
    d.kind = DescriptorKind::ByValueMetadata;
    d.metadata_format_uri = std::move(format_uri);
    d.metadata_kev = std::move(kev);
    return d;
}

Descriptor Descriptor::by_reference(std::string format_uri, std::string location) {
    Descriptor d;
    d.kind = DescriptorKind::ByReferenceMetadata;
    d.metadata_format_uri = std::move(format_uri);
    d.metadata_location = std::move(location);
    return d;
}

Descriptor Descriptor::private_data(std::string payload) {
    Descriptor d;
    d.kind = DescriptorKind::PrivateData;
    d.private_payload = std::move(payload);
    return d;
}

std::optional<std::string> Descriptor::kev_value(std::string_view key) const {
    if (kind != DescriptorKind::ByValueMetadata) return std::nullopt;
    for (const auto& [k, v] : metadata_kev)
        if (k == key) return v;
    return std::nullopt;
}

std::optional<std::string> Entity::identifier() const {
    for (const auto& d : descriptors)
        if (d.kind == DescriptorKind::Identifier) return d.identifier_uri;
    return std::nullopt;
}

const Descriptor* Entity::by_value(std::string_view format_uri) const {
    for (const auto& d : descriptors)
        if (d.kind == DescriptorKind::ByValueMetadata &&
            (format_uri.empty() || d.metadata_format_uri == format_uri))
            return &d;
    return nullptr;
}

namespace {

constexpr std::string_view kUrlVer = "Z39.88-2004";
constexpr std::string_view kCtxFmt = "info:ofi/fmt:kev:mtx:ctx";

struct EntitySlot {
    std::string_view prefix;
    Entity ContextObject::* member;
};

// Serialization order: referent first, then the service and context entities.
constexpr std::array<EntitySlot, 6> kSlots = {{
    {"rft", &ContextObject::referent},
    {"svc", &ContextObject::service_type},
    {"req", &ContextObject::requester},
    {"rfr", &ContextObject::referrer},
    {"rfe", &ContextObject::referring_entity},
    {"res", &ContextObject::resolver},
}};

// Accumulates the pieces of one entity while scanning KEV pairs, then builds
// descriptors in canonical order.
struct EntityDraft {
    std::vector<std::string> ids;
    std::optional<std::string> val_fmt;
    std::vector<std::pair<std::string, std::string>> val_kev;
    std::optional<std::string> ref_fmt;
    std::optional<std::string> ref;

    Entity build(std::string_view prefix) const {
        Entity out;
        for (const auto& id : ids) out.descriptors.push_back(Descriptor::identifier(id));
        if (val_fmt || !val_kev.empty()) {
            if (!val_fmt)
                throw KevError(KevErrc::MalformedKev,
                               std::string(prefix) + ".* metadata given without " + std::string(prefix) +
                                   "_val_fmt");
            out.descriptors.push_back(Descriptor::by_value(*val_fmt, val_kev));
        }
        if (ref_fmt || ref) {
            if (!ref_fmt || !ref)
                throw KevError(KevErrc::MalformedKev, std::string(prefix) +
                                                          "_ref requires both format and location");
            out.descriptors.push_back(Descriptor::by_reference(*ref_fmt, *ref));
        }
        return out;
    }
};

void set_singleton(std::optional<std::string>& slot, std::string value, const std::string& key) {
    if (slot) throw KevError(KevErrc::MalformedKev, "repeated singleton key '" + key + "'");
    slot = std::move(value);
}

}  // namespace

std::string encode_kev_pair(std::string_view key, std::string_view value) {
    return text::percent_encode(key) + "=" + text::percent_encode(value);
}

ContextObject parse_kev(std::string_view query) {
    ContextObject co;
    std::array<EntityDraft, kSlots.size()> drafts;
    std::optional<std::string> url_ver, url_ctx_fmt;

    if (!query.empty() && query.front() == '?') query.remove_prefix(1);
    std::size_t start = 0;
    while (start <= query.size()) {
        const auto amp = query.find('&', start);
        const auto part = query.substr(start, amp == std::string_view::npos ? std::string_view::npos
                                                                            : amp - start);
        start = amp == std::string_view::npos ? query.size() + 1 : amp + 1;
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string_view::npos)
            throw KevError(KevErrc::MalformedKev, "segment without '=': '" + std::string(part) + "'");
        const auto key_raw = text::percent_decode(part.substr(0, eq));
        const auto value_raw = text::percent_decode(part.substr(eq + 1));
        if (!key_raw || !value_raw)
            throw KevError(KevErrc::MalformedKev, "bad percent-encoding in '" + std::string(part) + "'");
        const std::string& key = *key_raw;
        std::string value = *value_raw;

        if (key == "url_ver") {
            set_singleton(url_ver, value, key);
            if (value != kUrlVer)
                throw KevError(KevErrc::MalformedKev, "unsupported url_ver '" + value + "'");
            continue;
        }
        if (key == "url_ctx_fmt") {
            set_singleton(url_ctx_fmt, value, key);
            if (value != kCtxFmt)
                throw KevError(KevErrc::MalformedKev, "unsupported url_ctx_fmt '" + value + "'");
            continue;
        }

        bool handled = false;
        for (std::size_t i = 0; i < kSlots.size(); ++i) {
            const auto pfx = kSlots[i].prefix;
            if (key.size() > pfx.size() + 1 && key.compare(0, pfx.size(), pfx) == 0 &&
                key[pfx.size()] == '.') {
                drafts[i].val_kev.emplace_back(key.substr(pfx.size() + 1), std::move(value));
                handled = true;
                break;
            }
            if (key == std::string(pfx) + "_id") {
                drafts[i].ids.push_back(std::move(value));
                handled = true;
                break;
            }
            if (key == std::string(pfx) + "_val_fmt") {
                set_singleton(drafts[i].val_fmt, std::move(value), key);
                handled = true;
                break;
            }
            if (key == std::string(pfx) + "_ref_fmt") {
                set_singleton(drafts[i].ref_fmt, std::move(value), key);
                handled = true;
                break;
            }
            if (key == std::string(pfx) + "_ref") {
                set_singleton(drafts[i].ref, std::move(value), key);
                handled = true;
                break;
            }
        }
        if (!handled) co.extras.emplace_back(key, std::move(value));
    }

    for (std::size_t i = 0; i < kSlots.size(); ++i) co.*(kSlots[i].member) = drafts[i].build(kSlots[i].prefix);
    return co;
}

std::string serialize_kev(const ContextObject& co) {
    std::string out;
    auto emit = [&out](std::string_view key, std::string_view value) {
        if (!out.empty()) out += '&';
        out += encode_kev_pair(key, value);
    };
    emit("url_ver", kUrlVer);
    emit("url_ctx_fmt", kCtxFmt);
    for (const auto& slot : kSlots) {
        const Entity& entity = co.*(slot.member);
        const std::string pfx(slot.prefix);
        // canonical order regardless of descriptor order in the entity
        bool have_val = false, have_ref = false;
        for (const auto& d : entity.descriptors) {
            if (d.kind == DescriptorKind::PrivateData)
                throw KevError(KevErrc::Unrepresentable, "PrivateData has no KEV representation");
            if (d.kind == DescriptorKind::Identifier) emit(pfx + "_id", d.identifier_uri);
        }
        for (const auto& d : entity.descriptors) {
            if (d.kind != DescriptorKind::ByValueMetadata) continue;
            if (have_val)
                throw KevError(KevErrc::Unrepresentable,
                               "entity '" + pfx + "' has multiple by-value descriptors");
            have_val = true;
            emit(pfx + "_val_fmt", d.metadata_format_uri);
            for (const auto& [k, v] : d.metadata_kev) emit(pfx + "." + k, v);
        }
        for (const auto& d : entity.descriptors) {
            if (d.kind != DescriptorKind::ByReferenceMetadata) continue;
            if (have_ref)
                throw KevError(KevErrc::Unrepresentable,
                               "entity '" + pfx + "' has multiple by-reference descriptors");
            have_ref = true;
            emit(pfx + "_ref_fmt", d.metadata_format_uri);
            emit(pfx + "_ref", d.metadata_location);
        }
    }
    for (const auto& [k, v] : co.extras) emit(k, v);
    return out;
}

}  // namespace oais::openurl
