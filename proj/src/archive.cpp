#include "oais/archive.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "oais/base64.hpp"
#include "oais/hash.hpp"
#include "oais/text.hpp"
#include "oais/time.hpp"
#include "oais/xml.hpp"

namespace oais::archive {

namespace fs = std::filesystem;

std::string_view to_string(ChangeKind k) {
    switch (k) {
        case ChangeKind::Original: return "original";
        case ChangeKind::Version: return "version";
        case ChangeKind::Edition: return "edition";
    }
    return "original";
}

std::optional<ChangeKind> change_kind_from_string(std::string_view s) {
    if (s == "original") return ChangeKind::Original;
    if (s == "version") return ChangeKind::Version;
    if (s == "edition") return ChangeKind::Edition;
    return std::nullopt;
}

std::string_view to_string(ArchiveErrc c) {
    switch (c) {
        case ArchiveErrc::UnknownAip: return "UnknownAip";
        case ArchiveErrc::UnknownSourceAip: return "UnknownSourceAip";
        case ArchiveErrc::CiMismatch: return "CiMismatch";
        case ArchiveErrc::DuplicateFragmentId: return "DuplicateFragmentId";
        case ArchiveErrc::EmptyPackage: return "EmptyPackage";
        case ArchiveErrc::NoSuchContent: return "NoSuchContent";
        case ArchiveErrc::InvalidPackage: return "InvalidPackage";
        case ArchiveErrc::StoreCorrupt: return "StoreCorrupt";
        case ArchiveErrc::StoreLocked: return "StoreLocked";
    }
    return "ArchiveError";
}

const Datastream* Aip::find_datastream(std::string_view fragment_id) const {
    for (const auto& ds : datastreams)
        if (ds.fragment_id == fragment_id) return &ds;
    return nullptr;
}

namespace {

// (created, aip_id) ascending; the aip_id tiebreak keeps resolution
// deterministic when two AIPs share a creation instant.
bool version_order(const Aip& a, const Aip& b) {
    if (a.created != b.created) return a.created < b.created;
    return a.aip_id.value < b.aip_id.value;
}

std::string join_sets(const std::vector<std::string>& sets) {
    std::string out;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (i) out += ',';
        out += sets[i];
    }
    return out;
}

std::vector<std::string> split_sets(std::string_view joined) {
    if (joined.empty()) return {};
    std::vector<std::string> out;
    for (auto& s : text::split(joined, ','))
        if (!s.empty()) out.push_back(std::move(s));
    return out;
}

void write_file_atomic(const fs::path& target, std::string_view content) {
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ArchiveError(ArchiveErrc::StoreCorrupt, "cannot write " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) throw ArchiveError(ArchiveErrc::StoreCorrupt, "short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ArchiveError(ArchiveErrc::StoreCorrupt, "cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return std::move(ss).str();
}

}  // namespace

std::string write_aip_document(const Aip& aip) {
    xml::Element root("aip");
    root.attr("aipId", aip.aip_id.value)
        .attr("ciId", aip.ci_id.value)
        .attr("created", time::format_utc(aip.created));
    xml::Element prov("provenance");
    prov.attr("changeKind", std::string(to_string(aip.provenance.change_kind)));
    if (aip.provenance.source_aip) prov.attr("sourceAip", aip.provenance.source_aip->value);
    if (!aip.provenance.note.empty()) prov.text(aip.provenance.note);
    root.child(std::move(prov));
    for (const auto& ds : aip.datastreams) {
        xml::Element el("datastream");
        el.attr("id", ds.fragment_id)
            .attr("mimeType", ds.media_type)
            .attr("length", std::to_string(ds.length()));
        el.text(base64::encode(ds.content));
        root.child(std::move(el));
    }
    return xml::write_document(root);
}

Aip parse_aip_document(std::string_view xml_bytes) {
    xml::Element root;
    try {
        root = xml::parse(xml_bytes);
    } catch (const xml::ParseError& e) {
        throw ArchiveError(ArchiveErrc::StoreCorrupt, std::string("bad AIP document: ") + e.what());
    }
    if (root.name != "aip") throw ArchiveError(ArchiveErrc::StoreCorrupt, "root element is not 'aip'");
    Aip aip;
    const auto* aip_id = root.find_attr("aipId");
    const auto* ci_id = root.find_attr("ciId");
    const auto* created = root.find_attr("created");
    if (!aip_id || !ci_id || !created)
        throw ArchiveError(ArchiveErrc::StoreCorrupt, "aip element missing identity attributes");
    aip.aip_id.value = *aip_id;
    aip.ci_id.value = *ci_id;
    const auto t = time::parse_utc(*created);
    if (!t) throw ArchiveError(ArchiveErrc::StoreCorrupt, "bad created instant: " + *created);
    aip.created = *t;
    if (const auto* prov = root.first_child("provenance")) {
        const auto* kind = prov->find_attr("changeKind");
        const auto parsed = kind ? change_kind_from_string(*kind) : std::nullopt;
        if (!parsed) throw ArchiveError(ArchiveErrc::StoreCorrupt, "bad provenance changeKind");
        aip.provenance.change_kind = *parsed;
        if (const auto* src = prov->find_attr("sourceAip")) aip.provenance.source_aip = AipId{*src};
        aip.provenance.note = prov->text_content();
    } else {
        throw ArchiveError(ArchiveErrc::StoreCorrupt, "aip element missing provenance");
    }
    for (const auto* el : root.children_named("datastream")) {
        Datastream ds;
        const auto* id = el->find_attr("id");
        const auto* mime = el->find_attr("mimeType");
        if (!id || !mime) throw ArchiveError(ArchiveErrc::StoreCorrupt, "datastream missing attributes");
        ds.fragment_id = *id;
        ds.media_type = *mime;
        const auto decoded = base64::decode(el->text_content());
        if (!decoded) throw ArchiveError(ArchiveErrc::StoreCorrupt, "datastream payload is not base64");
        ds.content = *decoded;
        if (const auto* len = el->find_attr("length")) {
            if (std::to_string(ds.content.size()) != *len)
                throw ArchiveError(ArchiveErrc::StoreCorrupt, "datastream length mismatch");
        }
        aip.datastreams.push_back(std::move(ds));
    }
    return aip;
}

Archive::Archive(std::filesystem::path store_dir, std::string instance_name, bool take_lock)
    : store_dir_(std::move(store_dir)), instance_name_(std::move(instance_name)) {
    fs::create_directories(store_dir_ / "aips");
    if (take_lock) {
        const fs::path lock = store_dir_ / ".lock";
        const int fd = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0)
            throw ArchiveError(ArchiveErrc::StoreLocked,
                               store_dir_.string() + " is in use (remove .lock if stale)");
        const std::string pid = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
        ::close(fd);
        locked_ = true;
    }
    try {
        replay_index();
    } catch (...) {
        if (locked_) fs::remove(store_dir_ / ".lock");
        throw;
    }
}

Archive::~Archive() {
    if (locked_) {
        std::error_code ec;
        fs::remove(store_dir_ / ".lock", ec);
    }
}

void Archive::replay_index() {
    const fs::path index = store_dir_ / "index.tsv";
    if (!fs::exists(index)) return;
    std::ifstream f(index);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cols = text::split(line, '\t');
        if (cols.size() != 5)
            throw ArchiveError(ArchiveErrc::StoreCorrupt,
                               "index.tsv line " + std::to_string(lineno) + ": bad column count");
        Aip aip = parse_aip_document(read_file(store_dir_ / cols[4]));
        if (aip.aip_id.value != cols[0] || aip.ci_id.value != cols[1] ||
            time::format_utc(aip.created) != cols[2])
            throw ArchiveError(ArchiveErrc::StoreCorrupt,
                               "index.tsv line " + std::to_string(lineno) + ": document disagrees with index");
        aip.sets = split_sets(cols[3]);
        by_aip_id_.emplace(aip.aip_id.value, aips_.size());
        // continue minting after the largest serial this instance issued
        const std::string prefix = "info:repo/" + instance_name_ + "/";
        if (aip.aip_id.value.rfind(prefix, 0) == 0) {
            const auto tail = aip.aip_id.value.substr(prefix.size());
            if (!tail.empty() && tail.find_first_not_of("0123456789") == std::string::npos)
                next_serial_ = std::max<std::uint64_t>(next_serial_, std::stoull(tail) + 1);
        }
        aips_.push_back(std::move(aip));
    }
}

std::string Archive::mint_aip_id_locked() {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%08llu", static_cast<unsigned long long>(next_serial_++));
    return "info:repo/" + instance_name_ + "/" + buf;
}

void Archive::validate_sip(const Sip& sip) {
    if (!text::is_absolute_uri(sip.ci_id.value))
        throw ArchiveError(ArchiveErrc::InvalidPackage,
                           "ci_id is not an absolute URI: '" + sip.ci_id.value + "'");
    if (sip.datastreams.empty()) throw ArchiveError(ArchiveErrc::EmptyPackage, "SIP has no datastreams");
    std::set<std::string_view> seen;
    for (const auto& ds : sip.datastreams) {
        if (!text::is_ncname(ds.fragment_id))
            throw ArchiveError(ArchiveErrc::InvalidPackage,
                               "fragment id is not an NCName: '" + ds.fragment_id + "'");
        if (!text::is_media_type(ds.media_type))
            throw ArchiveError(ArchiveErrc::InvalidPackage, "bad media type: '" + ds.media_type + "'");
        if (!seen.insert(ds.fragment_id).second)
            throw ArchiveError(ArchiveErrc::DuplicateFragmentId, "'" + ds.fragment_id + "'");
    }
    if (sip.change_kind == ChangeKind::Original) {
        if (sip.source_aip)
            throw ArchiveError(ArchiveErrc::InvalidPackage, "Original SIP must not name a source AIP");
    } else {
        if (!sip.source_aip)
            throw ArchiveError(ArchiveErrc::InvalidPackage, "Version/Edition SIP requires a source AIP");
        if (sip.note.empty())
            throw ArchiveError(ArchiveErrc::InvalidPackage, "Version/Edition SIP requires a note");
    }
    for (const auto& s : sip.sets)
        if (!text::is_set_spec(s))
            throw ArchiveError(ArchiveErrc::InvalidPackage, "bad set spec: '" + s + "'");
}

void Archive::persist_locked(const Aip& aip) {
    const std::string file = "aips/" + hash::sha256_hex(aip.aip_id.value) + ".xml";
    write_file_atomic(store_dir_ / file, write_aip_document(aip));
    std::ofstream index(store_dir_ / "index.tsv", std::ios::app);
    if (!index) throw ArchiveError(ArchiveErrc::StoreCorrupt, "cannot append to index.tsv");
    index << aip.aip_id.value << '\t' << aip.ci_id.value << '\t' << time::format_utc(aip.created) << '\t'
          << join_sets(aip.sets) << '\t' << file << '\n';
    index.flush();
    if (!index) throw ArchiveError(ArchiveErrc::StoreCorrupt, "short write to index.tsv");
}

Aip Archive::ingest(const Sip& sip, std::int64_t now) {
    validate_sip(sip);
    std::unique_lock lock(mutex_);
    if (sip.source_aip) {
        const auto it = by_aip_id_.find(sip.source_aip->value);
        if (it == by_aip_id_.end())
            throw ArchiveError(ArchiveErrc::UnknownSourceAip, "'" + sip.source_aip->value + "'");
        const Aip& source = aips_[it->second];
        if (source.ci_id != sip.ci_id)
            throw ArchiveError(ArchiveErrc::CiMismatch, "source AIP packages '" + source.ci_id.value +
                                                            "', SIP claims '" + sip.ci_id.value + "'");
    }
    Aip aip;
    aip.aip_id.value = mint_aip_id_locked();
    aip.ci_id = sip.ci_id;
    aip.created = now;  // caller supplies epoch seconds; sub-second input is not representable
    aip.datastreams = sip.datastreams;
    aip.provenance = Provenance{sip.change_kind, sip.source_aip, sip.note};
    aip.sets = sip.sets;
    persist_locked(aip);
    by_aip_id_.emplace(aip.aip_id.value, aips_.size());
    aips_.push_back(aip);
    return aip;
}

Aip Archive::get_aip(const AipId& id) const {
    std::shared_lock lock(mutex_);
    const auto it = by_aip_id_.find(id.value);
    if (it == by_aip_id_.end()) throw ArchiveError(ArchiveErrc::UnknownAip, "'" + id.value + "'");
    return aips_[it->second];
}

std::vector<Aip> Archive::aips_for_ci(const CiId& ci) const {
    std::shared_lock lock(mutex_);
    std::vector<Aip> out;
    for (const auto& aip : aips_)
        if (aip.ci_id == ci) out.push_back(aip);
    std::sort(out.begin(), out.end(), version_order);
    return out;
}

Aip Archive::latest_for_ci(const CiId& ci, std::optional<std::int64_t> until) const {
    std::shared_lock lock(mutex_);
    const Aip* best = nullptr;
    for (const auto& aip : aips_) {
        if (aip.ci_id != ci) continue;
        if (until && aip.created > *until) continue;
        if (!best || version_order(*best, aip)) best = &aip;
    }
    if (!best) throw ArchiveError(ArchiveErrc::NoSuchContent, "'" + ci.value + "'");
    return *best;
}

std::vector<AipInfo> Archive::list_infos() const {
    std::shared_lock lock(mutex_);
    std::vector<AipInfo> out;
    out.reserve(aips_.size());
    for (const auto& aip : aips_) out.push_back(AipInfo{aip.aip_id, aip.ci_id, aip.created, aip.sets});
    return out;
}

std::optional<std::int64_t> Archive::earliest_created() const {
    std::shared_lock lock(mutex_);
    std::optional<std::int64_t> min;
    for (const auto& aip : aips_)
        if (!min || aip.created < *min) min = aip.created;
    return min;
}

std::size_t Archive::size() const {
    std::shared_lock lock(mutex_);
    return aips_.size();
}

}  // namespace oais::archive
