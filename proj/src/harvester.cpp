#include "oais/harvester.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "oais/hash.hpp"
#include "oais/oaipmh_client.hpp"
#include "oais/text.hpp"
#include "oais/time.hpp"

namespace oais::client {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ClientError(ClientErrc::Transport, "cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return std::move(ss).str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ClientError(ClientErrc::Transport, "cannot write " + path.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.flush();
    if (!f) throw ClientError(ClientErrc::Transport, "short write to " + path.string());
}

// exclusive-create lock file, removed on scope exit
class MirrorLock {
public:
    explicit MirrorLock(const fs::path& path) : path_(path) {
        const int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0)
            throw ClientError(ClientErrc::Transport,
                              "mirror is locked by another harvest: " + path.string());
        ::close(fd);
    }
    ~MirrorLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    MirrorLock(const MirrorLock&) = delete;
    MirrorLock& operator=(const MirrorLock&) = delete;

private:
    fs::path path_;
};

}  // namespace

Mirror::Mirror(std::filesystem::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path Mirror::entry_dir(const std::string& ci_id) const { return dir_ / hash::sha256_hex(ci_id); }

std::optional<std::int64_t> Mirror::stored_datestamp(const std::string& ci_id) const {
    const auto entry = entry_dir(ci_id) / "entry.xml";
    if (!fs::exists(entry)) return std::nullopt;
    try {
        const auto root = xml::parse(read_file(entry));
        if (const auto* created = root.find_attr("created")) return time::parse_utc(*created);
    } catch (...) {
        // unreadable entry: treat as absent so a fresh harvest repairs it
    }
    return std::nullopt;
}

bool Mirror::upsert(const MirrorEntry& entry) {
    const auto existing = stored_datestamp(entry.ci_id);
    if (existing && *existing >= entry.datestamp) return false;
    const auto dir = entry_dir(entry.ci_id);
    const auto tmp = fs::path(dir.string() + ".tmp");
    fs::remove_all(tmp);
    fs::create_directories(tmp / "ds");
    write_file(tmp / "entry.xml", entry.dip_bytes);
    for (const auto& ds : entry.datastreams) write_file(tmp / "ds" / ds.fragment_id, ds.content);
    fs::remove_all(dir);
    fs::rename(tmp, dir);
    return true;
}

std::vector<MirrorEntry> Mirror::entries() const {
    std::vector<MirrorEntry> out;
    if (!fs::exists(dir_)) return out;
    for (const auto& sub : fs::directory_iterator(dir_)) {
        if (!sub.is_directory() || sub.path().filename() == "quarantine") continue;
        const auto entry_file = sub.path() / "entry.xml";
        if (!fs::exists(entry_file)) continue;
        MirrorEntry entry;
        entry.dip_bytes = read_file(entry_file);
        const auto root = xml::parse(entry.dip_bytes);
        if (const auto* ci = root.find_attr("ciId")) entry.ci_id = *ci;
        if (const auto* ns = root.find_attr("xmlns")) entry.dip_format_uri = *ns;
        if (const auto* created = root.find_attr("created"))
            entry.datestamp = time::parse_utc(*created).value_or(0);
        const auto ds_dir = sub.path() / "ds";
        if (fs::exists(ds_dir)) {
            std::vector<fs::path> files;
            for (const auto& f : fs::directory_iterator(ds_dir)) files.push_back(f.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                archive::Datastream ds;
                ds.fragment_id = f.filename().string();
                ds.content = read_file(f);
                entry.datastreams.push_back(std::move(ds));
            }
        }
        out.push_back(std::move(entry));
    }
    std::sort(out.begin(), out.end(),
              [](const MirrorEntry& a, const MirrorEntry& b) { return a.ci_id < b.ci_id; });
    return out;
}

std::size_t Mirror::entry_count() const {
    std::size_t n = 0;
    if (!fs::exists(dir_)) return 0;
    for (const auto& sub : fs::directory_iterator(dir_))
        if (sub.is_directory() && sub.path().filename() != "quarantine" &&
            fs::exists(sub.path() / "entry.xml"))
            ++n;
    return n;
}

void Mirror::quarantine(const std::string& identifier, std::int64_t datestamp,
                        const std::string& bytes) {
    const auto dir = dir_ / "quarantine";
    fs::create_directories(dir);
    const auto name = hash::sha256_hex(identifier + "|" + std::to_string(datestamp)) + ".xml";
    write_file(dir / name, bytes);
}

std::size_t Mirror::quarantine_count() const {
    const auto dir = dir_ / "quarantine";
    if (!fs::exists(dir)) return 0;
    std::size_t n = 0;
    for (const auto& f : fs::directory_iterator(dir)) {
        (void)f;
        ++n;
    }
    return n;
}

std::optional<HarvestCursor> Mirror::load_cursor() const {
    const auto path = dir_ / "cursor.tsv";
    if (!fs::exists(path)) return std::nullopt;
    const auto line = read_file(path);
    auto fields = text::split(line, '\t');
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\n')
        fields.back().pop_back();
    if (fields.size() != 6)
        throw ClientError(ClientErrc::Transport, "corrupt cursor file: " + path.string());
    HarvestCursor c;
    c.base_url = fields[0];
    c.metadata_prefix = fields[1];
    if (fields[2] != "-") {
        const auto t = time::parse_utc(fields[2]);
        if (!t) throw ClientError(ClientErrc::Transport, "corrupt cursor high-water mark");
        c.high_water = *t;
    }
    if (fields[3] != "-") c.pending_token = fields[3];
    if (fields[4] != "-") {
        const auto t = time::parse_utc(fields[4]);
        if (!t) throw ClientError(ClientErrc::Transport, "corrupt cursor pending-until");
        c.pending_until = *t;
    }
    if (fields[5] != "-") c.set = fields[5];
    return c;
}

void Mirror::save_cursor(const HarvestCursor& cursor) {
    std::string line = cursor.base_url + "\t" + cursor.metadata_prefix + "\t" +
                       (cursor.high_water ? time::format_utc(*cursor.high_water) : "-") + "\t" +
                       (cursor.pending_token ? *cursor.pending_token : "-") + "\t" +
                       (cursor.pending_until ? time::format_utc(*cursor.pending_until) : "-") + "\t" +
                       (cursor.set.empty() ? "-" : cursor.set) + "\n";
    const auto tmp = dir_ / "cursor.tsv.tmp";
    write_file(tmp, line);
    fs::rename(tmp, dir_ / "cursor.tsv");
}

packaging::FormatRegistry registry_from_formats(const std::vector<FormatInfo>& formats) {
    packaging::FormatRegistry registry;
    for (const auto& f : formats) {
        packaging::DipFormatDescriptor desc;
        desc.format_uri = f.format_uri;
        desc.metadata_prefix = f.metadata_prefix;
        desc.namespace_uri = f.format_uri;
        desc.schema_url = f.schema_url;
        registry.register_format(std::move(desc));
    }
    return registry;
}

Harvester::Harvester(std::filesystem::path mirror_dir, FetchOptions opts)
    : mirror_(std::move(mirror_dir)), opts_(opts) {}

HarvestResult Harvester::harvest_increment(const HarvestCursor& cursor, std::int64_t now,
                                           const BoundaryHook& boundary_hook) {
    MirrorLock lock(mirror_.dir() / ".lock");
    OaiPmhClient oai(cursor.base_url, opts_);
    const auto registry = registry_from_formats(oai.list_metadata_formats());

    HarvestResult result;
    result.cursor = cursor;
    if (cursor.high_water && !cursor.pending_token && now < *cursor.high_water)
        throw ClientError(ClientErrc::Protocol, "'now' precedes the cursor high-water mark");

    // resume an interrupted run before opening a new window
    std::optional<std::string> token = cursor.pending_token;
    const std::int64_t until = cursor.pending_token && cursor.pending_until ? *cursor.pending_until : now;
    int boundary = 0;

    auto persist = [&](bool done) {
        if (done) {
            result.cursor.high_water = until;
            result.cursor.pending_token.reset();
            result.cursor.pending_until.reset();
        } else {
            result.cursor.pending_token = token;
            result.cursor.pending_until = until;
        }
        mirror_.save_cursor(result.cursor);
        if (boundary_hook) boundary_hook(++boundary);
    };

    while (true) {
        std::vector<std::pair<std::string, std::string>> params;
        if (token) {
            params.emplace_back("resumptionToken", *token);
        } else {
            params.emplace_back("metadataPrefix", cursor.metadata_prefix);
            if (cursor.high_water) params.emplace_back("from", time::format_utc(*cursor.high_water));
            params.emplace_back("until", time::format_utc(until));
            if (!cursor.set.empty()) params.emplace_back("set", cursor.set);
        }

        ListPage page;
        try {
            page = oai.list_records(params);
        } catch (const ClientError& e) {
            if (e.code() == ClientErrc::Protocol && e.protocol_code() == "noRecordsMatch") {
                persist(true);
                return result;
            }
            throw;
        }
        ++result.pages;

        for (const auto& record : page.records) {
            try {
                auto metadata = record.metadata;
                const auto parsed = packaging::parse_dip_element(metadata, registry);
                xml::strip_whitespace_nodes(metadata);
                MirrorEntry entry;
                entry.ci_id = parsed.ci_id.value;
                entry.datestamp = record.datestamp;
                const auto* desc = registry.find_by_namespace(
                    metadata.find_attr("xmlns") ? *metadata.find_attr("xmlns") : "");
                entry.dip_format_uri = desc ? desc->format_uri : "";
                entry.dip_bytes = xml::write_document(metadata);
                entry.datastreams = parsed.datastreams;
                if (mirror_.upsert(entry)) result.entries.push_back(std::move(entry));
            } catch (const packaging::PackagingError& e) {
                auto metadata = record.metadata;
                xml::strip_whitespace_nodes(metadata);
                mirror_.quarantine(record.identifier, record.datestamp,
                                   xml::write_document(metadata) + "<!-- " + e.what() + " -->\n");
                ++result.quarantined;
            }
        }

        token = page.resumption_token;
        persist(!token.has_value());
        if (!token) return result;
    }
}

MirrorEntry order_dip(const std::string& base_url, const std::string& ci_id,
                      const std::string& format_uri, FetchOptions opts) {
    OaiPmhClient oai(base_url, opts);
    const auto registry = registry_from_formats(oai.list_metadata_formats());
    const auto* desc = registry.find(format_uri);
    if (!desc)
        throw ClientError(ClientErrc::Protocol,
                          "provider does not advertise format '" + format_uri + "'",
                          "cannotDisseminateFormat");
    auto record = oai.get_record(ci_id, desc->metadata_prefix);
    MirrorEntry entry;
    try {
        const auto parsed = packaging::parse_dip_element(record.metadata, registry);
        entry.ci_id = parsed.ci_id.value;
        entry.datastreams = parsed.datastreams;
    } catch (const packaging::PackagingError& e) {
        throw ClientError(ClientErrc::DipParse, e.what());
    }
    entry.datestamp = record.datestamp;
    entry.dip_format_uri = desc->format_uri;
    xml::strip_whitespace_nodes(record.metadata);
    entry.dip_bytes = xml::write_document(record.metadata);
    return entry;
}

}  // namespace oais::client
