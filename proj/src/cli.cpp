#include "oais/cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "oais/agent.hpp"
#include "oais/archive.hpp"
#include "oais/config.hpp"
#include "oais/gateway.hpp"
#include "oais/harvester.hpp"
#include "oais/oaipmh_client.hpp"
#include "oais/time.hpp"

namespace oais::gateway {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_stop{false};
void handle_signal(int) { g_stop.store(true); }

GatewayConfig resolve_config(const std::string& config_path) {
    if (!config_path.empty()) return GatewayConfig::load_file(config_path);
    if (const char* env = std::getenv("OAIS_GATEWAY_CONFIG"); env && *env)
        return GatewayConfig::load_file(env);
    return default_config();
}

std::string guess_media_type(const fs::path& file) {
    const auto ext = file.extension().string();
    if (ext == ".pdf") return "application/pdf";
    if (ext == ".xml") return "application/xml";
    if (ext == ".txt") return "text/plain";
    if (ext == ".html" || ext == ".htm") return "text/html";
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    if (ext == ".png") return "image/png";
    if (ext == ".json") return "application/json";
    return "application/octet-stream";
}

// PATH[:FRAGID[:MIMETYPE]]
archive::Datastream read_file_spec(const std::string& spec, std::size_t index) {
    std::string path = spec, frag, mime;
    if (const auto c1 = spec.find(':'); c1 != std::string::npos) {
        path = spec.substr(0, c1);
        const auto rest = spec.substr(c1 + 1);
        if (const auto c2 = rest.find(':'); c2 != std::string::npos) {
            frag = rest.substr(0, c2);
            mime = rest.substr(c2 + 1);
        } else {
            frag = rest;
        }
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    archive::Datastream ds;
    ds.fragment_id = frag.empty() ? "ds" + std::to_string(index + 1) : frag;
    ds.media_type = mime.empty() ? guess_media_type(path) : mime;
    ds.content = std::move(ss).str();
    return ds;
}

void write_out_file(const fs::path& path, std::string_view bytes) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_entry_files(const fs::path& out_dir, const std::string& dip_bytes,
                       const std::vector<archive::Datastream>& datastreams, std::ostream& out) {
    write_out_file(out_dir / "entry.xml", dip_bytes);
    for (const auto& ds : datastreams) write_out_file(out_dir / "ds" / ds.fragment_id, ds.content);
    out << "wrote " << (out_dir / "entry.xml").string() << " and " << datastreams.size()
        << " datastream(s)\n";
}

struct CliOptions {
    std::string config_path;

    // ingest
    std::string ci;
    std::vector<std::string> files;
    std::string version_of, edition_of, note;
    std::vector<std::string> sets;

    // network subcommands
    std::string base_url;
    std::string prefix;
    std::string mirror_dir;
    bool once = false;
    int interval = 60;
    std::string id;
    std::string format;
    std::string out_dir;
    int level = 1;
    std::string choose = "latest";
    std::string svc_filter;
    std::string set;
};

int cmd_serve(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    GatewayService service(resolve_config(opt.config_path));
    service.start();
    out << "listening on port " << service.port() << "\n"
        << "OAI-PMH:  " << service.oaipmh_url() << "\n"
        << "OpenURL:  " << service.openurl_url() << "\n";
    out.flush();
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    err << "shutting down\n";
    service.stop();
    return 0;
}

int cmd_ingest(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    if (!opt.version_of.empty() && !opt.edition_of.empty()) {
        err << "--version-of and --edition-of are mutually exclusive\n";
        return 2;
    }
    const auto cfg = resolve_config(opt.config_path);
    archive::Archive store(cfg.store_dir, cfg.instance_name);
    archive::Sip sip;
    sip.ci_id.value = opt.ci;
    for (std::size_t i = 0; i < opt.files.size(); ++i)
        sip.datastreams.push_back(read_file_spec(opt.files[i], i));
    if (!opt.version_of.empty()) {
        sip.change_kind = archive::ChangeKind::Version;
        sip.source_aip = archive::AipId{opt.version_of};
    } else if (!opt.edition_of.empty()) {
        sip.change_kind = archive::ChangeKind::Edition;
        sip.source_aip = archive::AipId{opt.edition_of};
    }
    sip.note = opt.note;
    if (sip.change_kind != archive::ChangeKind::Original && sip.note.empty())
        sip.note = "ingested via cli";
    sip.sets = opt.sets;
    const auto aip = store.ingest(sip, time::now_epoch_seconds());
    out << aip.aip_id.value << "\n";
    err << "ingested " << aip.aip_id.value << " (ci " << aip.ci_id.value << ", "
        << aip.datastreams.size() << " datastream(s), created " << time::format_utc(aip.created)
        << ")\n";
    return 0;
}

int cmd_harvest(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    client::Harvester harvester(opt.mirror_dir);
    auto cursor = harvester.mirror().load_cursor();
    if (cursor) {
        if (cursor->base_url != opt.base_url || cursor->metadata_prefix != opt.prefix ||
            cursor->set != opt.set) {
            err << "mirror cursor was created for a different harvest ("
                << cursor->base_url << ", prefix " << cursor->metadata_prefix << ")\n";
            return 2;
        }
    } else {
        cursor = client::HarvestCursor{};
        cursor->base_url = opt.base_url;
        cursor->metadata_prefix = opt.prefix;
        cursor->set = opt.set;
    }
    while (true) {
        const auto result = harvester.harvest_increment(*cursor, time::now_epoch_seconds());
        out << "harvested " << result.entries.size() << " records";
        if (result.quarantined) out << " (" << result.quarantined << " quarantined)";
        out << "\n";
        out.flush();
        cursor = result.cursor;
        if (opt.once) break;
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        for (int i = 0; i < opt.interval * 5 && !g_stop.load(); ++i)
            std::this_thread::sleep_for(std::chrono::milliseconds(200));
        if (g_stop.load()) break;
    }
    return 0;
}

int cmd_order(const CliOptions& opt, std::ostream& out, std::ostream&) {
    const auto entry = client::order_dip(opt.base_url, opt.id, opt.format);
    write_entry_files(opt.out_dir, entry.dip_bytes, entry.datastreams, out);
    return 0;
}

int cmd_resolve(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    const auto chooser = client::Chooser::parse(opt.choose);
    if (!chooser) {
        err << "--choose expects latest, first or aip:ID\n";
        return 2;
    }
    client::ServiceFilter filter;
    if (!opt.svc_filter.empty())
        filter = [needle = opt.svc_filter](const std::string& uri) {
            return uri.find(needle) != std::string::npos;
        };
    client::OpenUrlAgent agent(opt.base_url);
    if (opt.level == 1) {
        const auto dip = agent.order_dip(opt.id, *chooser, filter);
        write_out_file(fs::path(opt.out_dir) / "dip.xml", dip.xml);
        out << "wrote " << (fs::path(opt.out_dir) / "dip.xml").string() << " (format "
            << dip.format_uri << ", aip " << dip.source_aip.value << ")\n";
        return 0;
    }
    const auto streams = agent.disseminate(opt.id, *chooser, filter);
    for (const auto& s : streams) {
        write_out_file(fs::path(opt.out_dir) / s.fragment_id, s.bytes);
        out << "wrote " << (fs::path(opt.out_dir) / s.fragment_id).string() << " (" << s.media_type
            << ", " << s.bytes.size() << " bytes)\n";
    }
    if (streams.empty()) out << "no disseminations matched the filter\n";
    return 0;
}

int cmd_formats(const CliOptions& opt, std::ostream& out, std::ostream&) {
    client::OaiPmhClient oai(opt.base_url);
    for (const auto& f : oai.list_metadata_formats())
        out << f.metadata_prefix << "\t" << f.format_uri << "\t" << f.schema_url << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"OAIS reference repository gateway"};
    app.require_subcommand(1);
    CliOptions opt;

    auto* serve = app.add_subcommand("serve", "host both access interfaces over the store");
    serve->add_option("--config", opt.config_path, "configuration file (JSON)");

    auto* ingest = app.add_subcommand("ingest", "store a submission package as a new AIP");
    ingest->add_option("--config", opt.config_path, "configuration file (JSON)");
    ingest->add_option("--ci", opt.ci, "Content Information Identifier (absolute URI)")->required();
    ingest->add_option("--file", opt.files, "datastream file: PATH[:FRAGID[:MIMETYPE]]")
        ->required()
        ->take_all();
    ingest->add_option("--version-of", opt.version_of, "source AIP this package is a Version of");
    ingest->add_option("--edition-of", opt.edition_of, "source AIP this package is an Edition of");
    ingest->add_option("--note", opt.note, "provenance note");
    ingest->add_option("--set", opt.sets, "set spec (repeatable)")->take_all();

    auto* harvest = app.add_subcommand("harvest", "incrementally mirror a repository via OAI-PMH");
    harvest->add_option("--base-url", opt.base_url, "OAI-PMH base URL")->required();
    harvest->add_option("--prefix", opt.prefix, "metadata prefix or format URI")->required();
    harvest->add_option("--mirror", opt.mirror_dir, "mirror directory")->required();
    harvest->add_option("--set", opt.set, "restrict to one set");
    harvest->add_flag("--once", opt.once, "run one increment and exit");
    harvest->add_option("--interval", opt.interval, "seconds between increments")->default_val(60);

    auto* order = app.add_subcommand("order", "fetch one DIP via OAI-PMH GetRecord");
    order->add_option("--base-url", opt.base_url, "OAI-PMH base URL")->required();
    order->add_option("--id", opt.id, "Content Information Identifier")->required();
    order->add_option("--format", opt.format, "DIP format URI or prefix")->required();
    order->add_option("--out", opt.out_dir, "output directory")->required();

    auto* resolve = app.add_subcommand("resolve", "walk the OpenURL handshakes");
    resolve->add_option("--base-url", opt.base_url, "OpenURL base URL")->required();
    resolve->add_option("--id", opt.id, "Content Information Identifier")->required();
    resolve->add_option("--level", opt.level, "conformance level")->check(CLI::Range(1, 2))->default_val(1);
    resolve->add_option("--choose", opt.choose, "latest | first | aip:ID")->default_val("latest");
    resolve->add_option("--svc", opt.svc_filter, "substring filter on service URIs");
    resolve->add_option("--out", opt.out_dir, "output directory")->required();

    auto* formats = app.add_subcommand("formats", "list a provider's DIP formats");
    formats->add_option("--base-url", opt.base_url, "OAI-PMH base URL")->required();

    std::vector<const char*> argv;
    argv.push_back("oais-gateway");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (serve->parsed()) return cmd_serve(opt, out, err);
        if (ingest->parsed()) return cmd_ingest(opt, out, err);
        if (harvest->parsed()) return cmd_harvest(opt, out, err);
        if (order->parsed()) return cmd_order(opt, out, err);
        if (resolve->parsed()) return cmd_resolve(opt, out, err);
        if (formats->parsed()) return cmd_formats(opt, out, err);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const client::ClientError& e) {
        err << e.what() << "\n";
        return e.code() == client::ClientErrc::Transport ? 3 : 1;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
    err << "no subcommand given\n";
    return 2;
}

}  // namespace oais::gateway
