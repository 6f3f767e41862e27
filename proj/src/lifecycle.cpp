#include "tkg/lifecycle.hpp"

#include <algorithm>

#include "tkg/domain_spec.hpp"
#include "tkg/mapping.hpp"
#include "tkg/nquads.hpp"
#include "tkg/offers.hpp"
#include "tkg/util.hpp"

namespace tkg::lifecycle {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json read_json(const fs::path& file) {
    try {
        return json::parse(read_file(file.string()));
    } catch (const json::parse_error& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() || base.empty() ? p : base / p; }

fs::path existing(const std::vector<fs::path>& candidates, const std::string& what) {
    for (const auto& c : candidates)
        if (!c.empty() && fs::exists(c)) return c;
    throw UsageError(what + " not found: " + (candidates.empty() ? std::string() : candidates.back().string()));
}

}  // namespace

Config Config::load(const fs::path& file) {
    if (!fs::exists(file)) throw UsageError("config file not found: " + file.string());
    const json j = read_json(file);
    const fs::path base = file.parent_path();
    Config c;
    try {
        if (j.contains("store")) c.store_path = resolve(base, j["store"].get<std::string>());
        if (j.contains("dsDir")) c.ds_dir = resolve(base, j["dsDir"].get<std::string>());
        if (j.contains("mappingDir")) c.mapping_dir = resolve(base, j["mappingDir"].get<std::string>());
        if (j.contains("manifest")) c.manifest_path = resolve(base, j["manifest"].get<std::string>());
        if (j.contains("crawler")) {
            const json& cr = j["crawler"];
            c.crawl_delay = std::chrono::milliseconds(cr.value("delayMs", c.crawl_delay.count()));
            c.crawl_max_pages = cr.value("maxPages", c.crawl_max_pages);
            c.crawl_parallelism = cr.value("parallelism", c.crawl_parallelism);
            c.crawl_timeout = std::chrono::milliseconds(cr.value("timeoutMs", c.crawl_timeout.count()));
        }
        if (j.contains("broker")) {
            c.broker_host = j["broker"].value("host", c.broker_host);
            c.broker_port = j["broker"].value("port", c.broker_port);
        }
        if (j.contains("providers"))
            for (const auto& [id, path] : j["providers"].items())
                c.providers.emplace_back(id, resolve(base, path.get<std::string>()));
    } catch (const json::exception& e) {
        throw UsageError("malformed config " + file.string() + ": " + e.what());
    }
    c.check();
    return c;
}

void Config::check() const {
    if (broker_port < 1 || broker_port > 65535)
        throw UsageError("broker port " + std::to_string(broker_port) + " outside 1..65535");
}

void load_store_file(const fs::path& path, QuadStore& store) {
    if (path.empty() || !fs::exists(path)) return;
    load_store(read_file(path.string()), store);
}

void save_store_file(const fs::path& path, const QuadStore& store) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    write_file(tmp.string(), serialize_store(store));
    fs::rename(tmp, path);
}

LoadedDocuments load_documents(const fs::path& path) {
    if (!fs::exists(path)) throw UsageError("document path not found: " + path.string());
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            const auto ext = entry.path().extension();
            if (entry.is_regular_file() && (ext == ".json" || ext == ".jsonld")) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    LoadedDocuments out;
    for (const auto& f : files) {
        json j;
        try {
            j = json::parse(read_file(f.string()));
        } catch (const json::parse_error& e) {
            out.failures.emplace_back(f.filename().string(), e.what());
            continue;
        }
        if (j.is_array())
            for (auto& d : j) out.documents.push_back(std::move(d));
        else
            out.documents.push_back(std::move(j));
    }
    return out;
}

json LifecycleResult::to_json() const {
    json reps = json::array();
    for (const auto& r : reports) reps.push_back(r.to_json());
    json crawl_reports = json::array();
    for (const auto& c : crawls) crawl_reports.push_back(c.to_json());
    return {{"reports", reps}, {"crawls", crawl_reports}, {"exitCode", exit_code}};
}

LifecycleResult run_lifecycle(const Config& config, Date date) {
    if (config.manifest_path.empty() || !fs::exists(config.manifest_path))
        throw UsageError("migration manifest not found: " + config.manifest_path.string());
    const json manifest = read_json(config.manifest_path);
    const fs::path base = config.manifest_path.parent_path();
    if (!manifest.is_object() || (manifest.contains("sources") && !manifest["sources"].is_array()))
        throw UsageError("manifest must be an object with a \"sources\" array");

    std::vector<ingest::MigrationSource> sources;
    // Inputs that failed before ingestion, charged to their source's report.
    std::vector<std::vector<ingest::Rejection>> early(manifest.value("sources", json::array()).size());

    std::size_t index = 0;
    for (const auto& s : manifest.value("sources", json::array())) {
        ingest::MigrationSource src;
        try {
            src.id = s.at("id").get<std::string>();
            const std::string kind = s.value("kind", std::string("documents"));
            if (kind == "crawl") {
                src.kind = ingest::MigrationSource::Kind::Crawl;
                crawl::CrawlJob job;
                job.seeds = crawl::parse_seed_list(read_file(existing({resolve(base, s.at("path").get<std::string>())}, "seed list").string()));
                job.per_host_delay = std::chrono::milliseconds(s.value("delayMs", config.crawl_delay.count()));
                job.max_pages_per_site = s.value("maxPages", config.crawl_max_pages);
                job.parallelism = config.crawl_parallelism;
                job.fetch.timeout = config.crawl_timeout;
                job.crawl_date = date;
                job.check();
                src.crawl = std::move(job);
            } else if (kind == "documents") {
                if (s.contains("path")) {
                    auto loaded = load_documents(resolve(base, s["path"].get<std::string>()));
                    src.documents = std::move(loaded.documents);
                    for (auto& [file, msg] : loaded.failures) early[index].push_back({0, file, "unparseable JSON: " + msg});
                }
                if (s.contains("mapping")) {
                    const std::string m = s["mapping"].get<std::string>();
                    const auto spec = mapping::load_mapping(
                        read_file(existing({resolve(config.mapping_dir, m), resolve(base, m)}, "mapping").string()));
                    const auto text = read_file(existing({resolve(base, s.at("records").get<std::string>())}, "records").string());
                    auto batch = mapping::apply_batch(spec, mapping::parse_records(text, spec.format));
                    for (auto& d : batch.documents) src.documents.push_back(std::move(d));
                    for (auto& e : batch.errors)
                        early[index].push_back({e.index, "record " + std::to_string(e.index), "mapping failed: " + e.message});
                }
                if (s.contains("offerSpaces")) {
                    const json& opts = s.value("offers", json::object());
                    const auto k = opts.value("k", std::size_t{5});
                    const auto strategy = offers::parse_strategy(opts.value("strategy", std::string("global-min-first")));
                    for (const auto& p : s["offerSpaces"]) {
                        const auto space = offers::load_offer_space(
                            read_file(existing({resolve(base, p.get<std::string>())}, "offer space").string()));
                        DateInterval window = space.validity;
                        if (opts.contains("window")) {
                            window = {Date::parse(opts["window"].at("start").get<std::string>()),
                                      Date::parse(opts["window"].at("end").get<std::string>())};
                        }
                        const auto reps = offers::materialize_representatives(space, window, k, strategy);
                        for (auto& d : offers::offers_to_annotations(reps, space.accommodation_id, {space.provider_id}))
                            src.documents.push_back(std::move(d));
                    }
                }
                if (s.contains("ds")) {
                    const std::string d = s["ds"].get<std::string>();
                    src.ds = ds::load_ds(read_file(existing({resolve(config.ds_dir, d), resolve(base, d)}, "domain specification").string()));
                }
            } else {
                throw UsageError("source '" + src.id + "' has unknown kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw UsageError("malformed manifest source #" + std::to_string(index) + ": " + e.what());
        }
        sources.push_back(std::move(src));
        ++index;
    }

    QuadStore store;
    load_store_file(config.store_path, store);
    auto outcome = ingest::migrate_daily(store, sources, date);

    LifecycleResult result;
    for (std::size_t i = 0; i < outcome.reports.size(); ++i) {
        auto& report = outcome.reports[i];
        for (auto& r : early[i]) {
            r.index = report.documents_received++;
            report.rejected.push_back(std::move(r));
        }
        if (report.documents_received > 0 && report.documents_accepted() == 0) result.exit_code = 1;
    }
    result.reports = std::move(outcome.reports);
    result.crawls = std::move(outcome.crawls);
    save_store_file(config.store_path, store);
    return result;
}

}  // namespace tkg::lifecycle
