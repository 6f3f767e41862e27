#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tkg/crawler.hpp"
#include "tkg/date.hpp"
#include "tkg/error.hpp"
#include "tkg/ingest.hpp"
#include "tkg/quad_store.hpp"

namespace tkg::lifecycle {

/// Bad invocation or unresolvable input paths; the CLI exits with 2.
class UsageError : public Error {
public:
    using Error::Error;
};

struct Config {
    std::filesystem::path store_path = "store.nq";
    std::filesystem::path ds_dir;
    std::filesystem::path mapping_dir;
    std::filesystem::path manifest_path;
    std::chrono::milliseconds crawl_delay{500};
    std::size_t crawl_max_pages = 100;
    std::size_t crawl_parallelism = 4;
    std::chrono::milliseconds crawl_timeout{5000};
    std::string broker_host = "127.0.0.1";
    int broker_port = 8080;
    std::vector<std::pair<std::string, std::filesystem::path>> providers;  // id -> descriptor file

    /// Reads the JSON config file; relative paths resolve against its directory.
    static Config load(const std::filesystem::path& file);
    /// Throws UsageError for a port outside 1..65535.
    void check() const;
};

/// Loads the store file when it exists; an absent file means an empty store.
void load_store_file(const std::filesystem::path& path, QuadStore& store);
void save_store_file(const std::filesystem::path& path, const QuadStore& store);

/// Annotation documents from a file (object or array) or from every
/// .json/.jsonld file of a directory, in name order. Files that fail to
/// parse are returned in `failures` as (file, message).
struct LoadedDocuments {
    std::vector<nlohmann::json> documents;
    std::vector<std::pair<std::string, std::string>> failures;
};
LoadedDocuments load_documents(const std::filesystem::path& path);

struct LifecycleResult {
    std::vector<ingest::IngestReport> reports;
    std::vector<crawl::CrawlResult> crawls;
    int exit_code = 0;  // 1 when some source had every document rejected

    nlohmann::json to_json() const;
};

/// map -> validate -> offer heuristics -> crawl -> ingest -> infer ->
/// consolidate -> persist, for every source of the manifest.
LifecycleResult run_lifecycle(const Config& config, Date date);

}  // namespace tkg::lifecycle
